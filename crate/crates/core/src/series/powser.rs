//! Dense power series modulo `x^m`, used where precision is managed by hand.

use crate::ffield::{FqElem, FqField};

pub fn mul(f: &FqField, a: &[FqElem], b: &[FqElem], m: usize) -> Vec<FqElem> {
    let mut out = vec![FqElem::ZERO; m];
    for (i, &x) in a.iter().enumerate().take(m) {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(m - i) {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    out
}

/// `1/a mod x^m`; `a[0]` must be nonzero.
pub fn inv(f: &FqField, a: &[FqElem], m: usize) -> Vec<FqElem> {
    let g0 = f.inv(a[0]).expect("unit constant term");
    let mut g = vec![FqElem::ZERO; m];
    if m == 0 {
        return g;
    }
    g[0] = g0;
    for k in 1..m {
        let mut s = FqElem::ZERO;
        for j in 1..=k.min(a.len() - 1) {
            s = f.add(s, f.mul(a[j], g[k - j]));
        }
        g[k] = f.neg(f.mul(g0, s));
    }
    g
}

/// `a(b(x)) mod x^m` for `b(0) = 0`.
pub fn compose(f: &FqField, a: &[FqElem], b: &[FqElem], m: usize) -> Vec<FqElem> {
    let mut acc = vec![FqElem::ZERO; m];
    for &c in a.iter().take(m).rev() {
        acc = mul(f, &acc, b, m);
        if m > 0 {
            acc[0] = f.add(acc[0], c);
        }
    }
    acc
}

pub fn derivative(f: &FqField, a: &[FqElem]) -> Vec<FqElem> {
    let p = f.characteristic() as usize;
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| f.mul(c, f.from_prime((k % p) as u32)))
        .collect()
}

/// Compositional inverse of `a` (with `a(0) = 0`, `a'(0) != 0`) modulo
/// `x^m`, by Newton iteration.
pub fn reversion(f: &FqField, a: &[FqElem], m: usize) -> Vec<FqElem> {
    let mut h = vec![FqElem::ZERO; m.max(2)];
    h[1] = f.inv(a[1]).expect("linear coefficient nonzero");
    let da = derivative(f, a);
    let mut cur = 2;
    while cur < m {
        cur = (2 * cur).min(m);
        h.resize(cur, FqElem::ZERO);
        let mut e = compose(f, a, &h, cur);
        e[1] = f.sub(e[1], f.one());
        let d = compose(f, &da, &h, cur);
        let corr = mul(f, &e, &inv(f, &d, cur), cur);
        for (x, c) in h.iter_mut().zip(corr) {
            *x = f.sub(*x, c);
        }
    }
    h.truncate(m);
    h
}
