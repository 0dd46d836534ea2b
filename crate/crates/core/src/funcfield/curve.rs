use std::fmt;

use crate::ffield::{build_extension, FieldExtension, FqElem, FqField, FqPoly};
use crate::series::{powser, TruncLaurent};
use crate::{invalid, Error, Result};

/// Weierstrass coefficients `[a1, a2, a3, a4, a6]` of
/// `y^2 + a1 t y + a3 y = t^3 + a2 t^2 + a4 t + a6`.
pub type Weierstrass = [FqElem; 5];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveKind {
    ProjectiveLine,
    Elliptic(Weierstrass),
}

/// The projective line or a smooth Weierstrass cubic over `F_q`.
#[derive(Clone, PartialEq, Eq)]
pub struct CurveDescriptor {
    base: FqField,
    kind: CurveKind,
}

impl fmt::Debug for CurveDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {:?}", self.label(), self.base)
    }
}

/// Largest extension size enumerated exhaustively.
pub const MAX_ENUM_FIELD: u64 = 1 << 20;

impl CurveDescriptor {
    pub fn projective_line(base: &FqField) -> CurveDescriptor {
        CurveDescriptor {
            base: base.clone(),
            kind: CurveKind::ProjectiveLine,
        }
    }

    /// Rejects singular Weierstrass data.
    pub fn elliptic(base: &FqField, a: Weierstrass) -> Result<CurveDescriptor> {
        let c = CurveDescriptor {
            base: base.clone(),
            kind: CurveKind::Elliptic(a),
        };
        if c.discriminant().is_zero() {
            return Err(invalid("singular Weierstrass equation (discriminant 0)"));
        }
        Ok(c)
    }

    /// Integer coefficients mapped through [`FqField::from_int`].
    pub fn elliptic_from_ints(base: &FqField, a: [i64; 5]) -> Result<CurveDescriptor> {
        Self::elliptic(base, a.map(|x| base.from_int(x)))
    }

    pub fn base(&self) -> &FqField {
        &self.base
    }

    pub fn q(&self) -> u64 {
        self.base.size() as u64
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn is_elliptic(&self) -> bool {
        matches!(self.kind, CurveKind::Elliptic(_))
    }

    pub fn coefficients(&self) -> Option<&Weierstrass> {
        match &self.kind {
            CurveKind::Elliptic(a) => Some(a),
            CurveKind::ProjectiveLine => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            CurveKind::ProjectiveLine => "p1".into(),
            CurveKind::Elliptic(a) => format!(
                "ell:{}",
                a.iter().map(|c| c.value().to_string()).collect::<Vec<_>>().join(",")
            ),
        }
    }

    /// Human-readable Weierstrass equation.
    pub fn equation(&self) -> String {
        let CurveKind::Elliptic(a) = &self.kind else {
            return "P^1".into();
        };
        let term = |c: FqElem, m: &str| -> Option<String> {
            match c.value() {
                0 => None,
                1 if !m.is_empty() => Some(m.to_string()),
                v if m.is_empty() => Some(v.to_string()),
                v => Some(format!("{v}*{m}")),
            }
        };
        let lhs: Vec<String> = [Some("y^2".to_string()), term(a[0], "t*y"), term(a[2], "y")]
            .into_iter()
            .flatten()
            .collect();
        let rhs: Vec<String> = [Some("t^3".to_string()), term(a[1], "t^2"), term(a[3], "t"), term(a[4], "")]
            .into_iter()
            .flatten()
            .collect();
        format!("{} = {}", lhs.join(" + "), rhs.join(" + "))
    }

    /// The Weierstrass discriminant (zero for the projective line, which has
    /// no equation).
    pub fn discriminant(&self) -> FqElem {
        let k = &self.base;
        let CurveKind::Elliptic([a1, a2, a3, a4, a6]) = self.kind else {
            return k.one();
        };
        let c = |n: i64| k.integer(n);
        let m = |x: FqElem, y: FqElem| k.mul(x, y);
        let b2 = k.add(m(a1, a1), m(c(4), a2));
        let b4 = k.add(m(c(2), a4), m(a1, a3));
        let b6 = k.add(m(a3, a3), m(c(4), a6));
        let b8 = [
            m(m(a1, a1), a6),
            m(c(4), m(a2, a6)),
            k.neg(m(a1, m(a3, a4))),
            m(a2, m(a3, a3)),
            k.neg(m(a4, a4)),
        ]
        .into_iter()
        .fold(k.zero(), |s, x| k.add(s, x));
        [
            k.neg(m(m(b2, b2), b8)),
            k.neg(m(c(8), m(b4, m(b4, b4)))),
            k.neg(m(c(27), m(b6, b6))),
            m(c(9), m(b2, m(b4, b6))),
        ]
        .into_iter()
        .fold(k.zero(), |s, x| k.add(s, x))
    }

    /// The coefficient embedding into `F_{q^d}`.
    pub fn extension(&self, d: u32) -> Result<FieldExtension> {
        let size = (self.q() as u128).pow(d);
        if size > MAX_ENUM_FIELD as u128 {
            return Err(Error::BoundExceeded(format!("q^d = {}^{} exceeds 2^20", self.q(), d)));
        }
        Ok(build_extension(&self.base, d)?)
    }

    /// Coefficients moved into `k`, which must contain the base field.
    pub fn coefficients_in(&self, ext: &FieldExtension) -> Weierstrass {
        let a = self.coefficients().copied().unwrap_or([FqElem::ZERO; 5]);
        a.map(|c| ext.embedding.apply(c))
    }

    /// `(b, c)` with the equation rewritten as `y^2 + b y - c = 0` at `t`.
    pub fn y_quadratic(k: &FqField, a: &Weierstrass, t: FqElem) -> (FqElem, FqElem) {
        let [a1, a2, a3, a4, a6] = *a;
        let b = k.add(k.mul(a1, t), a3);
        let c = [k.pow(t, 3), k.mul(a2, k.mul(t, t)), k.mul(a4, t), a6]
            .into_iter()
            .fold(k.zero(), |s, x| k.add(s, x));
        (b, c)
    }

    /// `F(t, y) = y^2 + a1 t y + a3 y - t^3 - a2 t^2 - a4 t - a6`.
    pub fn eval(k: &FqField, a: &Weierstrass, t: FqElem, y: FqElem) -> FqElem {
        let (b, c) = Self::y_quadratic(k, a, t);
        k.sub(k.add(k.mul(y, y), k.mul(b, y)), c)
    }

    /// `(dF/dt, dF/dy)` at a point.
    pub fn gradient(k: &FqField, a: &Weierstrass, t: FqElem, y: FqElem) -> (FqElem, FqElem) {
        let [a1, a2, a3, a4, _] = *a;
        let ft = [
            k.mul(a1, y),
            k.neg(k.mul(k.integer(3), k.mul(t, t))),
            k.neg(k.mul(k.integer(2), k.mul(a2, t))),
            k.neg(a4),
        ]
        .into_iter()
        .fold(k.zero(), |s, x| k.add(s, x));
        let fy = [k.mul(k.integer(2), y), k.mul(a1, t), a3]
            .into_iter()
            .fold(k.zero(), |s, x| k.add(s, x));
        (ft, fy)
    }

    /// Affine points over `F_{q^d}`, sorted.
    pub fn affine_points(&self, d: u32) -> Result<(FieldExtension, Vec<(FqElem, FqElem)>)> {
        let ext = self.extension(d)?;
        let k = &ext.field;
        let a = self.coefficients_in(&ext);
        let mut pts = Vec::new();
        for t in k.elements() {
            for y in Self::y_roots(k, &a, t) {
                pts.push((t, y));
            }
        }
        Ok((ext, pts))
    }

    /// The `y` with `(t, y)` on the curve, over the field `k`.
    pub fn y_roots(k: &FqField, a: &Weierstrass, t: FqElem) -> Vec<FqElem> {
        let (b, c) = Self::y_quadratic(k, a, t);
        FqPoly::new(k, vec![k.neg(c), b, k.one()]).roots()
    }

    /// `#C(F_{q^d})`, counted exhaustively.
    pub fn count_points(&self, d: u32) -> Result<u64> {
        if d == 0 {
            return Err(invalid("extension degree must be positive"));
        }
        let CurveKind::Elliptic(_) = self.kind else {
            let size = (self.q() as u128).pow(d);
            if size > MAX_ENUM_FIELD as u128 {
                return Err(Error::BoundExceeded(format!("q^d = {}^{} exceeds 2^20", self.q(), d)));
            }
            return Ok(size as u64 + 1);
        };
        let ext = self.extension(d)?;
        let k = &ext.field;
        let a = self.coefficients_in(&ext);
        let size = k.size() as u64;
        let mut n = 1u64;
        if k.characteristic() == 2 {
            let deg = k.degree();
            let trace = |x: FqElem| {
                let mut acc = x;
                let mut cur = x;
                for _ in 1..deg {
                    cur = k.mul(cur, cur);
                    acc = k.add(acc, cur);
                }
                acc
            };
            for t in k.elements() {
                let (b, c) = Self::y_quadratic(k, &a, t);
                if b.is_zero() {
                    n += 1;
                } else if trace(k.div(c, k.mul(b, b)).unwrap()).is_zero() {
                    n += 2;
                }
            }
        } else {
            let half = (size - 1) / 2;
            let four = k.integer(4);
            for t in k.elements() {
                let (b, c) = Self::y_quadratic(k, &a, t);
                let disc = k.add(k.mul(b, b), k.mul(four, c));
                if disc.is_zero() {
                    n += 1;
                } else if k.pow(disc, half) == k.one() {
                    n += 2;
                }
            }
        }
        Ok(n)
    }

    /// Expansions `t(u), y(u)` at infinity in `u = t/y`, to absolute
    /// precision `n` in `u` for `t`.
    pub fn expansions_at_infinity(&self, n: i64) -> (TruncLaurent, TruncLaurent) {
        // s is known modulo u^m, m = n + 5 gives t to precision n
        let m = (n + 5).max(4) as usize;
        let s = TruncLaurent::from_coeffs(&self.base, 0, self.inverse_y_series(m), Some(m as i64));
        let y = s.inv().expect("s has valuation 3");
        let t = y.shift(1);
        (t, y)
    }

    /// Coefficients of `s = 1/y` in `u = t/y` modulo `u^m`, from the fixed
    /// point of `s = u^3 - a1 u s + a2 u^2 s - a3 s^2 + a4 u s^2 + a6 s^3`.
    pub fn inverse_y_series(&self, m: usize) -> Vec<FqElem> {
        let k = &self.base;
        let [a1, a2, a3, a4, a6] = self.coefficients().copied().unwrap_or([FqElem::ZERO; 5]);
        let m = m.max(4);
        let mut s = vec![FqElem::ZERO; m];
        s[3] = k.one();
        let mono = |c: FqElem, d: usize| {
            let mut v = vec![FqElem::ZERO; d + 1];
            v[d] = c;
            v
        };
        loop {
            let s2 = powser::mul(k, &s, &s, m);
            let s3 = powser::mul(k, &s2, &s, m);
            let terms = [
                mono(k.one(), 3),
                powser::mul(k, &mono(k.neg(a1), 1), &s, m),
                powser::mul(k, &mono(a2, 2), &s, m),
                s2.iter().map(|&c| k.neg(k.mul(a3, c))).collect(),
                powser::mul(k, &mono(a4, 1), &s2, m),
                s3.iter().map(|&c| k.mul(a6, c)).collect(),
            ];
            let mut next = vec![FqElem::ZERO; m];
            for t in terms {
                for (i, c) in t.into_iter().enumerate().take(m) {
                    next[i] = k.add(next[i], c);
                }
            }
            if next == s {
                break;
            }
            s = next;
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> FqField {
        FqField::with_order(q).unwrap()
    }

    #[test]
    fn singular_curves_rejected() {
        assert!(CurveDescriptor::elliptic_from_ints(&f(2), [0, 0, 0, 0, 0]).is_err());
        assert!(CurveDescriptor::elliptic_from_ints(&f(3), [0, 0, 0, 0, 0]).is_err());
        assert!(CurveDescriptor::elliptic_from_ints(&f(2), [0, 0, 1, 0, 0]).is_ok());
    }

    #[test]
    fn supersingular_f2_curve_has_three_points() {
        let c = CurveDescriptor::elliptic_from_ints(&f(2), [0, 0, 1, 0, 0]).unwrap();
        assert_eq!(c.count_points(1).unwrap(), 3);
        let (_, pts) = c.affine_points(1).unwrap();
        assert_eq!(pts.len(), 2);
        // N_2 = q^2 + 1 - (alpha^2 + beta^2) with alpha + beta = 0, alpha beta = 2
        assert_eq!(c.count_points(2).unwrap(), 9);
    }

    #[test]
    fn counts_agree_with_enumeration() {
        for (q, a) in [(3u64, [0, 0, 0, 1, 1]), (5, [0, 0, 0, 1, 1]), (4, [1, 0, 0, 0, 1]), (2, [1, 0, 0, 0, 1])] {
            let c = CurveDescriptor::elliptic_from_ints(&f(q), a).unwrap();
            for d in 1..=2 {
                let (_, pts) = c.affine_points(d).unwrap();
                assert_eq!(c.count_points(d).unwrap(), pts.len() as u64 + 1);
            }
        }
    }

    #[test]
    fn discriminant_detects_rational_singular_points() {
        // over a perfect field the singular point of a cubic is rational
        for q in [2u64, 3, 4] {
            let k = f(q);
            let n = k.size() as i64;
            for code in 0..n.pow(5) {
                let mut a = [k.zero(); 5];
                let mut r = code;
                for x in a.iter_mut() {
                    *x = k.from_int(r % n);
                    r /= n;
                }
                let singular = k.elements().any(|t| {
                    k.elements().any(|y| {
                        let (ft, fy) = CurveDescriptor::gradient(&k, &a, t, y);
                        CurveDescriptor::eval(&k, &a, t, y).is_zero() && ft.is_zero() && fy.is_zero()
                    })
                });
                assert_eq!(CurveDescriptor::elliptic(&k, a).is_err(), singular, "{a:?}");
            }
        }
    }

    #[test]
    fn projective_line_count() {
        let c = CurveDescriptor::projective_line(&f(4));
        assert_eq!(c.count_points(1).unwrap(), 5);
    }

    #[test]
    fn expansions_satisfy_the_equation() {
        let c = CurveDescriptor::elliptic_from_ints(&f(3), [1, 1, 1, 1, 1]).unwrap();
        let (t, y) = c.expansions_at_infinity(30);
        assert_eq!(t.val_units(), Some(-2));
        assert_eq!(y.val_units(), Some(-3));
        let k = c.base();
        let a = c.coefficients().unwrap();
        let cst = |x: FqElem| TruncLaurent::constant(k, x);
        let lhs = y
            .mul(&y)
            .unwrap()
            .add(&t.mul(&y).unwrap().scale(a[0]))
            .unwrap()
            .add(&y.scale(a[2]))
            .unwrap();
        let rhs = t
            .pow(3)
            .unwrap()
            .add(&t.mul(&t).unwrap().scale(a[1]))
            .unwrap()
            .add(&t.scale(a[3]))
            .unwrap()
            .add(&cst(a[4]))
            .unwrap();
        let diff = lhs.sub(&rhs).unwrap();
        assert!(diff.is_zero());
        assert!(diff.prec_units().unwrap() >= 20);
    }
}
