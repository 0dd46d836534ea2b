use crate::ffield::{FqElem, FqField};
use crate::funcfield::CurveDescriptor;
use crate::rational::Rational;
use crate::series::TruncLaurent;
use crate::{invalid, Result};

/// A power series in two variables truncated above total degree `n`;
/// `c[i][j]` is the coefficient of `u1^i u2^j`, `i + j <= n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSeries {
    field: FqField,
    n: usize,
    c: Vec<Vec<FqElem>>,
}

impl BiSeries {
    pub fn zero(field: &FqField, n: usize) -> BiSeries {
        BiSeries {
            field: field.clone(),
            n,
            c: (0..=n).map(|i| vec![FqElem::ZERO; n + 1 - i]).collect(),
        }
    }

    pub fn constant(field: &FqField, n: usize, a: FqElem) -> BiSeries {
        let mut z = Self::zero(field, n);
        z.c[0][0] = a;
        z
    }

    pub fn one(field: &FqField, n: usize) -> BiSeries {
        Self::constant(field, n, field.one())
    }

    /// `sum a_k u1^k` (`second = false`) or `sum a_k u2^k`.
    pub fn univariate(field: &FqField, n: usize, a: &[FqElem], second: bool) -> BiSeries {
        let mut z = Self::zero(field, n);
        for (k, &x) in a.iter().enumerate().take(n + 1) {
            if second {
                z.c[0][k] = x;
            } else {
                z.c[k][0] = x;
            }
        }
        z
    }

    pub fn u1(field: &FqField, n: usize) -> BiSeries {
        Self::univariate(field, n, &[FqElem::ZERO, field.one()], false)
    }

    pub fn u2(field: &FqField, n: usize) -> BiSeries {
        Self::univariate(field, n, &[FqElem::ZERO, field.one()], true)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, i: usize, j: usize) -> FqElem {
        self.c.get(i).and_then(|r| r.get(j)).copied().unwrap_or(FqElem::ZERO)
    }

    pub fn set(&mut self, i: usize, j: usize, x: FqElem) {
        self.c[i][j] = x;
    }

    /// Drops every term of total degree above `n`.
    pub fn truncate(&self, n: usize) -> BiSeries {
        let n = n.min(self.n);
        BiSeries {
            field: self.field.clone(),
            n,
            c: (0..=n).map(|i| self.c[i][..=n - i].to_vec()).collect(),
        }
    }

    fn zip(&self, o: &BiSeries, f: impl Fn(FqElem, FqElem) -> FqElem) -> BiSeries {
        let n = self.n.min(o.n);
        BiSeries {
            field: self.field.clone(),
            n,
            c: (0..=n).map(|i| (0..=n - i).map(|j| f(self.c[i][j], o.c[i][j])).collect()).collect(),
        }
    }

    pub fn add(&self, o: &BiSeries) -> BiSeries {
        self.zip(o, |a, b| self.field.add(a, b))
    }

    pub fn sub(&self, o: &BiSeries) -> BiSeries {
        self.zip(o, |a, b| self.field.sub(a, b))
    }

    pub fn scale(&self, a: FqElem) -> BiSeries {
        let k = &self.field;
        BiSeries {
            field: k.clone(),
            n: self.n,
            c: self.c.iter().map(|r| r.iter().map(|&x| k.mul(a, x)).collect()).collect(),
        }
    }

    pub fn neg(&self) -> BiSeries {
        self.scale(self.field.neg(self.field.one()))
    }

    pub fn mul(&self, o: &BiSeries) -> BiSeries {
        let k = &self.field;
        let n = self.n.min(o.n);
        let mut out = Self::zero(k, n);
        for i1 in 0..=n {
            for j1 in 0..=n - i1 {
                let a = self.c[i1][j1];
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..=n - i1 - j1 {
                    let row = &o.c[i2];
                    let dst = &mut out.c[i1 + i2];
                    for j2 in 0..=n - i1 - j1 - i2 {
                        let b = row[j2];
                        if !b.is_zero() {
                            dst[j1 + j2] = k.add(dst[j1 + j2], k.mul(a, b));
                        }
                    }
                }
            }
        }
        out
    }

    /// Inverse of a series with invertible constant term, solved degree by
    /// degree.
    pub fn inv(&self) -> Result<BiSeries> {
        let k = &self.field;
        let c0 = k.inv(self.c[0][0]).ok_or_else(|| invalid("bivariate series is not a unit"))?;
        let n = self.n;
        let mut x = Self::zero(k, n);
        x.c[0][0] = c0;
        for d in 1..=n {
            for i in 0..=d {
                let j = d - i;
                let mut acc = FqElem::ZERO;
                for a in 0..=i {
                    for b in 0..=j {
                        if a + b == 0 {
                            continue;
                        }
                        let h = self.c[a][b];
                        if !h.is_zero() {
                            acc = k.add(acc, k.mul(h, x.c[i - a][j - b]));
                        }
                    }
                }
                x.c[i][j] = k.neg(k.mul(c0, acc));
            }
        }
        Ok(x)
    }

    /// `self(x, y)` for `x, y` of positive valuation; the omitted terms of
    /// total degree above `n` are accounted for by the error term.
    pub fn eval(&self, x: &TruncLaurent, y: &TruncLaurent) -> Result<TruncLaurent> {
        let k = &self.field;
        let e = num_integer::lcm(x.ram(), y.ram());
        let (x, y) = (x.lift(e), y.lift(e));
        let floor = |s: &TruncLaurent| -> Option<i64> { s.val_units().or(s.prec_units()) };
        let m = match (floor(&x), floor(&y)) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => return Ok(TruncLaurent::constant(k, self.c[0][0])),
        };
        if m <= 0 {
            return Err(invalid("formal series evaluated outside the open unit disc"));
        }
        let bound = (self.n as i64 + 1) * m;
        let mut ypow = vec![TruncLaurent::one(k)];
        for j in 1..=self.n {
            let next = ypow[j - 1].mul(&y)?.with_prec(bound);
            ypow.push(next);
        }
        let err = TruncLaurent::big_o(k, e, bound);
        let mut acc = err.clone();
        for i in (0..=self.n).rev() {
            let mut row = err.clone();
            for (j, &c) in self.c[i].iter().enumerate() {
                if !c.is_zero() {
                    row = row.add(&ypow[j].scale(c))?;
                }
            }
            acc = acc.mul(&x)?.with_prec(bound).add(&row)?;
        }
        Ok(acc)
    }
}

/// Expansions at infinity and the formal group law in the parameter
/// `u = t/y`.
#[derive(Clone, Debug)]
pub struct FormalGroupData {
    pub curve: CurveDescriptor,
    pub n: usize,
    /// `t(u)`, leading term `u^{-2}`.
    pub t: TruncLaurent,
    /// `y(u)`, leading term `u^{-3}`.
    pub y: TruncLaurent,
    /// `s = 1/y` modulo `u^{n+2}`.
    pub s: Vec<FqElem>,
    pub law: BiSeries,
    /// `iota(u)`, the parameter of the negative.
    pub inverse: TruncLaurent,
}

impl FormalGroupData {
    pub fn add(&self, a: &TruncLaurent, b: &TruncLaurent) -> Result<TruncLaurent> {
        self.law.eval(a, b)
    }

    pub fn negate(&self, a: &TruncLaurent) -> Result<TruncLaurent> {
        if a.val_units().is_none() {
            return Ok(a.clone());
        }
        self.inverse.compose(a)
    }

    /// `y^2 + a1 t y + a3 y - (t^3 + a2 t^2 + a4 t + a6)` at `(t(u), y(u))`.
    pub fn substitution_residual(&self) -> Result<TruncLaurent> {
        weierstrass_residual(&self.curve, &self.t, &self.y)
    }

    /// Valuation-free precision of the law, in `u`.
    pub fn precision(&self) -> Rational {
        Rational::from(self.n as i64 + 1)
    }
}

pub(crate) fn weierstrass_residual(curve: &CurveDescriptor, t: &TruncLaurent, y: &TruncLaurent) -> Result<TruncLaurent> {
    let k = curve.base();
    let [a1, a2, a3, a4, a6] = curve.coefficients().copied().unwrap_or([FqElem::ZERO; 5]);
    let c = |x: FqElem| TruncLaurent::constant(k, x);
    let lhs = y.mul(y)?.add(&t.mul(y)?.scale(a1))?.add(&y.scale(a3))?;
    let t2 = t.mul(t)?;
    let rhs = t2.mul(t)?.add(&t2.scale(a2))?.add(&t.scale(a4))?.add(&c(a6))?;
    lhs.sub(&rhs)
}

/// `t(u)`, `y(u)`, and the group law to total degree `n`, from the line
/// `s = lambda u + nu` through two generic points of the formal group.
pub fn formal_expansions(curve: &CurveDescriptor, n: usize) -> Result<FormalGroupData> {
    if n < 5 {
        return Err(invalid("formal group needs total degree at least 5"));
    }
    let Some(&[a1, a2, a3, a4, a6]) = curve.coefficients() else {
        return Err(invalid("formal group requested for a curve that is not elliptic"));
    };
    let k = curve.base();
    let s = curve.inverse_y_series(n + 2);
    let (t, y) = curve.expansions_at_infinity(n as i64);

    // (s(u2) - s(u1)) / (u2 - u1) = sum_m s_m sum_{i+j=m-1} u1^i u2^j
    let mut lambda = BiSeries::zero(k, n);
    for i in 0..=n {
        for j in 0..=n - i {
            lambda.set(i, j, s[i + j + 1]);
        }
    }
    let u1 = BiSeries::u1(k, n);
    let u2 = BiSeries::u2(k, n);
    let s1 = BiSeries::univariate(k, n, &s, false);
    let nu = s1.sub(&lambda.mul(&u1));
    let l2 = lambda.mul(&lambda);
    let l3 = l2.mul(&lambda);
    let cst = |x: FqElem| BiSeries::constant(k, n, x);
    let a = BiSeries::one(k, n).add(&lambda.scale(a2)).add(&l2.scale(a4)).add(&l3.scale(a6));
    let b = nu
        .mul(&cst(a2).add(&lambda.scale(k.mul(k.integer(2), a4))).add(&l2.scale(k.mul(k.integer(3), a6))))
        .sub(&lambda.scale(a1))
        .sub(&l2.scale(a3));
    let u3 = u1.add(&u2).add(&b.mul(&a.inv()?)).neg();
    let s3 = lambda.mul(&u3).add(&nu);
    let den = BiSeries::one(k, n).add(&u3.scale(a1)).add(&s3.scale(a3));
    let law = u3.mul(&den.inv()?).neg();

    let u = TruncLaurent::var(k).with_prec(n as i64 + 1);
    let s_u = TruncLaurent::from_coeffs(k, 0, s.clone(), Some(n as i64 + 2));
    let den = TruncLaurent::one(k).add(&u.scale(a1))?.add(&s_u.scale(a3))?;
    let inverse = u.neg().div(&den)?;
    Ok(FormalGroupData {
        curve: curve.clone(),
        n,
        t,
        y,
        s,
        law,
        inverse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curve(q: u64, a: [i64; 5]) -> CurveDescriptor {
        CurveDescriptor::elliptic_from_ints(&FqField::with_order(q).unwrap(), a).unwrap()
    }

    fn curves() -> Vec<CurveDescriptor> {
        vec![
            curve(2, [0, 0, 1, 0, 0]),
            curve(2, [1, 0, 0, 0, 1]),
            curve(3, [0, 0, 0, 2, 1]),
            curve(3, [1, 1, 1, 1, 1]),
            curve(4, [0, 0, 1, 0, 0]),
            curve(5, [0, 0, 0, 1, 1]),
        ]
    }

    #[test]
    fn expansions_satisfy_the_curve() {
        let c = curve(2, [0, 0, 1, 0, 0]);
        let fg = formal_expansions(&c, 24).unwrap();
        assert_eq!(fg.t.val_units(), Some(-2));
        assert_eq!(fg.y.val_units(), Some(-3));
        assert_eq!(fg.t.leading_coeff(), Some(c.base().one()));
        // t = u^{-2} (1 + O(u^3))
        assert_eq!(fg.t.coeff(-1), Some(FqElem::ZERO));
        assert_eq!(fg.t.coeff(0), Some(FqElem::ZERO));
        let r = fg.substitution_residual().unwrap();
        assert!(r.is_zero());
        assert!(r.prec_units().unwrap() >= 16);
    }

    #[test]
    fn law_is_linear_to_first_order_and_inverse_leading_term() {
        for c in curves() {
            let k = c.base().clone();
            let fg = formal_expansions(&c, 8).unwrap();
            assert_eq!(fg.law.coeff(1, 0), k.one());
            assert_eq!(fg.law.coeff(0, 1), k.one());
            assert_eq!(fg.law.coeff(0, 0), FqElem::ZERO);
            assert_eq!(fg.inverse.val_units(), Some(1));
            assert_eq!(fg.inverse.leading_coeff(), Some(k.neg(k.one())));
        }
        let k2 = FqField::with_order(2).unwrap();
        let fg = formal_expansions(&curve(2, [0, 0, 1, 0, 0]), 8).unwrap();
        assert_eq!(fg.inverse.leading_coeff(), Some(k2.one()));
        assert!(formal_expansions(&curve(2, [0, 0, 1, 0, 0]), 4).is_err());
    }

    #[test]
    fn bivariate_inverse() {
        let k = FqField::with_order(3).unwrap();
        let mut a = BiSeries::one(&k, 10);
        a.set(1, 0, k.one());
        a.set(1, 2, k.integer(2));
        a.set(0, 3, k.one());
        let p = a.mul(&a.inv().unwrap());
        assert_eq!(p, BiSeries::one(&k, 10));
    }

    #[test]
    fn higher_degree_law_restricts_to_lower() {
        for c in curves() {
            let lo = formal_expansions(&c, 16).unwrap().law;
            let hi = formal_expansions(&c, 32).unwrap().law;
            assert_eq!(hi.truncate(16), lo);
        }
    }

    fn series_from(k: &FqField, raw: &[u32], n: usize) -> TruncLaurent {
        let coeffs = raw.iter().map(|&c| FqElem(c % k.size())).collect();
        TruncLaurent::from_coeffs(k, 1, coeffs, Some(n as i64 + 1))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn formal_group_axioms(
            which in 0usize..6,
            ni in 0usize..3,
            ra in prop::collection::vec(0u32..64, 1..12),
            rb in prop::collection::vec(0u32..64, 1..12),
            rc in prop::collection::vec(0u32..64, 1..12),
        ) {
            let n = [16usize, 32, 64][ni];
            let c = &curves()[which];
            let k = c.base().clone();
            let fg = formal_expansions(c, n).unwrap();
            let law = &fg.law;
            for i in 0..=n {
                // identity and commutativity, coefficientwise
                prop_assert_eq!(law.coeff(i, 0), if i == 1 { k.one() } else { FqElem::ZERO });
                for j in 0..=n - i {
                    prop_assert_eq!(law.coeff(i, j), law.coeff(j, i));
                }
            }
            let (a, b, cc) = (series_from(&k, &ra, n), series_from(&k, &rb, n), series_from(&k, &rc, n));
            let left = fg.add(&fg.add(&a, &b).unwrap(), &cc).unwrap();
            let right = fg.add(&a, &fg.add(&b, &cc).unwrap()).unwrap();
            let d = left.sub(&right).unwrap();
            prop_assert!(d.is_zero());
            prop_assert!(d.prec_units().unwrap() > n as i64);
            let z = fg.add(&a, &fg.negate(&a).unwrap()).unwrap();
            prop_assert!(z.is_zero());
            prop_assert!(z.prec_units().unwrap() > n as i64);
        }
    }
}
