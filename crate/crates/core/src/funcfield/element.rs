use std::fmt;

use rand::Rng;

use super::{CurveDescriptor, CurveKind};
use crate::ffield::{FqElem, FqPoly};
use crate::{Error, Result};

/// An element `(c0(t) + c1(t) y) / d(t)` of the function field. On the
/// projective line `c1` is always zero.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    curve: CurveDescriptor,
    c0: FqPoly,
    c1: FqPoly,
    den: FqPoly,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

impl FieldElement {
    /// Reduces to lowest terms with a monic denominator.
    pub fn new(curve: &CurveDescriptor, c0: FqPoly, c1: FqPoly, den: FqPoly) -> Result<FieldElement> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let c1 = if curve.is_elliptic() { c1 } else { FqPoly::zero(curve.base()) };
        let g = c0.gcd(&c1).gcd(&den);
        let (mut c0, mut c1, mut den) = (
            c0.div_exact(&g).unwrap(),
            c1.div_exact(&g).unwrap(),
            den.div_exact(&g).unwrap(),
        );
        if c0.is_zero() && c1.is_zero() {
            den = FqPoly::one(curve.base());
        }
        let lead = curve.base().inv(den.lead()).unwrap();
        c0 = c0.scale(lead);
        c1 = c1.scale(lead);
        den = den.scale(lead);
        Ok(FieldElement {
            curve: curve.clone(),
            c0,
            c1,
            den,
        })
    }

    pub fn from_poly(curve: &CurveDescriptor, p: FqPoly) -> FieldElement {
        let one = FqPoly::one(curve.base());
        Self::new(curve, p, FqPoly::zero(curve.base()), one).unwrap()
    }

    pub fn ratio(curve: &CurveDescriptor, num: FqPoly, den: FqPoly) -> Result<FieldElement> {
        Self::new(curve, num, FqPoly::zero(curve.base()), den)
    }

    pub fn constant(curve: &CurveDescriptor, c: FqElem) -> FieldElement {
        Self::from_poly(curve, FqPoly::constant(curve.base(), c))
    }

    pub fn zero(curve: &CurveDescriptor) -> FieldElement {
        Self::from_poly(curve, FqPoly::zero(curve.base()))
    }

    pub fn one(curve: &CurveDescriptor) -> FieldElement {
        Self::constant(curve, curve.base().one())
    }

    pub fn t(curve: &CurveDescriptor) -> FieldElement {
        Self::from_poly(curve, FqPoly::x(curve.base()))
    }

    /// The coordinate `y`; only on an elliptic curve.
    pub fn y(curve: &CurveDescriptor) -> Result<FieldElement> {
        if !curve.is_elliptic() {
            return Err(Error::InvalidInput("y is only defined on an elliptic curve".into()));
        }
        let k = curve.base();
        Self::new(curve, FqPoly::zero(k), FqPoly::one(k), FqPoly::one(k))
    }

    pub fn curve(&self) -> &CurveDescriptor {
        &self.curve
    }

    pub fn parts(&self) -> (&FqPoly, &FqPoly, &FqPoly) {
        (&self.c0, &self.c1, &self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }

    fn same_curve(&self, o: &FieldElement) -> Result<()> {
        if self.curve != o.curve {
            return Err(Error::InvalidInput("elements of different function fields".into()));
        }
        Ok(())
    }

    /// `y^2 = g(t) - h(t) y` with `h = a1 t + a3`, `g = t^3 + a2 t^2 + a4 t + a6`.
    fn hg(&self) -> (FqPoly, FqPoly) {
        let k = self.curve.base();
        match self.curve.kind() {
            CurveKind::Elliptic([a1, a2, a3, a4, a6]) => (
                FqPoly::new(k, vec![*a3, *a1]),
                FqPoly::new(k, vec![*a6, *a4, *a2, k.one()]),
            ),
            CurveKind::ProjectiveLine => (FqPoly::zero(k), FqPoly::zero(k)),
        }
    }

    pub fn add(&self, o: &FieldElement) -> Result<FieldElement> {
        self.same_curve(o)?;
        let c0 = self.c0.mul(&o.den).add(&o.c0.mul(&self.den));
        let c1 = self.c1.mul(&o.den).add(&o.c1.mul(&self.den));
        Self::new(&self.curve, c0, c1, self.den.mul(&o.den))
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            curve: self.curve.clone(),
            c0: self.c0.neg(),
            c1: self.c1.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &FieldElement) -> Result<FieldElement> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &FieldElement) -> Result<FieldElement> {
        self.same_curve(o)?;
        let (h, g) = self.hg();
        let yy = self.c1.mul(&o.c1);
        let c0 = self.c0.mul(&o.c0).add(&yy.mul(&g));
        let c1 = self.c0.mul(&o.c1).add(&self.c1.mul(&o.c0)).sub(&yy.mul(&h));
        Self::new(&self.curve, c0, c1, self.den.mul(&o.den))
    }

    /// `c0^2 - c0 c1 h - c1^2 g`, the norm of the numerator down to `F_q[t]`.
    pub fn numerator_norm(&self) -> FqPoly {
        let (h, g) = self.hg();
        self.c0
            .mul(&self.c0)
            .sub(&self.c0.mul(&self.c1).mul(&h))
            .sub(&self.c1.mul(&self.c1).mul(&g))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        let (h, _) = self.hg();
        let n = self.numerator_norm();
        let c0 = self.den.mul(&self.c0.sub(&self.c1.mul(&h)));
        let c1 = self.den.mul(&self.c1).neg();
        Self::new(&self.curve, c0, c1, n)
    }

    pub fn div(&self, o: &FieldElement) -> Result<FieldElement> {
        self.mul(&o.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<FieldElement> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one(&self.curve);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    /// A polynomial in `y` with coefficients in `F_q`, evaluated in the field.
    pub fn poly_in_y(curve: &CurveDescriptor, p: &FqPoly) -> Result<FieldElement> {
        let y = Self::y(curve)?;
        let mut acc = Self::zero(curve);
        for &c in p.coeffs().iter().rev() {
            acc = acc.mul(&y)?.add(&Self::constant(curve, c))?;
        }
        Ok(acc)
    }

    /// A random nonzero element with polynomial parts of degree `<= max_deg`.
    pub fn random<R: Rng>(curve: &CurveDescriptor, rng: &mut R, max_deg: usize) -> FieldElement {
        let k = curve.base();
        let poly = |rng: &mut R| {
            let d = rng.gen_range(0..=max_deg);
            FqPoly::new(k, (0..=d).map(|_| k.from_int(rng.gen_range(0..k.size() as i64))).collect())
        };
        loop {
            let c0 = poly(rng);
            let c1 = if curve.is_elliptic() && rng.gen_bool(0.5) { poly(rng) } else { FqPoly::zero(k) };
            let den = poly(rng);
            if den.is_zero() {
                continue;
            }
            let e = Self::new(curve, c0, c1, den).unwrap();
            if !e.is_zero() {
                return e;
            }
        }
    }

    pub fn display(&self) -> String {
        let num = match (self.c0.is_zero(), self.c1.is_zero()) {
            (_, true) => self.c0.display("t"),
            (true, false) => format!("({})*y", self.c1.display("t")),
            (false, false) => format!("{} + ({})*y", self.c0.display("t"), self.c1.display("t")),
        };
        if self.den.is_one() {
            num
        } else {
            format!("({num})/({})", self.den.display("t"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FqField;

    #[test]
    fn inverse_on_the_curve() {
        let k = FqField::with_order(3).unwrap();
        let c = CurveDescriptor::elliptic_from_ints(&k, [1, 1, 1, 1, 1]).unwrap();
        let y = FieldElement::y(&c).unwrap();
        let t = FieldElement::t(&c);
        let f = t.add(&y).unwrap().add(&FieldElement::one(&c)).unwrap();
        let g = f.inv().unwrap();
        assert_eq!(f.mul(&g).unwrap(), FieldElement::one(&c));
    }

    #[test]
    fn y_squared_reduces() {
        let k = FqField::with_order(2).unwrap();
        let c = CurveDescriptor::elliptic_from_ints(&k, [0, 0, 1, 0, 0]).unwrap();
        let y = FieldElement::y(&c).unwrap();
        // y^2 = t^3 - y = t^3 + y
        let expect = FieldElement::t(&c).pow(3).unwrap().add(&y).unwrap();
        assert_eq!(y.mul(&y).unwrap(), expect);
    }
}
