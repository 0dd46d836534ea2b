use std::fmt;

use crate::ffield::{FqElem, FqField, FqPoly};
use crate::funcfield::{CurveDescriptor, FieldElement};
use crate::series::TruncLaurent;

/// A commutative coefficient ring carrying the `q`-Frobenius `b -> b^q`.
pub trait CoeffRing: Clone + PartialEq + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Image of a constant of the base field `F_q`.
    fn from_base(&self, c: FqElem) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn frobenius(&self, a: &Self::Elem) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

/// A finite field `F_{q^m}` containing the base field `F_q`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteCoeffs {
    field: FqField,
    base: FqField,
    q: u64,
    embed: crate::ffield::Embedding,
}

impl FiniteCoeffs {
    pub fn new(base: &FqField, field: &FqField) -> crate::Result<FiniteCoeffs> {
        let embed = crate::ffield::Embedding::new(base, field)?;
        Ok(FiniteCoeffs {
            field: field.clone(),
            base: base.clone(),
            q: base.size() as u64,
            embed,
        })
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }

    pub fn base(&self) -> &FqField {
        &self.base
    }
}

impl CoeffRing for FiniteCoeffs {
    type Elem = FqElem;

    fn zero(&self) -> FqElem {
        FqElem::ZERO
    }
    fn one(&self) -> FqElem {
        self.field.one()
    }
    fn from_base(&self, c: FqElem) -> FqElem {
        self.embed.apply(c)
    }
    fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.field.add(*a, *b)
    }
    fn neg(&self, a: &FqElem) -> FqElem {
        self.field.neg(*a)
    }
    fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.field.mul(*a, *b)
    }
    fn is_zero(&self, a: &FqElem) -> bool {
        a.is_zero()
    }
    fn frobenius(&self, a: &FqElem) -> FqElem {
        self.field.pow(*a, self.q)
    }
}

/// The rational function field `F_q(theta)`, realised on the projective
/// line with `t` playing `theta`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalCoeffs {
    line: CurveDescriptor,
}

impl RationalCoeffs {
    pub fn new(base: &FqField) -> RationalCoeffs {
        RationalCoeffs {
            line: CurveDescriptor::projective_line(base),
        }
    }

    pub fn theta(&self) -> FieldElement {
        FieldElement::t(&self.line)
    }

    /// `theta^k` for `k >= 0`.
    pub fn theta_pow(&self, k: usize) -> FieldElement {
        let k_field = self.line.base();
        FieldElement::from_poly(&self.line, FqPoly::monomial(k_field, k_field.one(), k))
    }

    pub fn from_poly(&self, p: FqPoly) -> FieldElement {
        FieldElement::from_poly(&self.line, p)
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> crate::Result<FieldElement> {
        a.div(b)
    }

    pub fn q(&self) -> u64 {
        self.line.q()
    }
}

/// `p(x^q)`, which equals `p(x)^q` when the coefficients lie in `F_q`.
fn spread(p: &FqPoly, q: usize) -> FqPoly {
    let k = p.field();
    let mut c = vec![FqElem::ZERO; p.coeffs().len().saturating_sub(1) * q + 1];
    for (i, &a) in p.coeffs().iter().enumerate() {
        c[i * q] = a;
    }
    FqPoly::new(k, c)
}

impl CoeffRing for RationalCoeffs {
    type Elem = FieldElement;

    fn zero(&self) -> FieldElement {
        FieldElement::zero(&self.line)
    }
    fn one(&self) -> FieldElement {
        FieldElement::one(&self.line)
    }
    fn from_base(&self, c: FqElem) -> FieldElement {
        FieldElement::constant(&self.line, c)
    }
    fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        a.add(b).expect("same function field")
    }
    fn neg(&self, a: &FieldElement) -> FieldElement {
        a.neg()
    }
    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        a.mul(b).expect("same function field")
    }
    fn is_zero(&self, a: &FieldElement) -> bool {
        a.is_zero()
    }
    fn frobenius(&self, a: &FieldElement) -> FieldElement {
        let (num, _, den) = a.parts();
        let q = self.line.q() as usize;
        FieldElement::ratio(&self.line, spread(num, q), spread(den, q)).expect("nonzero denominator")
    }
}

/// Truncated Laurent series over a finite field containing `F_q`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentCoeffs {
    field: FqField,
    q: u64,
    embed: crate::ffield::Embedding,
}

impl LaurentCoeffs {
    pub fn new(base: &FqField, field: &FqField) -> crate::Result<LaurentCoeffs> {
        Ok(LaurentCoeffs {
            field: field.clone(),
            q: base.size() as u64,
            embed: crate::ffield::Embedding::new(base, field)?,
        })
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }
}

impl CoeffRing for LaurentCoeffs {
    type Elem = TruncLaurent;

    fn zero(&self) -> TruncLaurent {
        TruncLaurent::zero(&self.field)
    }
    fn one(&self) -> TruncLaurent {
        TruncLaurent::one(&self.field)
    }
    fn from_base(&self, c: FqElem) -> TruncLaurent {
        TruncLaurent::constant(&self.field, self.embed.apply(c))
    }
    fn add(&self, a: &TruncLaurent, b: &TruncLaurent) -> TruncLaurent {
        a.add(b).expect("same coefficient field")
    }
    fn neg(&self, a: &TruncLaurent) -> TruncLaurent {
        a.neg()
    }
    fn mul(&self, a: &TruncLaurent, b: &TruncLaurent) -> TruncLaurent {
        a.mul(b).expect("same coefficient field")
    }
    fn is_zero(&self, a: &TruncLaurent) -> bool {
        a.is_exact_zero()
    }
    fn frobenius(&self, a: &TruncLaurent) -> TruncLaurent {
        a.q_power(self.q)
    }
}

/// `sum b_i tau^i` in the twisted polynomial ring with `tau b = b^q tau`.
#[derive(Clone, PartialEq)]
pub struct TwistedPoly<R: CoeffRing> {
    ring: R,
    coeffs: Vec<R::Elem>,
}

impl<R: CoeffRing> fmt::Debug for TwistedPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl<R: CoeffRing> TwistedPoly<R> {
    pub fn new(ring: &R, mut coeffs: Vec<R::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| ring.is_zero(c)) {
            coeffs.pop();
        }
        TwistedPoly {
            ring: ring.clone(),
            coeffs,
        }
    }

    pub fn zero(ring: &R) -> Self {
        Self::new(ring, Vec::new())
    }

    pub fn one(ring: &R) -> Self {
        Self::constant(ring, ring.one())
    }

    pub fn constant(ring: &R, c: R::Elem) -> Self {
        Self::new(ring, vec![c])
    }

    pub fn tau(ring: &R) -> Self {
        Self::new(ring, vec![ring.zero(), ring.one()])
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> R::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// `deg_tau`, or `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n).map(|i| self.ring.add(&self.coeff(i), &o.coeff(i))).collect();
        Self::new(&self.ring, c)
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.ring, self.coeffs.iter().map(|c| self.ring.neg(c)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Left multiplication by a scalar.
    pub fn scale(&self, c: &R::Elem) -> Self {
        Self::new(&self.ring, self.coeffs.iter().map(|b| self.ring.mul(c, b)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        twisted_mul(self, o)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.ring);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Drops every term of `tau`-degree above `n`.
    pub fn truncate(&self, n: usize) -> Self {
        Self::new(&self.ring, self.coeffs.iter().take(n + 1).cloned().collect())
    }

    /// The additive polynomial `sum b_i x^{q^i}` evaluated at `x`.
    pub fn apply(&self, x: &R::Elem) -> R::Elem {
        let r = &self.ring;
        let mut acc = r.zero();
        let mut xi = x.clone();
        for (i, b) in self.coeffs.iter().enumerate() {
            if i > 0 {
                xi = r.frobenius(&xi);
            }
            acc = r.add(&acc, &r.mul(b, &xi));
        }
        acc
    }
}

/// Product in `K{tau}`: `(a_i tau^i)(b_j tau^j) = a_i b_j^{q^i} tau^{i+j}`.
pub fn twisted_mul<R: CoeffRing>(a: &TwistedPoly<R>, b: &TwistedPoly<R>) -> TwistedPoly<R> {
    assert_eq!(a.ring, b.ring, "twisted polynomials over different rings");
    let r = &a.ring;
    if a.is_zero() || b.is_zero() {
        return TwistedPoly::zero(r);
    }
    let mut out = vec![r.zero(); a.coeffs.len() + b.coeffs.len() - 1];
    let mut twisted: Vec<R::Elem> = b.coeffs.clone();
    for (i, ai) in a.coeffs.iter().enumerate() {
        if i > 0 {
            twisted = twisted.iter().map(|c| r.frobenius(c)).collect();
        }
        if r.is_zero(ai) {
            continue;
        }
        for (j, bj) in twisted.iter().enumerate() {
            out[i + j] = r.add(&out[i + j], &r.mul(ai, bj));
        }
    }
    TwistedPoly::new(r, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn carlitz_square() {
        let k = FqField::with_order(3).unwrap();
        let r = RationalCoeffs::new(&k);
        let th = r.theta();
        let phi = TwistedPoly::new(&r, vec![th.clone(), r.one()]);
        let sq = phi.mul(&phi);
        let th_q = r.frobenius(&th);
        assert_eq!(sq.coeffs(), &[th.mul(&th).unwrap(), th.add(&th_q).unwrap(), r.one()]);
    }

    #[test]
    fn tau_commutes_past_scalars_with_frobenius() {
        let k = FqField::with_order(4).unwrap();
        let r = RationalCoeffs::new(&k);
        let th = TwistedPoly::constant(&r, r.theta());
        let lhs = TwistedPoly::tau(&r).mul(&th);
        assert_eq!(lhs.coeffs(), &[r.zero(), r.theta_pow(4)]);
        let one = TwistedPoly::one(&r);
        assert_eq!(one.mul(&th), th);
        assert_eq!(th.mul(&one), th);
    }

    #[test]
    fn finite_frobenius_fixes_base() {
        let base = FqField::with_order(4).unwrap();
        let big = FqField::with_order(64).unwrap();
        let r = FiniteCoeffs::new(&base, &big).unwrap();
        for c in base.elements() {
            let x = r.from_base(c);
            assert_eq!(r.frobenius(&x), x);
        }
    }

    #[test]
    fn apply_is_composition() {
        let base = FqField::with_order(2).unwrap();
        let big = FqField::with_order(16).unwrap();
        let r = FiniteCoeffs::new(&base, &big).unwrap();
        let a = TwistedPoly::new(&r, vec![big.from_int(3), big.from_int(7)]);
        let b = TwistedPoly::new(&r, vec![big.from_int(5), big.from_int(1), big.from_int(9)]);
        for x in big.elements() {
            assert_eq!(a.mul(&b).apply(&x), a.apply(&b.apply(&x)));
        }
    }
}
