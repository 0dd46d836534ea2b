use std::cmp::{max, min};
use std::fmt;

use num_integer::Integer;

use super::powser;
use crate::ffield::{Embedding, FqElem, FqField, FqPoly};
use crate::rational::{rat, Rational};
use crate::{invalid, precision, Result};

/// A truncated Laurent series `sum c_k pi^{k/e} + O(pi^{N/e})` over a finite
/// field.
///
/// Exponents and the precision are stored in units of `1/e`. A precision of
/// `None` marks an exact (finite) expression.
#[derive(Clone)]
pub struct TruncLaurent {
    field: FqField,
    ram: u32,
    start: i64,
    coeffs: Vec<FqElem>,
    prec: Option<i64>,
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(min(x, y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl TruncLaurent {
    fn build(field: &FqField, ram: u32, start: i64, mut coeffs: Vec<FqElem>, prec: Option<i64>) -> Self {
        if let Some(n) = prec {
            coeffs.truncate(max(0, n - start) as usize);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        coeffs.drain(..lead);
        let start = if coeffs.is_empty() { 0 } else { start + lead as i64 };
        TruncLaurent {
            field: field.clone(),
            ram,
            start,
            coeffs,
            prec,
        }
    }

    /// `sum coeffs[i] pi^{(start+i)/e}` with absolute precision `prec/e`.
    pub fn new(field: &FqField, ram: u32, start: i64, coeffs: Vec<FqElem>, prec: Option<i64>) -> Self {
        assert!(ram >= 1);
        Self::build(field, ram, start, coeffs, prec)
    }

    /// Unramified series from coefficients starting at `pi^start`.
    pub fn from_coeffs(field: &FqField, start: i64, coeffs: Vec<FqElem>, prec: Option<i64>) -> Self {
        Self::build(field, 1, start, coeffs, prec)
    }

    pub fn zero(field: &FqField) -> Self {
        Self::build(field, 1, 0, Vec::new(), None)
    }

    /// `O(pi^{n/e})`.
    pub fn big_o(field: &FqField, ram: u32, n: i64) -> Self {
        Self::build(field, ram, 0, Vec::new(), Some(n))
    }

    pub fn one(field: &FqField) -> Self {
        Self::constant(field, field.one())
    }

    pub fn constant(field: &FqField, c: FqElem) -> Self {
        Self::build(field, 1, 0, vec![c], None)
    }

    /// `c pi^{k/e}`.
    pub fn monomial(field: &FqField, c: FqElem, k: i64, ram: u32) -> Self {
        Self::build(field, ram, k, vec![c], None)
    }

    /// The uniformizer `pi`.
    pub fn var(field: &FqField) -> Self {
        Self::monomial(field, field.one(), 1, 1)
    }

    pub fn from_poly(p: &FqPoly) -> Self {
        Self::build(p.field(), 1, 0, p.coeffs().to_vec(), None)
    }

    /// `p(1/pi)`.
    pub fn from_poly_inverse_var(p: &FqPoly) -> Self {
        let mut c = p.coeffs().to_vec();
        c.reverse();
        Self::build(p.field(), 1, -p.deg(), c, None)
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }

    pub fn ram(&self) -> u32 {
        self.ram
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// No nonzero coefficient is known.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }

    /// Valuation in units of `1/e`.
    pub fn val_units(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }

    pub fn prec_units(&self) -> Option<i64> {
        self.prec
    }

    pub fn valuation(&self) -> Option<Rational> {
        self.val_units().map(|k| rat(k, self.ram as i64))
    }

    pub fn precision(&self) -> Option<Rational> {
        self.prec.map(|n| rat(n, self.ram as i64))
    }

    /// Number of known coefficients past the leading one.
    pub fn relative_precision(&self) -> Option<i64> {
        match (self.prec, self.val_units()) {
            (Some(n), Some(w)) => Some(n - w),
            (Some(_), None) => Some(0),
            (None, _) => None,
        }
    }

    pub fn leading_coeff(&self) -> Option<FqElem> {
        self.coeffs.first().copied()
    }

    /// Coefficient of `pi^{k/e}`, or `None` beyond the precision.
    pub fn coeff(&self, k: i64) -> Option<FqElem> {
        if self.prec.is_some_and(|n| k >= n) {
            return None;
        }
        let i = k - self.start;
        if i < 0 || self.coeffs.is_empty() {
            return Some(FqElem::ZERO);
        }
        Some(self.coeffs.get(i as usize).copied().unwrap_or(FqElem::ZERO))
    }

    /// Nonzero terms as `(exponent in units of 1/e, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, FqElem)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, &c)| (self.start + i as i64, c))
    }

    /// Caps the absolute precision at `n` units.
    pub fn with_prec(&self, n: i64) -> Self {
        Self::build(&self.field, self.ram, self.start, self.coeffs.clone(), min_opt(self.prec, Some(n)))
    }

    /// Caps the precision at `n` units past the valuation.
    pub fn with_rel_prec(&self, n: i64) -> Self {
        match self.val_units() {
            Some(w) => self.with_prec(w + n),
            None => self.clone(),
        }
    }

    /// Re-expresses the series with ramification index `e`, a multiple of
    /// the current one.
    pub fn lift(&self, e: u32) -> Self {
        assert!(e.is_multiple_of(self.ram), "ramification {e} not a multiple of {}", self.ram);
        let k = (e / self.ram) as i64;
        if k == 1 {
            return self.clone();
        }
        let mut coeffs = vec![FqElem::ZERO; if self.coeffs.is_empty() { 0 } else { (self.coeffs.len() - 1) * k as usize + 1 }];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * k as usize] = c;
        }
        Self::build(&self.field, e, self.start * k, coeffs, self.prec.map(|n| n * k))
    }

    /// Drops the ramification index to the smallest one that still
    /// expresses every exponent.
    pub fn reduce_ram(&self) -> Self {
        let mut g = self.ram as i64;
        for (k, _) in self.terms() {
            g = g.gcd(&k);
        }
        if let Some(n) = self.prec {
            g = g.gcd(&n);
        }
        if g <= 1 {
            return self.clone();
        }
        let terms: Vec<(i64, FqElem)> = self.terms().collect();
        let e = self.ram / g as u32;
        let start = self.start / g;
        let mut coeffs = vec![FqElem::ZERO; self.coeffs.len() / g as usize + 1];
        for (k, c) in terms {
            coeffs[((k / g) - start) as usize] = c;
        }
        Self::build(&self.field, e, start, coeffs, self.prec.map(|n| n / g))
    }

    fn unify(&self, other: &Self) -> Result<(Self, Self)> {
        if self.field != other.field {
            return Err(invalid(format!(
                "series over different fields {:?} and {:?}",
                self.field, other.field
            )));
        }
        let e = self.ram.lcm(&other.ram);
        Ok((self.lift(e), other.lift(e)))
    }

    fn end(&self) -> i64 {
        self.start + self.coeffs.len() as i64
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.unify(other)?;
        let f = &a.field;
        let prec = min_opt(a.prec, b.prec);
        let (lo, hi) = match (a.coeffs.is_empty(), b.coeffs.is_empty()) {
            (true, true) => return Ok(Self::build(f, a.ram, 0, Vec::new(), prec)),
            (false, true) => (a.start, a.end()),
            (true, false) => (b.start, b.end()),
            (false, false) => (min(a.start, b.start), max(a.end(), b.end())),
        };
        let hi = prec.map_or(hi, |n| min(hi, n));
        let coeffs = (lo..max(lo, hi))
            .map(|k| f.add(a.coeff(k).unwrap_or_default(), b.coeff(k).unwrap_or_default()))
            .collect();
        Ok(Self::build(f, a.ram, lo, coeffs, prec))
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        Self::build(f, self.ram, self.start, self.coeffs.iter().map(|&c| f.neg(c)).collect(), self.prec)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: FqElem) -> Self {
        let f = &self.field;
        if c.is_zero() {
            return Self::build(f, self.ram, 0, Vec::new(), None);
        }
        Self::build(f, self.ram, self.start, self.coeffs.iter().map(|&a| f.mul(a, c)).collect(), self.prec)
    }

    /// Multiplication by `pi^{k/e}`.
    pub fn shift(&self, k: i64) -> Self {
        Self::build(&self.field, self.ram, self.start + k, self.coeffs.clone(), self.prec.map(|n| n + k))
    }

    /// Valuation, or the precision for a series that is zero to precision.
    fn weight(&self) -> i64 {
        self.val_units().or(self.prec).unwrap_or(i64::MAX / 4)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.unify(other)?;
        let f = &a.field;
        if a.is_exact_zero() || b.is_exact_zero() {
            return Ok(Self::build(f, a.ram, 0, Vec::new(), None));
        }
        let prec = min_opt(a.prec.map(|n| n + b.weight()), b.prec.map(|n| n + a.weight()));
        if a.coeffs.is_empty() || b.coeffs.is_empty() {
            return Ok(Self::build(f, a.ram, 0, Vec::new(), prec));
        }
        let start = a.start + b.start;
        let mut len = a.coeffs.len() + b.coeffs.len() - 1;
        if let Some(n) = prec {
            len = min(len, max(0, n - start) as usize);
        }
        Ok(Self::build(f, a.ram, start, powser::mul(f, &a.coeffs, &b.coeffs, len), prec))
    }

    pub fn inv(&self) -> Result<Self> {
        let f = &self.field;
        let Some(w) = self.val_units() else {
            return Err(precision("division by a series that is zero to its precision"));
        };
        match self.prec {
            None if self.coeffs.len() == 1 => {
                Ok(Self::build(f, self.ram, -w, vec![f.inv(self.coeffs[0]).unwrap()], None))
            }
            None => Err(precision(
                "inverse of an exact non-monomial series needs an explicit precision",
            )),
            Some(n) => {
                let rel = (n - w) as usize;
                Ok(Self::build(f, self.ram, -w, powser::inv(f, &self.coeffs, rel), Some(n - 2 * w)))
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if self.is_exact_zero() {
            other.inv()?;
            return Ok(self.clone());
        }
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let mut acc = Self::build(&self.field, self.ram, 0, vec![self.field.one()], None);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `self^Q` for `Q` a power of the characteristic, computed termwise:
    /// `(sum c_k pi^k)^Q = sum c_k^Q pi^{Qk}`.
    pub fn q_power(&self, big_q: u64) -> Self {
        let f = &self.field;
        let p = f.characteristic() as u64;
        let mut t = big_q;
        while t.is_multiple_of(p) {
            t /= p;
        }
        assert!(t == 1 && big_q > 1, "{big_q} is not a power of the characteristic");
        let k = big_q as i64;
        let mut coeffs = vec![FqElem::ZERO; if self.coeffs.is_empty() { 0 } else { (self.coeffs.len() - 1) * k as usize + 1 }];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * k as usize] = f.pow(c, big_q);
        }
        Self::build(f, self.ram, self.start * k, coeffs, self.prec.map(|n| n * k))
    }

    /// Applies `c -> c^Q` to the coefficients only.
    pub fn twist_coeffs(&self, big_q: u64) -> Self {
        let f = &self.field;
        Self::build(f, self.ram, self.start, self.coeffs.iter().map(|&c| f.pow(c, big_q)).collect(), self.prec)
    }

    /// Moves coefficients into a larger field.
    pub fn embed(&self, e: &Embedding) -> Self {
        assert_eq!(e.source(), &self.field);
        Self::build(e.target(), self.ram, self.start, self.coeffs.iter().map(|&c| e.apply(c)).collect(), self.prec)
    }

    /// Pulls coefficients back along an embedding, if they all lie in the
    /// image.
    pub fn restrict(&self, e: &Embedding) -> Option<Self> {
        assert_eq!(e.target(), &self.field);
        let coeffs = self.coeffs.iter().map(|&c| e.preimage(c)).collect::<Option<Vec<_>>>()?;
        Some(Self::build(e.source(), self.ram, self.start, coeffs, self.prec))
    }

    /// `self(g)` for an unramified outer series and an inner series of
    /// positive valuation.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if self.ram != 1 {
            return Err(invalid("outer series of a composition must be unramified"));
        }
        if self.field != g.field {
            return Err(invalid("composition of series over different fields"));
        }
        let Some(wg) = g.val_units().filter(|&w| w > 0) else {
            return Err(invalid("inner series must have positive valuation"));
        };
        let f = &self.field;
        let cst = |c: FqElem| Self::build(f, g.ram, 0, vec![c], None);
        let mut acc = Self::build(f, g.ram, 0, Vec::new(), None);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(g)?.add(&cst(c))?;
        }
        if let Some(n) = self.prec {
            acc = acc.add(&Self::big_o(f, g.ram, (n - self.start) * wg))?;
        }
        if self.start != 0 && !self.coeffs.is_empty() {
            acc = acc.mul(&g.pow(self.start)?)?;
        } else if self.coeffs.is_empty() {
            if let Some(n) = self.prec {
                return Ok(Self::big_o(f, g.ram, n * wg));
            }
        }
        Ok(acc)
    }

    /// `d/d pi` of an unramified series.
    pub fn derivative(&self) -> Self {
        assert_eq!(self.ram, 1);
        let f = &self.field;
        let p = f.characteristic() as i64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f.mul(c, f.from_prime((self.start + i as i64).rem_euclid(p) as u32)))
            .collect();
        Self::build(f, 1, self.start - 1, coeffs, self.prec.map(|n| n - 1))
    }

    /// Compositional inverse of an unramified series of valuation 1, to
    /// absolute precision at most `n`.
    pub fn reversion(&self, n: i64) -> Result<Self> {
        if self.ram != 1 || self.val_units() != Some(1) {
            return Err(invalid("reversion needs an unramified series of valuation 1"));
        }
        let m = min_opt(self.prec, Some(n)).unwrap() as usize;
        let mut a = vec![FqElem::ZERO; m.max(2)];
        for (k, c) in self.terms() {
            if (k as usize) < a.len() {
                a[k as usize] = c;
            }
        }
        let h = powser::reversion(&self.field, &a, m);
        Ok(Self::build(&self.field, 1, 0, h, Some(m as i64)))
    }

    /// Valuation (in units of `1/e`) of `self - other`, or the common
    /// precision when they agree to it; `None` if both are exact and equal.
    pub fn agreement(&self, other: &Self) -> Result<Option<i64>> {
        let d = self.sub(other)?;
        Ok(d.val_units().or(d.prec))
    }

    /// Human-readable form in the variable `var`.
    pub fn display(&self, var: &str) -> String {
        let e = self.ram as i64;
        let exp = |k: i64| -> String {
            let r = rat(k, e);
            if r.is_integer() {
                r.numer().to_string()
            } else {
                format!("({}/{})", r.numer(), r.denom())
            }
        };
        let mut parts: Vec<String> = self
            .terms()
            .map(|(k, c)| match k {
                0 => format!("{}", c.value()),
                _ if c.value() == 1 => format!("{var}^{}", exp(k)),
                _ => format!("{}*{var}^{}", c.value(), exp(k)),
            })
            .collect();
        if let Some(n) = self.prec {
            parts.push(format!("O({var}^{})", exp(n)));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Equality of the represented truncated series, whatever the
/// ramification index used to write them.
impl PartialEq for TruncLaurent {
    fn eq(&self, o: &Self) -> bool {
        match self.unify(o) {
            Ok((a, b)) => a.start == b.start && a.coeffs == b.coeffs && a.prec == b.prec,
            Err(_) => false,
        }
    }
}

impl Eq for TruncLaurent {}

impl fmt::Debug for TruncLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display("u"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> FqField {
        FqField::with_order(q).unwrap()
    }

    fn ser(k: &FqField, start: i64, c: &[i64], prec: Option<i64>) -> TruncLaurent {
        TruncLaurent::from_coeffs(k, start, c.iter().map(|&x| k.from_int(x)).collect(), prec)
    }

    #[test]
    fn geometric_series() {
        let k = f(3);
        let one_minus_u = ser(&k, 0, &[1, -1], Some(4));
        let g = one_minus_u.inv().unwrap();
        assert_eq!(g, ser(&k, 0, &[1, 1, 1, 1], Some(4)));
    }

    #[test]
    fn frobenius_doubles_exponents_over_f2() {
        let k = f(2);
        let a = ser(&k, 1, &[1, 1], None);
        assert_eq!(a.q_power(2), ser(&k, 2, &[1, 0, 1], None));
    }

    #[test]
    fn exponent_shift() {
        let k = f(5);
        let a = ser(&k, -2, &[1, 0, 1], None);
        let b = ser(&k, 2, &[1], None);
        assert_eq!(a.mul(&b).unwrap(), ser(&k, 0, &[1, 0, 1], None));
    }

    #[test]
    fn precision_propagation() {
        let k = f(3);
        // (u^-1 + O(u^2)) * (u^3 + O(u^5)) = u^2 + O(u^4)
        let a = ser(&k, -1, &[1], Some(2));
        let b = ser(&k, 3, &[1], Some(5));
        let c = a.mul(&b).unwrap();
        assert_eq!(c.prec_units(), Some(4));
        assert_eq!(c.val_units(), Some(2));
        let s = a.add(&b).unwrap();
        assert_eq!(s.prec_units(), Some(2));
    }

    #[test]
    fn ramified_monomials() {
        let k = f(4);
        let eta = TruncLaurent::monomial(&k, k.one(), 1, 3);
        let e3 = eta.pow(3).unwrap().reduce_ram();
        assert_eq!(e3, TruncLaurent::var(&k));
        let s = eta.add(&TruncLaurent::var(&k)).unwrap();
        assert_eq!(s.ram(), 3);
        assert_eq!(s.valuation(), Some(rat(1, 3)));
    }

    #[test]
    fn exact_division_by_non_monomial_is_rejected() {
        let k = f(2);
        let a = ser(&k, 0, &[1, 1], None);
        assert!(TruncLaurent::one(&k).div(&a).is_err());
        assert!(TruncLaurent::one(&k).div(&a.with_prec(10)).is_ok());
    }

    #[test]
    fn compose_with_laurent_outer() {
        let k = f(5);
        // f = u^-1 + 1, g = u + u^2 -> f(g) = 1/(u + u^2) + 1
        let outer = ser(&k, -1, &[1, 1], None);
        let g = ser(&k, 1, &[1, 1], Some(8));
        let r = outer.compose(&g).unwrap();
        let expect = g.inv().unwrap().add(&TruncLaurent::one(&k)).unwrap();
        assert_eq!(r, expect);
    }

    #[test]
    fn reversion_round_trip() {
        let k = f(3);
        let g = ser(&k, 1, &[2, 1, 0, 1, 2], None);
        let h = g.reversion(12).unwrap();
        let id = g.compose(&h).unwrap();
        assert_eq!(id, TruncLaurent::var(&k).with_prec(12));
    }

    #[test]
    fn doubling_precision_keeps_coefficients() {
        let k = f(7);
        let a = ser(&k, 0, &[3, 1, 4, 1, 5], None);
        let lo = a.with_prec(8).inv().unwrap();
        let hi = a.with_prec(16).inv().unwrap();
        assert_eq!(hi.with_prec(8), lo);
    }
}
