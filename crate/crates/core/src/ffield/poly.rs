use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FieldError, FqElem, FqField};

/// Largest degree [`FqPoly::factor`] accepts.
pub const MAX_FACTOR_DEGREE: usize = 64;

/// A univariate polynomial over a finite field. Coefficients are stored from
/// the constant term upward with no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct FqPoly {
    field: FqField,
    coeffs: Vec<FqElem>,
}

impl fmt::Debug for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display("t"))
    }
}

impl std::hash::Hash for FqPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

/// A factorization `lead * prod f_i^{e_i}` into monic irreducibles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub lead: FqElem,
    pub factors: Vec<(FqPoly, u32)>,
}

impl Factorization {
    pub fn expand(&self, field: &FqField) -> FqPoly {
        let mut acc = FqPoly::constant(field, self.lead);
        for (f, e) in &self.factors {
            for _ in 0..*e {
                acc = acc.mul(f);
            }
        }
        acc
    }
}

impl FqPoly {
    pub fn new(field: &FqField, mut coeffs: Vec<FqElem>) -> FqPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        FqPoly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_ints(field: &FqField, coeffs: &[i64]) -> FqPoly {
        FqPoly::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero(field: &FqField) -> FqPoly {
        FqPoly::new(field, Vec::new())
    }

    pub fn one(field: &FqField) -> FqPoly {
        FqPoly::constant(field, field.one())
    }

    pub fn constant(field: &FqField, c: FqElem) -> FqPoly {
        FqPoly::new(field, vec![c])
    }

    /// The variable.
    pub fn x(field: &FqField) -> FqPoly {
        FqPoly::monomial(field, field.one(), 1)
    }

    pub fn monomial(field: &FqField, c: FqElem, k: usize) -> FqPoly {
        let mut coeffs = vec![FqElem::ZERO; k + 1];
        coeffs[k] = c;
        FqPoly::new(field, coeffs)
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FqElem {
        self.coeffs.get(i).copied().unwrap_or(FqElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [FqElem::ONE]
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `deg 0 = -1`, convenient for valuation arithmetic.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn lead(&self) -> FqElem {
        self.coeffs.last().copied().unwrap_or(FqElem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == FqElem::ONE
    }

    pub fn add(&self, other: &FqPoly) -> FqPoly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| f.add(self.coeff(i), other.coeff(i)))
            .collect();
        FqPoly::new(f, coeffs)
    }

    pub fn neg(&self) -> FqPoly {
        let f = &self.field;
        FqPoly::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn sub(&self, other: &FqPoly) -> FqPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: FqElem) -> FqPoly {
        let f = &self.field;
        FqPoly::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &FqPoly) -> FqPoly {
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return FqPoly::zero(f);
        }
        let mut out = vec![FqElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        FqPoly::new(f, out)
    }

    pub fn pow(&self, e: u32) -> FqPoly {
        let mut acc = FqPoly::one(&self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn shift(&self, k: usize) -> FqPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![FqElem::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        FqPoly::new(&self.field, coeffs)
    }

    /// Euclidean division; `None` when dividing by zero.
    pub fn divrem(&self, d: &FqPoly) -> Option<(FqPoly, FqPoly)> {
        let f = &self.field;
        let dd = d.degree()?;
        let inv_lead = f.inv(d.lead())?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Some((FqPoly::zero(f), self.clone()));
        }
        let mut q = vec![FqElem::ZERO; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = f.mul(r[k + dd], inv_lead);
            q[k] = c;
            if c.is_zero() {
                continue;
            }
            for (j, &b) in d.coeffs.iter().enumerate() {
                r[k + j] = f.sub(r[k + j], f.mul(c, b));
            }
        }
        r.truncate(dd);
        Some((FqPoly::new(f, q), FqPoly::new(f, r)))
    }

    pub fn rem(&self, d: &FqPoly) -> FqPoly {
        self.divrem(d).expect("division by zero polynomial").1
    }

    /// Exact quotient; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &FqPoly) -> Option<FqPoly> {
        let (q, r) = self.divrem(d)?;
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> FqPoly {
        match self.field.inv(self.lead()) {
            Some(inv) => self.scale(inv),
            None => self.clone(),
        }
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &FqPoly) -> FqPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn xgcd(&self, other: &FqPoly) -> (FqPoly, FqPoly, FqPoly) {
        let f = &self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (FqPoly::one(f), FqPoly::zero(f));
        let (mut t0, mut t1) = (FqPoly::zero(f), FqPoly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).unwrap();
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        match f.inv(r0.lead()) {
            Some(inv) => (r0.scale(inv), s0.scale(inv), t0.scale(inv)),
            None => (r0, s0, t0),
        }
    }

    pub fn derivative(&self) -> FqPoly {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.from_prime((i as u32) % f.characteristic())))
            .collect();
        FqPoly::new(f, coeffs)
    }

    pub fn eval(&self, x: FqElem) -> FqElem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(FqElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// `self(g)`.
    pub fn compose(&self, g: &FqPoly) -> FqPoly {
        let f = &self.field;
        self.coeffs.iter().rev().fold(FqPoly::zero(f), |acc, &c| {
            acc.mul(g).add(&FqPoly::constant(f, c))
        })
    }

    /// Moves every coefficient through a field map (an embedding, or a
    /// Frobenius twist).
    pub fn map_coeffs(&self, target: &FqField, map: impl Fn(FqElem) -> FqElem) -> FqPoly {
        FqPoly::new(target, self.coeffs.iter().map(|&c| map(c)).collect())
    }

    pub fn mulmod(&self, other: &FqPoly, m: &FqPoly) -> FqPoly {
        self.mul(other).rem(m)
    }

    pub fn powmod(&self, mut e: u64, m: &FqPoly) -> FqPoly {
        let mut base = self.rem(m);
        let mut acc = FqPoly::one(&self.field).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mulmod(&base, m);
            }
            base = base.mulmod(&base, m);
            e >>= 1;
        }
        acc
    }

    /// `x^{Q^k} mod m` where `Q` is the field order.
    fn x_frobenius_iter(&self, k: usize) -> FqPoly {
        let q = self.field.size() as u64;
        let mut h = FqPoly::x(&self.field).rem(self);
        for _ in 0..k {
            h = h.powmod(q, self);
        }
        h
    }

    /// No factor of degree `k <= n/2`, checked through `gcd(x^{Q^k} - x, f)`.
    pub fn is_irreducible(&self) -> bool {
        let Some(n) = self.degree() else {
            return false;
        };
        if n == 0 {
            return false;
        }
        let x = FqPoly::x(&self.field);
        let q = self.field.size() as u64;
        let mut h = x.rem(self);
        for _ in 1..=n / 2 {
            h = h.powmod(q, self);
            if !h.sub(&x).gcd(self).is_one() {
                return false;
            }
        }
        true
    }

    /// Square-free decomposition of a monic polynomial: pairs `(g, e)` with
    /// `self = prod g^e` and each `g` square-free.
    fn squarefree_decomposition(&self) -> Vec<(FqPoly, u32)> {
        let f = &self.field;
        let p = f.characteristic();
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let d = self.derivative();
        if d.is_zero() {
            // self = g(x^p): take the p-th root coefficientwise.
            let root = self.pth_root();
            for (g, e) in root.squarefree_decomposition() {
                out.push((g, e * p));
            }
            return out;
        }
        let mut c = self.gcd(&d);
        let mut w = self.div_exact(&c).unwrap();
        let mut i = 1;
        while !w.is_one() {
            let y = w.gcd(&c);
            let z = w.div_exact(&y).unwrap();
            if !z.is_one() {
                out.push((z, i));
            }
            i += 1;
            w = y;
            c = c.div_exact(&w).unwrap();
        }
        if !c.is_one() {
            for (g, e) in c.pth_root().squarefree_decomposition() {
                out.push((g, e * p));
            }
        }
        out
    }

    fn pth_root(&self) -> FqPoly {
        let f = &self.field;
        let p = f.characteristic() as usize;
        let coeffs = self
            .coeffs
            .iter()
            .step_by(p)
            .map(|&c| f.frobenius_pow(c, -1))
            .collect();
        FqPoly::new(f, coeffs)
    }

    /// Splits a monic square-free polynomial into products of irreducibles of
    /// equal degree.
    fn distinct_degree(&self) -> Vec<(FqPoly, usize)> {
        let x = FqPoly::x(&self.field);
        let q = self.field.size() as u64;
        let mut rest = self.clone();
        let mut h = x.rem(&rest);
        let mut out = Vec::new();
        let mut d = 0;
        while rest.degree().unwrap_or(0) >= 2 * (d + 1) {
            d += 1;
            h = h.powmod(q, &rest);
            let g = h.sub(&x).gcd(&rest);
            if !g.is_one() {
                rest = rest.div_exact(&g).unwrap();
                h = h.rem(&rest);
                out.push((g, d));
            }
        }
        if rest.degree().unwrap_or(0) > 0 {
            let dr = rest.degree().unwrap();
            out.push((rest, dr));
        }
        out
    }

    /// Cantor-Zassenhaus splitting of a product of distinct monic
    /// irreducibles of degree `d`.
    fn equal_degree(&self, d: usize, rng: &mut ChaCha8Rng) -> Vec<FqPoly> {
        let n = self.degree().unwrap();
        if n == d {
            return vec![self.clone()];
        }
        let f = &self.field;
        let q = f.size() as u64;
        loop {
            let a = FqPoly::new(
                f,
                (0..n).map(|_| FqElem(rng.gen_range(0..f.size()))).collect(),
            );
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let b = if f.characteristic() == 2 {
                // trace from F_{Q^d} down to F_2
                let k = f.degree() as usize * d;
                let mut acc = a.rem(self);
                let mut term = acc.clone();
                for _ in 1..k {
                    term = term.mulmod(&term, self);
                    acc = acc.add(&term);
                }
                acc
            } else {
                // a^{(Q^d - 1)/2} = (a^{1 + Q + ... + Q^{d-1}})^{(Q-1)/2}
                let mut norm = a.rem(self);
                let mut frob = norm.clone();
                for _ in 1..d {
                    frob = frob.powmod(q, self);
                    norm = norm.mulmod(&frob, self);
                }
                norm.powmod((q - 1) / 2, self).sub(&FqPoly::one(f))
            };
            let g = b.gcd(self);
            let dg = g.degree().unwrap_or(0);
            if dg > 0 && dg < n {
                let h = self.div_exact(&g).unwrap();
                let mut out = g.equal_degree(d, rng);
                out.extend(h.equal_degree(d, rng));
                return out;
            }
        }
    }

    /// Complete factorization into monic irreducibles, sorted by degree and
    /// then by coefficients.
    pub fn factor(&self) -> Result<Factorization, FieldError> {
        let Some(n) = self.degree() else {
            return Err(FieldError::ZeroPolynomial);
        };
        if n > MAX_FACTOR_DEGREE {
            return Err(FieldError::DegreeTooLarge(n));
        }
        let lead = self.lead();
        let monic = self.monic();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut factors: Vec<(FqPoly, u32)> = Vec::new();
        for (sqf, e) in monic.squarefree_decomposition() {
            for (part, d) in sqf.distinct_degree() {
                for g in part.equal_degree(d, &mut rng) {
                    match factors.iter_mut().find(|(h, _)| *h == g) {
                        Some((_, m)) => *m += e,
                        None => factors.push((g, e)),
                    }
                }
            }
        }
        factors.sort_by_key(|(a, _)| a.cmp_key());
        Ok(Factorization { lead, factors })
    }

    fn cmp_key(&self) -> (usize, Vec<u32>) {
        (
            self.coeffs.len(),
            self.coeffs.iter().rev().map(|c| c.value()).collect(),
        )
    }

    /// Distinct roots in the coefficient field, in increasing encoding order.
    pub fn roots(&self) -> Vec<FqElem> {
        let Some(n) = self.degree() else {
            return Vec::new();
        };
        if n == 0 {
            return Vec::new();
        }
        let x = FqPoly::x(&self.field);
        let monic = self.monic();
        let split = monic.x_frobenius_iter(1).sub(&x).gcd(&monic);
        if split.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x7007);
        let f = &self.field;
        let mut roots: Vec<FqElem> = split
            .equal_degree(1, &mut rng)
            .iter()
            .map(|l| f.neg(l.coeff(0)))
            .collect();
        roots.sort();
        roots
    }

    pub fn display(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = c.value().to_string();
            terms.push(match i {
                0 => cs,
                1 if c.value() == 1 => var.to_string(),
                1 => format!("{cs}*{var}"),
                _ if c.value() == 1 => format!("{var}^{i}"),
                _ => format!("{cs}*{var}^{i}"),
            });
        }
        terms.join(" + ")
    }
}

/// All monic polynomials of degree `d` over `field`, in lexicographic order.
pub fn monic_polys(field: &FqField, d: usize) -> impl Iterator<Item = FqPoly> + '_ {
    let q = field.size() as u64;
    let total = q.pow(d as u32);
    (0..total).map(move |code| {
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut rest = code;
        for _ in 0..d {
            coeffs.push(FqElem((rest % q) as u32));
            rest /= q;
        }
        coeffs.push(FqElem::ONE);
        FqPoly::new(field, coeffs)
    })
}

/// All monic irreducible polynomials of degree `d`.
pub fn monic_irreducibles(field: &FqField, d: usize) -> Vec<FqPoly> {
    monic_polys(field, d).filter(|f| f.is_irreducible()).collect()
}
