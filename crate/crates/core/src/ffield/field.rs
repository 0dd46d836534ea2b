use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use std::sync::LazyLock;

use super::FieldError;

/// Largest field we are willing to construct.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// Fields up to this size get log/exp tables for multiplication.
const TABLE_LIMIT: u32 = 1 << 16;

/// An element of a finite field, stored as its coordinate vector over the
/// prime field packed into an integer: `sum c_i p^i` for the element
/// `sum c_i x^i` in `F_p[x]/(modulus)`.
///
/// Elements carry no reference to their field; all arithmetic goes through
/// the owning [`FqField`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FqElem(pub(crate) u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    /// The packed coordinate encoding.
    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

struct Tables {
    log: Vec<u32>,
    exp: Vec<u32>,
}

struct FieldInner {
    p: u32,
    n: u32,
    size: u32,
    /// Monic modulus over F_p, coefficients from constant term upward.
    modulus: Vec<u32>,
    pow_p: Vec<u32>,
    tables: Option<Tables>,
}

/// The finite field `F_{p^n}`, realised as `F_p[x]/(modulus)` for the
/// lexicographically least monic irreducible modulus of degree `n`.
///
/// Cloning is cheap; fields with the same `(p, n)` share their data.
#[derive(Clone)]
pub struct FqField {
    inner: Arc<FieldInner>,
}

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p && self.inner.n == other.inner.n
    }
}

impl Eq for FqField {}

impl fmt::Debug for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.size())
    }
}

static FIELD_CACHE: LazyLock<Mutex<HashMap<(u32, u32), FqField>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power `q = p^n` into `(p, n)`.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    if !is_prime(p) {
        return None;
    }
    let (mut rest, mut n) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        n += 1;
    }
    (rest == 1).then_some((p as u32, n))
}

impl FqField {
    /// `F_p`.
    pub fn prime(p: u32) -> Result<FqField, FieldError> {
        FqField::new(p, 1)
    }

    /// `F_q` for a prime power `q`.
    pub fn with_order(q: u64) -> Result<FqField, FieldError> {
        let (p, n) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        FqField::new(p, n)
    }

    /// `F_{p^n}` with the canonical (lexicographically least) modulus.
    pub fn new(p: u32, n: u32) -> Result<FqField, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrimePower(p as u64));
        }
        if n == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let size = (p as u64).checked_pow(n).filter(|&s| s <= MAX_FIELD_SIZE);
        let Some(size) = size else {
            return Err(FieldError::TooLarge { p, n });
        };
        let mut cache = FIELD_CACHE.lock().unwrap();
        if let Some(f) = cache.get(&(p, n)) {
            return Ok(f.clone());
        }
        let modulus = least_irreducible(p, n as usize);
        let field = FqField::with_modulus(p, n, size as u32, modulus);
        cache.insert((p, n), field.clone());
        Ok(field)
    }

    fn with_modulus(p: u32, n: u32, size: u32, modulus: Vec<u32>) -> FqField {
        let mut pow_p = Vec::with_capacity(n as usize + 1);
        let mut acc = 1u32;
        for _ in 0..=n {
            pow_p.push(acc);
            acc = acc.saturating_mul(p);
        }
        let mut field = FqField {
            inner: Arc::new(FieldInner {
                p,
                n,
                size,
                modulus,
                pow_p,
                tables: None,
            }),
        };
        if size <= TABLE_LIMIT && size > 2 {
            let tables = field.build_tables();
            Arc::get_mut(&mut field.inner).unwrap().tables = Some(tables);
        }
        field
    }

    fn build_tables(&self) -> Tables {
        let order = (self.size() - 1) as u64;
        let g = self.find_primitive_slow(order);
        let mut log = vec![0u32; self.size() as usize];
        let mut exp = vec![0u32; 2 * order as usize];
        let mut acc = FqElem::ONE;
        for i in 0..order as usize {
            exp[i] = acc.0;
            exp[i + order as usize] = acc.0;
            log[acc.0 as usize] = i as u32;
            acc = self.mul_slow(acc, g);
        }
        Tables { log, exp }
    }

    fn find_primitive_slow(&self, order: u64) -> FqElem {
        let primes = prime_factors(order);
        for v in 1..self.size() {
            let g = FqElem(v);
            if primes
                .iter()
                .all(|&r| self.pow_slow(g, order / r) != FqElem::ONE)
            {
                return g;
            }
        }
        unreachable!("multiplicative group of a finite field is cyclic")
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.inner.n
    }

    pub fn size(&self) -> u32 {
        self.inner.size
    }

    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn zero(&self) -> FqElem {
        FqElem::ZERO
    }

    pub fn one(&self) -> FqElem {
        FqElem::ONE
    }

    /// The class of `x` in `F_p[x]/(modulus)`.
    pub fn generator(&self) -> FqElem {
        if self.degree() == 1 {
            // modulus x + c_0
            self.from_prime(self.inner.p - self.inner.modulus[0])
        } else {
            FqElem(self.inner.p)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.size()).map(FqElem)
    }

    pub fn from_prime(&self, c: u32) -> FqElem {
        FqElem(c % self.inner.p)
    }

    /// The image of an integer under `Z -> F_p -> F_q`.
    pub fn integer(&self, n: i64) -> FqElem {
        self.from_prime(n.rem_euclid(self.inner.p as i64) as u32)
    }

    /// Interprets a nonnegative integer through its base-`p` digits as the
    /// coordinates `sum c_i x^i`; negative integers map to the negation.
    pub fn from_int(&self, c: i64) -> FqElem {
        if c < 0 {
            return self.neg(self.from_int(-c));
        }
        let p = self.inner.p as i64;
        let mut coords = Vec::new();
        let mut rest = c;
        while rest > 0 {
            coords.push((rest % p) as u32);
            rest /= p;
        }
        self.from_coords(&coords)
    }

    /// Reduces a coordinate vector of any length modulo the field modulus.
    pub fn from_coords(&self, coords: &[u32]) -> FqElem {
        let p = self.inner.p;
        let n = self.degree() as usize;
        let mut c: Vec<u32> = coords.iter().map(|&x| x % p).collect();
        reduce_mod(&mut c, &self.inner.modulus, p);
        c.resize(n, 0);
        self.encode(&c)
    }

    pub fn coords(&self, x: FqElem) -> Vec<u32> {
        let p = self.inner.p;
        let mut v = x.0;
        (0..self.degree())
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    fn encode(&self, coords: &[u32]) -> FqElem {
        let mut v = 0u32;
        for (i, &c) in coords.iter().enumerate() {
            v += c * self.inner.pow_p[i];
        }
        FqElem(v)
    }

    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        let p = self.inner.p;
        if p == 2 {
            return FqElem(a.0 ^ b.0);
        }
        if self.degree() == 1 {
            return FqElem((a.0 + b.0) % p);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        for i in 0..self.degree() as usize {
            let d = (x % p + y % p) % p;
            out += d * self.inner.pow_p[i];
            x /= p;
            y /= p;
        }
        FqElem(out)
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        let p = self.inner.p;
        if p == 2 {
            return a;
        }
        if self.degree() == 1 {
            return FqElem((p - a.0) % p);
        }
        let mut x = a.0;
        let mut out = 0;
        for i in 0..self.degree() as usize {
            let d = (p - x % p) % p;
            out += d * self.inner.pow_p[i];
            x /= p;
        }
        FqElem(out)
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if a.0 == 0 || b.0 == 0 {
            return FqElem::ZERO;
        }
        if let Some(t) = &self.inner.tables {
            let l = t.log[a.0 as usize] + t.log[b.0 as usize];
            return FqElem(t.exp[l as usize]);
        }
        self.mul_slow(a, b)
    }

    fn mul_slow(&self, a: FqElem, b: FqElem) -> FqElem {
        let p = self.inner.p;
        if self.degree() == 1 {
            return FqElem(((a.0 as u64 * b.0 as u64) % p as u64) as u32);
        }
        let ca = self.coords(a);
        let cb = self.coords(b);
        let mut prod = vec![0u32; ca.len() + cb.len() - 1];
        for (i, &x) in ca.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        reduce_mod(&mut prod, &self.inner.modulus, p);
        prod.resize(self.degree() as usize, 0);
        self.encode(&prod)
    }

    fn pow_slow(&self, a: FqElem, mut e: u64) -> FqElem {
        let mut base = a;
        let mut acc = FqElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn pow(&self, a: FqElem, e: u64) -> FqElem {
        if a.is_zero() {
            return if e == 0 { FqElem::ONE } else { FqElem::ZERO };
        }
        if let Some(t) = &self.inner.tables {
            let order = (self.size() - 1) as u64;
            let l = (t.log[a.0 as usize] as u64 * (e % order)) % order;
            return FqElem(t.exp[l as usize]);
        }
        self.pow_slow(a, e % (self.size() as u64 - 1))
    }

    /// Signed exponent; panics on `0^{-k}`.
    pub fn powi(&self, a: FqElem, e: i64) -> FqElem {
        if e >= 0 {
            self.pow(a, e as u64)
        } else {
            self.pow(self.inv(a).expect("inverse of zero"), e.unsigned_abs())
        }
    }

    pub fn inv(&self, a: FqElem) -> Option<FqElem> {
        if a.is_zero() {
            return None;
        }
        if let Some(t) = &self.inner.tables {
            let order = self.size() - 1;
            let l = (order - t.log[a.0 as usize]) % order;
            return Some(FqElem(t.exp[l as usize]));
        }
        Some(self.pow_slow(a, self.size() as u64 - 2))
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> Option<FqElem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// `x^{p^i}`, the `i`-th power of the absolute Frobenius. Negative `i`
    /// wraps around the Frobenius orbit.
    pub fn frobenius_pow(&self, x: FqElem, i: i64) -> FqElem {
        let n = self.degree() as i64;
        let k = i.rem_euclid(n) as u32;
        let mut acc = x;
        for _ in 0..k {
            acc = self.pow(acc, self.inner.p as u64);
        }
        acc
    }

    /// `x^{q^i}` for a subfield order `q = p^k`.
    pub fn q_frobenius(&self, x: FqElem, q: u64, i: u32) -> FqElem {
        let k = prime_power(q).map(|(_, k)| k).unwrap_or(1) as i64;
        self.frobenius_pow(x, k * i as i64)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: FqElem) -> u64 {
        let group = self.size() as u64 - 1;
        let mut ord = group;
        for r in prime_factors(group) {
            while ord.is_multiple_of(r) && self.pow(a, ord / r) == FqElem::ONE {
                ord /= r;
            }
        }
        ord
    }

    /// Least element (by encoding) generating the multiplicative group.
    pub fn primitive_element(&self) -> FqElem {
        self.find_primitive_slow(self.size() as u64 - 1)
    }

    /// Whether `x` lies in the subfield of order `p^k`.
    pub fn in_subfield(&self, x: FqElem, k: u32) -> bool {
        self.frobenius_pow(x, k as i64) == x
    }
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Reduces `c` in place modulo a monic polynomial over `F_p`.
fn reduce_mod(c: &mut Vec<u32>, modulus: &[u32], p: u32) {
    let n = modulus.len() - 1;
    while c.len() > n {
        let top = c.pop().unwrap();
        if top == 0 {
            continue;
        }
        let shift = c.len() - n;
        for (i, &m) in modulus[..n].iter().enumerate() {
            c[shift + i] = (c[shift + i] + (p - top) * m % p) % p;
        }
    }
}

// ---- dense polynomials over F_p, used only to pick field moduli ----

fn fp_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fp_mulmod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    reduce_mod(&mut prod, f, p);
    fp_trim(&mut prod);
    prod
}

fn fp_inv(a: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = a as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

fn fp_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let db = b.len() - 1;
    let inv_lead = fp_inv(b[db], p);
    while r.len() > db {
        let c = r.last().unwrap() * inv_lead % p;
        let shift = r.len() - 1 - db;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p - c) * bi % p) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    fp_trim(&mut x);
    fp_trim(&mut y);
    while !y.is_empty() {
        let r = fp_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// No factor of degree `k <= n/2`: `gcd(x^{p^k} - x, f) = 1` for each such `k`.
pub(crate) fn fp_is_irreducible(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    if n <= 1 {
        return n == 1;
    }
    let mut h = fp_rem(&[0, 1], f, p);
    for _ in 1..=n / 2 {
        // h <- h^p mod f
        let mut acc = vec![1u32];
        for _ in 0..p {
            acc = fp_mulmod(&acc, &h, f, p);
        }
        h = acc;
        let mut diff = h.clone();
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        fp_trim(&mut diff);
        let g = fp_gcd(&diff, f, p);
        if g.len() > 1 || g.is_empty() {
            return false;
        }
    }
    true
}

/// Lexicographically least monic irreducible of degree `n` over `F_p`, where
/// the non-leading coefficients `(c_0, ..., c_{n-1})` are ordered by the
/// integer `sum c_i p^i`.
pub(crate) fn least_irreducible(p: u32, n: usize) -> Vec<u32> {
    let total = (p as u64).pow(n as u32);
    for code in 0..total {
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut rest = code;
        for _ in 0..n {
            coeffs.push((rest % p as u64) as u32);
            rest /= p as u64;
        }
        if n > 1 && coeffs[0] == 0 {
            continue;
        }
        coeffs.push(1);
        if fp_is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
