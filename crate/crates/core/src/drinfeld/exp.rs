use super::twisted::{CoeffRing, RationalCoeffs, TwistedPoly};
use crate::ffield::{build_extension, Embedding, FqElem, FqField, FqPoly};
use crate::funcfield::FieldElement;
use crate::series::TruncLaurent;
use crate::{invalid, Result};

/// The Carlitz exponential `sum e_i z^{q^i}` through `i = N`, with exact
/// coefficients in `F_q(theta)`.
#[derive(Clone, Debug)]
pub struct ExpSeries {
    ring: RationalCoeffs,
    coeffs: Vec<FieldElement>,
}

impl ExpSeries {
    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn ring(&self) -> &RationalCoeffs {
        &self.ring
    }

    pub fn as_twisted(&self) -> TwistedPoly<RationalCoeffs> {
        TwistedPoly::new(&self.ring, self.coeffs.clone())
    }

    /// Coefficients of `tau^0 .. tau^N` in `(theta + tau) exp - exp theta`;
    /// the coefficient of `tau^{N+1}` involves the omitted `e_{N+1}`.
    pub fn functional_equation_residual(&self) -> Vec<FieldElement> {
        let r = &self.ring;
        let n = self.coeffs.len() - 1;
        let phi_t = TwistedPoly::new(r, vec![r.theta(), r.one()]);
        let theta = TwistedPoly::constant(r, r.theta());
        let e = self.as_twisted();
        let res = phi_t.mul(&e).sub(&e.mul(&theta));
        (0..=n).map(|i| res.coeff(i)).collect()
    }
}

/// `e_0 = 1`, `e_i = e_{i-1}^q / (theta^{q^i} - theta)`.
pub fn carlitz_exp(base: &FqField, n: usize) -> Result<ExpSeries> {
    if n < 1 {
        return Err(invalid("exponential needs N >= 1"));
    }
    let r = RationalCoeffs::new(base);
    let q = base.size() as usize;
    let mut coeffs = vec![r.one()];
    let mut qi = 1usize;
    for _ in 1..=n {
        qi *= q;
        let mut d = vec![FqElem::ZERO; qi + 1];
        d[qi] = base.one();
        d[1] = base.neg(base.one());
        let den = r.from_poly(FqPoly::new(base, d));
        let prev = r.frobenius(coeffs.last().unwrap());
        coeffs.push(prev.div(&den)?);
    }
    Ok(ExpSeries { ring: r, coeffs })
}

/// The Carlitz period data at infinity, in the uniformizer `pi = 1/theta`.
#[derive(Clone, Debug)]
pub struct CarlitzPeriod {
    /// `F_q`, or `F_{q^2}` in odd characteristic, holding the unit part
    /// of the `(q-1)`-st root.
    pub field: FqField,
    pub embedding: Embedding,
    /// `eta = c pi^{1/(q-1)}` with `eta^{q-1} = -pi`, so `eta^{1-q} = -theta`.
    pub eta: TruncLaurent,
    /// `eta^q prod_{i>=1} (1 - theta^{1-q^i})`.
    pub inverse_period: TruncLaurent,
    /// Number of product factors that are not `1` to the precision.
    pub factors: usize,
}

impl CarlitzPeriod {
    pub fn period(&self) -> Result<TruncLaurent> {
        self.inverse_period.inv()
    }
}

/// A unit `c` with `c^{q-1} = -1`.
fn minus_one_root(base: &FqField) -> Result<(FqField, Embedding, FqElem)> {
    let q = base.size() as u64;
    let m = if base.characteristic() == 2 { 1 } else { 2 };
    let ext = build_extension(base, m)?;
    let k = ext.field.clone();
    let c = if m == 1 {
        k.one()
    } else {
        k.pow(k.primitive_element(), q.div_ceil(2))
    };
    debug_assert_eq!(k.pow(c, q - 1), k.neg(k.one()));
    Ok((k, ext.embedding, c))
}

/// Builds `eta = c pi^{1/(q-1)}` and the product to absolute precision
/// `prec` in `pi`.
pub fn carlitz_period(base: &FqField, prec: i64) -> Result<CarlitzPeriod> {
    let q = base.size() as i64;
    let (k, embedding, c) = minus_one_root(base)?;
    let eta = TruncLaurent::monomial(&k, c, 1, (q - 1) as u32);
    let mut prod = TruncLaurent::one(&k);
    let mut factors = 0;
    let mut qi = q;
    while qi - 1 < prec {
        let f = TruncLaurent::one(&k).sub(&TruncLaurent::monomial(&k, k.one(), qi - 1, 1))?;
        prod = prod.mul(&f)?;
        factors += 1;
        qi *= q;
    }
    let prod = prod.with_prec(prec);
    let inverse_period = eta.pow(q)?.mul(&prod)?;
    Ok(CarlitzPeriod {
        field: k,
        embedding,
        eta,
        inverse_period,
        factors,
    })
}

/// Coefficients of `z^{q^i}`, `i = 0..=D+1`, in `z prod (1 - z/lambda)`
/// over the nonzero `lambda = a(theta) generator` with `deg a <= D`.
///
/// The product over an `F_q`-space is additive in `z`; adjoining a vector
/// `w` to the space `V` maps `E_V` to `E_V - E_V^q / E_V(w)^{q-1}`.
pub fn lattice_exp_partial(generator: &TruncLaurent, base: &FqField, d: i64) -> Result<Vec<TruncLaurent>> {
    let k = generator.field().clone();
    let e = Embedding::new(base, &k)?;
    let q = base.size() as u64;
    let theta = TruncLaurent::monomial(&k, k.one(), -1, 1);
    let mut coeffs = vec![TruncLaurent::one(&k)];
    let mut space: Vec<TruncLaurent> = vec![TruncLaurent::zero(&k)];
    let mut w = generator.clone();
    for j in 0..=d {
        if j > 0 {
            w = w.mul(&theta)?;
        }
        let mut ew = w.clone();
        for l in space.iter().skip(1) {
            ew = ew.mul(&TruncLaurent::one(&k).sub(&w.div(l)?)?)?;
        }
        let scale = ew.pow(q as i64 - 1)?.inv()?;
        let mut next = Vec::with_capacity(coeffs.len() + 1);
        for i in 0..=coeffs.len() {
            let mut c = coeffs.get(i).cloned().unwrap_or_else(|| TruncLaurent::zero(&k));
            if i > 0 {
                c = c.sub(&coeffs[i - 1].q_power(q).mul(&scale)?)?;
            }
            next.push(c);
        }
        coeffs = next;
        let mut grown = Vec::with_capacity(space.len() * q as usize);
        for c in base.elements() {
            let cw = w.scale(e.apply(c));
            for v in &space {
                grown.push(v.add(&cw)?);
            }
        }
        space = grown;
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::{expand_at_place, Place};
    use crate::rational::rat;

    fn f(q: u64) -> FqField {
        FqField::with_order(q).unwrap()
    }

    #[test]
    fn first_coefficients() {
        let k = f(3);
        let ex = carlitz_exp(&k, 3).unwrap();
        let r = ex.ring();
        assert_eq!(ex.coeffs()[0], r.one());
        let den = r.theta_pow(3).sub(&r.theta()).unwrap();
        assert_eq!(ex.coeffs()[1], r.one().div(&den).unwrap());
    }

    #[test]
    fn residual_vanishes_small() {
        for q in [2, 3, 4, 5] {
            let ex = carlitz_exp(&f(q), 3).unwrap();
            assert!(ex.functional_equation_residual().iter().all(|c| c.is_zero()));
        }
    }

    #[test]
    fn wrong_coefficient_leaves_a_residual() {
        let k = f(2);
        let ex = carlitz_exp(&k, 3).unwrap();
        let mut bad = ex.clone();
        bad.coeffs[2] = bad.coeffs[2].add(&bad.ring.one()).unwrap();
        let res = bad.functional_equation_residual();
        assert!(!res[2].is_zero());
    }

    #[test]
    fn period_valuation() {
        for q in [2u64, 3, 4, 5] {
            let p = carlitz_period(&f(q), 40).unwrap();
            let v = p.inverse_period.valuation().unwrap();
            assert_eq!(v, rat(q as i64, q as i64 - 1));
            let k = &p.field;
            let eta_q1 = p.eta.pow(q as i64 - 1).unwrap();
            // eta^{q-1} = -pi
            assert_eq!(eta_q1, TruncLaurent::monomial(k, k.neg(k.one()), 1, 1));
        }
    }

    #[test]
    fn empty_lattice_and_normalization() {
        let k = f(3);
        let p = carlitz_period(&k, 30).unwrap();
        let lam = p.period().unwrap();
        assert_eq!(lattice_exp_partial(&lam, &k, -1).unwrap().len(), 1);
        for d in 0..3 {
            let c = lattice_exp_partial(&lam, &k, d).unwrap();
            assert_eq!(c[0], TruncLaurent::one(&p.field));
            assert_eq!(c.len() as i64, d + 2);
        }
    }

    #[test]
    fn lattice_product_converges_to_carlitz_coefficient() {
        for q in [2u64, 3] {
            let k = f(q);
            let prec = 60;
            let p = carlitz_period(&k, prec).unwrap();
            let lam = p.period().unwrap().with_rel_prec(prec);
            let ex = carlitz_exp(&k, 1).unwrap();
            let e1 = expand_at_place(&ex.coeffs()[1], &Place::infinite(&crate::funcfield::CurveDescriptor::projective_line(&k)), prec)
                .unwrap()
                .embed(&p.embedding);
            let mut last = i64::MIN;
            for d in 0..6 {
                if last == i64::MAX {
                    break;
                }
                let c = lattice_exp_partial(&lam, &k, d).unwrap();
                let diff = c[1].sub(&e1).unwrap();
                match diff.val_units() {
                    // the difference has valuation q^{D+2}
                    Some(v) => {
                        assert_eq!(diff.valuation().unwrap(), rat((q as i64).pow(d as u32 + 2), 1));
                        assert!(v > last);
                        last = v;
                    }
                    None => last = i64::MAX,
                }
            }
            assert_eq!(last, i64::MAX, "q={q}: lattice coefficient never reached the working precision");
        }
    }
}
