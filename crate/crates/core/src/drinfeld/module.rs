use super::twisted::{CoeffRing, FiniteCoeffs, TwistedPoly};
use crate::ffield::{FqElem, FqPoly};
use crate::funcfield::{valuation_at, CurveDescriptor, CurveKind, FieldElement, Place};
use crate::{invalid, Result};

/// A Drinfeld `A`-module for `A = F_q[t]` or the coordinate ring of an
/// elliptic curve, stored by the images of the generators `t` (and `y`).
#[derive(Clone, Debug)]
pub struct DrinfeldModule<R: CoeffRing> {
    base: CurveDescriptor,
    ring: R,
    phi_t: TwistedPoly<R>,
    phi_y: Option<TwistedPoly<R>>,
    rank: u32,
}

/// Outcome of checking elliptic generator images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticCheck {
    pub commute: bool,
    pub weierstrass: bool,
    /// `(deg phi_t, deg phi_y)`.
    pub degrees: (Option<usize>, Option<usize>),
    /// `r` with `deg phi_t = 2r` and `deg phi_y = 3r`, when consistent.
    pub rank: Option<u32>,
}

impl EllipticCheck {
    pub fn is_module(&self) -> bool {
        self.commute && self.weierstrass && self.rank.is_some_and(|r| r >= 1)
    }
}

/// Checks that `phi_t`, `phi_y` commute and satisfy the Weierstrass
/// relation in `K{tau}`.
pub fn validate_elliptic<R: CoeffRing>(
    curve: &CurveDescriptor,
    phi_t: &TwistedPoly<R>,
    phi_y: &TwistedPoly<R>,
) -> Result<EllipticCheck> {
    let CurveKind::Elliptic([a1, a2, a3, a4, a6]) = *curve.kind() else {
        return Err(invalid("validator needs an elliptic curve"));
    };
    let r = phi_t.ring();
    let c = |a: FqElem| TwistedPoly::constant(r, r.from_base(a));
    let commute = phi_t.mul(phi_y) == phi_y.mul(phi_t);
    let lhs = phi_y
        .mul(phi_y)
        .add(&c(a1).mul(phi_t).mul(phi_y))
        .add(&c(a3).mul(phi_y));
    let t2 = phi_t.mul(phi_t);
    let rhs = t2
        .mul(phi_t)
        .add(&c(a2).mul(&t2))
        .add(&c(a4).mul(phi_t))
        .add(&c(a6));
    let degrees = (phi_t.degree(), phi_y.degree());
    let rank = match degrees {
        (Some(dt), Some(dy)) if dt % 2 == 0 && dy == 3 * dt / 2 => Some((dt / 2) as u32),
        _ => None,
    };
    Ok(EllipticCheck {
        commute,
        weierstrass: lhs == rhs,
        degrees,
        rank,
    })
}

impl<R: CoeffRing> DrinfeldModule<R> {
    /// A module over `F_q[t]` given by `phi_t`, of rank `deg_tau phi_t`.
    pub fn polynomial(base: &crate::ffield::FqField, phi_t: TwistedPoly<R>) -> Result<Self> {
        let rank = match phi_t.degree() {
            Some(d) if d >= 1 => d as u32,
            _ => return Err(invalid("phi_t must have positive tau-degree")),
        };
        Ok(DrinfeldModule {
            base: CurveDescriptor::projective_line(base),
            ring: phi_t.ring().clone(),
            phi_t,
            phi_y: None,
            rank,
        })
    }

    /// The Carlitz module `phi_t = gamma(t) + tau`.
    pub fn carlitz(base: &crate::ffield::FqField, ring: &R, gamma_t: R::Elem) -> Self {
        let phi_t = TwistedPoly::new(ring, vec![gamma_t, ring.one()]);
        Self::polynomial(base, phi_t).expect("Carlitz module has rank 1")
    }

    /// A module over the coordinate ring of an elliptic curve; rejected
    /// unless the images pass [`validate_elliptic`].
    pub fn elliptic(curve: &CurveDescriptor, phi_t: TwistedPoly<R>, phi_y: TwistedPoly<R>) -> Result<Self> {
        let check = validate_elliptic(curve, &phi_t, &phi_y)?;
        if !check.is_module() {
            return Err(invalid(format!("generator images do not define a Drinfeld module: {check:?}")));
        }
        Ok(DrinfeldModule {
            base: curve.clone(),
            ring: phi_t.ring().clone(),
            phi_t,
            phi_y: Some(phi_y),
            rank: check.rank.unwrap(),
        })
    }

    pub fn base(&self) -> &CurveDescriptor {
        &self.base
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn phi_t(&self) -> &TwistedPoly<R> {
        &self.phi_t
    }

    pub fn phi_y(&self) -> Option<&TwistedPoly<R>> {
        self.phi_y.as_ref()
    }

    pub fn gamma_t(&self) -> R::Elem {
        self.phi_t.coeff(0)
    }

    fn poly_in_phi_t(&self, p: &FqPoly) -> TwistedPoly<R> {
        let r = &self.ring;
        let mut acc = TwistedPoly::zero(r);
        for &c in p.coeffs().iter().rev() {
            acc = acc.mul(&self.phi_t).add(&TwistedPoly::constant(r, r.from_base(c)));
        }
        acc
    }

    /// The expected `deg_tau phi_a = -r v_inf(a)` (the place at infinity
    /// has degree one for both base curves).
    pub fn expected_degree(&self, a: &FieldElement) -> Result<usize> {
        let v = valuation_at(&Place::infinite(&self.base), a)?;
        Ok((-(self.rank as i64) * v) as usize)
    }
}

/// `phi_a` for `a` in `A`, written as `c0(t) + c1(t) y`.
pub fn phi_of<R: CoeffRing>(module: &DrinfeldModule<R>, a: &FieldElement) -> Result<TwistedPoly<R>> {
    if a.curve() != &module.base {
        return Err(invalid("element of a different function field"));
    }
    let (c0, c1, den) = a.parts();
    if !den.is_one() {
        return Err(invalid("element does not lie in A"));
    }
    let mut out = module.poly_in_phi_t(c0);
    if !c1.is_zero() {
        let phi_y = module.phi_y.as_ref().expect("elliptic element on an elliptic module");
        out = out.add(&module.poly_in_phi_t(c1).mul(phi_y));
    }
    Ok(out)
}

/// Degree and separability data of `phi_a(x)` as a polynomial in `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparabilityCertificate {
    /// `q^{deg_tau phi_a}`.
    pub degree_in_x: u64,
    /// `q^{r deg a}`.
    pub expected_degree: u64,
    /// The linear coefficient is `gamma(a)`; nonzero means separable.
    pub separable: bool,
}

pub fn separability<R: CoeffRing>(module: &DrinfeldModule<R>, a: &FieldElement) -> Result<SeparabilityCertificate> {
    let phi = phi_of(module, a)?;
    let q = module.base.q();
    let d = phi.degree().ok_or_else(|| invalid("a = 0"))? as u32;
    let expected = module.expected_degree(a)? as u32;
    Ok(SeparabilityCertificate {
        degree_in_x: q.pow(d),
        expected_degree: q.pow(expected),
        separable: !module.ring.is_zero(&phi.coeff(0)),
    })
}

/// The kernel of `x -> phi_a(x)` on the finite coefficient field, found
/// by linear algebra over the prime field (the map is additive).
pub fn torsion_kernel(module: &DrinfeldModule<FiniteCoeffs>, a: &FieldElement) -> Result<Vec<FqElem>> {
    let phi = phi_of(module, a)?;
    let k = module.ring().field();
    let p = k.characteristic() as u64;
    let n = k.degree() as usize;
    let basis: Vec<FqElem> = (0..n)
        .map(|i| {
            let mut c = vec![0; n];
            c[i] = 1;
            k.from_coords(&c)
        })
        .collect();
    // columns are images of basis vectors; reduce the transpose system
    // M x = 0 with rows indexed by output coordinates
    let images: Vec<Vec<u64>> = basis
        .iter()
        .map(|b| k.coords(phi.apply(b)).into_iter().map(u64::from).collect())
        .collect();
    let mut m: Vec<Vec<u64>> = (0..n).map(|row| (0..n).map(|col| images[col][row]).collect()).collect();
    let pivots = row_reduce(&mut m, p);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut kernel_basis = Vec::new();
    for &f in &free {
        let mut v = vec![0u64; n];
        v[f] = 1;
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = (p - m[row][f] % p) % p;
        }
        kernel_basis.push(v);
    }
    let mut out = Vec::new();
    let total = p.pow(kernel_basis.len() as u32);
    for idx in 0..total {
        let mut v = vec![0u64; n];
        let mut r = idx;
        for b in &kernel_basis {
            let c = r % p;
            r /= p;
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi = (*vi + c * bi) % p;
            }
        }
        let coords: Vec<u32> = v.into_iter().map(|x| x as u32).collect();
        out.push(k.from_coords(&coords));
    }
    out.sort();
    Ok(out)
}

/// Reduced row echelon form over `F_p`; returns pivot columns by row.
fn row_reduce(m: &mut [Vec<u64>], p: u64) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let inv = |a: u64| -> u64 {
        let mut r = 1;
        for _ in 0..p - 2 {
            r = r * a % p;
        }
        r
    };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_multiple_of(p)) else {
            continue;
        };
        m.swap(r, pr);
        let s = inv(m[r][c]);
        for x in m[r].iter_mut() {
            *x = *x * s % p;
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    m[i][j] = (m[i][j] + (p - f) * m[r][j]) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::super::twisted::RationalCoeffs;
    use super::*;
    use crate::ffield::FqField;
    use proptest::prelude::*;

    fn f(q: u64) -> FqField {
        FqField::with_order(q).unwrap()
    }

    #[test]
    fn carlitz_images() {
        let k = f(3);
        let r = RationalCoeffs::new(&k);
        let m = DrinfeldModule::carlitz(&k, &r, r.theta());
        let line = m.base().clone();
        let t = FieldElement::t(&line);
        assert_eq!(phi_of(&m, &t).unwrap().coeffs(), &[r.theta(), r.one()]);
        let t2 = phi_of(&m, &t.mul(&t).unwrap()).unwrap();
        let th = r.theta();
        assert_eq!(
            t2.coeffs(),
            &[th.mul(&th).unwrap(), th.add(&r.theta_pow(3)).unwrap(), r.one()]
        );
        assert_eq!(phi_of(&m, &FieldElement::one(&line)).unwrap(), TwistedPoly::one(&r));
    }

    #[test]
    fn torsion_examples() {
        let base = f(2);
        let k4 = f(4);
        let r = FiniteCoeffs::new(&base, &k4).unwrap();
        let m = DrinfeldModule::carlitz(&base, &r, k4.one());
        let t = FieldElement::t(m.base());
        assert_eq!(torsion_kernel(&m, &t).unwrap(), vec![FqElem::ZERO, k4.one()]);
        let one = FieldElement::one(m.base());
        assert_eq!(torsion_kernel(&m, &one).unwrap(), vec![FqElem::ZERO]);
        // A-characteristic (t): phi_t = tau is purely inseparable
        let m0 = DrinfeldModule::carlitz(&base, &r, FqElem::ZERO);
        assert_eq!(torsion_kernel(&m0, &t).unwrap(), vec![FqElem::ZERO]);
        let cert = separability(&m0, &t).unwrap();
        assert!(!cert.separable);
        assert_eq!(cert.degree_in_x, 2);
    }

    #[test]
    fn torsion_matches_brute_force() {
        let base = f(3);
        let k = f(81);
        let r = FiniteCoeffs::new(&base, &k).unwrap();
        let m = DrinfeldModule::carlitz(&base, &r, k.from_int(5));
        let line = m.base().clone();
        let a = FieldElement::from_poly(&line, FqPoly::from_ints(&base, &[1, 0, 1]));
        let phi = phi_of(&m, &a).unwrap();
        let mut brute: Vec<FqElem> = k.elements().filter(|x| phi.apply(x).is_zero()).collect();
        brute.sort();
        assert_eq!(torsion_kernel(&m, &a).unwrap(), brute);
    }

    /// Searches `phi_t = theta + b1 tau + b2 tau^2`, `phi_y = eps + c1 tau
    /// + c2 tau^2 + c3 tau^3` over `F_4` for `y^2 + y = t^3` over `F_2`.
    #[test]
    fn elliptic_rank_one_module_found_and_validated() {
        let base = f(2);
        let k = f(4);
        let curve = CurveDescriptor::elliptic_from_ints(&base, [0, 0, 1, 0, 0]).unwrap();
        let r = FiniteCoeffs::new(&base, &k).unwrap();
        let (_, pts) = curve.affine_points(2).unwrap();
        let mut found = 0;
        for &(th, ep) in &pts {
            for b1 in k.elements() {
                for b2 in k.elements().filter(|x| !x.is_zero()) {
                    let pt = TwistedPoly::new(&r, vec![th, b1, b2]);
                    for c1 in k.elements() {
                        for c2 in k.elements() {
                            for c3 in k.elements().filter(|x| !x.is_zero()) {
                                let py = TwistedPoly::new(&r, vec![ep, c1, c2, c3]);
                                let chk = validate_elliptic(&curve, &pt, &py).unwrap();
                                if chk.is_module() {
                                    found += 1;
                                    let m = DrinfeldModule::elliptic(&curve, pt.clone(), py.clone()).unwrap();
                                    assert_eq!(m.rank(), 1);
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!(found > 0);
        // a constant pair satisfies the relations but has rank 0
        let pt = TwistedPoly::constant(&r, pts[0].0);
        let py = TwistedPoly::constant(&r, pts[0].1);
        let chk = validate_elliptic(&curve, &pt, &py).unwrap();
        assert!(chk.commute && chk.weierstrass && !chk.is_module());
        // non-commuting images are rejected
        let bad = TwistedPoly::new(&r, vec![k.one(), k.one(), k.one()]);
        assert!(DrinfeldModule::elliptic(&curve, bad, py).is_err());
    }

    fn small_poly(base: &FqField, c: &[u32]) -> FqPoly {
        FqPoly::new(base, c.iter().map(|&x| FqElem(x % base.size())).collect())
    }

    proptest! {
        #[test]
        fn phi_is_a_ring_homomorphism(
            a in prop::collection::vec(0u32..4, 1..4),
            b in prop::collection::vec(0u32..4, 1..4),
            gamma in 1u32..64,
        ) {
            let base = f(4);
            let k = f(64);
            let r = FiniteCoeffs::new(&base, &k).unwrap();
            let phi_t = TwistedPoly::new(&r, vec![FqElem(gamma), k.from_int(3), k.one()]);
            let m = DrinfeldModule::polynomial(&base, phi_t).unwrap();
            let line = m.base().clone();
            let fa = FieldElement::from_poly(&line, small_poly(&base, &a));
            let fb = FieldElement::from_poly(&line, small_poly(&base, &b));
            let pa = phi_of(&m, &fa).unwrap();
            let pb = phi_of(&m, &fb).unwrap();
            prop_assert_eq!(phi_of(&m, &fa.add(&fb).unwrap()).unwrap(), pa.add(&pb));
            prop_assert_eq!(phi_of(&m, &fa.mul(&fb).unwrap()).unwrap(), pa.mul(&pb));
            if !fa.is_zero() {
                prop_assert_eq!(pa.degree().unwrap(), m.expected_degree(&fa).unwrap());
                let e = crate::ffield::Embedding::new(&base, &k).unwrap();
                prop_assert_eq!(pa.coeff(0), e.apply_poly(&small_poly(&base, &a)).eval(FqElem(gamma)));
            }
        }

        #[test]
        fn kernel_sizes_are_powers_of_q(a in prop::collection::vec(0u32..3, 1..4), gamma in 0u32..27) {
            let base = f(3);
            let k = f(729);
            let r = FiniteCoeffs::new(&base, &k).unwrap();
            let m = DrinfeldModule::carlitz(&base, &r, r.from_base(FqElem(gamma % 3)));
            let line = m.base().clone();
            let fa = FieldElement::from_poly(&line, small_poly(&base, &a));
            prop_assume!(!fa.is_zero());
            let n = torsion_kernel(&m, &fa).unwrap().len() as u64;
            let bound = separability(&m, &fa).unwrap().expected_degree;
            prop_assert_eq!(bound % n, 0);
            prop_assert!((0..20).any(|e| 3u64.pow(e) == n));
        }
    }
}
