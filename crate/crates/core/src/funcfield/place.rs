use std::fmt;

use serde::Serialize;

use super::{CurveDescriptor, CurveKind, FieldElement};
use crate::ffield::{build_extension, monic_irreducibles, Embedding, FqElem, FqField, FqPoly};
use crate::series::{powser, TruncLaurent};
use crate::{invalid, precision, Error, Result};

/// Largest place degree [`enumerate_places`] accepts.
pub const MAX_PLACE_DEGREE: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaceData {
    Infinite,
    /// A finite place of the projective line.
    Irreducible(FqPoly),
    /// A finite place of an elliptic curve: a Frobenius orbit of affine
    /// points over `F_{q^d}`, sorted, the first being the representative.
    Orbit {
        field: FqField,
        points: Vec<(FqElem, FqElem)>,
    },
}

/// A closed point of the curve with an explicit uniformizer.
#[derive(Clone)]
pub struct Place {
    curve: CurveDescriptor,
    degree: u32,
    data: PlaceData,
    uniformizer: FieldElement,
}

impl PartialEq for Place {
    fn eq(&self, o: &Place) -> bool {
        self.curve == o.curve && self.degree == o.degree && self.data == o.data
    }
}

impl Eq for Place {}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Coordinate expansions at a place, in its uniformizer, with coefficients
/// in the residue field.
pub struct LocalChart {
    pub field: FqField,
    pub embedding: Embedding,
    pub t: TruncLaurent,
    pub y: Option<TruncLaurent>,
}

impl Place {
    pub fn infinite(curve: &CurveDescriptor) -> Place {
        let uniformizer = match curve.kind() {
            CurveKind::ProjectiveLine => FieldElement::t(curve).inv().unwrap(),
            CurveKind::Elliptic(_) => FieldElement::t(curve)
                .div(&FieldElement::y(curve).unwrap())
                .unwrap(),
        };
        Place {
            curve: curve.clone(),
            degree: 1,
            data: PlaceData::Infinite,
            uniformizer,
        }
    }

    /// The place of `F_q(t)` cut out by a monic irreducible.
    pub fn from_irreducible(curve: &CurveDescriptor, p: FqPoly) -> Result<Place> {
        if curve.is_elliptic() || !p.is_monic() || !p.is_irreducible() {
            return Err(invalid("a finite place of P^1 needs a monic irreducible polynomial"));
        }
        Ok(Place {
            curve: curve.clone(),
            degree: p.degree().unwrap() as u32,
            uniformizer: FieldElement::from_poly(curve, p.clone()),
            data: PlaceData::Irreducible(p),
        })
    }

    /// The place through an affine point with coordinates in `F_{q^d}`,
    /// where `field` is the degree-`d` extension returned by
    /// [`CurveDescriptor::extension`] and the point is not defined over a
    /// smaller field.
    pub fn from_point(curve: &CurveDescriptor, field: &FqField, pt: (FqElem, FqElem)) -> Result<Place> {
        let q = curve.q();
        let mut orbit = vec![pt];
        loop {
            let &(t, y) = orbit.last().unwrap();
            let next = (field.q_frobenius(t, q, 1), field.q_frobenius(y, q, 1));
            if next == pt {
                break;
            }
            orbit.push(next);
        }
        let d = orbit.len() as u32;
        if field.size() as u64 != q.pow(d) {
            return Err(invalid("point is defined over a smaller field"));
        }
        orbit.sort();
        let ext = curve.extension(d)?;
        let a = curve.coefficients_in(&ext);
        let (t0, y0) = orbit[0];
        let (_, fy) = CurveDescriptor::gradient(field, &a, t0, y0);
        let uniformizer = if !fy.is_zero() {
            FieldElement::from_poly(curve, min_poly(&ext.embedding, t0, q))
        } else {
            FieldElement::poly_in_y(curve, &min_poly(&ext.embedding, y0, q))?
        };
        Ok(Place {
            curve: curve.clone(),
            degree: d,
            data: PlaceData::Orbit {
                field: field.clone(),
                points: orbit,
            },
            uniformizer,
        })
    }

    pub fn curve(&self) -> &CurveDescriptor {
        &self.curve
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `q_v = q^{d_v}`.
    pub fn residue_size(&self) -> u64 {
        self.curve.q().pow(self.degree)
    }

    pub fn data(&self) -> &PlaceData {
        &self.data
    }

    pub fn is_infinite(&self) -> bool {
        self.data == PlaceData::Infinite
    }

    pub fn uniformizer(&self) -> &FieldElement {
        &self.uniformizer
    }

    pub fn label(&self) -> String {
        match &self.data {
            PlaceData::Infinite => "inf".into(),
            PlaceData::Irreducible(p) => format!("({})", p.display("t")),
            PlaceData::Orbit { points, .. } => {
                let (t, y) = points[0];
                if self.degree == 1 {
                    format!("({},{})", t.value(), y.value())
                } else {
                    format!("({},{})/F_{}", t.value(), y.value(), self.residue_size())
                }
            }
        }
    }

    /// Expansions of `t` (and `y`) in the uniformizer, to absolute
    /// precision about `m`.
    pub fn chart(&self, m: i64) -> Result<LocalChart> {
        let k = self.curve.base();
        let q = self.curve.q();
        match &self.data {
            PlaceData::Infinite => {
                let embedding = Embedding::new(k, k)?;
                match self.curve.kind() {
                    CurveKind::ProjectiveLine => Ok(LocalChart {
                        field: k.clone(),
                        embedding,
                        t: TruncLaurent::monomial(k, k.one(), -1, 1),
                        y: None,
                    }),
                    CurveKind::Elliptic(_) => {
                        let (t, y) = self.curve.expansions_at_infinity(m);
                        Ok(LocalChart {
                            field: k.clone(),
                            embedding,
                            t,
                            y: Some(y),
                        })
                    }
                }
            }
            PlaceData::Irreducible(p) => {
                let ext = build_extension(k, self.degree)?;
                let kk = ext.field.clone();
                let pk = ext.embedding.apply_poly(p);
                let t0 = pk.roots()[0];
                let s_poly = pk.compose(&FqPoly::new(&kk, vec![t0, kk.one()]));
                let t = if self.degree == 1 {
                    TruncLaurent::from_coeffs(&kk, 0, vec![t0, kk.one()], None)
                } else {
                    let h = TruncLaurent::from_poly(&s_poly).reversion(m.max(2))?;
                    h.add(&TruncLaurent::constant(&kk, t0))?
                };
                Ok(LocalChart {
                    field: kk,
                    embedding: ext.embedding,
                    t,
                    y: None,
                })
            }
            PlaceData::Orbit { field, points } => {
                let ext = self.curve.extension(self.degree)?;
                let a = self.curve.coefficients_in(&ext);
                let (t0, y0) = points[0];
                let (ft, fy) = CurveDescriptor::gradient(field, &a, t0, y0);
                let mm = m.max(2) as usize;
                // expansions in the local parameter s
                let (ts, ys, s_in_q) = if !fy.is_zero() {
                    let big_y = solve_branch(field, mm, fy, |x| {
                        curve_residual(field, &a, &[t0, field.one()], &add_const(field, x, y0), mm)
                    })?;
                    let mp = ext.embedding.apply_poly(&min_poly(&ext.embedding, t0, q));
                    (
                        vec![t0, field.one()],
                        add_const(field, &big_y, y0),
                        mp.compose(&FqPoly::new(field, vec![t0, field.one()])),
                    )
                } else {
                    let big_t = solve_branch(field, mm, ft, |x| {
                        curve_residual(field, &a, &add_const(field, x, t0), &[y0, field.one()], mm)
                    })?;
                    let mp = ext.embedding.apply_poly(&min_poly(&ext.embedding, y0, q));
                    (
                        add_const(field, &big_t, t0),
                        vec![y0, field.one()],
                        mp.compose(&FqPoly::new(field, vec![y0, field.one()])),
                    )
                };
                let ts = TruncLaurent::from_coeffs(field, 0, ts, Some(mm as i64));
                let ys = TruncLaurent::from_coeffs(field, 0, ys, Some(mm as i64));
                let varpi = TruncLaurent::from_poly(&s_in_q);
                let (t, y) = if varpi == TruncLaurent::var(field) {
                    (ts, ys)
                } else {
                    let h = varpi.reversion(mm as i64)?;
                    (ts.compose(&h)?, ys.compose(&h)?)
                };
                Ok(LocalChart {
                    field: field.clone(),
                    embedding: ext.embedding,
                    t,
                    y: Some(y),
                })
            }
        }
    }
}

fn add_const(k: &FqField, x: &[FqElem], c: FqElem) -> Vec<FqElem> {
    let mut v = x.to_vec();
    if v.is_empty() {
        v.push(FqElem::ZERO);
    }
    v[0] = k.add(v[0], c);
    v
}

/// `F(t, y)` on power series modulo `s^m`.
fn curve_residual(k: &FqField, a: &[FqElem; 5], t: &[FqElem], y: &[FqElem], m: usize) -> Vec<FqElem> {
    let [a1, a2, a3, a4, a6] = *a;
    let tt = powser::mul(k, t, t, m);
    let ttt = powser::mul(k, &tt, t, m);
    let yy = powser::mul(k, y, y, m);
    let ty = powser::mul(k, t, y, m);
    let get = |v: &[FqElem], i: usize| v.get(i).copied().unwrap_or_default();
    (0..m)
        .map(|i| {
            let mut s = k.add(get(&yy, i), k.mul(a1, get(&ty, i)));
            s = k.add(s, k.mul(a3, get(y, i)));
            s = k.sub(s, get(&ttt, i));
            s = k.sub(s, k.mul(a2, get(&tt, i)));
            s = k.sub(s, k.mul(a4, get(t, i)));
            if i == 0 {
                s = k.sub(s, a6);
            }
            s
        })
        .collect()
}

/// Solves `G(X) = 0` for a series `X` with `X(0) = 0`, where the linear
/// coefficient of `G` in `X` at the origin is `lin != 0`, by the iteration
/// `X <- X - G(X)/lin`.
fn solve_branch(k: &FqField, m: usize, lin: FqElem, g: impl Fn(&[FqElem]) -> Vec<FqElem>) -> Result<Vec<FqElem>> {
    let inv = k.inv(lin).unwrap();
    let mut x = vec![FqElem::ZERO; m];
    for _ in 0..=m + 1 {
        let r = g(&x);
        if r.iter().all(|c| c.is_zero()) {
            return Ok(x);
        }
        for (xi, ri) in x.iter_mut().zip(r) {
            *xi = k.sub(*xi, k.mul(ri, inv));
        }
    }
    Err(crate::failed("local branch iteration did not converge (singular point?)"))
}

/// Minimal polynomial over `F_q` of an element of the extension.
pub fn min_poly(e: &Embedding, x: FqElem, q: u64) -> FqPoly {
    let k = e.target();
    let mut conj = vec![x];
    loop {
        let n = k.q_frobenius(*conj.last().unwrap(), q, 1);
        if n == x {
            break;
        }
        conj.push(n);
    }
    let mut p = FqPoly::one(k);
    for c in conj {
        p = p.mul(&FqPoly::new(k, vec![k.neg(c), k.one()]));
    }
    FqPoly::new(
        e.source(),
        p.coeffs().iter().map(|&c| e.preimage(c).expect("coefficient in base field")).collect(),
    )
}

/// All places of degree at most `max_degree`, infinity first, then by
/// degree.
pub fn enumerate_places(curve: &CurveDescriptor, max_degree: u32) -> Result<Vec<Place>> {
    if max_degree == 0 || max_degree > MAX_PLACE_DEGREE {
        return Err(Error::BoundExceeded(format!(
            "place degree {max_degree} outside 1..={MAX_PLACE_DEGREE}"
        )));
    }
    let mut out = vec![Place::infinite(curve)];
    for d in 1..=max_degree {
        match curve.kind() {
            CurveKind::ProjectiveLine => {
                for p in monic_irreducibles(curve.base(), d as usize) {
                    out.push(Place::from_irreducible(curve, p)?);
                }
            }
            CurveKind::Elliptic(_) => {
                let (ext, pts) = curve.affine_points(d)?;
                let mut seen = std::collections::HashSet::new();
                for pt in pts {
                    if seen.contains(&pt) {
                        continue;
                    }
                    let place = Place::from_point(curve, &ext.field, pt);
                    let Ok(place) = place else { continue };
                    if let PlaceData::Orbit { points, .. } = &place.data {
                        seen.extend(points.iter().copied());
                    }
                    out.push(place);
                }
            }
        }
    }
    Ok(out)
}

/// The places lying over the zero set of a monic irreducible `g(t)`.
pub fn places_over(curve: &CurveDescriptor, g: &FqPoly) -> Result<Vec<Place>> {
    if !curve.is_elliptic() {
        return Ok(vec![Place::from_irreducible(curve, g.clone())?]);
    }
    let k = g.degree().unwrap() as u32;
    for d in [k, 2 * k] {
        let ext = curve.extension(d)?;
        let kk = &ext.field;
        let a = curve.coefficients_in(&ext);
        let t0 = ext.embedding.apply_poly(g).roots()[0];
        let ys = CurveDescriptor::y_roots(kk, &a, t0);
        if ys.is_empty() {
            continue;
        }
        let mut out: Vec<Place> = Vec::new();
        for y0 in ys {
            let p = Place::from_point(curve, kk, (t0, y0))?;
            if !out.contains(&p) {
                out.push(p);
            }
        }
        return Ok(out);
    }
    Err(invalid("no point above an irreducible of t"))
}

/// Laurent expansion of `f` in the uniformizer of `v`, to absolute
/// precision `prec`, with coefficients in the residue field.
pub fn expand_at_place(f: &FieldElement, v: &Place, prec: i64) -> Result<TruncLaurent> {
    if f.is_zero() {
        return Err(Error::ZeroElement);
    }
    if f.curve() != v.curve() {
        return Err(invalid("element and place belong to different curves"));
    }
    let mut m = (prec + 8).max(8);
    loop {
        let chart = v.chart(m)?;
        let e = evaluate(f, &chart, m)?;
        if e.prec_units().is_none_or(|n| n >= prec) {
            let e = e.with_prec(prec);
            if e.is_zero() {
                return Err(precision("requested precision below the leading term"));
            }
            return Ok(e);
        }
        if m > 1 << 14 {
            return Err(precision("expansion did not reach the requested precision"));
        }
        m *= 2;
    }
}

fn evaluate(f: &FieldElement, chart: &LocalChart, m: i64) -> Result<TruncLaurent> {
    let (c0, c1, den) = f.parts();
    let ev = |p: &FqPoly| -> Result<TruncLaurent> {
        let mut acc = TruncLaurent::zero(&chart.field);
        for &c in p.coeffs().iter().rev() {
            acc = acc.mul(&chart.t)?.add(&TruncLaurent::constant(&chart.field, chart.embedding.apply(c)))?;
        }
        Ok(acc)
    };
    let mut num = ev(c0)?;
    if let Some(y) = &chart.y {
        if !c1.is_zero() {
            num = num.add(&ev(c1)?.mul(y)?)?;
        }
    }
    let mut d = ev(den)?;
    if num.is_exact() && d.is_exact() {
        num = num.with_rel_prec(m);
        d = d.with_rel_prec(m);
    }
    num.div(&d)
}

/// The normalized valuation of `f != 0` at `v`, read off its expansion.
pub fn valuation_at(v: &Place, f: &FieldElement) -> Result<i64> {
    if f.is_zero() {
        return Err(Error::ZeroElement);
    }
    let mut prec = 8;
    loop {
        match expand_at_place(f, v, prec) {
            Ok(e) => return Ok(e.val_units().unwrap()),
            Err(Error::PrecisionInsufficient(_)) if prec < 1 << 12 => prec *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// One line of a product-formula report.
#[derive(Clone, Debug, Serialize)]
pub struct PlaceValuation {
    pub place: String,
    pub degree: u32,
    pub valuation: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductFormulaReport {
    pub element: String,
    pub entries: Vec<PlaceValuation>,
    pub total: i64,
}

impl ProductFormulaReport {
    pub fn holds(&self) -> bool {
        self.total == 0
    }
}

/// Locates all zeros and poles of `f` and sums `d_v v(f)` over them.
///
/// Finite candidates come from factoring the norm of the numerator times
/// the denominator; on the projective line the norm is the numerator.
pub fn product_formula_check(f: &FieldElement) -> Result<ProductFormulaReport> {
    if f.is_zero() {
        return Err(Error::ZeroElement);
    }
    let curve = f.curve();
    let (_, _, den) = f.parts();
    let support = f.numerator_norm().mul(den);
    let mut places = vec![Place::infinite(curve)];
    for (g, _) in support.factor()?.factors {
        places.extend(places_over(curve, &g)?);
    }
    let mut entries = Vec::new();
    let mut total = 0;
    for p in &places {
        let v = valuation_at(p, f)?;
        if v != 0 {
            total += p.degree() as i64 * v;
            entries.push(PlaceValuation {
                place: p.label(),
                degree: p.degree(),
                valuation: v,
            });
        }
    }
    Ok(ProductFormulaReport {
        element: f.display(),
        entries,
        total,
    })
}
