//! The rank-one A-motive of an elliptic curve with one point at infinity:
//! the point `V` with `V - V^(1) = Xi`, the slope `m`, the infinite period,
//! its Galois twists, and the cancellation of the regularized sum.
//!
//! Series are in the uniformizer `pi = u(Xi) = theta/epsilon` at infinity,
//! where `u = t/y` is the formal parameter.

mod formal;
mod points;

pub use formal::{formal_expansions, BiSeries, FormalGroupData};
pub use points::{group_law_add, group_law_sub, negate, CurvePointGeneric};

use serde::Serialize;

use crate::funcfield::{valuation_at, CurveDescriptor, Place};
use crate::rational::{int, rat, Rational};
use crate::series::TruncLaurent;
use crate::zeta_periods::{z_inf_trivial_at_0, LogQuantity, RegularizedLedger, ZetaClosedForm};
use crate::{failed, invalid, precision, Result};

pub const FORMAL_PARAMETER: &str = "u = t/y";
const MAX_ITERATIONS: usize = 64;

/// `V = (alpha, beta)` together with the data it was solved from.
#[derive(Clone, Debug)]
pub struct SolvedV {
    pub formal: FormalGroupData,
    pub precision: i64,
    pub q: u64,
    /// `theta = t(pi)` and `epsilon = y(pi)`.
    pub theta: TruncLaurent,
    pub epsilon: TruncLaurent,
    /// `u(V)`.
    pub u: TruncLaurent,
    pub alpha: TruncLaurent,
    pub beta: TruncLaurent,
    pub iterations: usize,
}

impl SolvedV {
    pub fn point(&self) -> CurvePointGeneric {
        CurvePointGeneric::Series {
            t: self.alpha.clone(),
            y: self.beta.clone(),
        }
    }

    pub fn xi(&self) -> CurvePointGeneric {
        CurvePointGeneric::Series {
            t: self.theta.clone(),
            y: self.epsilon.clone(),
        }
    }

    pub fn curve(&self) -> &CurveDescriptor {
        &self.formal.curve
    }

    /// Valuation of `u(V - V^(1) - Xi)`, computed in the formal group.
    pub fn residual_valuation(&self) -> Result<Option<i64>> {
        let fg = &self.formal;
        let pi = TruncLaurent::var(self.theta.field());
        let d = fg.add(&self.u, &fg.negate(&self.u.q_power(self.q))?)?;
        let r = fg.add(&d, &fg.negate(&pi)?)?;
        Ok(r.val_units())
    }
}

fn elliptic_coeffs(curve: &CurveDescriptor) -> Result<[crate::ffield::FqElem; 5]> {
    curve
        .coefficients()
        .copied()
        .ok_or_else(|| invalid("the genus-one pipeline needs an elliptic curve"))
}

/// The iterates `u_0 = pi`, `u_{n+1} = F(pi, u_n^q)` up to agreement at
/// absolute precision `prec`.
pub fn solve_v_iterates(fg: &FormalGroupData, prec: i64) -> Result<Vec<TruncLaurent>> {
    let k = fg.curve.base();
    let q = fg.curve.q();
    let pi = TruncLaurent::var(k);
    if pi.val_units() < Some(1) {
        return Err(invalid("u(Xi) must lie in the maximal ideal"));
    }
    let mut its = vec![pi.with_prec(prec)];
    loop {
        let last = its.last().unwrap();
        let next = fg.add(&pi, &last.q_power(q))?.with_prec(prec);
        let done = next.agreement(last)?.is_none_or(|a| a >= prec);
        its.push(next);
        if done {
            return Ok(its);
        }
        if its.len() > MAX_ITERATIONS {
            return Err(failed("the Frobenius iteration did not contract"));
        }
    }
}

/// Solves `V - V^(1) = Xi` in the formal group at infinity, to absolute
/// precision `prec` in `pi`.
pub fn solve_v(curve: &CurveDescriptor, prec: i64) -> Result<SolvedV> {
    elliptic_coeffs(curve)?;
    if prec < 8 {
        return Err(precision("the genus-one pipeline needs precision at least 8"));
    }
    let fg = formal_expansions(curve, prec as usize)?;
    let its = solve_v_iterates(&fg, prec)?;
    let u = its.last().unwrap().clone();
    let alpha = fg.t.compose(&u)?;
    let beta = fg.y.compose(&u)?;
    let sol = SolvedV {
        theta: fg.t.clone(),
        epsilon: fg.y.clone(),
        q: curve.q(),
        precision: prec,
        iterations: its.len() - 1,
        formal: fg,
        u,
        alpha,
        beta,
    };
    if sol.alpha.val_units() != Some(-2) || sol.beta.val_units() != Some(-3) {
        return Err(failed("V does not have poles of order 2 and 3 at infinity"));
    }
    if sol.residual_valuation()?.is_some() {
        return Err(failed("V - V^(1) differs from Xi within the working precision"));
    }
    Ok(sol)
}

/// The slope of the line through `V^(1)`, `-V` and `Xi`, by its three
/// expressions.
#[derive(Clone, Debug)]
pub struct Slope {
    pub m: TruncLaurent,
    pub valuation: i64,
    /// Smallest number of terms past the leading one on which two of the
    /// expressions agree.
    pub agreement: i64,
}

pub fn slope_m(sol: &SolvedV, min_agreement: i64) -> Result<Slope> {
    let k = sol.theta.field();
    let [a1, _, a3, _, _] = elliptic_coeffs(sol.curve())?;
    let q = sol.q;
    let (th, ep, al, be) = (&sol.theta, &sol.epsilon, &sol.alpha, &sol.beta);
    let (alq, beq) = (al.q_power(q), be.q_power(q));
    let tail = al.scale(a1).add(&TruncLaurent::constant(k, a3))?;
    let m1 = ep.sub(&beq)?.div(&th.sub(&alq)?)?;
    let m2 = ep.add(be)?.add(&tail)?.div(&th.sub(al)?)?;
    let m3 = beq.add(be)?.add(&tail)?.div(&alq.sub(al)?)?;
    let valuation = m1.val_units().ok_or_else(|| precision("slope vanishes to precision"))?;
    let mut agreement = i64::MAX;
    for (a, b) in [(&m1, &m2), (&m1, &m3), (&m2, &m3)] {
        let d = a.sub(b)?;
        if !d.is_zero() {
            return Err(failed("the three expressions for the slope disagree"));
        }
        agreement = agreement.min(d.prec_units().unwrap_or(i64::MAX) - valuation);
    }
    if valuation != -(q as i64) {
        return Err(failed(format!("slope has valuation {valuation}, expected -{q}")));
    }
    if agreement < min_agreement {
        return Err(precision(format!(
            "slope expressions agree on {agreement} terms, {min_agreement} required"
        )));
    }
    Ok(Slope { m: m1, valuation, agreement })
}

/// `xi = -(m theta - epsilon) / alpha`.
pub fn xi_of(sol: &SolvedV, m: &TruncLaurent) -> Result<TruncLaurent> {
    m.mul(&sol.theta)?.sub(&sol.epsilon)?.neg().div(&sol.alpha)
}

fn val(x: &TruncLaurent, what: &str) -> Result<i64> {
    x.val_units().ok_or_else(|| precision(format!("{what} vanishes to the working precision")))
}

/// Valuations entering `xi^{q/(q-1)} / (sigma* delta)(Xi) prod_i
/// xi^{q^i} / (sigma^{i*} f)(Xi)`, and the log-magnitude they give.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InfinityPeriod {
    pub v_xi: i64,
    /// `v(theta - alpha^q)`.
    pub v_sigma_delta: i64,
    /// `v(xi^{q^i} / (sigma^{i*} f)(Xi))` for `i = 1..=I`.
    pub factor_valuations: Vec<i64>,
    pub log_magnitude: LogQuantity,
}

pub fn infinity_period_valuation(sol: &SolvedV, m: &TruncLaurent, truncation: usize) -> Result<InfinityPeriod> {
    if truncation < 3 {
        return Err(invalid("product truncation must be at least 3"));
    }
    let q = sol.q;
    let qi = q as i64;
    let (th, ep, al) = (&sol.theta, &sol.epsilon, &sol.alpha);
    let xi = xi_of(sol, m)?;
    let v_xi = val(&xi, "xi")?;
    let v_sigma_delta = val(&th.sub(&al.q_power(q))?, "theta - alpha^q")?;
    let mut factor_valuations = Vec::with_capacity(truncation);
    let mut big_q = 1u64;
    for i in 1..=truncation {
        big_q = big_q
            .checked_mul(q)
            .ok_or_else(|| invalid("product truncation too large"))?;
        let num = ep
            .sub(&ep.q_power(big_q))?
            .sub(&m.q_power(big_q).mul(&th.sub(&th.q_power(big_q))?)?)?;
        let f_i = num.div(&th.sub(&al.q_power(big_q))?)?;
        let factor = xi.q_power(big_q).div(&f_i)?;
        let v = val(&factor, "product factor")?;
        if v != 0 {
            return Err(failed(format!("product factor {i} has valuation {v}")));
        }
        factor_valuations.push(v);
    }
    let v_total = rat(qi, qi - 1) * int(v_xi) - int(v_sigma_delta) + int(factor_valuations.iter().sum());
    Ok(InfinityPeriod {
        v_xi,
        v_sigma_delta,
        factor_valuations,
        log_magnitude: LogQuantity(-v_total),
    })
}

/// One Galois twist `eta != id`, indexed by `P_eta = V - eta(V)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EtaCorrection {
    /// `P_eta` as `(t, y)` field-element values.
    pub point: (u32, u32),
    pub place: String,
    /// `v(sigma* g_eta |_Xi)`.
    pub v_g: i64,
    /// `log |int omega-tilde^eta|_inf`.
    pub period: LogQuantity,
    /// `v(omega^eta)` at finite places, times `log q_v`.
    pub omega: LogQuantity,
    /// `v_{P_eta}(u-tilde_eta) log q_v`.
    pub correction: LogQuantity,
    /// `eta(V) - eta(V)^(1) = Xi` to the precision it was computed at.
    pub twist_consistent: bool,
}

fn same_point(a: &CurvePointGeneric, b: &CurvePointGeneric, k: &crate::ffield::FqField) -> Result<bool> {
    Ok(match (a.coordinates(k), b.coordinates(k)) {
        (None, None) => true,
        (Some((t1, y1)), Some((t2, y2))) => {
            let (dt, dy) = (t1.sub(&t2)?, y1.sub(&y2)?);
            // agreement must reach past the leading terms
            let past = |d: &TruncLaurent, x: &TruncLaurent| match (d.prec_units(), x.val_units()) {
                (None, _) => true,
                (Some(n), Some(w)) => n > w,
                (Some(_), None) => false,
            };
            dt.is_zero() && dy.is_zero() && past(&dt, &t2) && past(&dy, &y2)
        }
        _ => false,
    })
}

/// The twists `eta(V) = V - P` for the affine `P` in `C(F_q)`.
pub fn eta_corrections(sol: &SolvedV, infinity_term: LogQuantity) -> Result<Vec<EtaCorrection>> {
    let curve = sol.curve();
    let k = curve.base();
    let q = sol.q;
    let [a1, _, a3, _, _] = elliptic_coeffs(curve)?;
    let v = sol.point();
    let (alq, beq) = (sol.alpha.q_power(q), sol.beta.q_power(q));
    let (_, pts) = curve.affine_points(1)?;
    let mut out = Vec::with_capacity(pts.len());
    for (t0, y0) in pts {
        let p = CurvePointGeneric::Rational { t: t0, y: y0 };
        let w = group_law_sub(curve, &v, &p)?;
        let (wa, wb) = w
            .coordinates(k)
            .ok_or_else(|| failed("a twist of V is the neutral element"))?;
        let (waq, wbq) = (wa.q_power(q), wb.q_power(q));
        let first = sol.epsilon.sub(&wbq)?.div(&sol.theta.sub(&waq)?)?;
        let second = wbq
            .add(&beq)?
            .add(&alq.scale(a1))?
            .add(&TruncLaurent::constant(k, a3))?
            .div(&waq.sub(&alq)?)?;
        let g = first.sub(&second)?;
        let v_g = val(&g, "sigma* g_eta")?;
        if v_g != -(q as i64) {
            return Err(failed(format!("sigma* g_eta has valuation {v_g}, expected -{q}")));
        }
        let twist = group_law_sub(curve, &w, &w.frobenius(q))?;
        let twist_consistent = same_point(&twist, &sol.xi(), k)?;
        let place = Place::from_point(curve, k, (t0, y0))?;
        let d = int(place.degree() as i64);
        let correction = LogQuantity(d * int(valuation_at(&place, place.uniformizer())?));
        out.push(EtaCorrection {
            point: (t0.value(), y0.value()),
            place: place.label(),
            v_g,
            period: LogQuantity(int(-v_g)) + infinity_term,
            omega: LogQuantity::zero(),
            correction,
            twist_consistent,
        });
    }
    Ok(out)
}

pub const LINE_ZETA: &str = "regularization";
pub const LINE_INFINITY: &str = "infinity";
pub const LINE_PERIODS: &str = "eta periods";
pub const LINE_CORRECTIONS: &str = "eta corrections";

/// Everything the cancellation is assembled from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Genus1Report {
    pub curve: String,
    pub coefficients: [u32; 5],
    pub q: u64,
    pub points: u64,
    pub precision: i64,
    pub product_truncation: usize,
    pub formal_parameter: String,
    pub iterations: usize,
    pub v_alpha: i64,
    pub v_beta: i64,
    pub v_m: i64,
    pub slope_agreement: i64,
    pub infinity: InfinityPeriod,
    pub eta: Vec<EtaCorrection>,
    pub ledger: RegularizedLedger,
}

impl Genus1Report {
    pub fn holds(&self) -> bool {
        self.ledger.total.is_zero()
    }

    pub fn total(&self) -> LogQuantity {
        self.ledger.total
    }
}

/// Agreement required of the slope expressions at precision `prec`.
pub fn required_slope_agreement(prec: i64) -> i64 {
    prec * 5 / 8
}

/// The full pipeline and the four-line ledger.
pub fn final_cancellation(curve: &CurveDescriptor, prec: i64, truncation: usize) -> Result<Genus1Report> {
    let a = elliptic_coeffs(curve)?;
    let q = curve.q();
    let n = curve.count_points(1)?;
    let sol = solve_v(curve, prec)?;
    let slope = slope_m(&sol, required_slope_agreement(prec))?;
    let xi = xi_of(&sol, &slope.m)?;
    if val(&xi, "xi")? != -(q as i64) {
        return Err(failed("xi does not have valuation -q"));
    }
    let inf = infinity_period_valuation(&sol, &slope.m, truncation)?;
    let eta = eta_corrections(&sol, inf.log_magnitude)?;
    if eta.len() as u64 + 1 != n {
        return Err(failed("twists are not in bijection with C(F_q)"));
    }
    if let Some(e) = eta.iter().find(|e| !e.twist_consistent) {
        return Err(failed(format!("eta(V) - eta(V)^(1) != Xi for P = {}", e.place)));
    }
    let inv_n = LogQuantity(rat(1, n as i64));
    let scale = |x: LogQuantity| LogQuantity(x.0 * inv_n.0);
    let zeta = ZetaClosedForm::elliptic(q, n);
    let mut ledger = RegularizedLedger::default();
    ledger.push(LINE_ZETA, -z_inf_trivial_at_0(&zeta)?);
    ledger.push(LINE_INFINITY, scale(inf.log_magnitude));
    ledger.push(LINE_PERIODS, scale(eta.iter().map(|e| e.period + e.omega).sum()));
    ledger.push(LINE_CORRECTIONS, -scale(eta.iter().map(|e| e.correction).sum()));
    let report = Genus1Report {
        curve: curve.label(),
        coefficients: a.map(|x| x.value()),
        q,
        points: n,
        precision: prec,
        product_truncation: truncation,
        formal_parameter: FORMAL_PARAMETER.into(),
        iterations: sol.iterations,
        v_alpha: val(&sol.alpha, "alpha")?,
        v_beta: val(&sol.beta, "beta")?,
        v_m: slope.valuation,
        slope_agreement: slope.agreement,
        infinity: inf,
        eta,
        ledger,
    };
    if !report.holds() {
        return Err(failed(format!("regularized sum is {}, not 0", report.total())));
    }
    Ok(report)
}

/// The four closed-form ledger lines for `q` and `N = #C(F_q)`.
pub fn symbolic_four_lines(q: i64, n: i64) -> [Rational; 4] {
    let qq = rat(q, q - 1);
    [
        rat(q + n - 1, n) - qq,
        (qq - int(q)) / int(n),
        rat(n - 1, n) * qq,
        -rat(n - 1, n),
    ]
}

/// `N` in the Hasse interval `|N - q - 1| <= 2 sqrt q`, `N >= 1`.
pub fn hasse_range(q: i64) -> impl Iterator<Item = i64> {
    (1..=2 * q + 2).filter(move |&n| (n - q - 1) * (n - q - 1) <= 4 * q)
}
