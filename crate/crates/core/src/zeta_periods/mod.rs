//! Zeta closed forms, their logarithmic derivatives, the regularized
//! ledger of period logarithms, and the Carlitz product formula.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::drinfeld::carlitz_period;
use crate::ffield::FqField;
use crate::funcfield::{enumerate_places, valuation_at, CurveDescriptor, Place};
use crate::rational::{int, rat, Rational};
use crate::series::{min_root_valuation, two_stage_valuation, CvApprox, DeRhamSeries, TwoStageValue};
use crate::{failed, invalid, precision, Result};

/// The real number `r log q`, kept as the exact rational `r`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogQuantity(#[serde(with = "crate::rational::serde_str")] pub Rational);

impl LogQuantity {
    pub fn zero() -> LogQuantity {
        LogQuantity(Rational::zero())
    }

    pub fn coefficient(&self) -> Rational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl Add for LogQuantity {
    type Output = LogQuantity;
    fn add(self, o: LogQuantity) -> LogQuantity {
        LogQuantity(self.0 + o.0)
    }
}

impl Sub for LogQuantity {
    type Output = LogQuantity;
    fn sub(self, o: LogQuantity) -> LogQuantity {
        LogQuantity(self.0 - o.0)
    }
}

impl Neg for LogQuantity {
    type Output = LogQuantity;
    fn neg(self) -> LogQuantity {
        LogQuantity(-self.0)
    }
}

impl std::iter::Sum for LogQuantity {
    fn sum<I: Iterator<Item = LogQuantity>>(it: I) -> LogQuantity {
        it.fold(LogQuantity::zero(), |a, b| a + b)
    }
}

impl fmt::Display for LogQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*log q", crate::rational::to_string(&self.0))
    }
}

/// Polynomial in one variable with rational coefficients, constant term
/// first.
#[derive(Clone, Debug, PartialEq)]
struct RatPoly(Vec<Rational>);

impl RatPoly {
    fn from_ints(c: &[i64]) -> RatPoly {
        RatPoly(c.iter().map(|&x| int(x)).collect())
    }

    fn eval(&self, x: Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, &c| acc * x + c)
    }

    fn derivative(&self) -> RatPoly {
        RatPoly(self.0.iter().enumerate().skip(1).map(|(i, &c)| c * int(i as i64)).collect())
    }

    fn mul(&self, o: &RatPoly) -> RatPoly {
        if self.0.is_empty() || o.0.is_empty() {
            return RatPoly(Vec::new());
        }
        let mut out = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly(out)
    }

    fn sub(&self, o: &RatPoly) -> RatPoly {
        let n = self.0.len().max(o.0.len());
        RatPoly(
            (0..n)
                .map(|i| self.0.get(i).copied().unwrap_or_default() - o.0.get(i).copied().unwrap_or_default())
                .collect(),
        )
    }
}

/// `num / den` as a rational function.
#[derive(Clone, Debug)]
struct RatFunction {
    num: RatPoly,
    den: RatPoly,
}

impl RatFunction {
    /// Quotient rule.
    fn derivative(&self) -> RatFunction {
        RatFunction {
            num: self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative())),
            den: self.den.mul(&self.den),
        }
    }

    fn eval(&self, x: Rational) -> Result<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(invalid("pole of a rational function"));
        }
        Ok(self.num.eval(x) / d)
    }
}

/// `zeta_A` as a rational function of `T = q^{-s}` with integer
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaClosedForm {
    pub q: u64,
    pub numerator: Vec<i64>,
    pub denominator: Vec<i64>,
}

impl ZetaClosedForm {
    /// `1 / (1 - qT)`.
    pub fn projective_line(q: u64) -> ZetaClosedForm {
        ZetaClosedForm {
            q,
            numerator: vec![1],
            denominator: vec![1, -(q as i64)],
        }
    }

    /// `(1 - (q+1-N) T + q T^2) / (1 - qT)`.
    pub fn elliptic(q: u64, n: u64) -> ZetaClosedForm {
        let q = q as i64;
        ZetaClosedForm {
            q: q as u64,
            numerator: vec![1, -(q + 1 - n as i64), q],
            denominator: vec![1, -q],
        }
    }

    pub fn for_curve(curve: &CurveDescriptor) -> Result<ZetaClosedForm> {
        if curve.is_elliptic() {
            Ok(Self::elliptic(curve.q(), curve.count_points(1)?))
        } else {
            Ok(Self::projective_line(curve.q()))
        }
    }

    fn as_function(&self) -> RatFunction {
        RatFunction {
            num: RatPoly::from_ints(&self.numerator),
            den: RatPoly::from_ints(&self.denominator),
        }
    }

    /// Power-series coefficients through `T^d`.
    pub fn series(&self, d: usize) -> Vec<Rational> {
        let num = RatPoly::from_ints(&self.numerator).0;
        let den = RatPoly::from_ints(&self.denominator).0;
        let mut out: Vec<Rational> = Vec::with_capacity(d + 1);
        for k in 0..=d {
            let mut c = num.get(k).copied().unwrap_or_default();
            for j in 1..=k.min(den.len() - 1) {
                c -= den[j] * out[k - j];
            }
            out.push(c / den[0]);
        }
        out
    }

    pub fn display(&self) -> String {
        let poly = |c: &[i64]| {
            let mut parts = Vec::new();
            for (i, &a) in c.iter().enumerate() {
                let mono = match i {
                    0 => String::new(),
                    1 => "T".into(),
                    _ => format!("T^{i}"),
                };
                let term = match (a, i) {
                    (_, 0) => a.to_string(),
                    (1, _) => mono,
                    (-1, _) => format!("-{mono}"),
                    _ => format!("{a}*{mono}"),
                };
                parts.push(term);
            }
            parts.join(" + ").replace("+ -", "- ")
        };
        format!("({}) / ({})", poly(&self.numerator), poly(&self.denominator))
    }
}

/// `Z_v(1,1)`: the logarithmic derivative of `L_v = (1 - X)^{-1}` in
/// `X = q_v^{-s}`, that is `X L'(X) / L(X)`, at `X = 1/q_v`.
pub fn z_v_trivial_at_1(v: &Place) -> Result<Rational> {
    if v.is_infinite() {
        return Err(invalid("local zeta term requested at the infinite place"));
    }
    let qv = v.residue_size() as i64;
    let l = RatFunction {
        num: RatPoly::from_ints(&[1]),
        den: RatPoly::from_ints(&[1, -1]),
    };
    let x = rat(1, qv);
    Ok(x * l.derivative().eval(x)? / l.eval(x)?)
}

/// `zeta_A'(0) / zeta_A(0)`, using `d/ds = -T log q d/dT` at `T = 1`.
pub fn z_inf_trivial_at_0(zeta: &ZetaClosedForm) -> Result<LogQuantity> {
    let f = zeta.as_function();
    let one = Rational::one();
    let (n0, d0) = (f.num.eval(one), f.den.eval(one));
    if n0.is_zero() || d0.is_zero() {
        return Err(invalid("zeta function has a zero or pole at s = 0"));
    }
    let value = f.eval(one)?;
    let deriv = f.derivative().eval(one)?;
    Ok(LogQuantity(-deriv / value))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub label: String,
    pub coefficient: LogQuantity,
}

/// Labelled contributions to a sum of logarithms, with their exact total.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularizedLedger {
    pub entries: Vec<LedgerEntry>,
    pub total: LogQuantity,
}

impl RegularizedLedger {
    pub fn push(&mut self, label: impl Into<String>, c: LogQuantity) {
        self.entries.push(LedgerEntry {
            label: label.into(),
            coefficient: c,
        });
        self.total = self.entries.iter().map(|e| e.coefficient).sum();
    }

    pub fn get(&self, label: &str) -> Option<LogQuantity> {
        self.entries.iter().find(|e| e.label == label).map(|e| e.coefficient)
    }
}

pub const REGULARIZATION: &str = "regularization";

/// The sum over finite places for the trivial class function:
/// `-Z^inf(1,0)` plus the supplied finitely many nonzero deviations.
pub fn regularize_constant(deviations: &[(String, Rational)], zeta: &ZetaClosedForm) -> Result<RegularizedLedger> {
    let mut l = RegularizedLedger::default();
    l.push(REGULARIZATION, -z_inf_trivial_at_0(zeta)?);
    for (label, x) in deviations {
        l.push(label.clone(), LogQuantity(*x));
    }
    Ok(l)
}

/// The place-by-place check of the `v`-adic Carlitz period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceCheck {
    pub place: String,
    pub degree: u32,
    pub residue_size: u64,
    pub vhat: i64,
    #[serde(with = "crate::rational::serde_str")]
    pub v: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub z_v: Rational,
    /// `log |<omega,u>_v|_v = -v d_v log q`.
    pub log_magnitude: LogQuantity,
    /// `log |<omega,u>_v|_v + Z_v(1,1) log q_v`.
    pub deviation: LogQuantity,
}

/// Two-stage valuation of `(z - zeta) t_+` at a finite place of
/// `F_q(theta)`, with the coefficients `t_i` of `t_+` known only through
/// their Newton-polygon valuations: `t_0^{q_v-1} = -zeta` and
/// `t_i^{q_v} + zeta t_i = t_{i-1}`; the ladder is cut after `rungs` terms.
pub fn carlitz_v_adic(v: &Place, rungs: usize) -> Result<TwoStageValue> {
    if v.is_infinite() {
        return Err(invalid("v-adic period requested at the infinite place"));
    }
    let qv = v.residue_size() as u32;
    let w_zeta = int(valuation_at(v, v.uniformizer())?);
    let mut w = min_root_valuation(&[(0, Some(w_zeta)), (qv - 1, Some(int(0)))])?;
    let mut terms = Vec::with_capacity(rungs);
    for i in 0..rungs {
        if i > 0 {
            w = min_root_valuation(&[(0, Some(w)), (1, Some(w_zeta)), (qv, Some(int(0)))])?;
        }
        // valuation of t_i zeta^i in the evaluation at z = zeta
        terms.push(w + w_zeta * int(i as i64));
    }
    let tail = Some(w_zeta * int(rungs as i64));
    let t_plus = DeRhamSeries {
        shift: 0,
        coeffs: vec![CvApprox::Dominated { terms, tail }],
        truncated: true,
    };
    let unit = DeRhamSeries::generator_power(1, v.curve().base());
    two_stage_valuation(&unit.mul(&t_plus)?)
}

/// The full Carlitz check for one `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarlitzReport {
    pub q: u64,
    pub precision: i64,
    /// Valuation of `eta^q prod (1 - theta^{1-q^i})`.
    #[serde(with = "crate::rational::serde_str")]
    pub inverse_period_valuation: Rational,
    /// Exponent `e` with `|eta^q prod(...)| = q^e`.
    #[serde(with = "crate::rational::serde_str")]
    pub magnitude_exponent: Rational,
    pub zeta: ZetaClosedForm,
    pub places: Vec<PlaceCheck>,
    pub ledger: RegularizedLedger,
}

pub const INFINITY: &str = "infinity";
pub const DISCRIMINANT: &str = "discriminant";
pub const ARTIN_MEASURE: &str = "artin-measure";

impl CarlitzReport {
    pub fn holds(&self) -> bool {
        self.ledger.total.is_zero()
    }

    pub fn infinity_term(&self) -> LogQuantity {
        self.ledger.get(INFINITY).unwrap_or_default()
    }
}

/// `(v, -v)` for `eta^q prod_{i>=1} (1 - theta^{1-q^i})`.
pub fn carlitz_infinity_valuation(base: &FqField, prec: i64) -> Result<Rational> {
    let p = carlitz_period(base, prec)?;
    match p.inverse_period.valuation() {
        Some(v) => Ok(v),
        None => Err(precision("Carlitz period is zero to the working precision")),
    }
}

/// `log|<omega,u>_inf| + sum_v log|<omega,u>_v|`, regularized; asserts the
/// per-place values agree with `Z_v(1,1)`.
pub fn carlitz_product_formula_report(q: u64, prec: i64, max_place_degree: u32) -> Result<CarlitzReport> {
    let base = FqField::with_order(q)?;
    let line = CurveDescriptor::projective_line(&base);
    let v_inf = carlitz_infinity_valuation(&base, prec)?;
    // <omega,u>_inf is the inverse of eta^q prod(...)
    let inf_term = LogQuantity(v_inf);
    let zeta = ZetaClosedForm::projective_line(q);
    let rungs = prec.clamp(0, 16) as usize;
    let mut places = Vec::new();
    let mut deviations = Vec::new();
    for v in enumerate_places(&line, max_place_degree)? {
        if v.is_infinite() {
            continue;
        }
        // keep q_v^rungs inside i64 rationals
        let cap = (40.0 / (v.residue_size() as f64).log2()).floor() as usize;
        let tv = carlitz_v_adic(&v, rungs.min(cap))?;
        let z_v = z_v_trivial_at_1(&v)?;
        if tv.vhat != 1 || tv.v != z_v {
            return Err(failed(format!(
                "v-adic period at {} has two-stage valuation ({}, {}), expected (1, {})",
                v.label(),
                tv.vhat,
                tv.v,
                z_v
            )));
        }
        let d = int(v.degree() as i64);
        let log_magnitude = LogQuantity(-tv.v * d);
        let deviation = log_magnitude + LogQuantity(z_v * d);
        if !deviation.is_zero() {
            deviations.push((format!("deviation {}", v.label()), deviation.0));
        }
        places.push(PlaceCheck {
            place: v.label(),
            degree: v.degree(),
            residue_size: v.residue_size(),
            vhat: tv.vhat,
            v: tv.v,
            z_v,
            log_magnitude,
            deviation,
        });
    }
    let reg = regularize_constant(&deviations, &zeta)?;
    let mut ledger = RegularizedLedger::default();
    ledger.push(INFINITY, inf_term);
    for e in reg.entries {
        ledger.push(e.label, e.coefficient);
    }
    ledger.push(ARTIN_MEASURE, LogQuantity::zero());
    ledger.push(DISCRIMINANT, LogQuantity::zero());
    Ok(CarlitzReport {
        q,
        precision: prec,
        inverse_period_valuation: v_inf,
        magnitude_exponent: -v_inf,
        zeta,
        places,
        ledger,
    })
}

/// `prod_{v finite, d_v <= d} (1 - T^{d_v})^{-1}` through `T^d`.
pub fn euler_product_series(curve: &CurveDescriptor, d: u32) -> Result<Vec<Rational>> {
    let mut out = vec![Rational::zero(); d as usize + 1];
    out[0] = Rational::one();
    for v in enumerate_places(curve, d)? {
        if v.is_infinite() {
            continue;
        }
        // multiply by 1 + T^k + T^{2k} + ...
        let k = v.degree() as usize;
        for i in k..=d as usize {
            let add = out[i - k];
            out[i] += add;
        }
    }
    Ok(out)
}

/// Whether the Euler product matches the closed form through `T^d`.
pub fn euler_product_check(curve: &CurveDescriptor, d: u32) -> Result<bool> {
    let zeta = ZetaClosedForm::for_curve(curve)?;
    Ok(euler_product_series(curve, d)? == zeta.series(d as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    fn line(q: u64) -> CurveDescriptor {
        CurveDescriptor::projective_line(&FqField::with_order(q).unwrap())
    }

    #[test]
    fn local_zeta_term() {
        for (q, want) in [(2, rat(1, 1)), (3, rat(1, 2)), (4, rat(1, 3))] {
            let c = line(q);
            let v = enumerate_places(&c, 1).unwrap().into_iter().find(|p| !p.is_infinite()).unwrap();
            assert_eq!(z_v_trivial_at_1(&v).unwrap(), want);
        }
        assert!(z_v_trivial_at_1(&Place::infinite(&line(2))).is_err());
    }

    #[test]
    fn log_derivatives() {
        for q in 2..=9u64 {
            let p1 = z_inf_trivial_at_0(&ZetaClosedForm::projective_line(q)).unwrap();
            assert_eq!(p1.0, rat(q as i64, q as i64 - 1));
            for n in 1..=(2 * q + 1) {
                let e = z_inf_trivial_at_0(&ZetaClosedForm::elliptic(q, n)).unwrap();
                let (qi, ni) = (q as i64, n as i64);
                assert_eq!(e.0, rat(1 - ni - qi, ni) + rat(qi, qi - 1));
            }
        }
        // the elliptic form with numerator 1 is the projective line
        let mut z = ZetaClosedForm::elliptic(5, 6);
        z.numerator = vec![1];
        assert_eq!(z_inf_trivial_at_0(&z).unwrap(), z_inf_trivial_at_0(&ZetaClosedForm::projective_line(5)).unwrap());
    }

    #[test]
    fn regularization_examples() {
        let z = ZetaClosedForm::projective_line(3);
        let l = regularize_constant(&[], &z).unwrap();
        assert_eq!(l.total.0, rat(-3, 2));
        let l = regularize_constant(&[("deviation (t)".into(), int(1))], &z).unwrap();
        assert_eq!(l.total.0, rat(-1, 2));
        let z = ZetaClosedForm::elliptic(2, 3);
        assert_eq!(regularize_constant(&[], &z).unwrap().total.0, rat(-2, 3));
    }

    #[test]
    fn v_adic_ladder() {
        for q in [2u64, 3, 4] {
            for v in enumerate_places(&line(q), 2).unwrap().into_iter().filter(|p| !p.is_infinite()) {
                let tv = carlitz_v_adic(&v, 8).unwrap();
                assert_eq!(tv.vhat, 1);
                assert_eq!(tv.v, rat(1, v.residue_size() as i64 - 1));
            }
        }
        let v = enumerate_places(&line(2), 1).unwrap().remove(1);
        assert!(carlitz_v_adic(&v, 0).is_err());
    }

    #[test]
    fn carlitz_reports() {
        for (q, inf) in [(2u64, rat(2, 1)), (3, rat(3, 2)), (4, rat(4, 3))] {
            let r = carlitz_product_formula_report(q, 64, 2).unwrap();
            assert!(r.holds());
            assert_eq!(r.infinity_term().0, inf);
            assert_eq!(r.magnitude_exponent, -inf);
            assert_eq!(r.ledger.get(REGULARIZATION).unwrap().0, -inf);
        }
        assert_eq!(carlitz_product_formula_report(4, 64, 2).unwrap().places.len(), 4 + 6);
        assert!(matches!(
            carlitz_product_formula_report(2, 0, 1),
            Err(Error::PrecisionInsufficient(_))
        ));
    }

    #[test]
    fn closed_form_series() {
        assert_eq!(ZetaClosedForm::projective_line(3).series(3), vec![int(1), int(3), int(9), int(27)]);
        let z = ZetaClosedForm::elliptic(2, 3);
        assert_eq!(z.display(), "(1 + 0*T + 2*T^2) / (1 - 2*T)");
    }

    #[test]
    fn euler_products() {
        let k2 = FqField::with_order(2).unwrap();
        let k3 = FqField::with_order(3).unwrap();
        let curves = [
            line(2),
            line(3),
            CurveDescriptor::elliptic_from_ints(&k2, [0, 0, 1, 0, 0]).unwrap(),
            CurveDescriptor::elliptic_from_ints(&k3, [0, 0, 0, 2, 1]).unwrap(),
        ];
        for c in &curves {
            assert!(euler_product_check(c, 4).unwrap(), "{}", c.label());
        }
    }
}
