//! The `ffperiods` command line: argument parsing, report envelopes and
//! exit codes.

mod expr;

pub use expr::parse_element;

use std::ffi::OsString;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::ffield::FqField;
use crate::funcfield::{enumerate_places, product_formula_check, CurveDescriptor, FieldElement};
use crate::genus1::final_cancellation;
use crate::rational::{to_f64, to_string, Rational};
use crate::zeta_periods::{
    carlitz_product_formula_report, euler_product_series, z_inf_trivial_at_0, RegularizedLedger,
    ZetaClosedForm,
};
use crate::{invalid, Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;

/// Largest residue field enumerated by `carlitz` and `zeta`.
const MAX_RESIDUE_FIELD: u64 = 1 << 16;

#[derive(Parser, Debug)]
#[command(
    name = "ffperiods",
    version,
    about = "Exact period valuations and regularized product formulas over function fields",
    after_help = "Curves are `p1` or `ell:a1,a2,a3,a4,a6` for y^2 + a1 t y + a3 y = t^3 + a2 t^2 + a4 t + a6.\n\
                  An integer coefficient c is read in base p: its digits are the coordinates of\n\
                  an element of F_q on the powers of the generator, so over a prime field it is c mod p.\n\
                  Exit codes: 0 pass, 1 verification failure, 2 input error, 3 precision insufficient."
)]
pub struct Cli {
    /// Emit a JSON report.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also show decimal approximations (display only).
    #[arg(long, global = true)]
    pub float: bool,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sum of d_v v(f) over all places of a function field.
    ProductFormula(ProductFormulaArgs),
    /// The Carlitz period at infinity and at finite places, regularized.
    Carlitz(CarlitzArgs),
    /// The period ledger of an elliptic curve with one point at infinity.
    Genus1(Genus1Args),
    /// Zeta function of the ring of functions regular away from infinity.
    Zeta(ZetaArgs),
}

#[derive(Args, Debug)]
pub struct ProductFormulaArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value = "p1")]
    pub curve: String,
    /// Element such as "(t^2+1)/t" or "y/t".
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub elem: Option<String>,
    /// Check this many random nonzero elements.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub max_deg: usize,
}

#[derive(Args, Debug)]
pub struct CarlitzArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long, env = "FFPERIODS_PREC_DEFAULT", default_value_t = 64)]
    pub prec: i64,
    #[arg(long, default_value_t = 2)]
    pub max_place_degree: u32,
}

#[derive(Args, Debug)]
pub struct Genus1Args {
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub a1: i64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub a2: i64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub a3: i64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub a4: i64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub a6: i64,
    #[arg(long, env = "FFPERIODS_PREC_DEFAULT", default_value_t = 64)]
    pub prec: i64,
    #[arg(long, default_value_t = 3)]
    pub product_truncation: usize,
}

#[derive(Args, Debug)]
pub struct ZetaArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value = "p1")]
    pub curve: String,
    /// `closed-form`, or `euler-product D` to compare through T^D.
    #[arg(long, num_args = 1..=2, value_names = ["MODE", "D"])]
    pub eval: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    PrecisionInsufficient,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => EXIT_PASS,
            Status::Fail => EXIT_FAIL,
            Status::PrecisionInsufficient => EXIT_PRECISION,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnvelopeLine {
    pub label: String,
    pub coefficient: String,
}

/// The machine-readable report of one command.
#[derive(Clone, Debug, Serialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub input: Value,
    pub ledger: Vec<EnvelopeLine>,
    pub total: Option<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

fn lines_of(l: &RegularizedLedger) -> Vec<EnvelopeLine> {
    l.entries
        .iter()
        .map(|e| EnvelopeLine {
            label: e.label.clone(),
            coefficient: to_string(&e.coefficient.0),
        })
        .collect()
}

fn field(q: u64) -> Result<FqField> {
    FqField::with_order(q).map_err(|e| invalid(format!("q = {q}: {e}")))
}

/// `p1` or `ell:a1,a2,a3,a4,a6`.
pub fn parse_curve(k: &FqField, spec: &str) -> Result<CurveDescriptor> {
    let spec = spec.trim();
    if spec == "p1" {
        return Ok(CurveDescriptor::projective_line(k));
    }
    let Some(rest) = spec.strip_prefix("ell:") else {
        return Err(invalid(format!("curve '{spec}' is neither 'p1' nor 'ell:a1,a2,a3,a4,a6'")));
    };
    let a: Vec<i64> = rest
        .split(',')
        .map(|x| x.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| invalid(format!("curve coefficients '{rest}' are not integers")))?;
    let a: [i64; 5] = a
        .try_into()
        .map_err(|_| invalid("an elliptic curve needs exactly five coefficients"))?;
    CurveDescriptor::elliptic_from_ints(k, a)
}

fn failure(command: &str, input: Value, e: &Error) -> Option<ReportEnvelope> {
    let status = match e {
        Error::VerificationFailed(_) => Status::Fail,
        Error::PrecisionInsufficient(_) => Status::PrecisionInsufficient,
        _ => return None,
    };
    Some(ReportEnvelope {
        command: command.into(),
        input,
        ledger: Vec::new(),
        total: None,
        status,
        message: Some(e.to_string()),
        details: Value::Null,
        wall_time_ms: None,
    })
}

fn product_formula(a: &ProductFormulaArgs) -> Result<ReportEnvelope> {
    let k = field(a.q)?;
    let curve = parse_curve(&k, &a.curve)?;
    let input = json!({"q": a.q, "curve": curve.label(), "elem": a.elem, "random": a.random, "seed": a.seed});
    let elems: Vec<FieldElement> = match (&a.elem, a.random) {
        (Some(s), _) => vec![parse_element(&curve, s)?],
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            (0..n).map(|_| FieldElement::random(&curve, &mut rng, a.max_deg)).collect()
        }
        (None, None) => return Err(invalid("give --elem or --random")),
    };
    let mut ledger = Vec::new();
    let mut reports = Vec::new();
    let mut total = Rational::from(0);
    for f in &elems {
        let r = product_formula_check(f)?;
        if a.elem.is_some() {
            // log |f|_v = -d_v v(f) log q
            for e in &r.entries {
                ledger.push(EnvelopeLine {
                    label: e.place.clone(),
                    coefficient: to_string(&Rational::from(-(e.degree as i64) * e.valuation)),
                });
            }
        } else {
            ledger.push(EnvelopeLine {
                label: r.element.clone(),
                coefficient: to_string(&Rational::from(-r.total)),
            });
        }
        total += Rational::from(r.total.abs());
        reports.push(serde_json::to_value(&r).expect("report serializes"));
    }
    let status = if total == Rational::from(0) { Status::Pass } else { Status::Fail };
    Ok(ReportEnvelope {
        command: "product-formula".into(),
        input,
        ledger,
        total: Some(to_string(&total)),
        status,
        message: None,
        details: Value::Array(reports),
        wall_time_ms: None,
    })
}

fn check_enumeration(q: u64, d: u32) -> Result<()> {
    if q.checked_pow(d).is_none_or(|s| s > MAX_RESIDUE_FIELD) {
        return Err(Error::BoundExceeded(format!("places of degree {d} over F_{q} are too many to enumerate")));
    }
    Ok(())
}

fn carlitz(a: &CarlitzArgs) -> Result<ReportEnvelope> {
    field(a.q)?;
    check_enumeration(a.q, a.max_place_degree)?;
    let r = carlitz_product_formula_report(a.q, a.prec, a.max_place_degree)?;
    let status = if r.holds() { Status::Pass } else { Status::Fail };
    Ok(ReportEnvelope {
        command: "carlitz".into(),
        input: json!({"q": a.q, "prec": a.prec, "max_place_degree": a.max_place_degree}),
        ledger: lines_of(&r.ledger),
        total: Some(to_string(&r.ledger.total.0)),
        status,
        message: None,
        details: serde_json::to_value(&r).expect("report serializes"),
        wall_time_ms: None,
    })
}

fn genus1(a: &Genus1Args) -> Result<ReportEnvelope> {
    let k = field(a.q)?;
    let curve = CurveDescriptor::elliptic_from_ints(&k, [a.a1, a.a2, a.a3, a.a4, a.a6])?;
    let r = final_cancellation(&curve, a.prec, a.product_truncation)?;
    Ok(ReportEnvelope {
        command: "genus1".into(),
        input: json!({"q": a.q, "a": [a.a1, a.a2, a.a3, a.a4, a.a6], "prec": a.prec, "product_truncation": a.product_truncation}),
        ledger: lines_of(&r.ledger),
        total: Some(to_string(&r.total().0)),
        status: if r.holds() { Status::Pass } else { Status::Fail },
        message: None,
        details: serde_json::to_value(&r).expect("report serializes"),
        wall_time_ms: None,
    })
}

fn zeta(a: &ZetaArgs) -> Result<ReportEnvelope> {
    let k = field(a.q)?;
    let curve = parse_curve(&k, &a.curve)?;
    let euler = match a.eval.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        [] | ["closed-form"] => None,
        ["euler-product", d] => Some(
            d.parse::<u32>()
                .ok()
                .filter(|&d| d <= 4)
                .ok_or_else(|| invalid(format!("Euler-product degree '{d}' must be an integer in 0..=4")))?,
        ),
        other => return Err(invalid(format!("unknown --eval {}", other.join(" ")))),
    };
    let z = ZetaClosedForm::for_curve(&curve)?;
    let logderiv = z_inf_trivial_at_0(&z)?;
    let mut details = json!({
        "closed_form": z.display(),
        "zeta": z,
        "logderiv": to_string(&logderiv.0),
    });
    let mut status = Status::Pass;
    if let Some(d) = euler {
        check_enumeration(a.q, d)?;
        enumerate_places(&curve, d)?;
        let lhs = euler_product_series(&curve, d)?;
        let rhs = z.series(d as usize);
        if lhs != rhs {
            status = Status::Fail;
        }
        details["euler_product"] = json!({
            "degree": d,
            "euler": lhs.iter().map(to_string).collect::<Vec<_>>(),
            "closed_form": rhs.iter().map(to_string).collect::<Vec<_>>(),
            "agree": lhs == rhs,
        });
    }
    Ok(ReportEnvelope {
        command: "zeta".into(),
        input: json!({"q": a.q, "curve": curve.label(), "eval": a.eval}),
        ledger: vec![EnvelopeLine {
            label: "zeta'(0)/zeta(0)".into(),
            coefficient: to_string(&logderiv.0),
        }],
        total: None,
        status,
        message: None,
        details,
        wall_time_ms: None,
    })
}

fn fmt_rat(s: &str, float: bool) -> String {
    match (float, crate::rational::parse(s)) {
        (true, Some(r)) => format!("{s} (~{:.6})", to_f64(&r)),
        _ => s.to_string(),
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Plain-text rendering of an envelope.
pub fn render_text(env: &ReportEnvelope, float: bool) -> String {
    let mut out = format!("{} {}\n", env.command, env.input);
    if let Some(m) = &env.message {
        out += &format!("  message: {m}\n");
    }
    let command = if env.details.is_null() { "" } else { env.command.as_str() };
    match command {
        "genus1" => {
            let d = &env.details;
            out += &format!(
                "  N = {}, parameter {}, iterations {}\n  v(alpha) = {}, v(beta) = {}, v(m) = {} (expressions agree on {} terms)\n",
                plain(&d["points"]), plain(&d["formal_parameter"]), plain(&d["iterations"]), plain(&d["v_alpha"]), plain(&d["v_beta"]), plain(&d["v_m"]), plain(&d["slope_agreement"])
            );
            let inf = &d["infinity"];
            out += &format!(
                "  v(xi) = {}, v(theta - alpha^q) = {}, factor valuations {}, log|period|_inf = {} log q\n",
                plain(&inf["v_xi"]), plain(&inf["v_sigma_delta"]), plain(&inf["factor_valuations"]), plain(&inf["log_magnitude"])
            );
            for e in d["eta"].as_array().into_iter().flatten() {
                out += &format!(
                    "  eta at P = {}: v(sigma* g) = {}, period {} log q, correction {} log q\n",
                    plain(&e["place"]), plain(&e["v_g"]), plain(&e["period"]), plain(&e["correction"])
                );
            }
        }
        "carlitz" => {
            let d = &env.details;
            out += &format!("  magnitude exponent of the inverse period: {}\n", plain(&d["magnitude_exponent"]));
            for p in d["places"].as_array().into_iter().flatten() {
                out += &format!("  place {} (q_v = {}): (vhat, v) = ({}, {}), Z_v = {}\n", plain(&p["place"]), plain(&p["residue_size"]), plain(&p["vhat"]), plain(&p["v"]), plain(&p["z_v"]));
            }
        }
        "zeta" => {
            let d = &env.details;
            out += &format!("  zeta_A = {}\n", d["closed_form"].as_str().unwrap_or_default());
            if let Some(e) = d.get("euler_product") {
                out += &format!("  Euler product through T^{}: {}\n", plain(&e["degree"]), if e["agree"] == json!(true) { "agrees" } else { "DISAGREES" });
            }
        }
        _ => {}
    }
    for l in &env.ledger {
        out += &format!("  {:<24} {} log q\n", l.label, fmt_rat(&l.coefficient, float));
    }
    if let Some(t) = &env.total {
        out += &format!("  total {} log q\n", fmt_rat(t, float));
    }
    let status = serde_json::to_value(env.status).unwrap();
    out += &format!("status: {}\n", status.as_str().unwrap());
    if let Some(ms) = env.wall_time_ms {
        out += &format!("wall time: {ms} ms\n");
    }
    out
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn execute(cli: &Cli) -> Result<ReportEnvelope> {
    let (name, input, res) = match &cli.command {
        Command::ProductFormula(a) => ("product-formula", json!({"q": a.q, "curve": a.curve}), product_formula(a)),
        Command::Carlitz(a) => ("carlitz", json!({"q": a.q, "prec": a.prec}), carlitz(a)),
        Command::Genus1(a) => ("genus1", json!({"q": a.q, "a": [a.a1, a.a2, a.a3, a.a4, a.a6], "prec": a.prec}), genus1(a)),
        Command::Zeta(a) => ("zeta", json!({"q": a.q, "curve": a.curve}), zeta(a)),
    };
    match res {
        Ok(env) => Ok(env),
        Err(e) => failure(name, input, &e).ok_or(e),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let start = Instant::now();
    match execute(&cli) {
        Ok(mut env) => {
            if cli.timing {
                env.wall_time_ms = Some(start.elapsed().as_millis());
            }
            let stdout = if cli.json {
                serde_json::to_string_pretty(&env).expect("envelope serializes") + "\n"
            } else {
                render_text(&env, cli.float)
            };
            Outcome {
                code: env.status.exit_code(),
                stdout,
                stderr: env.message.map(|m| format!("error: {m}\n")).unwrap_or_default(),
            }
        }
        Err(e) => Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("ffperiods").chain(args.iter().copied()))
    }

    #[test]
    fn curve_specs() {
        let k = FqField::with_order(2).unwrap();
        assert!(!parse_curve(&k, "p1").unwrap().is_elliptic());
        assert!(parse_curve(&k, "ell:0,0,1,0,0").unwrap().is_elliptic());
        assert!(parse_curve(&k, "ell:0,0,0,0,0").is_err());
        assert!(parse_curve(&k, "ell:0,0,1").is_err());
        assert!(parse_curve(&k, "cubic").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["product-formula", "--q", "3", "--curve", "p1", "--elem", "(t^2+1)/t"]).code, 0);
        let z = run_args(&["product-formula", "--q", "3", "--curve", "p1", "--elem", "0"]);
        assert_eq!(z.code, 2);
        assert!(z.stderr.contains("zero element"));
        assert_eq!(run_args(&["genus1", "--q", "2"]).code, 2);
        assert_eq!(run_args(&["carlitz", "--q", "6"]).code, 2);
        assert_eq!(run_args(&["carlitz", "--q", "2", "--prec", "0"]).code, 3);
        assert_eq!(run_args(&["bogus"]).code, 2);
        assert_eq!(run_args(&["--help"]).code, 0);
    }
}
