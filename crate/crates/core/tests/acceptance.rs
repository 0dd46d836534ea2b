use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ffperiods::drinfeld::carlitz_exp;
use ffperiods::ffield::{prime_power, FqElem, FqField};
use ffperiods::funcfield::{enumerate_places, expand_at_place, product_formula_check, CurveDescriptor, FieldElement};
use ffperiods::genus1::{final_cancellation, formal_expansions, hasse_range, solve_v, symbolic_four_lines, Genus1Report};
use ffperiods::rational::{int, rat};
use ffperiods::series::{two_stage_valuation, CvApprox, DeRhamSeries, TruncLaurent};
use ffperiods::zeta_periods::{
    carlitz_infinity_valuation, carlitz_product_formula_report, carlitz_v_adic, euler_product_series, z_inf_trivial_at_0,
    z_v_trivial_at_1, ZetaClosedForm, REGULARIZATION,
};
use ffperiods::Rational;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn field(q: u64) -> FqField {
    FqField::with_order(q).unwrap()
}

fn elliptic(q: u64, a: [i64; 5]) -> CurveDescriptor {
    CurveDescriptor::elliptic_from_ints(&field(q), a).unwrap()
}

const PIPELINE_CURVES: [(u64, [i64; 5]); 5] = [
    (2, [0, 0, 1, 0, 0]),
    (2, [1, 0, 0, 0, 1]),
    (3, [0, 0, 0, 2, 1]),
    (3, [1, 1, 1, 1, 1]),
    (4, [0, 0, 1, 0, 0]),
];

fn within(start: Instant, limit: Duration, what: &str) -> std::result::Result<Duration, String> {
    let t = start.elapsed();
    if t > limit {
        return Err(format!("{what} took {t:?}, limit {limit:?}"));
    }
    Ok(t)
}

fn nonzero_random(curve: &CurveDescriptor, rng: &mut ChaCha8Rng, max_deg: usize) -> FieldElement {
    loop {
        let f = FieldElement::random(curve, rng, max_deg);
        if !f.is_zero() {
            return f;
        }
    }
}

fn product_formula() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut checked = 0;
    let mut run = |curve: &CurveDescriptor, n: usize| -> std::result::Result<(), String> {
        for _ in 0..n {
            let f = nonzero_random(curve, &mut rng, 5);
            let r = product_formula_check(&f).map_err(|e| e.to_string())?;
            // independent recount from the entries
            let sum: i64 = r.entries.iter().map(|e| e.degree as i64 * e.valuation).sum();
            ensure!(r.total == 0 && sum == 0, "{} on {}: total {}", r.element, curve.label(), r.total);
            checked += 1;
        }
        Ok(())
    };
    for q in [2, 3, 4, 5] {
        run(&CurveDescriptor::projective_line(&field(q)), 200)?;
    }
    run(&elliptic(2, [0, 0, 1, 0, 0]), 50)?;
    let t = within(start, Duration::from_secs(10), "product formula")?;
    Ok(format!("{checked} elements, all sums 0 ({t:.2?})"))
}

fn carlitz_infinity() -> Check {
    let mut out = Vec::new();
    for q in [2u64, 3, 4] {
        let start = Instant::now();
        let v = carlitz_infinity_valuation(&field(q), 64).map_err(|e| e.to_string())?;
        let exponent = -v;
        let want = -rat(q as i64, q as i64 - 1);
        ensure!(exponent == want, "q = {q}: exponent {exponent}, expected {want}");
        within(start, Duration::from_secs(1), &format!("q = {q}"))?;
        out.push(format!("q={q}: {exponent}"));
    }
    Ok(out.join(", "))
}

fn carlitz_v_adic_places() -> Check {
    let mut n = 0;
    for q in [2u64, 3, 4, 5] {
        let line = CurveDescriptor::projective_line(&field(q));
        for v in enumerate_places(&line, 2).map_err(|e| e.to_string())? {
            if v.is_infinite() {
                continue;
            }
            let qv = v.residue_size();
            let rungs = (40.0 / (qv as f64).log2()).floor().min(16.0) as usize;
            let tv = carlitz_v_adic(&v, rungs).map_err(|e| e.to_string())?;
            let z = z_v_trivial_at_1(&v).map_err(|e| e.to_string())?;
            let want = rat(1, qv as i64 - 1);
            ensure!(tv.vhat == 1 && tv.v == want, "q = {q}, {}: ({}, {})", v.label(), tv.vhat, tv.v);
            ensure!(z == want, "q = {q}, {}: Z_v = {z}", v.label());
            n += 1;
        }
    }
    Ok(format!("{n} places with d_v <= 2, q in 2..=5, all (1, 1/(q_v - 1))"))
}

fn carlitz_product() -> Check {
    let mut out = Vec::new();
    for q in [2i64, 3, 4] {
        let r = carlitz_product_formula_report(q as u64, 64, 2).map_err(|e| e.to_string())?;
        let reg = r.ledger.get(REGULARIZATION).ok_or("no regularization line")?.0;
        let qq = rat(q, q - 1);
        ensure!(reg == -qq, "q = {q}: regularization {reg}");
        // d/ds log (1 - q^{1-s})^{-1} at s = 0
        let from_closed_form = z_inf_trivial_at_0(&ZetaClosedForm::projective_line(q as u64)).map_err(|e| e.to_string())?;
        ensure!(from_closed_form.0 == qq, "q = {q}: logderiv {}", from_closed_form.0);
        ensure!(r.holds() && r.ledger.total.0 == int(0), "q = {q}: total {}", r.ledger.total.0);
        ensure!(r.infinity_term().0 == qq, "q = {q}: infinity term {}", r.infinity_term().0);
        out.push(format!("q={q}: total 0, regularization {reg}"));
    }
    Ok(out.join(", "))
}

fn carlitz_exponential() -> Check {
    let start = Instant::now();
    for q in [2u64, 3] {
        let ex = carlitz_exp(&field(q), 6).map_err(|e| e.to_string())?;
        // e_N = 1 / prod_{i=1..N} (theta^{q^i} - theta)^{q^{N-i}}
        let (_, _, den) = ex.coeffs()[6].parts();
        let want = 6 * q.pow(6) as usize;
        ensure!(den.degree() == Some(want), "q = {q}: deg den e_6 = {:?}, expected {want}", den.degree());
        let res = ex.functional_equation_residual();
        ensure!(res.len() == 7, "q = {q}: {} residual terms", res.len());
        if let Some(i) = res.iter().position(|c| !c.is_zero()) {
            return Err(format!("q = {q}: residual at tau^{i} is {}", res[i].display()));
        }
    }
    let t = within(start, Duration::from_secs(5), "exponential")?;
    Ok(format!("residual 0 through z^(q^6) for q = 2, 3 ({t:.2?})"))
}

fn pipeline_reports() -> std::result::Result<Vec<(CurveDescriptor, Genus1Report, Duration)>, String> {
    PIPELINE_CURVES
        .iter()
        .map(|&(q, a)| {
            let c = elliptic(q, a);
            let start = Instant::now();
            let r = final_cancellation(&c, 64, 3).map_err(|e| format!("{}: {e}", c.label()))?;
            Ok((c, r, start.elapsed()))
        })
        .collect()
}

fn pipeline_stages(reports: &[(CurveDescriptor, Genus1Report, Duration)]) -> Check {
    let mut out = Vec::new();
    for (c, r, t) in reports {
        let q = r.q as i64;
        let l = c.label();
        ensure!(r.v_alpha == -2 && r.v_beta == -3, "{l}: v(alpha), v(beta) = {}, {}", r.v_alpha, r.v_beta);
        ensure!(r.slope_agreement >= 40, "{l}: slope expressions agree on {} terms", r.slope_agreement);
        ensure!(r.v_m == -q, "{l}: v(m) = {}", r.v_m);
        ensure!(r.infinity.v_xi == -q, "{l}: v(xi) = {}", r.infinity.v_xi);
        ensure!(r.infinity.v_sigma_delta == -2 * q, "{l}: v(sigma* delta) = {}", r.infinity.v_sigma_delta);
        ensure!(r.infinity.factor_valuations == [0, 0, 0], "{l}: factors {:?}", r.infinity.factor_valuations);
        let inf = rat(q, q - 1) - int(q);
        ensure!(r.infinity.log_magnitude.0 == inf, "{l}: infinity period {}", r.infinity.log_magnitude.0);
        ensure!(r.eta.len() as u64 == r.points - 1, "{l}: {} twists for N = {}", r.eta.len(), r.points);
        for e in &r.eta {
            ensure!(e.v_g == -q, "{l}, {}: v(sigma* g) = {}", e.place, e.v_g);
            ensure!(e.period.0 == int(q) + inf, "{l}, {}: period {}", e.place, e.period.0);
            ensure!(e.omega.0 == int(0) && e.correction.0 == int(1), "{l}, {}: corrections {}, {}", e.place, e.omega.0, e.correction.0);
            ensure!(e.twist_consistent, "{l}, {}: twist inconsistent", e.place);
        }
        ensure!(*t < Duration::from_secs(60), "{l}: {t:?}");
        out.push(format!("{l} N={}", r.points));
    }
    Ok(out.join("; "))
}

fn final_cancellation_lines(reports: &[(CurveDescriptor, Genus1Report, Duration)]) -> Check {
    for (c, r, _) in reports {
        ensure!(r.holds() && r.total().0 == int(0), "{}: total {}", c.label(), r.total().0);
        let lines: Vec<Rational> = r.ledger.entries.iter().map(|e| e.coefficient.0).collect();
        let want = symbolic_four_lines(r.q as i64, r.points as i64);
        ensure!(lines == want, "{}: lines {lines:?}, symbolic {want:?}", c.label());
    }
    let mut pairs = 0;
    for q in 2..=16i64 {
        if prime_power(q as u64).is_none() {
            continue;
        }
        for n in hasse_range(q) {
            ensure!(n >= 1 && (n - q - 1).pow(2) <= 4 * q, "N = {n} outside the Hasse range for q = {q}");
            let lines = symbolic_four_lines(q, n);
            let sum: Rational = lines.iter().sum();
            ensure!(sum == int(0), "q = {q}, N = {n}: sum {sum}");
            let reg = z_inf_trivial_at_0(&ZetaClosedForm::elliptic(q as u64, n as u64)).map_err(|e| e.to_string())?;
            ensure!(lines[0] == -reg.0, "q = {q}, N = {n}: regularization line {} vs {}", lines[0], -reg.0);
            pairs += 1;
        }
    }
    Ok(format!("{} curves total 0; symbolic identity for {pairs} (q, N) pairs", reports.len()))
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn suite<S: Strategy>(name: &str, cases: u32, s: S, f: impl Fn(S::Value) -> std::result::Result<(), TestCaseError>) -> std::result::Result<(), String> {
    runner(cases).run(&s, f).map_err(|e| format!("{name}: {e}"))
}

fn pos_series(k: &FqField, raw: &[u32], n: usize) -> TruncLaurent {
    let coeffs = raw.iter().map(|&c| k.elements().nth((c % k.size()) as usize).unwrap()).collect();
    TruncLaurent::from_coeffs(k, 1, coeffs, Some(n as i64 + 1))
}

fn derham(k: &FqField, lead: i64, terms: &[(u32, i64, u32)]) -> DeRhamSeries {
    let coeffs = terms
        .iter()
        .map(|&(c, w, e)| {
            let c = k.elements().nth((c % (k.size() - 1) + 1) as usize).unwrap();
            let s = TruncLaurent::monomial(k, c, w, e).add(&TruncLaurent::big_o(k, e, w + 20)).unwrap();
            CvApprox::Explicit(s)
        })
        .collect();
    DeRhamSeries { shift: lead, coeffs, truncated: true }
}

fn leading(s: &TruncLaurent) -> (Option<Rational>, Option<FqElem>) {
    (s.valuation(), s.leading_coeff())
}

fn properties() -> Check {
    suite(
        "formal group",
        16,
        (0usize..PIPELINE_CURVES.len(), prop::collection::vec(0u32..64, 1..10), prop::collection::vec(0u32..64, 1..10), prop::collection::vec(0u32..64, 1..10)),
        |(i, ra, rb, rc)| {
            let (q, a) = PIPELINE_CURVES[i];
            let c = elliptic(q, a);
            let n = 24;
            let fg = formal_expansions(&c, n).unwrap();
            let k = c.base();
            let (x, y, z) = (pos_series(k, &ra, n), pos_series(k, &rb, n), pos_series(k, &rc, n));
            let zero = TruncLaurent::zero(k);
            let exact = |d: TruncLaurent| d.is_zero() && d.prec_units().is_none_or(|p| p > n as i64);
            prop_assert!(exact(fg.add(&x, &zero).unwrap().sub(&x).unwrap()));
            prop_assert!(exact(fg.add(&x, &y).unwrap().sub(&fg.add(&y, &x).unwrap()).unwrap()));
            let l = fg.add(&fg.add(&x, &y).unwrap(), &z).unwrap();
            let r = fg.add(&x, &fg.add(&y, &z).unwrap()).unwrap();
            prop_assert!(exact(l.sub(&r).unwrap()));
            prop_assert!(exact(fg.add(&x, &fg.negate(&x).unwrap()).unwrap()));
            Ok(())
        },
    )?;
    let k9 = field(9);
    let terms = || prop::collection::vec((0u32..8, -5i64..6, 1u32..4), 1..4);
    suite("two-stage multiplicativity", 64, (terms(), terms(), -3i64..4, -3i64..4), |(a, b, sa, sb)| {
        let (fa, fb) = (derham(&k9, sa, &a), derham(&k9, sb, &b));
        let (va, vb) = (two_stage_valuation(&fa).unwrap(), two_stage_valuation(&fb).unwrap());
        prop_assert_eq!(two_stage_valuation(&fa.mul(&fb).unwrap()).unwrap(), va + vb);
        Ok(())
    })?;
    suite("generator independence", 64, (terms(), terms(), -3i64..4, 0usize..4), |(a, u, sa, k)| {
        let f = derham(&k9, sa, &a);
        let mut unit = derham(&k9, 0, &u);
        let c = k9.elements().nth((u[0].0 % 8 + 1) as usize).unwrap();
        unit.coeffs[0] = CvApprox::Explicit(TruncLaurent::constant(&k9, c).add(&TruncLaurent::big_o(&k9, 1, 20)).unwrap());
        let mut g = f.clone();
        for _ in 0..k {
            g = g.mul(&unit).unwrap();
        }
        prop_assert_eq!(two_stage_valuation(&g).unwrap(), two_stage_valuation(&f).unwrap());
        Ok(())
    })?;
    suite(
        "Hasse bound",
        48,
        (prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16]), prop::array::uniform5(0i64..16)),
        |(q, a)| {
            let Ok(c) = CurveDescriptor::elliptic_from_ints(&field(q), a) else {
                return Ok(());
            };
            for d in 1..=2u32 {
                let qd = q.pow(d) as i64;
                let n = c.count_points(d).unwrap() as i64;
                prop_assert!((n - qd - 1).pow(2) <= 4 * qd, "{} over F_{}: N = {}", c.label(), qd, n);
            }
            Ok(())
        },
    )?;
    suite(
        "precision monotonicity",
        24,
        (prop::sample::select(vec![2u64, 3, 4, 5]), any::<u64>(), 4i64..20),
        |(q, seed, p)| {
            let curve = if q == 2 { elliptic(2, [0, 0, 1, 0, 0]) } else { CurveDescriptor::projective_line(&field(q)) };
            let f = nonzero_random(&curve, &mut ChaCha8Rng::seed_from_u64(seed), 4);
            for v in enumerate_places(&curve, 1).unwrap() {
                let lo = expand_at_place(&f, &v, p).unwrap();
                let hi = expand_at_place(&f, &v, 2 * p).unwrap();
                prop_assert_eq!(leading(&lo), leading(&hi));
                prop_assert!(hi.sub(&lo).unwrap().is_zero());
            }
            Ok(())
        },
    )?;
    for q in [2u64, 3, 4] {
        let (lo, hi) = (carlitz_infinity_valuation(&field(q), 32), carlitz_infinity_valuation(&field(q), 64));
        ensure!(lo.is_ok() && lo == hi, "Carlitz exponent moved with precision for q = {q}");
    }
    for &(q, a) in &PIPELINE_CURVES[..3] {
        let c = elliptic(q, a);
        let (lo, hi) = (solve_v(&c, 32).map_err(|e| e.to_string())?, solve_v(&c, 64).map_err(|e| e.to_string())?);
        ensure!(leading(&lo.alpha) == leading(&hi.alpha) && leading(&lo.beta) == leading(&hi.beta), "{}: leading terms of V moved", c.label());
        let (rl, rh) = (final_cancellation(&c, 40, 3), final_cancellation(&c, 80, 3));
        let (rl, rh) = (rl.map_err(|e| e.to_string())?, rh.map_err(|e| e.to_string())?);
        ensure!(rl.ledger == rh.ledger, "{}: ledger moved between precision 40 and 80", c.label());
    }
    let mut euler = 0;
    for curve in [
        CurveDescriptor::projective_line(&field(2)),
        CurveDescriptor::projective_line(&field(3)),
        elliptic(2, [0, 0, 1, 0, 0]),
        elliptic(2, [1, 0, 0, 0, 1]),
        elliptic(3, [0, 0, 0, 2, 1]),
        elliptic(3, [1, 1, 1, 1, 1]),
        elliptic(4, [0, 0, 1, 0, 0]),
    ] {
        let z = ZetaClosedForm::for_curve(&curve).map_err(|e| e.to_string())?;
        let e = euler_product_series(&curve, 4).map_err(|e| e.to_string())?;
        ensure!(e == z.series(4), "{}: Euler product {e:?} vs closed form {:?}", curve.label(), z.series(4));
        euler += 1;
    }
    Ok(format!("formal group, two-stage, Hasse, monotonicity suites pass; Euler product = closed form through T^4 on {euler} curves"))
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |n: u32, name: &str, f: &mut dyn FnMut() -> Check| {
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match res {
            Ok(detail) => println!("criterion {n} PASS  {name}: {detail}"),
            Err(why) => {
                failures += 1;
                println!("criterion {n} FAIL  {name}: {why}");
            }
        }
    };
    report(1, "product formula", &mut product_formula);
    report(2, "Carlitz period at infinity", &mut carlitz_infinity);
    report(3, "Carlitz period at finite places", &mut carlitz_v_adic_places);
    report(4, "Carlitz product formula", &mut carlitz_product);
    report(5, "Carlitz exponential", &mut carlitz_exponential);
    let reports = catch_unwind(pipeline_reports).unwrap_or_else(|_| Err("pipeline panicked".into()));
    report(6, "genus-one pipeline stages", &mut || reports.as_ref().map_err(Clone::clone).and_then(|r| pipeline_stages(r)));
    report(7, "genus-one cancellation", &mut || reports.as_ref().map_err(Clone::clone).and_then(|r| final_cancellation_lines(r)));
    report(8, "property suites", &mut properties);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
