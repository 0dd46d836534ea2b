use crate::rational::Rational;
use crate::{invalid, Result};

/// Root valuations of `sum a_k y^k` from the points `(k, v(a_k))`, with
/// `None` standing for a zero coefficient.
///
/// Returns `(valuation, multiplicity)` pairs in increasing valuation order.
/// Each lower-hull segment of slope `s` and width `l` contributes `l` roots of
/// valuation `-s`; roots at `y = 0` are not reported.
pub fn newton_valuations(points: &[(u32, Option<Rational>)]) -> Result<Vec<(Rational, u32)>> {
    let mut pts: Vec<(u32, Rational)> = points
        .iter()
        .filter_map(|&(k, w)| w.map(|w| (k, w)))
        .collect();
    pts.sort_by_key(|p| p.0);
    pts.dedup_by_key(|p| p.0);
    if pts.len() < 2 {
        return Err(invalid("Newton polygon needs at least two nonzero coefficients"));
    }
    let mut hull: Vec<(u32, Rational)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or above the segment a-p
            let lhs = (b.1 - a.1) * Rational::from(i64::from(p.0 - a.0));
            let rhs = (p.1 - a.1) * Rational::from(i64::from(b.0 - a.0));
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out: Vec<(Rational, u32)> = hull
        .windows(2)
        .map(|s| {
            let width = s[1].0 - s[0].0;
            (-(s[1].1 - s[0].1) / Rational::from(i64::from(width)), width)
        })
        .collect();
    out.reverse();
    Ok(out)
}

/// The smallest root valuation.
pub fn min_root_valuation(points: &[(u32, Option<Rational>)]) -> Result<Rational> {
    Ok(newton_valuations(points)?[0].0)
}
