//! Exact rationals and their string form.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

pub type Rational = Ratio<i64>;

pub fn rat(num: i64, den: i64) -> Rational {
    Ratio::new(num, den)
}

pub fn int(n: i64) -> Rational {
    Ratio::from_integer(n)
}

/// Always `num/den`, so integers print as `2/1`.
pub fn to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `n`, `n/d` and `-n/d`.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: i64 = d.trim().parse().ok()?;
            let n: i64 = n.trim().parse().ok()?;
            (d != 0).then(|| Ratio::new(n, d))
        }
        None => s.parse().ok().map(Ratio::from_integer),
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `r` as a unicode-free human string: `2`, `-1/3`.
pub fn pretty(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}{}/{}", if r.is_negative() { "-" } else { "" }, r.numer().abs(), r.denom())
    }
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

/// Serde adapter storing a rational as its `num/den` string.
pub mod serde_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}
