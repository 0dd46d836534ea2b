use std::ops::Add;

use serde::Serialize;

use super::TruncLaurent;
use crate::rational::Rational;
use crate::{precision, Result};

/// An approximation of an element of the completed algebraic closure.
#[derive(Clone, Debug)]
pub enum CvApprox {
    /// A concrete truncated series.
    Explicit(TruncLaurent),
    /// A sum known only through the valuations of its terms and a lower
    /// bound on everything omitted (`None`: nothing omitted).
    Dominated {
        terms: Vec<Rational>,
        tail: Option<Rational>,
    },
}

impl CvApprox {
    pub fn zero() -> CvApprox {
        CvApprox::Dominated {
            terms: Vec::new(),
            tail: None,
        }
    }

    /// `Ok(None)` for a value known to be exactly zero.
    pub fn valuation(&self) -> Result<Option<Rational>> {
        match self {
            CvApprox::Explicit(s) => match s.valuation() {
                Some(v) => Ok(Some(v)),
                None if s.is_exact() => Ok(None),
                None => Err(precision("coefficient is zero to its precision")),
            },
            CvApprox::Dominated { terms, tail } => {
                let Some(&m) = terms.iter().min() else {
                    return match tail {
                        None => Ok(None),
                        Some(_) => Err(precision("only a tail bound is known")),
                    };
                };
                if terms.iter().filter(|&&t| t == m).count() > 1 {
                    return Err(precision("minimum valuation attained twice"));
                }
                if tail.is_some_and(|t| t <= m) {
                    return Err(precision("tail bound does not exceed the leading term"));
                }
                Ok(Some(m))
            }
        }
    }

    fn dominated(&self) -> (Vec<Rational>, Option<Rational>) {
        match self {
            CvApprox::Explicit(s) => (
                s.terms()
                    .map(|(k, _)| Rational::new(k, s.ram() as i64))
                    .collect(),
                s.precision(),
            ),
            CvApprox::Dominated { terms, tail } => (terms.clone(), *tail),
        }
    }

    pub fn add(&self, other: &CvApprox) -> Result<CvApprox> {
        if let (CvApprox::Explicit(a), CvApprox::Explicit(b)) = (self, other) {
            return Ok(CvApprox::Explicit(a.add(b)?));
        }
        let (mut ta, la) = self.dominated();
        let (tb, lb) = other.dominated();
        ta.extend(tb);
        let tail = match (la, lb) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        };
        Ok(CvApprox::Dominated { terms: ta, tail })
    }

    pub fn mul(&self, other: &CvApprox) -> Result<CvApprox> {
        if let (CvApprox::Explicit(a), CvApprox::Explicit(b)) = (self, other) {
            return Ok(CvApprox::Explicit(a.mul(b)?));
        }
        let (ta, la) = self.dominated();
        let (tb, lb) = other.dominated();
        if (ta.is_empty() && la.is_none()) || (tb.is_empty() && lb.is_none()) {
            return Ok(CvApprox::zero());
        }
        let terms: Vec<Rational> = ta
            .iter()
            .flat_map(|a| tb.iter().map(move |b| a + b))
            .collect();
        let min_a = ta.iter().min().copied().or(la);
        let min_b = tb.iter().min().copied().or(lb);
        let tail = [
            la.zip(min_b).map(|(l, m)| l + m),
            lb.zip(min_a).map(|(l, m)| l + m),
        ]
        .into_iter()
        .flatten()
        .min();
        Ok(CvApprox::Dominated { terms, tail })
    }
}

/// A Laurent series in `(z - zeta)` with coefficients in the completion:
/// `sum_j coeffs[j] (z - zeta)^(shift + j)`, with everything from index
/// `shift + coeffs.len()` on unknown when `truncated` is set.
#[derive(Clone, Debug)]
pub struct DeRhamSeries {
    pub shift: i64,
    pub coeffs: Vec<CvApprox>,
    pub truncated: bool,
}

/// The pair `(v_hat, v)`: order in `(z - zeta)` and valuation of the
/// evaluation of the normalized leading part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TwoStageValue {
    pub vhat: i64,
    #[serde(with = "crate::rational::serde_str")]
    pub v: Rational,
}

impl Add for TwoStageValue {
    type Output = TwoStageValue;

    fn add(self, o: TwoStageValue) -> TwoStageValue {
        TwoStageValue {
            vhat: self.vhat + o.vhat,
            v: self.v + o.v,
        }
    }
}

impl DeRhamSeries {
    pub fn exact(shift: i64, coeffs: Vec<CvApprox>) -> DeRhamSeries {
        DeRhamSeries {
            shift,
            coeffs,
            truncated: false,
        }
    }

    /// `(z - zeta)^k`.
    pub fn generator_power(k: i64, field: &crate::ffield::FqField) -> DeRhamSeries {
        DeRhamSeries::exact(k, vec![CvApprox::Explicit(TruncLaurent::one(field))])
    }

    pub fn mul(&self, other: &DeRhamSeries) -> Result<DeRhamSeries> {
        let n = match (self.truncated, other.truncated) {
            (false, false) => self.coeffs.len() + other.coeffs.len() - 1,
            (true, false) => self.coeffs.len(),
            (false, true) => other.coeffs.len(),
            (true, true) => self.coeffs.len().min(other.coeffs.len()),
        };
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = CvApprox::zero();
            for i in 0..=k {
                if let (Some(a), Some(b)) = (self.coeffs.get(i), other.coeffs.get(k - i)) {
                    acc = acc.add(&a.mul(b)?)?;
                }
            }
            coeffs.push(acc);
        }
        Ok(DeRhamSeries {
            shift: self.shift + other.shift,
            coeffs,
            truncated: self.truncated || other.truncated,
        })
    }
}

/// `v_hat` is the order of the first nonzero coefficient and `v` its
/// valuation. A coefficient whose vanishing cannot be decided is an error.
pub fn two_stage_valuation(f: &DeRhamSeries) -> Result<TwoStageValue> {
    for (j, c) in f.coeffs.iter().enumerate() {
        if let Some(v) = c.valuation()? {
            return Ok(TwoStageValue {
                vhat: f.shift + j as i64,
                v,
            });
        }
    }
    Err(precision("series vanishes to its known order"))
}
