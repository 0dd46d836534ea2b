use crate::ffield::{FqElem, FqField};
use crate::funcfield::CurveDescriptor;
use crate::series::TruncLaurent;
use crate::{invalid, precision, Result};

use super::formal::weierstrass_residual;

/// A point of the curve: the neutral element, an `F_q`-rational affine
/// point, or a point with coordinates in the completion at infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurvePointGeneric {
    Infinity,
    Rational { t: FqElem, y: FqElem },
    Series { t: TruncLaurent, y: TruncLaurent },
}

impl CurvePointGeneric {
    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePointGeneric::Infinity)
    }

    /// Coordinates as series; rational points become exact constants.
    pub fn coordinates(&self, k: &FqField) -> Option<(TruncLaurent, TruncLaurent)> {
        match self {
            CurvePointGeneric::Infinity => None,
            CurvePointGeneric::Rational { t, y } => Some((TruncLaurent::constant(k, *t), TruncLaurent::constant(k, *y))),
            CurvePointGeneric::Series { t, y } => Some((t.clone(), y.clone())),
        }
    }

    /// Image under the `q`-Frobenius of the coordinates.
    pub fn frobenius(&self, q: u64) -> CurvePointGeneric {
        match self {
            CurvePointGeneric::Series { t, y } => CurvePointGeneric::Series {
                t: t.q_power(q),
                y: y.q_power(q),
            },
            other => other.clone(),
        }
    }

    /// Whether the Weierstrass equation holds to the known precision.
    pub fn on_curve(&self, curve: &CurveDescriptor) -> Result<bool> {
        let k = curve.base();
        Ok(match self {
            CurvePointGeneric::Infinity => true,
            CurvePointGeneric::Rational { t, y } => {
                let a = curve.coefficients().ok_or_else(|| invalid("not an elliptic curve"))?;
                CurveDescriptor::eval(k, a, *t, *y).is_zero()
            }
            CurvePointGeneric::Series { t, y } => weierstrass_residual(curve, t, y)?.is_zero(),
        })
    }
}

fn coeffs(curve: &CurveDescriptor) -> Result<[FqElem; 5]> {
    curve.coefficients().copied().ok_or_else(|| invalid("group law needs an elliptic curve"))
}

/// `-(t, y) = (t, -y - a1 t - a3)`.
pub fn negate(curve: &CurveDescriptor, p: &CurvePointGeneric) -> Result<CurvePointGeneric> {
    let k = curve.base();
    let [a1, _, a3, _, _] = coeffs(curve)?;
    Ok(match p {
        CurvePointGeneric::Infinity => CurvePointGeneric::Infinity,
        CurvePointGeneric::Rational { t, y } => CurvePointGeneric::Rational {
            t: *t,
            y: k.sub(k.neg(*y), k.add(k.mul(a1, *t), a3)),
        },
        CurvePointGeneric::Series { t, y } => CurvePointGeneric::Series {
            t: t.clone(),
            y: y.neg().sub(&t.scale(a1))?.sub(&TruncLaurent::constant(k, a3))?,
        },
    })
}

/// Chord-tangent addition.
pub fn group_law_add(curve: &CurveDescriptor, p: &CurvePointGeneric, q: &CurvePointGeneric) -> Result<CurvePointGeneric> {
    use CurvePointGeneric::*;
    let k = curve.base();
    let [a1, a2, a3, a4, _] = coeffs(curve)?;
    match (p, q) {
        (Infinity, _) => Ok(q.clone()),
        (_, Infinity) => Ok(p.clone()),
        (Rational { t: t1, y: y1 }, Rational { t: t2, y: y2 }) => {
            let lambda = if t1 != t2 {
                k.div(k.sub(*y2, *y1), k.sub(*t2, *t1)).unwrap()
            } else {
                let den = k.add(k.add(k.add(*y1, *y2), k.mul(a1, *t1)), a3);
                if den.is_zero() {
                    return Ok(Infinity);
                }
                // here y1 = y2 and den = 2y + a1 t + a3
                let three = k.integer(3);
                let two = k.integer(2);
                let num = k.sub(
                    k.add(k.add(k.mul(three, k.mul(*t1, *t1)), k.mul(k.mul(two, a2), *t1)), a4),
                    k.mul(a1, *y1),
                );
                k.div(num, den).unwrap()
            };
            let nu = k.sub(*y1, k.mul(lambda, *t1));
            let t3 = k.sub(k.sub(k.add(k.mul(lambda, lambda), k.mul(a1, lambda)), a2), k.add(*t1, *t2));
            let y3 = k.sub(k.neg(k.mul(k.add(lambda, a1), t3)), k.add(nu, a3));
            Ok(Rational { t: t3, y: y3 })
        }
        _ => {
            let (t1, y1) = p.coordinates(k).unwrap();
            let (t2, y2) = q.coordinates(k).unwrap();
            let c = |x: FqElem| TruncLaurent::constant(k, x);
            let dt = t2.sub(&t1)?;
            let lambda = if !dt.is_zero() {
                y2.sub(&y1)?.div(&dt)?
            } else {
                let vertical = y1.add(&y2)?.add(&t1.scale(a1))?.add(&c(a3))?;
                if vertical.is_zero() {
                    return Ok(Infinity);
                }
                if !y2.sub(&y1)?.is_zero() {
                    return Err(precision("chord through two points with equal t lost all precision"));
                }
                let num = t1
                    .mul(&t1)?
                    .scale(k.integer(3))
                    .add(&t1.scale(k.mul(k.integer(2), a2)))?
                    .add(&c(a4))?
                    .sub(&y1.scale(a1))?;
                num.div(&vertical)?
            };
            let nu = y1.sub(&lambda.mul(&t1)?)?;
            let t3 = lambda
                .mul(&lambda)?
                .add(&lambda.scale(a1))?
                .sub(&c(a2))?
                .sub(&t1)?
                .sub(&t2)?;
            let y3 = lambda.add(&c(a1))?.mul(&t3)?.neg().sub(&nu)?.sub(&c(a3))?;
            Ok(Series { t: t3, y: y3 })
        }
    }
}

pub fn group_law_sub(curve: &CurveDescriptor, p: &CurvePointGeneric, q: &CurvePointGeneric) -> Result<CurvePointGeneric> {
    group_law_add(curve, p, &negate(curve, q)?)
}
