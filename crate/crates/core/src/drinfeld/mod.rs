//! Twisted polynomials, Drinfeld modules and the Carlitz exponential.

mod exp;
mod module;
mod twisted;

pub use exp::{carlitz_exp, carlitz_period, lattice_exp_partial, CarlitzPeriod, ExpSeries};
pub use module::{
    phi_of, separability, torsion_kernel, validate_elliptic, DrinfeldModule, EllipticCheck,
    SeparabilityCertificate,
};
pub use twisted::{twisted_mul, CoeffRing, FiniteCoeffs, LaurentCoeffs, RationalCoeffs, TwistedPoly};
