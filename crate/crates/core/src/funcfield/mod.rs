//! Function fields of the projective line and of elliptic curves over
//! `F_q`: elements, places, valuations and the product formula.

mod curve;
mod element;
mod place;

pub use curve::{CurveDescriptor, CurveKind, Weierstrass, MAX_ENUM_FIELD};
pub use element::FieldElement;
pub use place::{
    enumerate_places, expand_at_place, min_poly, places_over, product_formula_check, valuation_at, LocalChart,
    Place, PlaceData, PlaceValuation, ProductFormulaReport, MAX_PLACE_DEGREE,
};
