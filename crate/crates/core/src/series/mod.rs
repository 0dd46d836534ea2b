//! Truncated Laurent series, Newton polygons and the two-stage valuation.

mod laurent;
mod newton;
pub mod powser;
mod two_stage;

pub use laurent::TruncLaurent;
pub use newton::{min_root_valuation, newton_valuations};
pub use two_stage::{two_stage_valuation, CvApprox, DeRhamSeries, TwoStageValue};
