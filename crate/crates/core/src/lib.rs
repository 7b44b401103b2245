//! Exact conformal prediction regions for polynomial nonconformity measures.
//!
//! The crate computes plausibility `pl(y)` of a candidate label by the
//! leave-one-out score comparison, recovers the region `{y : pl(y) > alpha}`
//! either by brute-force scanning ([`oracle`]) or in closed form
//! ([`exact`]), and compares the result against ordinary least-squares
//! intervals ([`baseline`]) in Monte Carlo experiments ([`sim`]).

pub mod baseline;
pub mod engine;
pub mod error;
pub mod exact;
pub mod measure;
pub mod measures;
pub mod oracle;
pub mod questions;
pub mod region;
pub mod sim;
pub mod types;

pub use engine::{nonconformity_scores, plausibility, plausibility_unsupervised, threshold, Task};
pub use error::{ConformalError, Result};
pub use exact::{
    exact_bounded_interval, exact_lower_interval, exact_supervised_interval, exact_unsupervised_interval,
    exact_upper_interval, rank_constants, trivial_region_guard, ExactInterval, RankConstants, Shape,
};
pub use measure::{Bag, MeasureSpec};
pub use oracle::{compare_regions, region_oracle, region_oracle_unsupervised, RegionComparison, ScanSpec};
pub use region::{Endpoint, Interval, PredictionRegion};
pub use types::{CandidatePoint, LabeledPoint, PlausibilityValue, Sample};
