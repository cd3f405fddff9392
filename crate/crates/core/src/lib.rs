//! Elastic time-series distances with a tunable pointwise cost `|a - b|^γ`.
//!
//! The crate is organised bottom-up:
//!
//! * [`cost`]: the cost family and the named exponent grids.
//! * [`data`]: series, datasets, UCR TSV I/O, noise injection and the derivative transform.
//! * [`distance`]: DTW, ADTW, WDTW, their derivative composites and the edit-family distances.
//! * [`tuning`]: parameter grids and leave-one-out 1-NN tuning of `(γ, w)` and `(γ, ω)`.
//! * [`forest`]: Proximity Forest, optionally sampling `γ` at every node.
//! * [`stats`]: win/tie/loss, Wilcoxon signed-rank, mean ranks and cliques.
//! * [`report`]: CSV and SVG emission for scatter and critical-difference plots.

pub mod cost;
pub mod data;
pub mod distance;
pub mod error;
pub mod forest;
pub mod report;
pub mod stats;
pub mod tuning;

pub use cost::{CostExponent, ExponentSet, ExponentSetName, FastPath};
pub use data::{Dataset, Label, RngSeed, Series, Split};
pub use distance::{AlignmentResult, Distance, DistanceKind, Penalty, WarpingWindow};
pub use error::{Error, Result};
pub use forest::{PfConfig, ProximityForest};
pub use stats::{PairedAccuracies, RankTable};
pub use tuning::{ParamGrid, TrainedModel};
