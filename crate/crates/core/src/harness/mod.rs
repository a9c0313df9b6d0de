//! The experimental protocol: splits, grid search, repeated runs and
//! reporting.

pub mod bench;
pub mod grid;
pub mod report;
pub mod split;

pub use crate::metrics::{accuracy, f1_macro};
pub use crate::model::measure_epoch_time;
pub use bench::{run_benchmark, Aggregate, BenchRecord, BenchReport, ProtocolConfig};
pub use grid::{grid_search, Grid};
pub use report::{render_report, write_report};
pub use split::{stratified_split, uniform_split, Split, SplitMode, DEFAULT_RATIOS};
