//! Elementary cellular automaton laboratory.
//!
//! Rows are bit-packed [`Tape`]s advanced 64 cells per word operation by
//! [`step`], with [`step_naive`] as a per-cell reference. On top of the
//! engine sit the rule algebra ([`algebra`]), branch and ratio metrics
//! ([`metrics`]), central-column analysis ([`column`]) and PBM/CSV output
//! ([`render`]).

pub mod algebra;
pub mod column;
pub mod evolve;
pub mod kernel;
pub mod metrics;
pub mod render;
pub mod rule;
pub mod tape;

pub use algebra::{
    combine, complement, divergence_mask, mirror, pointwise_combine, AlgebraError, BoolOp,
    NeighborhoodMask,
};
pub use column::{period_scan, prefix_ratio, ColumnError, PeriodReport};
pub use evolve::{
    central_column, evolve, CentralColumn, Evolution, EvolveError, ObserverError, RowObserver,
    SpacetimeDiagram, DEFAULT_RETENTION_LIMIT,
};
pub use kernel::{step, step_naive};
pub use metrics::{
    pearson, randomness_count_series, ratio_series, scale_series, BranchTally, MetricSeries,
    MetricsError, RatioScope,
};
pub use render::{write_csv, write_pbm, PbmFormat, RenderError};
pub use rule::{apply_rule, rule_from_number, RuleError, RuleTable};
pub use tape::{single_seed, Tape, TapeError, WindowPolicy};
