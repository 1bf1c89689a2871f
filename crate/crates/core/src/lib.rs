//! Finite-stage experiments on binary expansions in a non-integer base
//! β ∈ (1, 2): enumeration of level-n sums, pair-separation statistics,
//! limsup-set coverage and dimension estimates, greedy/lazy digit
//! algorithms, algebraic base classification, and Bernoulli convolution
//! histograms.
//!
//! Everything is deterministic for fixed inputs: parallel sections only
//! ever produce per-item results that are combined in a fixed order, and
//! all randomness flows from explicit 64-bit seeds.

pub mod algebra;
pub mod base;
pub mod bernoulli;
pub mod counting;
pub mod enumeration;
pub mod error;
pub mod expansions;
pub mod interval;
pub mod limsup;
pub mod poly;
pub mod rate;
pub mod series;
pub mod tolerance;

pub use algebra::{
    base_from_polynomial_root, classify, find_roots, komornik_loreti, multinacci_value,
    ClassificationReport, Ternary,
};
pub use base::{BaseValue, Provenance};
pub use bernoulli::{
    exact_histogram, mc_histogram, total_variation, DensityHistogram, HistogramMethod,
};
pub use counting::{grid_scan, pair_statistics, GridScanResult, PairStats};
pub use enumeration::{
    enumerate_sums, enumerate_sums_capped, enumerate_sums_with_multiplicity, LevelSums,
    DEFAULT_LEVEL_CAP,
};
pub use error::{Error, Result};
pub use expansions::{
    best_prefix_value, branching_profile, greedy_expand, is_extendable_prefix, kappa_from_digits,
    kappa_lower_bound, lazy_expand, optimal_chain_search, BranchReport, DigitSequence,
    OptimalityReport,
};
pub use interval::IntervalSet;
pub use limsup::{
    bad_indicator, box_dimension, count_boxes, coverage, inclusion_excess, limsup_union,
    membership, stage_intervals, CoverageReport, DimensionEstimate, MembershipReport, SetVariant,
    StageWindow,
};
pub use poly::IntegerPolynomial;
pub use rate::{growing_regularity_profile, RateFunction, RateSequence};
pub use series::{classify_series, SeriesReport, SeriesVerdict};
pub use tolerance::ToleranceConfig;
