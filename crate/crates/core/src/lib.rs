//! Bin-scheme measurement of relative quantities in positive data.
//!
//! A bin scheme lays `D` contiguous bins per cycle from a start `S`, with an
//! initial width `W` that is multiplied by an inflation factor `F` (or a
//! per-cycle factor `F_i`) at every new cycle. Data that follows the
//! reciprocal density `k/x` lands in the ranks of such a scheme with the
//! proportions given by [`theory::general_law`], of which Benford's
//! first-digit law is the `F = D + 1` special case.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conformance;
pub mod engine;
pub mod error;
pub mod figures;
pub mod generators;
pub mod scheme;
pub mod theory;

pub use engine::{
    assign, per_cycle_proportions, proportions, scale_data, tally, tally_parallel, BinTally,
    CycleProportions, Placement, DEFAULT_MIN_CYCLE_COUNT,
};
pub use conformance::{
    classify, compare, f_avg, first_significant_digit, second_order_scheme,
    second_significant_digit, ConformanceReport, Metrics, TheorySource, Verdict,
    DEFAULT_MAD_THRESHOLD,
};
pub use error::{Error, Result};
pub use figures::{reproduce, Figure, FigureTable};
pub use generators::{Family, Generator, GeneratorSpec, RNG_ALGORITHM};
pub use scheme::{
    layout, validate_scheme, BinAssignment, BinScheme, BinSchemeSpec, CycleLayout, Expansion,
    ProportionVector, SchemeViolation,
};

/// Initial bin width used when none is given; small enough that the first
/// cycles hold a negligible share of typical data.
pub const DEFAULT_WIDTH: f64 = 0.0005;
