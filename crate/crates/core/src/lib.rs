//! Unsupervised motif discovery for heterogeneous multivariate time-series.
//!
//! The pipeline abstracts raw sensor sequences into duration-stamped symbols,
//! mines recurrent variable-length subsequences with random projections over a
//! collision matrix, confirms and grows candidates with an LCSS-based distance
//! on the original data, clusters the surviving subsequences into motif
//! classes, and scores recovery against ground-truth injections produced by
//! the built-in simulator.
//!
//! Modules follow the processing order:
//!
//! * [`schema`] — parameter schemas, heterogeneous series, spans, CSV/JSON I/O.
//! * [`distances`] — point distances, LCSS, DTW, symbol lookup tables, mindist.
//! * [`representation`] — filtering, k-means discretization, temporal aggregation.
//! * [`mining`] — random projections, collision-matrix examination, pattern
//!   growing, divisive synthesis of tentative motifs.
//! * [`clustering`] — complete-linkage classification and representatives.
//! * [`evaluation`] — entropy-based sensitivity/specificity and segmentation.
//! * [`simulator`] — synthetic telecare data, motif selection and injection.
//! * [`pipeline`] — end-to-end extraction glue shared by the CLI and tests.

pub mod clustering;
pub mod distances;
pub mod evaluation;
pub mod mining;
pub mod pipeline;
pub mod representation;
pub mod schema;
pub mod simulator;

pub use clustering::{cluster, representative, MotifClass, MotifSet};
pub use distances::{
    build_symbol_tables, dtw_distance, lcss_count, lcss_distance, mindist, normalize,
    point_distance, LcssParams, SymbolDistanceTable,
};
pub use evaluation::{EvalReport, GroundTruth};
pub use mining::{CollisionMatrix, MiningThresholds, ProjectionConfig, TentativeMotif};
pub use representation::{RepresentationConfig, SymbolicSeries};
pub use schema::{ParameterKind, ParameterSchema, Series, Span, Stage, Value};
pub use simulator::{NoiseSpec, SimConfig};

use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row}: timestamps not increasing ({prev} then {next})")]
    TimestampsNotIncreasing { row: usize, prev: f64, next: f64 },
    #[error("row {row}, column {col} ({name}): value out of alphabet ({value} not in 1..={cardinality})")]
    ValueOutOfAlphabet {
        row: usize,
        col: usize,
        name: String,
        value: u32,
        cardinality: u32,
    },
    #[error("row {row}, column {col} ({name}): {reason}")]
    BadCell {
        row: usize,
        col: usize,
        name: String,
        reason: String,
    },
    #[error("row {row}: expected {expected} values, found {found}")]
    RowWidth {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("parameter {name}: {reason}")]
    BadSchema { name: String, reason: String },
    #[error("span [{start}, {end}] invalid for length {len}")]
    BadSpan { start: usize, end: usize, len: usize },
    #[error("series schemas do not match: {0}")]
    SchemaMismatch(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("{0}")]
    InvalidConfig(String),
    #[error("symbolic words have different lengths ({0} vs {1})")]
    WordLengthMismatch(usize, usize),
    #[error("parameter {name}: missing breakpoints (run breakpoint fitting first)")]
    MissingBreakpoints { name: String },
    #[error("simulation: {0}")]
    Simulation(String),
    #[error("evaluation: {0}")]
    Evaluation(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Derives an independent sub-seed from a run seed and a component tag, so
/// that every randomized stage draws from its own stream.
pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in seed.to_le_bytes() {
        h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
    }
    for b in tag.bytes() {
        h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
