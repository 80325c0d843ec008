//! Multi-frequency Calderón–Zygmund decomposition and variational operator
//! toolkit for discretely sampled signals.
//!
//! The crate splits into five layers:
//!
//! * [`grid`] — sampled signals on uniform grids, intervals, quadrature and
//!   DFT multiplier application,
//! * [`variation`] — exact r-variation norms, λ-jump covers, the recursive
//!   parent function and the dyadic left-child index blocks,
//! * [`expspan`] — finite spans of complex exponentials: Gram matrices,
//!   minimal-norm moment matching and the evaluation-kernel bound,
//! * [`czdecomp`] — the multi-frequency Calderón–Zygmund pipeline,
//! * [`multifreq`] — dyadic frequency multipliers, the variational operator
//!   and the empirical scaling harnesses.
//!
//! Frequency convention: all frequencies are in `e^{2πiξx}` units, so a
//! frequency of 1 means one full oscillation per unit length.

pub mod check;
pub mod corpus;
pub mod czdecomp;
pub mod expspan;
pub mod grid;
pub mod io;
pub mod multifreq;
pub mod variation;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty sequence")]
    EmptySequence,
    #[error("sequence too long for brute-force enumeration: {len} > {max}")]
    TooLongForBruteForce { len: usize, max: usize },
    #[error("frequencies must be strictly increasing (violated at index {0})")]
    FrequenciesNotIncreasing(usize),
    #[error("frequency gap {gap:e} below resolvable threshold {threshold:e}")]
    NearCoincidentFrequencies { gap: f64, threshold: f64 },
    #[error("lambda0 = {lambda0} out of range: must lie in (0, {min_distance}) \
             (minimal distance between distinct values)")]
    Lambda0OutOfRange { lambda0: f64, min_distance: f64 },
    #[error("scale k = {k} outside valid range [{lo}, {hi}]")]
    ScaleOutOfRange { k: i32, lo: i32, hi: i32 },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed input at row {row}: {message}")]
    Malformed { row: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
