//! Exact dyadic harmonic analysis on finite windows.
//!
//! Functions are [`StepFunction`]s constant on the finest cells of a
//! [`Window`] `[-2^K, 2^K)`. Every average, Haar coefficient, operator value
//! and supremum is a finite sum or maximum over the window's dyadic interval
//! enumeration, which also carries a configurable number of ancestor levels
//! `[0, 2^(K+a))`, `[-2^(K+a), 0)` so that tails of infinite dyadic sums are
//! truncated at a known depth.

pub mod bmo;
pub mod error;
pub mod function;
pub mod grid;
pub mod haar;
pub mod io;
pub mod maximal;
pub mod norms;
pub mod operators;
pub mod weights;

pub use error::{DyadicError, Result};
pub use function::StepFunction;
pub use grid::{DyadicInterval, Side, Window};
pub use haar::{HaarAnalysis, HaarExpansion};
pub use operators::{DyadicOperator, MultiIndex, SymbolSequence};
pub use weights::{ExponentVector, Weight, WeightVector};

/// A supremum over the interval enumeration together with an interval attaining it.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Extremum {
    pub value: f64,
    pub interval: DyadicInterval,
}

impl Extremum {
    /// Maximum of `values` over the given flat indices; the first maximizer wins ties.
    pub(crate) fn max_over(
        window: &Window,
        values: &[f64],
        indices: impl Iterator<Item = usize>,
    ) -> Extremum {
        let mut best: Option<(usize, f64)> = None;
        for i in indices {
            let v = values[i];
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        let (i, value) = best.expect("interval enumeration is never empty");
        Extremum {
            value,
            interval: window.interval_at(i),
        }
    }
}
