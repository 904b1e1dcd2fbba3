//! Dyadic BMO norms. Suprema range over the full interval enumeration,
//! ancestors included, with `b` extended by zero outside the window.

use crate::error::{DyadicError, Result};
use crate::function::StepFunction;
use crate::grid::{Side, Window};
use crate::haar::HaarAnalysis;
use crate::maximal::mean_oscillations;
use crate::Extremum;

fn sup(window: &Window, table: &[f64]) -> Extremum {
    Extremum::max_over(window, table, 0..window.interval_count())
}

/// `sup_I <|b - <b>_I|>_I`.
pub fn bmo_norm(b: &StepFunction) -> Extremum {
    let w = b.window();
    sup(w, &mean_oscillations(w, b.cells(), 1.0))
}

/// `(sup_I <|b - <b>_I|^r>_I)^(1/r)`.
pub fn bmo_r_norm(b: &StepFunction, r: f64) -> Result<Extremum> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(DyadicError::param("r", format!("must be positive, got {r}")));
    }
    let w = b.window();
    let mut e = sup(w, &mean_oscillations(w, b.cells(), r));
    e.value = e.value.powf(1.0 / r);
    Ok(e)
}

/// `sup_I ((1/|I|) Σ_{J ⊆ I} <b, h_J>^2)^(1/2)`.
///
/// The inner sums are accumulated bottom-up: each interval adds its own
/// squared coefficient to its children's energies, and each ancestor adds its
/// coefficient to the energy of the next smaller ancestor on the same side.
pub fn bmo2_haar(b: &StepFunction) -> Extremum {
    let w = b.window();
    let coef = HaarAnalysis::new(b).coefficients().to_vec();
    let mut energy = vec![0.0; w.interval_count()];
    let n = w.resolution_log();
    let k0 = -w.half_extent_log();
    for k in (k0..n).rev() {
        let base = w.level_base(k);
        let child = w.level_base(k + 1);
        for p in 0..w.level_len(k) {
            let c = coef[base + p];
            energy[base + p] = c * c + energy[child + 2 * p] + energy[child + 2 * p + 1];
        }
    }
    let top = w.level_base(k0);
    for side in [Side::Negative, Side::Positive] {
        let mut below = energy[top + side.index()];
        for depth in 1..=w.ancestor_depth() {
            let idx = w.ancestor_index(depth, side);
            below += coef[idx] * coef[idx];
            energy[idx] = below;
        }
    }
    let table: Vec<f64> = energy
        .iter()
        .zip(w.enumerate())
        .map(|(e, interval)| (e / interval.length()).sqrt())
        .collect();
    sup(w, &table)
}

/// Cellwise clamp of `b` to `[-j, j]`.
pub fn truncate_bmo(b: &StepFunction, j: f64) -> Result<StepFunction> {
    if !(j > 0.0) {
        return Err(DyadicError::param("j", format!("must be positive, got {j}")));
    }
    Ok(b.map(|v| v.clamp(-j, j)))
}
