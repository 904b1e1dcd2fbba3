//! Weighted strong and weak Lebesgue norms, and their normalized local versions.

use crate::error::{DyadicError, Result};
use crate::function::StepFunction;
use crate::grid::DyadicInterval;
use crate::weights::Weight;

fn check_exponent(name: &'static str, p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(DyadicError::param(name, format!("must be positive, got {p}")));
    }
    Ok(())
}

fn check_window(f: &StepFunction, w: &Weight) -> Result<()> {
    if f.window() != w.window() {
        return Err(DyadicError::WindowMismatch);
    }
    Ok(())
}

/// `(∫ |f|^p w)^(1/p)`.
pub fn lp_norm(f: &StepFunction, p: f64, w: &Weight) -> Result<f64> {
    check_exponent("p", p)?;
    check_window(f, w)?;
    let s: f64 = f
        .cells()
        .iter()
        .zip(w.cells())
        .map(|(v, wc)| v.abs().powf(p) * wc)
        .sum();
    Ok((s * f.window().cell_length()).powf(1.0 / p))
}

/// `max_v v * mass(|f| >= v)^(1/p)` over the distinct positive levels `v`,
/// where `pairs` holds `(|f|, mass)` per cell.
fn weak_from_levels(mut pairs: Vec<(f64, f64)>, p: f64) -> f64 {
    pairs.retain(|(v, _)| *v > 0.0);
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best: f64 = 0.0;
    let mut mass = 0.0;
    let mut i = 0;
    while i < pairs.len() {
        let v = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == v {
            mass += pairs[i].1;
            i += 1;
        }
        best = best.max(v * mass.powf(1.0 / p));
    }
    best
}

/// `sup_t t w({|f| > t})^(1/p)`, attained as `t` increases to a level of `|f|`.
pub fn weak_lp_norm(f: &StepFunction, p: f64, w: &Weight) -> Result<f64> {
    check_exponent("p", p)?;
    check_window(f, w)?;
    let dx = f.window().cell_length();
    let pairs = f
        .cells()
        .iter()
        .zip(w.cells())
        .map(|(v, wc)| (v.abs(), wc * dx))
        .collect();
    Ok(weak_from_levels(pairs, p))
}

/// `((1/|I|) ∫_I |f|^p)^(1/p)`.
pub fn localized_lp_norm(f: &StepFunction, interval: &DyadicInterval, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    let range = f.window().cell_range(interval)?;
    let s: f64 = f.cells()[range].iter().map(|v| v.abs().powf(p)).sum();
    Ok((s * f.window().cell_length() / interval.length()).powf(1.0 / p))
}

/// Weak `L^q` norm of `f` on `I` with respect to `dy / |I|`.
pub fn localized_weak_norm(f: &StepFunction, interval: &DyadicInterval, q: f64) -> Result<f64> {
    check_exponent("q", q)?;
    let range = f.window().cell_range(interval)?;
    let mass = f.window().cell_length() / interval.length();
    let pairs = f.cells()[range].iter().map(|v| (v.abs(), mass)).collect();
    Ok(weak_from_levels(pairs, q))
}

/// `‖f‖_{L^p(I, dy/|I|)} / ‖f‖_{L^{q,∞}(I, dy/|I|)}`, zero when `f` vanishes on `I`.
pub fn kolmogorov_ratio(f: &StepFunction, interval: &DyadicInterval, p: f64, q: f64) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    if p >= q {
        return Err(DyadicError::param("p", format!("need p < q, got p={p}, q={q}")));
    }
    let strong = localized_lp_norm(f, interval, p)?;
    let weak = localized_weak_norm(f, interval, q)?;
    Ok(if weak == 0.0 { 0.0 } else { strong / weak })
}

/// `(q / (q - p))^(1/p)`.
pub fn kolmogorov_constant(p: f64, q: f64) -> f64 {
    (q / (q - p)).powf(1.0 / p)
}
