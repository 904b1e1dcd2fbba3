//! Dyadic maximal operators as exact maxima over the interval enumeration.
//!
//! Every operator here builds one per-interval table (averages, products of
//! averages, or oscillations) bottom-up and then takes, for each cell, the
//! maximum over the chain of intervals containing it in a single top-down pass.

use crate::error::{DyadicError, Result};
use crate::function::{common_window, StepFunction};
use crate::grid::{exp2i, Side, Window};
use crate::haar::interval_averages;

/// For each cell, the maximum of `table` over every enumerated interval containing it.
pub fn max_over_containing(window: &Window, table: &[f64]) -> Vec<f64> {
    assert_eq!(table.len(), window.interval_count());
    let k0 = -window.half_extent_log();
    let top = window.level_base(k0);
    let mut current = vec![table[top], table[top + 1]];
    for depth in 1..=window.ancestor_depth() {
        for side in [Side::Negative, Side::Positive] {
            let v = table[window.ancestor_index(depth, side)];
            current[side.index()] = current[side.index()].max(v);
        }
    }
    for k in k0 + 1..=window.resolution_log() {
        let base = window.level_base(k);
        current = (0..window.level_len(k))
            .map(|c| current[c / 2].max(table[base + c]))
            .collect();
    }
    current
}

/// `inf_c (1/|I|) ∫_I |f - c|` for every enumerated interval.
///
/// The infimum is attained at a median of the cell values (cells have equal
/// length). Sorted runs are merged bottom-up, one level at a time. For an
/// ancestor the zero-extension outside the window carries at least half of
/// the mass, so 0 is a median and the value is `<|f|>_I`.
pub fn median_oscillations(window: &Window, cells: &[f64]) -> Vec<f64> {
    assert_eq!(cells.len(), window.cell_count());
    let mut out = vec![0.0; window.interval_count()];
    let n = window.resolution_log();
    let mut sorted = cells.to_vec();
    let mut buffer = vec![0.0; sorted.len()];
    for k in (-window.half_extent_log()..=n).rev() {
        let width = 1usize << (n - k);
        let base = window.level_base(k);
        for (p, chunk) in sorted.chunks(width).enumerate() {
            let median = chunk[(width - 1) / 2];
            let spread: f64 = chunk.iter().map(|v| (v - median).abs()).sum();
            out[base + p] = spread / width as f64;
        }
        if k > -window.half_extent_log() {
            for (pair, dst) in sorted.chunks(2 * width).zip(buffer.chunks_mut(2 * width)) {
                merge_sorted(&pair[..width], &pair[width..], dst);
            }
            std::mem::swap(&mut sorted, &mut buffer);
        }
    }
    fill_ancestor_abs_means(window, cells, &mut out);
    out
}

fn merge_sorted(a: &[f64], b: &[f64], dst: &mut [f64]) {
    let (mut i, mut j) = (0, 0);
    for slot in dst.iter_mut() {
        if j >= b.len() || (i < a.len() && a[i].total_cmp(&b[j]).is_le()) {
            *slot = a[i];
            i += 1;
        } else {
            *slot = b[j];
            j += 1;
        }
    }
}

fn fill_ancestor_abs_means(window: &Window, cells: &[f64], out: &mut [f64]) {
    let h = window.half_cells();
    let half_abs = [
        cells[..h].iter().map(|v| v.abs()).sum::<f64>() / h as f64,
        cells[h..].iter().map(|v| v.abs()).sum::<f64>() / h as f64,
    ];
    for depth in 1..=window.ancestor_depth() {
        for side in [Side::Negative, Side::Positive] {
            out[window.ancestor_index(depth, side)] =
                half_abs[side.index()] * exp2i(-(depth as i32));
        }
    }
}

/// `(1/|I|) ∫_I |f - <f>_I|^r` for every enumerated interval (no outer root).
///
/// Ancestors account for the zero extension: the part of `I` outside the
/// window contributes `(|I| - 2^K) |<f>_I|^r`.
pub fn mean_oscillations(window: &Window, cells: &[f64], r: f64) -> Vec<f64> {
    let averages = interval_averages(window, cells);
    let mut out = vec![0.0; window.interval_count()];
    let n = window.resolution_log();
    let pow = |x: f64| if r == 1.0 { x } else { x.powf(r) };
    for k in window.scales() {
        let width = 1usize << (n - k);
        let base = window.level_base(k);
        for (p, chunk) in cells.chunks(width).enumerate() {
            let mu = averages[base + p];
            let s: f64 = chunk.iter().map(|v| pow((v - mu).abs())).sum();
            out[base + p] = s / width as f64;
        }
    }
    let h = window.half_cells();
    for depth in 1..=window.ancestor_depth() {
        let shrink = exp2i(-(depth as i32));
        for side in [Side::Negative, Side::Positive] {
            let idx = window.ancestor_index(depth, side);
            let mu = averages[idx];
            let part = match side {
                Side::Negative => &cells[..h],
                Side::Positive => &cells[h..],
            };
            let inside: f64 = part.iter().map(|v| pow((v - mu).abs())).sum::<f64>() / h as f64;
            out[idx] = shrink * inside + (1.0 - shrink) * pow(mu.abs());
        }
    }
    out
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(DyadicError::param(name, format!("must be positive, got {value}")));
    }
    Ok(())
}

fn from_cells(window: &Window, cells: Vec<f64>) -> StepFunction {
    StepFunction::new(*window, cells).expect("one value per cell")
}

/// `Mf(x) = max_{I ∋ x} <|f|>_I`.
pub fn maximal(f: &StepFunction) -> StepFunction {
    let w = f.window();
    let abs: Vec<f64> = f.cells().iter().map(|v| v.abs()).collect();
    from_cells(w, max_over_containing(w, &interval_averages(w, &abs)))
}

/// `M_δ f = M(|f|^δ)^(1/δ)`.
pub fn maximal_delta(f: &StepFunction, delta: f64) -> Result<StepFunction> {
    check_positive("delta", delta)?;
    let w = f.window();
    let powered: Vec<f64> = f.cells().iter().map(|v| v.abs().powf(delta)).collect();
    let m = max_over_containing(w, &interval_averages(w, &powered));
    Ok(from_cells(
        w,
        m.into_iter().map(|v| v.powf(1.0 / delta)).collect(),
    ))
}

/// `M^# f(x) = max_{I ∋ x} inf_c <|f - c|>_I`.
pub fn sharp_maximal(f: &StepFunction) -> StepFunction {
    let w = f.window();
    from_cells(w, max_over_containing(w, &median_oscillations(w, f.cells())))
}

/// `max_{I ∋ x} <|f - <f>_I|>_I`, comparable to `M^#`: `M^# f <= this <= 2 M^# f`.
pub fn mean_oscillation_maximal(f: &StepFunction) -> StepFunction {
    let w = f.window();
    from_cells(
        w,
        max_over_containing(w, &mean_oscillations(w, f.cells(), 1.0)),
    )
}

/// `M_δ^# f = (M^#(|f|^δ))^(1/δ)` for `0 < δ < 1`.
pub fn sharp_maximal_delta(f: &StepFunction, delta: f64) -> Result<StepFunction> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(DyadicError::param(
            "delta",
            format!("must lie in (0, 1), got {delta}"),
        ));
    }
    let w = f.window();
    let powered: Vec<f64> = f.cells().iter().map(|v| v.abs().powf(delta)).collect();
    let m = max_over_containing(w, &median_oscillations(w, &powered));
    Ok(from_cells(
        w,
        m.into_iter().map(|v| v.powf(1.0 / delta)).collect(),
    ))
}

/// `M(f⃗)(x) = max_{I ∋ x} Π_j <|f_j|>_I`.
pub fn multilinear_maximal(fs: &[StepFunction]) -> Result<StepFunction> {
    multilinear_power_mean(fs, 1.0)
}

/// `M_r(f⃗)(x) = max_{I ∋ x} Π_j <|f_j|^r>_I^(1/r)`.
pub fn multilinear_maximal_r(fs: &[StepFunction], r: f64) -> Result<StepFunction> {
    check_positive("r", r)?;
    multilinear_power_mean(fs, r)
}

fn multilinear_power_mean(fs: &[StepFunction], r: f64) -> Result<StepFunction> {
    let w = common_window(fs)?;
    let mut table = vec![1.0; w.interval_count()];
    for f in fs {
        let powered: Vec<f64> = if r == 1.0 {
            f.cells().iter().map(|v| v.abs()).collect()
        } else {
            f.cells().iter().map(|v| v.abs().powf(r)).collect()
        };
        let avg = interval_averages(&w, &powered);
        for (t, a) in table.iter_mut().zip(avg) {
            *t *= if r == 1.0 { a } else { a.powf(1.0 / r) };
        }
    }
    Ok(from_cells(&w, max_over_containing(&w, &table)))
}
