//! Exact Haar calculus on a window: averages, coefficients, Haar functions,
//! and the tree-structured analysis/synthesis every operator is built on.
//!
//! `h_I = |I|^(-1/2) (1_{I+} - 1_{I-})`. For an ancestor `I = [0, 2^(K+a))`
//! the window part of `f` sits inside `I-`, so `<f, h_I> = -|I|^(-1/2) ∫_{[0,2^K)} f`;
//! mirrored for `[-2^(K+a), 0)`, whose window part sits inside `I+`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{DyadicError, Result};
use crate::function::StepFunction;
use crate::grid::{exp2i, DyadicInterval, Placement, Side, Window};

/// `2^(e/2)` for an integer `e`.
#[inline]
pub fn pow2_half(e: i32) -> f64 {
    if e % 2 == 0 {
        exp2i(e / 2)
    } else {
        exp2i(e.div_euclid(2)) * std::f64::consts::SQRT_2
    }
}

/// `|I|^(-power/2)`, the height of `h_I^power` on `I`.
#[inline]
pub fn haar_height(scale: i32, power: u32) -> f64 {
    pow2_half(scale * power as i32)
}

/// Averages of arbitrary cell values over every enumerated interval, in flat index order.
///
/// Ancestors only see the window part: `<f>_I = 2^-a <f>_{half window}`.
pub fn interval_averages(window: &Window, cells: &[f64]) -> Vec<f64> {
    debug_assert_eq!(cells.len(), window.cell_count());
    let mut avg = vec![0.0; window.interval_count()];
    let n = window.resolution_log();
    let finest = window.level_base(n);
    avg[finest..].copy_from_slice(cells);
    for k in (-window.half_extent_log()..n).rev() {
        let base = window.level_base(k);
        let child = window.level_base(k + 1);
        for p in 0..window.level_len(k) {
            avg[base + p] = 0.5 * (avg[child + 2 * p] + avg[child + 2 * p + 1]);
        }
    }
    let top = window.level_base(-window.half_extent_log());
    for depth in 1..=window.ancestor_depth() {
        let shrink = exp2i(-(depth as i32));
        for side in [Side::Negative, Side::Positive] {
            avg[window.ancestor_index(depth, side)] = avg[top + side.index()] * shrink;
        }
    }
    avg
}

/// Averages and Haar coefficients of one function for every enumerated interval.
#[derive(Debug, Clone)]
pub struct HaarAnalysis {
    window: Window,
    averages: Vec<f64>,
    coefficients: Vec<f64>,
}

impl HaarAnalysis {
    pub fn new(f: &StepFunction) -> Self {
        let window = *f.window();
        let averages = interval_averages(&window, f.cells());
        let mut coefficients = vec![0.0; window.interval_count()];
        for k in window.scales() {
            if k == window.resolution_log() {
                break;
            }
            let base = window.level_base(k);
            let child = window.level_base(k + 1);
            let half_root = 0.5 * pow2_half(-k);
            for p in 0..window.level_len(k) {
                coefficients[base + p] =
                    half_root * (averages[child + 2 * p + 1] - averages[child + 2 * p]);
            }
        }
        let top = window.level_base(-window.half_extent_log());
        let half_extent = window.half_extent();
        for depth in 1..=window.ancestor_depth() {
            let scale = -(window.half_extent_log() + depth as i32);
            let inv_root = pow2_half(scale);
            for side in [Side::Negative, Side::Positive] {
                let mass = half_extent * averages[top + side.index()];
                let sign = match side {
                    Side::Negative => 1.0,
                    Side::Positive => -1.0,
                };
                coefficients[window.ancestor_index(depth, side)] = sign * inv_root * mass;
            }
        }
        HaarAnalysis {
            window,
            averages,
            coefficients,
        }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// `<f>_I` for every enumerated interval.
    pub fn averages(&self) -> &[f64] {
        &self.averages
    }

    /// `<f, h_I>` for every enumerated interval (zero at the finest scale).
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `f(I, 0) = <f, h_I>` and `f(I, 1) = <f>_I`, by flat index.
    pub fn slot_values(&self, bit: u8) -> &[f64] {
        if bit == 0 {
            &self.coefficients
        } else {
            &self.averages
        }
    }

    fn index(&self, interval: &DyadicInterval) -> Result<usize> {
        self.window.index_of(interval).ok_or_else(|| {
            if interval.scale > self.window.resolution_log() {
                DyadicError::BelowResolution(*interval)
            } else {
                DyadicError::NotInWindow(*interval)
            }
        })
    }

    pub fn average(&self, interval: &DyadicInterval) -> Result<f64> {
        Ok(self.averages[self.index(interval)?])
    }

    pub fn coefficient(&self, interval: &DyadicInterval) -> Result<f64> {
        Ok(self.coefficients[self.index(interval)?])
    }
}

/// `(1/|I|) ∫_I f`, as a cell sum. Ancestors integrate only over the window part.
pub fn average(f: &StepFunction, interval: &DyadicInterval) -> Result<f64> {
    let w = f.window();
    let range = w.cell_range(interval)?;
    let sum: f64 = f.cells()[range].iter().sum();
    Ok(sum * w.cell_length() / interval.length())
}

/// `<f, h_I> = |I|^(-1/2) (∫_{I+} f - ∫_{I-} f)`.
pub fn haar_coefficient(f: &StepFunction, interval: &DyadicInterval) -> Result<f64> {
    let w = f.window();
    match w.placement(interval) {
        Placement::BelowResolution => Err(DyadicError::BelowResolution(*interval)),
        Placement::Outside => Err(DyadicError::NotInWindow(*interval)),
        // f is constant on a single cell
        Placement::InWindow { scale, .. } if scale == w.resolution_log() => Ok(0.0),
        Placement::InWindow { .. } => {
            let minus = w.cell_range(&interval.left_half())?;
            let plus = w.cell_range(&interval.right_half())?;
            let sm: f64 = f.cells()[minus].iter().sum();
            let sp: f64 = f.cells()[plus].iter().sum();
            Ok((sp - sm) * w.cell_length() * haar_height(interval.scale, 1))
        }
        Placement::Ancestor { side, .. } => {
            let mass: f64 = f.cells()[w.cell_range(interval)?].iter().sum::<f64>() * w.cell_length();
            let h = haar_height(interval.scale, 1);
            Ok(match side {
                Side::Negative => h * mass,
                Side::Positive => -h * mass,
            })
        }
    }
}

/// `h_I` as a step function, clipped to the window for ancestors.
pub fn haar_function(interval: &DyadicInterval, window: &Window) -> Result<StepFunction> {
    let h = haar_height(interval.scale, 1);
    let mut cells = vec![0.0; window.cell_count()];
    match window.placement(interval) {
        Placement::BelowResolution => return Err(DyadicError::BelowResolution(*interval)),
        Placement::Outside => return Err(DyadicError::NotInWindow(*interval)),
        Placement::InWindow { scale, .. } if scale == window.resolution_log() => {
            return Err(DyadicError::UnresolvableHalves(*interval))
        }
        Placement::InWindow { .. } => {
            cells[window.cell_range(&interval.left_half())?].fill(-h);
            cells[window.cell_range(&interval.right_half())?].fill(h);
        }
        Placement::Ancestor { side, .. } => {
            let value = match side {
                Side::Negative => h,
                Side::Positive => -h,
            };
            cells[window.cell_range(interval)?].fill(value);
        }
    }
    StepFunction::new(*window, cells)
}

/// `sum_I c_I h_I^power` over every enumerated interval, evaluated on the window.
///
/// `coefficients` is indexed like [`Window::enumerate`]. `h_I^0` is `1_I`. For
/// `power >= 1` finest-scale entries are ignored: their halves are not
/// resolvable and every operator's coefficient vanishes there.
///
/// Each term is deposited once on the level below its interval and the
/// deposits are pushed down the tree, so the cost is linear in the number of
/// intervals and every cell value is summed along its root-to-leaf chain in a
/// fixed order.
pub fn synthesize(window: &Window, coefficients: &[f64], power: u32) -> StepFunction {
    assert_eq!(coefficients.len(), window.interval_count());
    let mut acc = vec![0.0; window.interval_count()];
    let k0 = -window.half_extent_log();
    let top = window.level_base(k0);
    let odd = power % 2 == 1;

    for depth in 1..=window.ancestor_depth() {
        let scale = k0 - depth as i32;
        let height = haar_height(scale, power);
        for side in [Side::Negative, Side::Positive] {
            let c = coefficients[window.ancestor_index(depth, side)];
            if c == 0.0 {
                continue;
            }
            let value = if power == 0 {
                c
            } else if side == Side::Positive && odd {
                // the window part of a positive ancestor is its left half
                -c * height
            } else {
                c * height
            };
            acc[top + side.index()] += value;
        }
    }

    let n = window.resolution_log();
    for k in window.scales() {
        let base = window.level_base(k);
        if power == 0 {
            for p in 0..window.level_len(k) {
                acc[base + p] += coefficients[base + p];
            }
            continue;
        }
        if k == n {
            break;
        }
        let child = window.level_base(k + 1);
        let height = haar_height(k, power);
        let left_sign = if odd { -1.0 } else { 1.0 };
        for p in 0..window.level_len(k) {
            let c = coefficients[base + p];
            if c == 0.0 {
                continue;
            }
            let v = c * height;
            acc[child + 2 * p] += left_sign * v;
            acc[child + 2 * p + 1] += v;
        }
    }

    for k in k0..n {
        let base = window.level_base(k);
        let child = window.level_base(k + 1);
        for p in 0..window.level_len(k) {
            let v = acc[base + p];
            acc[child + 2 * p] += v;
            acc[child + 2 * p + 1] += v;
        }
    }
    let cells = acc.split_off(window.level_base(n));
    StepFunction::new(*window, cells).expect("finest level has one entry per cell")
}

/// The in-window Haar expansion of a step function:
/// `f = <f>_{S''} 1_{S''} + <f>_{S'} 1_{S'} + sum_I <f, h_I> h_I`
/// with `S'' = [-2^K, 0)`, `S' = [0, 2^K)` and `I` ranging over in-window
/// intervals coarser than the cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarExpansion {
    pub window: Window,
    /// `(<f>_{S''}, <f>_{S'})`.
    pub averages: (f64, f64),
    #[serde(with = "coefficient_list_serde")]
    pub coefficients: BTreeMap<DyadicInterval, f64>,
}

pub(crate) mod coefficient_list_serde {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::grid::DyadicInterval;

    #[derive(Serialize, Deserialize)]
    struct Entry {
        k: i32,
        m: i64,
        value: f64,
    }

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<DyadicInterval, f64>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = map
            .iter()
            .map(|(i, &value)| Entry {
                k: i.scale,
                m: i.offset,
                value,
            })
            .collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<DyadicInterval, f64>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        Ok(entries
            .into_iter()
            .map(|e| (DyadicInterval::new(e.k, e.m), e.value))
            .collect())
    }
}

/// All in-window Haar coefficients (scales `-K ..= N-1`) and the two half-window averages.
pub fn analyze(f: &StepFunction) -> HaarExpansion {
    let window = *f.window();
    let a = HaarAnalysis::new(f);
    let top = window.level_base(-window.half_extent_log());
    let mut coefficients = BTreeMap::new();
    for k in window.scales() {
        if k == window.resolution_log() {
            break;
        }
        let base = window.level_base(k);
        for p in 0..window.level_len(k) {
            coefficients.insert(window.interval_at(base + p), a.coefficients[base + p]);
        }
    }
    HaarExpansion {
        window,
        averages: (a.averages[top], a.averages[top + 1]),
        coefficients,
    }
}

/// Inverse of [`analyze`].
pub fn reconstruct(
    coefficients: &BTreeMap<DyadicInterval, f64>,
    window_averages: (f64, f64),
    window: &Window,
) -> Result<StepFunction> {
    let mut flat = vec![0.0; window.interval_count()];
    for (interval, &c) in coefficients {
        match window.placement(interval) {
            Placement::InWindow { scale, position } if scale < window.resolution_log() => {
                flat[window.level_base(scale) + position] = c;
            }
            Placement::InWindow { .. } => {
                if c != 0.0 {
                    return Err(DyadicError::UnresolvableHalves(*interval));
                }
            }
            Placement::BelowResolution => return Err(DyadicError::BelowResolution(*interval)),
            _ => return Err(DyadicError::NotInWindow(*interval)),
        }
    }
    let mut f = synthesize(window, &flat, 1);
    let half = window.half_cells();
    let (neg, pos) = window_averages;
    for (i, v) in f.cells_mut().iter_mut().enumerate() {
        *v += if i < half { neg } else { pos };
    }
    Ok(f)
}

impl HaarExpansion {
    pub fn reconstruct(&self) -> Result<StepFunction> {
        reconstruct(&self.coefficients, self.averages, &self.window)
    }
}
