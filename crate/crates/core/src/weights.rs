//! Weights and Muckenhoupt-type characteristics over in-window dyadic intervals.
//!
//! Weights are only defined on the window, so suprema range over in-window
//! intervals; ancestors are skipped.

use serde::{Deserialize, Serialize};

use crate::error::{DyadicError, Result};
use crate::function::{common_window, StepFunction};
use crate::grid::Window;
use crate::Extremum;

/// A step function with strictly positive, finite cell values.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight(StepFunction);

impl Weight {
    pub fn new(f: StepFunction) -> Result<Self> {
        if let Some((cell, &value)) = f
            .cells()
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(DyadicError::NonPositiveWeight { cell, value });
        }
        Ok(Weight(f))
    }

    pub fn uniform(window: Window) -> Self {
        Weight(StepFunction::constant(window, 1.0))
    }

    pub fn function(&self) -> &StepFunction {
        &self.0
    }

    pub fn window(&self) -> &Window {
        self.0.window()
    }

    pub fn cells(&self) -> &[f64] {
        self.0.cells()
    }

    pub fn refine(&self, resolution_log: i32) -> Result<Weight> {
        Ok(Weight(self.0.refine(resolution_log)?))
    }
}

/// `P⃗ = (p_1, .., p_m)` with `1/p = Σ 1/p_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ExponentVector {
    p_list: Vec<f64>,
    p: f64,
}

impl ExponentVector {
    pub fn new(p_list: Vec<f64>) -> Result<Self> {
        if p_list.is_empty() {
            return Err(DyadicError::param("exponents", "need at least one exponent"));
        }
        if let Some(bad) = p_list.iter().find(|p| !(**p >= 1.0 && p.is_finite())) {
            return Err(DyadicError::param(
                "exponents",
                format!("each p_j must lie in [1, inf), got {bad}"),
            ));
        }
        let p = 1.0 / p_list.iter().map(|p| 1.0 / p).sum::<f64>();
        Ok(ExponentVector { p_list, p })
    }

    pub fn p_list(&self) -> &[f64] {
        &self.p_list
    }

    /// The aggregate exponent `p`.
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn arity(&self) -> usize {
        self.p_list.len()
    }

    /// `p_j'`, or `None` for `p_j = 1`.
    pub fn conjugate(&self, j: usize) -> Option<f64> {
        let pj = self.p_list[j];
        (pj > 1.0).then(|| pj / (pj - 1.0))
    }

    /// `P⃗ / r`.
    pub fn divided_by(&self, r: f64) -> Result<ExponentVector> {
        ExponentVector::new(self.p_list.iter().map(|p| p / r).collect())
    }
}

impl TryFrom<Vec<f64>> for ExponentVector {
    type Error = DyadicError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        ExponentVector::new(v)
    }
}

impl From<ExponentVector> for Vec<f64> {
    fn from(e: ExponentVector) -> Self {
        e.p_list
    }
}

/// `w⃗ = (w_1, .., w_m)` paired with `P⃗`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<Weight>,
    exponents: ExponentVector,
}

impl WeightVector {
    pub fn new(weights: Vec<Weight>, exponents: ExponentVector) -> Result<Self> {
        if weights.len() != exponents.arity() {
            return Err(DyadicError::ArityMismatch {
                expected: exponents.arity(),
                got: weights.len(),
            });
        }
        let fs: Vec<StepFunction> = weights.iter().map(|w| w.0.clone()).collect();
        common_window(&fs)?;
        let wv = WeightVector { weights, exponents };
        // ν must itself be a weight
        nu_weight(&wv)?;
        Ok(wv)
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn exponents(&self) -> &ExponentVector {
        &self.exponents
    }

    pub fn window(&self) -> &Window {
        self.weights[0].window()
    }
}

/// `w(E) = ∫_E w` for a union of cells.
pub fn weight_measure(w: &Weight, cells: impl IntoIterator<Item = usize>) -> f64 {
    let vals = w.cells();
    cells.into_iter().map(|c| vals[c]).sum::<f64>() * w.window().cell_length()
}

/// Runs `stat` on the cells of every in-window interval; the result is
/// indexed like [`Window::enumerate`] with ancestors left at `NAN`.
fn per_interval(window: &Window, cells: &[f64], stat: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut out = vec![f64::NAN; window.interval_count()];
    let n = window.resolution_log();
    for k in window.scales() {
        let width = 1usize << (n - k);
        let base = window.level_base(k);
        for (p, chunk) in cells.chunks(width).enumerate() {
            out[base + p] = stat(chunk);
        }
    }
    out
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn min_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

/// `<w^(-s)>^(1/s)` relative to `lo = min w`, i.e. `lo <w^(-s)>^(1/s)`, evaluated
/// as `<(lo / w)^s>^(1/s)` so that large `s` (exponents near 1) cannot overflow.
fn scaled_negative_power_mean(xs: &[f64], lo: f64, s: f64) -> f64 {
    if s == 1.0 {
        return xs.iter().map(|&v| lo / v).sum::<f64>() / xs.len() as f64;
    }
    let inner = xs.iter().map(|&v| (lo / v).powf(s)).sum::<f64>() / xs.len() as f64;
    inner.powf(1.0 / s)
}

/// `<w>_I / min_I w`.
fn scaled_mean(xs: &[f64], lo: f64) -> f64 {
    xs.iter().map(|&v| v / lo).sum::<f64>() / xs.len() as f64
}

fn in_window_max(window: &Window, table: &[f64]) -> Extremum {
    Extremum::max_over(
        window,
        table,
        2 * window.ancestor_depth() as usize..window.interval_count(),
    )
}

/// `[w]_{A_p} = sup_I <w>_I <w^(-1/(p-1))>_I^(p-1)`, for `p > 1`.
pub fn ap_characteristic(w: &Weight, p: f64) -> Result<Extremum> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(DyadicError::param(
            "p",
            format!("A_p needs p > 1 (got {p}); use a1_characteristic for p = 1"),
        ));
    }
    let s = 1.0 / (p - 1.0);
    // the interval minimum cancels between the two factors
    let table = per_interval(w.window(), w.cells(), |c| {
        let lo = min_of(c);
        scaled_mean(c, lo) * scaled_negative_power_mean(c, lo, s)
    });
    Ok(in_window_max(w.window(), &table))
}

/// `[w]_{A_1} = sup_I <w>_I ‖w^-1‖_{L^∞(I)}`.
pub fn a1_characteristic(w: &Weight) -> Extremum {
    let table = per_interval(w.window(), w.cells(), |c| scaled_mean(c, min_of(c)));
    in_window_max(w.window(), &table)
}

/// Default `p` grid for the `A_∞` estimate: `1 + 2^-t` for `t = -4..=8` and `{2, 4, 8, 16}`.
pub fn default_ainf_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (-4..=8).map(|t| 1.0 + 2f64.powi(-t)).collect();
    grid.extend([2.0, 4.0, 8.0, 16.0]);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AinfEstimate {
    /// `min_p [w]_{A_p}` over the grid: an upper bound for `[w]_{A_∞}`.
    pub value: f64,
    pub p: f64,
    pub extremum: Extremum,
}

/// `min` over the grid of `[w]_{A_p}`.
pub fn ainf_estimate(w: &Weight, p_grid: &[f64]) -> Result<AinfEstimate> {
    if p_grid.is_empty() {
        return Err(DyadicError::param("p_grid", "must be nonempty"));
    }
    let mut best: Option<AinfEstimate> = None;
    for &p in p_grid {
        let e = ap_characteristic(w, p)?;
        if best.is_none_or(|b| e.value < b.value) {
            best = Some(AinfEstimate {
                value: e.value,
                p,
                extremum: e,
            });
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// `ν_w = Π_j w_j^(p/p_j)`.
pub fn nu_weight(wv: &WeightVector) -> Result<Weight> {
    let window = *wv.window();
    let p = wv.exponents.p();
    let mut cells = vec![1.0; window.cell_count()];
    for (w, &pj) in wv.weights.iter().zip(wv.exponents.p_list()) {
        let e = p / pj;
        for (c, &v) in cells.iter_mut().zip(w.cells()) {
            *c *= v.powf(e);
        }
    }
    Weight::new(StepFunction::new(window, cells)?)
}

/// `sup_I <ν_w>_I^(1/p) Π_j <w_j^(1-p_j')>_I^(1/p_j')`, with the `p_j = 1`
/// factor read as `‖w_j^-1‖_{L^∞(I)}`.
pub fn multilinear_ap_characteristic(wv: &WeightVector) -> Result<Extremum> {
    let window = *wv.window();
    let nu = nu_weight(wv)?;
    let p = wv.exponents.p();
    let mut table = per_interval(&window, nu.cells(), |c| mean(c).powf(1.0 / p));
    for (w, &pj) in wv.weights.iter().zip(wv.exponents.p_list()) {
        let factor = if pj == 1.0 {
            per_interval(&window, w.cells(), |c| 1.0 / min_of(c))
        } else {
            let s = 1.0 / (pj - 1.0);
            per_interval(&window, w.cells(), |c| {
                let lo = min_of(c);
                (scaled_negative_power_mean(c, lo, s) / lo).powf(1.0 / pj)
            })
        };
        for (t, f) in table.iter_mut().zip(factor) {
            *t *= f;
        }
    }
    Ok(in_window_max(&window, &table))
}
