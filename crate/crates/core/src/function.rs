use std::ops::Range;

use crate::error::{DyadicError, Result};
use crate::grid::{DyadicInterval, Window};

/// A real function constant on the finest cells of a window and zero outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    window: Window,
    cells: Vec<f64>,
}

impl StepFunction {
    pub fn new(window: Window, cells: Vec<f64>) -> Result<Self> {
        if cells.len() != window.cell_count() {
            return Err(DyadicError::CellCount {
                expected: window.cell_count(),
                got: cells.len(),
            });
        }
        Ok(StepFunction { window, cells })
    }

    pub fn zero(window: Window) -> Self {
        Self::constant(window, 0.0)
    }

    pub fn constant(window: Window, value: f64) -> Self {
        StepFunction {
            window,
            cells: vec![value; window.cell_count()],
        }
    }

    pub fn from_fn(window: Window, mut f: impl FnMut(f64) -> f64) -> Self {
        let cells = (0..window.cell_count())
            .map(|i| f(window.cell_left(i)))
            .collect();
        StepFunction { window, cells }
    }

    /// `c 1_I`, clipped to the window for ancestors.
    pub fn indicator(window: Window, interval: &DyadicInterval, value: f64) -> Result<Self> {
        let range = window.cell_range(interval)?;
        let mut cells = vec![0.0; window.cell_count()];
        cells[range].fill(value);
        Ok(StepFunction { window, cells })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [f64] {
        &mut self.cells
    }

    pub fn into_cells(self) -> Vec<f64> {
        self.cells
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> StepFunction {
        StepFunction {
            window: self.window,
            cells: self.cells.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn abs(&self) -> StepFunction {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> StepFunction {
        self.map(|v| c * v)
    }

    fn zip_with(&self, other: &StepFunction, f: impl Fn(f64, f64) -> f64) -> Result<StepFunction> {
        if self.window != other.window {
            return Err(DyadicError::WindowMismatch);
        }
        Ok(StepFunction {
            window: self.window,
            cells: self
                .cells
                .iter()
                .zip(&other.cells)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Cellwise product `g f`.
    pub fn mul(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |a, b| a * b)
    }

    /// `f 1_I`.
    pub fn restrict(&self, interval: &DyadicInterval) -> Result<StepFunction> {
        let range = self.window.cell_range(interval)?;
        Ok(self.restrict_cells(range))
    }

    pub fn restrict_cells(&self, range: Range<usize>) -> StepFunction {
        let mut cells = vec![0.0; self.cells.len()];
        cells[range.clone()].copy_from_slice(&self.cells[range]);
        StepFunction {
            window: self.window,
            cells,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.cells.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(|&v| v == 0.0)
    }

    /// `∫ f`, as an exact cell sum.
    pub fn integral(&self) -> f64 {
        self.cells.iter().sum::<f64>() * self.window.cell_length()
    }

    /// `∫ f g` over the window.
    pub fn inner(&self, other: &StepFunction) -> Result<f64> {
        if self.window != other.window {
            return Err(DyadicError::WindowMismatch);
        }
        let s: f64 = self.cells.iter().zip(&other.cells).map(|(a, b)| a * b).sum();
        Ok(s * self.window.cell_length())
    }

    /// The same function on a finer grid: each cell is split into `2^(n - N)` equal cells.
    pub fn refine(&self, resolution_log: i32) -> Result<StepFunction> {
        let n = self.window.resolution_log();
        if resolution_log < n {
            return Err(DyadicError::param(
                "resolution_log",
                format!("cannot refine from N={n} to coarser N={resolution_log}"),
            ));
        }
        let window = self.window.with_resolution(resolution_log)?;
        let factor = 1usize << (resolution_log - n);
        let cells = self
            .cells
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, factor))
            .collect();
        Ok(StepFunction { window, cells })
    }

    /// Zero-extends onto a larger window with the same resolution.
    pub fn embed(&self, outer: Window) -> Result<StepFunction> {
        let inner = self.window;
        if outer.resolution_log() != inner.resolution_log()
            || outer.half_extent_log() < inner.half_extent_log()
        {
            return Err(DyadicError::param(
                "outer",
                "embedding needs the same resolution and a wider window",
            ));
        }
        let mut cells = vec![0.0; outer.cell_count()];
        let start = outer.half_cells() - inner.half_cells();
        cells[start..start + inner.cell_count()].copy_from_slice(&self.cells);
        Ok(StepFunction {
            window: outer,
            cells,
        })
    }

    /// Same cells, different ancestor depth.
    pub fn with_window(&self, window: Window) -> Result<StepFunction> {
        StepFunction::new(window, self.cells.clone())
    }
}

/// Checks that all functions share the first one's window.
pub(crate) fn common_window(fs: &[StepFunction]) -> Result<Window> {
    let first = fs.first().ok_or(DyadicError::ArityMismatch {
        expected: 1,
        got: 0,
    })?;
    if fs.iter().any(|f| f.window != first.window) {
        return Err(DyadicError::WindowMismatch);
    }
    Ok(first.window)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refine_and_embed_preserve_integral() {
        let w = Window::new(0, 2, 0).unwrap();
        let f = StepFunction::new(w, vec![1.0, -2.0, 3.0, 0.5, 0.0, 1.0, 2.0, 4.0]).unwrap();
        let r = f.refine(5).unwrap();
        assert_eq!(r.cells().len(), 64);
        assert_eq!(r.integral(), f.integral());
        let e = f.embed(Window::new(2, 2, 0).unwrap()).unwrap();
        assert_eq!(e.integral(), f.integral());
        assert_eq!(e.cells()[12..20], *f.cells());
    }

    #[test]
    fn wrong_length_rejected() {
        let w = Window::new(0, 1, 0).unwrap();
        assert_eq!(
            StepFunction::new(w, vec![0.0; 3]),
            Err(DyadicError::CellCount {
                expected: 4,
                got: 3
            })
        );
    }
}
