//! Brute-force reference implementations.
//!
//! These evaluate every definition directly from cell values and interval
//! endpoints, with no shared tables: each interval is treated as a subset of
//! the real line and the function is extended by zero outside the window.

#![allow(dead_code)]

use dyadic_core::{DyadicInterval, StepFunction, Window};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn iv(k: i32, m: i64) -> DyadicInterval {
    DyadicInterval::new(k, m)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

pub fn assert_cells_close(a: &[f64], b: &[f64], tol: f64, what: &str) {
    assert_eq!(a.len(), b.len(), "{what}: length");
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        assert!(close(*x, *y, tol), "{what}: cell {i}: {x} vs {y}");
    }
}

/// Ancestors (deepest first, negative side first), then scales `-K..=N` left to right.
pub fn all_intervals(w: &Window) -> Vec<DyadicInterval> {
    let k = w.half_extent_log();
    let mut out = Vec::new();
    for a in (1..=w.ancestor_depth() as i32).rev() {
        out.push(iv(-(k + a), -1));
        out.push(iv(-(k + a), 0));
    }
    for s in -k..=w.resolution_log() {
        let n = 1i64 << (k + s);
        for m in -n..n {
            out.push(iv(s, m));
        }
    }
    out
}

pub fn in_window_intervals(w: &Window) -> Vec<DyadicInterval> {
    let k = w.half_extent_log();
    all_intervals(w)
        .into_iter()
        .filter(|i| i.scale >= -k)
        .collect()
}

fn cell_bounds(w: &Window, i: usize) -> (f64, f64) {
    let dx = w.cell_length();
    let l = -w.half_extent() + i as f64 * dx;
    (l, l + dx)
}

pub fn cell_in(w: &Window, i: usize, interval: &DyadicInterval) -> bool {
    let (l, r) = cell_bounds(w, i);
    interval.left() <= l && r <= interval.right()
}

/// `∫_J f` with `f` zero outside the window.
pub fn integral_over(w: &Window, cells: &[f64], j: &DyadicInterval) -> f64 {
    (0..cells.len())
        .filter(|&i| cell_in(w, i, j))
        .map(|i| cells[i])
        .sum::<f64>()
        * w.cell_length()
}

pub fn average(w: &Window, cells: &[f64], i: &DyadicInterval) -> f64 {
    integral_over(w, cells, i) / i.length()
}

pub fn is_finest(w: &Window, i: &DyadicInterval) -> bool {
    i.scale >= w.resolution_log()
}

pub fn coefficient(w: &Window, cells: &[f64], i: &DyadicInterval) -> f64 {
    if is_finest(w, i) {
        return 0.0;
    }
    let plus = integral_over(w, cells, &i.right_half());
    let minus = integral_over(w, cells, &i.left_half());
    (plus - minus) / i.length().sqrt()
}

/// `h_I(x)^power` on cell `c`; the interval must be coarser than the cells.
pub fn haar_power(w: &Window, c: usize, i: &DyadicInterval, power: u32) -> f64 {
    if !cell_in(w, c, i) {
        return 0.0;
    }
    let sign = if cell_in(w, c, &i.right_half()) { 1.0 } else { -1.0 };
    i.length().powf(-(power as f64) / 2.0) * f64::powi(sign, power as i32)
}

/// `Σ_I ε_I Π_j f_j(I, α_j) h_I^σ` evaluated cell by cell.
pub fn multilinear_sum(
    w: &Window,
    alpha: &[u8],
    fs: &[&[f64]],
    eps: impl Fn(&DyadicInterval) -> f64,
) -> Vec<f64> {
    let sigma = alpha.iter().filter(|&&b| b == 0).count() as u32;
    let intervals: Vec<DyadicInterval> = all_intervals(w)
        .into_iter()
        .filter(|i| !is_finest(w, i))
        .collect();
    let weights: Vec<f64> = intervals
        .iter()
        .map(|i| {
            let mut prod = eps(i);
            for (f, &bit) in fs.iter().zip(alpha) {
                prod *= if bit == 0 {
                    coefficient(w, f, i)
                } else {
                    average(w, f, i)
                };
            }
            prod
        })
        .collect();
    (0..w.cell_count())
        .map(|c| {
            intervals
                .iter()
                .zip(&weights)
                .map(|(i, p)| p * haar_power(w, c, i, sigma))
                .sum()
        })
        .collect()
}

/// For each cell, the max of `stat` over intervals containing it.
pub fn max_containing(w: &Window, stat: impl Fn(&DyadicInterval) -> f64) -> Vec<f64> {
    let intervals = all_intervals(w);
    let values: Vec<f64> = intervals.iter().map(&stat).collect();
    (0..w.cell_count())
        .map(|c| {
            intervals
                .iter()
                .zip(&values)
                .filter(|(i, _)| cell_in(w, c, i))
                .map(|(_, v)| *v)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

pub fn abs_cells(cells: &[f64]) -> Vec<f64> {
    cells.iter().map(|v| v.abs()).collect()
}

pub fn maximal(w: &Window, cells: &[f64]) -> Vec<f64> {
    let a = abs_cells(cells);
    max_containing(w, |i| average(w, &a, i))
}

/// `<|f - c|>_I` including the zero part of `I` outside the window.
pub fn deviation(w: &Window, cells: &[f64], i: &DyadicInterval, c: f64) -> f64 {
    let dx = w.cell_length();
    let mut inside = 0.0;
    let mut covered = 0.0;
    for (idx, v) in cells.iter().enumerate() {
        if cell_in(w, idx, i) {
            inside += (v - c).abs() * dx;
            covered += dx;
        }
    }
    (inside + (i.length() - covered) * c.abs()) / i.length()
}

/// `inf_c <|f - c|>_I` by trying every candidate value: the cell values on
/// `I`, plus 0 when `I` sticks out of the window.
pub fn best_constant_oscillation(w: &Window, cells: &[f64], i: &DyadicInterval) -> f64 {
    let mut candidates: Vec<f64> = (0..cells.len())
        .filter(|&c| cell_in(w, c, i))
        .map(|c| cells[c])
        .collect();
    candidates.push(0.0);
    candidates
        .into_iter()
        .map(|c| deviation(w, cells, i, c))
        .fold(f64::INFINITY, f64::min)
}

pub fn sharp_maximal(w: &Window, cells: &[f64]) -> Vec<f64> {
    max_containing(w, |i| best_constant_oscillation(w, cells, i))
}

pub fn mean_oscillation_r(w: &Window, cells: &[f64], i: &DyadicInterval, r: f64) -> f64 {
    let mu = average(w, cells, i);
    let dx = w.cell_length();
    let mut inside = 0.0;
    let mut covered = 0.0;
    for (idx, v) in cells.iter().enumerate() {
        if cell_in(w, idx, i) {
            inside += (v - mu).abs().powf(r) * dx;
            covered += dx;
        }
    }
    (inside + (i.length() - covered) * mu.abs().powf(r)) / i.length()
}

pub fn bmo_r(w: &Window, cells: &[f64], r: f64) -> f64 {
    all_intervals(w)
        .iter()
        .map(|i| mean_oscillation_r(w, cells, i, r))
        .fold(0.0, f64::max)
        .powf(1.0 / r)
}

/// `(1/|I|) Σ_{J ⊆ I} <b, h_J>^2`, summed over every enumerated `J`.
pub fn haar_energy(w: &Window, cells: &[f64], i: &DyadicInterval) -> f64 {
    all_intervals(w)
        .iter()
        .filter(|j| i.contains(j))
        .map(|j| coefficient(w, cells, j).powi(2))
        .sum::<f64>()
        / i.length()
}

fn cells_of<'a>(w: &'a Window, cells: &'a [f64], i: &'a DyadicInterval) -> impl Iterator<Item = f64> + 'a {
    (0..cells.len()).filter(move |&c| cell_in(w, c, i)).map(move |c| cells[c])
}

fn mean_over(w: &Window, cells: &[f64], i: &DyadicInterval, f: impl Fn(f64) -> f64) -> f64 {
    let vals: Vec<f64> = cells_of(w, cells, i).map(f).collect();
    vals.iter().sum::<f64>() / vals.len() as f64
}

pub fn ap(w: &Window, cells: &[f64], p: f64) -> (f64, DyadicInterval) {
    let mut best = (f64::NEG_INFINITY, iv(0, 0));
    for i in in_window_intervals(w) {
        let a = mean_over(w, cells, &i, |v| v);
        let b = mean_over(w, cells, &i, |v| v.powf(-1.0 / (p - 1.0))).powf(p - 1.0);
        if a * b > best.0 {
            best = (a * b, i);
        }
    }
    best
}

pub fn a1(w: &Window, cells: &[f64]) -> f64 {
    in_window_intervals(w)
        .iter()
        .map(|i| {
            let lo = cells_of(w, cells, i).fold(f64::INFINITY, f64::min);
            mean_over(w, cells, i, |v| v) / lo
        })
        .fold(0.0, f64::max)
}

pub fn multi_ap(w: &Window, weights: &[&[f64]], ps: &[f64]) -> f64 {
    let p = 1.0 / ps.iter().map(|q| 1.0 / q).sum::<f64>();
    let nu: Vec<f64> = (0..w.cell_count())
        .map(|c| {
            weights
                .iter()
                .zip(ps)
                .map(|(wj, pj)| wj[c].powf(p / pj))
                .product()
        })
        .collect();
    in_window_intervals(w)
        .iter()
        .map(|i| {
            let mut v = mean_over(w, &nu, i, |x| x).powf(1.0 / p);
            for (wj, &pj) in weights.iter().zip(ps) {
                v *= if pj == 1.0 {
                    cells_of(w, wj, i).map(|x| 1.0 / x).fold(0.0, f64::max)
                } else {
                    let conj = pj / (pj - 1.0);
                    mean_over(w, wj, i, |x| x.powf(1.0 - conj)).powf(1.0 / conj)
                };
            }
            v
        })
        .fold(0.0, f64::max)
}

/// Values on a handful of levels, so medians and level sets have ties.
pub fn random_cells(rng: &mut ChaCha8Rng, w: &Window) -> Vec<f64> {
    let levels: Vec<f64> = (0..rng.random_range(1..6))
        .map(|_| rng.random_range(-3.0..3.0))
        .collect();
    (0..w.cell_count())
        .map(|_| {
            if rng.random_bool(0.2) {
                0.0
            } else {
                levels[rng.random_range(0..levels.len())]
            }
        })
        .collect()
}

pub fn random_weight_cells(rng: &mut ChaCha8Rng, w: &Window) -> Vec<f64> {
    (0..w.cell_count())
        .map(|_| rng.random_range(-1.5f64..1.5).exp())
        .collect()
}

pub fn random_window(rng: &mut ChaCha8Rng) -> Window {
    Window::new(
        rng.random_range(0..=1),
        rng.random_range(1..=3),
        rng.random_range(0..=3),
    )
    .unwrap()
}

pub fn step(w: Window, cells: Vec<f64>) -> StepFunction {
    StepFunction::new(w, cells).unwrap()
}
