//! One evaluation per (check, trial inputs).

use std::collections::BTreeMap;

use dyadic_core::bmo::{bmo2_haar, bmo_norm, bmo_r_norm, truncate_bmo};
use dyadic_core::haar::{analyze, HaarAnalysis};
use dyadic_core::maximal::{
    maximal, maximal_delta, multilinear_maximal, multilinear_maximal_r, sharp_maximal_delta,
};
use dyadic_core::norms::{kolmogorov_constant, kolmogorov_ratio, lp_norm, weak_lp_norm};
use dyadic_core::weights::{ainf_estimate, ap_characteristic, default_ainf_grid, nu_weight};
use dyadic_core::{StepFunction, Weight, WeightVector};
use serde::Serialize;

use crate::config::{Check, ExperimentConfig, OperatorKind};
use crate::error::{HarnessError, Result};
use crate::inputs::{Needs, OperatorUnderTest, TrialInputs};

pub const AP_GRID: [f64; 5] = [1.25, 1.5, 2.0, 4.0, 8.0];
pub const R_GRID: [f64; 5] = [1.01, 1.05, 1.1, 1.25, 1.5];
pub const TRUNCATION_CONSTANT: f64 = 2.25;
/// Truncation levels for the commutator check, as fractions of `max|b|`.
pub const TRUNCATION_FRACTIONS: [f64; 4] = [0.125, 0.25, 0.5, 1.0];

/// Where a trial's ratio is attained.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Cell(usize),
    Interval { k: i32, m: i64 },
    None,
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::Cell(c) => write!(f, "cell {c}"),
            Witness::Interval { k, m } => write!(f, "k={k} m={m}"),
            Witness::None => Ok(()),
        }
    }
}

impl From<dyadic_core::DyadicInterval> for Witness {
    fn from(i: dyadic_core::DyadicInterval) -> Self {
        Witness::Interval {
            k: i.scale,
            m: i.offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub witness: Witness,
    /// Secondary ratios, reduced by maximum over trials.
    pub extras: BTreeMap<String, f64>,
}

impl Outcome {
    fn new(lhs: f64, rhs: f64, witness: Witness) -> Self {
        Outcome {
            lhs,
            rhs,
            ratio: ratio(lhs, rhs),
            witness,
            extras: BTreeMap::new(),
        }
    }

    fn extra(mut self, name: impl Into<String>, value: f64) -> Self {
        self.extras.insert(name.into(), value);
        self
    }

    /// Hard checks pass iff `ratio <= 1 + tol`; envelope checks iff the ratio is finite.
    pub fn passes(&self, check: Check, tolerance: f64) -> bool {
        if check.is_hard() {
            self.ratio <= 1.0 + tolerance
        } else {
            self.ratio.is_finite() && self.extras.values().all(|v| v.is_finite())
        }
    }
}

/// `lhs / rhs`, with `0/0 = 0`.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

pub fn needs(check: Check) -> Needs {
    Needs {
        supported: check == Check::OutsideSupport,
        weights: check.needs_weights(),
    }
}

/// Largest `num/den` over cells with `den > 0`; returns `(num, den, cell)`.
fn max_cell_ratio(num: &StepFunction, den: &StepFunction) -> (f64, f64, Witness) {
    let mut best = (0.0, 0.0, Witness::None);
    let mut best_ratio = 0.0;
    for (c, (&a, &b)) in num.cells().iter().zip(den.cells()).enumerate() {
        if b > 0.0 && a / b > best_ratio {
            best_ratio = a / b;
            best = (a, b, Witness::Cell(c));
        }
    }
    best
}

fn product_norm(fs: &[StepFunction], wv: &WeightVector) -> Result<f64> {
    let mut prod = 1.0;
    for ((f, w), &p) in fs.iter().zip(wv.weights()).zip(wv.exponents().p_list()) {
        prod *= lp_norm(f, p, w)?;
    }
    Ok(prod)
}

fn weights_of(inputs: &TrialInputs) -> Result<WeightVector> {
    inputs
        .weights
        .as_ref()
        .ok_or_else(|| HarnessError::config("checks", "trial inputs carry no weights"))?
        .weights()
}

pub fn evaluate(
    check: Check,
    cfg: &ExperimentConfig,
    inputs: &TrialInputs,
    corrupt: bool,
) -> Result<Outcome> {
    let op = OperatorUnderTest::new(cfg, inputs, corrupt);
    let tol = cfg.tolerance;
    match check {
        Check::HaarExactness => haar_exactness(&inputs.fs[0], tol),
        Check::Localization => localization(&op, inputs, tol),
        Check::OutsideSupport => outside_support(cfg, &op, inputs, tol),
        Check::Kolmogorov => kolmogorov(cfg, &inputs.fs[0]),
        Check::WeakStrong => weak_strong(inputs),
        Check::ApMonotonicity => ap_monotonicity(inputs),
        Check::BmoIdentity => bmo_identity(&inputs.b, tol),
        Check::Truncation => {
            let lhs = bmo_norm(&truncate_bmo(&inputs.b, inputs.level)?).value;
            let rhs = TRUNCATION_CONSTANT * bmo_norm(&inputs.b).value;
            Ok(Outcome::new(lhs, rhs, Witness::None))
        }
        Check::SharpDomination => {
            let t = op.apply(&inputs.fs)?;
            let num = sharp_maximal_delta(&t, cfg.delta())?;
            let den = multilinear_maximal(&inputs.fs)?;
            let (a, b, w) = max_cell_ratio(&num, &den);
            Ok(Outcome::new(a, b, w))
        }
        Check::FeffermanStein => fefferman_stein(cfg, inputs),
        Check::MaximalWeighted => maximal_weighted(cfg, inputs),
        Check::WeightedTheorem => {
            let wv = weights_of(inputs)?;
            let nu = nu_weight(&wv)?;
            let p = wv.exponents().p();
            let t = op.apply(&inputs.fs)?;
            let den = product_norm(&inputs.fs, &wv)?;
            let weak = weak_lp_norm(&t, p, &nu)?;
            Ok(Outcome::new(lp_norm(&t, p, &nu)?, den, Witness::None).extra("weak", ratio(weak, den)))
        }
        Check::CommutatorTheorem => commutator_theorem(cfg, &op, inputs),
    }
}

fn haar_exactness(f: &StepFunction, tol: f64) -> Result<Outcome> {
    let expansion = analyze(f);
    let back = expansion.reconstruct()?;
    let scale = 1.0 + f.max_abs();
    let round_trip = f
        .cells()
        .iter()
        .zip(back.cells())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale;
    let half = f.window().half_extent();
    let (neg, pos) = expansion.averages;
    let energy = half * (neg * neg + pos * pos)
        + expansion.coefficients.values().map(|c| c * c).sum::<f64>();
    let norm2 = f.inner(f)?;
    let parseval = (energy - norm2).abs() / (1.0 + norm2);
    Ok(Outcome::new(round_trip.max(parseval), tol, Witness::None)
        .extra("round_trip", round_trip)
        .extra("parseval", parseval))
}

fn localization(op: &OperatorUnderTest, inputs: &TrialInputs, tol: f64) -> Result<Outcome> {
    let j = inputs.interval;
    let window = *inputs.window();
    let range = window.cell_range(&j)?;
    let restricted: Vec<StepFunction> = inputs
        .fs
        .iter()
        .map(|f| {
            let mut r = StepFunction::zero(window);
            r.cells_mut()[range.clone()].copy_from_slice(&f.cells()[range.clone()]);
            r
        })
        .collect();
    let slot = op.slot;
    let full = dyadic_core::operators::multiply_slot(&inputs.g, slot, &inputs.fs)?;
    let local = dyadic_core::operators::multiply_slot(&inputs.g, slot, &restricted)?;
    let d = op.apply(&full)?.sub(&op.apply(&local)?)?;
    let on_j = &d.cells()[range];
    let hi = on_j.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = on_j.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Outcome::new(hi - lo, tol * (1.0 + d.max_abs()), j.into()))
}

fn outside_support(
    cfg: &ExperimentConfig,
    op: &OperatorUnderTest,
    inputs: &TrialInputs,
    tol: f64,
) -> Result<Outcome> {
    let m = cfg.m as i32;
    let two_m = 2f64.powi(m);
    let scale = match cfg.operator_kind {
        OperatorKind::PiB => two_m / (two_m - 1.0) * bmo2_haar(&inputs.b).value,
        _ => {
            2.0 * two_m / (two_m - 1.0) * inputs.b.max_abs() * inputs.symbol.sup_norm()
        }
    };
    let out = op.apply(&inputs.fs)?;
    let mf = multilinear_maximal(&inputs.fs)?;
    let window = *inputs.window();
    let s = dyadic_core::grid::exp2i(cfg.support_log());
    let mut best = Outcome::new(0.0, tol, Witness::None);
    for c in 0..window.cell_count() {
        let x = window.cell_left(c);
        if (-s..s).contains(&x) {
            continue;
        }
        let lhs = out.cells()[c].abs();
        let rhs = scale * mf.cells()[c] + tol;
        if ratio(lhs, rhs) > best.ratio {
            best = Outcome::new(lhs, rhs, Witness::Cell(c));
        }
    }
    Ok(best)
}

/// `(p, q)` pairs for the local Kolmogorov inequality.
pub fn kolmogorov_pairs(m: usize) -> Vec<(f64, f64)> {
    let mut pairs = vec![(0.25, 0.5), (0.5, 1.0)];
    let pq = (1.0 / m as f64, 2.0 / m as f64);
    if !pairs.contains(&pq) {
        pairs.push(pq);
    }
    pairs
}

fn kolmogorov(cfg: &ExperimentConfig, f: &StepFunction) -> Result<Outcome> {
    let mut best = Outcome::new(0.0, 1.0, Witness::None);
    for (p, q) in kolmogorov_pairs(cfg.m) {
        let c = kolmogorov_constant(p, q);
        for i in f.window().in_window_intervals() {
            let r = kolmogorov_ratio(f, &i, p, q)?;
            if r / c > best.ratio {
                best = Outcome::new(r, c, i.into());
            }
        }
    }
    Ok(best)
}

fn weak_strong(inputs: &TrialInputs) -> Result<Outcome> {
    let wv = weights_of(inputs)?;
    let nu = nu_weight(&wv)?;
    let mut cases: Vec<(&StepFunction, f64, &Weight)> = vec![(&inputs.fs[0], wv.exponents().p(), &nu)];
    for ((f, w), &p) in inputs.fs.iter().zip(wv.weights()).zip(wv.exponents().p_list()) {
        cases.push((f, p, w));
    }
    let mut best = Outcome::new(0.0, 0.0, Witness::None);
    for (f, p, w) in cases {
        let o = Outcome::new(weak_lp_norm(f, p, w)?, lp_norm(f, p, w)?, Witness::None);
        if o.ratio > best.ratio {
            best = o;
        }
    }
    Ok(best)
}

fn ap_monotonicity(inputs: &TrialInputs) -> Result<Outcome> {
    let wv = weights_of(inputs)?;
    let w = &wv.weights()[0];
    let values = AP_GRID
        .iter()
        .map(|&p| Ok(ap_characteristic(w, p)?))
        .collect::<Result<Vec<_>>>()?;
    let mut best = Outcome::new(0.0, 1.0, Witness::None);
    for pair in values.windows(2) {
        let o = Outcome::new(pair[1].value, pair[0].value, pair[1].interval.into());
        if o.ratio > best.ratio {
            best = o;
        }
    }
    // characteristics are at least 1
    let least = values.iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
    let floor = ratio(1.0, least);
    if floor > best.ratio {
        best = Outcome::new(1.0, least, Witness::None);
    }
    Ok(best.extra("a_max", values[0].value))
}

fn bmo_identity(b: &StepFunction, tol: f64) -> Result<Outcome> {
    let v2 = bmo2_haar(b);
    let vr = bmo_r_norm(b, 2.0)?.value;
    let a = HaarAnalysis::new(b);
    let window = b.window();
    let mut coef_max: f64 = 0.0;
    for (i, c) in a.coefficients().iter().enumerate() {
        coef_max = coef_max.max(c.abs() / window.interval_at(i).length().sqrt());
    }
    let gap = (v2.value - vr).abs() / (1.0 + v2.value);
    let excess = (coef_max - v2.value).max(0.0) / (1.0 + v2.value);
    Ok(Outcome::new(gap.max(excess), tol, v2.interval.into())
        .extra("identity_gap", gap)
        .extra("coefficient_excess", excess))
}

fn fefferman_stein(cfg: &ExperimentConfig, inputs: &TrialInputs) -> Result<Outcome> {
    let wv = weights_of(inputs)?;
    let nu = nu_weight(&wv)?;
    let p = wv.exponents().p();
    let f = &inputs.fs[0];
    let d = cfg.delta();
    let big = maximal_delta(f, d)?;
    let sharp = sharp_maximal_delta(f, d)?;
    let weak = ratio(weak_lp_norm(&big, p, &nu)?, weak_lp_norm(&sharp, p, &nu)?);
    let ainf = ainf_estimate(&nu, &default_ainf_grid())?;
    Ok(
        Outcome::new(lp_norm(&big, p, &nu)?, lp_norm(&sharp, p, &nu)?, Witness::None)
            .extra("weak", weak)
            .extra("ainf", ainf.value),
    )
}

fn maximal_weighted(cfg: &ExperimentConfig, inputs: &TrialInputs) -> Result<Outcome> {
    let wv = weights_of(inputs)?;
    let nu = nu_weight(&wv)?;
    let p = wv.exponents().p();
    let den = product_norm(&inputs.fs, &wv)?;
    let mf = multilinear_maximal(&inputs.fs)?;
    let mut out = Outcome::new(lp_norm(&mf, p, &nu)?, den, Witness::None)
        .extra("weak", ratio(weak_lp_norm(&mf, p, &nu)?, den));
    if cfg.m == 1 {
        let single = maximal(&inputs.fs[0]);
        out = out.extra("single", ratio(lp_norm(&single, p, &nu)?, den));
    }
    let mut best_r: f64 = 1.0;
    for r in R_GRID {
        let Ok(scaled) = wv.exponents().divided_by(r) else {
            continue;
        };
        let shrunk = WeightVector::new(wv.weights().to_vec(), scaled)?;
        let a = dyadic_core::weights::multilinear_ap_characteristic(&shrunk)?.value;
        if a <= cfg.weight_budget {
            best_r = best_r.max(r);
        }
        let mr = multilinear_maximal_r(&inputs.fs, r)?;
        out = out.extra(format!("mr_{r}"), ratio(lp_norm(&mr, p, &nu)?, den));
    }
    Ok(out.extra("best_r", best_r))
}

fn commutator_theorem(
    cfg: &ExperimentConfig,
    op: &OperatorUnderTest,
    inputs: &TrialInputs,
) -> Result<Outcome> {
    let op = match op.kind {
        OperatorKind::Paraproduct => op.clone(),
        _ => op.with_kind(OperatorKind::HaarMultiplier),
    };
    let wv = weights_of(inputs)?;
    let nu = nu_weight(&wv)?;
    let p = wv.exponents().p();
    let den = product_norm(&inputs.fs, &wv)?;
    let b = &inputs.b;
    let osc = bmo2_haar(b).value;
    let norm_ratio = |b: &StepFunction| -> Result<(f64, f64)> {
        let c = op.commutator(b, &inputs.fs)?;
        Ok((lp_norm(&c, p, &nu)?, bmo2_haar(b).value * den))
    };
    let (lhs, rhs) = norm_ratio(b)?;
    let main = ratio(lhs, rhs);

    let c = op.commutator(b, &inputs.fs)?;
    let t = op.apply(&inputs.fs)?;
    let num = sharp_maximal_delta(&c, cfg.delta())?;
    let mr = multilinear_maximal_r(&inputs.fs, cfg.r)?;
    let mg = maximal_delta(&t, cfg.gamma())?;
    let den_pt = mr.add(&mg)?.scale(osc);
    let (a, d, _) = max_cell_ratio(&num, &den_pt);

    let mut out = Outcome::new(lhs, rhs, Witness::None).extra("pointwise", ratio(a, d));
    let top = b.max_abs();
    for frac in TRUNCATION_FRACTIONS {
        let bj = truncate_bmo(b, if top > 0.0 { frac * top } else { 1.0 })?;
        let (l, r) = norm_ratio(&bj)?;
        out = out.extra(format!("truncation_gap_{frac}"), (ratio(l, r) - main).abs());
    }
    Ok(out)
}
