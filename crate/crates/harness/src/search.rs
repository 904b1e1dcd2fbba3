//! Empirical lower bounds for the constants of envelope checks.

use rand::Rng;
use rayon::prelude::*;

use crate::checks::{evaluate, needs};
use crate::config::{Check, ExperimentConfig, OperatorKind};
use crate::error::Result;
use crate::generate::{trial_rng, CLIP};
use crate::inputs::TrialInputs;

/// Stream id reserved for the ascent, far from any trial index.
const ASCENT_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub ratio: f64,
    /// Trial whose draw seeded the ascent.
    pub trial: usize,
    /// Incumbent ratio after each ascent step.
    pub history: Vec<f64>,
    pub witness: TrialInputs,
}

fn objective(cfg: &ExperimentConfig, check: Check, inputs: &TrialInputs) -> Result<f64> {
    let r = evaluate(check, cfg, inputs, false)?.ratio;
    Ok(if r.is_nan() { f64::NEG_INFINITY } else { r })
}

/// Best trial, then `cfg.ascent_steps` single-coordinate perturbations kept only
/// when the ratio strictly increases. Weight moves must stay within the budget.
pub fn estimate_ratio_supremum(cfg: &ExperimentConfig, check: Check) -> Result<SearchResult> {
    cfg.validate()?;
    let scored = (0..cfg.trials.max(1))
        .into_par_iter()
        .map(|id| {
            let inputs = TrialInputs::generate(cfg, id, needs(check))?;
            Ok((objective(cfg, check, &inputs)?, id, inputs))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut best, trial, mut incumbent) = scored
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one restart");

    let mut rng = trial_rng(cfg.seed, ASCENT_STREAM);
    let moves_b = matches!(cfg.operator_kind, OperatorKind::PiB | OperatorKind::Commutator)
        || check == Check::CommutatorTheorem;
    let mut history = Vec::with_capacity(cfg.ascent_steps);
    for _ in 0..cfg.ascent_steps {
        let mut candidate = incumbent.clone();
        let cells = candidate.window().cell_count();
        let roll: f64 = rng.random();
        if let (Some(w), true) = (candidate.weights.as_mut(), roll < 0.25) {
            if rng.random_bool(0.5) {
                w.lambda *= (rng.random_range(-0.2..0.2f64)).exp();
            } else {
                let j = rng.random_range(0..w.logs.len());
                let c = rng.random_range(0..cells);
                w.logs[j].cells_mut()[c] += rng.random_range(-0.5..0.5);
            }
            if w.characteristic()? > cfg.weight_budget {
                history.push(best);
                continue;
            }
        } else {
            let slots = candidate.fs.len() + usize::from(moves_b);
            let j = rng.random_range(0..slots);
            let c = rng.random_range(0..cells);
            let step = rng.random_range(-1.0..1.0);
            let f = if j < candidate.fs.len() {
                &mut candidate.fs[j]
            } else {
                &mut candidate.b
            };
            let v = &mut f.cells_mut()[c];
            *v = (*v + step).clamp(-CLIP, CLIP);
        }
        let r = objective(cfg, check, &candidate)?;
        if r > best {
            best = r;
            incumbent = candidate;
        }
        history.push(best);
    }
    Ok(SearchResult {
        ratio: best,
        trial,
        history,
        witness: incumbent,
    })
}
