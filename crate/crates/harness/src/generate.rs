//! Seeded input generators.

use dyadic_core::haar::synthesize;
use dyadic_core::weights::{ap_characteristic, multilinear_ap_characteristic};
use dyadic_core::{
    DyadicInterval, ExponentVector, StepFunction, SymbolSequence, Weight, WeightVector, Window,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Profile, SymbolKind};
use crate::error::{HarnessError, Result};

/// Cell values are clipped to `[-CLIP, CLIP]`.
pub const CLIP: f64 = 8.0;
const LAMBDA_MAX: f64 = 4.0;
const BISECTION_STEPS: usize = 64;
/// Bisection stops once `λ` is known to this absolute accuracy.
const LAMBDA_RESOLUTION: f64 = 1e-6;

/// Independent stream per trial, so results do not depend on scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn resolve_profile(profile: Profile, trial: usize) -> Profile {
    match profile {
        Profile::Mixed => [Profile::HaarSeries, Profile::IndicatorSum, Profile::TwoLevel][trial % 3],
        p => p,
    }
}

fn random_in_window(rng: &mut ChaCha8Rng, window: &Window) -> DyadicInterval {
    let all = window.interval_count() - 2 * window.ancestor_depth() as usize;
    window.interval_at(2 * window.ancestor_depth() as usize + rng.random_range(0..all))
}

/// `Σ a_I h_I` over in-window `I` coarser than the cells, `a_I` uniform in `[-√|I|, √|I|]`.
pub fn haar_series(rng: &mut ChaCha8Rng, window: &Window) -> StepFunction {
    let mut coefficients = vec![0.0; window.interval_count()];
    let n = window.resolution_log();
    for k in window.scales().filter(|&k| k < n) {
        let base = window.level_base(k);
        let bound = dyadic_core::haar::pow2_half(-k);
        for c in &mut coefficients[base..base + window.level_len(k)] {
            *c = rng.random_range(-1.0..=1.0) * bound;
        }
    }
    synthesize(window, &coefficients, 1)
}

pub fn gen_step_function(rng: &mut ChaCha8Rng, window: &Window, profile: Profile) -> StepFunction {
    let f = match profile {
        Profile::HaarSeries | Profile::Mixed => haar_series(rng, window),
        Profile::IndicatorSum => {
            let mut cells = vec![0.0; window.cell_count()];
            for _ in 0..rng.random_range(1..=4) {
                let i = random_in_window(rng, window);
                let c = [-2.0, -1.0, 1.0, 2.0][rng.random_range(0..4)];
                for v in &mut cells[window.cell_range(&i).expect("in window")] {
                    *v += c;
                }
            }
            StepFunction::new(*window, cells).expect("cell count")
        }
        Profile::TwoLevel => {
            let j = random_in_window(rng, window);
            let levels = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let mut cells = vec![0.0; window.cell_count()];
            for v in &mut cells[window.cell_range(&j).expect("in window")] {
                *v = levels[usize::from(rng.random_bool(0.5))];
            }
            StepFunction::new(*window, cells).expect("cell count")
        }
    };
    f.map(|v| v.clamp(-CLIP, CLIP))
}

/// Same as [`gen_step_function`] from a bare seed.
pub fn gen_step_function_seeded(seed: u64, window: &Window, profile: Profile) -> StepFunction {
    gen_step_function(&mut trial_rng(seed, 0), window, profile)
}

/// Draw on `[-2^s, 2^s)` and zero-extend to `window`.
pub fn gen_supported(
    rng: &mut ChaCha8Rng,
    window: &Window,
    support_log: i32,
    profile: Profile,
) -> Result<StepFunction> {
    let inner = Window::new(
        support_log,
        window.resolution_log(),
        window.ancestor_depth(),
    )?;
    Ok(gen_step_function(rng, &inner, profile).embed(*window)?)
}

pub fn gen_symbol(rng: &mut ChaCha8Rng, window: &Window, kind: SymbolKind) -> SymbolSequence {
    match kind {
        SymbolKind::Ones => SymbolSequence::constant(1.0),
        SymbolKind::Zero => SymbolSequence::constant(0.0),
        SymbolKind::Signs | SymbolKind::Uniform => {
            let mut s = SymbolSequence::constant(1.0);
            for i in window.enumerate() {
                let v = if kind == SymbolKind::Signs {
                    if rng.random_bool(0.5) {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    rng.random_range(-1.0..=1.0)
                };
                s.set(i, v);
            }
            s
        }
    }
}

fn exp_weight(g: &StepFunction, lambda: f64) -> Result<Weight> {
    Ok(Weight::new(g.map(|v| (lambda * v).exp()))?)
}

/// Largest feasible `λ` in `[0, LAMBDA_MAX]` by bisection, keeping the feasible end.
fn bisect(mut feasible: impl FnMut(f64) -> Result<bool>) -> Result<f64> {
    if feasible(LAMBDA_MAX)? {
        return Ok(LAMBDA_MAX);
    }
    let (mut lo, mut hi) = (0.0, LAMBDA_MAX);
    for _ in 0..BISECTION_STEPS {
        if hi - lo <= LAMBDA_RESOLUTION {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `w = exp(λ g)` for a random Haar series `g`, with `λ` as large as the
/// budget allows. Returns the weight and its exact `A_p` characteristic.
pub fn gen_ap_weight(
    rng: &mut ChaCha8Rng,
    window: &Window,
    p: f64,
    budget: f64,
) -> Result<(Weight, f64)> {
    if !(budget >= 1.0) {
        return Err(HarnessError::BudgetInfeasible(format!(
            "A_p characteristics are at least 1, budget {budget}"
        )));
    }
    let g = haar_series(rng, window);
    let lambda = if budget == 1.0 {
        // only constants reach 1; tiny λ would pass through rounding
        0.0
    } else {
        bisect(|l| Ok(ap_characteristic(&exp_weight(&g, l)?, p)?.value <= budget))?
    };
    let w = exp_weight(&g, lambda)?;
    let value = ap_characteristic(&w, p)?.value;
    if value > budget {
        return Err(HarnessError::BudgetInfeasible(format!(
            "characteristic {value} exceeds {budget} at lambda = 0"
        )));
    }
    Ok((w, value))
}

/// Log-weights `g_j` and one common scale `λ`: `w_j = exp(λ g_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDraw {
    pub logs: Vec<StepFunction>,
    pub lambda: f64,
    pub exponents: ExponentVector,
}

impl WeightDraw {
    pub fn weights(&self) -> Result<WeightVector> {
        let ws = self
            .logs
            .iter()
            .map(|g| exp_weight(g, self.lambda))
            .collect::<Result<Vec<_>>>()?;
        Ok(WeightVector::new(ws, self.exponents.clone())?)
    }

    pub fn characteristic(&self) -> Result<f64> {
        Ok(multilinear_ap_characteristic(&self.weights()?)?.value)
    }

    pub fn with_lambda(&self, lambda: f64) -> WeightDraw {
        WeightDraw {
            lambda,
            ..self.clone()
        }
    }

    pub fn refine(&self, resolution_log: i32) -> Result<WeightDraw> {
        Ok(WeightDraw {
            logs: self
                .logs
                .iter()
                .map(|g| g.refine(resolution_log))
                .collect::<dyadic_core::Result<_>>()?,
            ..self.clone()
        })
    }
}

/// Draws `g_j` and bisects one common `λ` against the multilinear budget.
pub fn gen_weight_draw(
    rng: &mut ChaCha8Rng,
    window: &Window,
    exponents: &ExponentVector,
    budget: f64,
) -> Result<(WeightDraw, f64)> {
    if !(budget >= 1.0) {
        return Err(HarnessError::BudgetInfeasible(format!(
            "A_P characteristics are at least 1, budget {budget}"
        )));
    }
    let draw = WeightDraw {
        logs: (0..exponents.arity())
            .map(|_| haar_series(rng, window))
            .collect(),
        lambda: 0.0,
        exponents: exponents.clone(),
    };
    let lambda = if budget == 1.0 {
        0.0
    } else {
        bisect(|l| Ok(draw.with_lambda(l).characteristic()? <= budget))?
    };
    let draw = draw.with_lambda(lambda);
    let value = draw.characteristic()?;
    if value > budget {
        return Err(HarnessError::BudgetInfeasible(format!(
            "characteristic {value} exceeds {budget} at lambda = 0"
        )));
    }
    Ok((draw, value))
}

pub fn gen_ap_weight_vector(
    rng: &mut ChaCha8Rng,
    window: &Window,
    exponents: &ExponentVector,
    budget: f64,
) -> Result<(WeightVector, f64)> {
    let (draw, value) = gen_weight_draw(rng, window, exponents, budget)?;
    Ok((draw.weights()?, value))
}
