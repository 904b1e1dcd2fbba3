//! Per-trial inputs and the operator under test.

use dyadic_core::haar::{synthesize, HaarAnalysis};
use dyadic_core::io::step_function_to_csv;
use dyadic_core::operators::{multiply_slot, summand_coefficients};
use dyadic_core::{DyadicInterval, MultiIndex, StepFunction, SymbolSequence, Window};
use rand::Rng;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, OperatorKind};
use crate::error::Result;
use crate::generate::{
    gen_step_function, gen_supported, gen_symbol, gen_weight_draw, haar_series, resolve_profile,
    trial_rng, WeightDraw,
};

/// Everything a check needs for one trial, drawn from `(seed, trial)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialInputs {
    pub fs: Vec<StepFunction>,
    pub b: StepFunction,
    pub g: StepFunction,
    pub symbol: SymbolSequence,
    /// Localization interval `J`.
    pub interval: DyadicInterval,
    /// Truncation level `j`.
    pub level: f64,
    pub weights: Option<WeightDraw>,
}

/// Which optional parts to draw.
#[derive(Debug, Clone, Copy, Default)]
pub struct Needs {
    pub supported: bool,
    pub weights: bool,
}

impl TrialInputs {
    pub fn generate(cfg: &ExperimentConfig, trial: usize, needs: Needs) -> Result<Self> {
        let window = cfg.window;
        let mut rng = trial_rng(cfg.seed, trial as u64);
        let profile = resolve_profile(cfg.profile, trial);
        let fs = (0..cfg.m)
            .map(|_| {
                if needs.supported {
                    gen_supported(&mut rng, &window, cfg.support_log(), profile)
                } else {
                    Ok(gen_step_function(&mut rng, &window, profile))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let b = haar_series(&mut rng, &window);
        let g = gen_step_function(&mut rng, &window, resolve_profile(cfg.profile, trial + 1));
        let symbol = gen_symbol(&mut rng, &window, cfg.symbol);
        let n = window.resolution_log();
        let k0 = -window.half_extent_log();
        let k = rng.random_range(k0..=(n - 1).max(k0));
        let position = rng.random_range(0..window.level_len(k));
        let interval = window.interval_at(window.level_base(k) + position);
        let top = b.max_abs();
        let level = if top > 0.0 {
            top * rng.random_range(0.02..1.25)
        } else {
            1.0
        };
        let weights = if needs.weights {
            Some(gen_weight_draw(&mut rng, &window, &cfg.exponents(), cfg.weight_budget)?.0)
        } else {
            None
        };
        Ok(TrialInputs {
            fs,
            b,
            g,
            symbol,
            interval,
            level,
            weights,
        })
    }

    pub fn window(&self) -> &Window {
        self.b.window()
    }

    /// The same draws on a finer grid.
    pub fn refine(&self, resolution_log: i32) -> Result<TrialInputs> {
        Ok(TrialInputs {
            fs: self
                .fs
                .iter()
                .map(|f| f.refine(resolution_log))
                .collect::<dyadic_core::Result<_>>()?,
            b: self.b.refine(resolution_log)?,
            g: self.g.refine(resolution_log)?,
            symbol: self.symbol.clone(),
            interval: self.interval,
            level: self.level,
            weights: self
                .weights
                .as_ref()
                .map(|w| w.refine(resolution_log))
                .transpose()?,
        })
    }

    /// SHA-256 over the CSV and JSON forms of every input.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for f in self.fs.iter().chain([&self.b, &self.g]) {
            h.update(step_function_to_csv(f));
        }
        if let Some(w) = &self.weights {
            for g in &w.logs {
                h.update(step_function_to_csv(g));
            }
            h.update(w.lambda.to_bits().to_le_bytes());
        }
        h.update(serde_json::to_string(&self.symbol).unwrap_or_default());
        h.update(serde_json::to_string(&self.interval).unwrap_or_default());
        h.update(self.level.to_bits().to_le_bytes());
        hex::encode(h.finalize())
    }
}

/// The operator of a config applied to trial inputs, optionally corrupted.
///
/// The corrupted variant adds `1/2 Σ_I c(parent(I)) h_I`, where `c` are the
/// operator's own per-interval coefficients. The added term at `I` reads data
/// outside `I`, so it breaks localization.
#[derive(Debug, Clone)]
pub struct OperatorUnderTest<'a> {
    pub kind: OperatorKind,
    pub alpha: &'a MultiIndex,
    pub b: &'a StepFunction,
    pub symbol: &'a SymbolSequence,
    pub slot: usize,
    pub corrupt: bool,
}

impl<'a> OperatorUnderTest<'a> {
    pub fn new(cfg: &'a ExperimentConfig, inputs: &'a TrialInputs, corrupt: bool) -> Self {
        OperatorUnderTest {
            kind: cfg.operator_kind,
            alpha: &cfg.alpha,
            b: &inputs.b,
            symbol: &inputs.symbol,
            slot: cfg.slot,
            corrupt,
        }
    }

    pub fn with_kind(&self, kind: OperatorKind) -> Self {
        OperatorUnderTest {
            kind,
            ..self.clone()
        }
    }

    pub fn with_b(&self, b: &'a StepFunction) -> Self {
        OperatorUnderTest { b, ..self.clone() }
    }

    /// The multiplier inside a commutator: `T_ε` for multiplier kinds, `P` otherwise.
    fn inner(&self, fs: &[StepFunction]) -> Result<StepFunction> {
        match self.kind {
            OperatorKind::Paraproduct => self.sum(self.alpha, fs, None),
            _ => self.sum(self.alpha, fs, Some(self.symbol)),
        }
    }

    pub fn apply(&self, fs: &[StepFunction]) -> Result<StepFunction> {
        match self.kind {
            OperatorKind::Paraproduct => self.sum(self.alpha, fs, None),
            OperatorKind::HaarMultiplier => self.sum(self.alpha, fs, Some(self.symbol)),
            OperatorKind::PiB => {
                let mut all = Vec::with_capacity(fs.len() + 1);
                all.push(self.b.clone());
                all.extend_from_slice(fs);
                self.sum(&self.alpha.with_leading_zero(), &all, None)
            }
            OperatorKind::Commutator => self.commutator(self.b, fs),
        }
    }

    /// `[b, T]_i(f⃗)` with the inner multiplier of this operator.
    pub fn commutator(&self, b: &StepFunction, fs: &[StepFunction]) -> Result<StepFunction> {
        let direct = self.inner(fs)?;
        let moved = self.inner(&multiply_slot(b, self.slot, fs)?)?;
        Ok(b.mul(&direct)?.sub(&moved)?)
    }

    fn sum(
        &self,
        alpha: &MultiIndex,
        fs: &[StepFunction],
        symbol: Option<&SymbolSequence>,
    ) -> Result<StepFunction> {
        let window = *fs[0].window();
        let analyses: Vec<HaarAnalysis> = fs.iter().map(HaarAnalysis::new).collect();
        let eps = symbol.map(|s| s.resolve(&window));
        let coefficients = summand_coefficients(&analyses, alpha, eps.as_deref());
        let sigma = alpha.sigma();
        let mut out = synthesize(&window, &coefficients, sigma);
        if self.corrupt {
            let leak = parent_shift(&window, &coefficients);
            let extra = synthesize(&window, &leak, sigma.max(1));
            out = out.add(&extra.scale(0.5))?;
        }
        Ok(out)
    }
}

/// `c(parent(I))` on in-window `I` below the top level, zero elsewhere.
fn parent_shift(window: &Window, coefficients: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; window.interval_count()];
    let k0 = -window.half_extent_log();
    for k in k0 + 1..window.resolution_log() {
        let base = window.level_base(k);
        let parent = window.level_base(k - 1);
        for p in 0..window.level_len(k) {
            out[base + p] = coefficients[parent + p / 2];
        }
    }
    out
}
