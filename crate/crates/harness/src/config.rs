use std::path::Path;

use dyadic_core::{ExponentVector, MultiIndex, Window};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Paraproduct,
    PiB,
    HaarMultiplier,
    Commutator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    HaarExactness,
    Localization,
    OutsideSupport,
    Kolmogorov,
    WeakStrong,
    ApMonotonicity,
    BmoIdentity,
    Truncation,
    SharpDomination,
    FeffermanStein,
    MaximalWeighted,
    WeightedTheorem,
    CommutatorTheorem,
}

impl Check {
    pub const ALL: [Check; 13] = [
        Check::HaarExactness,
        Check::Localization,
        Check::OutsideSupport,
        Check::Kolmogorov,
        Check::WeakStrong,
        Check::ApMonotonicity,
        Check::BmoIdentity,
        Check::Truncation,
        Check::SharpDomination,
        Check::FeffermanStein,
        Check::MaximalWeighted,
        Check::WeightedTheorem,
        Check::CommutatorTheorem,
    ];

    /// Pass/fail checks against explicit constants; the rest measure envelopes.
    pub fn is_hard(self) -> bool {
        !matches!(
            self,
            Check::SharpDomination
                | Check::FeffermanStein
                | Check::MaximalWeighted
                | Check::WeightedTheorem
                | Check::CommutatorTheorem
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Check::HaarExactness => "haar_exactness",
            Check::Localization => "localization",
            Check::OutsideSupport => "outside_support",
            Check::Kolmogorov => "kolmogorov",
            Check::WeakStrong => "weak_strong",
            Check::ApMonotonicity => "ap_monotonicity",
            Check::BmoIdentity => "bmo_identity",
            Check::Truncation => "truncation",
            Check::SharpDomination => "sharp_domination",
            Check::FeffermanStein => "fefferman_stein",
            Check::MaximalWeighted => "maximal_weighted",
            Check::WeightedTheorem => "weighted_theorem",
            Check::CommutatorTheorem => "commutator_theorem",
        }
    }

    /// Whether trials need weights (which cost a bisection to generate).
    pub fn needs_weights(self) -> bool {
        matches!(
            self,
            Check::WeakStrong
                | Check::ApMonotonicity
                | Check::FeffermanStein
                | Check::MaximalWeighted
                | Check::WeightedTheorem
                | Check::CommutatorTheorem
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    HaarSeries,
    IndicatorSum,
    TwoLevel,
    /// Cycles through the three profiles by trial index.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    Ones,
    Zero,
    /// Independent random signs on every interval of the base window.
    Signs,
    /// Independent uniform draws from `[-1, 1]`.
    Uniform,
}

fn default_operator() -> OperatorKind {
    OperatorKind::Paraproduct
}
fn default_budget() -> f64 {
    4.0
}
fn default_tolerance() -> f64 {
    1e-10
}
fn default_r() -> f64 {
    1.25
}
fn default_symbol() -> SymbolKind {
    SymbolKind::Signs
}
fn default_profile() -> Profile {
    Profile::Mixed
}
fn default_slot() -> usize {
    1
}
fn default_steps() -> usize {
    200
}

/// One experiment. Optional fields fall back to defaults derived from `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    pub m: usize,
    pub alpha: MultiIndex,
    #[serde(default = "default_operator")]
    pub operator_kind: OperatorKind,
    pub window: Window,
    #[serde(default)]
    pub exponents: Option<ExponentVector>,
    /// Defaults to `1/(2m)`.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Defaults to `min(2δ, (δ + 1/m)/2)`.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "default_budget")]
    pub weight_budget: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub checks: Vec<Check>,
    /// Finer resolutions at which envelope checks are re-evaluated on the same draws.
    #[serde(default)]
    pub refinements: Vec<i32>,
    #[serde(default = "default_symbol")]
    pub symbol: SymbolKind,
    #[serde(default = "default_profile")]
    pub profile: Profile,
    /// Commutator slot, 1-based.
    #[serde(default = "default_slot")]
    pub slot: usize,
    /// `log2` of the half-width of the support used by `outside_support`; defaults to `K - 1`.
    #[serde(default)]
    pub support_log: Option<i32>,
    /// Coordinate-ascent steps for the ratio search.
    #[serde(default = "default_steps")]
    pub ascent_steps: usize,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| HarnessError::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(1.0 / (2.0 * self.m as f64))
    }

    pub fn gamma(&self) -> f64 {
        let d = self.delta();
        self.gamma
            .unwrap_or_else(|| (2.0 * d).min((d + 1.0 / self.m as f64) / 2.0))
    }

    pub fn exponents(&self) -> ExponentVector {
        self.exponents
            .clone()
            .unwrap_or_else(|| ExponentVector::new(vec![2.0; self.m]).expect("valid"))
    }

    pub fn support_log(&self) -> i32 {
        self.support_log
            .unwrap_or(self.window.half_extent_log() - 1)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.m;
        if m == 0 {
            return Err(HarnessError::config("m", "must be at least 1"));
        }
        if self.alpha.arity() != m {
            return Err(HarnessError::config(
                "alpha",
                format!("has {} entries but m = {m}", self.alpha.arity()),
            ));
        }
        if self.operator_kind != OperatorKind::PiB && !self.alpha.in_u_m() {
            return Err(HarnessError::config(
                "alpha",
                "must lie in U_m (not all ones) for this operator",
            ));
        }
        let d = self.delta();
        if !(d > 0.0 && d < 1.0 / m as f64) {
            return Err(HarnessError::config(
                "delta",
                format!("must lie in (0, 1/m) = (0, {}), got {d}", 1.0 / m as f64),
            ));
        }
        let g = self.gamma();
        if !(g > d && g.is_finite()) {
            return Err(HarnessError::config(
                "gamma",
                format!("must exceed delta = {d}, got {g}"),
            ));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(HarnessError::config("r", format!("must be positive, got {}", self.r)));
        }
        if !(self.weight_budget >= 1.0 && self.weight_budget.is_finite()) {
            return Err(HarnessError::config(
                "weight_budget",
                format!("must be at least 1, got {}", self.weight_budget),
            ));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(HarnessError::config("tolerance", "must be finite and non-negative"));
        }
        if self.exponents().arity() != m {
            return Err(HarnessError::config(
                "exponents",
                format!("has {} entries but m = {m}", self.exponents().arity()),
            ));
        }
        if self.slot == 0 || self.slot > m {
            return Err(HarnessError::config("slot", format!("must lie in 1..={m}")));
        }
        let n = self.window.resolution_log();
        for &r in &self.refinements {
            if r <= n || self.window.with_resolution(r).is_err() {
                return Err(HarnessError::config(
                    "refinements",
                    format!("{r} must be a valid resolution finer than N = {n}"),
                ));
            }
        }
        let s = self.support_log();
        if s >= self.window.half_extent_log() || s + n < 0 {
            return Err(HarnessError::config(
                "support_log",
                format!("must lie in [-N, K) = [{}, {}), got {s}", -n, self.window.half_extent_log()),
            ));
        }
        for &c in &self.checks {
            match c {
                Check::Localization | Check::WeightedTheorem
                    if self.operator_kind == OperatorKind::Commutator =>
                {
                    return Err(HarnessError::config(
                        "operator_kind",
                        format!("{} needs paraproduct, pi_b or haar_multiplier", c.name()),
                    ));
                }
                Check::OutsideSupport
                    if !matches!(
                        self.operator_kind,
                        OperatorKind::PiB | OperatorKind::Commutator
                    ) =>
                {
                    return Err(HarnessError::config(
                        "operator_kind",
                        "outside_support needs pi_b or commutator",
                    ));
                }
                Check::OutsideSupport if self.window.ancestor_depth() == 0 => {
                    return Err(HarnessError::config(
                        "window",
                        "outside_support needs ancestor levels (A > 0)",
                    ));
                }
                Check::CommutatorTheorem if !self.alpha.in_u_m() => {
                    return Err(HarnessError::config("alpha", "commutator needs alpha in U_m"));
                }
                _ => {}
            }
        }
        Ok(())
    }
}
