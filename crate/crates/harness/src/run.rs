//! Running checks over seeded trials and writing reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dyadic_core::io::{read_step_function, write_json, write_step_function};
use dyadic_core::{DyadicInterval, SymbolSequence, Window};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checks::{evaluate, needs, Outcome};
use crate::config::{Check, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::generate::WeightDraw;
use crate::inputs::TrialInputs;

/// Largest relative change of an envelope between resolutions still called stable.
pub const STABILITY: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub trial_id: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
    pub witness: String,
    pub input_digest: String,
    pub extras: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolutionSummary {
    pub max_ratio: f64,
    pub extras: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub check: Check,
    pub hard: bool,
    pub trials: usize,
    pub max_ratio: f64,
    pub pass: bool,
    pub failures: usize,
    pub witness_trial: Option<usize>,
    pub witness: String,
    pub witness_paths: Vec<String>,
    pub extras: BTreeMap<String, f64>,
    /// Envelope per resolution `N`, base resolution included.
    pub by_resolution: BTreeMap<i32, ResolutionSummary>,
    /// Largest relative change against the base resolution, when refinements ran.
    pub max_relative_change: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CheckRun {
    pub summary: CheckSummary,
    pub trials: Vec<TrialReport>,
    pub refined: BTreeMap<i32, Vec<TrialReport>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub window: Window,
    pub seed: u64,
    pub pass: bool,
    pub notes: Vec<String>,
    pub checks: Vec<CheckSummary>,
}

/// `max` that keeps NaN.
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn trial_report(check: Check, cfg: &ExperimentConfig, id: usize, digest: &str, o: Outcome) -> TrialReport {
    TrialReport {
        trial_id: id,
        lhs: o.lhs,
        rhs: o.rhs,
        ratio: o.ratio,
        pass: o.passes(check, cfg.tolerance),
        witness: o.witness.to_string(),
        input_digest: digest.to_string(),
        extras: o.extras,
    }
}

/// Reports per trial at the base resolution followed by each refinement.
fn run_trials(
    check: Check,
    cfg: &ExperimentConfig,
    corrupt: bool,
    resolutions: &[i32],
) -> Result<Vec<Vec<TrialReport>>> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|id| {
            let inputs = TrialInputs::generate(cfg, id, needs(check))?;
            // refined inputs are a function of the base draw, so they share its digest
            let digest = inputs.digest();
            let mut out = Vec::with_capacity(resolutions.len() + 1);
            let o = evaluate(check, cfg, &inputs, corrupt)?;
            out.push(trial_report(check, cfg, id, &digest, o));
            for &n in resolutions {
                let fine = inputs.refine(n)?;
                let o = evaluate(check, cfg, &fine, corrupt)?;
                out.push(trial_report(check, cfg, id, &digest, o));
            }
            Ok(out)
        })
        .collect()
}

fn envelope(trials: &[TrialReport]) -> ResolutionSummary {
    let mut extras = BTreeMap::new();
    for t in trials {
        for (k, &v) in &t.extras {
            let e = extras.entry(k.clone()).or_insert(0.0);
            *e = nan_max(*e, v);
        }
    }
    ResolutionSummary {
        max_ratio: trials.iter().map(|t| t.ratio).fold(0.0, nan_max),
        extras,
    }
}

fn relative_change(base: f64, other: f64) -> f64 {
    if base == other {
        0.0
    } else if base.abs() > 1e-12 {
        (other - base).abs() / base.abs()
    } else {
        // both essentially zero counts as unchanged
        if other.abs() <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

pub fn run_check(cfg: &ExperimentConfig, check: Check, corrupt: bool) -> Result<CheckRun> {
    let resolutions: &[i32] = if check.is_hard() { &[] } else { &cfg.refinements };
    let mut per_trial = run_trials(check, cfg, corrupt, resolutions)?;
    let mut columns: Vec<Vec<TrialReport>> = vec![Vec::with_capacity(cfg.trials); resolutions.len() + 1];
    for reports in per_trial.drain(..) {
        for (col, r) in columns.iter_mut().zip(reports) {
            col.push(r);
        }
    }
    let mut columns = columns.into_iter();
    let trials = columns.next().expect("base resolution");
    let base = envelope(&trials);
    let mut by_resolution = BTreeMap::new();
    by_resolution.insert(cfg.window.resolution_log(), base.clone());
    let mut refined = BTreeMap::new();
    let mut max_relative_change = None;
    for (&n, reports) in resolutions.iter().zip(columns) {
        let env = envelope(&reports);
        let mut change = relative_change(base.max_ratio, env.max_ratio);
        for (k, &v) in &env.extras {
            change = nan_max(change, relative_change(base.extras[k], v));
        }
        max_relative_change = Some(nan_max(max_relative_change.unwrap_or(0.0), change));
        by_resolution.insert(n, env);
        refined.insert(n, reports);
    }
    let failures = trials.iter().filter(|t| !t.pass).count()
        + refined.values().flatten().filter(|t| !t.pass).count();
    let stable = max_relative_change.is_none_or(|c| c < STABILITY);
    let top = trials
        .iter()
        .filter(|t| !t.ratio.is_nan())
        .max_by(|a, b| a.ratio.total_cmp(&b.ratio).then(b.trial_id.cmp(&a.trial_id)));
    let summary = CheckSummary {
        check,
        hard: check.is_hard(),
        trials: cfg.trials,
        max_ratio: base.max_ratio,
        pass: failures == 0 && stable,
        failures,
        witness_trial: top.map(|t| t.trial_id),
        witness: top.map(|t| t.witness.clone()).unwrap_or_default(),
        witness_paths: Vec::new(),
        extras: base.extras,
        by_resolution,
        max_relative_change,
    };
    Ok(CheckRun {
        summary,
        trials,
        refined,
    })
}

fn notes(cfg: &ExperimentConfig) -> Vec<String> {
    let w = cfg.window;
    vec![
        format!(
            "window [-2^{k}, 2^{k}) with cells of length 2^-{n} and {a} ancestor levels per side; functions vanish outside the window",
            k = w.half_extent_log(),
            n = w.resolution_log(),
            a = w.ancestor_depth()
        ),
        "h_I^0 is the indicator of I; every operator in the suite has at least one Haar slot so it never occurs".into(),
        "A_infinity values are upper bounds from a finite grid of p".into(),
        format!(
            "delta = {}, gamma = {}, r = {}, exponents = {:?}",
            cfg.delta(),
            cfg.gamma(),
            cfg.r,
            cfg.exponents().p_list()
        ),
    ]
}

pub fn run_experiment(cfg: &ExperimentConfig, out: Option<&Path>, corrupt: bool) -> Result<ExperimentReport> {
    cfg.validate()?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    let mut checks = Vec::new();
    for &check in &cfg.checks {
        let mut run = run_check(cfg, check, corrupt)?;
        if let Some(dir) = out {
            write_check(dir, cfg, &mut run, corrupt)?;
        }
        checks.push(run.summary);
    }
    let report = ExperimentReport {
        window: cfg.window,
        seed: cfg.seed,
        pass: checks.iter().all(|c| !c.hard || c.pass),
        notes: notes(cfg),
        checks,
    };
    if let Some(dir) = out {
        write_json(&report, dir.join("summary.json"))?;
    }
    Ok(report)
}

fn write_trials_csv(path: &Path, trials: &[TrialReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::io(path, e))?;
    let io = |e: csv::Error| HarnessError::io(path, e);
    w.write_record(["trial_id", "lhs", "rhs", "ratio", "pass"]).map_err(io)?;
    for t in trials {
        w.write_record([
            t.trial_id.to_string(),
            t.lhs.to_string(),
            t.rhs.to_string(),
            t.ratio.to_string(),
            t.pass.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

fn write_inputs_csv(path: &Path, trials: &[TrialReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::io(path, e))?;
    let io = |e: csv::Error| HarnessError::io(path, e);
    w.write_record(["trial_id", "input_digest", "witness"]).map_err(io)?;
    for t in trials {
        w.write_record([t.trial_id.to_string(), t.input_digest.clone(), t.witness.clone()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

fn write_check(dir: &Path, cfg: &ExperimentConfig, run: &mut CheckRun, corrupt: bool) -> Result<()> {
    let name = run.summary.check.name();
    write_trials_csv(&dir.join(format!("{name}_trials.csv")), &run.trials)?;
    write_inputs_csv(&dir.join(format!("{name}_inputs.csv")), &run.trials)?;
    for (n, reports) in &run.refined {
        write_trials_csv(&dir.join(format!("{name}_trials_N{n}.csv")), reports)?;
    }
    if let Some(id) = run.summary.witness_trial {
        let inputs = TrialInputs::generate(cfg, id, needs(run.summary.check))?;
        let ratio = run.trials[id].ratio;
        run.summary.witness_paths =
            write_witness(dir, cfg, run.summary.check, id, &inputs, ratio, corrupt)?;
    }
    Ok(write_json(&run.summary, dir.join(format!("{name}_summary.json")))?)
}

/// Everything needed to re-evaluate one trial from files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessFile {
    pub check: Check,
    pub trial_id: usize,
    pub ratio: f64,
    pub corrupt: bool,
    pub config: ExperimentConfig,
    pub interval: DyadicInterval,
    pub level: f64,
    pub symbol: SymbolSequence,
    pub f_files: Vec<PathBuf>,
    pub b_file: PathBuf,
    pub g_file: PathBuf,
    pub weight_log_files: Vec<PathBuf>,
    pub lambda: Option<f64>,
}

/// Writes the inputs of one trial as CSVs plus a JSON manifest; returns the paths written.
pub fn write_witness(
    dir: &Path,
    cfg: &ExperimentConfig,
    check: Check,
    trial_id: usize,
    inputs: &TrialInputs,
    ratio: f64,
    corrupt: bool,
) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let name = check.name();
    let mut written = Vec::new();
    let mut put = |suffix: String, f: &dyadic_core::StepFunction| -> Result<PathBuf> {
        let file = PathBuf::from(format!("{name}_witness_{suffix}.csv"));
        write_step_function(f, dir.join(&file))?;
        written.push(file.display().to_string());
        Ok(file)
    };
    let f_files = inputs
        .fs
        .iter()
        .enumerate()
        .map(|(j, f)| put(format!("f{}", j + 1), f))
        .collect::<Result<Vec<_>>>()?;
    let b_file = put("b".into(), &inputs.b)?;
    let g_file = put("g".into(), &inputs.g)?;
    let weight_log_files = match &inputs.weights {
        Some(w) => w
            .logs
            .iter()
            .enumerate()
            .map(|(j, g)| put(format!("logw{}", j + 1), g))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let manifest = WitnessFile {
        check,
        trial_id,
        ratio,
        corrupt,
        config: cfg.clone(),
        interval: inputs.interval,
        level: inputs.level,
        symbol: inputs.symbol.clone(),
        f_files,
        b_file,
        g_file,
        weight_log_files,
        lambda: inputs.weights.as_ref().map(|w| w.lambda),
    };
    let file = format!("{name}_witness.json");
    write_json(&manifest, dir.join(&file))?;
    written.push(file);
    Ok(written)
}

/// Reloads a witness manifest and its CSVs.
pub fn load_witness(path: impl AsRef<Path>) -> Result<(WitnessFile, TrialInputs)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let manifest: WitnessFile =
        serde_json::from_str(&text).map_err(|e| HarnessError::ConfigParse(e.to_string()))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let fs = manifest
        .f_files
        .iter()
        .map(|f| read_step_function(dir.join(f)))
        .collect::<dyadic_core::Result<Vec<_>>>()?;
    let weights = match manifest.lambda {
        Some(lambda) => Some(WeightDraw {
            logs: manifest
                .weight_log_files
                .iter()
                .map(|f| read_step_function(dir.join(f)))
                .collect::<dyadic_core::Result<Vec<_>>>()?,
            lambda,
            exponents: manifest.config.exponents(),
        }),
        None => None,
    };
    let inputs = TrialInputs {
        fs,
        b: read_step_function(dir.join(&manifest.b_file))?,
        g: read_step_function(dir.join(&manifest.g_file))?,
        symbol: manifest.symbol.clone(),
        interval: manifest.interval,
        level: manifest.level,
        weights,
    };
    Ok((manifest, inputs))
}

/// Re-evaluates a witness; returns `(recorded, recomputed)` ratios.
pub fn reevaluate_witness(path: impl AsRef<Path>) -> Result<(f64, f64)> {
    let (manifest, inputs) = load_witness(path)?;
    let o = evaluate(manifest.check, &manifest.config, &inputs, manifest.corrupt)?;
    Ok((manifest.ratio, o.ratio))
}
