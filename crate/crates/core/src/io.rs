//! File formats.
//!
//! Step functions are CSV with header `cell_index,left_endpoint,value`, one
//! row per cell, optionally preceded by `# window {"K":..,"N":..,"A":..}`.
//! Without that line the window is inferred from the endpoints and gets the
//! default ancestor depth. Symbol sequences, Haar expansions and weight
//! vectors are JSON.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{DyadicError, Result};
use crate::function::StepFunction;
use crate::grid::Window;
use crate::haar::HaarExpansion;
use crate::operators::SymbolSequence;
use crate::weights::{ExponentVector, Weight, WeightVector};

pub const CSV_HEADER: [&str; 3] = ["cell_index", "left_endpoint", "value"];
const WINDOW_PREFIX: &str = "# window ";

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| DyadicError::Io(format!("{}: {e}", path.display())))
}

fn write_string(path: &Path, s: &str) -> Result<()> {
    fs::write(path, s).map_err(|e| DyadicError::Io(format!("{}: {e}", path.display())))
}

fn parse_err(line: u64, message: impl Into<String>) -> DyadicError {
    DyadicError::Parse {
        line,
        message: message.into(),
    }
}

pub fn step_function_to_csv(f: &StepFunction) -> String {
    let w = f.window();
    let mut out = format!(
        "{WINDOW_PREFIX}{}\n",
        serde_json::to_string(w).expect("window serializes")
    );
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(CSV_HEADER).expect("in-memory write");
    for (i, &v) in f.cells().iter().enumerate() {
        wtr.serialize((i, w.cell_left(i), v)).expect("in-memory write");
    }
    out.push_str(&String::from_utf8(wtr.into_inner().expect("flush")).expect("utf-8"));
    out
}

pub fn parse_step_function(text: &str) -> Result<StepFunction> {
    let mut declared: Option<Window> = None;
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(json) = trimmed.strip_prefix(WINDOW_PREFIX) {
            let w = serde_json::from_str(json)
                .map_err(|e| parse_err(i as u64 + 1, format!("bad window: {e}")))?;
            declared = Some(w);
        }
        if !trimmed.is_empty() && !trimmed.starts_with('#') {
            break;
        }
    }

    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header_line = rdr.position().line();
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(header_line, e.to_string()))?
        .clone();
    if headers.is_empty() {
        return Err(DyadicError::NoCells);
    }
    if headers.iter().ne(CSV_HEADER) {
        return Err(parse_err(
            1,
            format!("expected header {}", CSV_HEADER.join(",")),
        ));
    }

    let mut lefts = Vec::new();
    let mut values = Vec::new();
    let mut lines = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let (idx, left, value): (usize, f64, f64) = rec
            .deserialize(None)
            .map_err(|e| parse_err(line, e.to_string()))?;
        if idx != values.len() {
            return Err(parse_err(
                line,
                format!("expected cell_index {}, found {idx}", values.len()),
            ));
        }
        if !value.is_finite() {
            return Err(parse_err(line, format!("non-finite value {value}")));
        }
        lefts.push(left);
        values.push(value);
        lines.push(line);
    }
    if values.is_empty() {
        return Err(DyadicError::NoCells);
    }

    let window = match declared {
        Some(w) => w,
        None => infer_window(&lefts, &lines)?,
    };
    if values.len() != window.cell_count() {
        let line = *lines.last().expect("nonempty");
        return Err(parse_err(
            line,
            format!(
                "window needs {} cells, file has {}",
                window.cell_count(),
                values.len()
            ),
        ));
    }
    for (i, (&left, &line)) in lefts.iter().zip(&lines).enumerate() {
        if left != window.cell_left(i) {
            return Err(parse_err(
                line,
                format!("left_endpoint {left} does not match cell {i} at {}", window.cell_left(i)),
            ));
        }
    }
    StepFunction::new(window, values)
}

fn exact_log2(x: f64) -> Option<i32> {
    if !(x > 0.0 && x.is_finite()) {
        return None;
    }
    let e = x.log2().round() as i32;
    (crate::grid::exp2i(e) == x).then_some(e)
}

fn infer_window(lefts: &[f64], lines: &[u64]) -> Result<Window> {
    let k = exact_log2(-lefts[0]).ok_or_else(|| {
        parse_err(lines[0], format!("first left_endpoint {} is not -2^K", lefts[0]))
    })?;
    let count = lefts.len();
    let total = exact_log2(count as f64)
        .filter(|t| *t >= 1)
        .ok_or_else(|| parse_err(lines[count - 1], format!("{count} cells is not 2^(K+N+1)")))?;
    Window::new(k, total - 1 - k, Window::DEFAULT_ANCESTOR_DEPTH)
        .map_err(|e| parse_err(lines[0], e.to_string()))
}

pub fn read_step_function(path: impl AsRef<Path>) -> Result<StepFunction> {
    parse_step_function(&read_to_string(path.as_ref())?)
}

pub fn write_step_function(f: &StepFunction, path: impl AsRef<Path>) -> Result<()> {
    write_string(path.as_ref(), &step_function_to_csv(f))
}

pub fn read_weight(path: impl AsRef<Path>) -> Result<Weight> {
    Weight::new(read_step_function(path)?)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| parse_err(e.line() as u64, e.to_string()))
}

pub fn read_symbol(path: impl AsRef<Path>) -> Result<SymbolSequence> {
    read_json(path.as_ref())
}

pub fn read_expansion(path: impl AsRef<Path>) -> Result<HaarExpansion> {
    read_json(path.as_ref())
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    write_string(path.as_ref(), &s)
}

/// `{"exponents": [..], "weight_files": [..]}`; relative paths resolve against the JSON file's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightVectorFile {
    pub exponents: ExponentVector,
    pub weight_files: Vec<PathBuf>,
}

pub fn read_weight_vector(path: impl AsRef<Path>) -> Result<WeightVector> {
    let path = path.as_ref();
    let manifest: WeightVectorFile = read_json(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let weights = manifest
        .weight_files
        .iter()
        .map(|f| read_weight(dir.join(f)))
        .collect::<Result<Vec<_>>>()?;
    WeightVector::new(weights, manifest.exponents)
}
