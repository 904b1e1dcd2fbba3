//! Multilinear dyadic operators.
//!
//! For `α ∈ {0,1}^m` write `f(I, 0) = <f, h_I>` and `f(I, 1) = <f>_I`, and let
//! `σ(α)` count the zeros of `α`.
//!
//! * `P^α(f⃗) = Σ_I Π_j f_j(I, α_j) h_I^σ(α)`
//! * `π_b^α(f⃗) = P^(0,α)(b, f⃗)`
//! * `T_ε^α(f⃗) = Σ_I ε_I Π_j f_j(I, α_j) h_I^σ(α)`
//! * `[b, T_ε^α]_i(f⃗) = b T_ε^α(f⃗) - T_ε^α(f_1, .., b f_i, .., f_m)`
//!
//! Sums run over the window's interval enumeration (ancestors included), and
//! `h_I^0` is taken to be `1_I`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{DyadicError, Result};
use crate::function::{common_window, StepFunction};
use crate::grid::{DyadicInterval, Window};
use crate::haar::{average, haar_coefficient, synthesize, HaarAnalysis};

/// `α ∈ {0,1}^m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    bits: Vec<u8>,
}

impl MultiIndex {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(DyadicError::param("alpha", "must have at least one slot"));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(DyadicError::param("alpha", "entries must be 0 or 1"));
        }
        Ok(MultiIndex { bits })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn arity(&self) -> usize {
        self.bits.len()
    }

    /// `σ(α)`: the number of zero entries.
    pub fn sigma(&self) -> u32 {
        self.bits.iter().filter(|&&b| b == 0).count() as u32
    }

    /// Whether `α ∈ U_m`, i.e. not all ones.
    pub fn in_u_m(&self) -> bool {
        self.sigma() > 0
    }

    /// `(0, α)`.
    pub fn with_leading_zero(&self) -> MultiIndex {
        let mut bits = Vec::with_capacity(self.bits.len() + 1);
        bits.push(0);
        bits.extend_from_slice(&self.bits);
        MultiIndex { bits }
    }

    /// All of `{0,1}^m`, in lexicographic order.
    pub fn all(m: usize) -> Vec<MultiIndex> {
        (0..1usize << m)
            .map(|code| MultiIndex {
                bits: (0..m).map(|j| ((code >> (m - 1 - j)) & 1) as u8).collect(),
            })
            .collect()
    }
}

impl FromStr for MultiIndex {
    type Err = DyadicError;

    /// Parses a 0/1 string such as `"01"`.
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(DyadicError::param(
                    "alpha",
                    format!("unexpected character {other:?}; use a 0/1 string like \"01\""),
                )),
            })
            .collect::<Result<Vec<u8>>>()?;
        MultiIndex::new(bits)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A bounded symbol `ε = (ε_I)`, stored sparsely over a default value.
///
/// JSON form: `{"default": x, "entries": [{"k": .., "m": .., "value": ..}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolSequence {
    pub default: f64,
    #[serde(rename = "entries", with = "crate::haar::coefficient_list_serde")]
    pub values: BTreeMap<DyadicInterval, f64>,
}

impl SymbolSequence {
    pub fn constant(value: f64) -> Self {
        SymbolSequence {
            default: value,
            values: BTreeMap::new(),
        }
    }

    pub fn get(&self, interval: &DyadicInterval) -> f64 {
        self.values.get(interval).copied().unwrap_or(self.default)
    }

    pub fn set(&mut self, interval: DyadicInterval, value: f64) {
        self.values.insert(interval, value);
    }

    /// `‖ε‖_∞`, including the default.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .values()
            .fold(self.default.abs(), |m, v| m.max(v.abs()))
    }

    /// `ε_I` for every enumerated interval of `window`, in flat index order.
    pub fn resolve(&self, window: &Window) -> Vec<f64> {
        let mut flat = vec![self.default; window.interval_count()];
        for (interval, &v) in &self.values {
            if let Some(idx) = window.index_of(interval) {
                flat[idx] = v;
            }
        }
        flat
    }
}

/// `f(I, bit)`: the Haar coefficient for bit 0, the average for bit 1.
pub fn slot_value(f: &StepFunction, interval: &DyadicInterval, bit: u8) -> Result<f64> {
    match bit {
        0 => haar_coefficient(f, interval),
        1 => average(f, interval),
        _ => Err(DyadicError::param("bit", "must be 0 or 1")),
    }
}

fn check_arity(alpha: &MultiIndex, fs: &[StepFunction]) -> Result<Window> {
    if fs.len() != alpha.arity() {
        return Err(DyadicError::ArityMismatch {
            expected: alpha.arity(),
            got: fs.len(),
        });
    }
    common_window(fs)
}

/// `Π_j f_j(I, α_j)` for every enumerated interval, optionally times `ε_I`.
///
/// The product is formed left to right starting from `ε_I` (or 1).
pub fn summand_coefficients(
    analyses: &[HaarAnalysis],
    alpha: &MultiIndex,
    symbol: Option<&[f64]>,
) -> Vec<f64> {
    let len = analyses[0].averages().len();
    let mut out = match symbol {
        Some(eps) => eps.to_vec(),
        None => vec![1.0; len],
    };
    for (a, &bit) in analyses.iter().zip(alpha.bits()) {
        for (o, &v) in out.iter_mut().zip(a.slot_values(bit)) {
            *o *= v;
        }
    }
    out
}

fn multilinear_sum(
    alpha: &MultiIndex,
    fs: &[StepFunction],
    symbol: Option<&SymbolSequence>,
) -> Result<StepFunction> {
    let window = check_arity(alpha, fs)?;
    let analyses: Vec<HaarAnalysis> = fs.iter().map(HaarAnalysis::new).collect();
    let eps = symbol.map(|s| s.resolve(&window));
    let coefficients = summand_coefficients(&analyses, alpha, eps.as_deref());
    Ok(synthesize(&window, &coefficients, alpha.sigma()))
}

/// `P^α(f⃗)`.
pub fn paraproduct(alpha: &MultiIndex, fs: &[StepFunction]) -> Result<StepFunction> {
    if !alpha.in_u_m() {
        return Err(DyadicError::AlphaAllOnes);
    }
    multilinear_sum(alpha, fs, None)
}

/// `π_b^α(f⃗) = P^(0,α)(b, f⃗)`; any `α ∈ {0,1}^m` is allowed.
pub fn pi_b(b: &StepFunction, alpha: &MultiIndex, fs: &[StepFunction]) -> Result<StepFunction> {
    let mut all = Vec::with_capacity(fs.len() + 1);
    all.push(b.clone());
    all.extend_from_slice(fs);
    paraproduct(&alpha.with_leading_zero(), &all)
}

/// `T_ε^α(f⃗)`.
pub fn haar_multiplier(
    symbol: &SymbolSequence,
    alpha: &MultiIndex,
    fs: &[StepFunction],
) -> Result<StepFunction> {
    if !alpha.in_u_m() {
        return Err(DyadicError::AlphaAllOnes);
    }
    multilinear_sum(alpha, fs, Some(symbol))
}

/// `M_g^i(f⃗)`: slot `i` (1-based) replaced by `g f_i`.
pub fn multiply_slot(g: &StepFunction, slot: usize, fs: &[StepFunction]) -> Result<Vec<StepFunction>> {
    if slot == 0 || slot > fs.len() {
        return Err(DyadicError::SlotOutOfRange {
            slot,
            arity: fs.len(),
        });
    }
    let mut out = fs.to_vec();
    out[slot - 1] = g.mul(&fs[slot - 1])?;
    Ok(out)
}

/// `[b, T_ε^α]_i(f⃗) = b T_ε^α(f⃗) - T_ε^α(M_b^i f⃗)`.
pub fn commutator(
    b: &StepFunction,
    symbol: &SymbolSequence,
    alpha: &MultiIndex,
    slot: usize,
    fs: &[StepFunction],
) -> Result<StepFunction> {
    let direct = haar_multiplier(symbol, alpha, fs)?;
    let moved = haar_multiplier(symbol, alpha, &multiply_slot(b, slot, fs)?)?;
    b.mul(&direct)?.sub(&moved)
}

/// One of the four operator families with its fixed data.
#[derive(Debug, Clone, PartialEq)]
pub enum DyadicOperator {
    Paraproduct {
        alpha: MultiIndex,
    },
    PiB {
        b: StepFunction,
        alpha: MultiIndex,
    },
    HaarMultiplier {
        symbol: SymbolSequence,
        alpha: MultiIndex,
    },
    Commutator {
        b: StepFunction,
        symbol: SymbolSequence,
        alpha: MultiIndex,
        slot: usize,
    },
}

impl DyadicOperator {
    pub fn alpha(&self) -> &MultiIndex {
        match self {
            DyadicOperator::Paraproduct { alpha }
            | DyadicOperator::PiB { alpha, .. }
            | DyadicOperator::HaarMultiplier { alpha, .. }
            | DyadicOperator::Commutator { alpha, .. } => alpha,
        }
    }

    pub fn arity(&self) -> usize {
        self.alpha().arity()
    }

    pub fn apply(&self, fs: &[StepFunction]) -> Result<StepFunction> {
        match self {
            DyadicOperator::Paraproduct { alpha } => paraproduct(alpha, fs),
            DyadicOperator::PiB { b, alpha } => pi_b(b, alpha, fs),
            DyadicOperator::HaarMultiplier { symbol, alpha } => haar_multiplier(symbol, alpha, fs),
            DyadicOperator::Commutator {
                b,
                symbol,
                alpha,
                slot,
            } => commutator(b, symbol, alpha, *slot, fs),
        }
    }
}
