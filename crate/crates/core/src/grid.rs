//! Dyadic intervals and the finite window every computation lives on.
//!
//! A [`Window`] with parameters `(K, N, A)` covers `[-2^K, 2^K)` with cells of
//! length `2^-N`. Its interval enumeration contains every standard dyadic
//! interval inside `[-2^K, 0)` or `[0, 2^K)` with length between `2^-N` and
//! `2^K`, plus `A` ancestors on each side: `[-2^(K+a), 0)` and `[0, 2^(K+a))`.
//!
//! Intervals are addressed by a flat index in enumeration order (coarse to
//! fine, left to right), which lets per-interval tables be plain vectors:
//!
//! ```text
//! 0 .. 2A                 ancestors, depth A first; negative side before positive
//! 2A + 2^(K+k+1) - 2 ..   in-window intervals of scale k, left to right
//! ```

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{DyadicError, Result};

/// Largest supported `K + N + 1` (log2 of the cell count).
pub const MAX_CELL_LOG: i32 = 26;

/// `2^e` for an integer exponent; exact for the supported range.
#[inline]
pub fn exp2i(e: i32) -> f64 {
    2f64.powi(e)
}

/// The dyadic interval `[m 2^-k, (m+1) 2^-k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicInterval {
    /// `k`: the interval has length `2^-k`. Negative for long intervals.
    #[serde(rename = "k")]
    pub scale: i32,
    /// `m`: the left endpoint is `m 2^-k`.
    #[serde(rename = "m")]
    pub offset: i64,
}

impl DyadicInterval {
    pub const fn new(scale: i32, offset: i64) -> Self {
        DyadicInterval { scale, offset }
    }

    /// `|I| = 2^-k`.
    #[inline]
    pub fn length(&self) -> f64 {
        exp2i(-self.scale)
    }

    #[inline]
    pub fn left(&self) -> f64 {
        self.offset as f64 * self.length()
    }

    #[inline]
    pub fn right(&self) -> f64 {
        (self.offset + 1) as f64 * self.length()
    }

    /// The unique dyadic interval of twice the length containing `self`.
    pub fn parent(&self) -> DyadicInterval {
        DyadicInterval::new(self.scale - 1, self.offset.div_euclid(2))
    }

    /// `I_-`.
    pub fn left_half(&self) -> DyadicInterval {
        DyadicInterval::new(self.scale + 1, 2 * self.offset)
    }

    /// `I_+`.
    pub fn right_half(&self) -> DyadicInterval {
        DyadicInterval::new(self.scale + 1, 2 * self.offset + 1)
    }

    pub fn is_left_half(&self) -> bool {
        self.offset.rem_euclid(2) == 0
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &DyadicInterval) -> bool {
        if other.scale < self.scale {
            return false;
        }
        let shift = (other.scale - self.scale) as u32;
        if shift >= 63 {
            return false;
        }
        (other.offset >> shift) == self.offset
    }

    pub fn contains_point(&self, x: f64) -> bool {
        self.left() <= x && x < self.right()
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.left(), self.right())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Negative,
    Positive,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::Negative => 0,
            Side::Positive => 1,
        }
    }
}

/// Where an interval sits relative to a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// `[0, 2^(K+depth))` or `[-2^(K+depth), 0)` with `1 <= depth <= A`.
    Ancestor { depth: u32, side: Side },
    /// In-window interval of the given scale; `position` counts from the left edge.
    InWindow { scale: i32, position: usize },
    BelowResolution,
    Outside,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct WindowRepr {
    #[serde(rename = "K")]
    k: i32,
    #[serde(rename = "N")]
    n: i32,
    #[serde(rename = "A", default = "default_ancestor_depth")]
    a: u32,
}

fn default_ancestor_depth() -> u32 {
    Window::DEFAULT_ANCESTOR_DEPTH
}

impl TryFrom<WindowRepr> for Window {
    type Error = DyadicError;
    fn try_from(r: WindowRepr) -> Result<Self> {
        Window::new(r.k, r.n, r.a)
    }
}

impl From<Window> for WindowRepr {
    fn from(w: Window) -> Self {
        WindowRepr {
            k: w.half_extent_log,
            n: w.resolution_log,
            a: w.ancestor_depth,
        }
    }
}

/// The finite window `[-2^K, 2^K)` at resolution `2^-N` with `A` ancestor levels.
///
/// Serialized as the JSON object `{"K": .., "N": .., "A": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "WindowRepr", into = "WindowRepr")]
pub struct Window {
    half_extent_log: i32,
    resolution_log: i32,
    ancestor_depth: u32,
}

impl Window {
    pub const DEFAULT_ANCESTOR_DEPTH: u32 = 16;

    pub fn new(half_extent_log: i32, resolution_log: i32, ancestor_depth: u32) -> Result<Self> {
        let k = half_extent_log;
        let n = resolution_log;
        if k + n < 0 {
            return Err(DyadicError::InvalidWindow(format!(
                "K + N must be non-negative (K={k}, N={n})"
            )));
        }
        if k + n + 1 > MAX_CELL_LOG {
            return Err(DyadicError::InvalidWindow(format!(
                "2^(K+N+1) cells exceeds the supported maximum 2^{MAX_CELL_LOG}"
            )));
        }
        if n.abs() > 52 || (k + ancestor_depth as i32).abs() > 52 || k.abs() > 52 {
            return Err(DyadicError::InvalidWindow(
                "scales must stay within 52 binary orders of magnitude".into(),
            ));
        }
        Ok(Window {
            half_extent_log: k,
            resolution_log: n,
            ancestor_depth,
        })
    }

    /// `K`.
    pub fn half_extent_log(&self) -> i32 {
        self.half_extent_log
    }

    /// `N`.
    pub fn resolution_log(&self) -> i32 {
        self.resolution_log
    }

    /// `A`.
    pub fn ancestor_depth(&self) -> u32 {
        self.ancestor_depth
    }

    pub fn with_resolution(&self, resolution_log: i32) -> Result<Window> {
        Window::new(self.half_extent_log, resolution_log, self.ancestor_depth)
    }

    pub fn with_ancestor_depth(&self, ancestor_depth: u32) -> Result<Window> {
        Window::new(self.half_extent_log, self.resolution_log, ancestor_depth)
    }

    pub fn cell_count(&self) -> usize {
        1usize << (self.half_extent_log + self.resolution_log + 1)
    }

    /// Cells per half window.
    pub fn half_cells(&self) -> usize {
        self.cell_count() / 2
    }

    pub fn cell_length(&self) -> f64 {
        exp2i(-self.resolution_log)
    }

    /// `2^K`.
    pub fn half_extent(&self) -> f64 {
        exp2i(self.half_extent_log)
    }

    pub fn cell_left(&self, cell: usize) -> f64 {
        -self.half_extent() + cell as f64 * self.cell_length()
    }

    pub fn cell_interval(&self, cell: usize) -> DyadicInterval {
        DyadicInterval::new(self.resolution_log, cell as i64 - self.half_cells() as i64)
    }

    /// Cell containing `x`, if `x` lies in the window.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        let h = self.half_extent();
        if !(-h..h).contains(&x) {
            return None;
        }
        Some(((x + h) / self.cell_length()).floor() as usize)
    }

    /// Scales of in-window intervals, coarse to fine: `-K ..= N`.
    pub fn scales(&self) -> std::ops::RangeInclusive<i32> {
        -self.half_extent_log..=self.resolution_log
    }

    /// Number of in-window intervals of the given scale.
    pub fn level_len(&self, scale: i32) -> usize {
        1usize << (self.half_extent_log + scale + 1)
    }

    /// Level index (0 for the coarsest in-window scale `-K`).
    pub fn level_of(&self, scale: i32) -> usize {
        (scale + self.half_extent_log) as usize
    }

    pub fn level_count(&self) -> usize {
        (self.half_extent_log + self.resolution_log + 1) as usize
    }

    /// Flat index of the first in-window interval of `scale`.
    pub fn level_base(&self, scale: i32) -> usize {
        2 * self.ancestor_depth as usize + self.level_len(scale) - 2
    }

    /// Flat index of the ancestor of the given depth (`1..=A`) and side.
    pub fn ancestor_index(&self, depth: u32, side: Side) -> usize {
        debug_assert!(depth >= 1 && depth <= self.ancestor_depth);
        2 * (self.ancestor_depth - depth) as usize + side.index()
    }

    /// Total interval count: `sum_{j=0}^{K+N} 2^(j+1)` in-window plus `2A` ancestors.
    pub fn interval_count(&self) -> usize {
        2 * self.ancestor_depth as usize + (1usize << (self.level_count() + 1)) - 2
    }

    /// `[0, 2^(K+depth))` or `[-2^(K+depth), 0)`; depth 0 is the half window itself.
    pub fn ancestor(&self, depth: u32, side: Side) -> DyadicInterval {
        let offset = match side {
            Side::Negative => -1,
            Side::Positive => 0,
        };
        DyadicInterval::new(-(self.half_extent_log + depth as i32), offset)
    }

    pub fn half_window(&self, side: Side) -> DyadicInterval {
        self.ancestor(0, side)
    }

    pub fn placement(&self, interval: &DyadicInterval) -> Placement {
        let k = interval.scale;
        if k > self.resolution_log {
            return Placement::BelowResolution;
        }
        if k >= -self.half_extent_log {
            let half = 1i64 << (self.half_extent_log + k);
            let position = interval.offset + half;
            if position >= 0 && position < 2 * half {
                return Placement::InWindow {
                    scale: k,
                    position: position as usize,
                };
            }
            return Placement::Outside;
        }
        let depth = (-k - self.half_extent_log) as u32;
        if depth > self.ancestor_depth {
            return Placement::Outside;
        }
        match interval.offset {
            0 => Placement::Ancestor {
                depth,
                side: Side::Positive,
            },
            -1 => Placement::Ancestor {
                depth,
                side: Side::Negative,
            },
            _ => Placement::Outside,
        }
    }

    pub fn index_of(&self, interval: &DyadicInterval) -> Option<usize> {
        match self.placement(interval) {
            Placement::Ancestor { depth, side } => Some(self.ancestor_index(depth, side)),
            Placement::InWindow { scale, position } => Some(self.level_base(scale) + position),
            _ => None,
        }
    }

    pub fn interval_at(&self, index: usize) -> DyadicInterval {
        let anc = 2 * self.ancestor_depth as usize;
        if index < anc {
            let depth = self.ancestor_depth - (index / 2) as u32;
            let side = if index % 2 == 0 {
                Side::Negative
            } else {
                Side::Positive
            };
            return self.ancestor(depth, side);
        }
        let rel = index - anc + 2;
        // level_len(k) = 2^(K+k+1) <= rel < 2^(K+k+2)
        let bits = usize::BITS - 1 - rel.leading_zeros();
        let scale = bits as i32 - 1 - self.half_extent_log;
        let position = rel - (1usize << bits);
        DyadicInterval::new(
            scale,
            position as i64 - (1i64 << (self.half_extent_log + scale)),
        )
    }

    /// All intervals in enumeration order: ancestors (coarsest first), then
    /// in-window intervals coarse to fine, each level left to right.
    pub fn enumerate(&self) -> Vec<DyadicInterval> {
        (0..self.interval_count())
            .map(|i| self.interval_at(i))
            .collect()
    }

    /// In-window intervals only, coarse to fine.
    pub fn in_window_intervals(&self) -> impl Iterator<Item = DyadicInterval> + '_ {
        let first = 2 * self.ancestor_depth as usize;
        (first..self.interval_count()).map(move |i| self.interval_at(i))
    }

    /// Cells covered by an in-window interval, or the window part of an ancestor.
    pub fn cell_range(&self, interval: &DyadicInterval) -> Result<Range<usize>> {
        match self.placement(interval) {
            Placement::InWindow { scale, position } => {
                let width = 1usize << (self.resolution_log - scale);
                Ok(position * width..(position + 1) * width)
            }
            Placement::Ancestor { side, .. } => {
                let h = self.half_cells();
                Ok(match side {
                    Side::Negative => 0..h,
                    Side::Positive => h..2 * h,
                })
            }
            Placement::BelowResolution => Err(DyadicError::BelowResolution(*interval)),
            Placement::Outside => Err(DyadicError::NotInWindow(*interval)),
        }
    }
}
