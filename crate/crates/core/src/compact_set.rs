//! Nonempty compact subsets of the real line, represented as finite unions
//! of disjoint closed intervals.
//!
//! Every [`CompactSet`] is kept in canonical form: parts sorted by `lo`,
//! pairwise disjoint, and successive gaps strictly wider than the merge
//! tolerance. All operations return canonical sets, so the algebra
//! (Minkowski sum, scaling, products) is closed.
//!
//! The Hausdorff distance is exact. For a point `x` the distance
//! `dist(x, B)` is piecewise linear, so the directed distance `h(A, B)` is
//! attained either at an endpoint of a part of `A` or at the midpoint of a
//! gap of `B` lying inside a part of `A`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default gap below which neighbouring intervals are merged.
pub const DEFAULT_MERGE_TOL: f64 = 1e-12;

/// Default cap on the number of parts of a canonical set.
pub const DEFAULT_MAX_PARTS: usize = 4096;

/// A closed interval `[lo, hi]`; `lo == hi` is a singleton.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// Panics in debug builds if `lo > hi`.
    #[inline]
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval [{lo}, {hi}] has lo > hi");
        Interval { lo, hi }
    }

    pub fn try_new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite interval [{lo}, {hi}]")));
        }
        if lo > hi {
            return Err(Error::InvalidInput(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(Interval { lo, hi })
    }

    #[inline]
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::try_new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

/// Canonicalization parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetConfig {
    /// Gaps of width `<= merge_tol` are closed.
    pub merge_tol: f64,
    /// Above this many parts the narrowest gaps are closed until the set fits.
    pub max_parts: usize,
}

impl Default for SetConfig {
    fn default() -> Self {
        SetConfig {
            merge_tol: DEFAULT_MERGE_TOL,
            max_parts: DEFAULT_MAX_PARTS,
        }
    }
}

/// A nonempty compact subset of ℝ in canonical interval-union form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct CompactSet {
    parts: Vec<Interval>,
}

impl TryFrom<Vec<Interval>> for CompactSet {
    type Error = Error;

    fn try_from(v: Vec<Interval>) -> Result<Self> {
        CompactSet::from_intervals(v)
    }
}

impl From<CompactSet> for Vec<Interval> {
    fn from(s: CompactSet) -> Self {
        s.parts
    }
}

/// Sort, merge and cap a raw interval list.
pub fn canonicalize(raw: Vec<Interval>, merge_tol: f64) -> Result<CompactSet> {
    canonicalize_with(
        raw,
        &SetConfig {
            merge_tol,
            ..SetConfig::default()
        },
    )
}

pub fn canonicalize_with(mut raw: Vec<Interval>, cfg: &SetConfig) -> Result<CompactSet> {
    if raw.is_empty() {
        return Err(Error::EmptySet);
    }
    if cfg.merge_tol < 0.0 || cfg.max_parts == 0 {
        return Err(Error::InvalidInput("merge_tol must be >= 0 and max_parts > 0".into()));
    }
    raw.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut parts: Vec<Interval> = Vec::with_capacity(raw.len());
    for iv in raw {
        match parts.last_mut() {
            Some(last) if iv.lo - last.hi <= cfg.merge_tol => {
                if iv.hi > last.hi {
                    last.hi = iv.hi;
                }
            }
            _ => parts.push(iv),
        }
    }
    if parts.len() > cfg.max_parts {
        close_narrowest_gaps(&mut parts, cfg.max_parts);
    }
    Ok(CompactSet { parts })
}

/// Closes the narrowest gaps until at most `budget` parts remain.
fn close_narrowest_gaps(parts: &mut Vec<Interval>, budget: usize) {
    let mut gaps: Vec<(f64, usize)> = parts
        .windows(2)
        .enumerate()
        .map(|(i, w)| (w[1].lo - w[0].hi, i))
        .collect();
    gaps.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let excess = parts.len() - budget;
    let mut close = vec![false; parts.len()];
    for &(_, i) in gaps.iter().take(excess) {
        close[i] = true;
    }
    let mut merged: Vec<Interval> = Vec::with_capacity(budget);
    let mut current = parts[0];
    for (i, next) in parts.iter().enumerate().skip(1) {
        if close[i - 1] {
            current.hi = next.hi;
        } else {
            merged.push(current);
            current = *next;
        }
    }
    merged.push(current);
    *parts = merged;
}

impl CompactSet {
    pub fn from_intervals(raw: Vec<Interval>) -> Result<Self> {
        canonicalize(raw, DEFAULT_MERGE_TOL)
    }

    /// `[lo, hi]`; errors if `lo > hi`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Ok(CompactSet {
            parts: vec![Interval::try_new(lo, hi)?],
        })
    }

    pub fn singleton(x: f64) -> Self {
        CompactSet {
            parts: vec![Interval::point(x)],
        }
    }

    pub fn zero() -> Self {
        CompactSet::singleton(0.0)
    }

    pub(crate) fn from_interval(iv: Interval) -> Self {
        CompactSet { parts: vec![iv] }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    /// Always false: canonical sets are nonempty.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_convex(&self) -> bool {
        self.parts.len() == 1
    }

    pub fn is_singleton(&self) -> bool {
        self.parts.len() == 1 && self.parts[0].lo == self.parts[0].hi
    }

    /// Global minimum.
    pub fn lo(&self) -> f64 {
        self.parts[0].lo
    }

    /// Global maximum.
    pub fn hi(&self) -> f64 {
        self.parts[self.parts.len() - 1].hi
    }

    /// Diameter `hi - lo`.
    pub fn diameter(&self) -> f64 {
        self.hi() - self.lo()
    }

    /// Total length of the parts.
    pub fn measure(&self) -> f64 {
        self.parts.iter().map(Interval::width).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.distance_to_point(x) == 0.0
    }

    /// `{a + b : a ∈ self, b ∈ other}`.
    pub fn minkowski_add(&self, other: &CompactSet) -> CompactSet {
        if other.is_singleton() {
            return self.translate(other.lo());
        }
        if self.is_singleton() {
            return other.translate(self.lo());
        }
        let mut raw = Vec::with_capacity(self.parts.len() * other.parts.len());
        for a in &self.parts {
            for b in &other.parts {
                raw.push(Interval::new(a.lo + b.lo, a.hi + b.hi));
            }
        }
        canonicalize(raw, DEFAULT_MERGE_TOL).expect("sum of nonempty sets is nonempty")
    }

    /// `self + (-1)·other`, the Minkowski difference (not the Hukuhara one).
    pub fn minkowski_sub(&self, other: &CompactSet) -> CompactSet {
        self.minkowski_add(&other.scale(-1.0))
    }

    /// `{λa : a ∈ self}`.
    pub fn scale(&self, lambda: f64) -> CompactSet {
        if lambda == 0.0 {
            return CompactSet::zero();
        }
        let parts: Vec<Interval> = if lambda > 0.0 {
            self.parts
                .iter()
                .map(|p| Interval::new(lambda * p.lo, lambda * p.hi))
                .collect()
        } else {
            self.parts
                .iter()
                .rev()
                .map(|p| Interval::new(lambda * p.hi, lambda * p.lo))
                .collect()
        };
        // Scaling by a tiny factor can shrink gaps below the merge tolerance.
        if lambda.abs() < 1.0 && parts.len() > 1 {
            canonicalize(parts, DEFAULT_MERGE_TOL).expect("nonempty")
        } else {
            CompactSet { parts }
        }
    }

    /// `{a + t : a ∈ self}`.
    pub fn translate(&self, t: f64) -> CompactSet {
        if t == 0.0 {
            return self.clone();
        }
        let parts: Vec<Interval> = self
            .parts
            .iter()
            .map(|p| Interval::new(p.lo + t, p.hi + t))
            .collect();
        if parts.len() > 1 {
            // Rounding can close or overlap very narrow gaps.
            canonicalize(parts, DEFAULT_MERGE_TOL).expect("nonempty")
        } else {
            CompactSet { parts }
        }
    }

    /// `{ab : a ∈ self, b ∈ other}`, one interval per pair of parts.
    pub fn product(&self, other: &CompactSet) -> CompactSet {
        let mut raw = Vec::with_capacity(self.parts.len() * other.parts.len());
        for a in &self.parts {
            for b in &other.parts {
                let c = [a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi];
                let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                raw.push(Interval::new(lo, hi));
            }
        }
        canonicalize(raw, DEFAULT_MERGE_TOL).expect("product of nonempty sets is nonempty")
    }

    /// `dist(x, self)`.
    pub fn distance_to_point(&self, x: f64) -> f64 {
        // first part whose hi >= x
        let i = self.parts.partition_point(|p| p.hi < x);
        if i < self.parts.len() && self.parts[i].lo <= x {
            return 0.0;
        }
        let right = if i < self.parts.len() { self.parts[i].lo - x } else { f64::INFINITY };
        let left = if i > 0 { x - self.parts[i - 1].hi } else { f64::INFINITY };
        right.min(left)
    }

    /// Directed distance `sup_{a ∈ self} dist(a, other)`.
    pub fn directed_hausdorff(&self, other: &CompactSet) -> f64 {
        let mut best = 0.0f64;
        let gaps = &other.parts;
        // gap k lies between gaps[k] and gaps[k + 1]
        let mut k = 0usize;
        for p in &self.parts {
            best = best.max(other.distance_to_point(p.lo));
            best = best.max(other.distance_to_point(p.hi));
            while k + 1 < gaps.len() && 0.5 * (gaps[k].hi + gaps[k + 1].lo) < p.lo {
                k += 1;
            }
            let mut g = k;
            while g + 1 < gaps.len() {
                let m = 0.5 * (gaps[g].hi + gaps[g + 1].lo);
                if m > p.hi {
                    break;
                }
                best = best.max(other.distance_to_point(m));
                g += 1;
            }
        }
        best
    }

    /// Exact Hausdorff distance.
    pub fn hausdorff(&self, other: &CompactSet) -> f64 {
        self.directed_hausdorff(other).max(other.directed_hausdorff(self))
    }

    /// `H_d(self, {0}) = max(|lo|, |hi|)`.
    pub fn norm(&self) -> f64 {
        self.lo().abs().max(self.hi().abs())
    }

    /// Whether every point of `self` lies within `slack` of `other`.
    pub fn is_subset_of(&self, other: &CompactSet, slack: f64) -> bool {
        self.directed_hausdorff(other) <= slack
    }

    /// `[lo, hi]`.
    pub fn convex_hull(&self) -> CompactSet {
        CompactSet::from_interval(Interval::new(self.lo(), self.hi()))
    }

    /// The level-`depth` middle-thirds pre-Cantor set in `[0, 1]`.
    pub fn cantor(depth: u32) -> Result<CompactSet> {
        Self::cantor_with_budget(depth, DEFAULT_MAX_PARTS)
    }

    pub fn cantor_with_budget(depth: u32, max_parts: usize) -> Result<CompactSet> {
        let count = 1usize
            .checked_shl(depth)
            .filter(|&c| depth < usize::BITS && c <= max_parts)
            .ok_or_else(|| {
                Error::CapacityExceeded(format!(
                    "cantor depth {depth} needs 2^{depth} parts, budget is {max_parts}"
                ))
            })?;
        let denom = 3f64.powi(depth as i32);
        let parts = (0..count)
            .map(|bits| {
                // left endpoint has ternary digits 2·(bit) from the most significant end
                let mut numer: u64 = 0;
                for level in 0..depth {
                    let bit = (bits >> (depth - 1 - level)) & 1;
                    numer = numer * 3 + 2 * bit as u64;
                }
                let lo = numer as f64 / denom;
                let hi = (numer + 1) as f64 / denom;
                Interval::new(lo, hi)
            })
            .collect();
        Ok(CompactSet { parts })
    }

    /// Canonical text form `[lo1,hi1]∪[lo2,hi2]…`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CompactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str("∪")?;
            }
            write!(f, "[{},{}]", p.lo, p.hi)?;
        }
        Ok(())
    }
}

impl FromStr for CompactSet {
    type Err = Error;

    /// Accepts `[a,b]` and `{c}` parts joined by `∪` or `U`.
    fn from_str(s: &str) -> Result<Self> {
        let mut raw = Vec::new();
        for piece in s.split(['∪', 'U']) {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            let bad = || Error::InvalidInput(format!("cannot parse set component `{piece}`"));
            if let Some(inner) = piece.strip_prefix('{').and_then(|p| p.strip_suffix('}')) {
                let x: f64 = inner.trim().parse().map_err(|_| bad())?;
                raw.push(Interval::try_new(x, x)?);
            } else if let Some(inner) = piece.strip_prefix('[').and_then(|p| p.strip_suffix(']')) {
                let (a, b) = inner.split_once(',').ok_or_else(bad)?;
                let lo: f64 = a.trim().parse().map_err(|_| bad())?;
                let hi: f64 = b.trim().parse().map_err(|_| bad())?;
                raw.push(Interval::try_new(lo, hi)?);
            } else {
                return Err(bad());
            }
        }
        CompactSet::from_intervals(raw)
    }
}

impl std::ops::Add for &CompactSet {
    type Output = CompactSet;

    fn add(self, rhs: &CompactSet) -> CompactSet {
        self.minkowski_add(rhs)
    }
}

impl std::ops::Sub for &CompactSet {
    type Output = CompactSet;

    fn sub(self, rhs: &CompactSet) -> CompactSet {
        self.minkowski_sub(rhs)
    }
}

impl std::ops::Mul for &CompactSet {
    type Output = CompactSet;

    fn mul(self, rhs: &CompactSet) -> CompactSet {
        self.product(rhs)
    }
}
