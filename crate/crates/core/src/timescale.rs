//! Finite time scales: unions of closed intervals and isolated points.
//!
//! A [`TimeScale`] is stored as its minimal decomposition into disjoint
//! closed segments, sorted by left endpoint, with a strictly positive gap
//! between neighbours. Isolated points are degenerate segments.
//!
//! Boundary conventions: `sigma(max) = max` and `rho(min) = min`. An
//! isolated maximum is classified right-scattered (it is not in the set on
//! which delta derivatives exist); a maximum that closes a nondegenerate
//! interval is right-dense. The minimum is handled symmetrically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Membership slack used to absorb rounding in endpoint arithmetic.
pub fn tolerance(t: f64) -> f64 {
    1e-12 * t.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
}

impl Segment {
    pub fn new(lo: f64, hi: f64) -> Self {
        Segment { lo, hi }
    }

    pub fn point(t: f64) -> Self {
        Segment { lo: t, hi: t }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointClass {
    pub right_scattered: bool,
    pub right_dense: bool,
    pub left_scattered: bool,
    pub left_dense: bool,
}

impl PointClass {
    pub fn is_dense(&self) -> bool {
        self.right_dense && self.left_dense
    }
}

/// A maximal piece of `T ∩ [a, b]` as seen by the delta integral: a closed
/// interval (possibly a single point) and, when the piece's right end is
/// right-scattered and strictly below `b`, the graininess there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub jump: Option<f64>,
}

impl Piece {
    pub fn is_continuous(&self) -> bool {
        self.hi > self.lo
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    segments: Vec<Segment>,
}

impl TimeScale {
    /// Sorts, merges overlapping or touching segments and checks the result.
    pub fn normalize(mut segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::EmptyScale);
        }
        for s in &segments {
            if !s.lo.is_finite() || !s.hi.is_finite() || s.lo > s.hi {
                return Err(Error::BadSegment { lo: s.lo, hi: s.hi });
            }
        }
        segments.sort_by(|x, y| x.lo.total_cmp(&y.lo).then(x.hi.total_cmp(&y.hi)));
        let mut merged: Vec<Segment> = Vec::with_capacity(segments.len());
        for s in segments {
            match merged.last_mut() {
                Some(last) if s.lo <= last.hi + tolerance(last.hi) => {
                    last.hi = last.hi.max(s.hi);
                }
                _ => merged.push(s),
            }
        }
        Ok(TimeScale { segments: merged })
    }

    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        Self::normalize(pairs.iter().map(|p| Segment::new(p[0], p[1])).collect())
    }

    pub fn from_points(points: &[f64]) -> Result<Self> {
        Self::normalize(points.iter().map(|&t| Segment::point(t)).collect())
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::normalize(vec![Segment::new(lo, hi)])
    }

    /// Consecutive integers `lo, lo + 1, ..., hi`.
    pub fn integers(lo: i64, hi: i64) -> Result<Self> {
        let pts: Vec<f64> = (lo..=hi).map(|k| k as f64).collect();
        Self::from_points(&pts)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.segments.iter().map(|s| [s.lo, s.hi]).collect()
    }

    pub fn min(&self) -> f64 {
        self.segments[0].lo
    }

    pub fn max(&self) -> f64 {
        self.segments[self.segments.len() - 1].hi
    }

    /// True when every segment is a single point.
    pub fn is_discrete(&self) -> bool {
        self.segments.iter().all(Segment::is_point)
    }

    /// Index of the segment containing `t`, if any.
    pub fn locate(&self, t: f64) -> Option<usize> {
        if !t.is_finite() {
            return None;
        }
        let tol = tolerance(t);
        let idx = self.segments.partition_point(|s| s.lo - tol <= t);
        if idx == 0 {
            return None;
        }
        let i = idx - 1;
        if t <= self.segments[i].hi + tol {
            return Some(i);
        }
        // a point just below the next segment's lo within tolerance
        if idx < self.segments.len() && (self.segments[idx].lo - t).abs() <= tol {
            return Some(idx);
        }
        None
    }

    pub fn contains(&self, t: f64) -> bool {
        self.locate(t).is_some()
    }

    /// Returns the canonical representative of `t`: segment endpoints within
    /// tolerance snap to the stored endpoint.
    pub fn snap(&self, t: f64) -> Result<f64> {
        let i = self.locate(t).ok_or(Error::NotInScale(t))?;
        Ok(self.snap_in(i, t))
    }

    fn snap_in(&self, i: usize, t: f64) -> f64 {
        let s = self.segments[i];
        let tol = tolerance(t);
        if (t - s.hi).abs() <= tol {
            s.hi
        } else if (t - s.lo).abs() <= tol {
            s.lo
        } else {
            t.clamp(s.lo, s.hi)
        }
    }

    fn at_right_end(&self, i: usize, t: f64) -> bool {
        t >= self.segments[i].hi - tolerance(t)
    }

    fn at_left_end(&self, i: usize, t: f64) -> bool {
        t <= self.segments[i].lo + tolerance(t)
    }

    /// Forward jump operator.
    pub fn sigma(&self, t: f64) -> Result<f64> {
        let i = self.locate(t).ok_or(Error::NotInScale(t))?;
        let t = self.snap_in(i, t);
        if !self.at_right_end(i, t) {
            return Ok(t);
        }
        Ok(match self.segments.get(i + 1) {
            Some(next) => next.lo,
            None => t,
        })
    }

    /// Backward jump operator.
    pub fn rho(&self, t: f64) -> Result<f64> {
        let i = self.locate(t).ok_or(Error::NotInScale(t))?;
        let t = self.snap_in(i, t);
        if !self.at_left_end(i, t) || i == 0 {
            return Ok(t);
        }
        Ok(self.segments[i - 1].hi)
    }

    /// `mu(t) = sigma(t) - t`.
    pub fn graininess(&self, t: f64) -> Result<f64> {
        let i = self.locate(t).ok_or(Error::NotInScale(t))?;
        let t = self.snap_in(i, t);
        if !self.at_right_end(i, t) {
            return Ok(0.0);
        }
        Ok(match self.segments.get(i + 1) {
            Some(next) => next.lo - t,
            None => 0.0,
        })
    }

    pub fn classify(&self, t: f64) -> Result<PointClass> {
        let i = self.locate(t).ok_or(Error::NotInScale(t))?;
        let t = self.snap_in(i, t);
        let seg = self.segments[i];
        let last = i + 1 == self.segments.len();

        let right_scattered = if self.at_right_end(i, t) {
            if last {
                seg.is_point()
            } else {
                true
            }
        } else {
            false
        };
        let left_scattered = if self.at_left_end(i, t) {
            if i == 0 {
                seg.is_point()
            } else {
                true
            }
        } else {
            false
        };
        Ok(PointClass {
            right_scattered,
            right_dense: !right_scattered,
            left_scattered,
            left_dense: !left_scattered,
        })
    }

    /// True when `t` is an isolated maximum, i.e. outside the set where delta
    /// derivatives are defined.
    pub fn is_isolated_max(&self, t: f64) -> bool {
        let last = self.segments[self.segments.len() - 1];
        last.is_point() && (t - last.hi).abs() <= tolerance(t)
    }

    /// `{t ∈ T : a <= t <= b}` as a time scale.
    pub fn restrict(&self, a: f64, b: f64) -> Result<TimeScale> {
        let a = self.snap(a)?;
        let b = self.snap(b)?;
        if a >= b {
            return Err(Error::EmptyRange { a, b });
        }
        let segments = self
            .segments
            .iter()
            .filter(|s| s.hi >= a && s.lo <= b)
            .map(|s| Segment::new(s.lo.max(a), s.hi.min(b)))
            .collect();
        Self::normalize(segments)
    }

    /// Decomposes `T ∩ [a, b]` into pieces for integration. Requires `a <= b`
    /// to be canonical points of `T`.
    pub fn pieces(&self, a: f64, b: f64) -> Vec<Piece> {
        let mut out = Vec::new();
        let n = self.segments.len();
        for (i, s) in self.segments.iter().enumerate() {
            if s.hi < a || s.lo > b {
                continue;
            }
            let lo = s.lo.max(a);
            let hi = s.hi.min(b);
            let jump = if hi == s.hi && hi < b && i + 1 < n {
                Some(self.segments[i + 1].lo - s.hi)
            } else {
                None
            };
            out.push(Piece { lo, hi, jump });
        }
        out
    }

    /// Right-scattered points in `[a, b)`, ascending.
    pub fn scattered_points(&self, a: f64, b: f64) -> Vec<f64> {
        self.pieces(a, b)
            .into_iter()
            .filter(|p| p.jump.is_some())
            .map(|p| p.hi)
            .collect()
    }

    /// Every segment endpoint of `T ∩ [a, b]`, ascending and deduplicated.
    pub fn endpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for p in self.pieces(a, b) {
            for x in [p.lo, p.hi] {
                if out.last() != Some(&x) {
                    out.push(x);
                }
            }
        }
        out
    }
}
