#![allow(dead_code)]

use proptest::prelude::*;
use tscale::TimeScale;

/// A random scale with a window `[a, b]` that stops short of the last point,
/// so every point of the window has a genuine successor.
#[derive(Debug, Clone)]
pub struct Case {
    pub pairs: Vec<[f64; 2]>,
    pub a: f64,
    pub b: f64,
}

impl Case {
    pub fn ts(&self) -> TimeScale {
        TimeScale::from_pairs(&self.pairs).unwrap()
    }
}

fn hundredths(k: i32) -> f64 {
    k as f64 / 100.0
}

/// Pieces are `(is_segment, length, gap)` in hundredths.
fn build(start: i32, pieces: Vec<(bool, i32, i32)>, trailing_gap: i32) -> Case {
    let mut x = hundredths(start);
    let mut pairs = Vec::new();
    for (i, (seg, len, gap)) in pieces.into_iter().enumerate() {
        if i > 0 {
            x += hundredths(gap);
        }
        let lo = x;
        if seg {
            x += hundredths(len);
        }
        pairs.push([lo, x]);
    }
    let (a, b) = (pairs[0][0], x);
    let tail = x + hundredths(trailing_gap);
    pairs.push([tail, tail]);
    let b = if a < b { b } else { tail };
    Case { pairs, a, b }
}

/// Mixtures of segments and isolated points.
pub fn mixed_case() -> impl Strategy<Value = Case> {
    (-200..=200i32, prop::collection::vec((any::<bool>(), 20..=150i32, 10..=120i32), 1..=5), 10..=120i32)
        .prop_map(|(s, p, g)| build(s, p, g))
}

/// Isolated points only, unevenly spaced.
pub fn discrete_case() -> impl Strategy<Value = Case> {
    (-200..=200i32, prop::collection::vec((Just(false), 0..=1i32, 10..=150i32), 2..=10), 10..=150i32)
        .prop_map(|(s, p, g)| build(s, p, g))
}

/// One segment and nothing else; `b` is the top of the scale.
pub fn real_case() -> impl Strategy<Value = Case> {
    (-200..=200i32, 50..=400i32).prop_map(|(s, len)| {
        let (a, b) = (hundredths(s), hundredths(s + len));
        Case { pairs: vec![[a, b]], a, b }
    })
}

pub fn poly_src() -> impl Strategy<Value = String> {
    prop::collection::vec(-200..=200i32, 1..=5).prop_map(|cs| {
        cs.iter()
            .enumerate()
            .map(|(k, c)| format!("({})*t^{k}", hundredths(*c)))
            .collect::<Vec<_>>()
            .join(" + ")
    })
}

pub fn smooth_src() -> impl Strategy<Value = String> {
    prop_oneof![
        poly_src(),
        (-100..=100i32).prop_map(|c| format!("sin({}*t)", hundredths(c))),
        (-100..=100i32).prop_map(|c| format!("exp({}*t)", hundredths(c))),
        (-100..=100i32).prop_map(|c| format!("cos({}*t) + t/3", hundredths(c))),
    ]
}

pub fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol
}

/// A point of `T ∩ [lo, hi]` chosen by `frac`, from segment ends and a few
/// interior points.
pub fn point_in(ts: &TimeScale, lo: f64, hi: f64, frac: f64) -> f64 {
    let mut cands = Vec::new();
    for s in ts.segments() {
        let (l, h) = (s.lo.max(lo), s.hi.min(hi));
        if l <= h {
            cands.extend([l, h, l + 0.3 * (h - l), l + 0.7 * (h - l)]);
        }
    }
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    cands[((frac * cands.len() as f64) as usize).min(cands.len() - 1)]
}

/// Identity-weight kernel whose two shift points are `m1` and `m2`, using a
/// `ψ` table that hits the required values at `λ = 1/4` and `λ = 3/4`.
pub fn kernel_with_shifts(ts: &TimeScale, a: f64, b: f64, m1: f64, m2: f64) -> tscale::kernel::KernelParams {
    let v1 = (2.0 * (m1 - a) / (b - a)).clamp(0.0, 1.0);
    let v2 = (2.0 * (m2 - a) / (b - a) - 1.0).clamp(0.0, 1.0);
    let psi = tscale::ParamFunction::table(vec![(0.0, v1), (0.25, v1), (0.75, v2), (1.0, v2)]).unwrap();
    tscale::kernel::KernelParams::new(ts, a, b, 0.25, psi, tscale::kernel::WeightPair::identity()).unwrap()
}
