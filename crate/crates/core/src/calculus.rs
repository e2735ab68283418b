//! Delta derivative, delta integral and the generalized monomials `h_k`.
//!
//! The delta integral over `[a, b]` is split into the continuous pieces of
//! `T ∩ [a, b]`, integrated with composite 5-point Gauss-Legendre, plus one
//! term `f(t)·mu(t)` for every right-scattered `t ∈ [a, b)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcdsl::DifferentiableFn;
use crate::timescale::TimeScale;

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// Jump sums with more terms than this use compensated summation.
const KAHAN_THRESHOLD: usize = 1000;
pub const MAX_HK_DEPTH: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum QuadratureRule {
    #[default]
    #[serde(rename = "gauss-legendre-5")]
    GaussLegendre5,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "default_panels")]
    pub panels_per_unit: u32,
    #[serde(default)]
    pub rule: QuadratureRule,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
}

fn default_panels() -> u32 {
    64
}

fn default_abs_tol() -> f64 {
    1e-9
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            panels_per_unit: default_panels(),
            rule: QuadratureRule::GaussLegendre5,
            abs_tol: default_abs_tol(),
        }
    }
}

impl QuadratureConfig {
    pub fn new(panels_per_unit: u32, abs_tol: f64) -> Result<Self> {
        let cfg = QuadratureConfig { panels_per_unit, rule: QuadratureRule::GaussLegendre5, abs_tol };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels_per_unit < 16 {
            return Err(Error::InvalidConfig(format!(
                "panels_per_unit = {} is below the minimum of 16",
                self.panels_per_unit
            )));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("abs_tol = {} must be positive", self.abs_tol)));
        }
        Ok(())
    }

    pub fn with_panels(self, panels_per_unit: u32) -> Self {
        QuadratureConfig { panels_per_unit, ..self }
    }
}

/// How many Gauss-Legendre panels a continuous stretch gets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PanelPolicy {
    /// `ceil(length · n)` panels, at least one.
    PerUnit(u32),
    /// One panel per stretch between breakpoints. Exact for integrands that
    /// are polynomials of degree <= 9 on each stretch.
    Single,
}

impl PanelPolicy {
    fn panels(self, len: f64) -> usize {
        match self {
            PanelPolicy::PerUnit(n) => ((len * n as f64).ceil() as usize).max(1),
            PanelPolicy::Single => 1,
        }
    }
}

impl From<&QuadratureConfig> for PanelPolicy {
    fn from(cfg: &QuadratureConfig) -> Self {
        PanelPolicy::PerUnit(cfg.panels_per_unit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub x: f64,
    pub weight: f64,
    /// Left end of the Gauss-Legendre panel holding this node (equals `x`
    /// for jump nodes).
    pub panel_lo: f64,
    /// True for a jump term `f(t)·mu(t)` at a right-scattered point.
    pub jump: bool,
}

/// Nodes and weights that realize the delta integral over `[a, b]`, in
/// ascending order of `x`. Jump nodes sit at the right end of their piece.
#[derive(Debug, Clone)]
pub struct QuadraturePlan {
    nodes: Vec<Node>,
    jumps: usize,
}

fn gauss_panels(lo: f64, hi: f64, panels: usize, out: &mut Vec<Node>) {
    let h = (hi - lo) / panels as f64;
    for k in 0..panels {
        let p0 = lo + k as f64 * h;
        let p1 = if k + 1 == panels { hi } else { p0 + h };
        let mid = 0.5 * (p0 + p1);
        let half = 0.5 * (p1 - p0);
        for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
            out.push(Node { x: mid + half * x, weight: half * w, panel_lo: p0, jump: false });
        }
    }
}

impl QuadraturePlan {
    /// Plan for `a <= b`, both in `T`. Breakpoints strictly inside continuous
    /// pieces split the panels so no panel straddles them.
    pub fn build(
        ts: &TimeScale,
        a: f64,
        b: f64,
        policy: PanelPolicy,
        breakpoints: &[f64],
    ) -> Result<Self> {
        let a = ts.snap(a)?;
        let b = ts.snap(b)?;
        if a > b {
            return Err(Error::EmptyRange { a, b });
        }
        let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|x| x.is_finite()).collect();
        cuts.sort_by(f64::total_cmp);

        let mut nodes = Vec::new();
        let mut jumps = 0;
        for piece in ts.pieces(a, b) {
            if piece.is_continuous() {
                let mut lo = piece.lo;
                let start = cuts.partition_point(|&c| c <= piece.lo);
                for &c in &cuts[start..] {
                    if c >= piece.hi {
                        break;
                    }
                    if c > lo {
                        gauss_panels(lo, c, policy.panels(c - lo), &mut nodes);
                        lo = c;
                    }
                }
                gauss_panels(lo, piece.hi, policy.panels(piece.hi - lo), &mut nodes);
            }
            if let Some(mu) = piece.jump {
                nodes.push(Node { x: piece.hi, weight: mu, panel_lo: piece.hi, jump: true });
                jumps += 1;
            }
        }
        Ok(QuadraturePlan { nodes, jumps })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn integrate<F>(&self, mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut cont = 0.0;
        let mut jump = Summer::new(self.jumps > KAHAN_THRESHOLD);
        for n in &self.nodes {
            let v = f(n.x)? * n.weight;
            if n.jump {
                jump.add(v);
            } else {
                cont += v;
            }
        }
        Ok(cont + jump.total())
    }

    /// Evaluates the integrand once per node.
    pub fn values<F>(&self, mut f: F) -> Result<Vec<f64>>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        self.nodes.iter().map(|n| f(n.x)).collect()
    }

    /// Integral from precomputed node values (as returned by [`Self::values`]).
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        let mut i = 0;
        self.integrate(|_| {
            let v = values[i];
            i += 1;
            Ok(v)
        })
        .expect("infallible")
    }

    /// `∫_a^{x_i} f Δs` at every node `x_i` of the plan. A jump node's own
    /// term is excluded. Inside a panel the partial integral is taken with a
    /// 5-point rule on `[panel_lo, x_i]`, so `f` must be smooth between the
    /// plan's breakpoints.
    pub fn running_integrals<F>(&self, mut f: F) -> Result<Vec<f64>>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut acc = Summer::new(true);
        let mut panel_lo = f64::NAN;
        let mut at_panel_start = 0.0;
        for n in &self.nodes {
            let v = f(n.x)?;
            if n.jump {
                out.push(acc.total());
            } else {
                if n.panel_lo != panel_lo {
                    panel_lo = n.panel_lo;
                    at_panel_start = acc.total();
                }
                out.push(at_panel_start + gauss5(&mut f, panel_lo, n.x)?);
            }
            acc.add(v * n.weight);
        }
        Ok(out)
    }
}

fn gauss5<F>(f: &mut F, lo: f64, hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut sum = 0.0;
    for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
        sum += w * f(mid + half * x)?;
    }
    Ok(sum * half)
}

/// Roots of `f` in `(lo, hi)` located by scanning `samples` equal steps for
/// sign changes and bisecting each bracket to machine precision.
pub fn sign_change_roots<F>(f: F, lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut roots = Vec::new();
    if !(lo < hi) {
        return Ok(roots);
    }
    let n = samples.max(1);
    let mut x0 = lo;
    let mut f0 = f(lo)?;
    for k in 1..=n {
        let x1 = if k == n { hi } else { lo + (hi - lo) * k as f64 / n as f64 };
        let f1 = f(x1)?;
        if f0 == 0.0 && x0 > lo {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            roots.push(bisect(&f, x0, x1, f0)?);
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(roots)
}

fn bisect<F>(f: &F, mut lo: f64, mut hi: f64, mut flo: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Plain or Neumaier-compensated summation.
struct Summer {
    sum: f64,
    comp: f64,
    compensated: bool,
}

impl Summer {
    fn new(compensated: bool) -> Self {
        Summer { sum: 0.0, comp: 0.0, compensated }
    }

    fn add(&mut self, v: f64) {
        if !self.compensated {
            self.sum += v;
            return;
        }
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `f^Δ(t)`: difference quotient across the jump at right-scattered points,
/// classical derivative at right-dense points.
pub fn delta_derivative(f: &DifferentiableFn, ts: &TimeScale, t: f64) -> Result<f64> {
    let t = ts.snap(t)?;
    if ts.is_isolated_max(t) {
        return Err(Error::DegeneratePoint(t));
    }
    let mu = ts.graininess(t)?;
    if mu > 0.0 {
        let s = t + mu;
        Ok((f.eval(s)? - f.eval(t)?) / mu)
    } else {
        f.derivative(t)
    }
}

/// Delta integral with the default panel policy of `cfg`.
pub fn delta_integral<F>(
    ts: &TimeScale,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
    breakpoints: &[f64],
    f: F,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    delta_integral_with(ts, a, b, cfg.into(), breakpoints, f)
}

pub fn delta_integral_with<F>(
    ts: &TimeScale,
    a: f64,
    b: f64,
    policy: PanelPolicy,
    breakpoints: &[f64],
    f: F,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let a = ts.snap(a)?;
    let b = ts.snap(b)?;
    if a > b {
        return Ok(-QuadraturePlan::build(ts, b, a, policy, breakpoints)?.integrate(f)?);
    }
    QuadraturePlan::build(ts, a, b, policy, breakpoints)?.integrate(f)
}

/// Generalized monomial `h_k(t, s)`: `h_0 = 1`, `h_{k+1}(t, s) = ∫_s^t h_k(τ, s) Δτ`.
///
/// On every continuous piece `h_k(·, s)` is a polynomial of degree `k`, so the
/// recursion integrates with one Gauss-Legendre panel per piece, which is
/// exact for `k <= 4`.
pub fn hk(ts: &TimeScale, t: f64, s: f64, k: u32, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    if k > MAX_HK_DEPTH {
        return Err(Error::DepthExceeded(k));
    }
    let t = ts.snap(t)?;
    let s = ts.snap(s)?;
    hk_rec(ts, t, s, k)
}

fn hk_rec(ts: &TimeScale, t: f64, s: f64, k: u32) -> Result<f64> {
    match k {
        0 => Ok(1.0),
        _ => delta_integral_with(ts, s, t, PanelPolicy::Single, &[], |tau| {
            hk_rec(ts, tau, s, k - 1)
        }),
    }
}
