//! Weighted trapezoid and Grüss inequalities, their specializations to
//! continuous, integer and linear-weight settings, and the classical
//! unweighted forms they reduce to.
//!
//! Every check returns an [`InequalityReport`] carrying both sides and the
//! intermediate quantities they were assembled from.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::calculus::{self, hk, QuadratureConfig};
use crate::error::{Error, Result};
use crate::funcdsl::{poly, DifferentiableFn, ParamFunction};
use crate::kernel::{self, KernelParams, WeightPair};
use crate::timescale::TimeScale;

/// Grid points per continuous piece for sup norms of non-polynomials.
pub const SUP_GRID: usize = 1024;
/// Samples per continuous piece when scanning `p`, `q` for sign changes.
const ROOT_SCAN: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "thm3.2")]
    Trapezoid,
    #[serde(rename = "cor3.3")]
    TrapezoidReal,
    #[serde(rename = "cor3.4")]
    TrapezoidH2,
    #[serde(rename = "cor3.5")]
    TrapezoidLinear,
    #[serde(rename = "cor3.6")]
    TrapezoidInteger,
    #[serde(rename = "thm3.7")]
    Gruss,
    #[serde(rename = "cor3.8")]
    GrussReal,
    #[serde(rename = "cor3.9")]
    GrussInteger,
    #[serde(rename = "cor3.10")]
    GrussClassicWeight,
    #[serde(rename = "pach1.1")]
    ClassicTrapezoid,
    #[serde(rename = "pach1.2")]
    ClassicGruss,
}

impl TheoremId {
    pub const ALL: [TheoremId; 11] = [
        TheoremId::Trapezoid,
        TheoremId::TrapezoidReal,
        TheoremId::TrapezoidH2,
        TheoremId::TrapezoidLinear,
        TheoremId::TrapezoidInteger,
        TheoremId::Gruss,
        TheoremId::GrussReal,
        TheoremId::GrussInteger,
        TheoremId::GrussClassicWeight,
        TheoremId::ClassicTrapezoid,
        TheoremId::ClassicGruss,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Trapezoid => "thm3.2",
            TheoremId::TrapezoidReal => "cor3.3",
            TheoremId::TrapezoidH2 => "cor3.4",
            TheoremId::TrapezoidLinear => "cor3.5",
            TheoremId::TrapezoidInteger => "cor3.6",
            TheoremId::Gruss => "thm3.7",
            TheoremId::GrussReal => "cor3.8",
            TheoremId::GrussInteger => "cor3.9",
            TheoremId::GrussClassicWeight => "cor3.10",
            TheoremId::ClassicTrapezoid => "pach1.1",
            TheoremId::ClassicGruss => "pach1.2",
        }
    }

    /// Trapezoid-family checks read `f`; Grüss-family checks read `p`, `q`.
    pub fn is_trapezoid(self) -> bool {
        matches!(
            self,
            TheoremId::Trapezoid
                | TheoremId::TrapezoidReal
                | TheoremId::TrapezoidH2
                | TheoremId::TrapezoidLinear
                | TheoremId::TrapezoidInteger
                | TheoremId::ClassicTrapezoid
        )
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown theorem id `{s}`")))
    }
}

/// Sup norms of delta derivatives over the probe set: scattered points of
/// `[a, b)` and the continuous pieces of `[a, b]` as closed segments.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SupNorms {
    /// `sup |f^Δ(t)|`
    pub m: f64,
    /// `sup |f^Δ(σ(t))|`
    pub n: f64,
    /// `sup |p^Δ(t)|`
    pub p: f64,
    /// `sup |q^Δ(t)|`
    pub q: f64,
    pub probe_count: usize,
    /// False when some sup came from grid probing and is only a lower bound.
    pub exact: bool,
}

struct Sup {
    value: f64,
    probes: usize,
    exact: bool,
}

impl Sup {
    fn new() -> Self {
        Sup { value: 0.0, probes: 0, exact: true }
    }

    fn take(&mut self, v: f64) -> Result<()> {
        if !v.is_finite() {
            return Err(Error::Domain(format!("non-finite derivative value {v}")));
        }
        self.value = self.value.max(v.abs());
        self.probes += 1;
        Ok(())
    }
}

/// `sup |g'|` over every continuous piece of `[a, b]`.
fn sup_on_pieces(g: &DifferentiableFn, ts: &TimeScale, a: f64, b: f64, sup: &mut Sup) -> Result<()> {
    let deriv = g.polynomial().map(|c| poly::derivative(&c));
    for piece in ts.pieces(a, b).into_iter().filter(|p| p.is_continuous()) {
        match &deriv {
            Some(d) => {
                sup.take(poly::sup_abs_on(d, piece.lo, piece.hi))?;
            }
            None => {
                sup.exact = false;
                let h = (piece.hi - piece.lo) / (SUP_GRID - 1) as f64;
                for i in 0..SUP_GRID {
                    let x = if i + 1 == SUP_GRID { piece.hi } else { piece.lo + h * i as f64 };
                    sup.take(g.derivative(x)?)?;
                }
            }
        }
    }
    Ok(())
}

fn sup_delta(g: &DifferentiableFn, ts: &TimeScale, a: f64, b: f64) -> Result<Sup> {
    let mut sup = Sup::new();
    for t in ts.scattered_points(a, b) {
        sup.take(calculus::delta_derivative(g, ts, t)?)?;
    }
    sup_on_pieces(g, ts, a, b, &mut sup)?;
    Ok(sup)
}

/// `sup |g^Δ(σ(t))|`. On continuous pieces `σ(t) = t`; at a scattered `t`
/// the derivative is taken at the next point, skipped when that point is an
/// isolated maximum of `T` (where `g ∘ σ` is constant).
fn sup_delta_sigma(g: &DifferentiableFn, ts: &TimeScale, a: f64, b: f64) -> Result<Sup> {
    let mut sup = Sup::new();
    for t in ts.scattered_points(a, b) {
        let u = ts.sigma(t)?;
        if ts.is_isolated_max(u) {
            continue;
        }
        sup.take(calculus::delta_derivative(g, ts, u)?)?;
    }
    sup_on_pieces(g, ts, a, b, &mut sup)?;
    Ok(sup)
}

pub fn sup_norms(
    f: Option<&DifferentiableFn>,
    p: Option<&DifferentiableFn>,
    q: Option<&DifferentiableFn>,
    ts: &TimeScale,
    a: f64,
    b: f64,
) -> Result<SupNorms> {
    let mut out = SupNorms { exact: true, ..SupNorms::default() };
    let mut absorb = |s: Sup, slot: &mut f64| {
        *slot = s.value;
        out.probe_count += s.probes;
        out.exact &= s.exact;
    };
    let (mut m, mut n, mut ps, mut qs) = (0.0, 0.0, 0.0, 0.0);
    if let Some(f) = f {
        absorb(sup_delta(f, ts, a, b)?, &mut m);
        absorb(sup_delta_sigma(f, ts, a, b)?, &mut n);
    }
    if let Some(p) = p {
        absorb(sup_delta(p, ts, a, b)?, &mut ps);
    }
    if let Some(q) = q {
        absorb(sup_delta(q, ts, a, b)?, &mut qs);
    }
    out.m = m;
    out.n = n;
    out.p = ps;
    out.q = qs;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem_id: TheoremId,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub slack: f64,
    pub pass: bool,
    pub components: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// `10·abs_tol + 1e-12·(1 + |rhs|)`
pub fn slack(rhs: f64, cfg: &QuadratureConfig) -> f64 {
    10.0 * cfg.abs_tol + 1e-12 * (1.0 + rhs.abs())
}

struct Builder {
    id: TheoremId,
    components: BTreeMap<String, f64>,
    notes: Vec<String>,
}

impl Builder {
    fn new(id: TheoremId) -> Self {
        Builder { id, components: BTreeMap::new(), notes: Vec::new() }
    }

    fn put(&mut self, name: &str, v: f64) -> f64 {
        self.components.insert(name.to_string(), v);
        v
    }

    fn sups(&mut self, s: &SupNorms, trapezoid: bool) {
        if trapezoid {
            self.put("M", s.m);
            self.put("N", s.n);
        } else {
            self.put("P", s.p);
            self.put("Q", s.q);
        }
        if !s.exact {
            self.notes.push("sup norms probed on a grid; RHS is a lower estimate".into());
        }
    }

    fn finish(self, lhs: f64, rhs: f64, cfg: &QuadratureConfig) -> Result<InequalityReport> {
        if !(lhs.is_finite() && rhs.is_finite()) {
            return Err(Error::Domain(format!("{}: non-finite side ({lhs}, {rhs})", self.id)));
        }
        let margin = rhs - lhs;
        let slack = slack(rhs, cfg);
        Ok(InequalityReport {
            theorem_id: self.id,
            lhs,
            rhs,
            margin,
            slack,
            pass: margin >= -slack,
            components: self.components,
            notes: self.notes,
        })
    }
}

pub(crate) fn require_continuous(ts: &TimeScale, a: f64, b: f64) -> Result<()> {
    match ts.pieces(a, b).as_slice() {
        [p] if p.is_continuous() && p.lo == a && p.hi == b => Ok(()),
        _ => Err(Error::NotContinuousScale),
    }
}

/// Checks that `T` holds every integer `a, a+1, …, last` with unit gaps.
fn require_integers(ts: &TimeScale, a: f64, b: f64, last: f64) -> Result<()> {
    if a.fract() != 0.0 || b.fract() != 0.0 {
        return Err(Error::NotIntegerScale(format!("window [{a}, {b}] has non-integer ends")));
    }
    let mut k = a;
    while k <= last {
        if !ts.contains(k) {
            return Err(Error::NotIntegerScale(format!("{k} is missing from the scale")));
        }
        if k < last && ts.sigma(k)? != k + 1.0 {
            return Err(Error::NotIntegerScale(format!("the point after {k} is not {}", k + 1.0)));
        }
        k += 1.0;
    }
    Ok(())
}

fn note_clamp(b: &mut Builder, ts: &TimeScale, end: f64) {
    if ts.max() == end {
        b.notes.push(format!("σ({end}) clamped to {end} at the top of the scale"));
    }
}

/// Flags windows where some right-scattered `s` has `μ(σ(s)) ≠ μ(s)`. There
/// `f^Δ(σ(s))` is not the delta derivative of `f∘σ`, and the trapezoid bound
/// can fail.
fn note_uneven_steps(b: &mut Builder, ts: &TimeScale, a: f64, end: f64) -> Result<()> {
    for s in ts.scattered_points(a, end) {
        let mu = ts.graininess(s)?;
        let next = ts.graininess(ts.sigma(s)?)?;
        if (mu - next).abs() > 1e-12 * (1.0 + mu) {
            b.notes.push(format!("uneven steps: μ({s}) = {mu} but μ(σ({s})) = {next}"));
            break;
        }
    }
    Ok(())
}

/// Trapezoid left-hand side assembled from its three printed terms.
struct TrapezoidLhs {
    centre: f64,
    sigma_mean: f64,
    boundary: f64,
}

impl TrapezoidLhs {
    fn value(&self) -> f64 {
        (self.centre - self.sigma_mean + self.boundary).abs()
    }

    fn record(&self, b: &mut Builder) {
        b.put("lhs_centre_term", self.centre);
        b.put("lhs_sigma_term", self.sigma_mean);
        b.put("lhs_boundary_term", self.boundary);
    }
}

/// `∫_a^b ν(s)(f(σ(s)) + f(σ²(s))) Δs`
fn sigma_pair_integral(
    f: &DifferentiableFn,
    kp: &KernelParams,
    ts: &TimeScale,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    calculus::delta_integral(ts, kp.a, kp.b, cfg, &[], |s| {
        let nu = calculus::delta_derivative(&kp.weight.w, ts, s)?;
        let s1 = ts.sigma(s)?;
        Ok(nu * (f.eval(s1)? + f.eval(ts.sigma(s1)?)?))
    })
}

fn trapezoid_lhs(
    f: &DifferentiableFn,
    kp: &KernelParams,
    ts: &TimeScale,
    cfg: &QuadratureConfig,
    b: &mut Builder,
) -> Result<TrapezoidLhs> {
    let (fa, fb) = (f.eval(kp.a)?, f.eval(kp.b)?);
    let fsa = f.eval(ts.sigma(kp.a)?)?;
    let fsb = f.eval(ts.sigma(kp.b)?)?;
    let nu_int = b.put("nu_integral", kp.nu_integral());
    let pair = b.put("sigma_pair_integral", sigma_pair_integral(f, kp, ts, cfg)?);
    note_clamp(b, ts, kp.b);
    note_uneven_steps(b, ts, kp.a, kp.b)?;
    Ok(TrapezoidLhs {
        centre: kp.centre_coefficient() * (fb * fb - fa * fa),
        sigma_mean: (fb - fa) / nu_int * pair,
        boundary: kp.boundary_mix(fa + fsa, fb + fsb) * (fb - fa),
    })
}

/// The general weighted trapezoid inequality on any time scale.
pub fn trapezoid_verify(
    f: &DifferentiableFn,
    kp: &KernelParams,
    ts: &TimeScale,
    cfg: &QuadratureConfig,
) -> Result<InequalityReport> {
    let mut b = Builder::new(TheoremId::Trapezoid);
    let lhs = trapezoid_lhs(f, kp, ts, cfg, &mut b)?;
    lhs.record(&mut b);
    let s = sup_norms(Some(f), None, None, ts, kp.a, kp.b)?;
    b.sups(&s, true);
    let double = b.put("abs_kernel_double_integral", kernel::abs_kernel_double_integral(kp, ts, cfg)?);
    let rhs = s.m * (s.n + s.m) / kp.nu_integral() * double;
    b.finish(lhs.value(), rhs, cfg)
}

/// The trapezoid inequality on a single continuous segment, where `σ` is the
/// identity and the two `σ`-integrals coincide.
pub fn trapezoid_corollary_real(
    f: &DifferentiableFn,
    kp: &KernelParams,
    ts: &TimeScale,
    cfg: &QuadratureConfig,
) -> Result<InequalityReport> {
    require_continuous(ts, kp.a, kp.b)?;
    let mut b = Builder::new(TheoremId::TrapezoidReal);
    let (fa, fb) = (f.eval(kp.a)?, f.eval(kp.b)?);
    let nu_int = b.put("nu_integral", kp.nu_integral());
    let weighted = b.put(
        "weighted_integral",
        calculus::delta_integral(ts, kp.a, kp.b, cfg, &[], |s| Ok(kp.weight.w.derivative(s)? * f.eval(s)?))?,
    );
    let lhs = TrapezoidLhs {
        centre: kp.centre_coefficient() / 2.0 * (fb * fb - fa * fa),
        sigma_mean: (fb - fa) / nu_int * weighted,
        boundary: kp.boundary_mix(fa, fb) * (fb - fa),
    };
    lhs.record(&mut b);
    let s = sup_norms(Some(f), None, None, ts, kp.a, kp.b)?;
    b.put("M", s.m);
    if !s.exact {
        b.notes.push("sup norms probed on a grid; RHS is a lower estimate".into());
    }
    let double = b.put("abs_kernel_double_integral", kernel::abs_kernel_double_integral(kp, ts, cfg)?);
    b.finish(lhs.value(), s.m * s.m / nu_int * double, cfg)
}

/// `∫_lo^hi [h₂(a, m₁) + h₂(t, m₁) + h₂(t, m₂) + h₂(b, m₂)] Δt`
fn h2_sum_integral(
    kp: &KernelParams,
    ts: &TimeScale,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (m1, m2) = kernel::shift_points(kp, ts)?;
    let fixed = hk(ts, kp.a, m1, 2, cfg)? + hk(ts, kp.b, m2, 2, cfg)?;
    calculus::delta_integral(ts, lo, hi, cfg, &[m1, m2], |t| {
        Ok(fixed + hk(ts, t, m1, 2, cfg)? + hk(ts, t, m2, 2, cfg)?)
    })
}

/// Right-hand side pieces shared by the `w = t` trapezoid forms.
fn h2_rhs(kp: &KernelParams, ts: &TimeScale, cfg: &QuadratureConfig, b: &mut Builder) -> Result<f64> {
    if !kp.weight.w.is_identity() {
        return Err(Error::WeightNotIdentity);
    }
    let (m1, m2) = kernel::shift_points(kp, ts)?;
    b.put("shift_lo", m1);
    b.put("shift_hi", m2);
    let h2 = b.put("h2_integral", h2_sum_integral(kp, ts, kp.a, kp.b, cfg)?);
    b.put("abs_kernel_double_integral", kernel::abs_kernel_double_integral(kp, ts, cfg)?);
    b.put("h2_integral_between_shifts", h2_sum_integral(kp, ts, m1, m2, cfg)?);
    b.put(
        "abs_kernel_double_integral_between_shifts",
        kernel::abs_kernel_double_integral_on(kp, ts, m1, m2, cfg)?,
    );
    if m1 > kp.a || m2 < kp.b {
        b.notes.push(format!(
            "h₂ sum equals the |K| line integral only for t in [{m1}, {m2}]; elsewhere it is larger"
        ));
    }
    Ok(h2)
}

/// The trapezoid inequality for `w(t) = t`, with the `|K|` integral written
/// through `h₂`. Needs both shift points in `T`.
pub fn trapezoid_corollary_wt(
    f: &DifferentiableFn,
    kp: &KernelParams,
    ts: &TimeScale,
    cfg: &QuadratureConfig,
) -> Result<InequalityReport> {
    let mut b = Builder::new(TheoremId::TrapezoidH2);
    let h2 = h2_rhs(kp, ts, cfg, &mut b)?;
    let lhs = trapezoid_lhs(f, kp, ts, cfg, &mut b)?;
    lhs.record(&mut b);
    let s = sup_norms(Some(f), None, None, ts, kp.a, kp.b)?;
    b.sups(&s, true);
    let rhs = s.m * (s.n + s.m) / (kp.b - kp.a) * h2;
    b.finish(lhs.value(), rhs, cfg)
}

/// The `w = t` form with `ψ` fixed to the identity, so everything is written
/// in `λ` directly.
pub fn trapezoid_corollary_linear(
    f: &DifferentiableFn,
    lambda: f64,
    ts: &TimeScale,
    a: f64,
    b_end: f64,
    cfg: &QuadratureConfig,
) -> Result<InequalityReport> {
    let kp = KernelParams::new(ts, a, b_end, lambda, ParamFunction::Identity, WeightPair::identity())?;
    let (a, bb) = (kp.a, kp.b);
    let mut b = Builder::new(TheoremId::TrapezoidLinear);
    let h2 = h2_rhs(&kp, ts, cfg, &mut b)?;
    let (fa, fb) = (f.eval(a)?, f.eval(bb)?);
    let fsa = f.eval(ts.sigma(a)?)?;
    let fsb = f.eval(ts.sigma(bb)?)?;
    let pair = b.put("sigma_pair_integral", sigma_pair_integral(f, &kp, ts, cfg)?);
    note_clamp(&mut b, ts, bb);
    note_uneven_steps(&mut b, ts, a, bb)?;
    let lhs = TrapezoidLhs {
        centre: (1.0 - lambda) * (fb * fb - fa * fa),
        sigma_mean: (fb - fa) / (bb - a) * pair,
        boundary: lambda * (fa + fb + fsa + fsb) / 2.0 * (fb - fa),
    };
    lhs.record(&mut b);
    let s = sup_norms(Some(f), None, None, ts, a, bb)?;
    b.sups(&s, true);
    let rhs = s.m * (s.n + s.m) / (bb - a) * h2;
    b.finish(lhs.value(), rhs, cfg)
}

/// The trapezoid inequality on the integers, written as finite sums. The
/// scale must hold `a, …, b + 2` with unit steps since the sums reach
/// `f(b + 1)` and the second forward difference at `b - 1`.
pub fn trapezoid_corollary_integer(
    f: &DifferentiableFn,
    kp: &KernelParams,
    ts: &TimeScale,
    cfg: &QuadratureConfig,
) -> Result<InequalityReport> {
    let (a, bb) = (kp.a, kp.b);
    require_integers(ts, a, bb, bb + 2.0)?;
    let mut b = Builder::new(TheoremId::TrapezoidInteger);
    let w = &kp.weight.w;
    let steps: Vec<f64> = (0..(bb - a) as usize).map(|i| a + i as f64).collect();
    let mut nu_sum = 0.0;
    let mut pair = 0.0;
    let (mut m, mut n) = (0.0f64, 0.0f64);
    for &s in &steps {
        let nu = w.eval(s + 1.0)? - w.eval(s)?;
        nu_sum += nu;
        pair += nu * (f.eval(s + 1.0)? + f.eval(s + 2.0)?);
        m = m.max((f.eval(s + 1.0)? - f.eval(s)?).abs());
        n = n.max((f.eval(s + 2.0)? - f.eval(s + 1.0)?).abs());
    }
    let mut double = 0.0;
    for &t in &steps {
        for &s in &steps {
            let shift = if s < t { kp.shift_lo } else { kp.shift_hi };
            double += (w.eval(s)? - shift).abs();
        }
    }
    b.put("nu_integral", nu_sum);
    b.put("sigma_pair_integral", pair);
    b.put("M", m);
    b.put("N", n);
    b.put("abs_kernel_double_integral", double);
    b.notes.push(format!("sup taken over t = {a}, …, {}", bb - 1.0));
    let (fa, fb) = (f.eval(a)?, f.eval(bb)?);
    let lhs = TrapezoidLhs {
        centre: kp.centre_coefficient() * (fb * fb - fa * fa),
        sigma_mean: (fb - fa) / nu_sum * pair,
        boundary: kp.boundary_mix(fa + f.eval(a + 1.0)?, fb + f.eval(bb + 1.0)?) * (fb - fa),
    };
    lhs.record(&mut b);
    b.finish(lhs.value(), m * (n + m) / nu_sum * double, cfg)
}

/// Sign changes of `p` and `q` on the continuous pieces of `[a, b]`, where
/// `P|q| + Q|p|` has kinks.
fn abs_kinks(fs: &[&DifferentiableFn], ts: &TimeScale, a: f64, b: f64) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for piece in ts.pieces(a, b).into_iter().filter(|p| p.is_continuous()) {
        for f in fs {
            match f.polynomial() {
                Some(c) => out.extend(poly::real_roots_in(&c, piece.lo, piece.hi)),
                None => out.extend(calculus::sign_change_roots(|x| f.eval(x), piece.lo, piece.hi, ROOT_SCAN)?),
            }
        }
    }
    Ok(out)
}

/// `∫_a^b (P|q(t)| + Q|p(t)|) (∫_a^b |K(s,t)| Δs) Δt`
fn gruss_rhs(
    p: &DifferentiableFn,
    q: &DifferentiableFn,
    s: &SupNorms,
    kp: &KernelParams,
    ts: &TimeScale,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let kinks = abs_kinks(&[p, q], ts, kp.a, kp.b)?;
    let (plan, line) = kernel::line_integral_profile(kp, ts, cfg, &kinks)?;
    let weight = plan.values(|t| Ok(s.p * q.eval(t)?.abs() + s.q * p.eval(t)?.abs()))?;
    let prod: Vec<f64> = weight.iter().zip(&line).map(|(g, l)| g * l).collect();
    Ok(plan.integrate_values(&prod))
}

/// Integrals shared by the Grüss left-hand sides.
struct GrussParts {
    nu_int: f64,
    pq: f64,
    p: f64,
    q: f64,
    /// `∫ ν(s) p(σ(s)) Δs` (or its σ-free form)
    p_shift: f64,
    q_shift: f64,
}

impl GrussParts {
    fn record(&self, b: &mut Builder) {
        b.put("nu_integral", self.nu_int);
        b.put("pq_integral", self.pq);
        b.put("p_integral", self.p);
        b.put("q_integral", self.q);
        b.put("nu_p_sigma_integral", self.p_shift);
        b.put("nu_q_sigma_integral", self.q_shift);
    }

    /// The five-term display. Written so that swapping `p` and `q` yields
    /// bit-identical results.
    fn lhs(&self, kp: &KernelParams, pa: f64, pb: f64, qa: f64, qb: f64) -> f64 {
        let two_c = 1.0 + kp.psi_complement - kp.psi_lambda;
        let bp = kp.boundary_mix(pa, pb);
        let bq = kp.boundary_mix(qa, qb);
        let boundary = bp * self.nu_int * self.q + bq * self.nu_int * self.p;
        let cross = self.q * self.p_shift + self.p * self.q_shift;
        (two_c * self.nu_int * self.pq + boundary - cross).abs()
    }
}

fn gruss_parts(
    p: &DifferentiableFn,
    q: &DifferentiableFn,
    kp: &KernelParams,
    ts: &TimeScale,
    cfg: &QuadratureConfig,
    through_sigma: bool,
) -> Result<GrussParts> {
    let int = |g: &dyn Fn(f64) -> Result<f64>| calculus::delta_integral(ts, kp.a, kp.b, cfg, &[], g);
    let shifted = |g: &DifferentiableFn| {
        int(&|s| {
            let nu = calculus::delta_derivative(&kp.weight.w, ts, s)?;
            let x = if through_sigma { ts.sigma(s)? } else { s };
            Ok(nu * g.eval(x)?)
        })
    };
    Ok(GrussParts {
        nu_int: kp.nu_integral(),
        pq: int(&|t| Ok(p.eval(t)? * q.eval(t)?))?,
        p: int(&|t| p.eval(t))?,
        q: int(&|t| q.eval(t))?,
        p_shift: shifted(p)?,
        q_shift: shifted(q)?,
    })
}

fn gruss_general(
    id: TheoremId,
    p: &DifferentiableFn,
    q: &DifferentiableFn,
    kp: &KernelParams,
    ts: &TimeScale,
    cfg: &QuadratureConfig,
    through_sigma: bool,
) -> Result<InequalityReport> {
    let mut b = Builder::new(id);
    let parts = gruss_parts(p, q, kp, ts, cfg, through_sigma)?;
    parts.record(&mut b);
    let lhs = parts.lhs(kp, p.eval(kp.a)?, p.eval(kp.b)?, q.eval(kp.a)?, q.eval(kp.b)?);
    let s = sup_norms(None, Some(p), Some(q), ts, kp.a, kp.b)?;
    b.sups(&s, false);
    let rhs = gruss_rhs(p, q, &s, kp, ts, cfg)?;
    b.finish(lhs, rhs, cfg)
}

/// The general weighted Grüss inequality on any time scale.
pub fn gruss_verify(
    p: &DifferentiableFn,
    q: &DifferentiableFn,
    kp: &KernelParams,
    ts: &TimeScale,
    cfg: &QuadratureConfig,
) -> Result<InequalityReport> {
    gruss_general(TheoremId::Gruss, p, q, kp, ts, cfg, true)
}

/// The Grüss inequality on a single continuous segment (`σ = id`).
pub fn gruss_corollary_real(
    p: &DifferentiableFn,
    q: &DifferentiableFn,
    kp: &KernelParams,
    ts: &TimeScale,
    cfg: &QuadratureConfig,
) -> Result<InequalityReport> {
    require_continuous(ts, kp.a, kp.b)?;
    gruss_general(TheoremId::GrussReal, p, q, kp, ts, cfg, false)
}

/// The Grüss inequality on the integers as finite sums; needs `a, …, b` in
/// `T` with unit steps.
pub fn gruss_corollary_integer(
    p: &DifferentiableFn,
    q: &DifferentiableFn,
    kp: &KernelParams,
    ts: &TimeScale,
    cfg: &QuadratureConfig,
) -> Result<InequalityReport> {
    let (a, bb) = (kp.a, kp.b);
    require_integers(ts, a, bb, bb)?;
    let mut b = Builder::new(TheoremId::GrussInteger);
    let w = &kp.weight.w;
    let steps: Vec<f64> = (0..(bb - a) as usize).map(|i| a + i as f64).collect();
    let mut parts = GrussParts { nu_int: 0.0, pq: 0.0, p: 0.0, q: 0.0, p_shift: 0.0, q_shift: 0.0 };
    let (mut ps, mut qs) = (0.0f64, 0.0f64);
    for &t in &steps {
        let nu = w.eval(t + 1.0)? - w.eval(t)?;
        let (pt, qt) = (p.eval(t)?, q.eval(t)?);
        let (pn, qn) = (p.eval(t + 1.0)?, q.eval(t + 1.0)?);
        parts.nu_int += nu;
        parts.pq += pt * qt;
        parts.p += pt;
        parts.q += qt;
        parts.p_shift += nu * pn;
        parts.q_shift += nu * qn;
        ps = ps.max((pn - pt).abs());
        qs = qs.max((qn - qt).abs());
    }
    parts.record(&mut b);
    b.put("P", ps);
    b.put("Q", qs);
    b.notes.push(format!("sup taken over t = {a}, …, {}", bb - 1.0));
    let mut rhs = 0.0;
    for &t in &steps {
        let mut line = 0.0;
        for &s in &steps {
            let shift = if s < t { kp.shift_lo } else { kp.shift_hi };
            line += (w.eval(s)? - shift).abs();
        }
        rhs += (ps * q.eval(t)?.abs() + qs * p.eval(t)?.abs()) * line;
    }
    let lhs = parts.lhs(kp, p.eval(a)?, p.eval(bb)?, q.eval(a)?, q.eval(bb)?);
    b.finish(lhs, rhs, cfg)
}

/// `t² - t(a+b) + (a² + b²)/2`, the line integral of `|K|` at `λ = 0` for
/// `w = t` on a continuous segment.
pub fn classic_weight(t: f64, a: f64, b: f64) -> f64 {
    t * t - t * (a + b) + (a * a + b * b) / 2.0
}

/// `¼(b-a)² + (t - (a+b)/2)²`
pub fn classic_e(t: f64, a: f64, b: f64) -> f64 {
    0.25 * (b - a) * (b - a) + (t - (a + b) / 2.0).powi(2)
}

/// The Grüss inequality for `ψ = id`, `w = t` on a continuous segment, with
/// the right-hand factor in closed polynomial form.
pub fn gruss_corollary_classic(
    p: &DifferentiableFn,
    q: &DifferentiableFn,
    lambda: f64,
    ts: &TimeScale,
    a: f64,
    b_end: f64,
    cfg: &QuadratureConfig,
) -> Result<InequalityReport> {
    let (a, bb) = (ts.snap(a)?, ts.snap(b_end)?);
    require_continuous(ts, a, bb)?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::OutOfRange(lambda));
    }
    let mut b = Builder::new(TheoremId::GrussClassicWeight);
    let int = |g: &dyn Fn(f64) -> Result<f64>, cuts: &[f64]| calculus::delta_integral(ts, a, bb, cfg, cuts, g);
    let ipq = b.put("pq_integral", int(&|t| Ok(p.eval(t)? * q.eval(t)?), &[])?);
    let ip = b.put("p_integral", int(&|t| p.eval(t), &[])?);
    let iq = b.put("q_integral", int(&|t| q.eval(t), &[])?);
    let len = bb - a;
    let boundary = lambda * len * (p.eval(a)? + p.eval(bb)?) / 2.0 * iq
        + lambda * len * (q.eval(a)? + q.eval(bb)?) / 2.0 * ip;
    let lhs = (2.0 * (1.0 - lambda) * len * ipq + boundary - 2.0 * (iq * ip)).abs();
    let s = sup_norms(None, Some(p), Some(q), ts, a, bb)?;
    b.sups(&s, false);
    let kinks = abs_kinks(&[p, q], ts, a, bb)?;
    let rhs = int(
        &|t| Ok((s.p * q.eval(t)?.abs() + s.q * p.eval(t)?.abs()) * classic_weight(t, a, bb)),
        &kinks,
    )?;
    let gap = (0..=64)
        .map(|i| a + len * i as f64 / 64.0)
        .map(|t| (classic_weight(t, a, bb) - classic_e(t, a, bb)).abs())
        .fold(0.0, f64::max);
    b.put("weight_polynomial_gap", gap);
    b.finish(lhs, rhs, cfg)
}

/// `|½(f²(b) - f²(a)) - (f(b) - f(a))/(b-a) ∫f| ≤ ⅓(b-a)²‖f'‖²`
pub fn pachpatte_trapezoid(
    f: &DifferentiableFn,
    ts: &TimeScale,
    a: f64,
    b_end: f64,
    cfg: &QuadratureConfig,
) -> Result<InequalityReport> {
    let (a, bb) = (ts.snap(a)?, ts.snap(b_end)?);
    require_continuous(ts, a, bb)?;
    let mut b = Builder::new(TheoremId::ClassicTrapezoid);
    let (fa, fb) = (f.eval(a)?, f.eval(bb)?);
    let int = b.put("f_integral", calculus::delta_integral(ts, a, bb, cfg, &[], |x| f.eval(x))?);
    let lhs = (0.5 * (fb * fb - fa * fa) - (fb - fa) / (bb - a) * int).abs();
    let s = sup_norms(Some(f), None, None, ts, a, bb)?;
    b.put("M", s.m);
    if !s.exact {
        b.notes.push("sup norms probed on a grid; RHS is a lower estimate".into());
    }
    b.finish(lhs, (bb - a).powi(2) * s.m * s.m / 3.0, cfg)
}

/// The classical Grüss-type bound with weight `E(x)`.
pub fn pachpatte_gruss(
    f: &DifferentiableFn,
    g: &DifferentiableFn,
    ts: &TimeScale,
    a: f64,
    b_end: f64,
    cfg: &QuadratureConfig,
) -> Result<InequalityReport> {
    let (a, bb) = (ts.snap(a)?, ts.snap(b_end)?);
    require_continuous(ts, a, bb)?;
    let mut b = Builder::new(TheoremId::ClassicGruss);
    let len = bb - a;
    let int = |h: &dyn Fn(f64) -> Result<f64>, cuts: &[f64]| calculus::delta_integral(ts, a, bb, cfg, cuts, h);
    let ifg = b.put("pq_integral", int(&|x| Ok(f.eval(x)? * g.eval(x)?), &[])?);
    let i_f = b.put("p_integral", int(&|x| f.eval(x), &[])?);
    let i_g = b.put("q_integral", int(&|x| g.eval(x), &[])?);
    let lhs = (ifg / len - (i_f / len) * (i_g / len)).abs();
    let s = sup_norms(None, Some(f), Some(g), ts, a, bb)?;
    b.sups(&s, false);
    let kinks = abs_kinks(&[f, g], ts, a, bb)?;
    let weighted = int(
        &|x| Ok((s.p * g.eval(x)?.abs() + s.q * f.eval(x)?.abs()) * classic_e(x, a, bb)),
        &kinks,
    )?;
    b.finish(lhs, weighted / (2.0 * len * len), cfg)
}
