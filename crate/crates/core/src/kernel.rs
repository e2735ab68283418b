//! The weighted Peano kernel
//!
//! ```text
//! K(s, t) = w(s) - shift_lo   for s in [a, t)
//! K(s, t) = w(s) - shift_hi   for s in [t, b]
//! ```
//!
//! with `shift_lo = w(a) + ψ(λ)(w(b) - w(a))/2` and
//! `shift_hi = w(a) + (1 + ψ(1-λ))(w(b) - w(a))/2`, and the integrals of `|K|`.

use crate::calculus::{self, hk, PanelPolicy, QuadratureConfig, QuadraturePlan};
use crate::error::{Error, Result};
use crate::funcdsl::{DifferentiableFn, ParamFunction};
use crate::timescale::TimeScale;

pub const DEFAULT_POSITIVITY_FLOOR: f64 = 1e-12;
const NU_GRID: usize = 256;

/// A strictly increasing `w` together with the floor its delta derivative
/// `ν = w^Δ` must clear.
#[derive(Debug, Clone)]
pub struct WeightPair {
    pub w: DifferentiableFn,
    pub positivity_floor: f64,
}

impl WeightPair {
    pub fn new(w: DifferentiableFn) -> Self {
        WeightPair { w, positivity_floor: DEFAULT_POSITIVITY_FLOOR }
    }

    pub fn identity() -> Self {
        WeightPair::new(DifferentiableFn::identity())
    }
}

/// `ν(t) = w^Δ(t)`, rejected when below the positivity floor.
pub fn nu_eval(weight: &WeightPair, ts: &TimeScale, t: f64) -> Result<f64> {
    let v = calculus::delta_derivative(&weight.w, ts, t)?;
    if !(v >= weight.positivity_floor) {
        return Err(Error::NonPositiveWeight { t, value: v });
    }
    Ok(v)
}

/// Points where `ν` is checked: scattered points of `[a, b)` and a uniform
/// grid on every continuous piece.
fn nu_probes(ts: &TimeScale, a: f64, b: f64) -> Vec<f64> {
    let mut probes = ts.scattered_points(a, b);
    for piece in ts.pieces(a, b).into_iter().filter(|p| p.is_continuous()) {
        let h = (piece.hi - piece.lo) / (NU_GRID - 1) as f64;
        probes.extend((0..NU_GRID).map(|i| if i + 1 == NU_GRID { piece.hi } else { piece.lo + h * i as f64 }));
    }
    probes
}

#[derive(Debug, Clone)]
pub struct KernelParams {
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
    pub psi: ParamFunction,
    pub weight: WeightPair,
    /// `ψ(λ)`
    pub psi_lambda: f64,
    /// `ψ(1 - λ)`
    pub psi_complement: f64,
    pub w_a: f64,
    pub w_b: f64,
    pub shift_lo: f64,
    pub shift_hi: f64,
}

impl KernelParams {
    /// Validates the window and the weight on `ts`, then caches `w(a)`,
    /// `w(b)` and both shifts.
    pub fn new(
        ts: &TimeScale,
        a: f64,
        b: f64,
        lambda: f64,
        psi: ParamFunction,
        weight: WeightPair,
    ) -> Result<Self> {
        let a = ts.snap(a)?;
        let b = ts.snap(b)?;
        if !(a < b) {
            return Err(Error::EmptyRange { a, b });
        }
        let psi_lambda = psi.eval(lambda)?;
        let psi_complement = psi.eval(1.0 - lambda)?;
        for t in nu_probes(ts, a, b) {
            nu_eval(&weight, ts, t)?;
        }
        let w_a = weight.w.eval(a)?;
        let w_b = weight.w.eval(b)?;
        let half = (w_b - w_a) / 2.0;
        Ok(KernelParams {
            a,
            b,
            lambda,
            psi,
            weight,
            psi_lambda,
            psi_complement,
            w_a,
            w_b,
            shift_lo: w_a + psi_lambda * half,
            shift_hi: w_a + (1.0 + psi_complement) * half,
        })
    }

    /// `(1 + ψ(1-λ) - ψ(λ)) / 2`
    pub fn centre_coefficient(&self) -> f64 {
        (1.0 + self.psi_complement - self.psi_lambda) / 2.0
    }

    /// `∫_a^b ν Δt`, which equals `w(b) - w(a)` because `w^Δ = ν`.
    pub fn nu_integral(&self) -> f64 {
        self.w_b - self.w_a
    }

    /// `(ψ(λ) x_a + (1 - ψ(1-λ)) x_b) / 2`
    pub fn boundary_mix(&self, x_a: f64, x_b: f64) -> f64 {
        (self.psi_lambda * x_a + (1.0 - self.psi_complement) * x_b) / 2.0
    }

    /// Kernel value without membership checks.
    pub fn value(&self, s: f64, t: f64) -> Result<f64> {
        let shift = if s < t { self.shift_lo } else { self.shift_hi };
        Ok(self.weight.w.eval(s)? - shift)
    }

    /// Roots of `w - shift_lo` and `w - shift_hi` on the continuous pieces of
    /// `[a, b]`; the only places where `|K(·, t)|` has a kink besides `t`.
    pub fn shift_roots(&self, ts: &TimeScale) -> Result<Vec<f64>> {
        let mut roots = Vec::new();
        for piece in ts.pieces(self.a, self.b).into_iter().filter(|p| p.is_continuous()) {
            for c in [self.shift_lo, self.shift_hi] {
                // w is strictly increasing, one bracket per piece is enough
                let g = |x: f64| Ok(self.weight.w.eval(x)? - c);
                roots.extend(calculus::sign_change_roots(g, piece.lo, piece.hi, 1)?);
            }
        }
        roots.sort_by(f64::total_cmp);
        Ok(roots)
    }

    fn check_window(&self, ts: &TimeScale, x: f64) -> Result<f64> {
        let x = ts.snap(x)?;
        if x < self.a || x > self.b {
            return Err(Error::OutOfWindow(x));
        }
        Ok(x)
    }
}

pub fn kernel_eval(kp: &KernelParams, ts: &TimeScale, s: f64, t: f64) -> Result<f64> {
    let s = kp.check_window(ts, s)?;
    let t = kp.check_window(ts, t)?;
    kp.value(s, t)
}

/// `∫_a^b |K(s, t)| Δs` by direct quadrature.
pub fn abs_kernel_line_integral(
    kp: &KernelParams,
    ts: &TimeScale,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let t = kp.check_window(ts, t)?;
    let mut cuts = kp.shift_roots(ts)?;
    cuts.push(t);
    calculus::delta_integral(ts, kp.a, kp.b, cfg, &cuts, |s| Ok(kp.value(s, t)?.abs()))
}

/// Quadrature plan over `[a, b]` split at the shift roots and `extra` points,
/// and the line integral `L(t) = ∫_a^b |K(s, t)| Δs` at each of its nodes.
///
/// `L(t) = G_lo(t) + G_hi(b) - G_hi(t)` with `G_c(x) = ∫_a^x |w - c| Δs`, so
/// every node value comes out of two running integrals.
pub fn line_integral_profile(
    kp: &KernelParams,
    ts: &TimeScale,
    cfg: &QuadratureConfig,
    extra: &[f64],
) -> Result<(QuadraturePlan, Vec<f64>)> {
    let mut cuts = kp.shift_roots(ts)?;
    cuts.extend_from_slice(extra);
    let plan = QuadraturePlan::build(ts, kp.a, kp.b, PanelPolicy::from(cfg), &cuts)?;
    let w = &kp.weight.w;
    let g_lo = plan.running_integrals(|s| Ok((w.eval(s)? - kp.shift_lo).abs()))?;
    let g_hi = plan.running_integrals(|s| Ok((w.eval(s)? - kp.shift_hi).abs()))?;
    let total_hi = plan.integrate(|s| Ok((w.eval(s)? - kp.shift_hi).abs()))?;
    let line = g_lo.iter().zip(&g_hi).map(|(lo, hi)| lo + total_hi - hi).collect();
    Ok((plan, line))
}

/// `∫_a^b (∫_a^b |K(s, t)| Δs) Δt`
pub fn abs_kernel_double_integral(
    kp: &KernelParams,
    ts: &TimeScale,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (plan, line) = line_integral_profile(kp, ts, cfg, &[])?;
    Ok(plan.integrate_values(&line))
}

/// The double integral with the outer variable restricted to `[lo, hi]`,
/// a sub-window of `[a, b]` with endpoints in `T`.
pub fn abs_kernel_double_integral_on(
    kp: &KernelParams,
    ts: &TimeScale,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let lo = kp.check_window(ts, lo)?;
    let hi = kp.check_window(ts, hi)?;
    let (plan, line) = line_integral_profile(kp, ts, cfg, &[lo, hi])?;
    let mut total = 0.0;
    for (n, l) in plan.nodes().iter().zip(line) {
        if n.x >= lo && n.x < hi {
            total += n.weight * l;
        }
    }
    Ok(total)
}

/// The two shift points `a + ψ(λ)(b-a)/2` and `a + (1 + ψ(1-λ))(b-a)/2`,
/// which must lie in `T` for the `h₂` form of the line integral.
pub fn shift_points(kp: &KernelParams, ts: &TimeScale) -> Result<(f64, f64)> {
    let half = (kp.b - kp.a) / 2.0;
    let m1 = kp.a + kp.psi_lambda * half;
    let m2 = kp.a + (1.0 + kp.psi_complement) * half;
    let m1 = ts.snap(m1).map_err(|_| Error::ShiftNotInScale(m1))?;
    let m2 = ts.snap(m2).map_err(|_| Error::ShiftNotInScale(m2))?;
    Ok((m1, m2))
}

/// `h₂(a, m₁) + h₂(t, m₁) + h₂(t, m₂) + h₂(b, m₂)` for `w = t`. Equals
/// `∫_a^b |K(s, t)| Δs` when `t ∈ [m₁, m₂]`; exceeds it outside that range.
pub fn h2_bound_terms(
    kp: &KernelParams,
    ts: &TimeScale,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !kp.weight.w.is_identity() {
        return Err(Error::WeightNotIdentity);
    }
    let (m1, m2) = shift_points(kp, ts)?;
    let t = kp.check_window(ts, t)?;
    Ok(hk(ts, kp.a, m1, 2, cfg)?
        + hk(ts, t, m1, 2, cfg)?
        + hk(ts, t, m2, 2, cfg)?
        + hk(ts, kp.b, m2, 2, cfg)?)
}
