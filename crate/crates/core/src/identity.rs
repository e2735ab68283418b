//! Both sides of the weighted Montgomery identity
//!
//! ```text
//! [c·f(t) + (ψ(λ)f(a) + (1-ψ(1-λ))f(b))/2] ∫ν = ∫ K(s,t) f^Δ(s) Δs + ∫ ν(s) f(σ(s)) Δs
//! ```
//!
//! with `c = (1 + ψ(1-λ) - ψ(λ))/2`, all integrals over `[a, b]`.

use serde::{Deserialize, Serialize};

use crate::calculus::{self, QuadratureConfig};
use crate::error::Result;
use crate::funcdsl::DifferentiableFn;
use crate::kernel::KernelParams;
use crate::timescale::TimeScale;

/// Dense probes per continuous piece.
pub const DENSE_PROBES: usize = 16;
/// Relative tolerance on purely discrete windows, where both sides are
/// finite sums.
pub const DISCRETE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub t: f64,
    pub lhs: f64,
    pub rhs_kernel_part: f64,
    pub rhs_sigma_part: f64,
    pub residual: f64,
}

impl IdentityResidual {
    fn new(t: f64, lhs: f64, rhs_kernel_part: f64, rhs_sigma_part: f64) -> Self {
        IdentityResidual {
            t,
            lhs,
            rhs_kernel_part,
            rhs_sigma_part,
            residual: lhs - (rhs_kernel_part + rhs_sigma_part),
        }
    }
}

/// Acceptance threshold for `|residual|`: exact up to rounding on discrete
/// windows, `10·abs_tol` once quadrature is involved.
pub fn residual_tolerance(discrete: bool, lhs: f64, cfg: &QuadratureConfig) -> f64 {
    if discrete {
        DISCRETE_REL_TOL * (1.0 + lhs.abs())
    } else {
        10.0 * cfg.abs_tol
    }
}

pub fn montgomery_lhs(f: &DifferentiableFn, kp: &KernelParams, ts: &TimeScale, t: f64) -> Result<f64> {
    let t = ts.snap(t)?;
    let mix = kp.centre_coefficient() * f.eval(t)? + kp.boundary_mix(f.eval(kp.a)?, f.eval(kp.b)?);
    Ok(mix * kp.nu_integral())
}

/// `∫_a^b ν(s) f(σ(s)) Δs`; does not depend on `t`.
pub fn sigma_part(
    f: &DifferentiableFn,
    kp: &KernelParams,
    ts: &TimeScale,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    calculus::delta_integral(ts, kp.a, kp.b, cfg, &[], |s| {
        let nu = calculus::delta_derivative(&kp.weight.w, ts, s)?;
        Ok(nu * f.eval(ts.sigma(s)?)?)
    })
}

/// `∫_a^b K(s, t) f^Δ(s) Δs`, split at `s = t` where `K` jumps.
pub fn kernel_part(
    f: &DifferentiableFn,
    kp: &KernelParams,
    ts: &TimeScale,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let t = ts.snap(t)?;
    calculus::delta_integral(ts, kp.a, kp.b, cfg, &[t], |s| {
        Ok(kp.value(s, t)? * calculus::delta_derivative(f, ts, s)?)
    })
}

/// `(kernel part, sigma part)` of the right-hand side.
pub fn montgomery_rhs(
    f: &DifferentiableFn,
    kp: &KernelParams,
    ts: &TimeScale,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    Ok((kernel_part(f, kp, ts, t, cfg)?, sigma_part(f, kp, ts, cfg)?))
}

pub fn montgomery_residual(
    f: &DifferentiableFn,
    kp: &KernelParams,
    ts: &TimeScale,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<IdentityResidual> {
    let (k, s) = montgomery_rhs(f, kp, ts, t, cfg)?;
    Ok(IdentityResidual::new(ts.snap(t)?, montgomery_lhs(f, kp, ts, t)?, k, s))
}

/// Probe points for a residual sweep: `a`, `b`, every scattered point of
/// `[a, b)` and [`DENSE_PROBES`] interior points per continuous piece.
pub fn probe_points(ts: &TimeScale, a: f64, b: f64) -> Vec<f64> {
    let mut probes = vec![a, b];
    probes.extend(ts.scattered_points(a, b));
    for piece in ts.pieces(a, b).into_iter().filter(|p| p.is_continuous()) {
        let h = (piece.hi - piece.lo) / DENSE_PROBES as f64;
        probes.extend((0..DENSE_PROBES).map(|i| piece.lo + h * (i as f64 + 0.5)));
    }
    probes.sort_by(f64::total_cmp);
    probes.dedup();
    probes
}

/// Residuals at every probe point, sharing the `t`-independent sigma part.
pub fn montgomery_sweep(
    f: &DifferentiableFn,
    kp: &KernelParams,
    ts: &TimeScale,
    cfg: &QuadratureConfig,
) -> Result<Vec<IdentityResidual>> {
    let sig = sigma_part(f, kp, ts, cfg)?;
    probe_points(ts, kp.a, kp.b)
        .into_iter()
        .map(|t| {
            let k = kernel_part(f, kp, ts, t, cfg)?;
            Ok(IdentityResidual::new(t, montgomery_lhs(f, kp, ts, t)?, k, sig))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcdsl::ParamFunction;
    use crate::kernel::WeightPair;

    fn f(s: &str) -> DifferentiableFn {
        DifferentiableFn::parse(s).unwrap()
    }

    fn kp(ts: &TimeScale, a: f64, b: f64, lambda: f64) -> KernelParams {
        KernelParams::new(ts, a, b, lambda, ParamFunction::Identity, WeightPair::identity()).unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn lhs_examples() {
        let r = TimeScale::interval(0.0, 2.0).unwrap();
        assert_eq!(montgomery_lhs(&f("t"), &kp(&r, 0.0, 2.0, 0.0), &r, 1.0).unwrap(), 2.0);
        assert_eq!(montgomery_lhs(&f("3"), &kp(&r, 0.0, 2.0, 0.0), &r, 0.4).unwrap(), 6.0);
        // λ = 1: centre weight 0, boundary weights ψ(1) on f(a) and 1 - ψ(0) on f(b)
        assert_eq!(montgomery_lhs(&f("t"), &kp(&r, 0.0, 2.0, 1.0), &r, 1.0).unwrap(), 2.0);
    }

    #[test]
    fn rhs_examples() {
        let r = TimeScale::interval(0.0, 2.0).unwrap();
        let (k, s) = montgomery_rhs(&f("t"), &kp(&r, 0.0, 2.0, 0.0), &r, 1.0, &cfg()).unwrap();
        assert!(k.abs() < 1e-15 && (s - 2.0).abs() < 1e-14);
        let z = TimeScale::integers(0, 2).unwrap();
        let (k, s) = montgomery_rhs(&f("t"), &kp(&z, 0.0, 2.0, 0.0), &z, 1.0, &cfg()).unwrap();
        assert_eq!((k, s), (-1.0, 3.0));
        let (k, _) = montgomery_rhs(&f("2.5"), &kp(&r, 0.0, 2.0, 0.3), &r, 0.7, &cfg()).unwrap();
        assert_eq!(k, 0.0);
    }

    #[test]
    fn residual_closed_form_on_reals() {
        // f = t², λ = 1/2, t = 1/2 on [0, 1]: ψ(1/2) = 1/2, shifts 1/4 and 3/4
        let r = TimeScale::interval(0.0, 1.0).unwrap();
        let k = kp(&r, 0.0, 1.0, 0.5);
        let res = montgomery_residual(&f("t^2"), &k, &r, 0.5, &cfg()).unwrap();
        // lhs = (½·¼ + (½·0 + ½·1)/2)·1
        assert!((res.lhs - 0.375).abs() < 1e-15);
        // ∫_0^½ (s-¼)2s ds + ∫_½^1 (s-¾)2s ds = 1/48 + 1/48
        assert!((res.rhs_kernel_part - 1.0 / 24.0).abs() < 1e-15);
        assert!((res.rhs_sigma_part - 1.0 / 3.0).abs() < 1e-15);
        assert!(res.residual.abs() <= 10.0 * cfg().abs_tol);
    }

    #[test]
    fn residual_on_mixed_scale_against_refined_run() {
        let m = TimeScale::from_pairs(&[[0.0, 1.0], [1.5, 1.5], [2.0, 2.0]]).unwrap();
        let w = WeightPair::new(f("exp(t/4)"));
        let k = KernelParams::new(&m, 0.0, 2.0, 0.3, ParamFunction::power(2.0).unwrap(), w).unwrap();
        let fine = cfg().with_panels(512);
        for t in probe_points(&m, 0.0, 2.0) {
            let coarse = montgomery_residual(&f("sin(t)"), &k, &m, t, &cfg()).unwrap();
            let refined = montgomery_residual(&f("sin(t)"), &k, &m, t, &fine).unwrap();
            assert!(coarse.residual.abs() <= 10.0 * cfg().abs_tol);
            assert!((coarse.rhs_kernel_part - refined.rhs_kernel_part).abs() <= 10.0 * cfg().abs_tol);
        }
    }

    #[test]
    fn constant_function_has_zero_residual() {
        let m = TimeScale::from_pairs(&[[0.0, 0.7], [1.1, 1.1], [1.6, 2.4]]).unwrap();
        let w = WeightPair::new(f("0.5*(t + t^3/10)"));
        let k = KernelParams::new(&m, 0.0, 2.4, 0.9, ParamFunction::constant(0.2).unwrap(), w).unwrap();
        for res in montgomery_sweep(&f("1.75"), &k, &m, &cfg()).unwrap() {
            assert_eq!(res.rhs_kernel_part, 0.0);
            assert!(res.residual.abs() <= 1e-14, "{res:?}");
        }
    }

    #[test]
    fn probes_cover_scattered_and_dense_points() {
        let m = TimeScale::from_pairs(&[[0.0, 1.0], [1.5, 1.5], [2.0, 2.0]]).unwrap();
        let p = probe_points(&m, 0.0, 2.0);
        assert!(p.contains(&1.0) && p.contains(&1.5) && p.contains(&0.0) && p.contains(&2.0));
        assert_eq!(p.len(), 4 + DENSE_PROBES);
    }
}
