mod common;

use common::{close, discrete_case, mixed_case, poly_src, real_case, smooth_src, Case};
use proptest::prelude::*;
use tscale::{delta_derivative, delta_integral, hk, DifferentiableFn, QuadratureConfig, TimeScale};

fn func(s: &str) -> DifferentiableFn {
    DifferentiableFn::parse(s).unwrap()
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn integral(c: &Case, lo: f64, hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    delta_integral(&c.ts(), lo, hi, &cfg(), &[], |t| Ok(g(t))).unwrap()
}

fn any_case() -> impl Strategy<Value = Case> {
    prop_oneof![mixed_case(), discrete_case(), real_case()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn linearity(c in any_case(), f in smooth_src(), g in smooth_src(), al in -3.0..3.0f64, be in -3.0..3.0f64) {
        let (f, g) = (func(&f), func(&g));
        let lhs = integral(&c, c.a, c.b, |t| al * f.eval(t).unwrap() + be * g.eval(t).unwrap());
        let rhs = al * integral(&c, c.a, c.b, |t| f.eval(t).unwrap()) + be * integral(&c, c.a, c.b, |t| g.eval(t).unwrap());
        prop_assert!(close(lhs, rhs, 2.0 * cfg().abs_tol), "{lhs} vs {rhs}");
    }

    #[test]
    fn reversal_and_empty_range(c in any_case(), f in smooth_src()) {
        let f = func(&f);
        let fwd = integral(&c, c.a, c.b, |t| f.eval(t).unwrap());
        let back = integral(&c, c.b, c.a, |t| f.eval(t).unwrap());
        prop_assert_eq!(fwd, -back);
        prop_assert_eq!(integral(&c, c.a, c.a, |t| f.eval(t).unwrap()), 0.0);
    }

    #[test]
    fn additivity(c in any_case(), f in smooth_src(), frac in 0.0..1.0f64) {
        let ts = c.ts();
        // nearest scale point to an interior target
        let target = c.a + frac * (c.b - c.a);
        let mid = ts.restrict(c.a, c.b).unwrap().segments().iter()
            .map(|s| target.clamp(s.lo, s.hi))
            .min_by(|x, y| (x - target).abs().total_cmp(&(y - target).abs()))
            .unwrap();
        let f = func(&f);
        let whole = integral(&c, c.a, c.b, |t| f.eval(t).unwrap());
        let split = integral(&c, c.a, mid, |t| f.eval(t).unwrap()) + integral(&c, mid, c.b, |t| f.eval(t).unwrap());
        prop_assert!(close(whole, split, 2.0 * cfg().abs_tol), "{whole} vs {split}");
    }

    #[test]
    fn triangle(c in any_case(), f in smooth_src()) {
        let f = func(&f);
        let plain = integral(&c, c.a, c.b, |t| f.eval(t).unwrap());
        // |f| has kinks at the roots of f; pass them as breakpoints
        let ts = c.ts();
        let mut kinks = Vec::new();
        for seg in ts.restrict(c.a, c.b).unwrap().segments() {
            kinks.extend(tscale::calculus::sign_change_roots(|t| f.eval(t), seg.lo, seg.hi, 256).unwrap());
        }
        let abs = delta_integral(&ts, c.a, c.b, &cfg(), &kinks, |t| Ok(f.eval(t)?.abs())).unwrap();
        prop_assert!(abs - plain.abs() >= -cfg().abs_tol, "{abs} < |{plain}|");
    }

    #[test]
    fn integration_by_parts(c in any_case(), f in poly_src(), g in poly_src()) {
        let ts = c.ts();
        let (f, g) = (func(&f), func(&g));
        let left = integral(&c, c.a, c.b, |t| f.eval(t).unwrap() * delta_derivative(&g, &ts, t).unwrap());
        let right = integral(&c, c.a, c.b, |t| delta_derivative(&f, &ts, t).unwrap() * g.eval(ts.sigma(t).unwrap()).unwrap());
        let boundary = f.eval(c.b).unwrap() * g.eval(c.b).unwrap() - f.eval(c.a).unwrap() * g.eval(c.a).unwrap();
        // absolute tolerance plus float rounding on large polynomial values
        let rounding = 1e-13 * (left.abs() + right.abs() + boundary.abs());
        prop_assert!(close(left, boundary - right, 5.0 * cfg().abs_tol + rounding), "{left} vs {}", boundary - right);
    }

    #[test]
    fn product_rule(c in any_case(), f in smooth_src(), g in smooth_src(), frac in 0.0..1.0f64) {
        let ts = c.ts();
        let (fs, gs) = (f, g);
        let (f, g) = (func(&fs), func(&gs));
        let fg = func(&format!("({fs})*({gs})"));
        let mut probes = ts.scattered_points(c.a, c.b);
        probes.push(c.a);
        if let Some(seg) = ts.restrict(c.a, c.b).unwrap().segments().iter().find(|s| s.hi > s.lo) {
            probes.push(seg.lo + frac * (seg.hi - seg.lo) * 0.999);
        }
        for t in probes {
            let t = ts.snap(t).unwrap();
            let s = ts.sigma(t).unwrap();
            let (fd, gd) = (delta_derivative(&f, &ts, t).unwrap(), delta_derivative(&g, &ts, t).unwrap());
            let whole = delta_derivative(&fg, &ts, t).unwrap();
            let first = fd * g.eval(t).unwrap() + f.eval(s).unwrap() * gd;
            let second = f.eval(t).unwrap() * gd + fd * g.eval(s).unwrap();
            let scattered = ts.graininess(t).unwrap() > 0.0;
            // scattered points: difference quotients, equal up to rounding
            let tol = if scattered { 1e-12 } else { 1e-9 } * (1.0 + whole.abs());
            prop_assert!(close(whole, first, tol) && close(whole, second, tol), "t={t}: {whole} {first} {second}");
        }
    }

    #[test]
    fn fundamental_theorem_on_points(c in discrete_case(), g in smooth_src()) {
        let ts = c.ts();
        let g = func(&g);
        let got = integral(&c, c.a, c.b, |t| delta_derivative(&g, &ts, t).unwrap());
        let want = g.eval(c.b).unwrap() - g.eval(c.a).unwrap();
        let scale = 1.0 + g.eval(c.b).unwrap().abs() + g.eval(c.a).unwrap().abs();
        prop_assert!(close(got, want, 1e-12 * scale), "{got} vs {want}");
    }

    #[test]
    fn hk_on_segments(lo in -3.0..3.0f64, len in 0.5..4.0f64, x in 0.0..1.0f64, y in 0.0..1.0f64, k in 0u32..=4) {
        let r = TimeScale::interval(lo, lo + len).unwrap();
        let (t, s) = (lo + x * len, lo + y * len);
        let fact = (1..=k).product::<u32>() as f64;
        let want = (t - s).powi(k as i32) / fact;
        prop_assert!(close(hk(&r, t, s, k, &cfg()).unwrap(), want, cfg().abs_tol));
    }

    #[test]
    fn hk_on_integers(lo in -5i64..5, n in 1i64..12, ti in 0i64..12, si in 0i64..12, k in 0u32..=4) {
        let z = TimeScale::integers(lo, lo + n).unwrap();
        let (t, s) = ((lo + ti.min(n)) as f64, (lo + si.min(n)) as f64);
        prop_assert_eq!(hk(&z, t, s, k, &cfg()).unwrap(), brute_hk(t as i64, s as i64, k));
    }
}

/// Nested sums straight from the recursion, with the sign convention for
/// `t < s`.
fn brute_hk(t: i64, s: i64, k: u32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if t >= s {
        (s..t).map(|tau| brute_hk(tau, s, k - 1)).sum()
    } else {
        -(t..s).map(|tau| brute_hk(tau, s, k - 1)).sum::<f64>()
    }
}
