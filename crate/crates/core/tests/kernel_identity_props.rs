mod common;

use common::{discrete_case, kernel_with_shifts, mixed_case, point_in, real_case, smooth_src, Case};
use proptest::prelude::*;
use tscale::identity::{montgomery_sweep, residual_tolerance};
use tscale::kernel::{self, KernelParams, WeightPair};
use tscale::{delta_integral, DifferentiableFn, ParamFunction, QuadratureConfig, TimeScale};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn psi_strategy() -> impl Strategy<Value = ParamFunction> {
    prop_oneof![
        Just(ParamFunction::Identity),
        (0.0..=1.0f64).prop_map(|c| ParamFunction::constant(c).unwrap()),
        (0.5..3.0f64).prop_map(|p| ParamFunction::power(p).unwrap()),
        (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(x, y)| ParamFunction::table(vec![(0.0, x), (1.0, y)]).unwrap()),
    ]
}

fn weight_strategy() -> impl Strategy<Value = String> {
    prop_oneof![Just("t".to_string()), (0.5..2.0f64).prop_map(|c| format!("{c}*(t + t^3/10)")), Just("exp(t/4)".into())]
}

fn kernel(c: &Case, lambda: f64, psi: ParamFunction, w: &str) -> KernelParams {
    let w = WeightPair::new(DifferentiableFn::parse(w).unwrap());
    KernelParams::new(&c.ts(), c.a, c.b, lambda, psi, w).unwrap()
}

fn window_points(ts: &TimeScale, a: f64, b: f64) -> Vec<f64> {
    tscale::identity::probe_points(ts, a, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn branches_are_affine_in_w(c in mixed_case(), lambda in 0.0..=1.0f64, psi in psi_strategy(), w in weight_strategy()) {
        let k = kernel(&c, lambda, psi, &w);
        let ts = c.ts();
        let wf = DifferentiableFn::parse(&w).unwrap();
        let gap = k.shift_hi - k.shift_lo;
        prop_assert!((gap - k.centre_coefficient() * k.nu_integral()).abs() < 1e-12 * (1.0 + gap.abs()));
        let pts = window_points(&ts, c.a, c.b);
        for &t in &pts {
            for &s in &pts {
                let v = kernel::kernel_eval(&k, &ts, s, t).unwrap();
                let shift = if s < t { k.shift_lo } else { k.shift_hi };
                prop_assert_eq!(v, wf.eval(s).unwrap() - shift);
            }
            // the jump across s = t is the shift gap
            let jump = k.value(t.next_down(), t).unwrap() - k.value(t, t).unwrap();
            prop_assert!((jump - gap).abs() < 1e-12 * (1.0 + gap.abs()), "{jump} vs {gap}");
        }
    }

    #[test]
    fn line_integral_is_positive(c in mixed_case(), lambda in 0.0..=1.0f64, psi in psi_strategy(), w in weight_strategy()) {
        let k = kernel(&c, lambda, psi, &w);
        let ts = c.ts();
        for t in window_points(&ts, c.a, c.b) {
            prop_assert!(kernel::abs_kernel_line_integral(&k, &ts, t, &cfg()).unwrap() > 0.0);
        }
    }

    #[test]
    fn signed_kernel_integral_closed_form(c in real_case(), lambda in 0.0..=1.0f64, psi in psi_strategy(), x in 0.0..=1.0f64) {
        let k = kernel(&c, lambda, psi, "t");
        let ts = c.ts();
        let t = c.a + x * (c.b - c.a);
        let got = delta_integral(&ts, c.a, c.b, &cfg(), &[t], |s| k.value(s, t)).unwrap();
        let want = (c.b * c.b - c.a * c.a) / 2.0 - k.shift_lo * (t - c.a) - k.shift_hi * (c.b - t);
        prop_assert!((got - want).abs() <= cfg().abs_tol, "{got} vs {want}");
    }

    #[test]
    fn h2_sum_matches_line_integral_between_shifts(
        c in prop_oneof![mixed_case(), discrete_case(), real_case()],
        x in 0.0..1.0f64,
        y in 0.0..1.0f64,
    ) {
        let ts = c.ts();
        let mid = 0.5 * (c.a + c.b);
        let m1 = point_in(&ts, c.a, mid, x);
        let m2 = point_in(&ts, mid, c.b, y);
        let k = kernel_with_shifts(&ts, c.a, c.b, m1, m2);
        let (s1, s2) = kernel::shift_points(&k, &ts).unwrap();
        for t in window_points(&ts, c.a, c.b).into_iter().filter(|&t| t >= s1 && t <= s2) {
            let h2 = kernel::h2_bound_terms(&k, &ts, t, &cfg()).unwrap();
            let line = kernel::abs_kernel_line_integral(&k, &ts, t, &cfg()).unwrap();
            prop_assert!((h2 - line).abs() <= 4.0 * cfg().abs_tol, "t={t}: {h2} vs {line}");
        }
    }

    #[test]
    fn identity_is_exact_on_points(c in discrete_case(), f in smooth_src(), lambda in 0.0..=1.0f64, psi in psi_strategy(), w in weight_strategy()) {
        let k = kernel(&c, lambda, psi, &w);
        let f = DifferentiableFn::parse(&f).unwrap();
        for r in montgomery_sweep(&f, &k, &c.ts(), &cfg()).unwrap() {
            prop_assert!(r.residual.abs() <= residual_tolerance(true, r.lhs, &cfg()), "{r:?}");
        }
    }

    #[test]
    fn constant_function_has_no_kernel_part(c in mixed_case(), v in -5.0..5.0f64, lambda in 0.0..=1.0f64, psi in psi_strategy(), w in weight_strategy()) {
        let k = kernel(&c, lambda, psi, &w);
        let f = DifferentiableFn::parse(&format!("{v}")).unwrap();
        for r in montgomery_sweep(&f, &k, &c.ts(), &cfg()).unwrap() {
            prop_assert_eq!(r.rhs_kernel_part, 0.0);
            prop_assert!(r.residual.abs() <= 1e-12 * (1.0 + r.lhs.abs()), "{r:?}");
        }
    }
}
