mod common;

use common::{discrete_case, mixed_case};
use proptest::prelude::*;
use tscale::timescale::Segment;
use tscale::TimeScale;

fn probes(ts: &TimeScale) -> Vec<f64> {
    let mut out = Vec::new();
    for s in ts.segments() {
        out.push(s.lo);
        out.push(s.hi);
        out.push(0.5 * (s.lo + s.hi));
        out.push(s.lo + 0.01 * (s.hi - s.lo));
    }
    out
}

fn raw_segments() -> impl Strategy<Value = Vec<Segment>> {
    prop::collection::vec((-500..500i32, 0..300i32), 1..8).prop_map(|v| {
        v.into_iter().map(|(lo, len)| Segment::new(lo as f64 / 100.0, (lo + len) as f64 / 100.0)).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn jumps_stay_in_scale_and_move_the_right_way(c in prop_oneof![mixed_case(), discrete_case()]) {
        let ts = c.ts();
        for t in probes(&ts) {
            let (s, r) = (ts.sigma(t).unwrap(), ts.rho(t).unwrap());
            prop_assert!(s >= t && r <= t);
            prop_assert!(ts.contains(s) && ts.contains(r));
        }
    }

    #[test]
    fn rho_undoes_sigma_between_scattered_points(c in prop_oneof![mixed_case(), discrete_case()]) {
        let ts = c.ts();
        for t in probes(&ts) {
            let s = ts.sigma(t).unwrap();
            if s > t && ts.classify(s).unwrap().left_scattered {
                prop_assert_eq!(ts.rho(s).unwrap(), ts.snap(t).unwrap());
            }
        }
    }

    #[test]
    fn normalize_is_idempotent(segs in raw_segments()) {
        let once = TimeScale::normalize(segs).unwrap();
        let twice = TimeScale::normalize(once.segments().to_vec()).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn restriction_is_a_subset(c in mixed_case(), pick in any::<prop::sample::Index>()) {
        let ts = c.ts();
        let segs = ts.segments();
        let a = segs[pick.index(segs.len() - 1)].lo;
        let b = ts.max();
        let sub = ts.restrict(a, b).unwrap();
        let n = 2000;
        for i in 0..=n {
            let t = ts.min() - 0.5 + (b - ts.min() + 1.0) * i as f64 / n as f64;
            if sub.contains(t) {
                prop_assert!(ts.contains(t) && t >= a - 1e-12, "{t}");
            }
        }
    }
}
