use std::f64::consts::PI;

use acca_core::dynamics::WindingCheck;
use acca_core::lift::{detrend, initial_lift, variance_functional, Compensator};
use acca_core::observables::l1_lyapunov;
use acca_core::sweep::{
    closing_edge_prediction, cyclic_sweep, iterate_sweeps, linear_increment_update,
};
use acca_core::{
    ring_winding, Configuration, LinearIncrementState, RandomStream, SimState, Topology,
};
use proptest::collection::vec;
use proptest::prelude::*;

fn angles(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    n.prop_flat_map(|n| vec(-PI..PI, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closed_form_matches_sweep(deltas in (3usize..=20).prop_flat_map(|n| vec(-10.0f64..10.0, n))) {
        let st = LinearIncrementState::new(deltas.clone()).unwrap();
        let simulated = cyclic_sweep(&st).closing();
        let predicted = closing_edge_prediction(&deltas).unwrap();
        let scale = deltas.iter().fold(1.0f64, |m, d| m.max(d.abs()));
        prop_assert!((simulated - predicted).abs() <= 1e-12 * scale);
    }

    #[test]
    fn linear_rule_conserves_and_keeps_sign(
        deltas in (3usize..=30).prop_flat_map(|n| vec(0.0f64..5.0, n)),
        picks in vec(any::<prop::sample::Index>(), 1..200),
    ) {
        let mut st = LinearIncrementState::new(deltas).unwrap();
        let n = st.n();
        for p in picks {
            st = linear_increment_update(&st, p.index(n)).unwrap();
            prop_assert!(st.deltas().iter().all(|&d| d >= 0.0));
        }
        prop_assert!((st.current_sum() - st.total()).abs() <= 1e-12 * n as f64 * st.total().max(1.0));
    }

    #[test]
    fn nonnegative_data_accumulates(deltas in (3usize..=16).prop_flat_map(|n| vec(0.0f64..3.0, n))) {
        let st = LinearIncrementState::new(deltas).unwrap();
        let rows = iterate_sweeps(&st, 60);
        for w in rows.windows(2) {
            prop_assert!(w[1].closing_delta >= w[0].closing_delta - 1e-12);
        }
        for r in &rows {
            prop_assert!(r.gap <= r.geometric_bound + 1e-12 * st.total().max(1.0));
        }
    }

    #[test]
    fn steps_respect_winding_and_lyapunov(
        theta in angles(3..=40),
        ring in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let topo = if ring { Topology::ring(theta.len()) } else { Topology::path(theta.len()) }.unwrap();
        let cfg = Configuration::new(topo, theta).unwrap();
        let mut st = SimState::new(cfg, RandomStream::new(seed, 0))
            .unwrap()
            .with_winding_check(WindingCheck::EveryStep)
            .with_lyapunov_check(true);
        let mut l1 = l1_lyapunov(&st.config().increment_field());
        for _ in 0..300 {
            let ev = st.step().unwrap();
            let c = st.config();
            prop_assert_eq!(c.angle(ev.edge), c.angle(topo.head(ev.edge)));
            let next = l1_lyapunov(&c.increment_field());
            prop_assert!(next <= l1 + 1e-12);
            l1 = next;
            if ring {
                prop_assert_eq!(Some(ring_winding(c).unwrap()), ev.winding_after);
            }
        }
    }

    #[test]
    fn lift_and_frame_track_quiet_updates(
        n in 6usize..40,
        w in -2i64..=2,
        seed in any::<u64>(),
    ) {
        let topo = Topology::ring(n).unwrap();
        let mut stream = RandomStream::new(seed, 0);
        let beta = 2.0 * PI * w as f64 / n as f64;
        prop_assume!(beta.abs() < 0.6);
        let cfg = acca_core::init::perfect_twist(topo, w, 0.05, &mut stream).unwrap();
        let mut st = SimState::new(cfg, stream).unwrap();
        let mut lift = initial_lift(st.config()).unwrap();
        let mut comp = Compensator::new(n, w);
        let mut psi = variance_functional(&detrend(&lift, &comp).unwrap());
        for _ in 0..500 {
            let ev = st.step().unwrap();
            prop_assume!(!ev.is_crossing() && !ev.antipodal);
            lift.apply(&ev).unwrap();
            comp.step(ev.edge).unwrap();
            let err = lift.errors(st.config());
            prop_assert!(err.projection <= 1e-9 && err.increment <= 1e-10 && err.closing <= 1e-9);
            prop_assert!(comp.sum().abs() <= 1e-9 * n as f64);
            let next = variance_functional(&detrend(&lift, &comp).unwrap());
            prop_assert!(next <= psi + 1e-12);
            psi = next;
        }
    }
}
