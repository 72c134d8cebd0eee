use gaitlab::cycles::{simple_cycle_from_step, CycleSpec};
use gaitlab::harness::fmt_sig;
use gaitlab::lambert::lambert_w0;
use gaitlab::momentum::{from_pq, propagate_continuous, step_to_step, to_pq, PendulumState};
use gaitlab::stabilizers::{admissible_q_window, cop_gain_window, cop_step, stabilizer2_step_length};
use gaitlab::{PqState, WalkerParams};
use proptest::prelude::*;

fn cycle(w: &WalkerParams) -> CycleSpec {
    simple_cycle_from_step(0.5, 0.4, w).unwrap()
}

proptest! {
    #[test]
    fn pq_round_trip(s in -1.0..1.0f64, sdot in -3.0..3.0f64) {
        let w = WalkerParams::default();
        let back = from_pq(to_pq(PendulumState::new(s, sdot), &w), &w);
        prop_assert!((back.s - s).abs() < 1e-12 && (back.sdot - sdot).abs() < 1e-12);
    }

    #[test]
    fn flow_conserves_product(p in -1.0..1.0f64, q in -1.0..1.0f64, t in 0.0..1.0f64) {
        let w = WalkerParams::default();
        let pq = PqState::new(p, q);
        let end = propagate_continuous(pq, t, &w).unwrap();
        prop_assert!((end.product() - pq.product()).abs() < 1e-12 * (1.0 + end.q.abs()));
    }

    #[test]
    fn step_map_closed_form(p in -1.0..1.0f64, q in -1.0..1.0f64, l in -0.75..0.75f64, t in 0.05..1.0f64) {
        let w = WalkerParams::default();
        let next = step_to_step(PqState::new(p, q), l, t, &w).unwrap();
        let g = (w.omega() * t).exp();
        prop_assert!((next.p - (p / g - l)).abs() < 1e-12);
        prop_assert!((next.q - (q * g - l)).abs() < 1e-12 * (1.0 + g));
    }

    #[test]
    fn cycle_is_fixed_point(l in 0.05..0.75f64, t in 0.1..0.8f64) {
        let w = WalkerParams::default();
        let c = simple_cycle_from_step(l, t, &w).unwrap();
        let next = step_to_step(c.pq(), c.l_c, c.t_c, &w).unwrap();
        prop_assert!((next.p - c.p_c).abs() < 1e-12 && (next.q - c.q_c).abs() < 1e-12);
    }

    #[test]
    fn lambert_identity(x in -0.36787944117144233..100.0f64) {
        let y = lambert_w0(x).unwrap();
        prop_assert!(y >= -1.0);
        prop_assert!((y * y.exp() - x).abs() <= 1e-12 * x.abs().max(1.0));
    }

    #[test]
    fn export_format_round_trips(x in -1e6..1e6f64) {
        let back: f64 = fmt_sig(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-9 * x.abs() + 1e-300);
    }

    #[test]
    fn unsaturated_cop_contracts_at_nominal_rate(frac in -0.95..0.95f64, gain_frac in 0.05..0.95f64) {
        let w = WalkerParams::default();
        let c = cycle(&w);
        let q0 = c.q_c + frac * if frac > 0.0 { w.dz_max() } else { -w.dz_min() };
        let win = cop_gain_window(q0, &c, &w);
        let k = 1.0 + gain_frac * (win.hi.min(6.0) - 1.0);
        let s = cop_step(PqState::new(c.p_c, q0), &c, k, &w).unwrap();
        prop_assert_eq!(s.saturated_time, 0.0);
        let nominal = (-w.omega() * (k - 1.0) * c.t_c).exp();
        prop_assert!((s.alpha - nominal).abs() < 1e-9, "{} vs {}", s.alpha, nominal);
    }

    #[test]
    fn step_length_is_deadbeat_inside_window(frac in -0.99..0.99f64) {
        let w = WalkerParams::default();
        let c = cycle(&w);
        let (_, hi) = admissible_q_window(2, &c, &w).unwrap();
        // the deadbeat gain keeps |L| ≤ L_max while the error is small
        let q0 = c.q_c + frac * (w.l_max() - c.l_c) / c.growth(&w);
        prop_assume!(q0.abs() < hi);
        let plan = stabilizer2_step_length(q0, &c, &w).unwrap();
        let next = step_to_step(PqState::new(c.p_c, q0), plan.l, plan.t, &w).unwrap();
        prop_assert!((next.q - c.q_c).abs() < 1e-12);
        prop_assert!(plan.alpha.abs() < 1e-12);
    }
}
