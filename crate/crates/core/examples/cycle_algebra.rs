//! Simple, compound and idle motion cycles and their feasibility.

use gaitlab::cycles::{self, Direction};
use gaitlab::WalkerParams;

fn main() -> gaitlab::Result<()> {
    let params = WalkerParams::default();

    let c = cycles::simple_cycle_from_step(0.5, 0.4, &params)?;
    println!("simple cycle L=0.5 T=0.4: p_c={:.6} q_c={:.6} growth={:.5}", c.p_c, c.q_c, c.growth(&params));

    let fast = cycles::simple_cycle_from_speed(2.0, 0.6, &params)?;
    let report = cycles::cycle_feasible(&fast, &params);
    println!(
        "V=2.0 L=0.6: T_c={:.4} T_min={:.4} feasible={} {:?}",
        fast.t_c,
        report.t_min,
        report.feasible(),
        report.violations
    );

    for p_c in [-0.5, -0.7, -0.9] {
        let qb = cycles::lambert_q_boundary(p_c, Direction::Forward, &params);
        println!("forward cycles at p_c={p_c}: q_c must stay below {qb:?}");
    }

    let two = cycles::compound_two_step(0.4, 0.35, 0.6, 0.45, &params)?;
    for (k, s) in two.steps.iter().enumerate() {
        println!("compound step {}: p={:.5} q={:.5} L={} T={}", k + 1, s.p_c, s.q_c, s.l_c, s.t_c);
    }

    let idle = cycles::idle_cycle(0.2, 0.3, &params)?;
    println!("idle cycle net displacement {:.1e}", idle.net_displacement());
    Ok(())
}
