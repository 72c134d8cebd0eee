//! Without feedback the convergent component settles while the divergent
//! offset grows by e^{ωT_c} every step.

use gaitlab::cycles::{open_loop_rollout, simple_cycle_from_step};
use gaitlab::{PqState, WalkerParams};

fn main() -> gaitlab::Result<()> {
    let params = WalkerParams::default();
    let c = simple_cycle_from_step(0.5, 0.4, &params)?;
    let start = PqState::new(c.p_c - 0.2, c.q_c + 1e-3);
    let states = open_loop_rollout(start, &c, 6, &params)?;
    let mut prev = None;
    for (k, s) in states.iter().enumerate() {
        let dq = s.q - c.q_c;
        let ratio = prev.map_or(String::new(), |d: f64| format!("  ratio {:.4}", dq / d));
        println!("step {}: p-p_c={:+.2e} q-q_c={:+.3e}{ratio}", k + 1, s.p - c.p_c, dq);
        prev = Some(dq);
    }
    println!("e^(w T_c) = {:.4}", c.growth(&params));
    Ok(())
}
