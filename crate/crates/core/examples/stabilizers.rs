//! The four motion-cycle stabilizers on the simplified model, started from
//! the edge of their admissible windows.

use gaitlab::cycles::simple_cycle_from_step;
use gaitlab::stabilizers::{admissible_q_window, swm_rollout, SplitPriority, SwmController};
use gaitlab::{PqState, WalkerParams};

fn main() -> gaitlab::Result<()> {
    let params = WalkerParams::default();
    let c = simple_cycle_from_step(0.5, 0.4, &params)?;
    let cases = [
        ("cop", 1, SwmController::Cop { gain: 2.0 }, 0.30),
        ("step length", 2, SwmController::StepLength, 0.29),
        ("step time", 3, SwmController::StepTime, 0.505),
        ("combined", 4, SwmController::Combined { priority: SplitPriority::LengthFirst }, 0.47),
    ];
    for (name, id, ctrl, q0) in cases {
        let (lo, hi) = admissible_q_window(id, &c, &params)?;
        let steps = swm_rollout(PqState::new(c.p_c, q0), ctrl, &c, 8, &params)?;
        let errs: Vec<String> = steps.iter().map(|s| format!("{:.1e}", (s.next.q - c.q_c).abs())).collect();
        println!("{name:<12} window ({lo:+.4}, {hi:+.4}) start q0={q0}: |q-q_c| {}", errs.join(" "));
    }
    Ok(())
}
