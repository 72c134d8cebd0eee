//! How far the complete model drifts from the simplified step map under the
//! four bobbing and angular-momentum profiles.

use gaitlab::cycles::simple_cycle_from_step;
use gaitlab::sim::cwm_deviation_rollout;
use gaitlab::WalkerParams;

fn main() -> gaitlab::Result<()> {
    let params = WalkerParams::default();
    let c = simple_cycle_from_step(0.5, 0.4, &params)?;
    for case in 1..=4 {
        let tr = cwm_deviation_rollout(case, &c, 3, &params)?;
        let devs: Vec<String> = tr.steps.iter().map(|s| format!("{:.4}", s.deviation)).collect();
        println!("case {case}: end-of-step deviation {}", devs.join(", "));
    }
    Ok(())
}
