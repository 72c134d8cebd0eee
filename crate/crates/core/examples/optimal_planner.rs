//! One optimal step from a far start, the Newton iteration log, and the
//! direct target solve that the optimizer generalises.

use gaitlab::cycles::simple_cycle_from_step;
use gaitlab::opt::{direct_target_solve, plan_optimal_step, OptimizerConfig};
use gaitlab::{PqState, WalkerParams};

fn main() -> gaitlab::Result<()> {
    let params = WalkerParams::default();
    let c = simple_cycle_from_step(0.5, 0.4, &params)?;
    let cfg = OptimizerConfig::default();

    let start = PqState::new(-0.67, 0.47);
    let plan = plan_optimal_step(start, 0.2, &c, &cfg, &params)?;
    println!("from {start:?}: T={:.4} L={:.4} -> {:?}", plan.plan.t, plan.plan.l, plan.predicted);
    for (k, it) in plan.log.iter().enumerate() {
        println!("  iter {k}: U={:.3e} |grad|={:.2e} slope={:.2e} alpha={:.3}", it.value, it.grad_norm, it.slope, it.alpha);
    }
    println!("violated constraints: {:?}", plan.violated);

    for s in direct_target_solve(c.pq(), c.pq(), &params) {
        println!("direct solve on the cycle: T={:.5} L={:.5}", s.t, s.l);
    }
    Ok(())
}
