//! Complete-model push recovery: one controller, one scaled standard
//! impulse, exported as CSV/JSON.
//!
//! ```text
//! cargo run --release --example push_recovery -- cop 0.9 /tmp/run
//! ```

use gaitlab::harness::{export_trace, run_scenario, Scenario};

fn main() -> gaitlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let controller = args.next().unwrap_or_else(|| "optimal".into());
    let scale: f64 = args.next().map_or(1.2, |s| s.parse().expect("scale must be a number"));
    let out = args.next();

    let sc = Scenario::benchmark(&controller, false, scale)?;
    let (trace, summary) = run_scenario(&sc)?;
    for s in &trace.steps {
        println!(
            "step {:2}: L={:.3} T={:.3} p0={:+.3} q0={:+.3} D1={:.3} D2={:.3} Vswing={:.2} {:?}",
            s.i, s.l, s.t, s.p0, s.q0, s.realized.d1, s.realized.d2, s.realized.v_swing, s.realized.violated
        );
    }
    println!(
        "{controller} x{scale}: fell={} converged={} post-impulse steps={:?} violations={}",
        summary.fell(),
        summary.converged,
        summary.post_impulse_steps,
        summary.violations.len()
    );
    if let Some(dir) = out {
        export_trace(&trace, &summary, &dir)?;
        println!("exported to {dir}");
    }
    Ok(())
}
