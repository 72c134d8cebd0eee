//! Impulse tolerance of every controller, plus a small grid sweep driven by
//! scenario text.

use gaitlab::harness::{expand_grid, scale_grid, sweep, tolerance_scan, Scenario};

fn main() -> gaitlab::Result<()> {
    let grid = scale_grid(0.1, 1.6);
    for name in ["steplen", "cop", "optimal", "steptime", "combined"] {
        let (max, points) = tolerance_scan(&Scenario::benchmark(name, false, 0.0)?, &grid)?;
        let marks: String = points.iter().map(|p| if p.tolerated { '+' } else if p.fell { 'x' } else { '!' }).collect();
        println!("{name:<9} {marks}  tolerates up to {max}");
    }

    let text = "controller = cop\nsweep.cop.gain = [2, 5, 8]\nsweep.impulse.scale = [0.6, 1.0]\n";
    let cases = expand_grid(text, "inline grid")?;
    for (case, res) in cases.iter().zip(sweep(&cases)) {
        let s = res?;
        println!("{:<30} fell={} converged={}", case.label, s.fell(), s.converged);
    }
    Ok(())
}
