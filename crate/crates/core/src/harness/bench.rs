//! Benchmark orchestration: single runs, the reference table, impulse
//! tolerance scans and parameter sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::sim::{run_walk, SimTrace};

use super::scenario::{flat_entries, insert_dotted, parse_tree, Scenario};
use super::summary::{summarize, RunSummary};

/// Scale of the first impulse relative to the standard push, or 0.
fn impulse_scale(s: &Scenario) -> (f64, Option<usize>) {
    match s.setup.impulses.first() {
        Some(imp) => (imp.d_lx / 10.0, Some(imp.step_index)),
        None => (0.0, None),
    }
}

/// Runs a scenario as configured.
pub fn run_scenario(s: &Scenario) -> Result<(SimTrace, RunSummary)> {
    let trace = run_walk(&s.setup, &s.controller)?;
    let (scale, step) = impulse_scale(s);
    let p = s.params();
    let summary = summarize(&trace, scale, step, (p.l_max(), p.v_max()));
    Ok((trace, summary))
}

/// Runs the scenario with its impulses replaced by the standard push scaled
/// by `scale` (0 disables it).
pub fn run_benchmark(s: &Scenario, scale: f64) -> Result<RunSummary> {
    run_scenario(&s.with_impulse_scale(scale)).map(|(_, sum)| sum)
}

/// Whether a run counts as tolerating its impulse: the walker stays viable
/// (no fall) for the whole run. The optimal controller must also honour
/// every constraint.
pub fn tolerates(summary: &RunSummary) -> bool {
    !summary.fell() && (summary.controller != "optimal" || summary.violations.is_empty())
}

/// Scale grid `step, 2·step, …, max`.
pub fn scale_grid(step: f64, max: f64) -> Vec<f64> {
    let n = (max / step + 1e-9).floor() as usize;
    (1..=n).map(|k| (k as f64 * step * 1e9).round() / 1e9).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub scale: f64,
    pub tolerated: bool,
    pub fell: bool,
    pub violations: usize,
}

/// Runs every scale in parallel and reports the largest scale below which
/// every grid point is tolerated.
pub fn tolerance_scan(s: &Scenario, grid: &[f64]) -> Result<(f64, Vec<ScanPoint>)> {
    let points = grid
        .par_iter()
        .map(|&scale| {
            let sum = run_benchmark(s, scale)?;
            Ok(ScanPoint { scale, tolerated: tolerates(&sum), fell: sum.fell(), violations: sum.violations.len() })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = points.iter().take_while(|p| p.tolerated).last().map_or(0.0, |p| p.scale);
    Ok((max, points))
}

/// One row of the reference push-recovery table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkCase {
    pub controller: &'static str,
    pub backward: bool,
    pub scale: f64,
}

/// Each controller at the impulse it is expected to withstand, plus the
/// backward-start guidance runs.
pub const BENCHMARK_CASES: [BenchmarkCase; 8] = [
    BenchmarkCase { controller: "cop", backward: false, scale: 0.9 },
    BenchmarkCase { controller: "steplen", backward: false, scale: 0.5 },
    BenchmarkCase { controller: "steptime", backward: false, scale: 1.3 },
    BenchmarkCase { controller: "combined", backward: false, scale: 1.4 },
    BenchmarkCase { controller: "optimal", backward: false, scale: 1.2 },
    BenchmarkCase { controller: "steplen", backward: true, scale: 0.0 },
    BenchmarkCase { controller: "combined", backward: true, scale: 0.0 },
    BenchmarkCase { controller: "optimal", backward: true, scale: 0.0 },
];

impl BenchmarkCase {
    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::benchmark(self.controller, self.backward, self.scale)
    }

    pub fn label(&self) -> String {
        if self.backward {
            format!("{} backward", self.controller)
        } else {
            format!("{} x{}", self.controller, self.scale)
        }
    }
}

/// Runs the whole table in parallel, preserving order.
pub fn run_benchmark_table(cases: &[BenchmarkCase]) -> Result<Vec<(BenchmarkCase, SimTrace, RunSummary)>> {
    cases
        .par_iter()
        .map(|case| {
            let (trace, sum) = run_scenario(&case.scenario()?)?;
            Ok((*case, trace, sum))
        })
        .collect()
}

/// A set of scenarios spanned by a grid file.
#[derive(Debug, Clone)]
pub struct SweepCase {
    /// `key=value` pairs that distinguish this case.
    pub label: String,
    pub scenario: Scenario,
}

/// Expands a grid file. Plain entries are shared overrides; entries under
/// `sweep.` hold arrays whose Cartesian product is swept, e.g.
/// `sweep.impulse.scale = [0.5, 1.0]`.
pub fn expand_grid(text: &str, origin: &str) -> Result<Vec<SweepCase>> {
    let (base, axes): (Vec<_>, Vec<_>) = if text.trim_start().starts_with('{') {
        let (tree, _) = parse_tree(text, origin)?;
        let mut flat = Vec::new();
        flatten("", &tree, &mut flat);
        flat.into_iter().map(|(k, v)| (k, v, 0)).partition(|(k, _, _)| !k.starts_with("sweep."))
    } else {
        flat_entries(text, origin)?.into_iter().partition(|(k, _, _)| !k.starts_with("sweep."))
    };
    let mut axes_vals = Vec::new();
    for (key, value, line) in axes {
        let Value::Array(vals) = value else {
            return Err(Error::Parse { path: origin.into(), line, message: format!("`{key}` must be an array") });
        };
        if vals.is_empty() {
            return Err(Error::Parse { path: origin.into(), line, message: format!("`{key}` is empty") });
        }
        axes_vals.push((key["sweep.".len()..].to_string(), vals));
    }

    let total: usize = axes_vals.iter().map(|(_, v)| v.len()).product();
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut tree = Value::Object(Default::default());
        for (key, value, line) in &base {
            insert_dotted(&mut tree, key, value.clone())
                .map_err(|message| Error::Parse { path: origin.into(), line: *line, message })?;
        }
        let mut rem = idx;
        let mut label = Vec::new();
        for (key, vals) in axes_vals.iter().rev() {
            let v = &vals[rem % vals.len()];
            rem /= vals.len();
            insert_dotted(&mut tree, key, v.clone())
                .map_err(|message| Error::Scenario { field: format!("sweep.{key}"), reason: message })?;
            label.push(format!("{key}={}", v.as_str().map_or_else(|| v.to_string(), str::to_string)));
        }
        label.reverse();
        out.push(SweepCase { label: label.join(" "), scenario: Scenario::from_value(tree)? });
    }
    Ok(out)
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(map) if prefix.is_empty() || !map.is_empty() => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

/// Runs every case on the worker pool; results keep the case order.
pub fn sweep(cases: &[SweepCase]) -> Vec<Result<RunSummary>> {
    cases.par_iter().map(|c| run_scenario(&c.scenario).map(|(_, s)| s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_exact_decimals() {
        let g = scale_grid(0.1, 1.4);
        assert_eq!(g.len(), 14);
        assert_eq!(g[2], 0.3);
        assert_eq!(g[13], 1.4);
    }

    #[test]
    fn grid_file_expands_product() {
        let text = "controller = cop\nsim.n_steps = 3\nsweep.impulse.scale = [0, 0.5]\nsweep.cop.gain = [3, 4, 5]\n";
        let cases = expand_grid(text, "grid").unwrap();
        assert_eq!(cases.len(), 6);
        assert_eq!(cases[0].label, "impulse.scale=0 cop.gain=3");
        assert_eq!(cases[5].label, "impulse.scale=0.5 cop.gain=5");
        assert!(cases.iter().all(|c| c.scenario.setup.n_steps == 3));
        let json = r#"{"controller": "cop", "sim": {"n_steps": 3}, "sweep": {"impulse": {"scale": [0, 0.5]}, "cop": {"gain": [3, 4, 5]}}}"#;
        let from_json = expand_grid(json, "grid").unwrap();
        assert_eq!(from_json.len(), 6);
        assert!(expand_grid("sweep.seed = 3", "grid").is_err());
    }
}
