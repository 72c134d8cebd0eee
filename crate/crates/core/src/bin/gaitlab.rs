use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gaitlab::cycles::{cycle_feasible, open_loop_rollout, simple_cycle_from_pq, simple_cycle_from_speed, simple_cycle_from_step, CycleSpec};
use gaitlab::harness::{self, fmt_sig, RunSummary, Scenario};
use gaitlab::sim::cwm_deviation_rollout;
use gaitlab::stabilizers::{swm_rollout, SplitPriority, SwmController};
use gaitlab::{PqState, Result, WalkerParams};

/// Momentum-space biped walking laboratory.
#[derive(Parser)]
#[command(name = "gaitlab", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Motion-cycle algebra.
    #[command(subcommand)]
    Cycle(CycleCmd),
    /// Step-to-step rollout on the simplified model.
    Rollout(RolloutArgs),
    /// Runs one scenario on the complete model.
    Run(RunArgs),
    /// Reproduces the push-recovery benchmark table.
    Benchmark(BenchArgs),
    /// Complete- versus simplified-model deviation for one bobbing case.
    Deviation(DeviationArgs),
    /// Runs every scenario spanned by a grid file in parallel.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CycleArgs {
    /// Step displacement L_c [m].
    #[arg(long = "L", allow_hyphen_values = true)]
    l: Option<f64>,
    /// Step period T_c [s].
    #[arg(long = "T")]
    t: Option<f64>,
    /// Mean speed V_c [m/s], used with --L instead of --T.
    #[arg(long = "V", allow_hyphen_values = true)]
    v: Option<f64>,
    /// Cycle initial state, instead of --L/--T.
    #[arg(long, allow_hyphen_values = true, requires = "q")]
    p: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "p")]
    q: Option<f64>,
    #[command(flatten)]
    walker: WalkerArgs,
}

#[derive(Args)]
struct WalkerArgs {
    #[arg(long, default_value_t = 1.0)]
    h: f64,
    #[arg(long, default_value_t = 9.8)]
    g: f64,
}

impl WalkerArgs {
    fn params(&self) -> Result<WalkerParams> {
        let mut spec = WalkerParams::default().spec();
        spec.h = self.h;
        spec.g = self.g;
        spec.build()
    }
}

#[derive(Subcommand)]
enum CycleCmd {
    /// Prints (p_c, q_c) and the open-loop growth of a simple cycle.
    Solve(CycleArgs),
    /// Checks a cycle against the step-length and step-time bounds.
    Feasible(CycleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SwmCtrl {
    Cop,
    Steplen,
    Steptime,
    Combined,
}

#[derive(Args)]
struct RolloutArgs {
    /// Repeat the cycle step without feedback.
    #[arg(long, conflicts_with = "controller")]
    openloop: bool,
    /// Stabilizer used when not open loop.
    #[arg(long, value_enum)]
    controller: Option<SwmCtrl>,
    #[arg(long, default_value_t = 5.0)]
    gain: f64,
    /// Start offset from the cycle, or an absolute start with --absolute.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    dp: f64,
    #[arg(long, default_value_t = 0.001, allow_hyphen_values = true)]
    dq: f64,
    #[arg(long)]
    absolute: bool,
    #[arg(long, default_value_t = 5)]
    steps: usize,
    #[arg(long = "L", default_value_t = 0.5, allow_hyphen_values = true)]
    l: f64,
    #[arg(long = "T", default_value_t = 0.4)]
    t: f64,
    #[command(flatten)]
    walker: WalkerArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum CtrlName {
    Openloop,
    Cop,
    Steplen,
    Steptime,
    Combined,
    Optimal,
}

impl CtrlName {
    fn as_str(self) -> &'static str {
        match self {
            Self::Openloop => "openloop",
            Self::Cop => "cop",
            Self::Steplen => "steplen",
            Self::Steptime => "steptime",
            Self::Combined => "combined",
            Self::Optimal => "optimal",
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (flat `key = value` text or JSON); defaults apply when
    /// omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Overrides the scenario's controller with default settings.
    #[arg(long, value_enum)]
    controller: Option<CtrlName>,
    /// Replaces the scenario's impulses with the scaled standard push.
    #[arg(long)]
    impulse_scale: Option<f64>,
    /// Directory for continuous.csv, steps.csv and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Run every row of the table.
    #[arg(long)]
    all: bool,
    /// Also scan impulse tolerance on a 0.1 grid up to this scale.
    #[arg(long)]
    scan: Option<f64>,
    /// Export each row into a subdirectory of this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DeviationArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    case: u8,
    #[arg(long, default_value_t = 3)]
    steps: usize,
    /// Writes the continuous (t, p, q) samples as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    grid: PathBuf,
    /// Writes the result table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cycle_from(a: &CycleArgs, params: &WalkerParams) -> Result<CycleSpec> {
    match (a.p, a.q, a.l, a.t, a.v) {
        (Some(p), Some(q), None, None, None) => simple_cycle_from_pq(p, q, params),
        (None, None, l, None, Some(v)) => simple_cycle_from_speed(v, l.unwrap_or(0.5), params),
        (None, None, l, t, None) => simple_cycle_from_step(l.unwrap_or(0.5), t.unwrap_or(0.4), params),
        _ => Err(gaitlab::Error::Scenario {
            field: "cycle".into(),
            reason: "give --p/--q, --L/--T or --L/--V".into(),
        }),
    }
}

fn print_cycle(c: &CycleSpec, params: &WalkerParams) {
    println!("p_c = {}", fmt_sig(c.p_c));
    println!("q_c = {}", fmt_sig(c.q_c));
    println!("L_c = {}  T_c = {}  V_c = {}", fmt_sig(c.l_c), fmt_sig(c.t_c), fmt_sig(c.v_c));
    println!("growth e^(w T_c) = {}", fmt_sig(c.growth(params)));
}

fn cmd_cycle(cmd: &CycleCmd) -> Result<u8> {
    match cmd {
        CycleCmd::Solve(a) => {
            let params = a.walker.params()?;
            print_cycle(&cycle_from(a, &params)?, &params);
            Ok(0)
        }
        CycleCmd::Feasible(a) => {
            let params = a.walker.params()?;
            let c = cycle_from(a, &params)?;
            let r = cycle_feasible(&c, &params);
            print_cycle(&c, &params);
            println!("|L_c| = {} (max {})", fmt_sig(r.step_length), fmt_sig(r.l_max));
            println!("T_min(L_c) = {}", fmt_sig(r.t_min));
            if let Some(qb) = r.q_boundary {
                println!("q boundary = {}", fmt_sig(qb));
            }
            if r.feasible() {
                println!("feasible");
                Ok(0)
            } else {
                println!("infeasible: {:?}", r.violations);
                Ok(3)
            }
        }
    }
}

fn cmd_rollout(a: &RolloutArgs) -> Result<u8> {
    let params = a.walker.params()?;
    let c = simple_cycle_from_step(a.l, a.t, &params)?;
    let start = if a.absolute { PqState::new(a.dp, a.dq) } else { PqState::new(c.p_c + a.dp, c.q_c + a.dq) };
    println!("k,p,q,dp,dq");
    let row = |k: usize, s: PqState| {
        println!("{k},{},{},{},{}", fmt_sig(s.p), fmt_sig(s.q), fmt_sig(s.p - c.p_c), fmt_sig(s.q - c.q_c));
    };
    row(1, start);
    let ctrl = match (a.openloop, a.controller) {
        (_, None) => None,
        (false, Some(SwmCtrl::Cop)) => Some(SwmController::Cop { gain: a.gain }),
        (false, Some(SwmCtrl::Steplen)) => Some(SwmController::StepLength),
        (false, Some(SwmCtrl::Steptime)) => Some(SwmController::StepTime),
        (false, Some(SwmCtrl::Combined)) => Some(SwmController::Combined { priority: SplitPriority::default() }),
        (true, Some(_)) => unreachable!("clap rejects --openloop with --controller"),
    };
    match ctrl {
        None => {
            for (k, s) in open_loop_rollout(start, &c, a.steps + 1, &params)?.into_iter().enumerate().skip(1) {
                row(k + 1, s);
            }
        }
        Some(ctrl) => {
            for (k, s) in swm_rollout(start, ctrl, &c, a.steps, &params)?.iter().enumerate() {
                row(k + 2, s.next);
            }
        }
    }
    Ok(0)
}

fn print_summary(label: &str, s: &RunSummary) {
    let opt = |v: Option<usize>| v.map_or("-".to_string(), |n| n.to_string());
    let kinds: Vec<String> = s.violations.iter().map(|v| format!("{}@{}", v.kind.name(), v.step)).collect();
    println!(
        "{label:<20} fell={:<5} converged={:<5} settled={:<5} steps_to_converge={:<3} post_impulse={:<3} violations={}{}",
        s.fell(),
        s.converged,
        s.settled,
        opt(s.steps_to_converge),
        opt(s.post_impulse_steps),
        s.violations.len(),
        if kinds.is_empty() { String::new() } else { format!(" [{}]", kinds.join(" ")) },
    );
}

fn cmd_run(a: &RunArgs) -> Result<u8> {
    let overrides: Vec<(&str, serde_json::Value)> =
        a.controller.iter().map(|c| ("controller", c.as_str().into())).collect();
    let mut sc = harness::load_scenario_with(a.scenario.as_deref(), &overrides)?;
    if let Some(scale) = a.impulse_scale {
        sc = sc.with_impulse_scale(scale);
    }
    let (trace, summary) = harness::run_scenario(&sc)?;
    print_summary(&summary.controller, &summary);
    if let Some(dir) = &a.out {
        for p in harness::export_trace(&trace, &summary, dir)? {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(summary.exit_code() as u8)
}

fn cmd_benchmark(a: &BenchArgs) -> Result<u8> {
    if !a.all && a.scan.is_none() {
        eprintln!("nothing to do: pass --all and/or --scan MAX");
        return Ok(1);
    }
    if a.all {
        for (case, trace, s) in harness::run_benchmark_table(&harness::BENCHMARK_CASES)? {
            print_summary(&case.label(), &s);
            if let Some(dir) = &a.out {
                let sub = case.label().replace(' ', "_");
                harness::export_trace(&trace, &s, dir.join(sub))?;
            }
        }
    }
    if let Some(max) = a.scan {
        let grid = harness::scale_grid(0.1, max);
        for name in ["steplen", "cop", "optimal", "steptime", "combined"] {
            let (tol, _) = harness::tolerance_scan(&Scenario::benchmark(name, false, 0.0)?, &grid)?;
            println!("{name:<9} tolerates up to {}", fmt_sig(tol));
        }
    }
    Ok(0)
}

fn cmd_deviation(a: &DeviationArgs) -> Result<u8> {
    let params = WalkerParams::default();
    let c = simple_cycle_from_step(0.5, 0.4, &params)?;
    let tr = cwm_deviation_rollout(a.case, &c, a.steps, &params)?;
    println!("step,p_cwm,q_cwm,p_swm,q_swm,deviation");
    for s in &tr.steps {
        println!(
            "{},{},{},{},{},{}",
            s.step,
            fmt_sig(s.end_cwm.p),
            fmt_sig(s.end_cwm.q),
            fmt_sig(s.end_swm.p),
            fmt_sig(s.end_swm.q),
            fmt_sig(s.deviation)
        );
    }
    if let Some(path) = &a.out {
        let mut body = String::from("t,p,q\n");
        for s in &tr.samples {
            body.push_str(&format!("{},{},{}\n", fmt_sig(s.t), fmt_sig(s.p), fmt_sig(s.q)));
        }
        std::fs::write(path, body)
            .map_err(|e| gaitlab::Error::Io { path: path.display().to_string(), message: e.to_string() })?;
    }
    Ok(0)
}

fn cmd_sweep(a: &SweepArgs) -> Result<u8> {
    let text = std::fs::read_to_string(&a.grid)
        .map_err(|e| gaitlab::Error::Io { path: a.grid.display().to_string(), message: e.to_string() })?;
    let cases = harness::expand_grid(&text, &a.grid.display().to_string())?;
    let results = harness::sweep(&cases);
    let mut table = String::from("case,controller,fell,converged,settled,steps_to_converge,post_impulse_steps,violations\n");
    for (case, r) in cases.iter().zip(results) {
        let s = r?;
        let opt = |v: Option<usize>| v.map_or(String::new(), |n| n.to_string());
        table.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            case.label,
            s.controller,
            s.fell(),
            s.converged,
            s.settled,
            opt(s.steps_to_converge),
            opt(s.post_impulse_steps),
            s.violations.len()
        ));
    }
    match &a.out {
        Some(path) => std::fs::write(path, table)
            .map_err(|e| gaitlab::Error::Io { path: path.display().to_string(), message: e.to_string() })?,
        None => print!("{table}"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match &cli.cmd {
        Cmd::Cycle(c) => cmd_cycle(c),
        Cmd::Rollout(a) => cmd_rollout(a),
        Cmd::Run(a) => cmd_run(a),
        Cmd::Benchmark(a) => cmd_benchmark(a),
        Cmd::Deviation(a) => cmd_deviation(a),
        Cmd::Sweep(a) => cmd_sweep(a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
