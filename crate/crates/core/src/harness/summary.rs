//! Convergence bookkeeping for a finished run.

use serde::{Deserialize, Serialize};

use crate::cycles::CycleSpec;
use crate::momentum::PqState;
use crate::sim::{ConstraintKind, Outcome, SimTrace, StepRecord};

/// Band half-width as a fraction of `|q_c − p_c|`.
pub const BAND_FRACTION: f64 = 0.05;
/// Consecutive in-band step-initial states that count as converged.
pub const BAND_HOLD: usize = 2;

/// One violated constraint at one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationEntry {
    pub step: usize,
    pub kind: ConstraintKind,
    /// Realized value of the violated quantity.
    pub value: f64,
    /// Its bound.
    pub limit: f64,
}

/// Result of one walk, as written to `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub controller: String,
    /// No fall and the last two step-initial states lie in the cycle band.
    pub converged: bool,
    /// Steps taken before the first pair of consecutive in-band states.
    pub steps_to_converge: Option<usize>,
    /// Steps from the disturbed step until the state is back in band.
    pub post_impulse_steps: Option<usize>,
    pub violations: Vec<ViolationEntry>,
    /// Largest relative excess `|value|/limit − 1` over all violations.
    pub max_excess: f64,
    pub impulse_scale: f64,
    pub impulse_step: Option<usize>,
    /// No fall and the last two step-initial states agree within the band,
    /// i.e. the walker reached a steady gait even if it is offset from the
    /// nominal cycle.
    pub settled: bool,
    pub band: f64,
    pub n_steps: usize,
    pub outcome: Outcome,
    pub final_pq: PqState,
    #[serde(skip)]
    pub steps: Vec<StepRecord>,
}

impl RunSummary {
    pub fn fell(&self) -> bool {
        matches!(self.outcome, Outcome::Fell { .. })
    }

    /// Survived the run in a steady gait.
    pub fn recovered(&self) -> bool {
        !self.fell() && self.settled
    }

    pub fn violated(&self, kind: ConstraintKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    /// Exit status for the CLI: 0 clean, 2 fall, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.fell() {
            2
        } else if self.converged && self.violations.is_empty() {
            0
        } else {
            3
        }
    }
}

pub fn band_half_width(c: &CycleSpec) -> f64 {
    BAND_FRACTION * (c.q_c - c.p_c).abs()
}

fn within(a: PqState, b: PqState, band: f64) -> bool {
    (a.p - b.p).abs() <= band && (a.q - b.q).abs() <= band
}

/// First index `k ≥ from` where `BAND_HOLD` consecutive states satisfy `ok`.
fn first_hold(ok: &[bool], from: usize) -> Option<usize> {
    (from..ok.len()).find(|&k| k + BAND_HOLD <= ok.len() && ok[k..k + BAND_HOLD].iter().all(|&b| b))
}

/// Builds the summary. `impulse_scale` is reported as given; the impulse
/// step is the first step with a scheduled impulse.
pub fn summarize(trace: &SimTrace, impulse_scale: f64, impulse_step: Option<usize>, limits: (f64, f64)) -> RunSummary {
    let c = &trace.cycle;
    let band = band_half_width(c);
    let fell = trace.fell();

    // Step-initial states: step i starts from states[i − 1]; a completed run
    // also has the state after its last landing.
    let mut states: Vec<PqState> = trace.steps.iter().map(|s| PqState::new(s.p0, s.q0)).collect();
    if !fell {
        states.push(trace.final_pq);
    }
    let in_band: Vec<bool> = states.iter().map(|&s| within(s, c.pq(), band)).collect();

    let steps_to_converge = first_hold(&in_band, 0);
    let post_impulse_steps = impulse_step.and_then(|s| first_hold(&in_band, s).map(|k| k + 1 - s));

    let tail = states.len().saturating_sub(BAND_HOLD);
    let converged = !fell && states.len() >= BAND_HOLD && in_band[tail..].iter().all(|&b| b);
    let settled = !fell && states.len() >= 2 && within(states[states.len() - 1], states[states.len() - 2], band);

    let (l_max, v_max) = limits;
    let mut violations = Vec::new();
    for s in &trace.steps {
        for &kind in &s.realized.violated {
            let (value, limit) = match kind {
                ConstraintKind::StepLength => (s.l, l_max),
                ConstraintKind::D1 => (s.realized.d1, 0.5 * l_max),
                ConstraintKind::D2 => (s.realized.d2, 0.5 * l_max),
                ConstraintKind::Vswing => (s.realized.v_swing, v_max),
            };
            violations.push(ViolationEntry { step: s.i, kind, value, limit });
        }
    }
    let max_excess = violations
        .iter()
        .map(|v| if v.value.is_finite() { v.value.abs() / v.limit - 1.0 } else { f64::INFINITY })
        .fold(0.0, f64::max);

    RunSummary {
        controller: trace.controller.clone(),
        converged,
        steps_to_converge,
        post_impulse_steps,
        violations,
        max_excess,
        impulse_scale,
        impulse_step,
        settled,
        band,
        n_steps: trace.steps.len(),
        outcome: trace.outcome,
        final_pq: trace.final_pq,
        steps: trace.steps.clone(),
    }
}
