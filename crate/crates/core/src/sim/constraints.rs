//! Foot-placement and swing-speed constraints.

use serde::{Deserialize, Serialize};

use crate::momentum::PqState;
use crate::params::WalkerParams;

/// Slack applied before flagging a violation, to ignore rounding.
const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    StepLength,
    D1,
    D2,
    Vswing,
}

impl ConstraintKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::StepLength => "L",
            Self::D1 => "D1",
            Self::D2 => "D2",
            Self::Vswing => "Vswing",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    /// CoM ahead of the stance foot at landing [m].
    pub d1: f64,
    /// Next foot ahead of the CoM at landing [m].
    pub d2: f64,
    /// Mean swing-foot speed relative to the CoM [m/s].
    pub v_swing: f64,
    /// Largest `|Fx/Fy|` over the step.
    pub mu_required: f64,
    pub violated: Vec<ConstraintKind>,
}

fn violations(l: f64, d1: f64, d2: f64, v: f64, params: &WalkerParams) -> Vec<ConstraintKind> {
    let half = 0.5 * params.l_max();
    let mut out = Vec::new();
    if l.abs() > params.l_max() + TOL {
        out.push(ConstraintKind::StepLength);
    }
    if d1.abs() > half + TOL {
        out.push(ConstraintKind::D1);
    }
    if d2.abs() > half + TOL {
        out.push(ConstraintKind::D2);
    }
    if !(v.abs() <= params.v_max() + TOL) {
        out.push(ConstraintKind::Vswing);
    }
    out
}

/// Planning estimate from the simplified model for a step `(l, t)` from
/// `pq0` after a previous step `prev_l`.
pub fn planned_constraints(pq0: PqState, l: f64, t: f64, prev_l: f64, params: &WalkerParams) -> ConstraintReport {
    let w = params.omega();
    let d1 = 0.5 * (pq0.p * (-w * t).exp() + pq0.q * (w * t).exp());
    let s0 = 0.5 * (pq0.p + pq0.q);
    let d2 = l - d1;
    let v = (prev_l + l - (d1 - s0)) / (t - params.t_0());
    ConstraintReport {
        d1,
        d2,
        v_swing: v,
        mu_required: 0.0,
        violated: violations(l, d1, d2, v, params),
    }
}

/// Endpoints of one realised step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepKinematics {
    pub x_start: f64,
    pub x_end: f64,
    pub z_stance: f64,
    /// Where the swing foot lifted off.
    pub z_swing_start: f64,
    pub l: f64,
    pub t: f64,
    pub mu_max: f64,
}

/// Constraint values along the realised trajectory.
pub fn constraint_metrics(k: &StepKinematics, params: &WalkerParams) -> ConstraintReport {
    let d1 = k.x_end - k.z_stance;
    let d2 = k.z_stance + k.l - k.x_end;
    let swing = k.z_stance + k.l - k.z_swing_start;
    let v = (swing - (k.x_end - k.x_start)) / (k.t - params.t_0());
    ConstraintReport {
        d1,
        d2,
        v_swing: v,
        mu_required: k.mu_max,
        violated: violations(k.l, d1, d2, v, params),
    }
}
