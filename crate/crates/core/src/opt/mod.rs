//! Optimal step planning by penalty-method Newton descent.

mod direct;
mod newton;
mod objective;
mod planner;

pub use direct::{direct_target_solve, guided_target_sequence, GuidedSequence, StepVars};
pub use newton::{
    backtracking_search, minimize, newton_step_modified, quadratic, steepest_descent_step, wolfe_check,
    IterationLog, Method, MinimizeReport, NewtonDirection, SmoothObjective, WolfeReport,
};
pub use objective::{
    assemble_objective, cycle_goals, goal_value_grad_hess, penalty_value_grad_hess, walker_penalties, GoalKind,
    GoalSpec, Jet, Objective, PenaltyKind, PenaltySpec,
};
pub use planner::{plan_optimal_step, plan_with_mode, OptimalController, OptimalPlan, Scheduler};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Penalty weight `C`.
    pub penalty_weight: f64,
    pub lambda_min: f64,
    pub rho: f64,
    pub c1: f64,
    pub c2: f64,
    pub max_newton_iters: usize,
    pub backtrack_cap: usize,
    pub grad_tol: f64,
    /// Longest search direction in `(T, L)` space once an eigenvalue is floored.
    pub max_step: f64,
    /// Near-cycle thresholds on `|q0 − q_c|` and `|p0 − p_c|`.
    pub eps_q: f64,
    pub eps_p: f64,
    /// Consecutive planning calls before the schedule switches.
    pub debounce: u32,
    /// `(r1, r2, r3)` near the cycle; far away only `r1` is kept.
    pub weights_near: [f64; 3],
    /// Weight kept on the time and length goals away from the cycle. With
    /// both at zero the objective is flat along `q_{+1} = q_c` and the
    /// floored Newton step slides along that curve.
    pub far_tie_break: f64,
    /// Goal margins for next-`q`, `T` and `L`.
    pub dg_max: [f64; 3],
    /// Penalty margin as a fraction of each extreme value.
    pub dh_fraction: f64,
    /// Enables the minimum step-length penalty.
    pub l_min: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            penalty_weight: 1000.0,
            lambda_min: 1e-8,
            rho: 0.9,
            c1: 1e-4,
            c2: 0.9,
            max_newton_iters: 100,
            backtrack_cap: 200,
            grad_tol: 1e-8,
            max_step: 0.25,
            eps_q: 0.05,
            eps_p: 0.1,
            debounce: 2,
            weights_near: [1.0, 0.2, 0.2],
            far_tie_break: 1e-3,
            dg_max: [0.05, 0.1, 0.1],
            dh_fraction: 0.05,
            l_min: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &'static str, reason: &str| Err(Error::param(field, reason));
        if !(0.0 < self.c1 && self.c1 < self.c2 && self.c2 < 1.0) {
            return bad("c1/c2", "need 0 < c1 < c2 < 1");
        }
        if !(0.0 < self.rho && self.rho < 1.0) {
            return bad("rho", "need 0 < rho < 1");
        }
        if !(self.max_step > 0.0) {
            return bad("max_step", "must be > 0");
        }
        if !(self.lambda_min > 0.0) {
            return bad("lambda_min", "must be > 0");
        }
        if !(self.penalty_weight > 0.0) {
            return bad("penalty_weight", "must be > 0");
        }
        if self.dg_max.iter().any(|d| !(*d > 0.0)) || !(self.dh_fraction > 0.0) {
            return bad("margins", "must be > 0");
        }
        if self.weights_near.iter().any(|r| !(*r >= 0.0)) {
            return bad("weights_near", "must be ≥ 0");
        }
        if !(self.far_tie_break >= 0.0) {
            return bad("far_tie_break", "must be ≥ 0");
        }
        if self.max_newton_iters == 0 || self.backtrack_cap == 0 {
            return bad("iterations", "caps must be ≥ 1");
        }
        if matches!(self.l_min, Some(l) if !(l > 0.0)) {
            return bad("l_min", "must be > 0");
        }
        Ok(())
    }
}
