use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::cycles::CycleSpec;
use crate::error::Result;
use crate::momentum::{step_to_step, PqState};
use crate::params::WalkerParams;
use crate::stabilizers::StepPlan;

use super::newton::{minimize, IterationLog, Method};
use super::objective::{assemble_objective, cycle_goals, walker_penalties, Objective, PenaltyKind};
use super::OptimizerConfig;

/// A planned step with optimizer diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalPlan {
    pub plan: StepPlan,
    pub predicted: PqState,
    pub near: bool,
    pub iterations: usize,
    pub converged: bool,
    pub restarted: bool,
    /// Some penalty is still positive (a constraint sits inside its margin).
    pub penalty_active: bool,
    /// Constraints violated by the returned plan itself.
    pub violated: Vec<PenaltyKind>,
    /// Both starts failed to converge; the best iterate is returned.
    pub flagged: bool,
    pub log: Vec<IterationLog>,
}

/// Near-cycle test for the goal weights.
pub fn near_cycle(pq0: PqState, c: &CycleSpec, cfg: &OptimizerConfig) -> bool {
    (pq0.q - c.q_c).abs() <= cfg.eps_q && (pq0.p - c.p_c).abs() <= cfg.eps_p
}

/// Plans with the instantaneous weight schedule.
pub fn plan_optimal_step(
    pq0: PqState,
    prev_l: f64,
    c: &CycleSpec,
    cfg: &OptimizerConfig,
    params: &WalkerParams,
) -> Result<OptimalPlan> {
    plan_with_mode(pq0, prev_l, c, near_cycle(pq0, c, cfg), cfg, params)
}

fn run(obj: &Objective, x0: Vector2<f64>, cfg: &OptimizerConfig) -> Option<super::MinimizeReport> {
    minimize(obj, x0, Method::Newton, cfg).ok()
}

/// Plans with explicit weights: `near` enables the length and time goals.
pub fn plan_with_mode(
    pq0: PqState,
    prev_l: f64,
    c: &CycleSpec,
    near: bool,
    cfg: &OptimizerConfig,
    params: &WalkerParams,
) -> Result<OptimalPlan> {
    cfg.validate()?;
    let obj = assemble_objective(
        pq0,
        prev_l,
        cycle_goals(c, near, cfg),
        walker_penalties(cfg, params),
        cfg,
        params,
    )?;
    let first = run(&obj, Vector2::new(c.t_c, c.l_c), cfg);
    let mut restarted = false;
    let report = match first {
        Some(r) if r.converged => r,
        first => {
            restarted = true;
            let sign = if pq0.q < 0.0 { -1.0 } else { 1.0 };
            let x1 = Vector2::new(params.t_min(params.l_max()) + 0.05, sign * c.l_c.abs());
            let second = run(&obj, x1, cfg);
            match (first, second) {
                (_, Some(r)) if r.converged => r,
                (Some(a), Some(b)) => {
                    if a.value <= b.value {
                        a
                    } else {
                        b
                    }
                }
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (None, None) => {
                    // nothing usable; fall back to the cycle step
                    let x = Vector2::new(c.t_c, c.l_c);
                    super::MinimizeReport {
                        x: [x[0], x[1]],
                        value: obj.value(&x).unwrap_or(f64::INFINITY),
                        grad_norm: f64::NAN,
                        iterations: 0,
                        converged: false,
                        log: Vec::new(),
                    }
                }
            }
        }
    };
    let x = Vector2::from(report.x);
    let predicted = step_to_step(pq0, x[1], x[0], params)?;
    let e0 = pq0.q - c.q_c;
    let alpha = if e0 == 0.0 { 0.0 } else { ((predicted.q - c.q_c) / e0).abs() };
    let penalty_active = obj.penalty_values(&x)?.iter().any(|&v| v > 0.0);
    Ok(OptimalPlan {
        plan: StepPlan {
            l: x[1],
            t: x[0],
            cop_gain: 0.0,
            k_l: 0.0,
            k_t: 0.0,
            alpha,
        },
        predicted,
        near,
        iterations: report.iterations,
        converged: report.converged,
        restarted,
        penalty_active,
        violated: obj.violated(&x)?,
        flagged: !report.converged,
        log: report.log,
    })
}

/// Debounced near/far schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Scheduler {
    near: bool,
    streak: u32,
}

impl Scheduler {
    pub fn near(&self) -> bool {
        self.near
    }

    /// Feeds one observation; the mode flips after `debounce` consecutive
    /// disagreeing observations.
    pub fn update(&mut self, pq0: PqState, c: &CycleSpec, cfg: &OptimizerConfig) -> bool {
        if near_cycle(pq0, c, cfg) == self.near {
            self.streak = 0;
        } else {
            self.streak += 1;
            if self.streak >= cfg.debounce.max(1) {
                self.near = !self.near;
                self.streak = 0;
            }
        }
        self.near
    }
}

/// Stateful optimal controller: scheduler plus the planner.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalController {
    pub cfg: OptimizerConfig,
    pub scheduler: Scheduler,
}

impl OptimalController {
    pub fn new(cfg: OptimizerConfig) -> Self {
        Self {
            cfg,
            scheduler: Scheduler::default(),
        }
    }

    pub fn plan(&mut self, pq0: PqState, prev_l: f64, c: &CycleSpec, params: &WalkerParams) -> Result<OptimalPlan> {
        let near = self.scheduler.update(pq0, c, &self.cfg);
        plan_with_mode(pq0, prev_l, c, near, &self.cfg, params)
    }

    /// Replans mid-step without advancing the schedule.
    pub fn replan(&self, pq0: PqState, prev_l: f64, c: &CycleSpec, params: &WalkerParams) -> Result<OptimalPlan> {
        plan_with_mode(pq0, prev_l, c, self.scheduler.near(), &self.cfg, params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::simple_cycle_from_step;
    use crate::opt::direct_target_solve;

    fn setup() -> (WalkerParams, CycleSpec, OptimizerConfig) {
        let w = WalkerParams::default();
        let c = simple_cycle_from_step(0.5, 0.4, &w).unwrap();
        (w, c, OptimizerConfig::default())
    }

    #[test]
    fn on_cycle_plan_is_cycle_step() {
        let (w, c, cfg) = setup();
        for near in [false, true] {
            let p = plan_with_mode(c.pq(), c.l_c, &c, near, &cfg, &w).unwrap();
            assert!((p.plan.t - c.t_c).abs() < 1e-6 && (p.plan.l - c.l_c).abs() < 1e-6);
            assert!(!p.penalty_active && p.converged);
        }
    }

    #[test]
    fn agrees_with_direct_solve_near_cycle() {
        let (w, c, cfg) = setup();
        let cfg = OptimizerConfig { far_tie_break: 0.0, ..cfg };
        let pq0 = PqState::new(c.p_c + 0.01, c.q_c + 0.01);
        let p = plan_with_mode(pq0, c.l_c, &c, false, &cfg, &w).unwrap();
        assert!((p.predicted.q - c.q_c).abs() < 1e-6);
        // the direct solve hitting q_c and the predicted p lands on the same step
        let sols = direct_target_solve(pq0, p.predicted, &w);
        assert!(sols.iter().any(|s| (s.t - p.plan.t).abs() < 1e-6 && (s.l - p.plan.l).abs() < 1e-6));
    }

    #[test]
    fn far_tie_break_stays_near_cycle_step() {
        let (w, c, cfg) = setup();
        let pq0 = PqState::new(c.p_c - 0.15, c.q_c + 0.01);
        let p = plan_with_mode(pq0, c.l_c, &c, false, &cfg, &w).unwrap();
        assert!((p.predicted.q - c.q_c).abs() < 1e-3, "{:?}", p.predicted);
        // the smallest correction is a slightly shorter period at nearly L_c
        assert!((p.plan.t - c.t_c).abs() < 0.02 && (p.plan.l - c.l_c).abs() < 0.01, "{:?}", p.plan);
    }

    #[test]
    fn far_start_matches_grid_search() {
        let (w, c, cfg) = setup();
        let pq0 = PqState::new(-0.67, 0.47);
        // feet start 0.2 apart
        let p = plan_with_mode(pq0, 0.2, &c, false, &cfg, &w).unwrap();
        let obj = assemble_objective(pq0, 0.2, cycle_goals(&c, false, &cfg), walker_penalties(&cfg, &w), &cfg, &w)
            .unwrap();
        let u_plan = obj.value(&Vector2::new(p.plan.t, p.plan.l)).unwrap();
        let mut best = f64::INFINITY;
        for i in 0..=170 {
            for j in 0..=300 {
                let x = Vector2::new(0.15 + 0.005 * i as f64, -0.75 + 0.005 * j as f64);
                if let Ok(v) = obj.value(&x) {
                    best = best.min(v);
                }
            }
        }
        assert!(u_plan <= best + 1e-6, "{u_plan} vs grid {best}");
        assert!((p.predicted.q - c.q_c).abs() < (0.47 - c.q_c) * 0.5, "{:?}", p.predicted);
        assert!(p.violated.is_empty(), "{:?}", p.violated);
    }

    #[test]
    fn newton_directions_descend() {
        let (w, c, cfg) = setup();
        for pq0 in [PqState::new(-0.67, 0.47), PqState::new(0.57, -0.37), PqState::new(-0.5, 0.3)] {
            let p = plan_with_mode(pq0, 0.5, &c, false, &cfg, &w).unwrap();
            assert!(p.log.iter().all(|it| it.slope < 0.0 && it.cos_theta > 0.0));
        }
    }

    #[test]
    fn scheduler_debounces() {
        let (_, c, cfg) = setup();
        let mut s = Scheduler::default();
        assert!(!s.update(c.pq(), &c, &cfg));
        assert!(s.update(c.pq(), &c, &cfg));
        let far = PqState::new(-0.5, 0.4);
        assert!(s.update(far, &c, &cfg));
        assert!(s.update(c.pq(), &c, &cfg));
        assert!(s.update(far, &c, &cfg));
        assert!(!s.update(far, &c, &cfg));
    }
}
