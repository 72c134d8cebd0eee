//! Hybrid walking simulation on the complete model.

use serde::{Deserialize, Serialize};

use crate::cycles::CycleSpec;
use crate::error::{Error, Result};
use crate::momentum::{estimate_initial, PqState};
use crate::opt::{OptimalController, OptimizerConfig};
use crate::params::WalkerParams;
use crate::stabilizers::{best_effort_plan, p_star, stabilizer1_cop, SplitPriority, Stabilizer, StepPlan};

use super::body::{integrate_torso, momentum_tracking_forces, Gains, ImpulseEvent, ReferenceTrajectories, RigidBodyState, Wrench};
use super::constraints::{constraint_metrics, planned_constraints, ConstraintReport, StepKinematics};

/// Step controller driving the walker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Controller {
    OpenLoop,
    Cop { gain: f64 },
    StepLength,
    StepTime,
    Combined { priority: SplitPriority },
    Optimal(OptimizerConfig),
}

impl Controller {
    pub fn name(&self) -> &'static str {
        match self {
            Self::OpenLoop => "openloop",
            Self::Cop { .. } => "cop",
            Self::StepLength => "steplen",
            Self::StepTime => "steptime",
            Self::Combined { .. } => "combined",
            Self::Optimal(_) => "optimal",
        }
    }

    /// Parses a CLI name with default settings (CoP gain 5).
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "openloop" => Self::OpenLoop,
            "cop" => Self::Cop { gain: 5.0 },
            "steplen" => Self::StepLength,
            "steptime" => Self::StepTime,
            "combined" => Self::Combined { priority: SplitPriority::default() },
            "optimal" => Self::Optimal(OptimizerConfig::default()),
            other => return Err(Error::param("controller", format!("unknown controller `{other}`"))),
        })
    }

    /// The stabilizers commit to a step at its start; the optimal controller
    /// re-solves at 1 kHz from the estimated step-initial state.
    pub fn default_replan(&self) -> Replan {
        match self {
            Self::Optimal(_) => Replan::Periodic { period: 1e-3 },
            _ => Replan::StepStart,
        }
    }
}

/// When the step controller may revise `(L, T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Replan {
    /// Plan once at the start of each step.
    StepStart,
    /// Also replan every `period` seconds from the estimated step-initial
    /// state `(p_t e^{ωt}, q_t e^{−ωt})`.
    Periodic { period: f64 },
}


/// Initial horizontal state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartState {
    /// `(p, q)` relative to the stance foot.
    Pq { p: f64, q: f64 },
    /// CoM position and velocity in world coordinates.
    Explicit { x0: f64, xdot0: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkSetup {
    pub params: WalkerParams,
    pub cycle: CycleSpec,
    pub start: StartState,
    pub z_stance: f64,
    pub z_swing: f64,
    pub y0: f64,
    pub theta0: f64,
    pub n_steps: usize,
    pub dt: f64,
    pub refs: ReferenceTrajectories,
    pub gains: Gains,
    pub impulses: Vec<ImpulseEvent>,
    /// `None` uses the controller's own schedule.
    #[serde(default)]
    pub replan: Option<Replan>,
}

impl WalkSetup {
    /// Undisturbed walk starting exactly on the cycle with flat references.
    pub fn on_cycle(cycle: CycleSpec, n_steps: usize, params: WalkerParams) -> Self {
        Self {
            params,
            cycle,
            start: StartState::Pq { p: cycle.p_c, q: cycle.q_c },
            z_stance: 0.0,
            z_swing: -cycle.l_c,
            y0: params.h(),
            theta0: 0.0,
            n_steps,
            dt: 1e-4,
            refs: ReferenceTrajectories::flat(cycle.t_c),
            gains: Gains::default(),
            impulses: Vec::new(),
            replan: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::param("n_steps", "must be ≥ 1"));
        }
        if !(self.dt > 0.0 && self.dt < self.params.t_0()) {
            return Err(Error::param("dt", "must lie in (0, T0)"));
        }
        if !(self.y0 > 0.0) {
            return Err(Error::NonPositiveHeight(self.y0));
        }
        self.refs.validate()?;
        for imp in &self.impulses {
            imp.validate()?;
        }
        if let Some(Replan::Periodic { period }) = self.replan {
            if !(period >= self.dt) {
                return Err(Error::param("replan.period", "must be ≥ dt"));
            }
        }
        Ok(())
    }

    fn initial_state(&self) -> RigidBodyState {
        let w = self.params.omega();
        let (x, xdot) = match self.start {
            StartState::Pq { p, q } => (self.z_stance + 0.5 * (p + q), 0.5 * w * (q - p)),
            StartState::Explicit { x0, xdot0 } => (x0, xdot0),
        };
        RigidBodyState {
            x,
            xdot,
            y: self.y0,
            ydot: 0.0,
            theta: self.theta0,
            thetadot: 0.0,
            z_stance: self.z_stance,
            z_swing: self.z_swing,
            t_in_step: 0.0,
            step_index: 1,
        }
    }
}

/// One sample of the continuous trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousRow {
    pub t: f64,
    pub x: f64,
    pub dx: f64,
    pub ddx: f64,
    pub y: f64,
    pub dy: f64,
    pub theta: f64,
    pub dtheta: f64,
    pub p: f64,
    pub q: f64,
    pub z_stance: f64,
    pub dz_des: f64,
    pub fx: f64,
    pub fy: f64,
    pub tz: f64,
    pub mu_req: f64,
}

/// Optimizer diagnostics for one planned step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerInfo {
    pub near: bool,
    pub iterations: usize,
    pub converged: bool,
    pub restarted: bool,
    pub flagged: bool,
    /// Every accepted Newton direction had `∇Uᵀd < 0`.
    pub descent_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub i: usize,
    pub l: f64,
    pub t: f64,
    pub p0: f64,
    pub q0: f64,
    pub p_star: f64,
    pub alpha: f64,
    /// Mean CoM speed over the step.
    pub v_avg: f64,
    pub planned: ConstraintReport,
    pub realized: ConstraintReport,
    pub planner: Option<PlannerInfo>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Completed,
    Fell { step: usize, t: f64, reason: FallReason },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FallReason {
    Collapsed,
    Diverged,
    NoSupport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub controller: String,
    pub cycle: CycleSpec,
    pub rows: Vec<ContinuousRow>,
    pub steps: Vec<StepRecord>,
    pub outcome: Outcome,
    /// Step-initial state after the last completed step.
    pub final_pq: PqState,
}

impl SimTrace {
    pub fn fell(&self) -> bool {
        matches!(self.outcome, Outcome::Fell { .. })
    }
}

/// Quintic rest-to-rest blend from 0 to 1.
fn quintic(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

const FALL_COMPONENT: f64 = 10.0;

fn fall_check(st: &RigidBodyState, params: &WalkerParams) -> Option<FallReason> {
    let pq = st.pq(params);
    if !(st.y >= 0.5 * params.h()) {
        Some(FallReason::Collapsed)
    } else if !(pq.p.abs() <= FALL_COMPONENT && pq.q.abs() <= FALL_COMPONENT) {
        Some(FallReason::Diverged)
    } else {
        None
    }
}

struct Planned {
    plan: StepPlan,
    planner: Option<PlannerInfo>,
}

fn plan_step(
    ctrl: &Controller,
    optimal: &mut Option<OptimalController>,
    pq0: PqState,
    prev_l: f64,
    fresh: bool,
    c: &CycleSpec,
    params: &WalkerParams,
) -> Planned {
    let growth = c.growth(params);
    let e0 = pq0.q - c.q_c;
    let cycle_plan = |alpha| StepPlan { l: c.l_c, t: c.t_c, cop_gain: 0.0, k_l: 0.0, k_t: 0.0, alpha };
    match ctrl {
        Controller::OpenLoop => Planned { plan: cycle_plan(growth), planner: None },
        Controller::Cop { gain } => {
            let alpha = (-params.omega() * (gain - 1.0) * c.t_c).exp();
            Planned { plan: StepPlan { cop_gain: *gain, ..cycle_plan(alpha) }, planner: None }
        }
        Controller::StepLength => Planned {
            plan: best_effort_plan(Stabilizer::StepLength, pq0.q, c, SplitPriority::default(), params),
            planner: None,
        },
        Controller::StepTime => Planned {
            plan: best_effort_plan(Stabilizer::StepTime, pq0.q, c, SplitPriority::default(), params),
            planner: None,
        },
        Controller::Combined { priority } => Planned {
            plan: best_effort_plan(Stabilizer::Combined, pq0.q, c, *priority, params),
            planner: None,
        },
        Controller::Optimal(cfg) => {
            let oc = optimal.get_or_insert_with(|| OptimalController::new(cfg.clone()));
            let planned = if fresh { oc.plan(pq0, prev_l, c, params) } else { oc.replan(pq0, prev_l, c, params) };
            match planned {
                Ok(op) => Planned {
                    plan: op.plan,
                    planner: Some(PlannerInfo {
                        near: op.near,
                        iterations: op.iterations,
                        converged: op.converged,
                        restarted: op.restarted,
                        flagged: op.flagged,
                        descent_ok: op.log.iter().all(|l| l.slope < 0.0),
                    }),
                },
                Err(_) => {
                    let alpha = if e0 == 0.0 { 0.0 } else { growth };
                    Planned {
                        plan: cycle_plan(alpha),
                        planner: Some(PlannerInfo {
                            near: oc.scheduler.near(),
                            iterations: 0,
                            converged: false,
                            restarted: true,
                            flagged: true,
                            descent_ok: true,
                        }),
                    }
                }
            }
        }
    }
}

/// Runs the hybrid simulation: RK4 on the torso during each step, plan at
/// the start of each step, and switch feet exactly at the planned time.
pub fn run_walk(setup: &WalkSetup, ctrl: &Controller) -> Result<SimTrace> {
    setup.validate()?;
    let params = &setup.params;
    let c = &setup.cycle;
    let mut st = setup.initial_state();
    let mut optimal = None;
    let mut rows = Vec::with_capacity(setup.n_steps * ((c.t_c / setup.dt) as usize + 2));
    let mut steps = Vec::with_capacity(setup.n_steps);
    let mut t_global = 0.0;
    let mut outcome = Outcome::Completed;
    let cop_gain = match ctrl {
        Controller::Cop { gain } => Some(*gain),
        _ => None,
    };

    'walk: for i in 1..=setup.n_steps {
        st.step_index = i;
        st.t_in_step = 0.0;
        let pq0 = st.pq(params);
        let prev_l = st.z_stance - st.z_swing;
        let Planned { mut plan, mut planner } = plan_step(ctrl, &mut optimal, pq0, prev_l, true, c, params);
        let (x_start, z_swing_start) = (st.x, st.z_swing);
        let mut pq_plan = pq0;
        if !(plan.t > setup.dt) || !plan.l.is_finite() {
            outcome = Outcome::Fell { step: i, t: t_global, reason: FallReason::NoSupport };
            break;
        }

        let z = st.z_stance;
        let dz_des = |s: &RigidBodyState, t: f64| match cop_gain {
            Some(k) => stabilizer1_cop(s.pq(params).q, t, c, k, params),
            None => 0.0,
        };
        let force = |s: &RigidBodyState, t: f64| {
            momentum_tracking_forces(s, &setup.refs.sample(t, params), z + dz_des(s, t), &setup.gains, params)
        };

        let replan_every = match setup.replan.unwrap_or_else(|| ctrl.default_replan()) {
            Replan::Periodic { period } if cop_gain.is_none() && !matches!(ctrl, Controller::OpenLoop) => {
                Some(((period / setup.dt).round() as usize).max(1))
            }
            _ => None,
        };
        let mut mu_max: f64 = 0.0;
        let mut sum_dz = 0.0;
        let mut k = 0usize;
        loop {
            let t0 = k as f64 * setup.dt;
            if let Some(every) = replan_every {
                if k > 0 && k % every == 0 {
                    let pq_e = estimate_initial(st.pq(params), t0, params);
                    let re = plan_step(ctrl, &mut optimal, pq_e, prev_l, false, c, params);
                    if re.plan.l.is_finite() && re.plan.t.is_finite() {
                        plan = re.plan;
                        planner = re.planner;
                        pq_plan = pq_e;
                    }
                }
            }
            if t0 >= plan.t - 1e-12 {
                // a revised plan may ask to land now
                plan.t = plan.t.max(t0);
                break;
            }
            let t1 = ((k + 1) as f64 * setup.dt).min(plan.t);
            let h = t1 - t0;
            st.t_in_step = t0;
            let f = force(&st, t0)?;
            let dz = dz_des(&st, t0);
            sum_dz += dz * h;
            let mut disturbance = Wrench::default();
            for imp in &setup.impulses {
                let d = imp.mean_wrench(i, t0, t1);
                disturbance = Wrench::new(disturbance.fx + d.fx, disturbance.fy + d.fy, disturbance.tz + d.tz);
            }
            let mu = if f.fy > 0.0 { (f.fx / f.fy).abs() } else { f64::INFINITY };
            mu_max = mu_max.max(mu);
            let pq = st.pq(params);
            rows.push(ContinuousRow {
                t: t_global + t0,
                x: st.x,
                dx: st.xdot,
                ddx: (f.fx + disturbance.fx) / params.mass(),
                y: st.y,
                dy: st.ydot,
                theta: st.theta,
                dtheta: st.thetadot,
                p: pq.p,
                q: pq.q,
                z_stance: st.z_stance,
                dz_des: dz,
                fx: f.fx,
                fy: f.fy,
                tz: f.tz,
                mu_req: mu,
            });
            st = integrate_torso(&st, force, disturbance, h, params)?;
            let z_target = z + plan.l;
            st.z_swing = z_swing_start + (z_target - z_swing_start) * quintic(t1 / plan.t);
            if let Some(reason) = fall_check(&st, params) {
                outcome = Outcome::Fell { step: i, t: t_global + t1, reason };
                break 'walk;
            }
            k += 1;
            if t1 >= plan.t {
                break;
            }
        }
        let z_target = z + plan.l;
        t_global += plan.t;

        let kin = StepKinematics {
            x_start,
            x_end: st.x,
            z_stance: st.z_stance,
            z_swing_start,
            l: plan.l,
            t: plan.t,
            mu_max,
        };
        let delta_p = if cop_gain.is_some() {
            // mean CoP shift expressed in the next convergent component
            let w = params.omega();
            sum_dz * w / (-(-w * plan.t).exp_m1()) * (-w * plan.t).exp()
        } else {
            0.0
        };
        steps.push(StepRecord {
            i,
            l: plan.l,
            t: plan.t,
            p0: pq0.p,
            q0: pq0.q,
            p_star: p_star(plan.l, plan.t, delta_p, params)?,
            alpha: plan.alpha,
            v_avg: (st.x - x_start) / plan.t,
            planned: planned_constraints(pq_plan, plan.l, plan.t, prev_l, params),
            realized: constraint_metrics(&kin, params),
            planner,
        });

        // landing: the swing foot becomes the stance foot
        st.z_swing = st.z_stance;
        st.z_stance = z_target;
    }
    st.t_in_step = 0.0;
    Ok(SimTrace {
        controller: ctrl.name().to_string(),
        cycle: *c,
        rows,
        steps,
        outcome,
        final_pq: st.pq(params),
    })
}
