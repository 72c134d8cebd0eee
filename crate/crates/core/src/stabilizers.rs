//! Motion-cycle stabilizers.
//!
//! Every stabilizer drives the divergent component of the step-initial
//! state towards the cycle value `q_c`. The convergent component needs no
//! feedback: it stays bounded for any admissible step sequence and follows
//! `q` to the cycle.
//!
//! | id | actuates | feedback law |
//! |----|----------|--------------|
//! | 1  | CoP shift within the step | `Δz = k (q(t) − q_c e^{ωt})`, saturated |
//! | 2  | step length | `L = L_c + k e` |
//! | 3  | step time | `T = T_c + ln(1 − k e / (q_0 e^{ωT_c})) / ω` |
//! | 4  | both | `k = k_L + k_T` split between 2 and 3 |
//!
//! With `e = q_0 − q_c` each step-based law yields
//! `e_{+1} = (e^{ωT_c} − k) e`, so the best gain is the deadbeat gain
//! `k = e^{ωT_c}` clamped to whatever the step limits allow.

use serde::{Deserialize, Serialize};

use crate::cycles::CycleSpec;
use crate::error::{Error, Result};
use crate::momentum::{propagate_with_cop, step_transition, step_to_step, PqState};
use crate::params::WalkerParams;

/// One step command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPlan {
    /// Displacement to the next stance foot [m].
    pub l: f64,
    /// Step period [s].
    pub t: f64,
    /// CoP gain (stabilizer 1 only, zero otherwise).
    pub cop_gain: f64,
    /// Gain on step length.
    pub k_l: f64,
    /// Gain on step time.
    pub k_t: f64,
    /// Predicted contraction `|q_{+1} − q_c| / |q_0 − q_c|`.
    pub alpha: f64,
}

impl StepPlan {
    pub fn convergent(&self) -> bool {
        self.alpha < 1.0
    }
}

/// Admissible gain interval (closed for clamping, reported as-is).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainWindow {
    pub lo: f64,
    pub hi: f64,
    pub feasible: bool,
}

impl GainWindow {
    fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi, feasible: lo < hi }
    }

    fn unbounded() -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn intersect(self, other: GainWindow) -> GainWindow {
        GainWindow::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn clamp(&self, k: f64) -> f64 {
        k.max(self.lo).min(self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stabilizer {
    Cop = 1,
    StepLength = 2,
    StepTime = 3,
    Combined = 4,
}

impl Stabilizer {
    pub const ALL: [Stabilizer; 4] = [Self::Cop, Self::StepLength, Self::StepTime, Self::Combined];

    pub fn id(self) -> u8 {
        self as u8
    }
}

impl TryFrom<u8> for Stabilizer {
    type Error = Error;

    fn try_from(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Self::Cop),
            2 => Ok(Self::StepLength),
            3 => Ok(Self::StepTime),
            4 => Ok(Self::Combined),
            other => Err(Error::UnknownController(other)),
        }
    }
}

/// Which gain absorbs the correction first in the combined stabilizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitPriority {
    #[default]
    LengthFirst,
    TimeFirst,
}

/// Value the convergent component tracks for a step `(l, t)` with CoP
/// induced offset `delta_p`.
pub fn p_star(l: f64, t: f64, delta_p: f64, params: &WalkerParams) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveDuration(t));
    }
    Ok((delta_p - l) / -(-params.omega() * t).exp_m1())
}

/// Enclosure of every step-initial convergent component reachable with
/// `|L| ≤ l_max`, `T ≥ t_min` and `Δp ∈ [dp_min, dp_max]` from `p_first`.
pub fn p_bounds(
    l_max: f64,
    t_min: f64,
    dp_min: f64,
    dp_max: f64,
    p_first: f64,
    params: &WalkerParams,
) -> Result<(f64, f64)> {
    if !(t_min > 0.0) {
        return Err(Error::NonPositiveDuration(t_min));
    }
    let den = -(-params.omega() * t_min).exp_m1();
    Ok((
        ((-l_max + dp_min) / den).min(p_first),
        ((l_max + dp_max) / den).max(p_first),
    ))
}

/// Stabilizer 1 command at time `t` into the step: saturated
/// `k (q_t − q_c e^{ωt})`.
pub fn stabilizer1_cop(q_t: f64, t: f64, c: &CycleSpec, k: f64, params: &WalkerParams) -> f64 {
    let err = q_t - c.q_c * (params.omega() * t).exp();
    (k * err).clamp(params.dz_min(), params.dz_max())
}

/// Gains `k > 1` that keep the initial CoP command unsaturated.
pub fn cop_gain_window(q0: f64, c: &CycleSpec, params: &WalkerParams) -> GainWindow {
    let e = q0 - c.q_c;
    let upper = if e > 0.0 {
        params.dz_max() / e
    } else if e < 0.0 {
        params.dz_min() / e
    } else {
        f64::INFINITY
    };
    GainWindow::new(1.0, upper)
}

/// Outcome of one stabilizer-1 step on the simplified model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CopStep {
    /// State just before landing.
    pub end: PqState,
    /// Next step-initial state.
    pub next: PqState,
    /// CoP-induced shift of the next convergent component.
    pub delta_p: f64,
    /// Realised `|e_{+1}| / |e_0|` (nominal `e^{−ω(k−1)T_c}` when `e_0 = 0`).
    pub alpha: f64,
    /// Time spent with the CoP command saturated.
    pub saturated_time: f64,
}

/// `(e^x − 1)/x`, continuous at 0.
fn expm1_over_x(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + 0.5 * x
    } else {
        x.exp_m1() / x
    }
}

/// Exact closed-loop solution of one stabilizer-1 step with saturation.
///
/// The error `e = q − q_c e^{ωt}` obeys `ė = −ω(k−1)e` while `k e` lies
/// inside `[dz_min, dz_max]` and `ė = ω(e − b)` while the command sits at a
/// bound `b`. Both pieces have closed forms, so the step is stitched from at
/// most a handful of analytic segments.
pub fn cop_step(pq0: PqState, c: &CycleSpec, k: f64, params: &WalkerParams) -> Result<CopStep> {
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::param("cop_gain", format!("must be finite and > 0, got {k}")));
    }
    let w = params.omega();
    let lambda = w * (k - 1.0);
    let (lo, hi) = (params.dz_min(), params.dz_max());
    let e0 = pq0.q - c.q_c;

    let mut pq = pq0;
    let mut t = 0.0;
    let mut saturated_time = 0.0;
    let mut bound = [hi, lo].into_iter().find(|&b| if b > 0.0 { k * e0 > b } else { k * e0 < b });
    // k > 1 can only leave a bound and k < 1 only enter one, so a step has
    // at most two segments
    for _ in 0..2 {
        let remaining = c.t_c - t;
        if remaining <= 0.0 {
            break;
        }
        let e = pq.q - c.q_c * (w * t).exp();
        if let Some(b) = bound {
            // leaves saturation when k·e returns to b; only a contracting
            // gain (k > 1) can bring it back
            let ratio = (b / k - b) / (e - b);
            let tau = if k > 1.0 && ratio > 1.0 { ratio.ln() / w } else { f64::INFINITY };
            let dt = tau.min(remaining);
            pq = propagate_with_cop(pq, b, dt, params)?;
            saturated_time += dt;
            t += dt;
            // snap onto the saturation boundary
            if dt < remaining {
                pq.q = c.q_c * (w * t).exp() + b / k;
            }
            bound = None;
        } else {
            // a growing error (k < 1) may reach a bound
            let b = if e > 0.0 { hi } else { lo };
            let tau = if lambda < 0.0 && e != 0.0 && b != 0.0 {
                ((b / k) / e).ln() / -lambda
            } else {
                f64::INFINITY
            };
            let dt = tau.min(remaining);
            let decay = (-w * dt).exp();
            let e_end = if dt < remaining { b / k } else { e * (-lambda * dt).exp() };
            let p_end = pq.p * decay + w * k * e * dt * decay * expm1_over_x((w - lambda) * dt);
            t += dt;
            pq = PqState::new(p_end, c.q_c * (w * t).exp() + e_end);
            bound = Some(b);
        }
    }

    let end = pq;
    let next = step_transition(end, c.l_c);
    let e_next = next.q - c.q_c;
    let alpha = if e0 == 0.0 {
        (-lambda * c.t_c).exp()
    } else {
        (e_next / e0).abs()
    };
    let free_p = pq0.p * (-w * c.t_c).exp() - c.l_c;
    Ok(CopStep {
        end,
        next,
        delta_p: next.p - free_p,
        alpha,
        saturated_time,
    })
}

/// Gains for which `|L_c + k e| ≤ L_max`.
pub fn step_length_gain_window(q0: f64, c: &CycleSpec, params: &WalkerParams) -> GainWindow {
    let e = q0 - c.q_c;
    if e == 0.0 {
        return GainWindow::unbounded();
    }
    let l_max = params.l_max();
    GainWindow::new(-l_max / e.abs() - c.l_c / e, l_max / e.abs() - c.l_c / e)
}

/// Gains for which the step-time law keeps `T ≥ t_min`.
pub fn step_time_gain_window(q0: f64, t_min: f64, c: &CycleSpec, params: &WalkerParams) -> GainWindow {
    let e = q0 - c.q_c;
    if e == 0.0 {
        return GainWindow::unbounded();
    }
    let w = params.omega();
    let slack = (w * c.t_c).exp() - (w * t_min).exp();
    let r = e / q0;
    if r > 0.0 {
        GainWindow::new(f64::NEG_INFINITY, slack / r)
    } else {
        GainWindow::new(slack / r, f64::INFINITY)
    }
}

/// Gains with contraction `|e^{ωT_c} − k| < 1`.
pub fn convergence_gain_window(c: &CycleSpec, params: &WalkerParams) -> GainWindow {
    let growth = c.growth(params);
    GainWindow::new(growth - 1.0, growth + 1.0)
}

fn step_time_for_gain(q0: f64, k_t: f64, c: &CycleSpec, params: &WalkerParams) -> f64 {
    let e = q0 - c.q_c;
    if e == 0.0 || k_t == 0.0 || q0 == 0.0 {
        return c.t_c;
    }
    let growth = c.growth(params);
    c.t_c + (1.0 - k_t * e / (q0 * growth)).ln() / params.omega()
}

fn check_alpha(alpha: f64, controller: Stabilizer, q0: f64) -> Result<()> {
    if alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::EmptyGainWindow {
            controller: controller.id(),
            q0,
        })
    }
}

fn step_length_plan(q0: f64, c: &CycleSpec, params: &WalkerParams) -> StepPlan {
    let growth = c.growth(params);
    let k = step_length_gain_window(q0, c, params).clamp(growth);
    StepPlan {
        l: c.l_c + k * (q0 - c.q_c),
        t: c.t_c,
        cop_gain: 0.0,
        k_l: k,
        k_t: 0.0,
        alpha: (growth - k).abs(),
    }
}

fn step_time_plan(q0: f64, c: &CycleSpec, params: &WalkerParams) -> StepPlan {
    let growth = c.growth(params);
    let k = if q0 * c.q_c > 0.0 {
        step_time_gain_window(q0, params.t_min(c.l_c), c, params).clamp(growth)
    } else {
        0.0
    };
    StepPlan {
        l: c.l_c,
        t: step_time_for_gain(q0, k, c, params),
        cop_gain: 0.0,
        k_l: 0.0,
        k_t: k,
        alpha: (growth - k).abs(),
    }
}

fn combined_plan(q0: f64, c: &CycleSpec, priority: SplitPriority, params: &WalkerParams) -> StepPlan {
    let growth = c.growth(params);
    let len_w = step_length_gain_window(q0, c, params);
    let time_w = if q0 == 0.0 {
        GainWindow::new(0.0, 0.0)
    } else {
        step_time_gain_window(q0, params.t_min(params.l_max()), c, params)
    };
    let (k_l, k_t) = match priority {
        SplitPriority::LengthFirst => {
            let k_l = len_w.clamp(growth);
            (k_l, time_w.clamp(growth - k_l))
        }
        SplitPriority::TimeFirst => {
            let k_t = time_w.clamp(growth);
            (len_w.clamp(growth - k_t), k_t)
        }
    };
    StepPlan {
        l: c.l_c + k_l * (q0 - c.q_c),
        t: step_time_for_gain(q0, k_t, c, params),
        cop_gain: 0.0,
        k_l,
        k_t,
        alpha: (growth - k_l - k_t).abs(),
    }
}

/// Stabilizer 2: step length feedback with the best gain inside the
/// step-length limits.
pub fn stabilizer2_step_length(q0: f64, c: &CycleSpec, params: &WalkerParams) -> Result<StepPlan> {
    let plan = step_length_plan(q0, c, params);
    check_alpha(plan.alpha, Stabilizer::StepLength, q0)?;
    Ok(plan)
}

/// Stabilizer 3: step time feedback, keeping `T ≥ T_min(L_c)`.
pub fn stabilizer3_step_time(q0: f64, c: &CycleSpec, params: &WalkerParams) -> Result<StepPlan> {
    if !(q0 * c.q_c > 0.0) {
        return Err(Error::DirectionMismatch {
            controller: Stabilizer::StepTime.id(),
            q0,
            q_c: c.q_c,
        });
    }
    let plan = step_time_plan(q0, c, params);
    check_alpha(plan.alpha, Stabilizer::StepTime, q0)?;
    Ok(plan)
}

/// Stabilizer 4: combined length and time feedback. The time limit uses
/// `T_min(L_max)` so that it holds whatever length is chosen.
pub fn stabilizer4_combined(
    q0: f64,
    c: &CycleSpec,
    priority: SplitPriority,
    params: &WalkerParams,
) -> Result<StepPlan> {
    let plan = combined_plan(q0, c, priority, params);
    check_alpha(plan.alpha, Stabilizer::Combined, q0)?;
    Ok(plan)
}

/// The step a stabilizer takes even when no gain contracts: gains are
/// clamped to the limits and `alpha` may reach or exceed 1. Stabilizer 3
/// keeps the cycle time when `q0` points the wrong way.
pub fn best_effort_plan(
    which: Stabilizer,
    q0: f64,
    c: &CycleSpec,
    priority: SplitPriority,
    params: &WalkerParams,
) -> StepPlan {
    match which {
        Stabilizer::Cop => StepPlan {
            l: c.l_c,
            t: c.t_c,
            cop_gain: 0.0,
            k_l: 0.0,
            k_t: 0.0,
            alpha: c.growth(params),
        },
        Stabilizer::StepLength => step_length_plan(q0, c, params),
        Stabilizer::StepTime => step_time_plan(q0, c, params),
        Stabilizer::Combined => combined_plan(q0, c, priority, params),
    }
}

/// Open interval of step-initial `q` from which the stabilizer can contract
/// the divergent error.
pub fn admissible_q_window(which: u8, c: &CycleSpec, params: &WalkerParams) -> Result<(f64, f64)> {
    let w = params.omega();
    Ok(match Stabilizer::try_from(which)? {
        Stabilizer::Cop => (c.q_c + params.dz_min(), c.q_c + params.dz_max()),
        Stabilizer::StepLength => {
            let b = params.l_max() / (w * c.t_c).exp_m1();
            (-b, b)
        }
        Stabilizer::StepTime => {
            let b = c.l_c / (w * params.t_min(c.l_c)).exp_m1();
            if c.q_c > 0.0 {
                (0.0, b)
            } else {
                (b, 0.0)
            }
        }
        Stabilizer::Combined => {
            let b = params.l_max() / (w * params.t_min(params.l_max())).exp_m1();
            (-b, b)
        }
    })
}

/// Closed-loop controller choice for simplified-model rollouts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SwmController {
    Cop { gain: f64 },
    StepLength,
    StepTime,
    Combined { priority: SplitPriority },
}

impl SwmController {
    pub fn stabilizer(&self) -> Stabilizer {
        match self {
            Self::Cop { .. } => Stabilizer::Cop,
            Self::StepLength => Stabilizer::StepLength,
            Self::StepTime => Stabilizer::StepTime,
            Self::Combined { .. } => Stabilizer::Combined,
        }
    }
}

/// Record of one closed-loop step on the simplified model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwmStep {
    pub start: PqState,
    pub plan: StepPlan,
    pub delta_p: f64,
    pub next: PqState,
}

/// Plans and applies one step of the chosen stabilizer on the simplified
/// model.
pub fn swm_step(pq0: PqState, ctrl: SwmController, c: &CycleSpec, params: &WalkerParams) -> Result<SwmStep> {
    Ok(match ctrl {
        SwmController::Cop { gain } => {
            let s = cop_step(pq0, c, gain, params)?;
            SwmStep {
                start: pq0,
                plan: StepPlan {
                    l: c.l_c,
                    t: c.t_c,
                    cop_gain: gain,
                    k_l: 0.0,
                    k_t: 0.0,
                    alpha: s.alpha,
                },
                delta_p: s.delta_p,
                next: s.next,
            }
        }
        other => {
            let plan = match other {
                SwmController::StepLength => stabilizer2_step_length(pq0.q, c, params)?,
                SwmController::StepTime => stabilizer3_step_time(pq0.q, c, params)?,
                SwmController::Combined { priority } => stabilizer4_combined(pq0.q, c, priority, params)?,
                SwmController::Cop { .. } => unreachable!(),
            };
            SwmStep {
                start: pq0,
                plan,
                delta_p: 0.0,
                next: step_to_step(pq0, plan.l, plan.t, params)?,
            }
        }
    })
}

/// Runs `n_steps` closed-loop steps from `pq0`.
pub fn swm_rollout(
    pq0: PqState,
    ctrl: SwmController,
    c: &CycleSpec,
    n_steps: usize,
    params: &WalkerParams,
) -> Result<Vec<SwmStep>> {
    let mut out = Vec::with_capacity(n_steps);
    let mut pq = pq0;
    for _ in 0..n_steps {
        let s = swm_step(pq, ctrl, c, params)?;
        pq = s.next;
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::simple_cycle_from_step;

    fn setup() -> (WalkerParams, CycleSpec) {
        let w = WalkerParams::default();
        let c = simple_cycle_from_step(0.5, 0.4, &w).unwrap();
        (w, c)
    }

    #[test]
    fn p_star_examples() {
        let (w, _) = setup();
        let t_c = 3.5f64.ln() / w.omega();
        assert!((p_star(0.5, t_c, 0.0, &w).unwrap() + 0.7).abs() < 1e-12);
        // (0.1 − 0.5) / (1 − e^{−0.4ω}) = −0.4 / 0.714122
        assert!((p_star(0.5, 0.4, 0.1, &w).unwrap() + 0.56013).abs() < 1e-5);
        assert!((p_star(-0.5, 0.4, 0.0, &w).unwrap() - 0.70016).abs() < 1e-5);
        assert!(p_star(0.5, 0.0, 0.0, &w).is_err());
    }

    #[test]
    fn p_bounds_examples() {
        let (w, _) = setup();
        // 0.75 / (1 − e^{−ω·0.216667}) with e^{−0.678274} = 0.507496
        let (lo, hi) = p_bounds(0.75, 0.75 / 3.0 * (0.5 / 0.75) + 0.05, 0.0, 0.0, -0.7, &w).unwrap();
        assert!((hi - 1.522818).abs() < 1e-6, "{hi}");
        assert!((lo + 1.522818).abs() < 1e-6);
        assert_eq!(p_bounds(0.0, 0.3, 0.0, 0.0, -0.2, &w).unwrap(), (-0.2, 0.0));
        assert!(p_bounds(0.75, 0.0, 0.0, 0.0, 0.0, &w).is_err());
    }

    #[test]
    fn cop_law() {
        let (w, c) = setup();
        let t = 0.13;
        let on_track = c.q_c * (w.omega() * t).exp();
        assert_eq!(stabilizer1_cop(on_track, t, &c, 5.0, &w), 0.0);
        // k = 1.1 at e = 0.1 sits exactly on dz_max
        let table = CycleSpec { q_c: 0.2, ..c };
        assert!((stabilizer1_cop(0.3, 0.0, &table, 1.1, &w) - 0.11).abs() < 1e-12);
        assert_eq!(stabilizer1_cop(0.3, 0.0, &table, 5.0, &w), 0.11);
        let win = cop_gain_window(0.3, &table, &w);
        assert!((win.hi - 1.1).abs() < 1e-12 && win.lo == 1.0);
    }

    #[test]
    fn cop_step_unsaturated_contraction() {
        let (w, c) = setup();
        // small error keeps k·e inside the CoP bounds for k = 1.1
        let s = cop_step(PqState::new(c.p_c, c.q_c + 0.01), &c, 1.1, &w).unwrap();
        let nominal = (-w.omega() * 0.1 * c.t_c).exp();
        assert!((nominal - 0.8823).abs() < 1e-4);
        assert!((s.alpha - nominal).abs() < 1e-12);
        assert_eq!(s.saturated_time, 0.0);
    }

    /// RK4 on ṗ = −ω(p − Δz), q̇ = ω(q − Δz) with the saturated law.
    fn rk4_cop(pq0: PqState, c: &CycleSpec, k: f64, w: &WalkerParams) -> [f64; 2] {
        let om = w.omega();
        let f = |t: f64, y: [f64; 2]| {
            let dz = stabilizer1_cop(y[1], t, c, k, w);
            [-om * (y[0] - dz), om * (y[1] - dz)]
        };
        let n = 400_000;
        let h = c.t_c / n as f64;
        let mut y = [pq0.p, pq0.q];
        for i in 0..n {
            let t = i as f64 * h;
            let k1 = f(t, y);
            let k2 = f(t + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
            let k3 = f(t + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
            let k4 = f(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            for j in 0..2 {
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
        y
    }

    #[test]
    fn cop_step_matches_fine_integration() {
        let (w, c) = setup();
        // saturated throughout, leaving a bound, entering a bound (k < 1)
        for (pq0, k) in [
            (PqState::new(-0.5, 0.3), 5.0),
            (PqState::new(c.p_c, 0.25), 5.0),
            (PqState::new(c.p_c, 0.15), 5.0),
            (PqState::new(c.p_c, 0.33), 0.5),
        ] {
            let exact = cop_step(pq0, &c, k, &w).unwrap();
            let y = rk4_cop(pq0, &c, k, &w);
            assert!((exact.end.p - y[0]).abs() < 1e-7, "{pq0:?} k={k}: {:?} vs {:?}", exact.end, y);
            assert!((exact.end.q - y[1]).abs() < 1e-7, "{pq0:?} k={k}: {:?} vs {:?}", exact.end, y);
        }
    }

    #[test]
    fn cop_step_gain_two_is_continuous() {
        let (w, c) = setup();
        let pq0 = PqState::new(-0.69, 0.205);
        let a = cop_step(pq0, &c, 2.0, &w).unwrap();
        let b = cop_step(pq0, &c, 2.0 + 1e-7, &w).unwrap();
        assert!((a.next.p - b.next.p).abs() < 1e-8);
    }

    #[test]
    fn step_length_examples() {
        let (w, c) = setup();
        let growth = c.growth(&w);
        let plan = stabilizer2_step_length(c.q_c, &c, &w).unwrap();
        assert!((plan.k_l - growth).abs() < 1e-15 && plan.alpha == 0.0 && plan.l == c.l_c);

        let plan = stabilizer2_step_length(0.29, &c, &w).unwrap();
        let e = 0.29 - c.q_c;
        // gain clamps to (L_max − L_c)/e
        assert!((plan.k_l - 0.25 / e).abs() < 1e-12);
        assert!((plan.l - 0.75).abs() < 1e-12);
        assert!((plan.alpha - (growth - 0.25 / e)).abs() < 1e-12);
        let next = step_to_step(PqState::new(-0.49, 0.29), plan.l, plan.t, &w).unwrap();
        assert!((next.q - 0.264427).abs() < 1e-6, "{next:?}");
        assert!(((next.q - c.q_c) / e - plan.alpha).abs() < 1e-12);

        let (lo, hi) = admissible_q_window(2, &c, &w).unwrap();
        assert!((hi - 0.30024).abs() < 1e-5 && (lo + 0.30024).abs() < 1e-5);
        assert!(stabilizer2_step_length(0.31, &c, &w).is_err());
    }

    #[test]
    fn step_time_examples() {
        let (w, c) = setup();
        let plan = stabilizer3_step_time(c.q_c, &c, &w).unwrap();
        assert_eq!(plan.t, c.t_c);
        assert_eq!(plan.alpha, 0.0);

        // deadbeat: log argument 1 − e/q0 = q_c/q0
        let plan = stabilizer3_step_time(0.25, &c, &w).unwrap();
        assert_eq!(plan.alpha, 0.0);
        let expected_t = c.t_c + (c.q_c / 0.25).ln() / w.omega();
        assert!((plan.t - expected_t).abs() < 1e-12);
        assert!((plan.t - 0.32897).abs() < 1e-5);
        let next = step_to_step(PqState::new(-0.6, 0.25), plan.l, plan.t, &w).unwrap();
        assert!((next.q - c.q_c).abs() < 1e-12);

        let (lo, hi) = admissible_q_window(3, &c, &w).unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - 0.51521).abs() < 1e-5, "{hi}");
        assert!(matches!(
            stabilizer3_step_time(-0.1, &c, &w),
            Err(Error::DirectionMismatch { .. })
        ));
        assert!(stabilizer3_step_time(0.52, &c, &w).is_err());
        assert!(stabilizer3_step_time(0.505, &c, &w).unwrap().t >= w.t_min(c.l_c) - 1e-12);
    }

    #[test]
    fn combined_examples() {
        let (w, c) = setup();
        let plan = stabilizer4_combined(c.q_c, &c, SplitPriority::LengthFirst, &w).unwrap();
        assert_eq!((plan.l, plan.t, plan.alpha), (c.l_c, c.t_c, 0.0));

        let (lo, hi) = admissible_q_window(4, &c, &w).unwrap();
        assert!((hi - 0.48145).abs() < 1e-5 && (lo + 0.48145).abs() < 1e-5);

        let plan = stabilizer4_combined(0.47, &c, SplitPriority::LengthFirst, &w).unwrap();
        assert!(plan.alpha > 0.0 && plan.alpha < 1.0);
        assert!((plan.l - 0.75).abs() < 1e-12);
        assert!(plan.t >= 0.3 - 1e-12);
        let steps = swm_rollout(
            PqState::new(-0.67, 0.47),
            SwmController::Combined { priority: SplitPriority::LengthFirst },
            &c,
            20,
            &w,
        )
        .unwrap();
        assert!((steps.last().unwrap().next.q - c.q_c).abs() < 1e-9);
        assert!(stabilizer4_combined(0.49, &c, SplitPriority::LengthFirst, &w).is_err());
    }

    #[test]
    fn windows() {
        let (w, c) = setup();
        let (lo, hi) = admissible_q_window(1, &c, &w).unwrap();
        assert!((lo - (c.q_c - 0.11)).abs() < 1e-15 && (hi - (c.q_c + 0.11)).abs() < 1e-15);
        assert!((hi - 0.31).abs() < 1e-3);
        assert!(matches!(admissible_q_window(7, &c, &w), Err(Error::UnknownController(7))));
    }
}
