//! Periodic walking solutions of the step-to-step map.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lambert::lambert_w0;
use crate::momentum::{step_to_step, PqState};
use crate::params::WalkerParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// A simple (one-step period) motion cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleSpec {
    pub p_c: f64,
    pub q_c: f64,
    pub l_c: f64,
    pub t_c: f64,
    pub v_c: f64,
    pub direction: Direction,
}

impl CycleSpec {
    pub fn pq(&self) -> PqState {
        PqState::new(self.p_c, self.q_c)
    }

    /// `e^{ω T_c}`, the open-loop growth of a divergent offset per step.
    pub fn growth(&self, params: &WalkerParams) -> f64 {
        (params.omega() * self.t_c).exp()
    }
}

/// Cycle through which a step of displacement `l_c` and period `t_c` repeats.
pub fn simple_cycle_from_step(l_c: f64, t_c: f64, params: &WalkerParams) -> Result<CycleSpec> {
    if !(t_c > 0.0) || !t_c.is_finite() {
        return Err(Error::InvalidCycle(format!("period must be positive, got {t_c}")));
    }
    if l_c == 0.0 || !l_c.is_finite() {
        return Err(Error::InvalidCycle(format!("step displacement must be nonzero, got {l_c}")));
    }
    let wt = params.omega() * t_c;
    // 1 − e^{−ωT} and e^{ωT} − 1 via expm1 for short periods
    let p_c = l_c / (-wt).exp_m1();
    let q_c = l_c / wt.exp_m1();
    Ok(CycleSpec {
        p_c,
        q_c,
        l_c,
        t_c,
        v_c: l_c / t_c,
        direction: if l_c > 0.0 { Direction::Forward } else { Direction::Backward },
    })
}

/// Cycle with mean speed `v_c` and displacement `l_c` (`T_c = L_c / V_c`).
pub fn simple_cycle_from_speed(v_c: f64, l_c: f64, params: &WalkerParams) -> Result<CycleSpec> {
    if v_c == 0.0 || l_c == 0.0 || v_c.signum() != l_c.signum() {
        return Err(Error::InvalidCycle(format!(
            "speed {v_c} and displacement {l_c} must be nonzero with equal sign"
        )));
    }
    simple_cycle_from_step(l_c, l_c / v_c, params)
}

/// Cycle through a given initial state; needs `−p_c/q_c > 1`.
pub fn simple_cycle_from_pq(p_c: f64, q_c: f64, params: &WalkerParams) -> Result<CycleSpec> {
    let ratio = -p_c / q_c;
    if !(ratio > 1.0) || !ratio.is_finite() {
        return Err(Error::InvalidCycle(format!(
            "(p_c, q_c) = ({p_c}, {q_c}) is not a cycle point (need -p_c/q_c > 1)"
        )));
    }
    let l_c = -(p_c + q_c);
    let t_c = ratio.ln() / params.omega();
    Ok(CycleSpec {
        p_c,
        q_c,
        l_c,
        t_c,
        v_c: l_c / t_c,
        direction: if l_c > 0.0 { Direction::Forward } else { Direction::Backward },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleViolation {
    StepLength,
    MinimumTime,
    LambertBoundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub step_length: f64,
    pub l_max: f64,
    pub t_min: f64,
    /// Largest (forward) or smallest (backward) feasible `q_c` for this `p_c`
    /// on the minimum-time boundary; `None` when the boundary does not bind.
    pub q_boundary: Option<f64>,
    pub violations: Vec<CycleViolation>,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Minimum-time boundary in `q_c` for a cycle starting at `p_c`: the `q_c`
/// where `T_c(p_c, q_c) = T_min(L_c)`.
pub fn lambert_q_boundary(p_c: f64, direction: Direction, params: &WalkerParams) -> Option<f64> {
    let (w, v, t0) = (params.omega(), params.v_max(), params.t_0());
    let forward = |p: f64| {
        let arg = (w * p / v) * (w * (p / v - t0)).exp();
        lambert_w0(arg).ok().map(|y| -(v / w) * y)
    };
    match direction {
        Direction::Forward => forward(p_c),
        Direction::Backward => forward(-p_c).map(|q| -q),
    }
}

pub fn cycle_feasible(c: &CycleSpec, params: &WalkerParams) -> FeasibilityReport {
    let mut violations = Vec::new();
    let step_length = (c.p_c + c.q_c).abs();
    if !(step_length < params.l_max()) {
        violations.push(CycleViolation::StepLength);
    }
    let t_min = params.t_min(c.l_c);
    if !(c.t_c > t_min) {
        violations.push(CycleViolation::MinimumTime);
    }
    let q_boundary = lambert_q_boundary(c.p_c, c.direction, params);
    if let Some(qb) = q_boundary {
        let inside = match c.direction {
            Direction::Forward => c.q_c < qb,
            Direction::Backward => c.q_c > qb,
        };
        if !inside {
            violations.push(CycleViolation::LambertBoundary);
        }
    }
    FeasibilityReport {
        step_length,
        l_max: params.l_max(),
        t_min,
        q_boundary,
        violations,
    }
}

/// One step of a compound cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleStep {
    pub p_c: f64,
    pub q_c: f64,
    pub l_c: f64,
    pub t_c: f64,
}

impl CycleStep {
    pub fn pq(&self) -> PqState {
        PqState::new(self.p_c, self.q_c)
    }
}

/// Two-step periodic orbit of the step-to-step map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompoundCycle {
    pub steps: [CycleStep; 2],
}

impl CompoundCycle {
    /// Displacement over one full period.
    pub fn net_displacement(&self) -> f64 {
        self.steps[0].l_c + self.steps[1].l_c
    }
}

pub fn compound_two_step(l1: f64, t1: f64, l2: f64, t2: f64, params: &WalkerParams) -> Result<CompoundCycle> {
    if !(t1 > 0.0) || !(t2 > 0.0) {
        return Err(Error::InvalidCycle(format!("periods must be positive, got {t1}, {t2}")));
    }
    let w = params.omega();
    let total = w * (t1 + t2);
    let den_p = -(-total).exp_m1();
    let den_q = total.exp_m1();
    if !(den_p > 1e-14) || !den_q.is_finite() {
        return Err(Error::InvalidCycle("degenerate two-step period".into()));
    }
    let first = |la: f64, lb: f64, tb: f64| CycleStep {
        p_c: -(la * (-w * tb).exp() + lb) / den_p,
        q_c: (la * (w * tb).exp() + lb) / den_q,
        l_c: la,
        t_c: 0.0,
    };
    let mut s1 = first(l1, l2, t2);
    s1.t_c = t1;
    let mut s2 = first(l2, l1, t1);
    s2.t_c = t2;
    Ok(CompoundCycle { steps: [s1, s2] })
}

/// Symmetric in-place cycle: steps `+l` then `−l`, each lasting `t`; the
/// step-initial state negates every step.
pub fn idle_cycle(l: f64, t: f64, params: &WalkerParams) -> Result<CompoundCycle> {
    if !(l > 0.0) || !(t > 0.0) {
        return Err(Error::InvalidCycle(format!("idle cycle needs l > 0 and t > 0, got {l}, {t}")));
    }
    compound_two_step(l, t, -l, t, params)
}

/// Period that closes an idle cycle from `(p_c, q_c)`: `ln(p_c/q_c)/ω`.
pub fn idle_period(p_c: f64, q_c: f64, params: &WalkerParams) -> Result<f64> {
    let ratio = p_c / q_c;
    if !(ratio > 1.0) {
        return Err(Error::InvalidCycle(format!("idle cycle needs p_c/q_c > 1, got {ratio}")));
    }
    Ok(ratio.ln() / params.omega())
}

/// Iterates the step map with the cycle's fixed `(L_c, T_c)`; returns the
/// `k_steps` step-initial states starting with `pq0`.
pub fn open_loop_rollout(pq0: PqState, c: &CycleSpec, k_steps: usize, params: &WalkerParams) -> Result<Vec<PqState>> {
    let mut out = Vec::with_capacity(k_steps);
    let mut pq = pq0;
    for i in 0..k_steps {
        if i > 0 {
            pq = step_to_step(pq, c.l_c, c.t_c, params)?;
        }
        out.push(pq);
    }
    Ok(out)
}

/// Closed form of the `k`-th step-initial state (k ≥ 1) under open-loop
/// cycling.
pub fn open_loop_closed_form(pq1: PqState, c: &CycleSpec, k: usize, params: &WalkerParams) -> PqState {
    let n = k.saturating_sub(1) as f64;
    let wt = params.omega() * c.t_c;
    let p_fix = -c.l_c / (1.0 - (-wt).exp());
    let q_fix = c.l_c / wt.exp_m1();
    PqState {
        p: pq1.p - (pq1.p - p_fix) * (1.0 - (-n * wt).exp()),
        q: pq1.q + (pq1.q - q_fix) * (n * wt).exp_m1(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> WalkerParams {
        WalkerParams::default()
    }

    #[test]
    fn table_cycle() {
        let w = params();
        let c = simple_cycle_from_step(0.5, 0.4, &w).unwrap();
        assert!((c.p_c + 0.70016).abs() < 1e-5);
        assert!((c.q_c - 0.20016).abs() < 1e-5);
        assert_eq!(c.direction, Direction::Forward);
        assert!((c.v_c - 1.25).abs() < 1e-15);
        let next = step_to_step(c.pq(), c.l_c, c.t_c, &w).unwrap();
        assert!((next.p - c.p_c).abs() < 1e-12 && (next.q - c.q_c).abs() < 1e-12);

        let b = simple_cycle_from_step(-0.5, 0.4, &w).unwrap();
        assert!((b.p_c + c.p_c).abs() < 1e-15 && (b.q_c + c.q_c).abs() < 1e-15);
        assert_eq!(b.direction, Direction::Backward);

        assert!(simple_cycle_from_step(0.0, 0.4, &w).is_err());
        assert!(simple_cycle_from_step(0.5, 0.0, &w).is_err());
    }

    #[test]
    fn from_speed() {
        let w = params();
        let c = simple_cycle_from_speed(1.25, 0.5, &w).unwrap();
        assert!((c.t_c - 0.4).abs() < 1e-15);
        let c = simple_cycle_from_speed(1.75, 0.7, &w).unwrap();
        assert!((c.p_c + 0.98022).abs() < 1e-5 && (c.q_c - 0.28022).abs() < 1e-5, "{c:?}");
        let b = simple_cycle_from_speed(-1.25, -0.5, &w).unwrap();
        assert_eq!(b.direction, Direction::Backward);
        assert!(simple_cycle_from_speed(1.25, -0.5, &w).is_err());
        assert!(simple_cycle_from_speed(0.0, 0.5, &w).is_err());
    }

    #[test]
    fn from_pq_inverts_from_step() {
        let w = params();
        let c = simple_cycle_from_pq(-0.7, 0.2, &w).unwrap();
        assert!((c.l_c - 0.5).abs() < 1e-15);
        assert!((c.t_c - 0.40018).abs() < 1e-5);
        assert!(simple_cycle_from_pq(-0.1, 0.2, &w).is_err());
    }

    #[test]
    fn feasibility() {
        let w = params();
        let c = simple_cycle_from_step(0.5, 0.4, &w).unwrap();
        let r = cycle_feasible(&c, &w);
        assert!(r.feasible(), "{r:?}");
        assert!((r.t_min - 0.21667).abs() < 1e-5);

        let long = simple_cycle_from_step(0.8, 0.4, &w).unwrap();
        assert_eq!(cycle_feasible(&long, &w).violations, vec![CycleViolation::StepLength]);

        let fast = simple_cycle_from_step(0.5, 0.2, &w).unwrap();
        let r = cycle_feasible(&fast, &w);
        assert!(r.violations.contains(&CycleViolation::MinimumTime));
        assert!(r.violations.contains(&CycleViolation::LambertBoundary));
    }

    #[test]
    fn compound_reduces_to_simple() {
        let w = params();
        let cc = compound_two_step(0.5, 0.4, 0.5, 0.4, &w).unwrap();
        let c = simple_cycle_from_step(0.5, 0.4, &w).unwrap();
        for s in cc.steps {
            assert!((s.p_c - c.p_c).abs() < 1e-12 && (s.q_c - c.q_c).abs() < 1e-12);
        }
    }

    #[test]
    fn compound_closes() {
        let w = params();
        let cc = compound_two_step(0.6, 0.4, 0.4, 0.4, &w).unwrap();
        let [a, b] = cc.steps;
        let mid = step_to_step(a.pq(), a.l_c, a.t_c, &w).unwrap();
        assert!((mid.p - b.p_c).abs() < 1e-10 && (mid.q - b.q_c).abs() < 1e-10);
        let back = step_to_step(mid, b.l_c, b.t_c, &w).unwrap();
        assert!((back.p - a.p_c).abs() < 1e-10 && (back.q - a.q_c).abs() < 1e-10);

        let anti = compound_two_step(0.5, 0.35, -0.5, 0.35, &w).unwrap();
        assert_eq!(anti.net_displacement(), 0.0);
        assert!(compound_two_step(0.5, 0.0, 0.5, 0.4, &w).is_err());
    }

    #[test]
    fn idle_cycle_matches_sample() {
        let w = params();
        // sample pair from the idle-cycle figure
        let (p_c, q_c) = (0.358538, 0.141462);
        assert!((p_c + q_c - 0.5f64).abs() < 1e-12);
        let t = idle_period(p_c, q_c, &w).unwrap();
        assert!((t - 0.29708).abs() < 1e-5, "{t}");
        let idle = idle_cycle(0.5, 0.29709, &w).unwrap();
        let s = idle.steps[0];
        assert!((s.p_c - 0.35854).abs() < 2e-4 && (s.q_c - 0.14146).abs() < 2e-4, "{s:?}");
        let nxt = step_to_step(s.pq(), s.l_c, s.t_c, &w).unwrap();
        assert!((nxt.p + s.p_c).abs() < 1e-12 && (nxt.q + s.q_c).abs() < 1e-12);
        assert!(idle_cycle(-0.5, 0.3, &w).is_err());
    }

    #[test]
    fn rollout_examples() {
        let w = params();
        let c = simple_cycle_from_step(0.5, 0.4, &w).unwrap();
        for pq in open_loop_rollout(c.pq(), &c, 10, &w).unwrap() {
            assert!((pq.p - c.p_c).abs() < 1e-12 && (pq.q - c.q_c).abs() < 1e-12);
        }
        // p-offset decays by e^{-ωT_c} per step: after 3 steps from -0.5
        let seq = open_loop_rollout(PqState::new(-0.5, c.q_c), &c, 4, &w).unwrap();
        let expected = c.p_c + (-0.5 - c.p_c) * (-3.0 * w.omega() * c.t_c).exp();
        assert!((seq[3].p - expected).abs() < 1e-12);
        assert!((seq[3].p + 0.69548).abs() < 1e-5, "{:?}", seq[3]);
        // q-offset grows by e^{ωT_c} ≈ 3.498 per step
        let seq = open_loop_rollout(PqState::new(c.p_c, c.q_c + 0.01), &c, 4, &w).unwrap();
        assert!((seq[3].q - c.q_c - 0.428).abs() < 1e-3, "{:?}", seq[3]);
    }
}
