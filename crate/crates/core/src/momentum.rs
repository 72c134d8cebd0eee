//! Simplified walking model in convergent/divergent coordinates.
//!
//! Within one step the CoM offset `s = x − z_i` obeys `s̈ = ω² s`. The change
//! of variables `p = s − ṡ/ω`, `q = s + ṡ/ω` diagonalises it: `p` decays as
//! `e^{−ωt}` and `q` grows as `e^{ωt}`. Landing a new foot `L` ahead shifts
//! both components by `−L`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::WalkerParams;

/// Convergent (`p`) and divergent (`q`) components [m].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PqState {
    pub p: f64,
    pub q: f64,
}

impl PqState {
    pub const fn new(p: f64, q: f64) -> Self {
        Self { p, q }
    }

    /// `p·q`, conserved by the continuous flow.
    pub fn product(&self) -> f64 {
        self.p * self.q
    }

    /// CoM offset from the stance centre, `(p + q)/2`.
    pub fn offset(&self) -> f64 {
        0.5 * (self.p + self.q)
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_finite() && self.q.is_finite()
    }
}

/// CoM offset from the support centre and horizontal CoM velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PendulumState {
    /// `x − z_i` [m].
    pub s: f64,
    /// `ẋ` [m/s].
    pub sdot: f64,
}

impl PendulumState {
    pub const fn new(s: f64, sdot: f64) -> Self {
        Self { s, sdot }
    }
}

pub fn to_pq(st: PendulumState, params: &WalkerParams) -> PqState {
    let v = st.sdot / params.omega();
    PqState {
        p: st.s - v,
        q: st.s + v,
    }
}

pub fn from_pq(pq: PqState, params: &WalkerParams) -> PendulumState {
    PendulumState {
        s: 0.5 * (pq.q + pq.p),
        sdot: params.omega() * 0.5 * (pq.q - pq.p),
    }
}

/// Flows `pq0` forward by `t` seconds with the CoP at the support centre.
pub fn propagate_continuous(pq0: PqState, t: f64, params: &WalkerParams) -> Result<PqState> {
    propagate_with_cop(pq0, 0.0, t, params)
}

/// Flows `pq0` forward by `t` seconds with the CoP held at a constant shift
/// `dz` from the support centre: `ṗ = −ω(p − dz)`, `q̇ = ω(q − dz)`.
pub fn propagate_with_cop(pq0: PqState, dz: f64, t: f64, params: &WalkerParams) -> Result<PqState> {
    if !(t >= 0.0) {
        return Err(Error::NegativeDuration(t));
    }
    let grow = (params.omega() * t).exp();
    Ok(PqState {
        p: dz + (pq0.p - dz) / grow,
        q: dz + (pq0.q - dz) * grow,
    })
}

/// Landing transition: the new stance foot lies `l` ahead of the old one.
pub fn step_transition(pq_end: PqState, l: f64) -> PqState {
    PqState {
        p: pq_end.p - l,
        q: pq_end.q - l,
    }
}

/// Step-to-step map: step-initial state to the next step-initial state for a
/// step of displacement `l` landed after `t` seconds.
pub fn step_to_step(pq0: PqState, l: f64, t: f64, params: &WalkerParams) -> Result<PqState> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveDuration(t));
    }
    Ok(step_transition(propagate_continuous(pq0, t, params)?, l))
}

/// Back-propagates an instantaneous state measured `t_elapsed` into the step
/// to the equivalent step-initial state.
pub fn estimate_initial(pq_t: PqState, t_elapsed: f64, params: &WalkerParams) -> PqState {
    let grow = (params.omega() * t_elapsed).exp();
    PqState {
        p: pq_t.p * grow,
        q: pq_t.q / grow,
    }
}

/// Predicts the next step-initial state from the state measured `t_elapsed`
/// seconds into a step that will land after `t` seconds with displacement `l`.
pub fn predict_next_from_instant(
    pq_t: PqState,
    t_elapsed: f64,
    l: f64,
    t: f64,
    params: &WalkerParams,
) -> Result<PqState> {
    if !(t_elapsed >= 0.0) {
        return Err(Error::NegativeDuration(t_elapsed));
    }
    if t_elapsed > t {
        return Err(Error::ElapsedBeyondPeriod {
            elapsed: t_elapsed,
            period: t,
        });
    }
    step_to_step(estimate_initial(pq_t, t_elapsed, params), l, t, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> WalkerParams {
        WalkerParams::default()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn to_pq_examples() {
        let w = params();
        let pq = to_pq(PendulumState::new(1.0, 0.0), &w);
        assert_eq!(pq, PqState::new(1.0, 1.0));
        let pq = to_pq(PendulumState::new(0.0, w.omega()), &w);
        assert!(close(pq.p, -1.0, 1e-15) && close(pq.q, 1.0, 1e-15));
        // benchmark start: x0 = -0.1 on z_1 = 0, velocity from the figure header
        let pq = to_pq(PendulumState::new(-0.1, 1.2522), &w);
        assert!(close(pq.p, -0.5, 1e-4) && close(pq.q, 0.3, 1e-4));
    }

    #[test]
    fn from_pq_examples() {
        let w = params();
        assert_eq!(from_pq(PqState::new(1.0, 1.0), &w), PendulumState::new(1.0, 0.0));
        let st = from_pq(PqState::new(-1.0, 1.0), &w);
        assert!(close(st.s, 0.0, 1e-15) && close(st.sdot, 3.1304952, 1e-7));
        // s = (q+p)/2, sdot = ω(q−p)/2 = 3.1304951685 · 0.45
        let st = from_pq(PqState::new(-0.7, 0.2), &w);
        assert!(close(st.s, -0.25, 1e-15));
        assert!(close(st.sdot, 1.408722826, 1e-8));
    }

    #[test]
    fn propagate_examples() {
        let w = params();
        assert_eq!(propagate_continuous(PqState::new(1.0, 1.0), 0.0, &w).unwrap(), PqState::new(1.0, 1.0));
        let pq0 = PqState::new(-0.7, 0.2);
        let pq = propagate_continuous(pq0, 0.4, &w).unwrap();
        assert!(close(pq.p, -0.20011, 1e-5), "{pq:?}");
        assert!(close(pq.q, 0.69960, 1e-5), "{pq:?}");
        assert!(close(pq.product(), -0.14, 1e-15));
        assert!(matches!(
            propagate_continuous(pq0, -0.1, &w),
            Err(Error::NegativeDuration(_))
        ));
    }

    #[test]
    fn transition_examples() {
        assert_eq!(step_transition(PqState::new(0.5, 0.5), 0.0), PqState::new(0.5, 0.5));
        let pq = step_transition(PqState::new(-0.20011, 0.69960), 0.5);
        assert!(close(pq.p, -0.70011, 1e-12) && close(pq.q, 0.19960, 1e-12));
        let pq = step_transition(PqState::new(0.3, 0.3), -0.2);
        assert!(close(pq.p, 0.5, 1e-15) && close(pq.q, 0.5, 1e-15));
    }

    #[test]
    fn step_to_step_examples() {
        let w = params();
        let t_c = 3.5f64.ln() / w.omega();
        assert!(close(t_c, 0.40018, 1e-5));
        let pq = step_to_step(PqState::new(-0.7, 0.2), 0.5, t_c, &w).unwrap();
        assert!(close(pq.p, -0.7, 1e-12) && close(pq.q, 0.2, 1e-12));
        let pq = step_to_step(PqState::new(-0.5, 0.3), 0.5, 0.4, &w).unwrap();
        assert!(close(pq.p, -0.64294, 1e-5) && close(pq.q, 0.54941, 1e-5), "{pq:?}");
        let pq = step_to_step(PqState::new(0.3, -0.2), 0.0, 1e-300, &w).unwrap();
        assert!(close(pq.p, 0.3, 1e-15) && close(pq.q, -0.2, 1e-15));
        assert!(step_to_step(PqState::new(0.3, -0.2), 0.1, 0.0, &w).is_err());
    }

    #[test]
    fn instant_predictor() {
        let w = params();
        let pq0 = PqState::new(-0.5, 0.3);
        let (l, t) = (0.5, 0.4);
        let direct = step_to_step(pq0, l, t, &w).unwrap();
        let at_zero = predict_next_from_instant(pq0, 0.0, l, t, &w).unwrap();
        assert_eq!(direct, at_zero);
        for k in 1..=8 {
            let te = t * k as f64 / 8.0;
            let pq_t = propagate_continuous(pq0, te, &w).unwrap();
            let pred = predict_next_from_instant(pq_t, te, l, t, &w).unwrap();
            assert!(close(pred.p, direct.p, 1e-13) && close(pred.q, direct.q, 1e-13));
        }
        // mid-step kick in q shows up amplified by the remaining growth
        let dq = 0.01;
        let mut mid = propagate_continuous(pq0, t / 2.0, &w).unwrap();
        mid.q += dq;
        let pred = predict_next_from_instant(mid, t / 2.0, l, t, &w).unwrap();
        let expected_shift = dq * (w.omega() * t / 2.0).exp();
        assert!(close(pred.q - direct.q, expected_shift, 1e-13));
        assert!(close(pred.p, direct.p, 1e-13));
        assert!(predict_next_from_instant(pq0, 0.5, l, t, &w).is_err());
    }

    #[test]
    fn constant_cop_shift_moves_fixed_point() {
        let w = params();
        let pq = propagate_with_cop(PqState::new(0.1, 0.1), 0.1, 0.7, &w).unwrap();
        assert!(close(pq.p, 0.1, 1e-15) && close(pq.q, 0.1, 1e-15));
    }
}
