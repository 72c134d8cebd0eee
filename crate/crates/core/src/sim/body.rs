//! Rigid torso on massless legs: dynamics, references and the momentum
//! controller.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::momentum::{to_pq, PendulumState, PqState};
use crate::params::WalkerParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidBodyState {
    pub x: f64,
    pub xdot: f64,
    pub y: f64,
    pub ydot: f64,
    pub theta: f64,
    pub thetadot: f64,
    pub z_stance: f64,
    pub z_swing: f64,
    pub t_in_step: f64,
    /// One-based index of the current step.
    pub step_index: usize,
}

impl RigidBodyState {
    /// Horizontal state relative to the stance foot in `(p, q)` form.
    pub fn pq(&self, params: &WalkerParams) -> PqState {
        to_pq(PendulumState::new(self.x - self.z_stance, self.xdot), params)
    }

    /// Angular momentum of the single rigid torso.
    pub fn angular_momentum(&self, params: &WalkerParams) -> f64 {
        params.inertia() * self.thetadot
    }

    fn vector(&self) -> [f64; 6] {
        [self.x, self.xdot, self.y, self.ydot, self.theta, self.thetadot]
    }

    fn with_vector(&self, v: [f64; 6]) -> Self {
        Self {
            x: v[0],
            xdot: v[1],
            y: v[2],
            ydot: v[3],
            theta: v[4],
            thetadot: v[5],
            ..*self
        }
    }
}

/// Planar force and torque on the torso.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Wrench {
    pub fx: f64,
    pub fy: f64,
    pub tz: f64,
}

impl Wrench {
    pub fn new(fx: f64, fy: f64, tz: f64) -> Self {
        Self { fx, fy, tz }
    }

    pub fn scaled(self, k: f64) -> Self {
        Self::new(k * self.fx, k * self.fy, k * self.tz)
    }
}

/// A momentum impulse spread evenly over a window inside one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpulseEvent {
    /// Linear impulses [N·s] and angular impulse [N·m·s].
    pub d_lx: f64,
    pub d_ly: f64,
    pub d_hz: f64,
    pub step_index: usize,
    pub onset_in_step: f64,
    pub duration: f64,
}

impl ImpulseEvent {
    /// Forward-down push with a clockwise twist during the seventh step.
    pub fn standard(scale: f64) -> Self {
        Self {
            d_lx: 10.0 * scale,
            d_ly: -10.0 * scale,
            d_hz: -10.0 * scale,
            step_index: 7,
            onset_in_step: 0.15,
            duration: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) {
            return Err(Error::param("impulse.duration", "must be > 0"));
        }
        if !(self.onset_in_step >= 0.0) {
            return Err(Error::param("impulse.onset", "must be ≥ 0"));
        }
        if self.step_index == 0 {
            return Err(Error::param("impulse.step", "steps count from 1"));
        }
        Ok(())
    }

    /// Mean force over `[t0, t1]` of step `step`; integrates exactly to the
    /// impulse whatever the time grid.
    pub fn mean_wrench(&self, step: usize, t0: f64, t1: f64) -> Wrench {
        if step != self.step_index || t1 <= t0 {
            return Wrench::default();
        }
        let overlap = t1.min(self.onset_in_step + self.duration) - t0.max(self.onset_in_step);
        if overlap <= 0.0 {
            return Wrench::default();
        }
        let k = overlap / (self.duration * (t1 - t0));
        Wrench::new(self.d_lx * k, self.d_ly * k, self.d_hz * k)
    }
}

/// Periodic vertical and angular-momentum references, phase-locked to the
/// time inside the step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTrajectories {
    pub a_y: f64,
    pub phi_y: f64,
    pub a_h: f64,
    pub phi_h: f64,
    /// Period of the references [s].
    pub period: f64,
}

/// Reference values at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefSample {
    pub y: f64,
    pub ydot: f64,
    pub yddot: f64,
    pub theta: f64,
    pub thetadot: f64,
    pub thetaddot: f64,
}

impl ReferenceTrajectories {
    pub fn flat(period: f64) -> Self {
        Self { a_y: 0.0, phi_y: 0.0, a_h: 0.0, phi_h: 0.0, period }
    }

    /// Human-like bobbing and a normal-walking angular-momentum swing for a
    /// cycle of mean speed `v_c`.
    pub fn walking(period: f64, v_c: f64, params: &WalkerParams) -> Self {
        Self {
            a_y: 0.025,
            phi_y: -PI / 2.0,
            a_h: 0.05 * params.mass() * v_c.abs() * params.h(),
            phi_h: 0.0,
            period,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_y >= 0.0 && self.a_h >= 0.0) {
            return Err(Error::param("refs", "amplitudes must be ≥ 0"));
        }
        if !(self.period > 0.0) {
            return Err(Error::param("refs.period", "must be > 0"));
        }
        Ok(())
    }

    /// The angle reference integrates `H/I` with zero mean.
    pub fn sample(&self, t: f64, params: &WalkerParams) -> RefSample {
        let w = 2.0 * PI / self.period;
        let (sy, cy) = (w * t + self.phi_y).sin_cos();
        let (sh, ch) = (w * t + self.phi_h).sin_cos();
        let i = params.inertia();
        RefSample {
            y: params.h() + self.a_y * sy,
            ydot: self.a_y * w * cy,
            yddot: -self.a_y * w * w * sy,
            theta: -self.a_h / (i * w) * ch,
            thetadot: self.a_h / i * sh,
            thetaddot: self.a_h * w / i * ch,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gains {
    pub kp_y: f64,
    pub kv_y: f64,
    pub kp_theta: f64,
    pub kv_theta: f64,
}

impl Default for Gains {
    /// Critically damped at 10 rad/s.
    fn default() -> Self {
        Self { kp_y: 100.0, kv_y: 20.0, kp_theta: 100.0, kv_theta: 20.0 }
    }
}

/// Vertical PD with gravity feedforward, angular PD on the torso, and the
/// horizontal force that places the CoP at `z_des`.
pub fn momentum_tracking_forces(
    st: &RigidBodyState,
    r: &RefSample,
    z_des: f64,
    gains: &Gains,
    params: &WalkerParams,
) -> Result<Wrench> {
    if !(st.y > 0.0) {
        return Err(Error::NonPositiveHeight(st.y));
    }
    let fy = params.mass()
        * (params.g() + r.yddot + gains.kv_y * (r.ydot - st.ydot) + gains.kp_y * (r.y - st.y));
    let tz = params.inertia()
        * (r.thetaddot + gains.kv_theta * (r.thetadot - st.thetadot) + gains.kp_theta * (r.theta - st.theta));
    let fx = (tz + (st.x - z_des) * fy) / st.y;
    Ok(Wrench::new(fx, fy, tz))
}

fn derivative(v: &[f64; 6], f: &Wrench, params: &WalkerParams) -> [f64; 6] {
    let m = params.mass();
    [v[1], f.fx / m, v[3], f.fy / m - params.g(), v[5], f.tz / params.inertia()]
}

/// One RK4 step of the torso under total force `control + disturbance`.
/// `control` is re-evaluated at every stage; the disturbance is held.
pub fn integrate_torso<F>(
    st: &RigidBodyState,
    mut control: F,
    disturbance: Wrench,
    dt: f64,
    params: &WalkerParams,
) -> Result<RigidBodyState>
where
    F: FnMut(&RigidBodyState, f64) -> Result<Wrench>,
{
    if !(dt > 0.0) {
        return Err(Error::NonPositiveDuration(dt));
    }
    let mut rhs = |v: [f64; 6], t: f64| -> Result<[f64; 6]> {
        let stage = st.with_vector(v);
        let u = control(&stage, t)?;
        let total = Wrench::new(u.fx + disturbance.fx, u.fy + disturbance.fy, u.tz + disturbance.tz);
        Ok(derivative(&v, &total, params))
    };
    let v0 = st.vector();
    let t0 = st.t_in_step;
    let add = |a: &[f64; 6], k: &[f64; 6], h: f64| std::array::from_fn::<f64, 6, _>(|i| a[i] + h * k[i]);
    let k1 = rhs(v0, t0)?;
    let k2 = rhs(add(&v0, &k1, dt / 2.0), t0 + dt / 2.0)?;
    let k3 = rhs(add(&v0, &k2, dt / 2.0), t0 + dt / 2.0)?;
    let k4 = rhs(add(&v0, &k3, dt), t0 + dt)?;
    let v = std::array::from_fn(|i| v0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    let mut out = st.with_vector(v);
    out.t_in_step = t0 + dt;
    Ok(out)
}
