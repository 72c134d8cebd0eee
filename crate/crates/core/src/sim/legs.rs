//! Stance-leg kinematics and Jacobian-transpose torques.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::body::{RigidBodyState, Wrench};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegGeometry {
    /// Shank and thigh lengths [m].
    pub l1: f64,
    pub l2: f64,
}

impl Default for LegGeometry {
    /// Sized so that a 1 m stance height reaches 0.75 m steps.
    fn default() -> Self {
        Self { l1: 0.534, l2: 0.534 }
    }
}

impl LegGeometry {
    /// Longest step with both legs fully stretched at CoM height `h`.
    pub fn max_step(&self, h: f64) -> Result<f64> {
        let reach = self.l1 + self.l2;
        if reach < h {
            return Err(Error::Unreachable { distance: h, reach });
        }
        Ok(2.0 * (reach * reach - h * h).sqrt())
    }
}

/// Ankle, knee and hip angles `(q1, q2, q3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointAngles {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

/// Jacobian of `(x, y, θ)` with respect to the joint angles.
pub fn leg_jacobian(a: &JointAngles, legs: &LegGeometry) -> Matrix3<f64> {
    let (s1, c1) = a.q1.sin_cos();
    let (s12, c12) = (a.q1 + a.q2).sin_cos();
    Matrix3::new(
        -legs.l1 * s1 - legs.l2 * s12, -legs.l2 * s12, 0.0,
        legs.l1 * c1 + legs.l2 * c12, legs.l2 * c12, 0.0,
        1.0, 1.0, 1.0,
    )
}

/// Hip position and torso angle for given joint angles, relative to the foot.
pub fn forward_kinematics(a: &JointAngles, legs: &LegGeometry) -> Vector3<f64> {
    Vector3::new(
        legs.l1 * a.q1.cos() + legs.l2 * (a.q1 + a.q2).cos(),
        legs.l1 * a.q1.sin() + legs.l2 * (a.q1 + a.q2).sin(),
        a.q1 + a.q2 + a.q3,
    )
}

/// Joint angles placing the hip at `(dx, dy)` from the foot with torso angle
/// `theta`; the knee bends with `q2 ≤ 0`.
pub fn inverse_kinematics(dx: f64, dy: f64, theta: f64, legs: &LegGeometry) -> Result<JointAngles> {
    let r2 = dx * dx + dy * dy;
    let reach = legs.l1 + legs.l2;
    if r2.sqrt() > reach || r2.sqrt() < (legs.l1 - legs.l2).abs() {
        return Err(Error::Unreachable { distance: r2.sqrt(), reach });
    }
    let c2 = ((r2 - legs.l1 * legs.l1 - legs.l2 * legs.l2) / (2.0 * legs.l1 * legs.l2)).clamp(-1.0, 1.0);
    let q2 = -c2.acos();
    let q1 = dy.atan2(dx) - (legs.l2 * q2.sin()).atan2(legs.l1 + legs.l2 * q2.cos());
    Ok(JointAngles { q1, q2, q3: theta - q1 - q2 })
}

/// `τ = Jᵀ [Fx, Fy, Tz]` at given joint angles.
pub fn torques_at(a: &JointAngles, legs: &LegGeometry, f: &Wrench) -> [f64; 3] {
    let tau = leg_jacobian(a, legs).transpose() * Vector3::new(f.fx, f.fy, f.tz);
    [tau[0], tau[1], tau[2]]
}

/// Stance-leg torques for the current torso state. With the horizontal force
/// from the momentum controller the ankle torque equals `dz_des·Fy`.
pub fn joint_torques(st: &RigidBodyState, f: &Wrench, legs: &LegGeometry) -> Result<[f64; 3]> {
    let a = inverse_kinematics(st.x - st.z_stance, st.y, st.theta, legs)?;
    Ok(torques_at(&a, legs, f))
}
