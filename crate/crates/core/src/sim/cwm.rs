//! Deviation of the complete walking model from the simplified one.
//!
//! The divergent/convergent pair is driven by vertical bobbing through
//! `f1 = ÿ/y` and by angular momentum through `f2 = Ḣ/(M y)`:
//!
//! ```text
//! ṗ = −(ω + f1/2ω) p − (f1/2ω) q − f2/ω
//! q̇ =  (ω + f1/2ω) q + (f1/2ω) p + f2/ω,    ω = √(g/y(t))
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cycles::CycleSpec;
use crate::error::{Error, Result};
use crate::momentum::{propagate_continuous, step_transition, PqState};
use crate::params::WalkerParams;

/// Harmonic height and angular-momentum profiles for one case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CwmProfile {
    pub a_y: f64,
    pub phi_y: f64,
    pub a_h: f64,
    pub phi_h: f64,
}

impl CwmProfile {
    pub const ZERO: Self = Self { a_y: 0.0, phi_y: 0.0, a_h: 0.0, phi_h: 0.0 };

    /// Cases 1–2 bob the CoM (human-like and inverted phase), cases 3–4
    /// swing the angular momentum with an exaggerated amplitude.
    pub fn case(id: u8, c: &CycleSpec, params: &WalkerParams) -> Result<Self> {
        let a_h = 0.2 * params.mass() * c.v_c.abs() * params.h();
        Ok(match id {
            1 => Self { a_y: 0.025, phi_y: -PI / 2.0, ..Self::ZERO },
            2 => Self { a_y: 0.025, phi_y: PI / 2.0, ..Self::ZERO },
            3 => Self { a_h, phi_h: 0.0, ..Self::ZERO },
            4 => Self { a_h, phi_h: PI, ..Self::ZERO },
            other => return Err(Error::UnknownCase(other)),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CwmSample {
    pub t: f64,
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepDeviation {
    pub step: usize,
    pub start: PqState,
    pub end_cwm: PqState,
    pub end_swm: PqState,
    /// `|Δp| + |Δq|` between the two end states.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationTrace {
    pub profile: CwmProfile,
    pub samples: Vec<CwmSample>,
    pub steps: Vec<StepDeviation>,
}

fn rhs(pq: [f64; 2], t: f64, prof: &CwmProfile, period: f64, params: &WalkerParams) -> [f64; 2] {
    let w_ref = 2.0 * PI / period;
    let sy = (w_ref * t + prof.phi_y).sin();
    let y = params.h() + prof.a_y * sy;
    let yddot = -prof.a_y * w_ref * w_ref * sy;
    let hdot = prof.a_h * w_ref * (w_ref * t + prof.phi_h).cos();
    let f1 = yddot / y;
    let f2 = hdot / (params.mass() * y);
    let w = (params.g() / y).sqrt();
    let a = w + f1 / (2.0 * w);
    let b = f1 / (2.0 * w);
    [-a * pq[0] - b * pq[1] - f2 / w, a * pq[1] + b * pq[0] + f2 / w]
}

/// Integrates the complete model from the cycle start for `n_steps` cycle
/// steps (RK4, step `dt`) and compares each step end with the simplified
/// prediction from the same step-initial state.
pub fn cwm_rollout(
    prof: CwmProfile,
    c: &CycleSpec,
    n_steps: usize,
    dt: f64,
    params: &WalkerParams,
) -> Result<DeviationTrace> {
    if !(dt > 0.0) {
        return Err(Error::NonPositiveDuration(dt));
    }
    let n = (c.t_c / dt).ceil() as usize;
    let h = c.t_c / n as f64;
    let mut pq = c.pq();
    let mut samples = Vec::with_capacity(n_steps * n + 1);
    let mut steps = Vec::with_capacity(n_steps);
    let mut t_global = 0.0;
    for step in 1..=n_steps {
        let start = pq;
        let mut y = [pq.p, pq.q];
        for k in 0..n {
            let t = k as f64 * h;
            samples.push(CwmSample { t: t_global + t, p: y[0], q: y[1] });
            let f = |v: [f64; 2], tt: f64| rhs(v, tt, &prof, c.t_c, params);
            let k1 = f(y, t);
            let k2 = f([y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]], t + h / 2.0);
            let k3 = f([y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]], t + h / 2.0);
            let k4 = f([y[0] + h * k3[0], y[1] + h * k3[1]], t + h);
            for j in 0..2 {
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
        t_global += c.t_c;
        let end_cwm = PqState::new(y[0], y[1]);
        let end_swm = propagate_continuous(start, c.t_c, params)?;
        steps.push(StepDeviation {
            step,
            start,
            end_cwm,
            end_swm,
            deviation: (end_cwm.p - end_swm.p).abs() + (end_cwm.q - end_swm.q).abs(),
        });
        pq = step_transition(end_cwm, c.l_c);
    }
    samples.push(CwmSample { t: t_global, p: pq.p, q: pq.q });
    Ok(DeviationTrace { profile: prof, samples, steps })
}

/// Runs one of the four harmonic cases.
pub fn cwm_deviation_rollout(case: u8, c: &CycleSpec, n_steps: usize, params: &WalkerParams) -> Result<DeviationTrace> {
    cwm_rollout(CwmProfile::case(case, c, params)?, c, n_steps, 1e-4, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::simple_cycle_from_step;

    #[test]
    fn zero_amplitude_is_simplified_model() {
        let w = WalkerParams::default();
        let c = simple_cycle_from_step(0.5, 0.4, &w).unwrap();
        let tr = cwm_rollout(CwmProfile::ZERO, &c, 3, 1e-4, &w).unwrap();
        for s in &tr.steps {
            assert!(s.deviation < 1e-9, "{s:?}");
        }
    }

    #[test]
    fn cases_deviate() {
        let w = WalkerParams::default();
        let c = simple_cycle_from_step(0.5, 0.4, &w).unwrap();
        for case in 1..=4 {
            let tr = cwm_deviation_rollout(case, &c, 1, &w).unwrap();
            let d = tr.steps[0].deviation;
            assert!(d > 1e-4 && d < 0.5, "case {case}: {d}");
        }
        let tr = cwm_deviation_rollout(1, &c, 1, &w).unwrap();
        let s = tr.steps[0];
        assert!((s.end_cwm.product() - s.start.product()).abs() > 1e-4);
        assert!(cwm_deviation_rollout(5, &c, 1, &w).is_err());
    }
}
