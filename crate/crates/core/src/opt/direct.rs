//! Exact one-step solves towards a target step-initial state.

use serde::{Deserialize, Serialize};

use crate::cycles::CycleSpec;
use crate::error::{Error, Result};
use crate::momentum::{step_to_step, PqState};
use crate::params::WalkerParams;

/// A `(T, L)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepVars {
    pub t: f64,
    pub l: f64,
}

/// Solves `step_to_step(pq0, L, T) = target` for `(T, L)`.
///
/// With `u = e^{ωT}` the difference of the two step equations gives
/// `q0 u² − (q* − p*) u − p0 = 0`. Only roots with `u > 1` are returned,
/// smaller root first.
pub fn direct_target_solve(pq0: PqState, target: PqState, params: &WalkerParams) -> Vec<StepVars> {
    let (p0, q0) = (pq0.p, pq0.q);
    let gap = target.q - target.p;
    let disc = gap * gap + 4.0 * p0 * q0;
    if disc < 0.0 || q0 == 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let mut roots = [(gap - sq) / (2.0 * q0), (gap + sq) / (2.0 * q0)];
    roots.sort_by(f64::total_cmp);
    roots
        .into_iter()
        .filter(|&u| u > 1.0 + 1e-12)
        .map(|u| StepVars {
            t: u.ln() / params.omega(),
            l: q0 * u - target.q,
        })
        .collect()
}

/// Outcome of a guided sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuidedSequence {
    pub steps: Vec<StepVars>,
    pub targets: Vec<PqState>,
    pub states: Vec<PqState>,
    /// Index of the first step with no admissible solve.
    pub failed_at: Option<usize>,
}

/// Interpolated targets `x*_{i+1} = x*_i + K_i (x_c − x*_i)` solved one step
/// at a time; the candidate closest to `(T_c, L_c)` is taken.
pub fn guided_target_sequence(
    pq0: PqState,
    c: &CycleSpec,
    k1: &[f64],
    k2: &[f64],
    params: &WalkerParams,
) -> Result<GuidedSequence> {
    if k1.len() != k2.len() {
        return Err(Error::param("gains", "K1 and K2 need equal length"));
    }
    if let Some(k) = k1.iter().chain(k2).find(|k| !(**k > 0.0 && **k < 2.0)) {
        return Err(Error::param("gains", format!("every K must lie in (0, 2), got {k}")));
    }
    let mut out = GuidedSequence {
        steps: Vec::new(),
        targets: Vec::new(),
        states: vec![pq0],
        failed_at: None,
    };
    let mut pq = pq0;
    let mut target = pq0;
    for (i, (a, b)) in k1.iter().zip(k2).enumerate() {
        target = PqState::new(target.p + a * (c.p_c - target.p), target.q + b * (c.q_c - target.q));
        out.targets.push(target);
        let best = direct_target_solve(pq, target, params).into_iter().min_by(|x, y| {
            let d = |s: &StepVars| (s.t - c.t_c).abs() + (s.l - c.l_c).abs();
            d(x).total_cmp(&d(y))
        });
        let Some(s) = best else {
            out.failed_at = Some(i);
            break;
        };
        pq = step_to_step(pq, s.l, s.t, params)?;
        out.steps.push(s);
        out.states.push(pq);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::simple_cycle_from_step;

    #[test]
    fn on_cycle_solve() {
        let w = WalkerParams::default();
        let pq = PqState::new(-0.7, 0.2);
        let sols = direct_target_solve(pq, pq, &w);
        assert_eq!(sols.len(), 1);
        assert!((sols[0].t - 3.5f64.ln() / w.omega()).abs() < 1e-12);
        assert!((sols[0].t - 0.40018).abs() < 1e-5);
        assert!((sols[0].l - 0.5).abs() < 1e-12);
    }

    #[test]
    fn negative_discriminant_is_empty() {
        let w = WalkerParams::default();
        // (q − p)²/4 = 0.01 < −p0 q0 = 0.25
        let pq = PqState::new(-0.5, 0.5);
        assert!(direct_target_solve(pq, PqState::new(0.0, 0.2), &w).is_empty());
    }

    #[test]
    fn candidates_reach_target() {
        let w = WalkerParams::default();
        let pq0 = PqState::new(-0.5, 0.3);
        let target = PqState::new(-0.65, 0.25);
        let sols = direct_target_solve(pq0, target, &w);
        assert!(!sols.is_empty());
        for s in sols {
            let got = step_to_step(pq0, s.l, s.t, &w).unwrap();
            assert!((got.p - target.p).abs() < 1e-10 && (got.q - target.q).abs() < 1e-10);
        }
    }

    #[test]
    fn guided_from_cycle_and_halving() {
        let w = WalkerParams::default();
        let c = simple_cycle_from_step(0.5, 0.4, &w).unwrap();
        let g = guided_target_sequence(c.pq(), &c, &[1.0], &[1.0], &w).unwrap();
        assert_eq!(g.steps.len(), 1);
        assert!((g.steps[0].t - c.t_c).abs() < 1e-9 && (g.steps[0].l - c.l_c).abs() < 1e-9);

        let g = guided_target_sequence(PqState::new(-0.5, 0.3), &c, &[0.5; 6], &[0.5; 6], &w).unwrap();
        let (mut gp, mut gq) = ((-0.5 - c.p_c).abs(), (0.3 - c.q_c).abs());
        for t in &g.targets {
            let (np, nq) = ((t.p - c.p_c).abs(), (t.q - c.q_c).abs());
            assert!((np - 0.5 * gp).abs() < 1e-12 && (nq - 0.5 * gq).abs() < 1e-12);
            (gp, gq) = (np, nq);
        }
        assert!(guided_target_sequence(c.pq(), &c, &[2.0], &[1.0], &w).is_err());
    }
}
