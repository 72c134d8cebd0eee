//! Composite goal + penalty objective over the step variables `x = (T, L)`.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::cycles::CycleSpec;
use crate::error::{Error, Result};
use crate::momentum::PqState;
use crate::params::WalkerParams;

use super::OptimizerConfig;

/// Value, gradient and Hessian of a scalar function of `(T, L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: Vector2<f64>,
    pub hess: Matrix2<f64>,
}

impl Jet {
    pub fn zero() -> Self {
        Self {
            value: 0.0,
            grad: Vector2::zeros(),
            hess: Matrix2::zeros(),
        }
    }

    fn constant(value: f64) -> Self {
        Self { value, ..Self::zero() }
    }

    fn var_t(t: f64) -> Self {
        Self {
            value: t,
            grad: Vector2::new(1.0, 0.0),
            hess: Matrix2::zeros(),
        }
    }

    fn var_l(l: f64) -> Self {
        Self {
            value: l,
            grad: Vector2::new(0.0, 1.0),
            hess: Matrix2::zeros(),
        }
    }

    fn add(self, o: Jet) -> Jet {
        Jet {
            value: self.value + o.value,
            grad: self.grad + o.grad,
            hess: self.hess + o.hess,
        }
    }

    fn scale(self, k: f64) -> Jet {
        Jet {
            value: k * self.value,
            grad: k * self.grad,
            hess: k * self.hess,
        }
    }

    fn square(self) -> Jet {
        Jet {
            value: self.value * self.value,
            grad: 2.0 * self.value * self.grad,
            hess: 2.0 * (self.grad * self.grad.transpose() + self.value * self.hess),
        }
    }

    /// Outer composition `f(self)` given `f, f', f''` at `self.value`.
    fn compose(self, f: f64, df: f64, d2f: f64) -> Jet {
        Jet {
            value: f,
            grad: df * self.grad,
            hess: d2f * self.grad * self.grad.transpose() + df * self.hess,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalKind {
    /// `q0 e^{ωT} − L`
    NextDivergent,
    StepTime,
    StepLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoalSpec {
    pub kind: GoalKind,
    pub g_opt: f64,
    pub dg_max: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyKind {
    LenSqMax,
    LenSqMin,
    D1Sq,
    D2Sq,
    VswingSq,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub kind: PenaltyKind,
    pub h_ext: f64,
    pub dh_min: f64,
    /// `−1` bounds from above, `+1` from below.
    pub dir: f64,
}

impl PenaltySpec {
    /// Whether the raw constraint `dir·h ≥ dir·h_ext` is violated.
    pub fn violated(&self, h: f64) -> bool {
        self.dir * (h - self.h_ext) < 0.0
    }
}

/// `½(g − g_opt)²/Δg²` composed with `g`.
pub fn goal_value_grad_hess(spec: &GoalSpec, g: &Jet) -> Jet {
    let d = spec.dg_max * spec.dg_max;
    let r = g.value - spec.g_opt;
    g.compose(0.5 * r * r / d, r / d, 1.0 / d)
}

/// `½ max(0, 1 − dir(h − h_ext)/Δh)²` composed with `h`; zero once `h` is
/// at least `Δh` inside its bound.
pub fn penalty_value_grad_hess(spec: &PenaltySpec, h: &Jet) -> Jet {
    let m = 1.0 - spec.dir * (h.value - spec.h_ext) / spec.dh_min;
    if m <= 0.0 {
        return Jet::zero();
    }
    h.compose(
        0.5 * m * m,
        -spec.dir / spec.dh_min * m,
        1.0 / (spec.dh_min * spec.dh_min),
    )
}

/// The assembled objective `U(T, L)` for one planning instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub pq0: PqState,
    pub prev_l: f64,
    pub goals: Vec<GoalSpec>,
    pub penalties: Vec<PenaltySpec>,
    pub penalty_weight: f64,
    omega: f64,
    t_0: f64,
}

/// Goal set targeting the cycle; `near` enables the length and time terms.
pub fn cycle_goals(c: &CycleSpec, near: bool, cfg: &OptimizerConfig) -> Vec<GoalSpec> {
    let r = if near { cfg.weights_near } else { [cfg.weights_near[0], cfg.far_tie_break, cfg.far_tie_break] };
    vec![
        GoalSpec { kind: GoalKind::NextDivergent, g_opt: c.q_c, dg_max: cfg.dg_max[0], weight: r[0] },
        GoalSpec { kind: GoalKind::StepTime, g_opt: c.t_c, dg_max: cfg.dg_max[1], weight: r[1] },
        GoalSpec { kind: GoalKind::StepLength, g_opt: c.l_c, dg_max: cfg.dg_max[2], weight: r[2] },
    ]
}

/// Step length, foot-distance and swing-speed penalties.
pub fn walker_penalties(cfg: &OptimizerConfig, params: &WalkerParams) -> Vec<PenaltySpec> {
    let upper = |kind, h_ext: f64| PenaltySpec { kind, h_ext, dh_min: cfg.dh_fraction * h_ext, dir: -1.0 };
    let half = 0.5 * params.l_max();
    let mut out = vec![upper(PenaltyKind::LenSqMax, params.l_max().powi(2))];
    if let Some(l_min) = cfg.l_min {
        let h_ext = l_min * l_min;
        out.push(PenaltySpec { kind: PenaltyKind::LenSqMin, h_ext, dh_min: cfg.dh_fraction * h_ext, dir: 1.0 });
    }
    out.push(upper(PenaltyKind::D1Sq, half * half));
    out.push(upper(PenaltyKind::D2Sq, half * half));
    out.push(upper(PenaltyKind::VswingSq, params.v_max().powi(2)));
    out
}

pub fn assemble_objective(
    pq0: PqState,
    prev_l: f64,
    goals: Vec<GoalSpec>,
    penalties: Vec<PenaltySpec>,
    cfg: &OptimizerConfig,
    params: &WalkerParams,
) -> Result<Objective> {
    for g in &goals {
        if !(g.dg_max > 0.0) || !(g.weight >= 0.0) {
            return Err(Error::param("goal", format!("needs dg_max > 0 and weight ≥ 0: {g:?}")));
        }
    }
    for p in &penalties {
        if !(p.dh_min > 0.0) || p.dir.abs() != 1.0 {
            return Err(Error::param("penalty", format!("needs dh_min > 0 and dir = ±1: {p:?}")));
        }
    }
    Ok(Objective {
        pq0,
        prev_l,
        goals,
        penalties,
        penalty_weight: cfg.penalty_weight,
        omega: params.omega(),
        t_0: params.t_0(),
    })
}

impl Objective {
    /// `D1 = (p0 e^{−ωT} + q0 e^{ωT})/2`, the CoM offset at landing.
    pub fn d1(&self, t: f64) -> Jet {
        let w = self.omega;
        let (a, b) = ((w * t).exp(), (-w * t).exp());
        let (p0, q0) = (self.pq0.p, self.pq0.q);
        Jet {
            value: 0.5 * (p0 * b + q0 * a),
            grad: Vector2::new(0.5 * w * (q0 * a - p0 * b), 0.0),
            hess: Matrix2::new(0.5 * w * w * (q0 * a + p0 * b), 0.0, 0.0, 0.0),
        }
    }

    pub fn goal_jet(&self, kind: GoalKind, t: f64, l: f64) -> Jet {
        match kind {
            GoalKind::NextDivergent => {
                let w = self.omega;
                let qa = self.pq0.q * (w * t).exp();
                Jet {
                    value: qa - l,
                    grad: Vector2::new(w * qa, -1.0),
                    hess: Matrix2::new(w * w * qa, 0.0, 0.0, 0.0),
                }
            }
            GoalKind::StepTime => Jet::var_t(t),
            GoalKind::StepLength => Jet::var_l(l),
        }
    }

    /// Constrained quantity `h(T, L)` before squaring.
    pub fn constraint_jet(&self, kind: PenaltyKind, t: f64, l: f64) -> Jet {
        match kind {
            PenaltyKind::LenSqMax | PenaltyKind::LenSqMin => Jet::var_l(l),
            PenaltyKind::D1Sq => self.d1(t),
            PenaltyKind::D2Sq => Jet::var_l(l).add(self.d1(t).scale(-1.0)),
            PenaltyKind::VswingSq => {
                let s0 = 0.5 * (self.pq0.p + self.pq0.q);
                // N = L_prev + L − (D1 − s0), V = N / (T − T0)
                let n = Jet::constant(self.prev_l + s0)
                    .add(Jet::var_l(l))
                    .add(self.d1(t).scale(-1.0));
                let d = t - self.t_0;
                let v = n.value / d;
                let v_t = n.grad[0] / d - n.value / (d * d);
                let v_tt = n.hess[(0, 0)] / d - 2.0 * n.grad[0] / (d * d) + 2.0 * n.value / (d * d * d);
                let v_tl = -1.0 / (d * d);
                Jet {
                    value: v,
                    grad: Vector2::new(v_t, 1.0 / d),
                    hess: Matrix2::new(v_tt, v_tl, v_tl, 0.0),
                }
            }
        }
    }

    fn check_domain(&self, x: &Vector2<f64>) -> Result<()> {
        if !(x[0] > self.t_0) || !x[1].is_finite() {
            return Err(Error::ObjectiveDomain { t: x[0], t0: self.t_0 });
        }
        Ok(())
    }

    pub fn eval(&self, x: &Vector2<f64>) -> Result<Jet> {
        self.check_domain(x)?;
        let (t, l) = (x[0], x[1]);
        let mut u = Jet::zero();
        for g in &self.goals {
            if g.weight != 0.0 {
                u = u.add(goal_value_grad_hess(g, &self.goal_jet(g.kind, t, l)).scale(g.weight));
            }
        }
        for p in &self.penalties {
            let h = self.constraint_jet(p.kind, t, l).square();
            u = u.add(penalty_value_grad_hess(p, &h).scale(self.penalty_weight));
        }
        Ok(u)
    }

    pub fn value(&self, x: &Vector2<f64>) -> Result<f64> {
        self.eval(x).map(|j| j.value)
    }

    /// Individual penalty values at `x`, in `penalties` order.
    pub fn penalty_values(&self, x: &Vector2<f64>) -> Result<Vec<f64>> {
        self.check_domain(x)?;
        Ok(self
            .penalties
            .iter()
            .map(|p| penalty_value_grad_hess(p, &self.constraint_jet(p.kind, x[0], x[1]).square()).value)
            .collect())
    }

    /// Penalties whose raw constraint is violated at `x`.
    pub fn violated(&self, x: &Vector2<f64>) -> Result<Vec<PenaltyKind>> {
        self.check_domain(x)?;
        Ok(self
            .penalties
            .iter()
            .filter(|p| p.violated(self.constraint_jet(p.kind, x[0], x[1]).value.powi(2)))
            .map(|p| p.kind)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::simple_cycle_from_step;

    fn fd_check(obj: &Objective, x: Vector2<f64>, tol: f64) {
        let h = 1e-6;
        let j = obj.eval(&x).unwrap();
        for i in 0..2 {
            let mut e = Vector2::zeros();
            e[i] = h;
            let (jp, jm) = (obj.eval(&(x + e)).unwrap(), obj.eval(&(x - e)).unwrap());
            let g = (jp.value - jm.value) / (2.0 * h);
            let scale = j.grad.norm().max(1.0);
            assert!((g - j.grad[i]).abs() <= tol * scale, "grad {i} at {x:?}: {g} vs {}", j.grad[i]);
            for k in 0..2 {
                let hk = (jp.grad[k] - jm.grad[k]) / (2.0 * h);
                let scale = j.hess.norm().max(1.0);
                assert!((hk - j.hess[(k, i)]).abs() <= tol * scale, "hess {k}{i} at {x:?}: {hk} vs {}", j.hess[(k, i)]);
            }
        }
    }

    #[test]
    fn goal_function_values() {
        let spec = GoalSpec { kind: GoalKind::StepTime, g_opt: 0.4, dg_max: 0.1, weight: 1.0 };
        let at = goal_value_grad_hess(&spec, &Jet::var_t(0.4));
        assert_eq!(at.value, 0.0);
        assert_eq!(at.grad, Vector2::zeros());
        assert!((at.hess[(0, 0)] - 100.0).abs() < 1e-9);
        assert!((goal_value_grad_hess(&spec, &Jet::var_t(0.5)).value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn penalty_function_values() {
        let spec = PenaltySpec { kind: PenaltyKind::LenSqMax, h_ext: 1.0, dh_min: 0.1, dir: -1.0 };
        assert_eq!(penalty_value_grad_hess(&spec, &Jet::constant(0.85)), Jet::zero());
        assert!((penalty_value_grad_hess(&spec, &Jet::constant(1.0)).value - 0.5).abs() < 1e-12);
        let below = PenaltySpec { dir: 1.0, ..spec };
        assert!((penalty_value_grad_hess(&below, &Jet::constant(1.0)).value - 0.5).abs() < 1e-12);
        assert_eq!(penalty_value_grad_hess(&below, &Jet::constant(1.2)).value, 0.0);
    }

    #[test]
    fn next_divergent_gradient_fd() {
        let w = WalkerParams::default();
        let cfg = OptimizerConfig::default();
        let c = simple_cycle_from_step(0.5, 0.4, &w).unwrap();
        let goals = vec![GoalSpec { kind: GoalKind::NextDivergent, g_opt: c.q_c, dg_max: 0.05, weight: 1.0 }];
        let obj = assemble_objective(PqState::new(-0.5, 0.3), 0.5, goals, vec![], &cfg, &w).unwrap();
        fd_check(&obj, Vector2::new(0.4, 0.5), 1e-6);
    }

    #[test]
    fn on_cycle_minimum_is_zero() {
        let w = WalkerParams::default();
        let cfg = OptimizerConfig::default();
        let c = simple_cycle_from_step(0.5, 0.4, &w).unwrap();
        let obj = assemble_objective(c.pq(), c.l_c, cycle_goals(&c, true, &cfg), walker_penalties(&cfg, &w), &cfg, &w)
            .unwrap();
        let x = Vector2::new(c.t_c, c.l_c);
        let j = obj.eval(&x).unwrap();
        assert!(j.value.abs() < 1e-20);
        assert!(j.grad.norm() < 1e-10);
        assert!(obj.penalty_values(&x).unwrap().iter().all(|&v| v == 0.0));
        assert!(j.hess.symmetric_eigenvalues().min() > 0.0);
    }

    #[test]
    fn active_penalties_fd() {
        let w = WalkerParams::default();
        let cfg = OptimizerConfig::default();
        let c = simple_cycle_from_step(0.5, 0.4, &w).unwrap();
        let obj = assemble_objective(
            PqState::new(-0.67, 0.47),
            0.74,
            cycle_goals(&c, true, &cfg),
            walker_penalties(&cfg, &w),
            &cfg,
            &w,
        )
        .unwrap();
        // long fast step with every penalty family engaged
        let x = Vector2::new(0.22, 0.745);
        assert!(obj.penalty_values(&x).unwrap().iter().filter(|&&v| v > 0.0).count() >= 2);
        fd_check(&obj, x, 1e-5);
        assert!(obj.eval(&Vector2::new(0.05, 0.5)).is_err());
    }
}
