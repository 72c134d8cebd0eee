//! Line-search descent methods on two-variable smooth objectives.

use nalgebra::{Matrix2, SymmetricEigen, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::objective::{Jet, Objective};
use super::OptimizerConfig;

/// Anything that evaluates value, gradient and Hessian at a point.
pub trait SmoothObjective {
    fn jet(&self, x: &Vector2<f64>) -> Result<Jet>;

    fn value(&self, x: &Vector2<f64>) -> Result<f64> {
        self.jet(x).map(|j| j.value)
    }
}

impl SmoothObjective for Objective {
    fn jet(&self, x: &Vector2<f64>) -> Result<Jet> {
        self.eval(x)
    }
}

impl<F> SmoothObjective for F
where
    F: Fn(&Vector2<f64>) -> Result<Jet>,
{
    fn jet(&self, x: &Vector2<f64>) -> Result<Jet> {
        self(x)
    }
}

/// Result of one modified-Newton direction computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonDirection {
    pub direction: Vector2<f64>,
    /// Cosine between `−∇U` and the direction.
    pub cos_theta: f64,
    /// Eigenvalues after flooring.
    pub eigenvalues: [f64; 2],
    pub floored: bool,
    /// The gradient vanished; `direction` is zero.
    pub converged: bool,
}

/// `P = −B⁻¹∇U` with `B` the Hessian rebuilt from eigenvalues floored at
/// `lambda_min`.
pub fn newton_step_modified(jet: &Jet, lambda_min: f64) -> NewtonDirection {
    let g = jet.grad;
    let sym = 0.5 * (jet.hess + jet.hess.transpose());
    let eig = SymmetricEigen::new(sym);
    let mut floored = false;
    let mut lam = [0.0; 2];
    for (i, l) in lam.iter_mut().enumerate() {
        let raw = eig.eigenvalues[i];
        *l = if raw >= lambda_min && raw.is_finite() {
            raw
        } else {
            floored = true;
            lambda_min
        };
    }
    if g.iter().all(|&v| v == 0.0) {
        return NewtonDirection {
            direction: Vector2::zeros(),
            cos_theta: 1.0,
            eigenvalues: lam,
            floored,
            converged: true,
        };
    }
    let v = eig.eigenvectors;
    let mut d = Vector2::zeros();
    for i in 0..2 {
        let qi = v.column(i);
        d -= qi * (qi.dot(&g) / lam[i]);
    }
    let cos_theta = -g.dot(&d) / (g.norm() * d.norm());
    NewtonDirection {
        direction: d,
        cos_theta,
        eigenvalues: lam,
        floored,
        converged: false,
    }
}

/// Largest `α ∈ {1, ρ, ρ², …}` with sufficient decrease.
pub fn backtracking_search<F: SmoothObjective + ?Sized>(
    f: &F,
    x: &Vector2<f64>,
    at_x: &Jet,
    p: &Vector2<f64>,
    cfg: &OptimizerConfig,
) -> Result<f64> {
    let slope = at_x.grad.dot(p);
    if !(slope < 0.0) {
        return Err(Error::NotDescent(slope));
    }
    let mut alpha = 1.0;
    for _ in 0..cfg.backtrack_cap {
        if let Ok(v) = f.value(&(x + alpha * p)) {
            if v <= at_x.value + cfg.c1 * alpha * slope {
                return Ok(alpha);
            }
        }
        alpha *= cfg.rho;
    }
    Err(Error::BacktrackingCap(cfg.backtrack_cap))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WolfeReport {
    pub sufficient_decrease: bool,
    pub curvature: bool,
}

/// Evaluates the (strong) Wolfe conditions for a trial step.
pub fn wolfe_check<F: SmoothObjective + ?Sized>(
    f: &F,
    x: &Vector2<f64>,
    p: &Vector2<f64>,
    alpha: f64,
    cfg: &OptimizerConfig,
    strong: bool,
) -> Result<WolfeReport> {
    let j0 = f.jet(x)?;
    let j1 = f.jet(&(x + alpha * p))?;
    let s0 = j0.grad.dot(p);
    let s1 = j1.grad.dot(p);
    Ok(WolfeReport {
        sufficient_decrease: j1.value <= j0.value + cfg.c1 * alpha * s0,
        curvature: if strong {
            s1.abs() <= cfg.c2 * s0.abs()
        } else {
            s1 >= cfg.c2 * s0
        },
    })
}

/// One gradient step with backtracking.
pub fn steepest_descent_step<F: SmoothObjective + ?Sized>(
    f: &F,
    x: &Vector2<f64>,
    cfg: &OptimizerConfig,
) -> Result<Vector2<f64>> {
    let j = f.jet(x)?;
    if j.grad.iter().all(|&v| v == 0.0) {
        return Ok(*x);
    }
    let p = -j.grad;
    let alpha = backtracking_search(f, x, &j, &p, cfg)?;
    Ok(x + alpha * p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Newton,
    SteepestDescent,
}

/// Diagnostics for one accepted iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub x: [f64; 2],
    pub value: f64,
    pub grad_norm: f64,
    /// `∇Uᵀ P`, negative for a descent direction.
    pub slope: f64,
    pub cos_theta: f64,
    pub alpha: f64,
    pub wolfe: WolfeReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeReport {
    pub x: [f64; 2],
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub log: Vec<IterationLog>,
}

/// Iterates until `‖∇U‖ < grad_tol`, the step stalls, or the iteration cap.
pub fn minimize<F: SmoothObjective + ?Sized>(
    f: &F,
    x0: Vector2<f64>,
    method: Method,
    cfg: &OptimizerConfig,
) -> Result<MinimizeReport> {
    let mut x = x0;
    let mut j = f.jet(&x)?;
    let mut log = Vec::new();
    let mut converged = false;
    for _ in 0..cfg.max_newton_iters {
        if j.grad.norm() < cfg.grad_tol {
            converged = true;
            break;
        }
        let (p, cos_theta) = match method {
            Method::Newton => {
                let d = newton_step_modified(&j, cfg.lambda_min);
                if d.converged {
                    converged = true;
                    break;
                }
                // a floored eigenvalue blows the step up; keep the direction, cap the length
                let norm = d.direction.norm();
                if d.floored && norm > cfg.max_step {
                    (d.direction * (cfg.max_step / norm), d.cos_theta)
                } else {
                    (d.direction, d.cos_theta)
                }
            }
            Method::SteepestDescent => (-j.grad, 1.0),
        };
        let alpha = match backtracking_search(f, &x, &j, &p, cfg) {
            Ok(a) => a,
            // no representable decrease left along P
            Err(Error::BacktrackingCap(_)) => {
                converged = j.grad.norm() < 1e3 * cfg.grad_tol;
                break;
            }
            Err(e) => return Err(e),
        };
        let wolfe = wolfe_check(f, &x, &p, alpha, cfg, false)?;
        let slope = j.grad.dot(&p);
        let step = alpha * p;
        x += step;
        j = f.jet(&x)?;
        log.push(IterationLog {
            x: [x[0], x[1]],
            value: j.value,
            grad_norm: j.grad.norm(),
            slope,
            cos_theta,
            alpha,
            wolfe,
        });
        if step.norm() <= 1e-15 * (1.0 + x.norm()) {
            converged = j.grad.norm() < 1e3 * cfg.grad_tol;
            break;
        }
    }
    if !converged && j.grad.norm() < cfg.grad_tol {
        converged = true;
    }
    Ok(MinimizeReport {
        x: [x[0], x[1]],
        value: j.value,
        grad_norm: j.grad.norm(),
        iterations: log.len(),
        converged,
        log,
    })
}

/// Quadratic `½ xᵀAx − bᵀx` as a test objective.
pub fn quadratic(a: Matrix2<f64>, b: Vector2<f64>) -> impl Fn(&Vector2<f64>) -> Result<Jet> {
    move |x| {
        Ok(Jet {
            value: 0.5 * x.dot(&(a * x)) - b.dot(x),
            grad: a * x - b,
            hess: a,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> OptimizerConfig {
        OptimizerConfig::default()
    }

    #[test]
    fn newton_solves_quadratic_in_one_step() {
        let f = quadratic(Matrix2::new(3.0, 1.0, 1.0, 2.0), Vector2::new(1.0, -1.0));
        let r = minimize(&f, Vector2::new(5.0, -7.0), Method::Newton, &cfg()).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(r.converged);
        assert_eq!(r.log[0].alpha, 1.0);
        let bowl = quadratic(Matrix2::identity(), Vector2::zeros());
        let r = minimize(&bowl, Vector2::new(0.3, -2.0), Method::Newton, &cfg()).unwrap();
        assert!(Vector2::from(r.x).norm() < 1e-15);
    }

    #[test]
    fn indefinite_hessian_is_floored() {
        let j = Jet {
            value: 0.0,
            grad: Vector2::new(1.0, 1.0),
            hess: Matrix2::new(1.0, 0.0, 0.0, -2.0),
        };
        let d = newton_step_modified(&j, 1e-8);
        assert!(d.floored);
        let mut lam = d.eigenvalues;
        lam.sort_by(f64::total_cmp);
        assert_eq!(lam, [1e-8, 1.0]);
        assert!(d.cos_theta > 0.0);
        assert!((d.direction[0] + 1.0).abs() < 1e-9);
        assert!((d.direction[1] + 1e8).abs() < 1.0);
    }

    #[test]
    fn zero_gradient_signals_convergence() {
        let j = Jet::zero();
        assert!(newton_step_modified(&j, 1e-8).converged);
        let f = quadratic(Matrix2::identity(), Vector2::zeros());
        assert_eq!(steepest_descent_step(&f, &Vector2::zeros(), &cfg()).unwrap(), Vector2::zeros());
    }

    #[test]
    fn backtracking_quartic_accepts_unit_step() {
        let f = |x: &Vector2<f64>| -> Result<Jet> {
            Ok(Jet {
                value: x[0].powi(4),
                grad: Vector2::new(4.0 * x[0].powi(3), 0.0),
                hess: Matrix2::new(12.0 * x[0] * x[0], 0.0, 0.0, 0.0),
            })
        };
        let x = Vector2::new(1.0, 0.0);
        let j = f(&x).unwrap();
        let p = Vector2::new(-1.0, 0.0);
        assert_eq!(backtracking_search(&f, &x, &j, &p, &cfg()).unwrap(), 1.0);
        assert!(matches!(
            backtracking_search(&f, &x, &j, &-p, &cfg()),
            Err(Error::NotDescent(_))
        ));
    }

    #[test]
    fn wolfe_limits() {
        let f = quadratic(Matrix2::identity(), Vector2::zeros());
        let x = Vector2::new(1.0, 0.0);
        let p = Vector2::new(-1.0, 0.0);
        let exact = wolfe_check(&f, &x, &p, 1.0, &cfg(), true).unwrap();
        assert!(exact.sufficient_decrease && exact.curvature);
        let tiny = wolfe_check(&f, &x, &p, 1e-12, &cfg(), false).unwrap();
        assert!(tiny.sufficient_decrease && !tiny.curvature);
    }

    #[test]
    fn steepest_descent_zigzags_on_ill_conditioned() {
        let f = quadratic(Matrix2::new(1.0, 0.0, 0.0, 100.0), Vector2::zeros());
        let x = steepest_descent_step(&quadratic(Matrix2::identity(), Vector2::zeros()), &Vector2::new(1.0, 0.0), &cfg())
            .unwrap();
        assert!(x.norm() < 1e-15);
        let mut x = Vector2::new(1.0, 0.1);
        let mut n = 0;
        while f(&x).unwrap().grad.norm() > 1e-3 && n < 10_000 {
            x = steepest_descent_step(&f, &x, &cfg()).unwrap();
            n += 1;
        }
        assert!(n > 20, "{n}");
        let r = minimize(&f, Vector2::new(1.0, 0.1), Method::Newton, &cfg()).unwrap();
        assert_eq!(r.iterations, 1);
    }
}
