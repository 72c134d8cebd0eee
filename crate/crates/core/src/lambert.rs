//! Principal branch of the Lambert W function, used for the minimum-time
//! boundary of simple cycles.

use std::f64::consts::E;

use crate::error::{Error, Result};

const BRANCH_POINT: f64 = -1.0 / E;

/// `W0(x)`: the solution `y ≥ −1` of `y·e^y = x`, for `x ≥ −1/e`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < BRANCH_POINT {
        // allow rounding noise right at the branch point
        if x.is_finite() && x > BRANCH_POINT - 1e-15 {
            return Ok(-1.0);
        }
        return Err(Error::LambertDomain(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }

    let mut w = seed(x);
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let next = w - f / denom;
        if !next.is_finite() {
            break;
        }
        let done = (next - w).abs() <= 4.0 * f64::EPSILON * next.abs().max(1e-300);
        w = next.max(-1.0);
        if done {
            break;
        }
    }
    Ok(w)
}

fn seed(x: f64) -> f64 {
    if x.abs() < 0.3 {
        // leading terms of the Taylor series about 0
        x * (1.0 + x * (-1.0 + x * (1.5 + x * (-8.0 / 3.0 + x * 125.0 / 24.0))))
    } else if x < 0.0 {
        // expansion about the branch point, p = √(2(e·x + 1))
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0))
    } else if x < 3.0 {
        (1.0 + x).ln() * 0.8
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}
