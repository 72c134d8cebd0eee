//! Walker constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw, unvalidated walker constants. Turn into [`WalkerParams`] with
/// [`WalkerSpec::build`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WalkerSpec {
    /// CoM height [m].
    pub h: f64,
    /// Gravity [m/s²].
    pub g: f64,
    /// Total mass [kg].
    pub mass: f64,
    /// Torso inertia [kg·m²].
    pub inertia: f64,
    /// Maximum step displacement [m].
    pub l_max: f64,
    /// Maximum mean swing-foot speed relative to the body [m/s].
    pub v_max: f64,
    /// Foot lift plus landing dead time [s].
    pub t_0: f64,
    /// Lower (signed, non-positive) CoP shift bound [m].
    pub dz_min: f64,
    /// Upper CoP shift bound [m].
    pub dz_max: f64,
}

impl Default for WalkerSpec {
    fn default() -> Self {
        Self {
            h: 1.0,
            g: 9.8,
            mass: 50.0,
            inertia: 4.0,
            l_max: 0.75,
            v_max: 3.0,
            t_0: 0.05,
            dz_min: -0.11,
            dz_max: 0.11,
        }
    }
}

impl WalkerSpec {
    pub fn build(self) -> Result<WalkerParams> {
        fn positive(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(field, format!("must be finite and > 0, got {v}")))
            }
        }
        positive("h", self.h)?;
        positive("g", self.g)?;
        positive("mass", self.mass)?;
        positive("inertia", self.inertia)?;
        positive("l_max", self.l_max)?;
        positive("v_max", self.v_max)?;
        if !(self.t_0.is_finite() && self.t_0 >= 0.0) {
            return Err(Error::param("t_0", format!("must be >= 0, got {}", self.t_0)));
        }
        if !(self.dz_min.is_finite() && self.dz_min <= 0.0) {
            return Err(Error::param("dz_min", format!("must be <= 0, got {}", self.dz_min)));
        }
        if !(self.dz_max.is_finite() && self.dz_max >= 0.0) {
            return Err(Error::param("dz_max", format!("must be >= 0, got {}", self.dz_max)));
        }
        Ok(WalkerParams {
            spec: self,
            omega: (self.g / self.h).sqrt(),
        })
    }
}

/// Validated walker constants with the derived pendulum rate `ω = √(g/h)`.
///
/// Fields are read through accessors so that `omega` can never drift from
/// `(g, h)`; edit a copy of [`WalkerParams::spec`] and rebuild to change them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WalkerSpec", into = "WalkerSpec")]
pub struct WalkerParams {
    spec: WalkerSpec,
    omega: f64,
}

impl Default for WalkerParams {
    fn default() -> Self {
        WalkerSpec::default()
            .build()
            .expect("default walker constants are valid")
    }
}

impl TryFrom<WalkerSpec> for WalkerParams {
    type Error = Error;

    fn try_from(spec: WalkerSpec) -> Result<Self> {
        spec.build()
    }
}

impl From<WalkerParams> for WalkerSpec {
    fn from(p: WalkerParams) -> Self {
        p.spec
    }
}

impl WalkerParams {
    pub fn spec(&self) -> WalkerSpec {
        self.spec
    }

    pub fn h(&self) -> f64 {
        self.spec.h
    }

    pub fn g(&self) -> f64 {
        self.spec.g
    }

    pub fn mass(&self) -> f64 {
        self.spec.mass
    }

    pub fn inertia(&self) -> f64 {
        self.spec.inertia
    }

    pub fn l_max(&self) -> f64 {
        self.spec.l_max
    }

    pub fn v_max(&self) -> f64 {
        self.spec.v_max
    }

    pub fn t_0(&self) -> f64 {
        self.spec.t_0
    }

    pub fn dz_min(&self) -> f64 {
        self.spec.dz_min
    }

    pub fn dz_max(&self) -> f64 {
        self.spec.dz_max
    }

    #[inline]
    pub fn omega(&self) -> f64 {
        debug_assert!(
            (self.omega - (self.spec.g / self.spec.h).sqrt()).abs() <= 1e-12 * self.omega,
            "omega out of sync with g/h"
        );
        self.omega
    }

    /// Shortest admissible period for a step of displacement `l`:
    /// `|l| / V_max + T_0`.
    pub fn t_min(&self, l: f64) -> f64 {
        l.abs() / self.spec.v_max + self.spec.t_0
    }

    /// Returns a copy with gravity replaced and `omega` recomputed.
    pub fn with_gravity(&self, g: f64) -> Result<Self> {
        WalkerSpec { g, ..self.spec }.build()
    }
}
