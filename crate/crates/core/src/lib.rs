//! Momentum-space walking laboratory for a planar biped.
//!
//! The crate is organised bottom-up:
//!
//! - [`params`] and [`momentum`] hold the walker constants and the simplified
//!   walking model written in convergent/divergent coordinates `(p, q)`.
//! - [`cycles`] builds periodic walking solutions of the step-to-step map.
//! - [`stabilizers`] contains the four motion-cycle stabilizers.
//! - [`opt`] is the penalty-method optimal step planner (modified Newton with
//!   backtracking) together with the direct target solve.
//! - [`sim`] is the complete rigid-torso testbed used for push-recovery runs.
//! - [`harness`] loads scenarios, runs benchmarks and exports traces.
//!
//! ```
//! use gaitlab::{cycles, momentum, WalkerParams};
//!
//! let params = WalkerParams::default();
//! let cycle = cycles::simple_cycle_from_step(0.5, 0.4, &params).unwrap();
//! let next = momentum::step_to_step(cycle.pq(), cycle.l_c, cycle.t_c, &params).unwrap();
//! assert!((next.q - cycle.q_c).abs() < 1e-12);
//! ```

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cycles;
pub mod error;
pub mod harness;
pub mod lambert;
pub mod momentum;
pub mod opt;
pub mod params;
pub mod sim;
pub mod stabilizers;

pub use error::{Error, Result};
pub use momentum::{PendulumState, PqState};
pub use params::WalkerParams;
