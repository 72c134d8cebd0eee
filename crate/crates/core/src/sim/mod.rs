//! Complete-model testbed: rigid torso, momentum controller, legs,
//! constraint metrics and the hybrid walk loop.

mod body;
mod constraints;
mod cwm;
mod legs;
mod walk;

pub use body::*;
pub use constraints::*;
pub use cwm::*;
pub use legs::*;
pub use walk::*;
