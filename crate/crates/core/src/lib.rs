//! Delta calculus on time scales: a function DSL, quadrature, the
//! Montgomery-type identity, trapezoid and Grüss-type inequalities, and a
//! scenario harness that checks them numerically.

pub mod calculus;
pub mod error;
pub mod funcdsl;
pub mod harness;
pub mod identity;
pub mod inequality;
pub mod kernel;
pub mod timescale;

pub use calculus::{delta_derivative, delta_integral, hk, QuadratureConfig};
pub use error::{Error, Result};
pub use funcdsl::{DifferentiableFn, ParamFunction};
pub use timescale::TimeScale;
