//! Decide whether a smooth Jordan curve is a pseudo-lemniscate of a
//! meromorphic function — a full connected component of the preimage
//! f^-1(Gamma) of another Jordan curve Gamma — using argument-principle
//! preimage counts, and provide the supporting machinery: expression
//! evaluation on the Riemann sphere, winding numbers, zero/pole isolation,
//! preimage-curve tracing, and Blaschke-product models on the unit disk.

pub mod analysis;
pub mod blaschke;
pub mod complex;
pub mod config;
pub mod counting;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod job;
pub mod locator;
pub mod render;
pub mod trace;
mod winding;

pub use complex::ComplexValue;
pub use config::ToleranceConfig;
pub use error::{Error, Result};
pub use expr::FunctionDef;
pub use geometry::JordanCurve;
