//! Continuum dislocation mechanics: straight Volterra dislocation fields,
//! dislocation measures, glide mobility, front tracking of dislocation
//! curves and the periodic-cell field model with its slip-plane
//! Hamilton-Jacobi specialization.
//!
//! Units are nondimensional: lengths in `|b|`, stresses in `μ`.

pub mod analytic;
pub mod continuum;
pub mod curves;
pub mod error;
pub mod grid;
pub mod measures;
pub mod mobility;
pub mod quadrature;
pub mod registry;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};
pub use grid::PeriodicCell;
pub use tensor::{SymTensor3, Tensor3, Vec3};
