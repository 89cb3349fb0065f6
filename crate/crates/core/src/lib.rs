//! Volume-filling multiphase cross-diffusion systems.
//!
//! Pointwise model and matrix code is generic over [`scalar::Real`]; the
//! aliases below fix the scalar to `f64`.

pub mod analysis;
pub mod config;
pub mod diagnostics;
pub mod linalg;
pub mod matrices;
pub mod model;
pub mod scalar;
pub mod solver;

pub type Matrix = linalg::Mat<f64>;
pub type Point = model::SimplexPoint<f64>;
pub type Matrices = matrices::AssembledMatrices<f64>;
pub type Banded = linalg::BandedMatrix<f64>;
pub type Dual64 = scalar::Dual<f64>;
