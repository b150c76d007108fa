//! Jordan angles between subspaces, quaternion and octonion algebra, and
//! finite-difference extrinsic geometry of immersed submanifolds.

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod models;
pub mod octonion;
pub mod scalar;
pub mod subspace;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision aliases.
pub type Subspace = subspace::Subspace<f64>;
pub type JordanSpectrum = subspace::JordanSpectrum<f64>;
pub type AngleClass = subspace::AngleClass<f64>;
pub type Matrix = linalg::Matrix<f64>;
pub type Quaternion = octonion::Quaternion<f64>;
pub type Octonion = octonion::Octonion<f64>;
