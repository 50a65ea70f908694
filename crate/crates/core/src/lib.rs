// SPDX-License-Identifier: Apache-2.0

//! Separable-probability and expected separation-margin of stochastic
//! bichromatic datasets.
//!
//! Engines are generic over [`Scalar`]; use [`Exact`] for rational results
//! and `f64` for speed. Ball datasets run in float only.

pub mod dataset;
pub mod error;
pub mod esm;
pub mod geom;
pub mod linalg;
pub mod objects;
pub mod oracle;
mod parallel;
pub mod scalar;
pub mod sch;
pub mod sp;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact scalar.
pub type Exact = num_rational::BigRational;
pub type ExactPoint = geom::Point<Exact>;
pub type FloatPoint = geom::Point<f64>;
pub type ExactLocations = dataset::Locations<Exact>;
pub type FloatLocations = dataset::Locations<f64>;
