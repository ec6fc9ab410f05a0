//! Exact Rabi-oscillation dynamics of an n-level ladder atom driven by n-1
//! resonant fields.
//!
//! In the rotating frame the dynamics reduce to the exponential of a real
//! symmetric tridiagonal coupling matrix `C` with zero diagonal. This crate
//! computes that exponential three ways:
//!
//! * [`closed_form`]: analytic expressions for 2 to 5 levels;
//! * [`spectral::expm_spectral`]: numeric eigendecomposition, any `n`;
//! * [`spectral::expm_series`]: scaled Taylor series, any dense matrix.
//!
//! [`evolution`] assembles the lab-frame propagator and population dynamics
//! on top of whichever kernel applies, and [`cli`] drives it all from JSON
//! scenario files.
//!
//! ```
//! use rabi_ladder::{evolution, model::{CouplingVector, LadderModel}};
//!
//! let g = CouplingVector::new(vec![1.0, 1.0]).unwrap();
//! let model = LadderModel::resonant(vec![0.0, 1.0, 1.8], vec![0.0, 0.0], g).unwrap();
//! let t = std::f64::consts::PI / 2f64.sqrt();
//! let u = evolution::propagator(&model, t, &Default::default()).unwrap();
//! let p = evolution::populations(&u, 0).unwrap();
//! assert!((p[2] - 1.0).abs() < 1e-12);
//! ```

pub mod cli;
pub mod closed_form;
pub mod error;
pub mod evolution;
pub mod matrix;
pub mod model;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, RealMatrix};
