//! Divergence-free tensors for Lagrangians of closed differential forms.
//!
//! Given a density `L(A, s)` of a constant `p`-form on `R^d`, [`tensor`] builds
//! `T_ij = L delta_ij - sum_K A_iK dL/dA_jK`, [`symmetry`] compares invariance of
//! `L` under a metric's isometries with symmetry of `S T`, and [`field`] checks
//! conservation and closedness on sampled fields.
//!
//! ```
//! use formtensor::models::registry::{build, ModelParams};
//! use formtensor::models::GasState;
//! use formtensor::tensor::assemble_general;
//!
//! let gas = build("gas", &ModelParams::parse("g=polytropic,gamma=2").unwrap()).unwrap();
//! let alpha = GasState::new(1.0, vec![1.0], 0.0).encode();
//! let t = assemble_general(&gas, &alpha).unwrap();
//! assert_eq!(t.rows(), [[-1.0, -1.5], [1.0, 1.5]]);
//! ```

pub mod cli;
pub mod conventions;
pub mod dual;
pub mod error;
pub mod expr;
pub mod exterior;
pub mod field;
pub mod models;
pub mod report;
pub mod symmetry;
pub mod tensor;

pub use error::{Error, Result};
