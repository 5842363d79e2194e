//! Frequency-domain Helmholtz solver built on one-way sweeps.
//!
//! The forward field is marched along `x` with Heun's method using rational
//! (Padé) approximations of the transverse square-root symbols, and a single
//! backward/forward pair corrects for reflections from the medium.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod field;
pub mod medium;
pub mod ops;
pub mod pade;
pub mod par;
pub mod render;
pub mod residual;
pub mod study;
pub mod sweep;
pub mod tridiag;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use field::Field2D;
pub use medium::{Attenuation, DomainSpec, Medium};
pub use pade::{PadeCoefficients, PadeProvider, PadeSet};
pub use par::Exec;
pub use sweep::Sweeper;
