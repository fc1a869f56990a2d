//! Local discontinuous Galerkin discretization of the abcd Boussinesq system
//!
//! ```text
//! η_t + u_x + (ηu)_x + a u_xxx − b η_xxt = 0
//! u_t + η_x + (u²/2)_x + c η_xxx − d u_xxt = 0
//! ```
//!
//! on periodic one-dimensional meshes, advanced in time with the
//! three-stage strong-stability-preserving Runge–Kutta method.
//!
//! The crate is `no_std` and only needs `alloc`. All transcendental
//! functions go through [`libm`], so results are bit-identical between
//! hosted and embedded builds. IO, configuration and the CLI live in the
//! `abcd-ldg` companion crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod basis;
pub mod cases;
pub mod error;
pub mod field;
pub mod linalg;
pub mod mesh;
pub mod operators;
pub mod params;
pub mod projection;
pub mod quadrature;
pub mod study;
pub mod time;

pub use basis::ReferenceBasis;
pub use cases::{CaseId, CaseSpec, DtRule, HeadonSign};
pub use error::{Error, Result};
pub use field::{DGField, InterfaceTraces};
pub use mesh::Mesh1D;
pub use operators::{AuxFields, EvolutionOperator, FluxRule};
pub use params::{AbcdParams, AlphaPolicy};
pub use quadrature::QuadratureRule;
pub use study::{ErrorReport, ErrorRow};
pub use time::{SimState, Trajectory};
