//! Generalized cusps of convex projective manifolds and the iterated bending
//! deformations that produce them.
//!
//! - [`scalar`]: exact-rational / float numbers used everywhere.
//! - [`projlin`]: projective maps and points, inversion, eigenanalysis.
//! - [`cusp_models`]: cusp parameters ψ, the groups H(ψ), the domains Ω(ψ),
//!   the paraboloid model of hyperbolic space and the centralizer families.
//! - [`hilbert`]: the Hilbert metric of a convex domain given by a membership oracle.
//! - [`bending`]: bending of marked representations along amalgams and HNN
//!   extensions, singly or iterated.
//! - [`cusp_classify`]: bent rectangular cusps, their normal form and cusp
//!   parameter, and triangularizability / diagonalizability tests.
//! - [`sample`]: seeded random inputs and fixtures.

pub mod bending;
pub mod cusp_classify;
pub mod cusp_models;
pub mod hilbert;
pub mod projlin;
pub mod sample;
pub mod scalar;

pub use projlin::{act, compose, inverse, ProjEquiv, ProjError, ProjMap, ProjPoint};
pub use scalar::{Mode, Scalar, DEFAULT_TOL};
