//! Subtraction-free isospectral transformations of matrix pencils.
//!
//! A Hessenberg-bidiagonal pencil `(L_eps* R^(M-1) ... R^(0), L_eps)` is
//! mapped by discrete Toda-type evolutions to the factors of a tridiagonal
//! (`M = 1`) or upper Hessenberg matrix with the same characteristic
//! polynomial. The core evolutions use only addition, multiplication and
//! division, so positive data stay positive and exact data stay exact.
//!
//! * [`scalar`]: exact rationals and the subtraction-free [`Field`] trait.
//! * [`pencil`]: pencil and result data, dense assembly for checking.
//! * [`transform`]: the evolutions and their full trajectories.
//! * [`polyseq`]: the polynomial families and their recurrence identities.
//! * [`verify`]: characteristic polynomials, moment formulas, real roots.
//! * [`io`], [`cli`]: JSON documents and the command-line front end.

pub mod batch;
pub mod cli;
pub mod demo;
pub mod io;
pub mod par;
pub mod pencil;
pub mod polyseq;
pub mod scalar;
pub mod transform;
pub mod verify;

pub use pencil::{Epsilon, PencilSpec, TransformResult};
pub use scalar::{Field, Rational, ScalarMode};
pub use transform::{transform, Algorithm, Breakdown, TransformError, Trajectory};
