//! Toric Bezier patches over planar lattice configurations.
//!
//! A patch is specified by a finite set `A` of integer points (the lattice
//! configuration), one positive weight and one control point per element of
//! `A`. The basis function attached to `a` in `A` is the product of the facet
//! inequalities of `conv(A)` raised to their values at `a`; classical Bezier
//! curves, tensor-product patches and Bezier triangles are the special cases
//! where `conv(A)` is a segment, a box or a scaled standard triangle.
//!
//! The crate covers the full pipeline around that definition:
//!
//! * [`lattice`]: exact convex hulls of configurations in dimension 1 and 2,
//!   primitive facet inequalities, point/face membership, and upper hulls of
//!   lifted configurations (dimension 2 and 3).
//! * [`subdivision`]: regular polyhedral decompositions induced by lifting
//!   functions, validation of user-supplied decompositions, and exact
//!   linear-programming certificates that a decomposition is or is not
//!   induced by some lifting.
//! * [`patch`]: basis evaluation, the factorization of a patch through the
//!   weight-scaled simplex, classical constructors, and binomial relations
//!   satisfied by points on the image.
//! * [`degeneration`]: weight families `t^(lambda(a)) * w_a`, piecewise
//!   control surfaces over a decomposition, dense sampling, Hausdorff
//!   distances and convergence sweeps in `t`.
//! * [`io`]: JSON schemas for all of the above, CSV sweep reports and OBJ
//!   export of sampled geometry.
//!
//! All combinatorial geometry (hulls, face lattices, certificates) runs on
//! exact rational arithmetic; floating point appears only in evaluation and
//! sampling. With the default `parallel` feature, sampling, sweeps and
//! Hausdorff computations use rayon; disabling it leaves the same interfaces
//! running sequentially, with identical (bitwise) results.

pub mod error;
pub mod rat;

pub mod lattice;
pub mod subdivision;

pub mod patch;

pub mod degeneration;
pub mod hausdorff;
pub mod sample;

pub mod io;
pub mod obj;

mod linalg;
mod parallel;
mod simplex;
mod upper_hull;

pub use error::{Error, Result};
pub use rat::Rat;
