//! Independent reference implementations ("oracles") shared by the `iif`
//! unit tests and the acceptance suite.
//!
//! Everything in this crate deliberately takes a different algorithmic
//! route than the library: eigendecompositions run cyclic Jacobi sweeps
//! instead of tridiagonalization, cluster optima come from exhaustive
//! enumeration instead of Lloyd iterations, label-matching accuracy
//! maximizes over explicit permutations instead of solving an assignment
//! problem, and distribution functions come from quadrature or from the
//! `statrs` crate instead of the library's own special-function code.
//! Agreement between the two routes is what the tests certify; nothing
//! here is ever called by production code.

pub mod cluster;
pub mod dist;
pub mod eigen;
pub mod hc;
pub mod label;
