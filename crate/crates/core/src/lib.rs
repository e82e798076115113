//! Steady axisymmetric subsonic Euler flow in a circular cylinder, with two
//! rotational phases separated by a contact interface `r = f(x)` that is
//! computed as part of the solution.
//!
//! The velocity of each phase is decomposed as
//! `u = grad(phi) + curl(psi e_theta) + (Lambda/r) e_theta`, which splits the
//! system into
//!
//! * transport of entropy `S` and angular momentum density `Lambda` along
//!   streamlines ([`transport`]),
//! * two elliptic problems per phase for the potential perturbation and the
//!   azimuthal stream component ([`elliptic`]),
//! * pressure-matching conditions and a mass-flux update of the interface
//!   curve ([`interface`]).
//!
//! [`solver`] nests these into the coupled fixed-point iteration, and
//! [`config`]/[`output`] provide the file-based surface used by the CLI.

pub mod config;
pub mod diagnostics;
pub mod elliptic;
pub mod eos;
pub mod error;
pub mod field;
pub mod geometry;
pub mod interface;
pub mod output;
pub mod profiles;
pub mod solver;
pub mod spline;
pub mod transport;

pub use error::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
