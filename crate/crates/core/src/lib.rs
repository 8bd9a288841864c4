//! Numerical laboratory for Musielak-Orlicz BMO-type seminorms on the
//! discrete periodic torus.
//!
//! The toolkit discretizes a box `[-L/2, L/2)^n` (n = 1 or 2) with periodic
//! boundary conditions and provides, on top of it:
//!
//! * growth functions `phi(x, t)` with uniform-type and Muckenhoupt/reverse
//!   Holder diagnostics ([`growth`]),
//! * modular integrals and Luxembourg norms ([`luxembourg`]),
//! * approximations to the identity (Poisson, heat, box kernels) applied
//!   spectrally or by direct convolution ([`semigroup`]),
//! * maximal operators, dyadic cubes and Whitney-type covers ([`covering`]),
//! * the family of BMO-type seminorm estimators over finite ball menus
//!   ([`bmo`]),
//! * level-set distribution curves and exponential/polynomial decay fits
//!   ([`jn`]),
//! * Littlewood-Paley square functions and Carleson tent norms ([`carleson`]),
//! * a deterministic test-function corpus and a config-driven experiment
//!   runner ([`corpus`], [`config`], [`runner`]).
//!
//! All suprema over balls are estimated over explicit finite menus and, as
//! such, are lower bounds of the continuum quantities; reports are labelled
//! accordingly.

pub mod bmo;
pub mod carleson;
pub mod config;
pub mod corpus;
pub mod covering;
pub mod error;
pub mod grid;
pub mod growth;
pub mod jn;
pub mod luxembourg;
pub mod report;
pub mod runner;
pub mod semigroup;
mod spectral;

pub use error::{Error, Result};
pub use grid::{Ball, BallMenu, Grid, GridFunction};
pub use growth::GrowthFunction;
pub use luxembourg::{NormCache, NormResult};
pub use semigroup::KernelOp;
