//! Numerical laboratory for the intrinsic bounds obeyed by the overlap of a
//! two-qudit pure state evolving under random local SU(d) operations.
//!
//! The crate provides four independent routes to the same physics and lets
//! them cross-check each other:
//!
//! * closed-form boundary curves for the reachable overlap region
//!   ([`boundary`]),
//! * Monte Carlo sweeps over random local evolutions with confinement
//!   checks and polar phase histograms ([`sweep`]),
//! * a brute-force eigenphase-grid oracle that rediscovers the boundary
//!   without using the closed form ([`oracle`]),
//! * a density-matrix simulation of the ancilla interferometer that reads
//!   the overlap out as a Pauli expectation value ([`interferometer`]).
//!
//! Supporting layers: small dense complex linear algebra and Haar sampling
//! ([`linalg`]), the two-qudit state model ([`state`]), CSV/JSON/SVG
//! emission ([`report`], [`svg`]) and the `qbl` command line front end
//! ([`cli`]).

pub mod boundary;
pub mod cli;
pub mod error;
pub mod interferometer;
pub mod linalg;
pub mod oracle;
pub mod report;
pub mod state;
pub mod svg;
pub mod sweep;

pub use error::{Error, Result};

/// Tool version as embedded in output file headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
