//! Numerical toolkit for the cohomological equation of the time-T horocycle
//! map in the standard models of the unitary irreducible representations of
//! SL(2, R).
//!
//! The crate is organized bottom-up:
//!
//! * [`sl2`]: Lie-algebra basis, commutators, Casimir classification of a
//!   representation by its Casimir value mu.
//! * [`quad`]: panel-based Gauss-Legendre engines for line, half-plane,
//!   singular-kernel and oscillatory integrals.
//! * [`models`]: concrete function models (line/circle charts for mu > 0,
//!   upper half-plane and disk charts for the discrete series), basis
//!   vectors, ladder and differential operators, Sobolev norms.
//! * [`dist`]: the invariant distributions that obstruct solvability:
//!   boundary jets at the fixed point and equivariant Fourier functionals.
//! * [`solver`]: the cohomological solvers (jet removal plus one-sided
//!   series, Fourier division, flow integration) and their residual reports.
//! * [`harness`]: ergodic-average drivers, decay-rate tables and the
//!   predicted upper bounds they are compared against.
//!
//! [`battery`] generates seeded admissible test functions, [`verify`] runs
//! the named check suites, and [`config`]/[`report`] carry run settings and
//! structured output for the command-line interface.

pub mod battery;
pub mod config;
pub mod dist;
pub mod error;
pub mod harness;
pub mod models;
pub mod quad;
pub mod report;
pub mod sl2;
pub mod solver;
pub mod verify;

pub use error::{HoromapError, Result};
