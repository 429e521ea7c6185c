//! Simulation of sequential weak measurements on a polarization qubit with
//! transverse-position pointers.
//!
//! Three engines compute the same pointer deflections:
//!
//! - [`pointer`]: closed-form deflections and an exact calculus over
//!   superpositions of shifted Gaussians.
//! - [`grid`]: a discretized polarized field pushed through wave plates,
//!   Fourier lenses and SLM gratings, read out as camera images.
//! - [`qubit`]: the underlying two-level algebra (weak values, expectation
//!   values, anomaly classification).
//!
//! [`experiments`] sweeps the coupling strength, extracts the anomaly
//! boundary and the deepest reversal, and exports CSV datasets.

pub mod error;
pub mod experiments;
pub mod grid;
pub mod numeric;
pub mod pointer;
pub mod qubit;
pub mod verify;

pub use error::{Error, Result};
pub use pointer::{Axis, DeflectionTriple};
