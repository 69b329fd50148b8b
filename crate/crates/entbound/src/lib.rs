//! Lower bounds on entanglement measures from measured expectation values.
//!
//! Given the mean value of one or more observables (typically entanglement
//! witnesses), this crate computes the optimal affine lower bound on a convex
//! entanglement measure via Legendre-transform duality: for any slope λ,
//! `E(ρ) ≥ λ·Tr(Wρ) − Ê(λW)` where `Ê` is the conjugate of the measure, and
//! the slope is then optimized.
//!
//! Modules:
//! - [`qcore`] — states, operators, tensor structure, reductions, spectra,
//!   random sampling.
//! - [`measures`] — exact measures on pure states, the two-qubit Wootters
//!   formula, and directly evaluable witness estimators.
//! - [`legendre`] — conjugate (Legendre transform) evaluators for the
//!   concurrence, entanglement of formation, geometric, and Meyer-Wallach
//!   measures, plus the slope optimization over measurement records.
//! - [`analytic`] — closed-form geometric-measure bounds on stabilizer bases
//!   (GHZ / cluster), fidelity-based bounds, isotropic-state formulas.
//! - [`cli`] — file formats and the data-generation harness behind the
//!   `entbound` binary.
//!
//! The `examples/` directory contains one runnable example per capability;
//! start with `witness_bound` and `isotropic_sweep`.

pub mod analytic;
pub mod cli;
pub mod config;
pub mod error;
pub mod legendre;
pub mod measures;
mod opt;
pub mod qcore;

pub use config::NumericConfig;
pub use error::{Error, Result};
