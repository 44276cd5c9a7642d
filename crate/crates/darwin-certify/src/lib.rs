//! Certification of classical objectivity in environment-as-witness dynamics.
//!
//! A central system imprints information on many environment fragments;
//! observers read their fragment instead of the system. This crate models
//! those dynamics as measure-and-prepare channels and answers, with
//! certificates, whether the spread information is classical:
//!
//! - [`qmath`] — validated density matrices, POVMs, and Hermitian spectra;
//! - [`channels`] — measure-and-prepare channels, canonical broadcast
//!   families, finite-environment circuit simulation, Choi matrices;
//! - [`discrimination`] — minimum-error state discrimination with dual
//!   certificates, worst-case distinguishability η, agreement probabilities;
//! - [`simplex`] — affine independence of encoding states, unique simplex
//!   coordinates, Carathéodory witnesses;
//! - [`bounds`] — the distinguishability cut-off P̂, objectivity verdicts, and
//!   deviation bounds for finite environments;
//! - [`ontology`] — the explicit noncontextual ontological model and its
//!   verification;
//! - [`contextuality`] — diamond-norm distances and the upper bound on the
//!   l1-contextuality distance;
//! - [`scenario`], [`report`], [`pipeline`] — deterministic end-to-end runs
//!   behind the `darwin-certify` binary.
//!
//! Start from the crate examples: each one is a runnable walkthrough of a
//! single capability (`cargo run --example perfect_broadcast`, …).

pub mod bounds;
pub mod channels;
pub mod contextuality;
pub mod discrimination;
pub mod ontology;
pub mod pipeline;
pub mod qmath;
pub mod report;
pub mod scenario;
pub mod simplex;
pub mod solvers;

pub use qmath::QmathError;
