//! Spectral statistics of products and powers of non-hermitian random
//! matrices and of superoperators built from random quantum operations and
//! the generalized quantum baker map.
//!
//! The crate samples matrix ensembles (`ensembles`), extracts eigenvalue and
//! singular-value spectra (`spectral`), evaluates the closed-form reference
//! laws they converge to (`laws`), constructs quantum-channel and baker-map
//! superoperators (`channels`, `baker`), and connects samples to laws through
//! histograms, Kolmogorov-Smirnov distances and edge-width fits (`stats`).
//! The `harness` module drives seeded, reproducible experiments behind the
//! `opspectra` CLI and writes CSV artifacts.
//!
//! All randomness flows through explicit [`rng::RngStream`] values derived
//! from a master seed and a stream index, so every result is reproducible
//! bit for bit regardless of scheduling.

pub mod baker;
pub mod channels;
pub mod ensembles;
pub mod error;
pub mod harness;
pub mod laws;
pub mod linalg;
pub mod quad;
pub mod rng;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};

/// Crate version string recorded in run manifests and the C header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
