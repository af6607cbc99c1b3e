//! Simulator of a two-qubit silicon photonic chip together with the three
//! quantum-GAN training loops that run on it.
//!
//! The crate is organised around the hardware it models:
//!
//! * [`quantum`] — exact complex linear algebra for one- and two-qubit
//!   systems: states, gates, partial traces, fidelity and shot sampling.
//! * [`chip`] — the photonic-chip model: AMZI transfer matrices under
//!   frequency post-selection, the coincidence-rate law, heater
//!   calibration, the amplitude-tunable entangled source, the
//!   controlled-unitary scheme, and compensation of the broken phase
//!   shifter.
//! * [`tomography`] — Pauli-basis measurement and single-qubit state
//!   reconstruction with physical projection.
//! * [`nn`] — a small dense network with explicit backpropagation,
//!   RMSProp and the WGAN gradient-penalty term.
//! * [`gan`] — the three adversarial trainers: quantum state learning,
//!   classical distribution loading, and compressed-image generation
//!   with a hybrid classical/quantum generator.
//! * [`data`] — target distributions, MNIST IDX ingestion, PCA
//!   compression and the feature-to-probability map.
//!
//! All stochastic operations take an explicit seed or an RNG handle; see
//! [`rng`] for the generator used throughout.

// `!(x > 0.0)` guards are deliberate: they reject NaN along with the
// out-of-range values. Index loops mirror the matrix math they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod chip;
pub mod data;
pub mod error;
pub mod gan;
pub mod nn;
pub mod quantum;
pub mod rng;
pub mod selftest;
pub mod tomography;

pub use error::{Error, Result};
