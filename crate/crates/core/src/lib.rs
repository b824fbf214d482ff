//! Simulation and analysis of heralded noiseless linear amplification of
//! small optical coherent states by weak measurement.
//!
//! A signal mode is weakly coupled to a single-photon meter through a
//! controlled-Z gate; projecting the meter onto a fixed polarisation
//! heralds an amplified signal. Everything is computed by exact evolution
//! in a truncated Fock space:
//!
//! - [`fock`]: bases, states, density operators and permanent-based lifting
//!   of mode transforms.
//! - [`elements`]: beamsplitters, partially polarising beamsplitters,
//!   waveplates and loss channels over the signal/meter mode layout.
//! - [`protocol`]: state preparation, ideal and linear-optics CZ gates, the
//!   heralded amplifier and its closed-form predictions.
//! - [`experiment`]: virtual gain sweeps, heralding-efficiency saturation,
//!   interferometric visibility and Poisson counting statistics.
//! - [`report`]: CSV and JSON emitters for sweep results.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elements;
pub mod error;
pub mod experiment;
pub mod fock;
pub mod protocol;
pub mod report;

pub use error::{Error, Result};
