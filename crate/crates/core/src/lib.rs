//! Discrete passive beamforming for intelligent-surface (IS) aided MIMO links.
//!
//! The crate is split along the simulation pipeline:
//!
//! - [`scenario`]: system constants, node layout, pathloss and random channel draws.
//! - [`mimo`]: effective channel, capacity and its bounds, the sum-power surrogate,
//!   water-filling precoding and the power-measurement oracle.
//! - [`passive`]: phase-shift optimizers (CSI linear search, blind conditional
//!   sample mean, beam-training baselines, exhaustive search), the alternating
//!   active/passive loop and sample-complexity diagnostics.
//! - [`experiments`]: seeded Monte Carlo studies and their CSV/manifest output.
//! - [`config`]: the TOML scenario/experiment file and its validation.
//!
//! Rates are reported in bit/s/Hz throughout (base-2 logarithms).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod mimo;
pub mod passive;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use num_complex::Complex64;
