// SPDX-License-Identifier: Apache-2.0

//! Simulator for a double-cavity optomechanical system: a mechanical
//! resonator with two reflective faces, each coupled by radiation pressure
//! to its own driven optical cavity.
//!
//! The crate computes steady states and their stability, co-integrates the
//! mean-field equations with the Lyapunov equation for the 6x6 fluctuation
//! covariance, and measures pairwise entanglement (logarithmic negativity)
//! between the resonator (M) and the left (L) and right (R) cavity modes.

pub mod config;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod model;
pub mod params;
pub mod poly;
pub mod runner;
pub mod state;
pub mod steady;
pub mod testkit;

pub use config::{load_config, preset, DriveMode, Scenario};
pub use error::{Error, Result};
pub use params::{derive_params, DerivedParams, FrequencyConvention, PhysicalParams};
pub use state::{CovMatrix, MeanState};
