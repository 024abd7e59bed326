//! Glider guns and collision-based Boolean gates built from localized
//! limit-cycle attractors in spatial threshold networks.

pub mod dynamics;
pub mod error;
pub mod evaluator;
pub mod gate;
pub mod gate_trainer;
pub mod geometry;
pub mod gun_trainer;
pub mod network;
pub mod regions;
pub mod render;
pub mod rewiring;
pub mod rng;

pub use error::{Error, Result};
