//! Simulation and analysis of a four-qubit diamond quantum spin transistor.

pub mod basis;
pub mod circuit;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod hamiltonian;
pub mod operator;
pub mod state;
pub mod transfer;
pub mod units;

pub use error::{Error, Result};
