//! Sparse direction-of-arrival and line spectral estimation.

pub mod array_model;
pub mod bench;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod gridless;
pub mod io;
pub mod linalg;
pub mod offgrid;
pub mod signal_sim;
pub mod sparse_ongrid;
pub mod sdp_admm;
pub mod spectrum;

pub use error::{DoaError, Result};
