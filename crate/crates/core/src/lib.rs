//! Pulse-level simulation of flux qubits under unipolar picosecond pulses.

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod fluxshaper;
pub mod linalg;
pub mod protocols;
pub mod quantum;
pub mod register;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
