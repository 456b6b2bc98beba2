//! Fluxon-based pulse shaping: a long junction carries a fluxon past a
//! coupling loop, and a two-junction interferometer converts the loop flux
//! into the qubit drive.

mod interferometer;
mod ljj;
mod pipeline;
mod waveform;

pub use interferometer::*;
pub use ljj::*;
pub use pipeline::*;
pub use waveform::*;
