pub mod asymptotics;
pub mod error;
pub mod grid;
pub mod levinson;
pub mod mat2;
pub mod potential;
pub mod scatter;
pub mod universal;
pub mod waveop;

pub use error::{Error, Result};
