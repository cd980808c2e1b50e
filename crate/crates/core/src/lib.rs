//! Teleportation of photonic qubits through a hybrid discrete/continuous-variable channel.

pub mod demodulation;
pub mod displaced;
pub mod error;
pub mod fock;
pub mod optics;
pub mod protocol;
pub mod search;

pub use error::{Error, Result};
pub use fock::{FockState, LogicalBasis, Mode, Parity, QubitState, TruncationConfig};
