//! Exact symbolic verification of approximate symmetries, conservation laws
//! and bi-Hamiltonian structure for evolution equations perturbed in a small
//! parameter `eps`.

pub mod engine;
pub mod error;
pub mod frontend;
pub mod hamiltonian;
pub mod jet;
pub mod numeric;
pub mod operator;
pub mod ring;

pub use error::{Error, Result};
