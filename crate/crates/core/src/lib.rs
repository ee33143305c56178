//! Semiclassical quantization of memoryless open systems.

pub mod error;
pub mod experiment;
pub mod faq;
pub mod lindblad;
pub mod models;
pub(crate) mod linalg;
pub mod observables;
pub(crate) mod ode;
pub mod quantize;
pub mod table;

pub use error::{Error, Result};
pub use linalg::CMatrix;
