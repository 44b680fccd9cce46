pub mod classify;
pub mod error;
pub mod graphs;
pub mod numkernel;
pub mod perturb;
pub mod spectra;
pub mod walk;

pub use error::{LabError, Result};
