//! Remote preparation of two approximate copies of an equatorial or polar
//! qubit from a four-qubit resource, one measurement and one broadcast bit.
//!
//! * [`linalg`] small dense complex matrices and Hermitian matrix functions
//! * [`quantum`] labeled qubit registers, measurement, partial trace, entropies
//! * [`protocol`] resource states, measurement and correction, analytic curves
//! * [`ree`] relative entropy of entanglement by Frank–Wolfe, plus oracles
//! * [`locc`] Alice/Bob/Charlie sessions with transcripts and replay
//! * [`io`], [`report`] file formats and the trade-off table
//! * [`acceptance`] the acceptance checks run by `rsp verify`

pub mod acceptance;
pub mod error;
pub mod io;
pub mod linalg;
pub mod locc;
pub mod par;
pub mod protocol;
pub mod quantum;
pub mod random;
pub mod ree;
pub mod report;

pub use error::{Error, Result};
pub use par::Execution;
