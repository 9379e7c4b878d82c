//! Frequency-domain force-noise analysis for linear quantum detectors.
//!
//! A detector is linearized into `d/dt x = A x + w` ([`linsys`]), built for a
//! concrete coupling scheme ([`schemes`]), and solved for the added force
//! noise `S_f(omega)` ([`noise`]). [`bounds`] holds the analytic limits
//! (SQL, UQL, generalized and optimal UQL) and [`linresp`] the detector-
//! agnostic linear-response layer they follow from.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod linresp;
pub mod linsys;
pub mod noise;
pub mod presets;
pub mod schemes;
pub mod verify;

pub use error::{Error, Result};
