//! Rate analysis for low-complexity large-array receivers.
//!
//! Two analyses live here:
//!
//! * a wirelessly synchronized direct-detection array, where each antenna
//!   squares the sum of the data signal and a weak broadcast carrier tone
//!   that an asymmetric bandpass filter lifts at the band edge
//!   ([`filter`], [`direct_detection`]);
//! * a one-bit quantized massive MIMO uplink under linear processing, via
//!   the Bussgang decomposition and the arcsine law ([`bussgang`]), its
//!   first- and third-order closed-form approximations ([`approximations`])
//!   and a seeded Monte Carlo oracle ([`montecarlo`]).
//!
//! The [`cli`] module drives parameter sweeps and writes CSV.

pub mod approximations;
pub mod bussgang;
pub mod cli;
pub mod direct_detection;
pub mod error;
pub mod filter;
pub mod montecarlo;
pub mod quadrature;
pub mod sampling;

pub use error::{Error, Result};
