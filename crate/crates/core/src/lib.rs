//! Reverse-causal strategic learning in labor markets.
//!
//! Threshold hiring in the binary-skill Coate-Loury market, its two-group
//! extension, a continuous-skill market with flat or zero-profit wages, and
//! a stochastic performative gradient method for the employer's policy.

pub mod coate_loury;
pub mod continuous;
pub mod error;
pub mod numerics;
pub mod policy;
pub mod rc_sgd;
pub mod runner;
pub mod scenario;
pub mod two_group;
pub mod verify;

pub use error::{Error, Result};
