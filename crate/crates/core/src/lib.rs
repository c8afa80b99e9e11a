//! Exact computations with generalized probabilistic theories: systems and
//! their cones, distinguishability and classical sets, decoherence, minimal
//! tensor products, and spectrum broadcast structure with the objectivity
//! game.

pub mod classicality;
pub mod cli;
pub mod composition;
pub mod decoherence;
pub mod error;
pub mod exactmath;
pub mod format;
pub mod gpt;
pub mod objectivity;
pub mod report;
pub mod zoo;

pub use error::{GptError, Result};
