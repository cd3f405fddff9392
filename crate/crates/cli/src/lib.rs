//! Command-line front end for the elastika library.

pub mod classifier;
pub mod cli;
pub mod error;
pub mod record;
pub mod run;
pub mod synth;
