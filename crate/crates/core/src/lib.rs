//! Compute-and-forward (CF) relaying at the rate level.
//!
//! The crate covers the computation-rate formulas with MMSE scaling, the
//! search for the rate-maximizing integer coefficient vector, closed-form
//! degeneracy and sum-rate bounds, and the Monte Carlo campaigns built on
//! top of them. It is `no_std` and only needs `alloc`; IO, the CLI and the
//! parallel executor live in the `cf-sim` crate.
#![no_std]

extern crate alloc;

pub mod analysis;
pub mod channel;
mod error;
pub mod exec;
pub mod experiments;
pub mod rate;
pub mod search;
pub mod special;
pub mod stats;

pub use channel::{derive_trial_stream, sample_channel, ChannelVector, PowerConfig, RngStream};
pub use error::{Error, Result};
pub use rate::{CoefficientVector, GramMatrix, RateValue};
pub use search::{SearchResult, Solver, SolverKind};
