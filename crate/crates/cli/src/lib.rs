//! Experiment harness behind the `statedet` binary.
//!
//! Every experiment is a pure function of its parameters: all randomness is
//! seeded and streamed, so repeat runs produce byte-identical reports. The
//! binary in `main.rs` only parses flags, calls in here, and formats output.

pub mod config;
pub mod experiments;
pub mod output;
