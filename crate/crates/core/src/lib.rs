//! Distribution and asymptotics of the minimum workload held by a
//! stationary reflected Lévy process over a window of length `t`.
//!
//! The crate computes `P{M(t) > u}` and `E exp(-x M(t))` three independent
//! ways, which cross-check each other:
//!
//! * exact transforms at an exponential clock ([`fluctuation`]) pushed to
//!   the time domain by real-axis Laplace inversion ([`inversion`]);
//! * a closed form for standard Brownian input ([`closedform`]);
//! * a path-level Monte Carlo oracle ([`mcsim`]).
//!
//! Large-`u` behaviour is covered by exact heavy-tailed asymptotics for
//! stable input ([`tail_heavy`]) and Cramér decay rates in the light-tailed
//! case ([`tail_light`]).
//!
//! Monte Carlo runs are data-parallel over paths (rayon, behind the default
//! `parallel` feature) with counter-based per-path substreams, so estimates
//! are bit-identical for any worker count, including the sequential
//! fallback build.

pub mod closedform;
pub mod error;
pub mod fluctuation;
pub mod inversion;
pub mod mcsim;
pub mod models;
pub mod numeric;
pub mod tail_heavy;
pub mod tail_light;

pub use error::{Error, Result};
pub use models::{parse_model, LevyModel};
