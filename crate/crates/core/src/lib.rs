//! Simulation and verification of extreme values of log-correlated random fields.
//!
//! Samplers for four models (branching random walk, 2D Gaussian free field, random Euler
//! product, CUE characteristic polynomial), extreme-value statistics over their samples,
//! and the closed-form predictions those statistics are checked against.
//!
//! Everything random is addressed through [`rng`], so a sample is a pure function of its
//! configuration and seed.

pub mod brw;
pub mod cue;
pub mod error;
pub mod experiments;
pub mod gff;
pub mod iid;
pub mod num;
pub mod rng;
pub mod stats;
pub mod theory;
pub mod zeta;

pub use error::{Error, Result};
pub use num::Real;

pub type TheoryParams64 = theory::TheoryParams<f64>;
pub type TheoryParams32 = theory::TheoryParams<f32>;
pub type BrwConfig64 = brw::BrwConfig<f64>;
pub type BrwConfig32 = brw::BrwConfig<f32>;
pub type IidConfig64 = iid::IidConfig<f64>;
