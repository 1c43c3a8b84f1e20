//! Exact forward reach sets of parallel integrator chains with bounded inputs.

pub mod boundary;
pub mod cli;
pub mod error;
pub mod harness;
pub mod implicit;
pub mod model;
pub mod poly;
pub mod support;

pub use error::{ReachError, Result};
pub use model::{BlockSpec, InputSet, LpNorm, SystemSpec};
