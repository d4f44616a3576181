//! Discrepancy between the number of points of random hyperelliptic curves
//! over a subset `S` of a finite field and `#S`.

pub mod bounds;
pub mod cli;
pub mod exceptional;
pub mod error;
pub mod field;
pub mod moments;
pub mod numeric;
pub mod poly;
pub mod rng;
pub mod sampler;
pub mod subset;

pub use error::{Error, Result};
