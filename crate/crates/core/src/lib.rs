pub mod arbitrage;
pub mod calculus;
pub mod cli;
pub mod error;
pub mod format;
pub mod hedging;
pub mod linalg;
pub mod lp;
pub mod market;
pub mod pricing;
mod program;
pub mod rational;
pub mod report;
pub mod toy;

pub use error::{Error, Result};
pub use rational::Rational;
