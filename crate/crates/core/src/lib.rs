pub mod bernoulli;
pub mod catalog;
pub mod cli;
pub mod cmdeg;
pub mod context;
pub mod error;
pub mod grid;
pub mod inequalities;
pub mod kernel;
pub mod polygamma;
pub mod quad;
pub mod report;
pub mod series;
pub mod strongcm;

#[cfg(test)]
mod testutil;

pub use catalog::CatalogFunction;
pub use context::EvalContext;
pub use error::{Error, Result};
pub use grid::Grid;
