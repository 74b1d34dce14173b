//! Optimal accept/reject decisions for a buyer who sees one discounted price
//! in a first promotion period and must otherwise take whatever is offered in
//! the second.

pub mod cli;
pub mod config;
pub mod error;
pub mod first_mover;
pub mod grid;
pub mod pricing;
pub mod quadrature;
pub mod simulate;
pub mod strategy;

pub use error::{Error, Result};
