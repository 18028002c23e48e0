//! Weighted composition operators on discretized function spaces: criterion
//! evaluators for supercyclicity, Cesàro hyper-transitivity and
//! hypercyclicity, adjoint dynamics on atomic measures, and porosity
//! constructions.

pub mod criteria;
pub mod dynamics;
pub mod error;
pub mod funcspace;
pub mod measure;
pub mod operator;
pub mod porosity;
pub mod presets;
pub mod product;

pub use error::{Error, Result};
