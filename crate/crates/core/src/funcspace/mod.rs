//! Discretized function spaces on a uniform grid.

mod grid;
mod gridfn;
mod homeo;
mod map;
mod weight;

pub use grid::{Grid, GridSpec};
pub use gridfn::{norm, GridFunction, NormKind};
pub(crate) use gridfn::segal_series;
pub use homeo::{aperiodicity_bound, AffineHomeo, Aperiodicity, Direction, Homeo};
pub use map::{MapSpec, PiecewiseMap};
pub use weight::{SpecialWeight, Weight};
