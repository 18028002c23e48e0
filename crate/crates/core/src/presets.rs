//! Named operators with pinned parameters.
//!
//! All composition presets translate by one unit. Ramp weights are constant
//! outside `[-1, 1]` and affine on it.

use crate::error::{Error, Result};
use crate::funcspace::{Homeo, PiecewiseMap, Weight};
use crate::operator::{BilateralShift, CompositionOperator, Orientation};

#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub id: &'static str,
    pub operator: CompositionOperator,
    /// Parameter choices, in words.
    pub note: &'static str,
}

pub const PRESET_IDS: [&str; 6] = ["ex3.5", "ex3.6", "ex3.7", "ex3.8", "ex4.3a", "ex4.3b"];

pub fn ramp(left: f64, right: f64) -> Weight {
    PiecewiseMap::ramp(-1.0, left, 1.0, right)
        .expect("ramp breakpoints are ordered")
        .into()
}

fn translate(shift: f64, weight: Weight) -> CompositionOperator {
    CompositionOperator::new(Homeo::translation(shift).expect("nonzero shift"), weight).expect("bounded weight")
}

pub fn preset(id: &str) -> Result<Preset> {
    let (operator, note) = match id {
        "ex3.5" => (
            translate(-1.0, ramp(2.0, 1.0)),
            "alpha(t) = t - 1; w = 2 for t <= -1 (M = 2, delta = 1/2), w = 1 for t >= 1",
        ),
        "ex3.6" => (
            translate(1.0, ramp(0.5, 1.0)),
            "alpha(t) = t + 1; w = 1/M = 1/2 for t <= -1 (M = 2, delta = 1), w = 1 for t >= 1",
        ),
        "ex3.7" => (
            translate(-1.0, ramp(4.0, 2.0)),
            "alpha(t) = t - 1; M = 4, delta = 1: w = 4 for t <= -1, 2 for t >= 1",
        ),
        "ex3.8" => (
            translate(-1.0, Weight::harmonic_steps(0.5)),
            "alpha(t) = t - 1; w = 1/2 for t >= 0, (m + 1)/m on [-m, -m + 1)",
        ),
        "ex4.3a" => (
            translate(1.0, ramp(2.0, 1.0)),
            "alpha(t) = t + 1; w = 2 for t <= -1 (M = 2, delta = 1/2), w = 1 for t >= 1",
        ),
        "ex4.3b" => (
            translate(-1.0, ramp(0.5, 1.0)),
            "alpha(t) = t - 1; w = 1/2 for t <= -1 (M = 2, delta = 1), w = 1 for t >= 1",
        ),
        _ => return Err(Error::PreconditionViolated(format!("unknown preset {id:?}"))),
    };
    let id = PRESET_IDS.iter().copied().find(|p| *p == id).expect("listed");
    Ok(Preset { id, operator, note })
}

/// Forward bilateral shift with weights `1/2` for `j >= 0` and `(m + 1)/m` at `j = -m`.
pub fn harmonic_shift(window: (i64, i64)) -> BilateralShift {
    BilateralShift::new(Weight::harmonic_steps(0.5), Orientation::Forward, window).expect("valid window")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_preset_builds() {
        for id in PRESET_IDS {
            assert_eq!(preset(id).unwrap().id, id);
        }
        assert!(preset("ex9.9").is_err());
    }
}
