use serde::{Deserialize, Serialize};

use super::homeo::Homeo;
use super::map::PiecewiseMap;
use crate::error::{Error, Result};

/// A bounded positive weight on the real line.
///
/// Plain piecewise maps cover the continuous weights. The step weight and the
/// two derived forms are needed for the inverse operator and for weights that
/// are only piecewise constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weight {
    Map(PiecewiseMap),
    Special(SpecialWeight),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpecialWeight {
    /// `right` on `t >= 0` and `(m+1)/m` on `[-m, -m+1)`.
    HarmonicSteps { right: f64 },
    /// `1 / of(t)`.
    Reciprocal { of: Box<Weight> },
    /// `of(alpha(t))`, or `of(alpha^{-1}(t))` when `inverse` is set.
    Precomposed {
        of: Box<Weight>,
        homeo: Homeo,
        #[serde(default)]
        inverse: bool,
    },
}

impl From<PiecewiseMap> for Weight {
    fn from(m: PiecewiseMap) -> Self {
        Weight::Map(m)
    }
}

impl Weight {
    pub fn constant(c: f64) -> Self {
        Weight::Map(PiecewiseMap::constant(c))
    }

    pub fn harmonic_steps(right: f64) -> Self {
        Weight::Special(SpecialWeight::HarmonicSteps { right })
    }

    pub fn reciprocal(self) -> Self {
        Weight::Special(SpecialWeight::Reciprocal { of: Box::new(self) })
    }

    pub fn precomposed(self, homeo: Homeo, inverse: bool) -> Self {
        Weight::Special(SpecialWeight::Precomposed {
            of: Box::new(self),
            homeo,
            inverse,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Weight::Map(m) => m.eval(t),
            Weight::Special(SpecialWeight::HarmonicSteps { right }) => {
                if t >= 0.0 {
                    *right
                } else {
                    let m = (-t).ceil();
                    (m + 1.0) / m
                }
            }
            Weight::Special(SpecialWeight::Reciprocal { of }) => 1.0 / of.eval(t),
            Weight::Special(SpecialWeight::Precomposed { of, homeo, inverse }) => {
                let s = if *inverse { homeo.inverse(t) } else { homeo.forward(t) };
                of.eval(s)
            }
        }
    }

    /// `(inf, sup)` over the real line.
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            Weight::Map(m) => (m.inf(), m.sup()),
            Weight::Special(SpecialWeight::HarmonicSteps { right }) => (right.min(1.0), right.max(2.0)),
            Weight::Special(SpecialWeight::Reciprocal { of }) => {
                let (lo, hi) = of.bounds();
                (1.0 / hi, 1.0 / lo)
            }
            Weight::Special(SpecialWeight::Precomposed { of, .. }) => of.bounds(),
        }
    }

    /// Checks `0 < inf w <= sup w < inf`.
    pub fn validate(&self) -> Result<()> {
        let (inf, sup) = self.bounds();
        if inf > 0.0 && sup.is_finite() && inf <= sup {
            Ok(())
        } else {
            Err(Error::WeightNotBounded { inf, sup })
        }
    }
}
