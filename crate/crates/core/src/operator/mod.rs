//! The weighted composition operator `T f = w * (f o alpha)`, its inverse, and
//! bilateral weighted shifts.
//!
//! Powers are evaluated in closed form,
//! `T^n f(t) = a_n(t) f(alpha^n t)` and `S^n f(t) = f(alpha^{-n} t) / b_n(t)`, with
//! `a_n(t) = prod_{j=0}^{n-1} w(alpha^j t)` and `b_n(t) = prod_{j=1}^{n} w(alpha^{-j} t)`.

mod shift;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{self, CompactWindow, CriterionVerdict, FactorSweep};
use crate::error::{Error, Result};
use crate::funcspace::{Grid, GridFunction, Homeo, PiecewiseMap, Weight};
use crate::product::ScaledProduct;

pub use shift::{shift_apply, BilateralShift, ShiftVector};

/// Which cocycle product, or which way a shift moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Forward,
    Backward,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorSpec", into = "OperatorSpec")]
pub struct CompositionOperator {
    alpha: Homeo,
    weight: Weight,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub alpha: Homeo,
    pub weight: Weight,
}

impl TryFrom<OperatorSpec> for CompositionOperator {
    type Error = Error;
    fn try_from(s: OperatorSpec) -> Result<Self> {
        CompositionOperator::new(s.alpha, s.weight)
    }
}

impl From<CompositionOperator> for OperatorSpec {
    fn from(op: CompositionOperator) -> Self {
        OperatorSpec {
            alpha: op.alpha,
            weight: op.weight,
        }
    }
}

/// Points `alpha^{j}(t)` for `j = start, start + step, ...`.
pub(crate) struct Orbit<'a> {
    alpha: &'a Homeo,
    origin: f64,
    x: f64,
    j: i64,
    step: i64,
}

impl<'a> Orbit<'a> {
    pub(crate) fn new(alpha: &'a Homeo, t: f64, start: i64, step: i64) -> Self {
        Orbit {
            alpha,
            origin: t,
            x: alpha.iterate(t, start),
            j: start,
            step,
        }
    }
}

impl Iterator for Orbit<'_> {
    type Item = f64;
    fn next(&mut self) -> Option<f64> {
        let out = self.x;
        self.j += self.step;
        self.x = match self.alpha {
            // direct formula avoids accumulating rounding in the shift
            Homeo::Translation { shift } => self.origin + self.j as f64 * shift,
            Homeo::PiecewiseAffine(_) => self.alpha.iterate(self.x, self.step),
        };
        Some(out)
    }
}

impl CompositionOperator {
    pub fn new(alpha: Homeo, weight: Weight) -> Result<Self> {
        if let Homeo::Translation { shift } = alpha {
            if shift == 0.0 || !shift.is_finite() {
                return Err(Error::NonInvertible(format!("translation by {shift}")));
            }
        }
        weight.validate()?;
        Ok(CompositionOperator { alpha, weight })
    }

    pub fn alpha(&self) -> &Homeo {
        &self.alpha
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    /// `S` written as a composition operator: `(alpha^{-1}, 1 / (w o alpha^{-1}))`.
    pub fn inverse(&self) -> CompositionOperator {
        CompositionOperator {
            alpha: self.alpha.inverted(),
            weight: self.weight.clone().precomposed(self.alpha.clone(), true).reciprocal(),
        }
    }

    /// `(alpha^{-1}, w o alpha^{-1})`, whose criteria match the adjoint criteria of `self`.
    pub fn adjoint_dual(&self) -> CompositionOperator {
        CompositionOperator {
            alpha: self.alpha.inverted(),
            weight: self.weight.clone().precomposed(self.alpha.clone(), true),
        }
    }

    /// `a_n(t) = prod_{j=0}^{n-1} w(alpha^j t)`.
    pub fn forward_product(&self, n: u64, t: f64) -> ScaledProduct {
        Orbit::new(&self.alpha, t, 0, 1)
            .take(n as usize)
            .fold(ScaledProduct::ONE, |acc, x| acc.times(self.weight.eval(x)))
    }

    /// `b_n(t) = prod_{j=1}^{n} w(alpha^{-j} t)`.
    pub fn backward_product(&self, n: u64, t: f64) -> ScaledProduct {
        Orbit::new(&self.alpha, t, -1, -1)
            .take(n as usize)
            .fold(ScaledProduct::ONE, |acc, x| acc.times(self.weight.eval(x)))
    }

    pub fn cocycle(&self, n: u64, t: f64, orientation: Orientation) -> f64 {
        match orientation {
            Orientation::Forward => self.forward_product(n, t).value(),
            Orientation::Backward => self.backward_product(n, t).value(),
        }
    }

    pub fn apply_t(&self, f: &GridFunction) -> Result<GridFunction> {
        self.apply_tn(f, 1)
    }

    pub fn apply_s(&self, f: &GridFunction) -> Result<GridFunction> {
        self.apply_sn(f, 1)
    }

    /// `T^n f`; fails only if a value overflows `f64`.
    pub fn apply_tn(&self, f: &GridFunction, n: u64) -> Result<GridFunction> {
        self.power(f, n, Orientation::Forward)
    }

    /// `S^n f`; fails only if a value overflows `f64`.
    pub fn apply_sn(&self, f: &GridFunction, n: u64) -> Result<GridFunction> {
        self.power(f, n, Orientation::Backward)
    }

    fn power(&self, f: &GridFunction, n: u64, orientation: Orientation) -> Result<GridFunction> {
        if n == 0 {
            return Ok(f.clone());
        }
        let grid = f.grid();
        let k = n as i64;
        let sign = match orientation {
            Orientation::Forward => 1,
            Orientation::Backward => -1,
        };
        let values: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let t = grid.point(i);
                let v = f.interpolate(self.alpha.iterate(t, sign * k));
                if v == Complex64::new(0.0, 0.0) {
                    return v;
                }
                match orientation {
                    Orientation::Forward => v * self.forward_product(n, t).value(),
                    Orientation::Backward => v / self.backward_product(n, t).value(),
                }
            })
            .collect();
        // mass of f at s lands at alpha^{-+n}(s)
        let lost = f.support().any(|i| !grid.contains(self.alpha.iterate(grid.point(i), -sign * k)));
        Ok(GridFunction::new(grid, values)?.with_truncated(f.is_truncated() || lost))
    }

    /// `max_t |tau(alpha(t)) - tau(t)|` over the grid is at most `tol`.
    pub fn segal_compatible(&self, tau: &PiecewiseMap, grid: &Grid, tol: f64) -> bool {
        self.segal_deviation(tau, grid) <= tol
    }

    pub fn segal_deviation(&self, tau: &PiecewiseMap, grid: &Grid) -> f64 {
        grid.points()
            .map(|t| (tau.eval(self.alpha.forward(t)) - tau.eval(t)).abs())
            .fold(0.0, f64::max)
    }
}

/// Scalar condition for the wedge and two-sided multiplication operators:
/// `sup_K prod_{j<n} w(alpha^{j-n} t) * sup_K prod_{j<n} w(alpha^j t)^{-1}` over
/// `K = [-m, m]` sampled with step 1/4.
pub fn wedge_condition(op: &CompositionOperator, m: u32, horizon: u64, tol: f64) -> CriterionVerdict {
    assert!(m >= 1, "window half-width must be at least 1");
    let window = CompactWindow::interval(m as f64, 4);
    let mut sweep = FactorSweep::new(op, window.points(), window.points());
    criteria::record_minima("WEDGE", horizon, tol, |_| {
        sweep.advance();
        sweep.max_inv_forward().mul(sweep.max_backward())
    })
}
