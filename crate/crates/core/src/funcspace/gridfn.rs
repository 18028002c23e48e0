use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::map::PiecewiseMap;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Complex samples of a function on a [`Grid`]; zero outside the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
    truncated: bool,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|z| !z.is_finite()) {
            return Err(Error::PreconditionViolated(format!(
                "non-finite value at t = {}",
                grid.point(i)
            )));
        }
        Ok(GridFunction {
            grid,
            values,
            truncated: false,
        })
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction {
            grid,
            values: vec![ZERO; grid.len()],
            truncated: false,
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().map(f).collect();
        GridFunction::new(grid, values).expect("sampled function must be finite")
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |t| Complex64::new(f(t), 0.0))
    }

    /// Samples of a real piecewise map, cut to zero outside `[lo, hi]`.
    pub fn from_map(grid: Grid, map: &PiecewiseMap, lo: f64, hi: f64) -> Self {
        Self::from_real_fn(grid, |t| if t < lo || t > hi { 0.0 } else { map.eval(t) })
    }

    /// Tent of the given height at `center` with support `[center - r, center + r]`.
    pub fn bump(grid: Grid, center: f64, r: f64, height: f64) -> Self {
        Self::from_real_fn(grid, |t| height * (1.0 - (t - center).abs() / r).max(0.0))
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn value(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn with_truncated(mut self, truncated: bool) -> Self {
        self.truncated = truncated;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| *z == ZERO)
    }

    /// Indices of nonzero samples.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.iter().enumerate().filter(|(_, z)| **z != ZERO).map(|(i, _)| i)
    }

    /// Linear interpolation between neighbouring samples; 0 outside `[-L, L]`.
    pub fn interpolate(&self, t: f64) -> Complex64 {
        let u = self.grid.coordinate(t);
        let last = (self.values.len() - 1) as f64;
        if !(0.0..=last).contains(&u) {
            return ZERO;
        }
        let i = u.floor();
        let frac = u - i;
        let i = i as usize;
        if frac == 0.0 {
            return self.values[i];
        }
        self.values[i] + (self.values[i + 1] - self.values[i]) * frac
    }

    /// Zero every sample outside `mask`.
    pub fn restrict(&self, mask: &[usize]) -> Self {
        let mut values = vec![ZERO; self.values.len()];
        for &i in mask {
            values[i] = self.values[i];
        }
        GridFunction {
            grid: self.grid,
            values,
            truncated: self.truncated,
        }
    }

    /// Keep samples whose grid point satisfies `keep`.
    pub fn restrict_where(&self, keep: impl Fn(f64) -> bool) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, z)| if keep(self.grid.point(i)) { *z } else { ZERO })
            .collect();
        GridFunction {
            grid: self.grid,
            values,
            truncated: self.truncated,
        }
    }

    pub fn map_values(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, z)| f(self.grid.point(i), *z))
            .collect();
        GridFunction {
            grid: self.grid,
            values,
            truncated: self.truncated,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_values(|_, z| z * c)
    }

    /// `a*self + b*other`.
    pub fn combine(&self, a: Complex64, other: &GridFunction, b: Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(GridFunction {
            grid: self.grid,
            values,
            truncated: self.truncated || other.truncated,
        })
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        (self.grid.step() * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// `h * sum f_i conj(g_i)`.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(f, g)| f * g.conj()).sum();
        Ok(s * self.grid.step())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> std::result::Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        for (i, z) in self.values.iter().enumerate() {
            out.serialize(CsvRow {
                t: self.grid.point(i),
                re: z.re,
                im: z.im,
            })?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads `t,re,im` rows written by [`GridFunction::write_csv`].
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rows = Vec::new();
        for rec in csv::Reader::from_reader(r).deserialize::<CsvRow>() {
            rows.push(rec.map_err(|e| Error::InvalidGrid(e.to_string()))?);
        }
        if rows.len() < 3 {
            return Err(Error::InvalidGrid("need at least three rows".into()));
        }
        let grid = Grid::new(-rows[0].t, rows[1].t - rows[0].t)?;
        if grid.len() != rows.len() || rows.iter().enumerate().any(|(i, r)| (r.t - grid.point(i)).abs() > 1e-9) {
            return Err(Error::InvalidGrid("t column is not a symmetric uniform grid".into()));
        }
        GridFunction::new(grid, rows.iter().map(|r| Complex64::new(r.re, r.im)).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    t: f64,
    re: f64,
    im: f64,
}

/// Which norm to measure a [`GridFunction`] in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NormKind {
    Sup,
    L2,
    Segal { tau: PiecewiseMap, tail_tol: f64 },
}

impl NormKind {
    pub fn segal(tau: PiecewiseMap, tail_tol: f64) -> Self {
        NormKind::Segal { tau, tail_tol }
    }
}

pub fn norm(f: &GridFunction, kind: &NormKind) -> Result<f64> {
    match kind {
        NormKind::Sup => Ok(f.sup_norm()),
        NormKind::L2 => Ok(f.l2_norm()),
        NormKind::Segal { tau, tail_tol } => segal_norm(f, tau, *tail_tol),
    }
}

fn segal_norm(f: &GridFunction, tau: &PiecewiseMap, tail_tol: f64) -> Result<f64> {
    let grid = f.grid();
    segal_series(
        f.support().map(|i| (f.values()[i].norm(), tau.eval(grid.point(i)).abs())).collect(),
        tail_tol,
    )
}

/// `sum_k max_i m_i |tau_i|^k` over pairs `(m_i, |tau_i|)`, stopped at the first
/// `k` whose geometric tail bound is at most `tail_tol`. Pairs with `m_i = 0`
/// are outside the support and ignored.
pub(crate) fn segal_series(mut cur: Vec<(f64, f64)>, tail_tol: f64) -> Result<f64> {
    cur.retain(|p| p.0 > 0.0);
    if cur.is_empty() {
        return Ok(0.0);
    }
    let rho = cur.iter().map(|p| p.1).fold(0.0, f64::max);
    if rho >= 1.0 {
        return Err(Error::DivergentSegalNorm { sup_tau: rho });
    }
    let mut sum = 0.0;
    loop {
        let term = cur.iter().map(|p| p.0).fold(0.0, f64::max);
        sum += term;
        // later terms are bounded by term * rho^j
        if term * rho / (1.0 - rho) <= tail_tol {
            return Ok(sum);
        }
        for p in cur.iter_mut() {
            p.0 *= p.1;
        }
    }
}
