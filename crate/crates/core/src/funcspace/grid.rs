use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform symmetric grid `t_i = -L + i*h`, `i = 0..=2L/h`.
///
/// Stored as `(1/h, L/h)` in integers so that every integer in `[-L, L]` is a
/// grid point and grid coordinates are computed without accumulated error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    per_unit: u32,
    half_cells: usize,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub step: f64,
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;
    fn try_from(s: GridSpec) -> Result<Self> {
        Grid::new(s.half_width, s.step)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec {
            half_width: g.half_width(),
            step: g.step(),
        }
    }
}

fn near_integer(x: f64) -> Option<u64> {
    let r = x.round();
    ((x - r).abs() <= 1e-9 * x.abs().max(1.0) && r >= 1.0).then_some(r as u64)
}

impl Grid {
    pub fn new(half_width: f64, step: f64) -> Result<Self> {
        if !(half_width > 0.0 && step > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "need L > 0 and h > 0, got L = {half_width}, h = {step}"
            )));
        }
        let per_unit = near_integer(1.0 / step)
            .ok_or_else(|| Error::InvalidGrid(format!("1/h must be a positive integer, h = {step}")))?;
        let half_cells = near_integer(half_width * per_unit as f64).ok_or_else(|| {
            Error::InvalidGrid(format!("L/h must be a positive integer, L = {half_width}, h = {step}"))
        })?;
        Ok(Grid {
            per_unit: per_unit as u32,
            half_cells: half_cells as usize,
        })
    }

    /// Grid on `[-half_width, half_width]` with `per_unit` points per unit length.
    pub fn uniform(half_width: u32, per_unit: u32) -> Self {
        assert!(half_width > 0 && per_unit > 0);
        Grid {
            per_unit,
            half_cells: half_width as usize * per_unit as usize,
        }
    }

    pub fn len(&self) -> usize {
        2 * self.half_cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn per_unit(&self) -> u32 {
        self.per_unit
    }

    pub fn step(&self) -> f64 {
        1.0 / self.per_unit as f64
    }

    pub fn half_width(&self) -> f64 {
        self.half_cells as f64 / self.per_unit as f64
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        (i as f64 - self.half_cells as f64) / self.per_unit as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Fractional grid coordinate of `t` (0 at `-L`).
    #[inline]
    pub fn coordinate(&self, t: f64) -> f64 {
        t * self.per_unit as f64 + self.half_cells as f64
    }

    /// Index of `t` if it is exactly a grid point.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let u = self.coordinate(t);
        (u >= 0.0 && u.fract() == 0.0 && (u as usize) < self.len()).then_some(u as usize)
    }

    pub fn contains(&self, t: f64) -> bool {
        t.abs() <= self.half_width()
    }

    /// Indices of grid points inside `[lo, hi]`.
    pub fn indices_in(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let a = self.coordinate(lo).ceil().max(0.0) as usize;
        let b = (self.coordinate(hi).floor() + 1.0).clamp(0.0, self.len() as f64) as usize;
        a..b.max(a)
    }

    /// `(m, index)` for every integer `m` in `[-L, L]`.
    pub fn integer_points(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        let lmax = (self.half_cells / self.per_unit as usize) as i64;
        (-lmax..=lmax).map(move |m| (m, (m * self.per_unit as i64 + self.half_cells as i64) as usize))
    }

    /// Largest integer inside the grid.
    pub fn max_integer(&self) -> i64 {
        (self.half_cells / self.per_unit as usize) as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_are_grid_points() {
        let g = Grid::new(4.0, 0.25).unwrap();
        assert_eq!(g.len(), 33);
        for (m, i) in g.integer_points() {
            assert_eq!(g.point(i), m as f64);
            assert_eq!(g.index_of(m as f64), Some(i));
        }
        assert_eq!(g.index_of(0.1), None);
        assert_eq!(g.index_of(5.0), None);
    }

    #[test]
    fn rejects_non_integer_resolution() {
        assert!(Grid::new(4.0, 0.3).is_err());
        assert!(Grid::new(1.1, 0.25).is_err());
        assert!(Grid::new(-1.0, 0.25).is_err());
        let g = Grid::new(2.0, 1.0 / 3.0).unwrap();
        assert_eq!(g.index_of(1.0), Some(9));
    }

    #[test]
    fn window_indices() {
        let g = Grid::uniform(4, 4);
        let r = g.indices_in(-1.0, 1.0);
        assert_eq!(r.len(), 9);
        assert_eq!(g.point(r.start), -1.0);
        assert_eq!(g.indices_in(0.0, 0.0).len(), 1);
        assert_eq!(g.indices_in(-100.0, 100.0).len(), g.len());
    }

    #[test]
    fn json_round_trip() {
        let g: Grid = serde_json::from_str(r#"{"half_width":64,"step":0.25}"#).unwrap();
        assert_eq!(g, Grid::uniform(64, 4));
        let back: Grid = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }
}
