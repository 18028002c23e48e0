use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Continuous piecewise-affine real function with constant tails, optionally
/// repeated with a fixed period.
///
/// JSON form: `{"breakpoints":[..], "values":[..], "left_tail":x, "right_tail":y}`
/// with an optional `"period"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapSpec", into = "MapSpec")]
pub struct PiecewiseMap {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    period: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapSpec {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    pub left_tail: f64,
    pub right_tail: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
}

impl TryFrom<MapSpec> for PiecewiseMap {
    type Error = Error;
    fn try_from(s: MapSpec) -> Result<Self> {
        let map = PiecewiseMap::new(s.breakpoints, s.values)?;
        let (l, r) = (map.values[0], *map.values.last().unwrap());
        if s.left_tail != l || s.right_tail != r {
            return Err(Error::InvalidMap(format!(
                "tails ({}, {}) break continuity with end values ({l}, {r})",
                s.left_tail, s.right_tail
            )));
        }
        match s.period {
            Some(_) => map.into_periodic(),
            None => Ok(map),
        }
    }
}

impl From<PiecewiseMap> for MapSpec {
    fn from(m: PiecewiseMap) -> Self {
        MapSpec {
            left_tail: m.values[0],
            right_tail: *m.values.last().unwrap(),
            period: m.period,
            breakpoints: m.breakpoints,
            values: m.values,
        }
    }
}

impl PiecewiseMap {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::InvalidMap(format!(
                "need matching nonempty breakpoints/values, got {} and {}",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidMap("non-finite coefficient".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMap("breakpoints must be strictly increasing".into()));
        }
        Ok(PiecewiseMap {
            breakpoints,
            values,
            period: None,
        })
    }

    pub fn constant(c: f64) -> Self {
        PiecewiseMap::new(vec![0.0], vec![c]).expect("finite constant")
    }

    /// Affine ramp from `(a, va)` to `(b, vb)`, constant outside.
    pub fn ramp(a: f64, va: f64, b: f64, vb: f64) -> Result<Self> {
        PiecewiseMap::new(vec![a, b], vec![va, vb])
    }

    /// Periodic extension of the pattern on `[b_0, b_m]`; needs equal end values.
    pub fn periodic(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        PiecewiseMap::new(breakpoints, values)?.into_periodic()
    }

    fn into_periodic(mut self) -> Result<Self> {
        if self.breakpoints.len() < 2 || self.values[0] != *self.values.last().unwrap() {
            return Err(Error::InvalidMap(
                "periodic pattern needs two breakpoints and equal end values".into(),
            ));
        }
        self.period = Some(self.breakpoints.last().unwrap() - self.breakpoints[0]);
        Ok(self)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn eval(&self, t: f64) -> f64 {
        let b = &self.breakpoints;
        let t = match self.period {
            Some(p) => b[0] + (t - b[0]).rem_euclid(p),
            None => t,
        };
        if t <= b[0] {
            return self.values[0];
        }
        let last = b.len() - 1;
        if t >= b[last] {
            return self.values[last];
        }
        let i = b.partition_point(|&x| x <= t);
        let (t0, t1) = (b[i - 1], b[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        if t == t0 {
            return v0;
        }
        v0 + (t - t0) / (t1 - t0) * (v1 - v0)
    }

    pub fn inf(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_positive(&self) -> bool {
        self.inf() > 0.0
    }

    /// `t -> self(t - c)`.
    pub fn shifted(&self, c: f64) -> Self {
        PiecewiseMap {
            breakpoints: self.breakpoints.iter().map(|b| b + c).collect(),
            values: self.values.clone(),
            period: self.period,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_map() {
        assert_eq!(PiecewiseMap::constant(2.0).eval(-7.3), 2.0);
    }

    #[test]
    fn ex37_weight_at_zero() {
        // M = 4, delta = 1: M + (t+1)/2 (1 + delta - M)
        let w = PiecewiseMap::ramp(-1.0, 4.0, 1.0, 2.0).unwrap();
        assert_eq!(w.eval(0.0), 3.0);
        assert_eq!(w.eval(-5.0), 4.0);
        assert_eq!(w.eval(9.0), 2.0);
    }

    #[test]
    fn ramp_midpoint() {
        let w = PiecewiseMap::ramp(-1.0, 2.0, 1.0, 1.0).unwrap();
        assert_eq!(w.eval(0.0), 1.5);
    }

    #[test]
    fn exact_at_breakpoints() {
        let w = PiecewiseMap::new(vec![-1.0, 0.3, 2.0], vec![1.0, 7.0, 3.0]).unwrap();
        assert_eq!(w.eval(0.3), 7.0);
        assert_eq!(w.eval(2.0), 3.0);
    }

    #[test]
    fn periodic_map_repeats() {
        let tau = PiecewiseMap::periodic(vec![0.0, 0.5, 1.0], vec![0.25, 0.5, 0.25]).unwrap();
        for k in -5..5 {
            let t = k as f64 + 0.25;
            assert!((tau.eval(t) - 0.375).abs() < 1e-15);
            assert_eq!(tau.eval(k as f64 + 0.5), 0.5);
        }
        assert!(PiecewiseMap::periodic(vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PiecewiseMap::new(vec![1.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(PiecewiseMap::new(vec![], vec![]).is_err());
        let bad = r#"{"breakpoints":[0,1],"values":[1,2],"left_tail":0,"right_tail":2}"#;
        assert!(serde_json::from_str::<PiecewiseMap>(bad).is_err());
    }

    #[test]
    fn json_form() {
        let s = r#"{"breakpoints":[-1,1],"values":[2,1],"left_tail":2,"right_tail":1}"#;
        let m: PiecewiseMap = serde_json::from_str(s).unwrap();
        assert_eq!(m.eval(0.0), 1.5);
        let v: serde_json::Value = serde_json::to_value(&m).unwrap();
        assert_eq!(v["left_tail"], 2.0);
        assert_eq!(v["right_tail"], 1.0);
    }
}
