use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

/// Homeomorphism of the real line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Homeo {
    Translation { shift: f64 },
    PiecewiseAffine(AffineHomeo),
}

/// Strictly monotone continuous piecewise-affine map with affine tails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AffineSpec", into = "AffineSpec")]
pub struct AffineHomeo {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    left_slope: f64,
    right_slope: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AffineSpec {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    pub left_slope: f64,
    pub right_slope: f64,
}

impl TryFrom<AffineSpec> for AffineHomeo {
    type Error = Error;
    fn try_from(s: AffineSpec) -> Result<Self> {
        AffineHomeo::new(s.breakpoints, s.values, s.left_slope, s.right_slope)
    }
}

impl From<AffineHomeo> for AffineSpec {
    fn from(a: AffineHomeo) -> Self {
        AffineSpec {
            breakpoints: a.breakpoints,
            values: a.values,
            left_slope: a.left_slope,
            right_slope: a.right_slope,
        }
    }
}

impl AffineHomeo {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, left_slope: f64, right_slope: f64) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::InvalidMap("breakpoints and values must be nonempty and match".into()));
        }
        if breakpoints.iter().chain(&values).chain([&left_slope, &right_slope]).any(|x| !x.is_finite()) {
            return Err(Error::InvalidMap("non-finite coefficient".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMap("breakpoints must be strictly increasing".into()));
        }
        let increasing = left_slope > 0.0;
        let monotone = |d: f64| if increasing { d > 0.0 } else { d < 0.0 };
        let ok = left_slope != 0.0
            && monotone(right_slope)
            && values.windows(2).all(|w| monotone(w[1] - w[0]));
        if !ok {
            return Err(Error::NonInvertible(
                "piecewise-affine map is not strictly monotone with nonzero tail slopes".into(),
            ));
        }
        Ok(AffineHomeo {
            breakpoints,
            values,
            left_slope,
            right_slope,
        })
    }

    pub fn identity() -> Self {
        AffineHomeo::new(vec![0.0], vec![0.0], 1.0, 1.0).unwrap()
    }

    fn increasing(&self) -> bool {
        self.left_slope > 0.0
    }

    pub fn forward(&self, t: f64) -> f64 {
        eval_affine(&self.breakpoints, &self.values, self.left_slope, self.right_slope, t)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        self.inverted().forward(y)
    }

    /// The inverse map in the same representation.
    pub fn inverted(&self) -> AffineHomeo {
        if self.increasing() {
            AffineHomeo {
                breakpoints: self.values.clone(),
                values: self.breakpoints.clone(),
                left_slope: 1.0 / self.left_slope,
                right_slope: 1.0 / self.right_slope,
            }
        } else {
            AffineHomeo {
                breakpoints: self.values.iter().rev().copied().collect(),
                values: self.breakpoints.iter().rev().copied().collect(),
                left_slope: 1.0 / self.right_slope,
                right_slope: 1.0 / self.left_slope,
            }
        }
    }
}

fn eval_affine(b: &[f64], v: &[f64], ls: f64, rs: f64, t: f64) -> f64 {
    let last = b.len() - 1;
    if t <= b[0] {
        return v[0] + ls * (t - b[0]);
    }
    if t >= b[last] {
        return v[last] + rs * (t - b[last]);
    }
    let i = b.partition_point(|&x| x <= t);
    let (t0, t1) = (b[i - 1], b[i]);
    if t == t0 {
        return v[i - 1];
    }
    v[i - 1] + (t - t0) / (t1 - t0) * (v[i] - v[i - 1])
}

/// Result of [`aperiodicity_bound`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aperiodicity {
    Bound(u64),
    NotVerified,
}

impl Homeo {
    pub fn translation(shift: f64) -> Result<Self> {
        if shift == 0.0 || !shift.is_finite() {
            return Err(Error::InvalidMap(format!("translation shift must be finite and nonzero, got {shift}")));
        }
        Ok(Homeo::Translation { shift })
    }

    pub fn identity() -> Self {
        Homeo::PiecewiseAffine(AffineHomeo::identity())
    }

    pub fn shift(&self) -> Option<f64> {
        match self {
            Homeo::Translation { shift } => Some(*shift),
            Homeo::PiecewiseAffine(_) => None,
        }
    }

    pub fn forward(&self, t: f64) -> f64 {
        match self {
            Homeo::Translation { shift } => t + shift,
            Homeo::PiecewiseAffine(a) => a.forward(t),
        }
    }

    pub fn inverse(&self, t: f64) -> f64 {
        match self {
            Homeo::Translation { shift } => t - shift,
            Homeo::PiecewiseAffine(a) => a.inverse(t),
        }
    }

    pub fn apply(&self, t: f64, direction: Direction) -> f64 {
        match direction {
            Direction::Forward => self.forward(t),
            Direction::Inverse => self.inverse(t),
        }
    }

    pub fn inverted(&self) -> Homeo {
        match self {
            Homeo::Translation { shift } => Homeo::Translation { shift: -shift },
            Homeo::PiecewiseAffine(a) => Homeo::PiecewiseAffine(a.inverted()),
        }
    }

    /// `alpha^n(t)` for any integer `n`; negative `n` iterates the inverse.
    pub fn iterate(&self, t: f64, n: i64) -> f64 {
        match self {
            Homeo::Translation { shift } => t + n as f64 * shift,
            Homeo::PiecewiseAffine(a) => {
                let mut x = t;
                if n >= 0 {
                    for _ in 0..n {
                        x = a.forward(x);
                    }
                } else {
                    let inv = a.inverted();
                    for _ in 0..(-n) {
                        x = inv.forward(x);
                    }
                }
                x
            }
        }
    }
}

/// First `n` with `alpha^n([-m, m])` disjoint from `[-m, m]`.
///
/// Closed form for translations; otherwise a direct search up to `horizon`.
pub fn aperiodicity_bound(a: &Homeo, m: f64, horizon: u64) -> Aperiodicity {
    assert!(m >= 0.0, "window half-width must be nonnegative");
    match a {
        Homeo::Translation { shift } => Aperiodicity::Bound((2.0 * m / shift.abs()).floor() as u64 + 1),
        Homeo::PiecewiseAffine(h) => {
            let (mut lo, mut hi) = (-m, m);
            for n in 1..=horizon {
                lo = h.forward(lo);
                hi = h.forward(hi);
                let (a, b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
                if b < -m || a > m {
                    return Aperiodicity::Bound(n);
                }
            }
            Aperiodicity::NotVerified
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn translation_examples() {
        let a = Homeo::translation(-1.0).unwrap();
        assert_eq!(a.apply(0.0, Direction::Forward), -1.0);
        let b = Homeo::translation(1.0).unwrap();
        assert_eq!(b.apply(0.0, Direction::Inverse), -1.0);
        assert_eq!(Homeo::identity().apply(3.5, Direction::Forward), 3.5);
        assert!(Homeo::translation(0.0).is_err());
    }

    #[test]
    fn aperiodicity_examples() {
        let a = Homeo::translation(-1.0).unwrap();
        assert_eq!(aperiodicity_bound(&a, 5.0, 0), Aperiodicity::Bound(11));
        assert_eq!(aperiodicity_bound(&a, 0.0, 0), Aperiodicity::Bound(1));
        let b = Homeo::translation(0.5).unwrap();
        assert_eq!(aperiodicity_bound(&b, 1.0, 0), Aperiodicity::Bound(5));
        assert_eq!(aperiodicity_bound(&Homeo::identity(), 1.0, 100), Aperiodicity::NotVerified);
    }

    #[test]
    fn affine_search_matches_translation() {
        let shifted = Homeo::PiecewiseAffine(AffineHomeo::new(vec![0.0], vec![0.5], 1.0, 1.0).unwrap());
        assert_eq!(aperiodicity_bound(&shifted, 1.0, 100), Aperiodicity::Bound(5));
        let dilation = Homeo::PiecewiseAffine(AffineHomeo::new(vec![0.0], vec![1.0], 2.0, 2.0).unwrap());
        // [-1,1] -> [-1,3] -> [-1,7]: the fixed point -1 stays inside
        assert_eq!(aperiodicity_bound(&dilation, 1.0, 50), Aperiodicity::NotVerified);
    }

    #[test]
    fn rejects_non_monotone() {
        let e = AffineHomeo::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.5], 1.0, 1.0);
        assert!(matches!(e, Err(Error::NonInvertible(_))));
        let e = AffineHomeo::new(vec![0.0], vec![0.0], 1.0, -1.0);
        assert!(matches!(e, Err(Error::NonInvertible(_))));
        let e = AffineHomeo::new(vec![0.0], vec![0.0], 0.0, 0.0);
        assert!(matches!(e, Err(Error::NonInvertible(_))));
    }

    #[test]
    fn random_round_trip() {
        let maps = [
            Homeo::translation(-1.0).unwrap(),
            Homeo::PiecewiseAffine(
                AffineHomeo::new(vec![-2.0, 0.0, 1.0, 3.0], vec![-5.0, -1.0, 0.5, 4.0], 3.0, 0.25).unwrap(),
            ),
            Homeo::PiecewiseAffine(AffineHomeo::new(vec![-1.0, 1.0], vec![2.0, -3.0], -0.5, -4.0).unwrap()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for a in &maps {
            for _ in 0..1000 {
                let t: f64 = rng.gen_range(-50.0..50.0);
                assert!((a.forward(a.inverse(t)) - t).abs() <= 1e-12 * t.abs().max(1.0));
                assert!((a.inverse(a.forward(t)) - t).abs() <= 1e-12 * t.abs().max(1.0));
            }
        }
    }

    #[test]
    fn iterate_both_directions() {
        let a = Homeo::PiecewiseAffine(AffineHomeo::new(vec![0.0], vec![0.0], 2.0, 3.0).unwrap());
        assert_eq!(a.iterate(1.0, 3), 27.0);
        assert_eq!(a.iterate(-1.0, 2), -4.0);
        assert_eq!(a.iterate(27.0, -3), 1.0);
        assert_eq!(Homeo::translation(-1.0).unwrap().iterate(0.0, -4), 4.0);
    }

    #[test]
    fn json_forms() {
        let a: Homeo = serde_json::from_str(r#"{"kind":"translation","shift":-1}"#).unwrap();
        assert_eq!(a, Homeo::translation(-1.0).unwrap());
        let s = r#"{"kind":"piecewise_affine","breakpoints":[0],"values":[0],"left_slope":1,"right_slope":1}"#;
        let b: Homeo = serde_json::from_str(s).unwrap();
        assert_eq!(b, Homeo::identity());
        let bad = r#"{"kind":"piecewise_affine","breakpoints":[0,1],"values":[0,0],"left_slope":1,"right_slope":1}"#;
        assert!(serde_json::from_str::<Homeo>(bad).is_err());
    }
}
