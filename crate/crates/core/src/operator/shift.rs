use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Orientation;
use crate::error::Result;
use crate::funcspace::Weight;
use crate::product::ScaledProduct;

/// Bilateral weighted shift on sequences indexed by the integers.
///
/// Weights are read off a [`Weight`] at integer arguments. Forward:
/// `e_j -> w_j e_{j+1}`; backward: `e_j -> w_j e_{j-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilateralShift {
    pub weight: Weight,
    pub orientation: Orientation,
    /// Stored index range `[lo, hi]`.
    pub window: (i64, i64),
}

/// Coordinates `x_lo ..= x_hi` of a sequence, zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftVector {
    pub lo: i64,
    pub values: Vec<Complex64>,
    pub truncated: bool,
}

impl ShiftVector {
    pub fn zeros(window: (i64, i64)) -> Self {
        ShiftVector {
            lo: window.0,
            values: vec![Complex64::new(0.0, 0.0); (window.1 - window.0 + 1) as usize],
            truncated: false,
        }
    }

    /// Unit vector `e_k`.
    pub fn unit(window: (i64, i64), k: i64) -> Self {
        let mut v = Self::zeros(window);
        v.set(k, Complex64::new(1.0, 0.0));
        v
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn get(&self, j: i64) -> Complex64 {
        if j < self.lo || j > self.hi() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[(j - self.lo) as usize]
        }
    }

    /// Writes inside the window; reports whether `j` was inside.
    pub fn set(&mut self, j: i64, z: Complex64) -> bool {
        if j < self.lo || j > self.hi() {
            return false;
        }
        let lo = self.lo;
        self.values[(j - lo) as usize] = z;
        true
    }
}

impl BilateralShift {
    pub fn new(weight: Weight, orientation: Orientation, window: (i64, i64)) -> Result<Self> {
        weight.validate()?;
        assert!(window.0 <= window.1, "empty index window");
        Ok(BilateralShift {
            weight,
            orientation,
            window,
        })
    }

    pub fn w(&self, j: i64) -> f64 {
        self.weight.eval(j as f64)
    }

    fn step(&self) -> i64 {
        match self.orientation {
            Orientation::Forward => 1,
            Orientation::Backward => -1,
        }
    }

    /// `||T^n e_j||`: the weights met by `e_j` over `n` steps.
    pub fn power_product(&self, n: u64, j: i64) -> ScaledProduct {
        let s = self.step();
        (0..n as i64).fold(ScaledProduct::ONE, |acc, i| acc.times(self.w(j + s * i)))
    }

    /// `1 / ||S^n e_j||` for the right inverse `S`: the weights that carry
    /// `e_{j - n}` (forward) onto `e_j`.
    pub fn inverse_product(&self, n: u64, j: i64) -> ScaledProduct {
        let s = self.step();
        (1..=n as i64).fold(ScaledProduct::ONE, |acc, i| acc.times(self.w(j - s * i)))
    }
}

/// `T^n x`, applied one step at a time; mass leaving the window sets `truncated`.
pub fn shift_apply(s: &BilateralShift, x: &ShiftVector, n: u64) -> ShiftVector {
    let step = s.step();
    let mut cur = x.clone();
    for _ in 0..n {
        let mut next = ShiftVector::zeros((cur.lo, cur.hi()));
        next.truncated = cur.truncated;
        for (k, z) in cur.values.iter().enumerate() {
            if *z == Complex64::new(0.0, 0.0) {
                continue;
            }
            let j = cur.lo + k as i64;
            if !next.set(j + step, z * s.w(j)) {
                next.truncated = true;
            }
        }
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rem310() -> BilateralShift {
        BilateralShift::new(Weight::harmonic_steps(0.5), Orientation::Forward, (-10, 10)).unwrap()
    }

    #[test]
    fn unit_weights_shift_indices() {
        let s = BilateralShift::new(Weight::constant(1.0), Orientation::Forward, (-3, 3)).unwrap();
        let y = shift_apply(&s, &ShiftVector::unit((-3, 3), 1), 1);
        assert_eq!(y, ShiftVector::unit((-3, 3), 2));
        let b = BilateralShift::new(Weight::constant(1.0), Orientation::Backward, (-3, 3)).unwrap();
        assert_eq!(shift_apply(&b, &ShiftVector::unit((-3, 3), 1), 1), ShiftVector::unit((-3, 3), 0));
    }

    #[test]
    fn harmonic_weights() {
        let s = rem310();
        let y = shift_apply(&s, &ShiftVector::unit(s.window, 0), 2);
        assert_eq!(y.get(2), Complex64::new(0.25, 0.0));
        assert_eq!(y.values.iter().filter(|z| z.norm() > 0.0).count(), 1);
        let z = shift_apply(&s, &ShiftVector::unit(s.window, -3), 1);
        assert_eq!(z.get(-2), Complex64::new(4.0 / 3.0, 0.0));
    }

    #[test]
    fn products_match_iteration() {
        let s = rem310();
        for j in -4..=4 {
            for n in 1..6 {
                let y = shift_apply(&s, &ShiftVector::unit(s.window, j), n);
                let expect = s.power_product(n, j).value();
                assert!((y.get(j + n as i64).re - expect).abs() <= 1e-15 * expect);
                // e_{j-n} is carried onto e_j by the inverse product
                let back = shift_apply(&s, &ShiftVector::unit(s.window, j - n as i64), n);
                let inv = s.inverse_product(n, j).value();
                assert!((back.get(j).re - inv).abs() <= 1e-15 * inv);
            }
        }
    }

    #[test]
    fn leaving_window_truncates() {
        let s = rem310();
        let y = shift_apply(&s, &ShiftVector::unit(s.window, 9), 2);
        assert!(y.truncated);
        assert!(y.values.iter().all(|z| z.norm() == 0.0));
    }
}
