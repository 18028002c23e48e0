//! Overflow-safe accumulation of long products of positive weights.
//!
//! Weight cocycles reach `2^{±2000}` at the longer horizons, well outside the
//! `f64` range. [`ScaledProduct`] keeps a double-double mantissa together with
//! a separate binary exponent: every factor is multiplied in with an
//! error-free transformation and the mantissa is rescaled by exact powers of
//! two, so products of dyadic factors are exact and the accumulated rounding of
//! a general product stays at the level of a single rounding.

use std::cmp::Ordering;

/// Rescale once the mantissa leaves `[2^-RANGE, 2^RANGE]`.
const RANGE: i32 = 256;

#[inline]
fn pow2(k: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

/// `x * 2^e` without intermediate overflow.
pub fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1023 {
        x *= pow2(1023);
        e -= 1023;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1022 {
        x *= pow2(-1022);
        e += 1022;
        if x == 0.0 {
            return x;
        }
    }
    x * pow2(e as i32)
}

#[inline]
fn exponent_of(x: f64) -> i32 {
    // normal positive input only
    (((x.to_bits() >> 52) & 0x7ff) as i32) - 1023
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// A positive real stored as `(hi + lo) * 2^exp`.
#[derive(Clone, Copy, Debug)]
pub struct ScaledProduct {
    hi: f64,
    lo: f64,
    exp: i64,
}

impl Default for ScaledProduct {
    fn default() -> Self {
        Self::ONE
    }
}

impl ScaledProduct {
    pub const ONE: ScaledProduct = ScaledProduct {
        hi: 1.0,
        lo: 0.0,
        exp: 0,
    };

    pub fn from_f64(x: f64) -> Self {
        assert!(x > 0.0 && x.is_finite(), "factor must be positive and finite, got {x}");
        let mut p = ScaledProduct {
            hi: x,
            lo: 0.0,
            exp: 0,
        };
        p.renormalize();
        p
    }

    fn renormalize(&mut self) {
        let k = exponent_of(self.hi);
        if !(-RANGE..=RANGE).contains(&k) {
            let s = pow2(-k);
            self.hi *= s;
            self.lo *= s;
            self.exp += k as i64;
        }
    }

    /// Multiply in one positive factor.
    #[inline]
    pub fn mul_f64(&mut self, x: f64) {
        debug_assert!(x > 0.0 && x.is_finite());
        let p = self.hi * x;
        let e = self.hi.mul_add(x, -p);
        let low = self.lo.mul_add(x, e);
        let (hi, lo) = quick_two_sum(p, low);
        self.hi = hi;
        self.lo = lo;
        self.renormalize();
    }

    pub fn times(mut self, x: f64) -> Self {
        self.mul_f64(x);
        self
    }

    pub fn mul(self, other: ScaledProduct) -> Self {
        let p = self.hi * other.hi;
        let e = self.hi.mul_add(other.hi, -p);
        let low = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, low);
        let mut out = ScaledProduct {
            hi,
            lo,
            exp: self.exp + other.exp,
        };
        out.renormalize();
        out
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.hi;
        let residual = (-self.hi).mul_add(r, 1.0) - self.lo * r;
        let (hi, lo) = quick_two_sum(r, r * residual);
        let mut out = ScaledProduct {
            hi,
            lo,
            exp: -self.exp,
        };
        out.renormalize();
        out
    }

    /// Rounded `f64` value; saturates to `inf` or `0` outside the range.
    pub fn value(&self) -> f64 {
        ldexp(self.hi + self.lo, self.exp)
    }

    pub fn ln(&self) -> f64 {
        self.hi.ln() + self.lo / self.hi + self.exp as f64 * std::f64::consts::LN_2
    }

    fn normalized(&self) -> (i64, f64, f64) {
        let k = exponent_of(self.hi);
        let s = pow2(-k);
        (self.exp + k as i64, self.hi * s, self.lo * s)
    }
}

impl PartialEq for ScaledProduct {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for ScaledProduct {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (ea, ha, la) = self.normalized();
        let (eb, hb, lb) = other.normalized();
        match ea.cmp(&eb) {
            Ordering::Equal => match ha.partial_cmp(&hb)? {
                Ordering::Equal => la.partial_cmp(&lb),
                o => Some(o),
            },
            o => Some(o),
        }
    }
}

/// Product of an iterator of positive factors.
pub fn product<I: IntoIterator<Item = f64>>(factors: I) -> ScaledProduct {
    factors
        .into_iter()
        .fold(ScaledProduct::ONE, |acc, x| acc.times(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_of_two_are_exact_far_out_of_range() {
        let p = product(std::iter::repeat(2.0).take(3000));
        assert!(p.value().is_infinite());
        assert!((p.ln() / (3000.0 * std::f64::consts::LN_2) - 1.0).abs() < 1e-15);
        let back = p.mul(product(std::iter::repeat(0.5).take(2990)));
        assert_eq!(back.value(), 1024.0);
        assert_eq!(p.recip().mul(p).value(), 1.0);
    }

    #[test]
    fn telescoping_product_is_accurate() {
        // prod_{j=1}^{n-1} (j+1)/j = n
        let n = 10_000;
        let p = product((1..n).map(|j| (j + 1) as f64 / j as f64));
        assert!((p.value() / n as f64 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn ordering_follows_value() {
        let a = product([3.0, 1e200, 1e200]);
        let b = product([2.0, 1e200, 1e200]);
        assert!(a > b);
        assert!(b < a);
        assert_eq!(a.partial_cmp(&a), Some(Ordering::Equal));
        assert!(ScaledProduct::from_f64(1e-300).times(1e-300) < ScaledProduct::ONE);
    }

    #[test]
    fn ldexp_handles_large_shifts() {
        assert_eq!(ldexp(1.0, 2000), f64::INFINITY);
        assert_eq!(ldexp(1.0, -2000), 0.0);
        assert_eq!(ldexp(3.0, -1), 1.5);
        assert_eq!(ldexp(ldexp(1.5, 1000), -1000), 1.5);
    }
}
