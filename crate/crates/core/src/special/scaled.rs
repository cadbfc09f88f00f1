use num_complex::Complex64;
use std::ops::{Div, Mul};

/// A complex number stored as `mantissa * 2^exponent` with `|mantissa|` in `[1, 2)`
/// (or exactly zero), so that products and ratios of values far outside the `f64`
/// exponent range stay representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: Complex64,
    pub exponent: i64,
}

/// `2^k` for any `k`, saturating to 0 / inf outside the representable range.
pub(crate) fn pow2(k: i64) -> f64 {
    if k > 1023 {
        f64::INFINITY
    } else if k >= -1022 {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else if k >= -1074 {
        // subnormal
        f64::from_bits(1u64 << (k + 1074))
    } else {
        0.0
    }
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        mantissa: Complex64::new(0.0, 0.0),
        exponent: 0,
    };

    pub fn new(mantissa: Complex64, exponent: i64) -> Self {
        Scaled { mantissa, exponent }.normalized()
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z, 0)
    }

    /// `mantissa * exp(x)` for real `x`, without forming `exp(x)` directly.
    pub fn with_exp(mantissa: Complex64, x: f64) -> Self {
        let e2 = x / std::f64::consts::LN_2;
        let k = e2.floor();
        let frac = (e2 - k) * std::f64::consts::LN_2;
        Self::new(mantissa * frac.exp(), k as i64)
    }

    fn normalized(self) -> Self {
        let a = self.mantissa.norm();
        if a == 0.0 || !a.is_finite() {
            return Scaled {
                mantissa: self.mantissa,
                exponent: if a == 0.0 { 0 } else { self.exponent },
            };
        }
        let mut k = a.log2().floor() as i64;
        // log2 rounding can be off by one near powers of two
        let mut m = self.mantissa * pow2(-k);
        if m.norm() >= 2.0 {
            m *= 0.5;
            k += 1;
        } else if m.norm() < 1.0 {
            m *= 2.0;
            k -= 1;
        }
        Scaled {
            mantissa: m,
            exponent: self.exponent + k,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.norm() == 0.0
    }

    /// Converts back to an ordinary complex number (may under/overflow).
    pub fn to_complex(self) -> Complex64 {
        let e = self.exponent;
        if (-1000..=1000).contains(&e) {
            self.mantissa * pow2(e)
        } else {
            let half = e / 2;
            self.mantissa * pow2(half) * pow2(e - half)
        }
    }

    /// `log2 |value|`.
    pub fn log2_abs(&self) -> f64 {
        self.mantissa.norm().log2() + self.exponent as f64
    }

    /// `ln |value|`.
    pub fn ln_abs(&self) -> f64 {
        self.log2_abs() * std::f64::consts::LN_2
    }

    /// `|value|` as a (possibly under/overflowing) real.
    pub fn abs(&self) -> f64 {
        Scaled::new(Complex64::new(self.mantissa.norm(), 0.0), self.exponent)
            .to_complex()
            .re
    }

    pub fn recip(self) -> Self {
        Scaled::new(self.mantissa.inv(), -self.exponent)
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Scaled) -> Scaled {
        Scaled::new(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Mul<Complex64> for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Complex64) -> Scaled {
        Scaled::new(self.mantissa * rhs, self.exponent)
    }
}

impl Div for Scaled {
    type Output = Scaled;
    fn div(self, rhs: Scaled) -> Scaled {
        Scaled::new(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}
