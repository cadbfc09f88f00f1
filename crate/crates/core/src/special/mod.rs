//! Modified Bessel functions and the Laplace-domain quantities built on them.

mod bessel;
mod scaled;

pub use bessel::{bessel_k, bessel_k_scaled, bessel_k_scaled_with_limit, DEFAULT_MAX_ORDER};
pub use scaled::Scaled;

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Laplace variable `s = s1 + i s2` with `s1 > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexFrequency {
    s1: f64,
    s2: f64,
}

impl ComplexFrequency {
    pub fn new(s1: f64, s2: f64) -> Result<Self> {
        if !(s1 > 0.0) || !s1.is_finite() || !s2.is_finite() {
            return Err(Error::Domain(format!(
                "complex frequency needs Re(s) > 0, got {s1} + {s2}i"
            )));
        }
        Ok(ComplexFrequency { s1, s2 })
    }

    pub fn real(s1: f64) -> Result<Self> {
        Self::new(s1, 0.0)
    }

    pub fn s1(&self) -> f64 {
        self.s1
    }

    pub fn s2(&self) -> f64 {
        self.s2
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.s1, self.s2)
    }
}

/// `K_n'(sR) / K_n(sR)`, via `K_n' = -K_{n-1} - (n/z) K_n`.
pub fn dtn_ratio(n: u32, s: ComplexFrequency, radius: f64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidInput("DtN ratio needs order n >= 1".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    let z = s.value() * radius;
    let (_, ratios) = bessel::k_ratios(n, z)?;
    let r = ratios[n as usize - 1];
    Ok(-r.inv() - z.inv() * n as f64)
}

/// All ratios `K_n'(sR)/K_n(sR)` for `n = 1..=n_max` in one pass.
pub fn dtn_ratios(n_max: u32, s: ComplexFrequency, radius: f64) -> Result<Vec<Complex64>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    let z = s.value() * radius;
    let (_, ratios) = bessel::k_ratios(n_max, z)?;
    Ok(ratios
        .iter()
        .enumerate()
        .map(|(k, r)| -r.inv() - z.inv() * (k + 1) as f64)
        .collect())
}

/// Both sides of `|K_nu(s rho1 + tau)| / |K_nu(s rho2)| <= exp(-tau (1 - rho2^2/rho1^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl DecayCheck {
    pub fn holds(&self, rel_slack: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + rel_slack)
    }
}

pub fn decay_ratio_bound_check(
    nu: u32,
    s: ComplexFrequency,
    rho1: f64,
    rho2: f64,
    tau: f64,
) -> Result<DecayCheck> {
    if !(rho2 > 0.0 && rho1 > rho2) {
        return Err(Error::Domain(format!(
            "need rho1 > rho2 > 0, got rho1 = {rho1}, rho2 = {rho2}"
        )));
    }
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("need tau > 0, got {tau}")));
    }
    let outer = bessel_k_scaled(nu, s.value() * rho1 + tau)?;
    let inner = bessel_k_scaled(nu, s.value() * rho2)?;
    let lhs = (outer.ln_abs() - inner.ln_abs()).exp();
    let rhs = (-tau * (1.0 - rho2 * rho2 / (rho1 * rho1))).exp();
    Ok(DecayCheck { lhs, rhs })
}
