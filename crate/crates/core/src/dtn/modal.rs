use crate::error::{Error, Result};
use crate::special::{dtn_ratios, ComplexFrequency};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Sine-series coefficients of a trace on the half circle of radius `radius`.
/// `coeffs[k]` belongs to mode `n = k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalTrace {
    pub coeffs: Vec<Complex64>,
    pub radius: f64,
    pub s: ComplexFrequency,
}

impl ModalTrace {
    pub fn num_modes(&self) -> usize {
        self.coeffs.len()
    }

    /// `sum_n w_n sin(n theta)`.
    pub fn evaluate(&self, theta: f64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * ((k + 1) as f64 * theta).sin())
            .sum()
    }

    /// Magnitude of the last coefficient, a proxy for the truncation error.
    pub fn tail(&self) -> f64 {
        self.coeffs.last().map_or(0.0, |c| c.norm())
    }
}

/// Projects samples `values[k] = w(theta[k])` (increasing angles spanning
/// `[0, pi]`) onto `sin(n theta)`, `n = 1..=n_modes`, by the trapezoid rule.
pub fn project_trace(
    thetas: &[f64],
    values: &[Complex64],
    n_modes: usize,
    radius: f64,
    s: ComplexFrequency,
) -> Result<ModalTrace> {
    if thetas.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: thetas.len(), got: values.len() });
    }
    if thetas.len() < 2 * n_modes {
        return Err(Error::InvalidInput(format!(
            "{} samples cannot resolve {n_modes} modes (need at least {})",
            thetas.len(),
            2 * n_modes
        )));
    }
    if thetas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("trace angles must increase strictly".into()));
    }
    let coeffs = (1..=n_modes)
        .map(|n| {
            let g = |k: usize| values[k] * (n as f64 * thetas[k]).sin();
            let sum: Complex64 = (0..thetas.len() - 1)
                .map(|k| (g(k) + g(k + 1)) * (0.5 * (thetas[k + 1] - thetas[k])))
                .sum();
            sum * (2.0 / PI)
        })
        .collect();
    Ok(ModalTrace { coeffs, radius, s })
}

/// Neumann data of the outgoing extension: `w_n -> s K_n'(sR)/K_n(sR) w_n`.
pub fn dtn_apply(trace: &ModalTrace) -> Result<ModalTrace> {
    let n = trace.num_modes();
    let ratios = if n == 0 { Vec::new() } else { dtn_ratios(n as u32, trace.s, trace.radius)? };
    let s = trace.s.value();
    Ok(ModalTrace {
        coeffs: trace.coeffs.iter().zip(&ratios).map(|(w, r)| s * r * w).collect(),
        radius: trace.radius,
        s: trace.s,
    })
}

/// `<s^{-1} G w, w>` on the half circle, `R (pi/2) sum_n (K_n'/K_n) |w_n|^2`.
pub fn dtn_pairing(trace: &ModalTrace) -> Result<Complex64> {
    let g = dtn_apply(trace)?;
    let s_inv = trace.s.value().inv();
    Ok(g.coeffs
        .iter()
        .zip(&trace.coeffs)
        .map(|(a, w)| s_inv * a * w.conj())
        .sum::<Complex64>()
        * (trace.radius * PI / 2.0))
}
