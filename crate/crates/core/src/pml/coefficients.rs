use super::profile::PmlProfile;
use crate::fem::QuadPoint;
use crate::geometry::{norm, Point, Region};
use crate::special::ComplexFrequency;
use num_complex::Complex64;

pub type Tensor = [[f64; 2]; 2];
pub type ComplexTensor = [[Complex64; 2]; 2];

/// PML coefficients at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmlMatrices {
    pub sigma: f64,
    pub sigma_hat: f64,
    /// `1 + sigma/s`; one in the time-domain evaluation.
    pub alpha: Complex64,
    /// `1 + sigma_hat/s`; one in the time-domain evaluation.
    pub beta: Complex64,
    /// `M^T diag(beta/alpha, alpha/beta) M`.
    pub a: ComplexTensor,
    pub lambda1: Tensor,
    pub lambda2: Tensor,
}

/// `M^T diag(d0, d1) M` with `M` the rotation to polar components at `x`.
fn rotate<T>(x: Point, d0: T, d1: T) -> [[T; 2]; 2]
where
    T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let r = norm(x);
    let (c, s) = if r < 1e-14 { (1.0, 0.0) } else { (x[0] / r, x[1] / r) };
    let off = (d0 - d1) * (c * s);
    [[d0 * (c * c) + d1 * (s * s), off], [off, d0 * (s * s) + d1 * (c * c)]]
}

fn build(x: Point, sigma: f64, sigma_hat: f64, s: Option<ComplexFrequency>) -> PmlMatrices {
    let one = Complex64::new(1.0, 0.0);
    let (alpha, beta) = match s {
        Some(s) => (one + sigma / s.value(), one + sigma_hat / s.value()),
        None => (one, one),
    };
    let a = if sigma == 0.0 && sigma_hat == 0.0 {
        [[one, Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), one]]
    } else {
        rotate(x, beta / alpha, alpha / beta)
    };
    PmlMatrices {
        sigma,
        sigma_hat,
        alpha,
        beta,
        a,
        lambda1: rotate(x, sigma, sigma_hat),
        lambda2: rotate(x, sigma_hat, sigma),
    }
}

/// Coefficients at `x`; `s = None` requests the time-domain set where only
/// `sigma`, `sigma_hat`, `lambda1`, `lambda2` are meaningful.
pub fn pml_matrices_at(profile: &PmlProfile, x: Point, s: Option<ComplexFrequency>) -> PmlMatrices {
    let r = norm(x).min(profile.outer_radius);
    build(x, profile.sigma(r), profile.sigma_hat(r), s)
}

/// Coefficients at a quadrature point. Physical elements see the free-space
/// values; inside PML elements the radius is clamped to `[R, rho]` so that
/// chord midpoints just inside the interface circle take layer values.
pub fn pml_matrices_at_quad(profile: &PmlProfile, q: &QuadPoint, s: Option<ComplexFrequency>) -> PmlMatrices {
    match q.region {
        Region::Physical => build(q.x, 0.0, 0.0, s),
        Region::Pml => {
            let r = norm(q.x).clamp(profile.inner_radius, profile.outer_radius);
            let r = if r == profile.inner_radius { r * (1.0 + f64::EPSILON) } else { r };
            build(q.x, profile.sigma(r), profile.sigma_hat(r), s)
        }
    }
}
