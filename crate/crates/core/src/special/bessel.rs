//! Modified Bessel functions of the second kind `K_n(z)` for integer order and
//! complex argument in the open right half-plane.
//!
//! `K_0` and `K_1` come from the ascending series for `|z| <= 2`, Steed's
//! continued fraction (CF2) for `2 < |z| <= 25`, and the Hankel asymptotic
//! expansion beyond. Higher orders follow from the forward recurrence, which is
//! stable for `K`; it is run on the ratios `K_k / K_{k-1}` so nothing overflows.

use super::scaled::Scaled;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Default upper limit on the order accepted by [`bessel_k`] and [`bessel_k_scaled`].
pub const DEFAULT_MAX_ORDER: u32 = 64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_RADIUS: f64 = 2.0;
const ASYMPTOTIC_RADIUS: f64 = 25.0;
const EPS: f64 = 1e-16;

fn check_domain(z: Complex64) -> Result<()> {
    if !(z.re > 0.0) || !z.im.is_finite() || !z.re.is_finite() {
        return Err(Error::Domain(format!(
            "K_nu requires Re(z) > 0, got z = {z}"
        )));
    }
    Ok(())
}

fn k01_series(z: Complex64) -> (Complex64, Complex64) {
    let q = z * z * 0.25;
    let log_half = (z * 0.5).ln();
    // I0, I1/(z/2), and the digamma sums
    let mut term0 = Complex64::new(1.0, 0.0); // (q^k)/(k!)^2
    let mut term1 = Complex64::new(1.0, 0.0); // (q^k)/(k!(k+1)!)
    let mut i0 = term0;
    let mut i1_red = term1;
    let mut harmonic = 0.0;
    let mut sum0 = Complex64::new(0.0, 0.0);
    // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
    let mut sum1 = term1 * (-2.0 * EULER_GAMMA + 1.0);
    for k in 1..200 {
        let kf = k as f64;
        term0 *= q / (kf * kf);
        term1 *= q / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        i0 += term0;
        i1_red += term1;
        sum0 += term0 * harmonic;
        let psi = -2.0 * EULER_GAMMA + 2.0 * harmonic + 1.0 / (kf + 1.0);
        sum1 += term1 * psi;
        if term0.norm() < EPS * i0.norm() && term1.norm() < EPS * i1_red.norm() {
            break;
        }
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + sum0;
    let i1 = z * 0.5 * i1_red;
    let k1 = z.inv() + log_half * i1 - z * 0.25 * sum1;
    (k0, k1)
}

/// Returns `(K_0(z), K_1(z))` with the factor `exp(-z)` removed, i.e. the
/// continued fraction gives `K_nu(z) = c_nu(z) * exp(-z)`.
fn k01_cf2(z: Complex64) -> Result<(Complex64, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    let a1 = 0.25;
    let mut b = (one + z) * 2.0;
    let mut d = b.inv();
    let mut delh = d;
    let mut h = d;
    let mut q1 = Complex64::new(0.0, 0.0);
    let mut q2 = one;
    let mut q = Complex64::new(a1, 0.0);
    let mut c = a1;
    let mut a = -a1;
    let mut s = one + q * delh;
    let mut converged = false;
    for i in 2..20_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += qnew * c;
        b += 2.0;
        d = (b + d * a).inv();
        delh = (b * d - one) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < EPS * s.norm() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Domain(format!(
            "continued fraction for K_0, K_1 did not converge at z = {z}"
        )));
    }
    h *= a1;
    let k0 = (PI / (2.0 * z)).sqrt() / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    Ok((k0, k1))
}

/// Hankel expansion of `K_nu(z) * exp(z) / sqrt(pi / 2z)`.
fn asymptotic_sum(nu: f64, z: Complex64) -> Complex64 {
    let mu = 4.0 * nu * nu;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for k in 1..80 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (8.0 * kf * z);
        let t = term.norm();
        if t > last {
            break;
        }
        sum += term;
        if t < EPS * sum.norm() {
            break;
        }
        last = t;
    }
    sum
}

/// Scaled `(K_0(z), K_1(z))`.
pub(crate) fn k01_scaled(z: Complex64) -> Result<(Scaled, Scaled)> {
    check_domain(z)?;
    let r = z.norm();
    if r <= SERIES_RADIUS {
        let (k0, k1) = k01_series(z);
        return Ok((Scaled::from_complex(k0), Scaled::from_complex(k1)));
    }
    let (c0, c1) = if r <= ASYMPTOTIC_RADIUS {
        k01_cf2(z)?
    } else {
        let pref = (PI / (2.0 * z)).sqrt();
        (pref * asymptotic_sum(0.0, z), pref * asymptotic_sum(1.0, z))
    };
    // exp(-z) = exp(-Re z) * exp(-i Im z)
    let phase = Complex64::from_polar(1.0, -z.im);
    Ok((
        Scaled::with_exp(c0 * phase, -z.re),
        Scaled::with_exp(c1 * phase, -z.re),
    ))
}

/// Ratios `K_k(z) / K_{k-1}(z)` for `k = 1..=n`, plus scaled `K_0(z)`.
pub(crate) fn k_ratios(n: u32, z: Complex64) -> Result<(Scaled, Vec<Complex64>)> {
    let (k0, k1) = k01_scaled(z)?;
    let mut ratios = Vec::with_capacity(n as usize);
    if n == 0 {
        return Ok((k0, ratios));
    }
    let mut r = (k1 / k0).to_complex();
    ratios.push(r);
    let zinv = z.inv();
    for k in 1..n {
        r = r.inv() + zinv * (2.0 * k as f64);
        ratios.push(r);
    }
    Ok((k0, ratios))
}

/// `K_nu(z)` as `(mantissa, exponent)` with `mantissa * 2^exponent = K_nu(z)`.
pub fn bessel_k_scaled(nu: u32, z: Complex64) -> Result<Scaled> {
    bessel_k_scaled_with_limit(nu, z, DEFAULT_MAX_ORDER)
}

pub fn bessel_k_scaled_with_limit(nu: u32, z: Complex64, max_order: u32) -> Result<Scaled> {
    if nu > max_order {
        return Err(Error::Domain(format!(
            "order {nu} exceeds the configured maximum {max_order}"
        )));
    }
    let (k0, ratios) = k_ratios(nu, z)?;
    Ok(ratios
        .iter()
        .fold(k0, |acc, &r| acc * r))
}

/// `K_nu(z)` as an ordinary complex number. Values outside the `f64` range
/// come back as 0 or infinity; use [`bessel_k_scaled`] for those.
pub fn bessel_k(nu: u32, z: Complex64) -> Result<Complex64> {
    Ok(bessel_k_scaled(nu, z)?.to_complex())
}
