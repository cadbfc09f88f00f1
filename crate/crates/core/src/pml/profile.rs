use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// Radial shape of the absorption on `R < r <= rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileKind {
    /// `sigma = sigma0` throughout the layer.
    Constant,
    /// `sigma = sigma0 ((r - R)/(rho - R))^p`.
    Power(f64),
}

/// How the averaged absorption `sigma_hat` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaHatMode {
    /// `sigma_hat = sigma` pointwise.
    Equal,
    /// `sigma_hat(r) = (1/r) \int_0^r sigma`.
    Integral,
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileKind::Constant => write!(f, "constant"),
            ProfileKind::Power(p) => write!(f, "power:{p}"),
        }
    }
}

impl FromStr for ProfileKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "constant" => Ok(ProfileKind::Constant),
            other => match other.strip_prefix("power:") {
                Some(p) => match p.trim().parse::<f64>() {
                    Ok(p) if p > 0.0 && p.is_finite() => Ok(ProfileKind::Power(p)),
                    _ => Err(format!("power exponent must be a positive number, got `{p}`")),
                },
                None => Err(format!("expected `constant` or `power:<p>`, got `{other}`")),
            },
        }
    }
}

impl fmt::Display for SigmaHatMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SigmaHatMode::Equal => "equal",
            SigmaHatMode::Integral => "integral",
        })
    }
}

impl FromStr for SigmaHatMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "equal" => Ok(SigmaHatMode::Equal),
            "integral" => Ok(SigmaHatMode::Integral),
            other => Err(format!("expected `equal` or `integral`, got `{other}`")),
        }
    }
}

/// Absorption profile of the layer `R < |x| < rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmlProfile {
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub sigma0: f64,
    pub kind: ProfileKind,
    pub mode: SigmaHatMode,
}

impl PmlProfile {
    pub fn new(inner_radius: f64, outer_radius: f64, sigma0: f64, kind: ProfileKind, mode: SigmaHatMode) -> Result<Self> {
        if !(inner_radius > 0.0 && outer_radius > inner_radius && outer_radius.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "need 0 < R < rho, got R = {inner_radius}, rho = {outer_radius}"
            )));
        }
        if !(sigma0 >= 0.0 && sigma0.is_finite()) {
            return Err(Error::InvalidInput(format!("sigma must be finite and >= 0, got {sigma0}")));
        }
        if let ProfileKind::Power(p) = kind {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidInput(format!("power exponent must be positive, got {p}")));
            }
        }
        Ok(PmlProfile {
            inner_radius,
            outer_radius,
            sigma0,
            kind,
            mode,
        })
    }

    /// Constant absorption with `sigma_hat = sigma`.
    pub fn constant(inner_radius: f64, outer_radius: f64, sigma0: f64) -> Result<Self> {
        Self::new(inner_radius, outer_radius, sigma0, ProfileKind::Constant, SigmaHatMode::Equal)
    }

    /// `sigma(r)` without range checking; zero for `r <= R`.
    pub fn sigma(&self, r: f64) -> f64 {
        let (big_r, rho) = (self.inner_radius, self.outer_radius);
        if r <= big_r {
            return 0.0;
        }
        match self.kind {
            ProfileKind::Constant => self.sigma0,
            ProfileKind::Power(p) => self.sigma0 * ((r - big_r) / (rho - big_r)).powf(p),
        }
    }

    /// `sigma_hat(r)` without range checking; zero for `r <= R`.
    pub fn sigma_hat(&self, r: f64) -> f64 {
        let (big_r, rho) = (self.inner_radius, self.outer_radius);
        if r <= big_r {
            return 0.0;
        }
        match self.mode {
            SigmaHatMode::Equal => self.sigma(r),
            SigmaHatMode::Integral => match self.kind {
                ProfileKind::Constant => self.sigma0 * (r - big_r) / r,
                ProfileKind::Power(p) => {
                    self.sigma0 * (r - big_r) * ((r - big_r) / (rho - big_r)).powf(p) / ((p + 1.0) * r)
                }
            },
        }
    }

    /// Largest absorption value, `sigma(rho)`.
    pub fn sigma_max(&self) -> f64 {
        self.sigma(self.outer_radius)
    }

    /// `rho sigma_hat(rho) (1 - R^2/rho^2)`, the exponent of the layer's damping factor.
    pub fn damping_exponent(&self) -> f64 {
        let (big_r, rho) = (self.inner_radius, self.outer_radius);
        rho * self.sigma_hat(rho) * (1.0 - big_r * big_r / (rho * rho))
    }
}

/// `(sigma(r), sigma_hat(r))` for `0 <= r <= rho`.
pub fn eval_profile(profile: &PmlProfile, r: f64) -> Result<(f64, f64)> {
    let rho = profile.outer_radius;
    if !(r >= 0.0) || r > rho * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("radius {r} outside [0, {rho}]")));
    }
    Ok((profile.sigma(r), profile.sigma_hat(r)))
}
