use crate::error::{Error, Result};
use crate::fem::QuadPoint;
use crate::geometry::{Mesh, Point};
use std::fmt;

/// Time dependence of the source.
#[derive(Debug, Clone, PartialEq)]
pub enum Temporal {
    /// `sin(omega t)`.
    Sine { omega: f64 },
    /// `t`.
    Linear,
    /// Piecewise-linear interpolation of samples at `k dt`; held constant past the end.
    Samples { dt: f64, values: Vec<f64> },
}

impl Temporal {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Temporal::Sine { omega } => (omega * t).sin(),
            Temporal::Linear => t,
            Temporal::Samples { dt, values } => {
                let x = (t / dt).max(0.0);
                let k = x.floor() as usize;
                if k + 1 >= values.len() {
                    return *values.last().unwrap_or(&0.0);
                }
                let w = x - k as f64;
                values[k] * (1.0 - w) + values[k + 1] * w
            }
        }
    }
}

impl fmt::Display for Temporal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Temporal::Sine { omega } => write!(f, "sin:{omega}"),
            Temporal::Linear => write!(f, "linear"),
            Temporal::Samples { dt, values } => write!(f, "samples({} at dt={dt})", values.len()),
        }
    }
}

/// `f(x, t) = exp(-|x - x0|^2 / (2 eta)) / (sqrt(2 pi) eta) * g(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceTerm {
    pub center: Point,
    pub eta: f64,
    pub temporal: Temporal,
}

impl SourceTerm {
    pub fn new(center: Point, eta: f64, temporal: Temporal) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) || !center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidInput(format!("bad source parameters x0 = {center:?}, eta = {eta}")));
        }
        match &temporal {
            Temporal::Sine { omega } if !omega.is_finite() => {
                return Err(Error::InvalidInput(format!("omega must be finite, got {omega}")))
            }
            Temporal::Samples { dt, values } => {
                if !(*dt > 0.0) || values.is_empty() || values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("sampled temporal factor needs dt > 0 and finite samples".into()));
                }
                if values[0] != 0.0 {
                    return Err(Error::InvalidInput("the temporal factor must vanish at t = 0".into()));
                }
            }
            _ => {}
        }
        Ok(SourceTerm { center, eta, temporal })
    }

    pub fn spatial(&self, x: Point) -> f64 {
        let d2 = (x[0] - self.center[0]).powi(2) + (x[1] - self.center[1]).powi(2);
        (-d2 / (2.0 * self.eta)).exp() / ((2.0 * std::f64::consts::PI).sqrt() * self.eta)
    }

    pub fn temporal(&self, t: f64) -> f64 {
        self.temporal.value(t)
    }

    /// Spatial factor at the mesh vertices.
    pub fn nodal(&self, mesh: &Mesh) -> Vec<f64> {
        mesh.vertices.iter().map(|&x| self.spatial(x)).collect()
    }

    /// Spatial factor at a quadrature point.
    pub fn at(&self, q: &QuadPoint) -> f64 {
        self.spatial(q.x)
    }
}
