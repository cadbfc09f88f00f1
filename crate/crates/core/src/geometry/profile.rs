use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::sync::Arc;

const CONTINUITY_TOL: f64 = 1e-10;

/// Height function of one piece of the surface.
pub type HeightFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One piece of the surface perturbation, valid on `[start, end]`.
#[derive(Clone)]
pub struct ProfilePiece {
    pub start: f64,
    pub end: f64,
    pub height: HeightFn,
}

impl fmt::Debug for ProfilePiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProfilePiece")
            .field("start", &self.start)
            .field("end", &self.end)
            .finish_non_exhaustive()
    }
}

/// Description of a surface profile, as accepted by [`build_surface_profile`].
#[derive(Debug, Clone)]
pub enum ProfileSpec {
    /// `h == 0`.
    Flat,
    /// `amplitude * sin(wavenumber * x)` on `[-half_width, half_width]`, zero elsewhere.
    Sine {
        amplitude: f64,
        wavenumber: f64,
        half_width: f64,
    },
    /// Arbitrary ordered pieces; zero outside their union.
    Pieces(Vec<ProfilePiece>),
}

impl ProfileSpec {
    /// `0.3 sin(4 x)` on `[-pi/4, pi/4]`.
    pub fn rough_surface() -> Self {
        ProfileSpec::Sine {
            amplitude: 0.3,
            wavenumber: 4.0,
            half_width: FRAC_PI_4,
        }
    }
}

impl fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileSpec::Flat => write!(f, "flat"),
            ProfileSpec::Sine {
                amplitude,
                wavenumber,
                half_width,
            } => write!(f, "sine:{amplitude},{wavenumber},{half_width}"),
            ProfileSpec::Pieces(p) => write!(f, "pieces({})", p.len()),
        }
    }
}

/// The local perturbation `x2 = h(x1)` of the flat boundary `x2 = 0`.
#[derive(Debug, Clone)]
pub struct SurfaceProfile {
    pieces: Vec<ProfilePiece>,
    support_radius: f64,
    spec: ProfileSpec,
}

impl SurfaceProfile {
    pub fn height(&self, x1: f64) -> f64 {
        if x1.abs() > self.support_radius {
            return 0.0;
        }
        self.pieces
            .iter()
            .find(|p| x1 >= p.start && x1 <= p.end)
            .map_or(0.0, |p| (p.height)(x1))
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn spec(&self) -> &ProfileSpec {
        &self.spec
    }

    pub fn is_flat(&self) -> bool {
        self.pieces.is_empty()
    }
}

pub fn build_surface_profile(spec: &ProfileSpec) -> Result<SurfaceProfile> {
    let pieces = match spec {
        ProfileSpec::Flat => Vec::new(),
        &ProfileSpec::Sine {
            amplitude,
            wavenumber,
            half_width,
        } => {
            if !(half_width > 0.0) || !amplitude.is_finite() || !wavenumber.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "bad sine profile parameters {amplitude}, {wavenumber}, {half_width}"
                )));
            }
            vec![ProfilePiece {
                start: -half_width,
                end: half_width,
                height: Arc::new(move |x: f64| amplitude * (wavenumber * x).sin()),
            }]
        }
        ProfileSpec::Pieces(p) => p.clone(),
    };

    for (k, p) in pieces.iter().enumerate() {
        if !(p.start < p.end) || !p.start.is_finite() || !p.end.is_finite() {
            return Err(Error::InvalidInput(format!(
                "profile piece {k} has an empty interval [{}, {}]",
                p.start, p.end
            )));
        }
        if k > 0 && p.start < pieces[k - 1].end {
            return Err(Error::InvalidInput(format!(
                "profile pieces {} and {k} overlap or are out of order",
                k - 1
            )));
        }
        for x in [p.start, 0.5 * (p.start + p.end), p.end] {
            if !(p.height)(x).is_finite() {
                return Err(Error::InvalidInput(format!(
                    "profile piece {k} is not finite at x1 = {x}"
                )));
            }
        }
    }

    // continuity at every breakpoint, including the transitions to h = 0
    let mut left_value = 0.0;
    let mut left_end = f64::NEG_INFINITY;
    for p in &pieces {
        let at_start = (p.height)(p.start);
        let expected = if p.start == left_end { left_value } else { 0.0 };
        let jump = (at_start - expected).abs();
        if jump > CONTINUITY_TOL {
            return Err(Error::Discontinuous {
                location: p.start,
                jump,
            });
        }
        left_value = (p.height)(p.end);
        left_end = p.end;
    }
    if left_value.abs() > CONTINUITY_TOL {
        return Err(Error::Discontinuous {
            location: left_end,
            jump: left_value.abs(),
        });
    }

    let support_radius = pieces
        .iter()
        .map(|p| p.start.abs().max(p.end.abs()))
        .fold(0.0, f64::max);
    Ok(SurfaceProfile {
        pieces,
        support_radius,
        spec: spec.clone(),
    })
}
