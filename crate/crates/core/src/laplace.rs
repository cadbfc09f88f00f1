//! Numerical Laplace transforms of sampled signals.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Samples `u(k dt)`, `k = 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl TimeSignal {
    pub fn new(dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || samples.len() < 3 {
            return Err(Error::InvalidInput("signal needs dt > 0 and at least 3 samples".into()));
        }
        Ok(TimeSignal { dt, samples })
    }

    pub fn from_fn(dt: f64, final_time: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let n = (final_time / dt).round() as usize;
        Self::new(dt, (0..=n).map(|k| f(k as f64 * dt)).collect())
    }

    pub fn final_time(&self) -> f64 {
        self.dt * (self.samples.len() - 1) as f64
    }

    /// Backward differences, with value 0 at `t = 0`.
    pub fn derivative(&self) -> TimeSignal {
        let mut d = vec![0.0; self.samples.len()];
        for k in 1..d.len() {
            d[k] = (self.samples[k] - self.samples[k - 1]) / self.dt;
        }
        TimeSignal { dt: self.dt, samples: d }
    }

    /// Cumulative trapezoid `\int_0^t u`.
    pub fn antiderivative(&self) -> TimeSignal {
        let mut acc = vec![0.0; self.samples.len()];
        for k in 1..acc.len() {
            acc[k] = acc[k - 1] + 0.5 * self.dt * (self.samples[k] + self.samples[k - 1]);
        }
        TimeSignal { dt: self.dt, samples: acc }
    }
}

/// Simpson weights on an odd number of points; a trailing interval is handled
/// with the 3/8 rule when the count is even.
fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    let simpson_end = if n % 2 == 1 { n - 1 } else { n - 4 };
    let mut k = 0;
    while k + 2 <= simpson_end {
        w[k] += h / 3.0;
        w[k + 1] += 4.0 * h / 3.0;
        w[k + 2] += h / 3.0;
        k += 2;
    }
    if n % 2 == 0 {
        let b = n - 4;
        for (j, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
            w[b + j] += 3.0 * h / 8.0 * c;
        }
    }
    w
}

/// `\int_0^T e^{-st} u(t) dt` by composite Simpson.
pub fn laplace_forward(signal: &TimeSignal, s: Complex64) -> Result<Complex64> {
    if !(s.re > 0.0) {
        return Err(Error::Domain(format!("Laplace transform needs Re(s) > 0, got {s}")));
    }
    let w = simpson_weights(signal.samples.len(), signal.dt);
    // e^{-s k dt} by repeated multiplication, resynchronised every block
    let step = (-s * signal.dt).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut phase = Complex64::new(1.0, 0.0);
    for (k, (u, wk)) in signal.samples.iter().zip(&w).enumerate() {
        if k % 256 == 0 {
            phase = (-s * (k as f64 * signal.dt)).exp();
        }
        acc += phase * (u * wk);
        phase *= step;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsevalCheck {
    /// `(1/2pi) \int u_L(s) conj(v_L(s)) ds2` over `|s2| <= S`.
    pub lhs: f64,
    /// `\int e^{-2 s1 t} u v dt`.
    pub rhs: f64,
    pub gap: f64,
}

/// Parseval identity along `Re s = s1`, with the frequency integral truncated
/// at `|s2| <= s2_max` and sampled with spacing `ds2`.
pub fn parseval_check(u: &TimeSignal, v: &TimeSignal, s1: f64, s2_max: f64, ds2: f64) -> Result<ParsevalCheck> {
    if u.samples.len() != v.samples.len() || (u.dt - v.dt).abs() > 1e-15 * u.dt {
        return Err(Error::InvalidInput("signals must share the time grid".into()));
    }
    if !(ds2 > 0.0 && s2_max > 0.0) {
        return Err(Error::InvalidInput("frequency grid must be positive".into()));
    }
    let prod = TimeSignal {
        dt: u.dt,
        samples: u
            .samples
            .iter()
            .zip(&v.samples)
            .enumerate()
            .map(|(k, (a, b))| (-2.0 * s1 * k as f64 * u.dt).exp() * a * b)
            .collect(),
    };
    let w_t = simpson_weights(prod.samples.len(), prod.dt);
    let rhs: f64 = prod.samples.iter().zip(&w_t).map(|(a, w)| a * w).sum();

    let intervals = 2 * ((s2_max / ds2).ceil() as usize).max(1);
    let h = 2.0 * s2_max / intervals as f64;
    let w_s = simpson_weights(intervals + 1, h);
    let mut lhs = 0.0;
    for (k, w) in w_s.iter().enumerate() {
        let s = Complex64::new(s1, -s2_max + k as f64 * h);
        let ul = laplace_forward(u, s)?;
        let vl = laplace_forward(v, s)?;
        lhs += w * (ul * vl.conj()).re;
    }
    lhs += tail_estimate(u, v, s1, s2_max);
    lhs /= 2.0 * std::f64::consts::PI;
    let scale = rhs.abs().max(lhs.abs());
    let gap = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
    Ok(ParsevalCheck { lhs, rhs, gap })
}

/// `u(0)` and a second-order one-sided `u'(0)`.
fn initial_jet(sig: &TimeSignal) -> (f64, f64) {
    let u = &sig.samples;
    (u[0], (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * sig.dt))
}

/// `\int_{|s2| > S} Re(u_L conj(v_L)) ds2` from the large-`|s|` expansion
/// `u_L ~ u(0)/s + u'(0)/s^2`, integrated in `x = 1/s2` by Simpson.
fn tail_estimate(u: &TimeSignal, v: &TimeSignal, s1: f64, s2_max: f64) -> f64 {
    let (u0, u1) = initial_jet(u);
    let (v0, v1) = initial_jet(v);
    let n = 401;
    let h = 1.0 / (s2_max * (n - 1) as f64);
    let w = simpson_weights(n, h);
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        for (k, wk) in w.iter().enumerate() {
            let x = k as f64 * h;
            // integrand times ds2/dx = 1/x^2, written to stay finite at x = 0
            let s_x = Complex64::new(s1 * x, sign); // s * x
            let ul = (s_x.inv() * u0) + s_x.inv() * s_x.inv() * (u1 * x);
            let vl = (s_x.inv() * v0) + s_x.inv() * s_x.inv() * (v1 * x);
            total += wk * (ul * vl.conj()).re;
        }
    }
    total
}
