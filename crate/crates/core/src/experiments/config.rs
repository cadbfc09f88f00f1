use crate::error::{Error, Result};
use crate::geometry::{Point, ProfileSpec};
use crate::pml::{ProfileKind, SigmaHatMode};
use crate::time::Temporal;
use std::fmt::Write as _;
use std::path::PathBuf;

/// Which PML parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Sigma,
    /// Values are layer thicknesses `rho - R`.
    Thickness,
}

impl std::fmt::Display for SweepKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepKind::Sigma => "sigma",
            SweepKind::Thickness => "thickness",
        })
    }
}

impl std::str::FromStr for SweepKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "sigma" => Ok(SweepKind::Sigma),
            "thickness" | "rho" => Ok(SweepKind::Thickness),
            other => Err(format!("expected `sigma` or `thickness`, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub kind: SweepKind,
    pub values: Vec<f64>,
}

/// Fully resolved run description. Every field has a config key; see
/// [`RunConfig::to_text`] for the canonical listing.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub name: String,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub surface: ProfileSpec,
    pub h_target: f64,
    pub sigma: f64,
    pub sigma_hat_mode: SigmaHatMode,
    pub profile_kind: ProfileKind,
    pub source_center: Point,
    pub source_eta: f64,
    pub temporal: Temporal,
    pub final_time: f64,
    pub dt: f64,
    pub snapshots: usize,
    pub probes: Vec<Point>,
    pub output_dir: PathBuf,
    pub sweep: Option<Sweep>,
    /// Overrides for the self-convergence reference; defaults add 30% to the
    /// largest swept sigma and thickness.
    pub reference_sigma: Option<f64>,
    pub reference_rho: Option<f64>,
    pub s1: f64,
    pub s2: f64,
    pub modes: usize,
}

impl RunConfig {
    /// `R = 2, rho = 3, sigma = sigma_hat = 10`, source `sin(2t)`, `T = 8`.
    pub fn example1() -> Self {
        RunConfig {
            name: "example1".into(),
            inner_radius: 2.0,
            outer_radius: 3.0,
            surface: ProfileSpec::rough_surface(),
            h_target: 0.05,
            sigma: 10.0,
            sigma_hat_mode: SigmaHatMode::Equal,
            profile_kind: ProfileKind::Constant,
            source_center: [0.0, 0.5],
            source_eta: 0.1,
            temporal: Temporal::Sine { omega: 2.0 },
            final_time: 8.0,
            dt: 0.01,
            snapshots: 20,
            probes: vec![[0.0, 1.0], [1.0, 1.0]],
            output_dir: PathBuf::from("out"),
            sweep: None,
            reference_sigma: None,
            reference_rho: None,
            s1: 1.0,
            s2: 2.0,
            modes: 32,
        }
    }

    /// `R = 2, rho = 3.4, sigma = sigma_hat = 25`, source `t`, `T = 10`.
    pub fn example2() -> Self {
        RunConfig {
            name: "example2".into(),
            outer_radius: 3.4,
            sigma: 25.0,
            temporal: Temporal::Linear,
            final_time: 10.0,
            ..Self::example1()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "example1" => Ok(Self::example1()),
            "example2" => Ok(Self::example2()),
            other => Err(Error::InvalidInput(format!("unknown preset `{other}` (expected example1 or example2)"))),
        }
    }

    /// Parses a config file on top of the `example1` defaults, or of the
    /// preset named by a `preset = ...` line (which must come first).
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg: Option<RunConfig> = None;
        let mut lines_of = std::collections::HashMap::new();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| Error::Config {
                    line: line_no,
                    key: line.to_string(),
                    message: "unterminated section header".into(),
                })?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                key: line.to_string(),
                message: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            let full = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
            let value = value.trim().trim_matches('"');
            if full == "preset" {
                if cfg.is_some() {
                    return Err(Error::Config { line: line_no, key: full, message: "preset must be the first setting".into() });
                }
                cfg = Some(Self::preset(value).map_err(|e| Error::Config {
                    line: line_no,
                    key: full.clone(),
                    message: e.to_string(),
                })?);
                continue;
            }
            lines_of.insert(full.clone(), line_no);
            let c = cfg.get_or_insert_with(Self::example1);
            c.set(&full, value).map_err(|message| Error::Config { line: line_no, key: full.clone(), message })?;
        }
        let cfg = cfg.unwrap_or_else(Self::example1);
        cfg.validate().map_err(|e| match e {
            Error::Config { line: 0, key, message } => {
                Error::Config { line: lines_of.get(&key).copied().unwrap_or(0), key, message }
            }
            other => other,
        })?;
        Ok(cfg)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num(v: &str) -> std::result::Result<f64, String> {
            let x: f64 = v.parse().map_err(|_| format!("`{v}` is not a number"))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("`{v}` is not finite"))
            }
        }
        fn list(v: &str) -> std::result::Result<Vec<f64>, String> {
            v.split(',').filter(|t| !t.trim().is_empty()).map(|t| num(t.trim())).collect()
        }
        fn point(v: &str) -> std::result::Result<Point, String> {
            match list(v)?.as_slice() {
                [x, y] => Ok([*x, *y]),
                _ => Err(format!("expected `x, y`, got `{v}`")),
            }
        }
        match key {
            "name" => self.name = value.to_string(),
            "geometry.R" => self.inner_radius = num(value)?,
            "geometry.rho" => self.outer_radius = num(value)?,
            "geometry.h" => self.h_target = num(value)?,
            "geometry.surface" => self.surface = parse_surface(value)?,
            "pml.sigma" => self.sigma = num(value)?,
            "pml.sigma_hat" => self.sigma_hat_mode = value.parse()?,
            "pml.profile" => self.profile_kind = value.parse()?,
            "source.x0" => self.source_center = point(value)?,
            "source.eta" => self.source_eta = num(value)?,
            "source.temporal" => self.temporal = parse_temporal(value)?,
            "time.T" => self.final_time = num(value)?,
            "time.dt" => self.dt = num(value)?,
            "output.snapshots" => self.snapshots = value.parse().map_err(|_| format!("`{value}` is not a count"))?,
            "output.probes" => {
                self.probes = value.split(';').filter(|p| !p.trim().is_empty()).map(point).collect::<std::result::Result<_, _>>()?
            }
            "output.dir" => self.output_dir = PathBuf::from(value),
            "sweep.param" => {
                let kind = value.parse()?;
                let values = self.sweep.take().map(|s| s.values).unwrap_or_default();
                self.sweep = Some(Sweep { kind, values });
            }
            "sweep.values" => {
                let values = list(value)?;
                let kind = self.sweep.as_ref().map_or(SweepKind::Sigma, |s| s.kind);
                self.sweep = Some(Sweep { kind, values });
            }
            "reference.sigma" => self.reference_sigma = Some(num(value)?),
            "reference.rho" => self.reference_rho = Some(num(value)?),
            "frequency.s1" => self.s1 = num(value)?,
            "frequency.s2" => self.s2 = num(value)?,
            "frequency.modes" => self.modes = value.parse().map_err(|_| format!("`{value}` is not a count"))?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: String| Err(Error::Config { line: 0, key: key.into(), message });
        for (key, v) in [
            ("geometry.R", self.inner_radius),
            ("geometry.h", self.h_target),
            ("source.eta", self.source_eta),
            ("time.T", self.final_time),
            ("time.dt", self.dt),
            ("frequency.s1", self.s1),
        ] {
            if !(v > 0.0) {
                return bad(key, format!("must be positive, got {v}"));
            }
        }
        if !(self.outer_radius > self.inner_radius) {
            return bad("geometry.rho", format!("must exceed R = {}, got {}", self.inner_radius, self.outer_radius));
        }
        if !(self.sigma >= 0.0) {
            return bad("pml.sigma", format!("must be non-negative, got {}", self.sigma));
        }
        if let Some(sw) = &self.sweep {
            if sw.values.windows(2).any(|w| !(w[1] > w[0])) {
                return bad("sweep.values", "must be sorted ascending without repeats".into());
            }
            if sw.values.iter().any(|v| !(*v > 0.0)) {
                return bad("sweep.values", "must be positive".into());
            }
            let (sig_max, rho_max) = self.sweep_extent();
            let (rs, rr) = self.reference_parameters();
            if !(rs > sig_max) {
                return bad("reference.sigma", format!("{rs} must exceed every swept sigma (max {sig_max})"));
            }
            if !(rr > rho_max) {
                return bad("reference.rho", format!("{rr} must exceed every swept rho (max {rho_max})"));
            }
        }
        Ok(())
    }

    /// Largest sigma and rho that occur in the sweep.
    pub fn sweep_extent(&self) -> (f64, f64) {
        match &self.sweep {
            Some(Sweep { kind: SweepKind::Sigma, values }) => (values.last().copied().unwrap_or(self.sigma), self.outer_radius),
            Some(Sweep { kind: SweepKind::Thickness, values }) => {
                (self.sigma, self.inner_radius + values.last().copied().unwrap_or(self.outer_radius - self.inner_radius))
            }
            None => (self.sigma, self.outer_radius),
        }
    }

    /// `(sigma, rho)` of the self-convergence reference.
    pub fn reference_parameters(&self) -> (f64, f64) {
        let (sig, rho) = self.sweep_extent();
        (
            self.reference_sigma.unwrap_or(1.3 * sig),
            self.reference_rho.unwrap_or(self.inner_radius + 1.3 * (rho - self.inner_radius)),
        )
    }

    /// Canonical `key = value` listing, parseable by [`RunConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let fmt_list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "\n[geometry]");
        let _ = writeln!(s, "R = {}", self.inner_radius);
        let _ = writeln!(s, "rho = {}", self.outer_radius);
        let _ = writeln!(s, "h = {}", self.h_target);
        let _ = writeln!(s, "surface = {}", format_surface(&self.surface));
        let _ = writeln!(s, "\n[pml]");
        let _ = writeln!(s, "sigma = {}", self.sigma);
        let _ = writeln!(s, "sigma_hat = {}", self.sigma_hat_mode);
        let _ = writeln!(s, "profile = {}", self.profile_kind);
        let _ = writeln!(s, "\n[source]");
        let _ = writeln!(s, "x0 = {}", fmt_list(&self.source_center));
        let _ = writeln!(s, "eta = {}", self.source_eta);
        let _ = writeln!(s, "temporal = {}", format_temporal(&self.temporal));
        let _ = writeln!(s, "\n[time]");
        let _ = writeln!(s, "T = {}", self.final_time);
        let _ = writeln!(s, "dt = {}", self.dt);
        let _ = writeln!(s, "\n[output]");
        let _ = writeln!(s, "snapshots = {}", self.snapshots);
        let probes: Vec<String> = self.probes.iter().map(|p| fmt_list(p)).collect();
        let _ = writeln!(s, "probes = {}", probes.join("; "));
        let _ = writeln!(s, "dir = {}", self.output_dir.display());
        if let Some(sw) = &self.sweep {
            let _ = writeln!(s, "\n[sweep]");
            let _ = writeln!(s, "param = {}", sw.kind);
            let _ = writeln!(s, "values = {}", fmt_list(&sw.values));
            let (rs, rr) = self.reference_parameters();
            let _ = writeln!(s, "\n[reference]");
            let _ = writeln!(s, "sigma = {rs}");
            let _ = writeln!(s, "rho = {rr}");
        }
        let _ = writeln!(s, "\n[frequency]");
        let _ = writeln!(s, "s1 = {}", self.s1);
        let _ = writeln!(s, "s2 = {}", self.s2);
        let _ = writeln!(s, "modes = {}", self.modes);
        s
    }
}

/// `flat`, `rough` or `sine:<amplitude>,<wavenumber>,<half_width>`.
pub fn parse_surface(v: &str) -> std::result::Result<ProfileSpec, String> {
    match v.trim() {
        "flat" => Ok(ProfileSpec::Flat),
        "rough" => Ok(ProfileSpec::rough_surface()),
        other => {
            let args = other.strip_prefix("sine:").ok_or_else(|| format!("expected flat, rough or sine:a,k,w, got `{other}`"))?;
            let nums: Vec<f64> = args
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
                .collect::<std::result::Result<_, _>>()?;
            match nums.as_slice() {
                [a, k, w] => Ok(ProfileSpec::Sine { amplitude: *a, wavenumber: *k, half_width: *w }),
                _ => Err("sine surface needs amplitude, wavenumber and half width".into()),
            }
        }
    }
}

fn format_surface(p: &ProfileSpec) -> String {
    match p {
        ProfileSpec::Pieces(_) => "pieces".into(),
        other => other.to_string(),
    }
}

/// `sin:<omega>` or `linear`.
pub fn parse_temporal(v: &str) -> std::result::Result<Temporal, String> {
    match v.trim() {
        "linear" | "t" => Ok(Temporal::Linear),
        other => {
            let w = other.strip_prefix("sin:").ok_or_else(|| format!("expected `sin:<omega>` or `linear`, got `{other}`"))?;
            let omega: f64 = w.trim().parse().map_err(|_| format!("`{w}` is not a number"))?;
            if !omega.is_finite() {
                return Err(format!("`{w}` is not finite"));
            }
            Ok(Temporal::Sine { omega })
        }
    }
}

fn format_temporal(t: &Temporal) -> String {
    match t {
        Temporal::Sine { omega } => format!("sin:{omega}"),
        Temporal::Linear => "linear".into(),
        Temporal::Samples { .. } => "samples".into(),
    }
}
