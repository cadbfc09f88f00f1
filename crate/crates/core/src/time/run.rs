use super::source::SourceTerm;
use super::state::State;
use super::stepper::Stepper;
use crate::error::{Error, Result};
use crate::fem::SparseMatrix;
use crate::geometry::{locate, Location, Mesh, Point};
use crate::pml::{check_radii, PmlProfile};

/// Time grid and recording options of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub final_time: f64,
    pub dt: f64,
    /// Times at which full states are kept; empty means 20 equally spaced snapshots.
    pub snapshot_times: Vec<f64>,
    pub probes: Vec<Point>,
    /// Keep `u` on the physical vertices at every step (needed for self-convergence errors).
    pub record_history: bool,
    /// The temporal factor is clamped to zero after this time.
    pub switch_off: Option<f64>,
}

impl RunSettings {
    pub fn new(final_time: f64, dt: f64) -> Self {
        RunSettings {
            final_time,
            dt,
            snapshot_times: Vec::new(),
            probes: Vec::new(),
            record_history: false,
            switch_off: None,
        }
    }

    pub fn num_steps(&self) -> usize {
        (self.final_time / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    fn validate(&self) -> Result<()> {
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return Err(Error::InvalidInput(format!("final time must be positive, got {}", self.final_time)));
        }
        if !(self.dt > 0.0) || self.dt > self.final_time / 50.0 * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!(
                "dt = {} must lie in (0, T/50] with T = {}",
                self.dt, self.final_time
            )));
        }
        Ok(())
    }

    fn snapshot_steps(&self) -> Vec<usize> {
        let n = self.num_steps();
        let times: Vec<f64> = if self.snapshot_times.is_empty() {
            (1..=20).map(|k| self.final_time * k as f64 / 20.0).collect()
        } else {
            self.snapshot_times.clone()
        };
        let mut steps: Vec<usize> = times
            .iter()
            .map(|&t| ((t / self.dt).round().max(0.0) as usize).min(n))
            .collect();
        steps.sort_unstable();
        steps.dedup();
        steps
    }
}

/// Per-step diagnostics; time derivatives are backward differences.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepRecord {
    pub t: f64,
    pub source_factor: f64,
    /// `(|u|^2 + |p|^2) / 2` over the whole mesh.
    pub energy: f64,
    pub dt_u: f64,
    pub dt_p: f64,
    pub dt_u_star: f64,
    pub dt_p_star: f64,
    pub sigma_u: f64,
    pub dt_u_plus_sigma_u: f64,
    /// `|d_t f + sigma f|`; the source lives where `sigma = 0`.
    pub forcing: f64,
    pub max_abs_u: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dt: f64,
    /// Entry 0 is the zero initial state.
    pub records: Vec<StepRecord>,
    pub probes: Vec<Point>,
    /// `probe_values[step][probe]`.
    pub probe_values: Vec<Vec<f64>>,
    pub snapshots: Vec<State>,
    pub history_vertices: Vec<usize>,
    /// `history[step][k]` is `u` at `history_vertices[k]`.
    pub history: Vec<Vec<f64>>,
    pub final_state: State,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }
}

fn quad_form(m: &SparseMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    m.triplets().map(|(i, j, v)| x[i] * v * y[j]).sum()
}

fn norm_m(m: &SparseMatrix<f64>, x: &[f64]) -> f64 {
    quad_form(m, x, x).max(0.0).sqrt()
}

fn diff(a: &[f64], b: &[f64], inv_dt: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (x - y) * inv_dt).collect()
}

pub fn run(mesh: &Mesh, profile: &PmlProfile, source: &SourceTerm, settings: &RunSettings) -> Result<Trajectory> {
    settings.validate()?;
    check_radii(mesh, profile)?;
    let stepper = Stepper::new(mesh, profile, settings.dt)?;
    run_with(&stepper, mesh, source, settings)
}

/// Runs with a prebuilt stepper whose `dt` must match the settings.
pub fn run_with(stepper: &Stepper, mesh: &Mesh, source: &SourceTerm, settings: &RunSettings) -> Result<Trajectory> {
    settings.validate()?;
    if (stepper.dt - settings.dt).abs() > 1e-14 * settings.dt {
        return Err(Error::InvalidInput(format!(
            "stepper built for dt = {}, run requests {}",
            stepper.dt, settings.dt
        )));
    }
    let n = mesh.num_vertices();
    let locations: Vec<Location> = settings
        .probes
        .iter()
        .map(|&p| locate(mesh, p).ok_or_else(|| Error::InvalidInput(format!("probe {p:?} lies outside the mesh"))))
        .collect::<Result<_>>()?;
    let probe = |u: &[f64]| -> Vec<f64> {
        locations
            .iter()
            .map(|l| {
                let tri = mesh.triangles[l.triangle];
                (0..3).map(|k| l.barycentric[k] * u[tri[k]]).sum()
            })
            .collect()
    };

    let spatial = source.nodal(mesh);
    let base_load = stepper.load(&spatial)?;
    let source_norm = norm_m(&stepper.blocks.source_mass, &spatial);
    let factor = |t: f64| match settings.switch_off {
        Some(t_off) if t > t_off + 1e-12 => 0.0,
        _ => source.temporal(t),
    };

    let b = &stepper.blocks;
    let nsteps = settings.num_steps();
    let snap_steps = settings.snapshot_steps();
    let history_vertices = if settings.record_history { mesh.physical_vertices() } else { Vec::new() };

    let mut state = State::zeros(n);
    let mut records = vec![StepRecord::default()];
    let mut probe_values = vec![probe(&state.u)];
    let mut snapshots = Vec::new();
    if snap_steps.first() == Some(&0) {
        snapshots.push(state.clone());
    }
    let mut history = Vec::new();
    if settings.record_history {
        history.push(vec![0.0; history_vertices.len()]);
    }
    let inv_dt = 1.0 / settings.dt;
    let mut prev_factor = 0.0;
    for step in 1..=nsteps {
        let t = step as f64 * settings.dt;
        let g = factor(t);
        let load: Vec<f64> = base_load.iter().map(|v| v * g).collect();
        let next = stepper
            .step(&state, &load)
            .map_err(|e| Error::StepFailed { step, source: Box::new(e) })?;
        if !next.is_finite() {
            return Err(Error::NonFinite { step, time: t });
        }
        let du = diff(&next.u, &state.u, inv_dt);
        let dpx = diff(&next.px, &state.px, inv_dt);
        let dpy = diff(&next.py, &state.py, inv_dt);
        let dus = diff(&next.u_star, &state.u_star, inv_dt);
        let dpsx = diff(&next.p_star_x, &state.p_star_x, inv_dt);
        let dpsy = diff(&next.p_star_y, &state.p_star_y, inv_dt);
        let sq = |x: &[f64]| quad_form(&b.mass, x, x);
        let sig_sq = quad_form(&stepper.m_sigma_sq, &next.u, &next.u);
        let combo = sq(&du) + 2.0 * quad_form(&b.m_sigma, &du, &next.u) + sig_sq;
        records.push(StepRecord {
            t,
            source_factor: g,
            energy: 0.5 * (sq(&next.u) + sq(&next.px) + sq(&next.py)),
            dt_u: sq(&du).sqrt(),
            dt_p: (sq(&dpx) + sq(&dpy)).sqrt(),
            dt_u_star: sq(&dus).sqrt(),
            dt_p_star: (sq(&dpsx) + sq(&dpsy)).sqrt(),
            sigma_u: sig_sq.max(0.0).sqrt(),
            dt_u_plus_sigma_u: combo.max(0.0).sqrt(),
            forcing: ((g - prev_factor) * inv_dt).abs() * source_norm,
            max_abs_u: next.u.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
        });
        prev_factor = g;
        probe_values.push(probe(&next.u));
        if settings.record_history {
            history.push(history_vertices.iter().map(|&v| next.u[v]).collect());
        }
        if snap_steps.binary_search(&step).is_ok() {
            snapshots.push(next.clone());
        }
        state = next;
    }
    Ok(Trajectory {
        dt: settings.dt,
        records,
        probes: settings.probes.clone(),
        probe_values,
        snapshots,
        history_vertices,
        history,
        final_state: state,
    })
}

/// Discrete counterparts of the a-priori stability bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityFunctionals {
    /// `max_n (|d_t u| + |d_t p| + |d_t u*| + |d_t p*|)`.
    pub lhs_thm_gg: f64,
    /// `sum_n dt |d_t f + sigma f|`.
    pub rhs_thm_gg: f64,
    /// `max_n |sigma u|`.
    pub lhs_lem_sg: f64,
    /// `max_n |d_t u + sigma u|`.
    pub rhs_lem_sg: f64,
}

pub fn stability_functionals(traj: &Trajectory) -> StabilityFunctionals {
    let mut f = StabilityFunctionals {
        lhs_thm_gg: 0.0,
        rhs_thm_gg: 0.0,
        lhs_lem_sg: 0.0,
        rhs_lem_sg: 0.0,
    };
    for r in traj.records.iter().skip(1) {
        f.lhs_thm_gg = f.lhs_thm_gg.max(r.dt_u + r.dt_p + r.dt_u_star + r.dt_p_star);
        f.rhs_thm_gg += traj.dt * r.forcing;
        f.lhs_lem_sg = f.lhs_lem_sg.max(r.sigma_u);
        f.rhs_lem_sg = f.rhs_lem_sg.max(r.dt_u_plus_sigma_u);
    }
    f
}
