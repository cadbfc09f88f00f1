use super::config::{RunConfig, SweepKind};
use crate::dtn::{convergence_study, write_study_csv, StudyReport, StudySetup, SweepParam};
use crate::error::{Error, Result};
use crate::fit::{log_linear_fit, LinearFit};
use crate::geometry::{build_surface_profile, generate_mesh, Mesh, MeshStats, Point};
use crate::pml::PmlProfile;
use crate::special::ComplexFrequency;
use crate::time::{
    run, stability_functionals, write_functionals_csv, write_probes_csv, write_vtk, RunSettings, SourceTerm,
    StabilityFunctionals, Trajectory,
};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

/// `u` on the physical vertices at every time step.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalHistory {
    pub points: Vec<Point>,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl PhysicalHistory {
    pub fn from_trajectory(mesh: &Mesh, traj: &Trajectory) -> Result<Self> {
        if traj.history.is_empty() {
            return Err(Error::InvalidInput("trajectory was run without history recording".into()));
        }
        Ok(PhysicalHistory {
            points: traj.history_vertices.iter().map(|&v| mesh.vertices[v]).collect(),
            times: traj.times(),
            values: traj.history.clone(),
        })
    }
}

/// `max |u - u_ref| / max |u_ref|` over all time steps and physical vertices.
pub fn relative_error(run: &PhysicalHistory, reference: &PhysicalHistory) -> Result<f64> {
    if run.points != reference.points {
        return Err(Error::GridMismatch(format!(
            "physical vertices differ ({} vs {} points)",
            run.points.len(),
            reference.points.len()
        )));
    }
    if run.times.len() != reference.times.len()
        || run.times.iter().zip(&reference.times).any(|(a, b)| (a - b).abs() > 1e-9 * (1.0 + b.abs()))
    {
        return Err(Error::GridMismatch("time grids differ".into()));
    }
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for (a, b) in run.values.iter().zip(&reference.values) {
        for (x, y) in a.iter().zip(b) {
            num = num.max((x - y).abs());
            den = den.max(y.abs());
        }
    }
    if den == 0.0 {
        return Err(Error::Domain("reference solution vanishes identically".into()));
    }
    Ok(num / den)
}

pub fn source_for(cfg: &RunConfig) -> Result<SourceTerm> {
    SourceTerm::new(cfg.source_center, cfg.source_eta, cfg.temporal.clone())
}

pub fn profile_for(cfg: &RunConfig, sigma: f64, rho: f64) -> Result<PmlProfile> {
    PmlProfile::new(cfg.inner_radius, rho, sigma, cfg.profile_kind, cfg.sigma_hat_mode)
}

pub fn mesh_for(cfg: &RunConfig, rho: f64) -> Result<Mesh> {
    let surface = build_surface_profile(&cfg.surface)?;
    generate_mesh(&surface, cfg.inner_radius, rho, cfg.h_target)
}

/// One time-domain run at the given PML parameters.
#[derive(Debug, Clone)]
pub struct TimeRun {
    pub sigma: f64,
    pub rho: f64,
    pub mesh: Mesh,
    pub trajectory: Trajectory,
    pub functionals: StabilityFunctionals,
}

pub fn run_time(cfg: &RunConfig, mesh: Mesh, sigma: f64, record_history: bool, keep_snapshots: bool) -> Result<TimeRun> {
    let rho = mesh.outer_radius;
    let profile = profile_for(cfg, sigma, rho)?;
    let mut settings = RunSettings::new(cfg.final_time, cfg.dt);
    settings.probes = cfg.probes.clone();
    settings.record_history = record_history;
    settings.snapshot_times = if keep_snapshots && cfg.snapshots > 0 {
        (1..=cfg.snapshots).map(|k| cfg.final_time * k as f64 / cfg.snapshots as f64).collect()
    } else {
        vec![cfg.final_time]
    };
    let trajectory = run(&mesh, &profile, &source_for(cfg)?, &settings)?;
    let functionals = stability_functionals(&trajectory);
    Ok(TimeRun { sigma, rho, mesh, trajectory, functionals })
}

/// Log-linear fit of an error sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub fit: Option<LinearFit>,
    /// What the fit's abscissa is: `sigma` or `predicted_exponent`.
    pub abscissa: &'static str,
    pub decaying: bool,
    pub notice: Option<String>,
}

/// Fits `ln error` against `x`; needs at least four finite positive errors.
pub fn fit_errors(x: &[f64], errors: &[f64], abscissa: &'static str) -> FitReport {
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        x.iter().zip(errors).filter(|(_, e)| e.is_finite() && **e > 0.0).map(|(a, b)| (*a, *b)).unzip();
    if xs.len() < 4 {
        return FitReport {
            fit: None,
            abscissa,
            decaying: false,
            notice: Some(format!("fit skipped: {} usable errors, at least 4 needed", xs.len())),
        };
    }
    match log_linear_fit(&xs, &ys) {
        Ok(fit) => {
            let decaying = fit.slope < 0.0;
            FitReport {
                fit: Some(fit),
                abscissa,
                decaying,
                notice: (!decaying).then(|| "error does not decay with the swept parameter".to_string()),
            }
        }
        Err(e) => FitReport { fit: None, abscissa, decaying: false, notice: Some(format!("fit failed: {e}")) },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// The swept value: sigma, or the thickness `rho - R`.
    pub param: f64,
    pub sigma: f64,
    pub rho: f64,
    pub e_rel: f64,
    pub predicted_exponent: f64,
    pub functionals: StabilityFunctionals,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub kind: SweepKind,
    pub points: Vec<SweepPoint>,
    pub reference_sigma: f64,
    pub reference_rho: f64,
    pub fit: FitReport,
}

/// Runs `jobs` on a pool of scoped worker threads; results keep job order.
fn parallel_map<T: Sync, R: Send>(jobs: &[T], f: impl Fn(usize, &T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(jobs.len()).max(1);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<R>> = (0..jobs.len()).map(|_| None).collect();
    let results = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if k >= jobs.len() {
                    break;
                }
                let r = f(k, &jobs[k]);
                results.lock().unwrap()[k] = Some(r);
            });
        }
    });
    slots.into_iter().map(|r| r.expect("worker finished every job")).collect()
}

/// Time-domain sweep: one run per value plus the reference, `E_rel` per
/// point, and a log-linear fit. With `out` set, every point writes its
/// probes and functionals into its own subdirectory.
pub fn sweep_and_fit(cfg: &RunConfig, out: Option<&Path>) -> Result<SweepOutcome> {
    cfg.validate()?;
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::InvalidInput("config has no sweep".into()))?;
    if sweep.values.is_empty() {
        return Err(Error::InvalidInput("sweep has no values".into()));
    }
    let (ref_sigma, ref_rho) = cfg.reference_parameters();
    let big_r = cfg.inner_radius;
    let mut jobs: Vec<(f64, f64)> = sweep
        .values
        .iter()
        .map(|&v| match sweep.kind {
            SweepKind::Sigma => (v, cfg.outer_radius),
            SweepKind::Thickness => (cfg.sigma, big_r + v),
        })
        .collect();
    jobs.push((ref_sigma, ref_rho));
    let n = sweep.values.len();

    let results = parallel_map(&jobs, |k, &(sigma, rho)| -> Result<(PhysicalHistory, StabilityFunctionals, f64)> {
        let tr = run_time(cfg, mesh_for(cfg, rho)?, sigma, true, false)?;
        if let Some(dir) = out {
            let sub = if k == n { dir.join("reference") } else { dir.join(format!("point_{k:02}")) };
            fs::create_dir_all(&sub)?;
            write_probes_csv(BufWriter::new(File::create(sub.join("probes.csv"))?), &tr.trajectory)?;
            write_functionals_csv(BufWriter::new(File::create(sub.join("functionals.csv"))?), &tr.trajectory)?;
        }
        let exponent = profile_for(cfg, sigma, rho)?.damping_exponent();
        Ok((PhysicalHistory::from_trajectory(&tr.mesh, &tr.trajectory)?, tr.functionals, exponent))
    });
    let mut results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let (reference, _, _) = results.pop().expect("reference job");
    let mut points = Vec::with_capacity(n);
    for (k, (hist, functionals, exponent)) in results.into_iter().enumerate() {
        points.push(SweepPoint {
            param: sweep.values[k],
            sigma: jobs[k].0,
            rho: jobs[k].1,
            e_rel: relative_error(&hist, &reference)?,
            predicted_exponent: exponent,
            functionals,
        });
    }
    let errors: Vec<f64> = points.iter().map(|p| p.e_rel).collect();
    let fit = match sweep.kind {
        SweepKind::Sigma => fit_errors(&sweep.values, &errors, "sigma"),
        SweepKind::Thickness => {
            let x: Vec<f64> = points.iter().map(|p| p.predicted_exponent).collect();
            fit_errors(&x, &errors, "predicted_exponent")
        }
    };
    Ok(SweepOutcome { kind: sweep.kind, points, reference_sigma: ref_sigma, reference_rho: ref_rho, fit })
}

/// Frequency-domain study configured from the run config.
pub fn frequency_study(cfg: &RunConfig) -> Result<StudyReport> {
    cfg.validate()?;
    let (param, values) = match &cfg.sweep {
        Some(sw) => (
            match sw.kind {
                SweepKind::Sigma => SweepParam::Sigma,
                SweepKind::Thickness => SweepParam::Thickness,
            },
            sw.values.clone(),
        ),
        None => (SweepParam::Sigma, vec![cfg.sigma]),
    };
    let setup = StudySetup {
        surface: build_surface_profile(&cfg.surface)?,
        inner_radius: cfg.inner_radius,
        outer_radius: cfg.outer_radius,
        sigma: cfg.sigma,
        kind: cfg.profile_kind,
        mode: cfg.sigma_hat_mode,
        h_target: cfg.h_target,
        s: ComplexFrequency::new(cfg.s1, cfg.s2)?,
        source: source_for(cfg)?,
        n_modes: cfg.modes,
    };
    convergence_study(&setup, param, &values)
}

fn write_fit<W: Write>(mut w: W, fit: &FitReport) -> Result<()> {
    writeln!(w, "abscissa = {}", fit.abscissa)?;
    match fit.fit {
        Some(f) => {
            writeln!(w, "slope = {}", f.slope)?;
            writeln!(w, "intercept = {}", f.intercept)?;
            writeln!(w, "r2 = {}", f.r2)?;
            writeln!(w, "points = {}", f.points)?;
        }
        None => writeln!(w, "slope = none")?,
    }
    writeln!(w, "decaying = {}", fit.decaying)?;
    if let Some(n) = &fit.notice {
        writeln!(w, "notice = {n}")?;
    }
    Ok(())
}

fn write_mesh_stats(s: &mut String, label: &str, st: &MeshStats) {
    use std::fmt::Write as _;
    let _ = writeln!(s, "\n[{label}]");
    let _ = writeln!(s, "vertices = {}", st.vertices);
    let _ = writeln!(s, "triangles = {}", st.triangles);
    let _ = writeln!(s, "physical_triangles = {}", st.physical_triangles);
    let _ = writeln!(s, "boundary_edges = {}", st.boundary_edges);
    let _ = writeln!(s, "min_angle_deg = {}", st.min_angle_deg);
    let _ = writeln!(s, "max_edge = {}", st.max_edge);
    let _ = writeln!(s, "area = {}", st.area);
}

/// What a run produced, for the caller's summary line.
#[derive(Debug, Clone)]
pub enum RunSummary {
    Single { functionals: StabilityFunctionals, max_abs_u: f64 },
    Sweep(SweepOutcome),
    Frequency(StudyReport),
}

/// Runs the configuration and writes its artifacts to `out`. The manifest is
/// written even when the run fails.
pub fn run_example(cfg: &RunConfig, out: &Path, frequency_domain: bool) -> Result<RunSummary> {
    fs::create_dir_all(out)?;
    let mut extra = String::new();
    let result = run_inner(cfg, out, frequency_domain, &mut extra);
    let mut manifest = String::new();
    manifest.push_str("# resolved configuration\n");
    manifest.push_str(&cfg.to_text());
    manifest.push_str("\n[build]\n");
    manifest.push_str(&format!("version = {}\n", env!("CARGO_PKG_VERSION")));
    manifest.push_str(&format!("mode = {}\n", if frequency_domain { "frequency" } else { "time" }));
    manifest.push_str(&extra);
    manifest.push_str("\n[status]\n");
    match &result {
        Ok(_) => manifest.push_str("result = ok\n"),
        Err(e) => manifest.push_str(&format!("result = error\nmessage = {e}\n")),
    }
    fs::write(out.join("manifest.txt"), manifest)?;
    result
}

fn run_inner(cfg: &RunConfig, out: &Path, frequency_domain: bool, extra: &mut String) -> Result<RunSummary> {
    cfg.validate()?;
    if frequency_domain {
        let report = frequency_study(cfg)?;
        write_study_csv(BufWriter::new(File::create(out.join("study.csv"))?), &report)?;
        let fit = FitReport {
            fit: report.fit,
            abscissa: "predicted_exponent",
            decaying: report.fit.is_some_and(|f| f.slope < 0.0),
            notice: (!report.notes.is_empty()).then(|| report.notes.join("; ")),
        };
        write_fit(BufWriter::new(File::create(out.join("fit.txt"))?), &fit)?;
        extra.push_str(&format!("\n[study]\npre_floor = {}\nmonotone = {}\n", report.pre_floor, report.monotone));
        return Ok(RunSummary::Frequency(report));
    }
    match &cfg.sweep {
        Some(sw) if !sw.values.is_empty() => {
            let outcome = sweep_and_fit(cfg, Some(out))?;
            let mut w = BufWriter::new(File::create(out.join("errors.csv"))?);
            writeln!(w, "param,E_rel,predicted_exponent")?;
            for p in &outcome.points {
                writeln!(w, "{},{:e},{}", p.param, p.e_rel, p.predicted_exponent)?;
            }
            w.flush()?;
            write_fit(BufWriter::new(File::create(out.join("fit.txt"))?), &outcome.fit)?;
            for (k, p) in outcome.points.iter().enumerate() {
                extra.push_str(&format!("\n[point_{k:02}]\nsigma = {}\nrho = {}\n", p.sigma, p.rho));
            }
            Ok(RunSummary::Sweep(outcome))
        }
        _ => {
            let mesh = mesh_for(cfg, cfg.outer_radius)?;
            write_mesh_stats(extra, "mesh", &mesh.stats());
            let tr = run_time(cfg, mesh, cfg.sigma, false, true)?;
            let snaps = out.join("snapshots");
            fs::create_dir_all(&snaps)?;
            for (k, state) in tr.trajectory.snapshots.iter().enumerate() {
                write_vtk(BufWriter::new(File::create(snaps.join(format!("snap_{k:04}.vtk")))?), &tr.mesh, state)?;
            }
            write_probes_csv(BufWriter::new(File::create(out.join("probes.csv"))?), &tr.trajectory)?;
            write_functionals_csv(BufWriter::new(File::create(out.join("functionals.csv"))?), &tr.trajectory)?;
            let max_abs_u = tr.trajectory.final_state.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            Ok(RunSummary::Single { functionals: tr.functionals, max_abs_u })
        }
    }
}
