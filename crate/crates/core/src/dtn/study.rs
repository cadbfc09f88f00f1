use super::solve::{relative_l2, solve_dtn_truncated, solve_pml_frequency};
use crate::error::{Error, Result};
use crate::fem::assemble_mass;
use crate::fit::{log_linear_fit, LinearFit};
use crate::geometry::{generate_mesh, Mesh, SurfaceProfile};
use crate::pml::{PmlProfile, ProfileKind, SigmaHatMode};
use crate::special::ComplexFrequency;
use crate::time::SourceTerm;
use num_complex::Complex64;
use std::io::Write;

/// Which PML parameter a study varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Sigma,
    /// Layer thickness `rho - R`.
    Thickness,
}

#[derive(Debug, Clone)]
pub struct StudySetup {
    pub surface: SurfaceProfile,
    pub inner_radius: f64,
    /// Used for sigma sweeps.
    pub outer_radius: f64,
    /// Used for thickness sweeps.
    pub sigma: f64,
    pub kind: ProfileKind,
    pub mode: SigmaHatMode,
    pub h_target: f64,
    pub s: ComplexFrequency,
    /// Only the spatial factor is used.
    pub source: SourceTerm,
    pub n_modes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub sigma: f64,
    pub rho: f64,
    pub error_l2: f64,
    /// `rho sigma_hat(rho) (1 - R^2/rho^2)`.
    pub predicted_exponent: f64,
}

#[derive(Debug, Clone)]
pub struct StudyReport {
    pub s: ComplexFrequency,
    pub rows: Vec<StudyRow>,
    /// Number of leading rows over which the error strictly decreases.
    pub pre_floor: usize,
    /// False when the error rises again by more than the floor tolerance.
    pub monotone: bool,
    /// Fit of `ln error` against the predicted exponent over the pre-floor rows.
    pub fit: Option<LinearFit>,
    pub notes: Vec<String>,
}

/// Errors past the first non-decrease may wander within this factor of the smallest error.
pub const FLOOR_TOLERANCE: f64 = 2.0;

/// Splits an error sequence into its strictly decreasing prefix and checks that
/// the remainder stays near the floor.
pub fn floor_split(errors: &[f64]) -> (usize, bool) {
    let mut k = usize::from(!errors.is_empty());
    while k < errors.len() && errors[k] < errors[k - 1] {
        k += 1;
    }
    let floor = errors[..k].iter().copied().fold(f64::INFINITY, f64::min);
    let monotone = errors[k..].iter().all(|&e| e <= FLOOR_TOLERANCE * floor);
    (k, monotone)
}

/// Compares the PML solution with the DtN reference on the physical region
/// for each sweep value.
pub fn convergence_study(setup: &StudySetup, param: SweepParam, values: &[f64]) -> Result<StudyReport> {
    if values.is_empty() {
        return Err(Error::InvalidInput("empty sweep".into()));
    }
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("sweep values must increase strictly".into()));
    }
    let big_r = setup.inner_radius;
    let rho_of = |v: f64| match param {
        SweepParam::Sigma => setup.outer_radius,
        SweepParam::Thickness => big_r + v,
    };
    let sigma_of = |v: f64| match param {
        SweepParam::Sigma => v,
        SweepParam::Thickness => setup.sigma,
    };

    let mut cached: Option<(f64, Mesh)> = None;
    let mut reference: Option<(Mesh, Vec<usize>, Vec<Complex64>)> = None;
    let mut rows = Vec::with_capacity(values.len());
    for &v in values {
        let rho = rho_of(v);
        if cached.as_ref().map(|c| c.0) != Some(rho) {
            cached = Some((rho, generate_mesh(&setup.surface, big_r, rho, setup.h_target)?));
        }
        let mesh = &cached.as_ref().unwrap().1;
        let (sub, map) = mesh.physical_submesh()?;
        match &reference {
            None => {
                let f: Vec<Complex64> = sub.vertices.iter().map(|&x| Complex64::new(setup.source.spatial(x), 0.0)).collect();
                let dtn = solve_dtn_truncated(&sub, setup.s, &f, setup.n_modes)?;
                reference = Some((sub, map.clone(), dtn.field));
            }
            Some((ref_sub, _, _)) => {
                if ref_sub.vertices != sub.vertices || ref_sub.triangles != sub.triangles {
                    return Err(Error::GridMismatch("physical submesh differs between sweep points".into()));
                }
            }
        }
        let (ref_sub, _, ref_field) = reference.as_ref().unwrap();
        let profile = PmlProfile::new(big_r, rho, sigma_of(v), setup.kind, setup.mode)?;
        let f: Vec<Complex64> = mesh.vertices.iter().map(|&x| Complex64::new(setup.source.spatial(x), 0.0)).collect();
        let u = solve_pml_frequency(mesh, &profile, setup.s, &f)?;
        let restricted: Vec<Complex64> = map.iter().map(|&k| u[k]).collect();
        let mass = assemble_mass(ref_sub, |_| 1.0);
        rows.push(StudyRow {
            sigma: profile.sigma0,
            rho,
            error_l2: relative_l2(&mass, &restricted, ref_field),
            predicted_exponent: profile.damping_exponent(),
        });
    }

    let errors: Vec<f64> = rows.iter().map(|r| r.error_l2).collect();
    let (pre_floor, monotone) = floor_split(&errors);
    let mut notes = Vec::new();
    if !monotone {
        notes.push("error rises above the floor after decreasing; discretization error may dominate".into());
    }
    let fit = if pre_floor >= 2 {
        let x: Vec<f64> = rows[..pre_floor].iter().map(|r| r.predicted_exponent).collect();
        Some(log_linear_fit(&x, &errors[..pre_floor])?)
    } else {
        notes.push("fewer than two pre-floor points; no fit".into());
        None
    };
    Ok(StudyReport { s: setup.s, rows, pre_floor, monotone, fit, notes })
}

/// Columns: `sigma,rho,s1,s2,error_L2,predicted_exponent,fitted_slope,fit_r2`.
pub fn write_study_csv<W: Write>(mut w: W, report: &StudyReport) -> Result<()> {
    writeln!(w, "sigma,rho,s1,s2,error_L2,predicted_exponent,fitted_slope,fit_r2")?;
    let (slope, r2) = report.fit.map_or((f64::NAN, f64::NAN), |f| (f.slope, f.r2));
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{:e},{},{},{}",
            r.sigma,
            r.rho,
            report.s.s1(),
            report.s.s2(),
            r.error_l2,
            r.predicted_exponent,
            slope,
            r2
        )?;
    }
    Ok(())
}
