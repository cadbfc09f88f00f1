use super::modal::ModalTrace;
use crate::error::{Error, Result};
use crate::fem::{
    apply_dirichlet, assemble_mass, assemble_stiffness, identity_tensor, mass_norm, norm2, LuSolver, SparseMatrix,
    RESIDUAL_TOL,
};
use crate::geometry::{norm, BoundaryTag, Mesh};
use crate::pml::{assemble_frequency_system, PmlProfile};
use crate::special::{bessel_k_scaled, dtn_ratios, ComplexFrequency};
use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Default number of sine modes in the DtN operator.
pub const DEFAULT_MODES: usize = 32;

/// Angle of an interface vertex, with the axis endpoints pinned to 0 and pi.
fn polar_angle(p: [f64; 2]) -> f64 {
    p[1].atan2(p[0]).clamp(0.0, PI)
}

/// `c_nj = (2/pi) \int phi_j(theta) sin(n theta) d theta`, with `phi_j` the
/// piecewise-linear hat in `theta` over the interface vertices. Returns one
/// row per mode, one column per interface vertex.
pub fn interface_projection(thetas: &[f64], n_modes: usize) -> Vec<Vec<f64>> {
    let m = thetas.len();
    let mut c = vec![vec![0.0; m]; n_modes];
    for (k, row) in c.iter_mut().enumerate() {
        let n = (k + 1) as f64;
        for seg in 0..m.saturating_sub(1) {
            let (a, b) = (thetas[seg], thetas[seg + 1]);
            let len = b - a;
            let ds = ((n * b).sin() - (n * a).sin()) / (n * n);
            // \int (theta - a)/len sin and \int (b - theta)/len sin over [a, b]
            let rising = (-len * (n * b).cos() / n + ds) / len;
            let falling = (len * (n * a).cos() / n - ds) / len;
            row[seg + 1] += rising * 2.0 / PI;
            row[seg] += falling * 2.0 / PI;
        }
    }
    c
}

/// Result of the DtN-truncated Laplace-domain solve on the physical mesh.
#[derive(Debug, Clone)]
pub struct DtnSolution {
    pub field: Vec<Complex64>,
    /// Sine coefficients of the computed trace on the interface.
    pub trace: ModalTrace,
    pub residual: f64,
}

/// Solves `\int grad u . grad v + s^2 u v - <G u, v> = s \int f v` on a mesh of
/// the physical region, with `u = 0` on the surface. The DtN term is a rank
/// `n_modes` correction applied through the Woodbury identity on top of one
/// sparse factorization.
pub fn solve_dtn_truncated(
    mesh: &Mesh,
    s: ComplexFrequency,
    f_l: &[Complex64],
    n_modes: usize,
) -> Result<DtnSolution> {
    let nv = mesh.num_vertices();
    if f_l.len() != nv {
        return Err(Error::DimensionMismatch { expected: nv, got: f_l.len() });
    }
    if mesh.vertices.iter().any(|&p| norm(p) > mesh.inner_radius * (1.0 + 1e-9)) {
        return Err(Error::InvalidInput("DtN solve expects a mesh of the physical region only".into()));
    }
    if mesh.interface_vertices.len() < 2 * n_modes {
        return Err(Error::InvalidInput(format!(
            "{} interface vertices cannot carry {n_modes} modes",
            mesh.interface_vertices.len()
        )));
    }
    let radius = mesh.inner_radius;
    let sv = s.value();
    let stiff = assemble_stiffness(mesh, identity_tensor::<f64>).to_complex();
    let mass = assemble_mass(mesh, |_| 1.0);
    let sparse = stiff.add(&mass.to_complex().scale(sv * sv))?;
    let rhs: Vec<Complex64> = mass.to_complex().matvec(f_l)?.into_iter().map(|v| v * sv).collect();
    let mut mask = vec![false; nv];
    for v in mesh.tagged_vertices(BoundaryTag::Surface) {
        mask[v] = true;
    }
    let sys = apply_dirichlet(&sparse, &rhs, &mask)?;
    let mut reduced = vec![usize::MAX; nv];
    for (k, &v) in sys.free.iter().enumerate() {
        reduced[v] = k;
    }

    // Low-rank factors over interface vertices: coupling = C^T D C.
    let iface = &mesh.interface_vertices;
    let thetas: Vec<f64> = iface.iter().map(|&v| polar_angle(mesh.vertices[v])).collect();
    let c_full = interface_projection(&thetas, n_modes);
    let ratios = dtn_ratios(n_modes as u32, s, radius)?;
    let d: Vec<Complex64> = ratios.iter().map(|r| sv * r * (radius * PI / 2.0)).collect();
    // columns restricted to free interface vertices
    let cols: Vec<(usize, usize)> = iface
        .iter()
        .enumerate()
        .filter(|(_, &v)| reduced[v] != usize::MAX)
        .map(|(k, &v)| (k, reduced[v]))
        .collect();
    let apply_c = |x: &[Complex64]| -> Vec<Complex64> {
        c_full.iter().map(|row| cols.iter().map(|&(k, r)| x[r] * row[k]).sum()).collect()
    };
    let apply_ct = |y: &[Complex64], out: &mut [Complex64]| {
        for (row, &yn) in c_full.iter().zip(y) {
            for &(k, r) in &cols {
                out[r] += yn * row[k];
            }
        }
    };

    let lu = LuSolver::new(&sys.matrix)?;
    let n = sys.matrix.nrows();
    // S^{-1} C^T, one column per mode
    let mut z = Vec::with_capacity(n_modes);
    for mode in 0..n_modes {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        let mut unit = vec![Complex64::new(0.0, 0.0); n_modes];
        unit[mode] = Complex64::new(1.0, 0.0);
        apply_ct(&unit, &mut e);
        z.push(lu.solve_unchecked(&e)?);
    }
    let x0 = lu.solve_unchecked(&sys.rhs)?;
    // (I - D C S^{-1} C^T) y = D C S^{-1} b, then x = S^{-1} b + S^{-1} C^T y
    let cap = Mat::<Complex64>::from_fn(n_modes, n_modes, |i, j| {
        let czj = apply_c(&z[j]);
        let delta = if i == j { 1.0 } else { 0.0 };
        Complex64::new(delta, 0.0) - d[i] * czj[i]
    });
    let cx0 = apply_c(&x0);
    let rhs_small = Mat::<Complex64>::from_fn(n_modes, 1, |i, _| d[i] * cx0[i]);
    let y = cap.partial_piv_lu().solve(&rhs_small);
    let mut x = x0;
    for (mode, zj) in z.iter().enumerate() {
        let yj = y[(mode, 0)];
        for (xi, zi) in x.iter_mut().zip(zj) {
            *xi += yj * zi;
        }
    }

    // residual of the full (sparse minus low-rank) system
    let mut ax = sys.matrix.matvec(&x)?;
    let cx = apply_c(&x);
    let dcx: Vec<Complex64> = cx.iter().zip(&d).map(|(a, b)| a * b).collect();
    let mut corr = vec![Complex64::new(0.0, 0.0); n];
    apply_ct(&dcx, &mut corr);
    for (a, c) in ax.iter_mut().zip(&corr) {
        *a -= c;
    }
    let res: Vec<Complex64> = ax.iter().zip(&sys.rhs).map(|(a, b)| a - b).collect();
    let bnorm = norm2(&sys.rhs);
    let residual = if bnorm == 0.0 { norm2(&res) } else { norm2(&res) / bnorm };
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::Singular(format!("DtN system residual {residual:e}")));
    }
    let field = sys.expand(&x);
    let trace_vals: Vec<Complex64> = iface.iter().map(|&v| field[v]).collect();
    let trace = ModalTrace {
        coeffs: c_full
            .iter()
            .map(|row| row.iter().zip(&trace_vals).map(|(c, v)| v * c).sum())
            .collect(),
        radius,
        s,
    };
    Ok(DtnSolution { field, trace, residual })
}

/// Laplace-domain PML solve on the full mesh.
pub fn solve_pml_frequency(
    mesh: &Mesh,
    profile: &PmlProfile,
    s: ComplexFrequency,
    f_l: &[Complex64],
) -> Result<Vec<Complex64>> {
    assemble_frequency_system(mesh, profile, s, f_l)?.solve()
}

/// `K_n(s r beta(r)) / K_n(s R)`, the modal factor of the PML extension.
pub fn pml_extension_mode(n: u32, s: ComplexFrequency, profile: &PmlProfile, r: f64) -> Result<Complex64> {
    let big_r = profile.inner_radius;
    if !(r >= big_r) || r > profile.outer_radius * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("radius {r} outside [{big_r}, {}]", profile.outer_radius)));
    }
    if r == big_r {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let sv = s.value();
    let stretched = sv * r + profile.sigma_hat(r) * r;
    let num = bessel_k_scaled(n, stretched)?;
    let den = bessel_k_scaled(n, sv * big_r)?;
    Ok((num / den).to_complex())
}

/// Relative `L^2` distance of `a` from `reference` in the mass-matrix norm.
pub fn relative_l2(mass: &SparseMatrix<f64>, a: &[Complex64], reference: &[Complex64]) -> f64 {
    let d: Vec<Complex64> = a.iter().zip(reference).map(|(x, y)| x - y).collect();
    mass_norm(mass, &d) / mass_norm(mass, reference)
}
