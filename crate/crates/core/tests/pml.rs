mod common;

use halfplane_pml::fem::{assemble_mass, assemble_stiffness, identity_tensor, QuadPoint, SparseMatrix};
use halfplane_pml::geometry::{build_surface_profile, generate_mesh, Mesh, ProfileSpec, Region};
use halfplane_pml::pml::{
    assemble_frequency_system, assemble_time_blocks, eval_profile, pml_matrices_at, pml_matrices_at_quad,
    PmlProfile, ProfileKind, SigmaHatMode,
};
use halfplane_pml::special::ComplexFrequency;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn mesh(h: f64) -> Mesh {
    let profile = build_surface_profile(&ProfileSpec::rough_surface()).unwrap();
    generate_mesh(&profile, 2.0, 3.0, h).unwrap()
}

#[test]
fn profile_values() {
    let c = PmlProfile::new(2.0, 3.0, 10.0, ProfileKind::Constant, SigmaHatMode::Integral).unwrap();
    let (s, sh) = eval_profile(&c, 3.0).unwrap();
    assert_eq!(s, 10.0);
    assert!((sh - 10.0 / 3.0).abs() < 1e-15);
    assert_eq!(eval_profile(&c, 2.0).unwrap().1, 0.0);
    assert_eq!(eval_profile(&c, 1.0).unwrap(), (0.0, 0.0));
    assert!(eval_profile(&c, 3.1).is_err());

    let p = PmlProfile::new(2.0, 3.0, 7.0, ProfileKind::Power(2.0), SigmaHatMode::Integral).unwrap();
    let (s, sh) = eval_profile(&p, 3.0).unwrap();
    assert_eq!(s, 7.0);
    assert!((sh - 7.0 / 9.0).abs() < 1e-14);
    let (s_r, sh_r) = eval_profile(&p, 2.0).unwrap();
    assert_eq!((s_r, sh_r), (0.0, 0.0));

    let e = PmlProfile::constant(2.0, 3.0, 10.0).unwrap();
    assert_eq!(eval_profile(&e, 2.5).unwrap(), (10.0, 10.0));
    assert!((e.damping_exponent() - 3.0 * 10.0 * (1.0 - 4.0 / 9.0)).abs() < 1e-13);
    assert!(PmlProfile::constant(3.0, 2.0, 1.0).is_err());
    assert!(PmlProfile::constant(2.0, 3.0, -1.0).is_err());
}

#[test]
fn sigma_hat_matches_quadrature() {
    for kind in [ProfileKind::Constant, ProfileKind::Power(1.0), ProfileKind::Power(2.5)] {
        let p = PmlProfile::new(2.0, 3.0, 12.0, kind, SigmaHatMode::Integral).unwrap();
        for r in [2.0f64, 2.1, 2.5, 2.999, 3.0] {
            let integral = common::integrate(|t| Complex64::new(p.sigma(t), 0.0), 2.0, r.max(2.0), 1e-13).re;
            let expected = integral / r;
            assert!((p.sigma_hat(r) - expected).abs() <= 1e-10 * (1.0 + expected), "{kind:?} r={r}");
        }
    }
}

#[test]
fn tensors_on_axes() {
    let p = PmlProfile::new(2.0, 3.0, 10.0, ProfileKind::Constant, SigmaHatMode::Integral).unwrap();
    let (s, sh) = (p.sigma(2.5), p.sigma_hat(2.5));
    let m = pml_matrices_at(&p, [2.5, 0.0], None);
    assert_eq!(m.lambda1, [[s, 0.0], [0.0, sh]]);
    assert_eq!(m.lambda2, [[sh, 0.0], [0.0, s]]);
    let m = pml_matrices_at(&p, [0.0, 2.5], None);
    assert_eq!(m.lambda1, [[sh, 0.0], [0.0, s]]);
    let e = PmlProfile::constant(2.0, 3.0, 10.0).unwrap();
    let m = pml_matrices_at(&e, [1.9, 1.7], None);
    for a in 0..2 {
        for b in 0..2 {
            let id = if a == b { 10.0 } else { 0.0 };
            assert!((m.lambda1[a][b] - id).abs() < 1e-14 && (m.lambda2[a][b] - id).abs() < 1e-14);
        }
    }
    // free-space values inside the interface, including the origin
    let s = ComplexFrequency::new(1.0, 2.0).unwrap();
    for x in [[0.0, 0.0], [1.0, 1.0], [0.0, 2.0]] {
        let m = pml_matrices_at(&p, x, Some(s));
        assert_eq!(m.alpha, Complex64::new(1.0, 0.0));
        assert_eq!(m.beta, Complex64::new(1.0, 0.0));
        assert_eq!(m.a[0][0], Complex64::new(1.0, 0.0));
        assert_eq!(m.a[0][1], Complex64::new(0.0, 0.0));
        assert_eq!(m.lambda1, [[0.0; 2]; 2]);
    }
    let m = pml_matrices_at(&p, [2.5, 0.0], Some(s));
    assert!((m.alpha - (1.0 + 10.0 / s.value())).norm() < 1e-15);
    assert!((m.a[0][0] - m.beta / m.alpha).norm() < 1e-15);
    assert!((m.a[1][1] - m.alpha / m.beta).norm() < 1e-15);
}

#[test]
fn interface_transparency_at_quadrature_points() {
    let mesh = mesh(0.2);
    let p = PmlProfile::constant(2.0, 3.0, 25.0).unwrap();
    let s = ComplexFrequency::new(1.0, 2.0).unwrap();
    for t in 0..mesh.num_triangles() {
        if mesh.regions[t] != Region::Physical {
            continue;
        }
        let c = mesh.centroid(t);
        let q = QuadPoint { x: c, triangle: t, region: Region::Physical };
        let m = pml_matrices_at_quad(&p, &q, Some(s));
        assert_eq!(m.sigma, 0.0);
        assert_eq!(m.sigma_hat, 0.0);
        assert_eq!(m.alpha, Complex64::new(1.0, 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]
    #[test]
    fn lambda_tensors_psd(r in 0.0f64..3.0, theta in 0.0f64..std::f64::consts::PI, sigma in 0.0f64..50.0, power in prop::bool::ANY) {
        let kind = if power { ProfileKind::Power(2.0) } else { ProfileKind::Constant };
        let p = PmlProfile::new(2.0, 3.0, sigma, kind, SigmaHatMode::Integral).unwrap();
        let m = pml_matrices_at(&p, [r * theta.cos(), r * theta.sin()], None);
        for l in [m.lambda1, m.lambda2] {
            prop_assert!((l[0][1] - l[1][0]).abs() < 1e-14);
            let tr = l[0][0] + l[1][1];
            let det = l[0][0] * l[1][1] - l[0][1] * l[1][0];
            let disc = ((l[0][0] - l[1][1]).powi(2) + 4.0 * l[0][1] * l[0][1]).sqrt();
            let lmin = 0.5 * (tr - disc);
            prop_assert!(lmin >= -1e-14 * (1.0 + tr), "lmin {lmin} det {det}");
        }
    }
}

#[test]
fn time_blocks_structure() {
    let mesh = mesh(0.2);
    let zero = PmlProfile::constant(2.0, 3.0, 0.0).unwrap();
    let b = assemble_time_blocks(&mesh, &zero).unwrap();
    for m in [&b.m_sigma, &b.m_sigma_sum, &b.m_coupling, &b.m_lambda1[0][0], &b.m_lambda2[1][0]] {
        assert_eq!(m.max_abs(), 0.0);
    }
    let eq = PmlProfile::constant(2.0, 3.0, 10.0).unwrap();
    let b = assemble_time_blocks(&mesh, &eq).unwrap();
    for a in 0..2 {
        for c in 0..2 {
            for (i, j, v) in b.m_lambda1[a][c].triplets() {
                assert!((v - b.m_lambda2[a][c].get(i, j)).abs() < 1e-14);
            }
        }
    }
    let n = mesh.num_vertices();
    assert_eq!((b.bx.nrows(), b.bx.ncols(), b.mass.nrows()), (n, n, n));
    // the absorption blocks vanish on rows of vertices that only touch physical triangles
    let mut touches_pml = vec![false; n];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if mesh.regions[t] == Region::Pml {
            for &v in tri {
                touches_pml[v] = true;
            }
        }
    }
    for (i, _, v) in b.m_sigma.triplets() {
        if !touches_pml[i] {
            assert_eq!(v, 0.0);
        }
    }
    let wrong = PmlProfile::constant(2.0, 3.4, 10.0).unwrap();
    assert!(assemble_time_blocks(&mesh, &wrong).is_err());
}

#[test]
fn frequency_system_without_absorption_is_helmholtz() {
    let mesh = mesh(0.25);
    let p = PmlProfile::constant(2.0, 3.0, 0.0).unwrap();
    let s = ComplexFrequency::new(1.0, 2.0).unwrap();
    let f = vec![Complex64::new(1.0, 0.0); mesh.num_vertices()];
    let sys = assemble_frequency_system(&mesh, &p, s, &f).unwrap();
    let k = assemble_stiffness(&mesh, identity_tensor::<f64>).to_complex();
    let m = assemble_mass(&mesh, |_| s.value() * s.value());
    let expected: SparseMatrix<Complex64> = k.add(&m).unwrap();
    for (i, j, v) in expected.triplets() {
        assert!((v - sys.matrix.get(i, j)).norm() < 1e-13);
    }
}

struct Norms {
    a_grad: f64,
    s_ab_u: f64,
    grad: f64,
    su: f64,
}

/// Independent element-by-element evaluation of the norms in the coercivity bounds.
fn norms(mesh: &Mesh, p: &PmlProfile, s: ComplexFrequency, v: &[Complex64]) -> Norms {
    let mut out = Norms { a_grad: 0.0, s_ab_u: 0.0, grad: 0.0, su: 0.0 };
    for t in 0..mesh.num_triangles() {
        let tri = mesh.triangles[t];
        let [a, b, c] = mesh.triangle_points(t);
        let area = mesh.triangle_area(t);
        // gradient of the linear interpolant
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let (du1, du2) = (v[tri[1]] - v[tri[0]], v[tri[2]] - v[tri[0]]);
        let g = [
            (du1 * (c[1] - a[1]) - du2 * (b[1] - a[1])) / det,
            (du2 * (b[0] - a[0]) - du1 * (c[0] - a[0])) / det,
        ];
        let mids = [
            ([(b[0] + c[0]) / 2.0, (b[1] + c[1]) / 2.0], (v[tri[1]] + v[tri[2]]) / 2.0),
            ([(c[0] + a[0]) / 2.0, (c[1] + a[1]) / 2.0], (v[tri[2]] + v[tri[0]]) / 2.0),
            ([(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0], (v[tri[0]] + v[tri[1]]) / 2.0),
        ];
        for (x, val) in mids {
            let q = QuadPoint { x, triangle: t, region: mesh.regions[t] };
            let m = pml_matrices_at_quad(p, &q, Some(s));
            let ag = [m.a[0][0] * g[0] + m.a[0][1] * g[1], m.a[1][0] * g[0] + m.a[1][1] * g[1]];
            let w = area / 3.0;
            out.a_grad += w * (ag[0].norm_sqr() + ag[1].norm_sqr());
            out.s_ab_u += w * (s.value() * m.alpha * m.beta * val).norm_sqr();
            out.grad += w * (g[0].norm_sqr() + g[1].norm_sqr());
            out.su += w * (s.value() * val).norm_sqr();
        }
    }
    out
}

#[test]
fn discrete_coercivity() {
    let mesh = mesh(0.15);
    let p = PmlProfile::constant(2.0, 3.0, 10.0).unwrap();
    let s = ComplexFrequency::new(1.0, 2.0).unwrap();
    let n = mesh.num_vertices();
    let sys = assemble_frequency_system(&mesh, &p, s, &vec![Complex64::new(0.0, 0.0); n]).unwrap();
    let mask = mesh.boundary_mask();
    let (s1, s2, sr) = (s.s1(), s.s2(), p.sigma_max());
    let c = s1 / (s1 + sr);
    let cb = c * c * (s1 / s.value().norm()) * (s1 / (s.value() + sr).norm()).powi(2);
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..50 {
        let v: Vec<Complex64> = (0..n)
            .map(|i| if mask[i] { Complex64::new(0.0, 0.0) } else { Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) })
            .collect();
        let a = sys.form(&v, &v);
        let nm = norms(&mesh, &p, s, &v);
        let scale = nm.a_grad + nm.s_ab_u;
        let lhs = a.re + s2 / (s1 + sr) * a.im;
        assert!(lhs >= c * c * scale - 1e-8 * scale, "(a): {lhs} vs {}", c * c * scale);
        let rhs_b = cb * (nm.grad + nm.su);
        assert!(a.norm() >= rhs_b * (1.0 - 1e-8), "(b): {} vs {rhs_b}", a.norm());
    }
    // real s: the Hermitian part is positive
    let sr_real = ComplexFrequency::real(1.5).unwrap();
    let sys = assemble_frequency_system(&mesh, &p, sr_real, &vec![Complex64::new(0.0, 0.0); n]).unwrap();
    for _ in 0..20 {
        let v: Vec<Complex64> = (0..n)
            .map(|i| if mask[i] { Complex64::new(0.0, 0.0) } else { Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) })
            .collect();
        assert!(sys.form(&v, &v).re > 0.0);
    }
}
