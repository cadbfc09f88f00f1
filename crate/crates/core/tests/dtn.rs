mod common;

use halfplane_pml::dtn::{
    dtn_apply, dtn_pairing, floor_split, pml_extension_mode, project_trace, relative_l2, solve_dtn_truncated,
    solve_pml_frequency, ModalTrace,
};
use halfplane_pml::fem::{assemble_mass, assemble_stiffness, identity_tensor, inner, mass_norm};
use halfplane_pml::geometry::{build_surface_profile, generate_mesh, norm, Mesh, ProfileSpec};
use halfplane_pml::pml::{PmlProfile, ProfileKind, SigmaHatMode};
use halfplane_pml::special::{bessel_k, ComplexFrequency};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn grid(m: usize) -> Vec<f64> {
    (0..=m).map(|k| PI * k as f64 / m as f64).collect()
}

fn s12() -> ComplexFrequency {
    ComplexFrequency::new(1.0, 2.0).unwrap()
}

#[test]
fn projection_of_pure_mode() {
    let th = grid(4000);
    let vals: Vec<Complex64> = th.iter().map(|t| c((3.0 * t).sin())).collect();
    let tr = project_trace(&th, &vals, 10, 2.0, s12()).unwrap();
    for (k, w) in tr.coeffs.iter().enumerate() {
        let expected = if k == 2 { 1.0 } else { 0.0 };
        assert!((w - c(expected)).norm() < 1e-8, "mode {}", k + 1);
    }
    let zero = project_trace(&th, &vec![c(0.0); th.len()], 10, 2.0, s12()).unwrap();
    assert!(zero.coeffs.iter().all(|w| w.norm() == 0.0));
}

#[test]
fn projection_of_parabola() {
    let th = grid(20000);
    let vals: Vec<Complex64> = th.iter().map(|t| c(t * (PI - t))).collect();
    let tr = project_trace(&th, &vals, 12, 2.0, s12()).unwrap();
    for (k, w) in tr.coeffs.iter().enumerate() {
        let n = (k + 1) as f64;
        let expected = if (k + 1) % 2 == 1 { 8.0 / (PI * n.powi(3)) } else { 0.0 };
        assert!((w - c(expected)).norm() < 1e-6, "mode {n}: {w}");
    }
}

#[test]
fn projection_guards_aliasing() {
    let th = grid(9);
    let vals = vec![c(1.0); th.len()];
    assert!(project_trace(&th, &vals, 5, 2.0, s12()).is_ok());
    assert!(project_trace(&th, &vals, 6, 2.0, s12()).is_err());
    let mut bad = th.clone();
    bad.swap(2, 3);
    assert!(project_trace(&bad, &vals, 2, 2.0, s12()).is_err());
}

#[test]
fn band_limited_round_trip() {
    let th = grid(256);
    let band = [c(0.5), Complex64::new(0.0, -1.0), c(0.25), c(0.0), Complex64::new(0.1, 0.2)];
    let vals: Vec<Complex64> = th
        .iter()
        .map(|&t| band.iter().enumerate().map(|(k, b)| b * ((k + 1) as f64 * t).sin()).sum())
        .collect();
    let tr = project_trace(&th, &vals, 2 * band.len(), 2.0, s12()).unwrap();
    for (t, v) in th.iter().zip(&vals) {
        assert!((tr.evaluate(*t) - v).norm() < 1e-8);
    }
}

#[test]
fn dtn_first_mode_value() {
    // K_0(2), K_1(2) reference values; K_1' = -K_0 - K_1/z
    let (k0, k1) = (0.113_893_872_749_533_44, 0.139_865_881_816_522_43);
    let expected = -(k0 + k1 / 2.0) / k1;
    let s = ComplexFrequency::real(1.0).unwrap();
    let tr = ModalTrace { coeffs: vec![c(1.0)], radius: 2.0, s };
    let g = dtn_apply(&tr).unwrap();
    assert!((g.coeffs[0] - c(expected)).norm() < 1e-12, "{}", g.coeffs[0]);
    let zero = ModalTrace { coeffs: vec![c(0.0); 8], radius: 2.0, s: s12() };
    assert!(dtn_apply(&zero).unwrap().coeffs.iter().all(|w| w.norm() == 0.0));
}

#[test]
fn dtn_sign_on_random_traces() {
    let mut rng = StdRng::seed_from_u64(7);
    for s1 in [0.1, 1.0, 10.0] {
        for s2 in [-50.0, -5.0, 0.0, 20.0] {
            let s = ComplexFrequency::new(s1, s2).unwrap();
            for _ in 0..25 {
                let coeffs: Vec<Complex64> =
                    (0..32).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
                let scale: f64 = coeffs.iter().map(|w| w.norm_sqr()).sum();
                let tr = ModalTrace { coeffs, radius: 2.0, s };
                assert!(dtn_pairing(&tr).unwrap().re <= 1e-12 * scale);
            }
        }
    }
}

fn physical_mesh(h: f64) -> Mesh {
    let flat = build_surface_profile(&ProfileSpec::Flat).unwrap();
    generate_mesh(&flat, 2.0, 3.0, h).unwrap().physical_submesh().unwrap().0
}

#[test]
fn zero_source_gives_zero_field() {
    let m = physical_mesh(0.25);
    let sol = solve_dtn_truncated(&m, s12(), &vec![c(0.0); m.num_vertices()], 8).unwrap();
    assert!(sol.field.iter().all(|v| v.norm() == 0.0));
}

/// Quintic blend from 0 at `A` to 1 at `B`, with first and second derivatives.
const A: f64 = 0.5;
const B: f64 = 1.2;
fn blend(r: f64) -> (f64, f64, f64) {
    if r <= A {
        return (0.0, 0.0, 0.0);
    }
    if r >= B {
        return (1.0, 0.0, 0.0);
    }
    let l = B - A;
    let t = (r - A) / l;
    (
        t * t * t * (10.0 - 15.0 * t + 6.0 * t * t),
        30.0 * t * t * (1.0 - t) * (1.0 - t) / l,
        60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (l * l),
    )
}

/// Outgoing second mode, cut off smoothly near the origin. Returns the nodal
/// field and the source that produces it.
fn manufactured(m: &Mesh, s: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
    let k2_r = bessel_k(2, s * 2.0).unwrap();
    let mut u = Vec::new();
    let mut f = Vec::new();
    for &p in &m.vertices {
        let r = norm(p);
        let ang = (2.0 * p[1].atan2(p[0])).sin();
        let (w, w1, w2) = blend(r);
        if w == 0.0 && w1 == 0.0 {
            u.push(c(0.0));
            f.push(c(0.0));
            continue;
        }
        let z = s * r;
        let k2 = bessel_k(2, z).unwrap() / k2_r;
        let k2p = -(bessel_k(1, z).unwrap() / k2_r) - k2 * (2.0 / z);
        let kr = s * k2p;
        u.push(k2 * w * ang);
        f.push(-(k2 * w2 + kr * (2.0 * w1) + k2 * (w1 / r)) * ang / s);
    }
    (u, f)
}

#[test]
fn manufactured_outgoing_mode() {
    let s = s12();
    let mut errs = Vec::new();
    for h in [0.2, 0.1] {
        let m = physical_mesh(h);
        let (u, f) = manufactured(&m, s.value());
        let modes = (m.interface_vertices.len() / 2).min(32);
        let sol = solve_dtn_truncated(&m, s, &f, modes).unwrap();
        assert!(sol.residual <= 1e-9);
        let mass = assemble_mass(&m, |_| 1.0);
        errs.push(relative_l2(&mass, &sol.field, &u));
        // trace should carry mode 2 only, with unit amplitude
        if h < 0.15 {
            assert!((sol.trace.coeffs[1] - c(1.0)).norm() < 1e-2, "{}", sol.trace.coeffs[1]);
        }
        let others: f64 = sol.trace.coeffs.iter().enumerate().filter(|(k, _)| *k != 1).map(|(_, w)| w.norm()).sum();
        assert!(others < 2e-2, "{others}");
    }
    assert!(errs[1] < 2e-2, "{errs:?}");
    assert!(errs[0] / errs[1] > 3.0, "{errs:?}");
}

#[test]
fn extension_mode_properties() {
    let p = PmlProfile::new(2.0, 3.0, 10.0, ProfileKind::Constant, SigmaHatMode::Integral).unwrap();
    let s = s12();
    for n in [1u32, 2, 5, 20] {
        assert_eq!(pml_extension_mode(n, s, &p, 2.0).unwrap(), c(1.0));
        let at_rho = pml_extension_mode(n, s, &p, 3.0).unwrap().norm();
        let envelope = (-(3.0 * p.sigma_hat(3.0)) * (1.0 - 4.0 / 9.0)).exp();
        assert!(at_rho <= envelope * (1.0 + 1e-8), "n={n}: {at_rho} > {envelope}");
    }
    assert!(pml_extension_mode(1, s, &p, 1.5).is_err());
    assert!(pml_extension_mode(1, s, &p, 3.5).is_err());
    let real = ComplexFrequency::real(1.0).unwrap();
    let mut last = f64::INFINITY;
    for k in 0..=20 {
        let r = 2.0 + k as f64 * 0.05;
        let v = pml_extension_mode(3, real, &p, r).unwrap().norm();
        assert!(v <= last);
        last = v;
    }
}

fn gaussian(m: &Mesh) -> Vec<Complex64> {
    m.vertices
        .iter()
        .map(|p| c((-(p[0] * p[0] + (p[1] - 0.5).powi(2)) / 0.01).exp()))
        .collect()
}

#[test]
fn pml_matches_dtn_and_improves_with_sigma() {
    let rough = build_surface_profile(&ProfileSpec::rough_surface()).unwrap();
    let mesh = generate_mesh(&rough, 2.0, 3.0, 0.05).unwrap();
    let (sub, map) = mesh.physical_submesh().unwrap();
    let s = s12();
    let reference = solve_dtn_truncated(&sub, s, &gaussian(&sub), 32).unwrap().field;
    let mass = assemble_mass(&sub, |_| 1.0);
    let err = |sigma: f64, kind: ProfileKind| {
        let p = PmlProfile::new(2.0, 3.0, sigma, kind, SigmaHatMode::Integral).unwrap();
        let u = solve_pml_frequency(&mesh, &p, s, &gaussian(&mesh)).unwrap();
        let restricted: Vec<Complex64> = map.iter().map(|&k| u[k]).collect();
        (relative_l2(&mass, &restricted, &reference), p.damping_exponent())
    };
    let (e0, _) = err(0.0, ProfileKind::Constant);
    let (e10, _) = err(10.0, ProfileKind::Constant);
    assert!(e10 < 1e-2, "{e10}");
    assert!(e0 > 3.0 * e10, "control {e0} vs {e10}");

    // On a graded profile and below the discretization floor, doubling sigma
    // must shrink the error at least as fast as the exponential bound says.
    let (g2, x2) = err(2.0, ProfileKind::Power(2.0));
    let (g4, x4) = err(4.0, ProfileKind::Power(2.0));
    let bound = (-(x4 - x2)).exp();
    let observed = g4 / g2;
    assert!(observed < bound, "observed {observed}, bound {bound}");
}

#[test]
fn floor_detection() {
    assert_eq!(floor_split(&[1.0, 0.5, 0.1, 0.05]), (4, true));
    assert_eq!(floor_split(&[1.0, 0.5, 0.1, 0.15]), (3, true));
    assert_eq!(floor_split(&[1.0, 0.5, 0.1, 0.5]), (3, false));
    assert_eq!(floor_split(&[]), (0, true));
}

#[test]
fn stability_constant_is_mesh_independent() {
    let mut consts = Vec::new();
    for h in [0.2, 0.1] {
        let m = physical_mesh(h);
        let mass = assemble_mass(&m, |_| 1.0);
        let stiff = assemble_stiffness(&m, identity_tensor::<f64>);
        let f = gaussian(&m);
        let mut worst: f64 = 0.0;
        for s1 in [0.5, 1.0, 2.0] {
            for s2 in [0.0, 2.0, 5.0] {
                let s = ComplexFrequency::new(s1, s2).unwrap();
                let modes = (m.interface_vertices.len() / 2).min(32);
                let u = solve_dtn_truncated(&m, s, &f, modes).unwrap().field;
                let grad = inner(&stiff, &u, &u).re.sqrt();
                let sv = s.value().norm();
                let lhs = grad + sv * mass_norm(&mass, &u);
                let rhs = (1.0 + sv) * sv / s1 * mass_norm(&mass, &f);
                worst = worst.max(lhs / rhs);
            }
        }
        consts.push(worst);
    }
    assert!(consts[1] < 1.5 * consts[0] && consts[0] < 1.5 * consts[1], "{consts:?}");
}
