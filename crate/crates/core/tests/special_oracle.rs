mod common;

use common::bessel_k_quadrature;
use halfplane_pml::special::{bessel_k, bessel_k_scaled, dtn_ratio, dtn_ratios, ComplexFrequency};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn quadrature_oracle_reproduces_reference_values() {
    let k0 = bessel_k_quadrature(0, Complex64::new(1.0, 0.0));
    let k1 = bessel_k_quadrature(1, Complex64::new(1.0, 0.0));
    assert!((k0.re - 0.421_024_438_240_708_34).abs() < 1e-14, "{k0}");
    assert!((k1.re - 0.601_907_230_197_234_6).abs() < 1e-14, "{k1}");
}

#[test]
fn implementation_matches_quadrature_on_fixed_points() {
    let pts = [
        (0, Complex64::new(0.05, 0.0)),
        (0, Complex64::new(0.01, 3.0)),
        (1, Complex64::new(3.0, -7.0)),
        (5, Complex64::new(2.0, 3.0)),
        (12, Complex64::new(0.2, 99.0)),
        (20, Complex64::new(60.0, 70.0)),
        (40, Complex64::new(1.0, -1.0)),
    ];
    for (nu, z) in pts {
        let expect = bessel_k_quadrature(nu, z);
        let got = bessel_k(nu, z).unwrap();
        let rel = (got - expect).norm() / expect.norm();
        assert!(rel < 1e-10, "nu={nu} z={z}: {got} vs {expect} (rel {rel:e})");
    }
}

#[test]
fn ratio_of_large_arguments_follows_asymptotics() {
    let a = bessel_k_scaled(0, Complex64::new(100.0, 0.0)).unwrap();
    let b = bessel_k_scaled(0, Complex64::new(50.0, 0.0)).unwrap();
    let ratio = (a / b).to_complex().re;
    // leading order sqrt(pi/2z) e^{-z} times the first Hankel correction (1 - 1/(8z))
    let lead = (-50.0f64).exp() * (50.0f64 / 100.0).sqrt();
    let expect = lead * (1.0 - 1.0 / 800.0) / (1.0 - 1.0 / 400.0);
    assert!((ratio / expect - 1.0).abs() < 1e-3);
    assert!((ratio / lead - 1.0).abs() < 2e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recurrence_identity(n in 1u32..40, r in 1.0f64..100.0, th in -1.5f64..1.5) {
        let z = Complex64::from_polar(r, th);
        let km = bessel_k_scaled(n - 1, z).unwrap();
        let k = bessel_k_scaled(n, z).unwrap();
        let kp = bessel_k_scaled(n + 1, z).unwrap();
        // divide through by K_{n+1} to stay in range
        let a = (km / kp).to_complex();
        let b = (k / kp).to_complex();
        let res = Complex64::new(1.0, 0.0) - a - b * (2.0 * n as f64) / z;
        prop_assert!(res.norm() < 1e-9, "residual {}", res.norm());
    }

    #[test]
    fn dtn_ratio_sign_and_bound(n in 1u32..40, s1 in 0.05f64..10.0, s2 in -60.0f64..60.0) {
        let s = ComplexFrequency::new(s1, s2).unwrap();
        let r = dtn_ratio(n, s, 2.0).unwrap();
        prop_assert!(-r.re >= -1e-12);
        prop_assert!(r.norm() <= n as f64 / (s.value().norm() * 2.0) + 1.0 + 1e-10);
        let all = dtn_ratios(n, s, 2.0).unwrap();
        prop_assert!((all[n as usize - 1] - r).norm() <= 1e-14 * r.norm().max(1.0));
    }
}
