//! Independent oracles shared by the integration tests. Nothing here calls into
//! the library's numerical kernels.
#![allow(dead_code)]

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Adaptive Gauss-Kronrod (7/15) quadrature of a complex integrand.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, rel_tol: f64) -> Complex64 {
    let n0 = 64;
    let mut stack: Vec<(f64, f64, Complex64, f64)> = Vec::new();
    let step = (b - a) / n0 as f64;
    for i in 0..n0 {
        let (lo, hi) = (a + i as f64 * step, a + (i + 1) as f64 * step);
        let (v, e) = gk15(&f, lo, hi);
        stack.push((lo, hi, v, e));
    }
    let mut done = Complex64::new(0.0, 0.0);
    let mut scale: f64 = stack.iter().map(|s| s.2.norm()).fold(0.0, f64::max);
    let mut guard = 0;
    while let Some((lo, hi, v, e)) = stack.pop() {
        guard += 1;
        let total_est = (done + stack.iter().map(|s| s.2).sum::<Complex64>() + v).norm();
        scale = scale.max(total_est);
        if e <= rel_tol * total_est.max(1e-300) * 1e-2 || hi - lo < 1e-12 || guard > 200_000 {
            done += v;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        stack.push((lo, mid, v1, e1));
        stack.push((mid, hi, v2, e2));
    }
    done
}

/// `K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt`, integrated along the
/// path `t(u) = u - i arg(z) tanh(u)` so that `z cosh t` becomes real and
/// positive for large `u` and the integrand stops oscillating.
pub fn bessel_k_quadrature(nu: u32, z: Complex64) -> Complex64 {
    assert!(z.re > 0.0);
    let phi = z.arg();
    let nu = nu as f64;
    let r = z.norm();
    // pick U with |z| e^U / 4 > 760 + nu U
    let mut upper = 1.0f64;
    while r * upper.exp() * 0.25 * (0.5 * phi).cos().max(0.1) < 760.0 + nu * upper {
        upper += 0.25;
    }
    let i = Complex64::new(0.0, 1.0);
    let f = |u: f64| {
        let th = u.tanh();
        let t = Complex64::new(u, -phi * th);
        let dt = Complex64::new(1.0, -phi * (1.0 - th * th));
        (-z * t.cosh()).exp() * (t * nu).cosh() * dt
    };
    let _ = i;
    integrate(f, 0.0, upper, 1e-14)
}

/// Plain composite trapezoid on a uniform grid.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1]))
}

/// Structured unit-square mesh with `n x n` cells, each split along the
/// diagonal; all hull edges are tagged as surface.
pub fn unit_square_mesh(n: usize) -> halfplane_pml::geometry::Mesh {
    use halfplane_pml::geometry::{BoundaryEdge, BoundaryTag, Mesh, Region};
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 / n as f64, j as f64 / n as f64]);
        }
    }
    let mut triangles = Vec::new();
    for j in 0..n {
        for i in 0..n {
            triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    let mut edges = Vec::new();
    for k in 0..n {
        for (a, b) in [
            (idx(k, 0), idx(k + 1, 0)),
            (idx(n, k), idx(n, k + 1)),
            (idx(k + 1, n), idx(k, n)),
            (idx(0, k + 1), idx(0, k)),
        ] {
            edges.push(BoundaryEdge { vertices: [a, b], tag: BoundaryTag::Surface });
        }
    }
    let regions = vec![Region::Physical; triangles.len()];
    Mesh::from_parts(vertices, triangles, edges, regions, Vec::new(), 2.0, 2.0)
}
