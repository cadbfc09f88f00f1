mod common;

use common::unit_square_mesh;
use halfplane_pml::fem::{
    apply_dirichlet, assemble_gradient_coupling, assemble_load, assemble_mass, assemble_stiffness,
    identity_tensor, solve, DofMap, Field, SparseMatrix,
};
use halfplane_pml::geometry::{build_surface_profile, generate_mesh, Mesh, ProfileSpec};
use num_complex::Complex64;
use proptest::prelude::*;

fn ones(mesh: &Mesh) -> Vec<f64> {
    vec![1.0; mesh.num_vertices()]
}

#[test]
fn mass_total_is_area() {
    let profile = build_surface_profile(&ProfileSpec::rough_surface()).unwrap();
    let mesh = generate_mesh(&profile, 2.0, 3.0, 0.1).unwrap();
    let m = assemble_mass(&mesh, |_| 1.0);
    let total: f64 = m.values().iter().sum();
    let area = mesh.stats().area;
    assert!((total - area).abs() <= 1e-10 * area);
    assert!(m.is_symmetric(0.0));
    let z = assemble_mass(&mesh, |_| 0.0);
    assert!(z.values().iter().all(|&v| v == 0.0));
}

#[test]
fn reference_patch_matrices() {
    let mesh = unit_square_mesh(1);
    let m = assemble_mass(&mesh, |_| 1.0);
    // two triangles of area 1/2 sharing the diagonal 0-3
    let a = 0.5 / 12.0;
    let expected = [
        [4.0 * a, a, 2.0 * a, a],
        [a, 2.0 * a, a, 0.0],
        [2.0 * a, a, 4.0 * a, a],
        [a, 0.0, a, 2.0 * a],
    ];
    // vertex order: 0=(0,0) 1=(1,0) 2=(0,1) 3=(1,1); remap to (0,1,3,2) above
    let order = [0, 1, 3, 2];
    for r in 0..4 {
        for c in 0..4 {
            assert!((m.get(order[r], order[c]) - expected[r][c]).abs() < 1e-15);
        }
    }
    // cotangent formula: right angles give 1/2 weights on legs, the diagonal has weight 0
    let k = assemble_stiffness(&mesh, identity_tensor::<f64>);
    let expected_k = [
        [1.0, -0.5, 0.0, -0.5],
        [-0.5, 1.0, -0.5, 0.0],
        [0.0, -0.5, 1.0, -0.5],
        [-0.5, 0.0, -0.5, 1.0],
    ];
    for r in 0..4 {
        for c in 0..4 {
            assert!((k.get(order[r], order[c]) - expected_k[r][c]).abs() < 1e-15);
        }
    }
    let k2 = assemble_stiffness(&mesh, |_| [[2.0, 0.0], [0.0, 2.0]]);
    assert_eq!(k2, k.scale(2.0));
}

#[test]
fn stiffness_kernel_and_patch_test() {
    let mesh = unit_square_mesh(8);
    let k = assemble_stiffness(&mesh, identity_tensor::<f64>);
    assert!(k.matvec(&ones(&mesh)).unwrap().iter().all(|v| v.abs() < 1e-12));
    let affine: Vec<f64> = mesh.vertices.iter().map(|p| 3.0 * p[0] - 2.0 * p[1] + 1.0).collect();
    let r = k.matvec(&affine).unwrap();
    let boundary = mesh.boundary_mask();
    for (v, &res) in r.iter().enumerate() {
        if !boundary[v] {
            assert!(res.abs() < 1e-10, "vertex {v}: {res}");
        }
    }
    assert!(k.is_symmetric(1e-15));
}

#[test]
fn gradient_coupling_identities() {
    let mesh = unit_square_mesh(6);
    let (bx, by) = assemble_gradient_coupling(&mesh);
    let m = assemble_mass(&mesh, |_| 1.0);
    let row_sums = m.matvec(&ones(&mesh)).unwrap();
    // (grad u, q) with u = x reproduces \int q
    let x: Vec<f64> = mesh.vertices.iter().map(|p| p[0]).collect();
    let y: Vec<f64> = mesh.vertices.iter().map(|p| p[1]).collect();
    let gx = bx.transpose().matvec(&x).unwrap();
    let gy = by.transpose().matvec(&y).unwrap();
    for i in 0..mesh.num_vertices() {
        assert!((gx[i] - row_sums[i]).abs() < 1e-10);
        assert!((gy[i] - row_sums[i]).abs() < 1e-10);
    }
    assert!(bx.transpose().matvec(&ones(&mesh)).unwrap().iter().all(|v| v.abs() < 1e-14));
    // integration by parts against fields vanishing on the boundary
    let boundary = mesh.boundary_mask();
    let v: Vec<f64> = mesh
        .vertices
        .iter()
        .enumerate()
        .map(|(i, p)| if boundary[i] { 0.0 } else { (p[0] * 7.0).sin() + p[1] })
        .collect();
    let p: Vec<f64> = mesh.vertices.iter().map(|p| p[0] * p[0] - p[1]).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let lhs = dot(&v, &bx.matvec(&p).unwrap()) + dot(&p, &bx.matvec(&v).unwrap());
    assert!(lhs.abs() < 1e-12, "{lhs}");
}

fn poisson_center_series() -> f64 {
    let pi4 = std::f64::consts::PI.powi(4);
    let mut sum = 0.0;
    for k in 0..400 {
        for l in 0..400 {
            let (a, b) = ((2 * k + 1) as f64, (2 * l + 1) as f64);
            let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * 16.0 / (pi4 * a * b * (a * a + b * b));
        }
    }
    sum
}

#[test]
fn poisson_center_value() {
    let exact = poisson_center_series();
    assert!((exact - 0.07367).abs() < 1e-5, "series {exact}");
    let mesh = unit_square_mesh(32);
    let k = assemble_stiffness(&mesh, identity_tensor::<f64>);
    let f = assemble_load(&mesh, |_| 1.0);
    let sys = apply_dirichlet(&k, &f, &mesh.boundary_mask()).unwrap();
    let u = sys.expand(&solve(&sys.matrix, &sys.rhs).unwrap());
    let center = mesh.vertices.iter().position(|p| p == &[0.5, 0.5]).unwrap();
    let rel = (u[center] - exact).abs() / exact;
    println!("poisson center {} vs {exact}, rel {rel:e}", u[center]);
    assert!(rel < 0.02);
}

#[test]
fn dirichlet_edge_cases() {
    let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (1, 1, 3.0), (0, 1, 1.0)]).unwrap();
    let all = apply_dirichlet(&a, &[1.0, 1.0], &[true, true]).unwrap();
    assert_eq!(all.matrix.nrows(), 0);
    assert_eq!(all.expand(&[]), vec![0.0, 0.0]);
    let none = apply_dirichlet(&a, &[1.0, 1.0], &[false, false]).unwrap();
    assert_eq!(none.matrix, a);
    assert!(apply_dirichlet(&a, &[1.0, 1.0], &[false]).is_err());
}

#[test]
fn dof_map_counts() {
    let profile = build_surface_profile(&ProfileSpec::rough_surface()).unwrap();
    let mesh = generate_mesh(&profile, 2.0, 3.0, 0.2).unwrap();
    let dofs = DofMap::new(&mesh);
    let n = mesh.num_vertices();
    let constrained = dofs.dirichlet_mask.iter().filter(|&&b| b).count();
    assert_eq!(dofs.total(), 6 * n - constrained);
    let mut seen = vec![false; dofs.total()];
    for f in Field::ALL {
        for v in 0..n {
            if let Some(k) = dofs.index(f, v) {
                assert!(!seen[k]);
                seen[k] = true;
            }
        }
    }
    assert!(seen.iter().all(|&b| b));
    for v in mesh.tagged_vertices(halfplane_pml::geometry::BoundaryTag::Outer) {
        assert!(dofs.index(Field::U, v).is_none());
    }
}

#[test]
fn complex_assembly_matches_real() {
    let mesh = unit_square_mesh(5);
    let w = |q: &halfplane_pml::fem::QuadPoint| 1.0 + q.x[0] * q.x[1];
    let real = assemble_mass(&mesh, w);
    let cplx = assemble_mass(&mesh, |q| Complex64::new(w(q), 0.0));
    for (a, b) in real.values().iter().zip(cplx.values()) {
        assert_eq!(*a, b.re);
        assert!(b.im.abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn assembly_is_order_independent(seed in any::<u64>()) {
        let mesh = unit_square_mesh(4);
        let mut order: Vec<usize> = (0..mesh.num_triangles()).collect();
        let mut state = seed | 1;
        for i in (1..order.len()).rev() {
            state ^= state << 13; state ^= state >> 7; state ^= state << 17;
            order.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let permuted = Mesh::from_parts(
            mesh.vertices.clone(),
            order.iter().map(|&t| mesh.triangles[t]).collect(),
            mesh.boundary_edges.clone(),
            order.iter().map(|&t| mesh.regions[t]).collect(),
            Vec::new(), 2.0, 2.0,
        );
        let w = |q: &halfplane_pml::fem::QuadPoint| (q.x[0] * 3.0).exp() + q.x[1];
        let a = assemble_stiffness(&mesh, |q| [[w(q), 0.5], [0.5, 2.0]]);
        let b = assemble_stiffness(&permuted, |q| [[w(q), 0.5], [0.5, 2.0]]);
        for (i, j, v) in a.triplets() {
            prop_assert!((v - b.get(i, j)).abs() <= 1e-14);
        }
        let ma = assemble_mass(&mesh, w);
        let mb = assemble_mass(&permuted, w);
        for (i, j, v) in ma.triplets() {
            prop_assert!((v - mb.get(i, j)).abs() <= 1e-14);
        }
    }
}
