//! Deterministic mesh generator for the truncated half-disk.
//!
//! The physical region `|x| < R` is a constrained Delaunay triangulation of a
//! boundary polyline (perturbed surface plus the interface arc) and a
//! hexagonal lattice of interior points that is mirror-symmetric in `x1`.
//! The PML annulus is a ring-by-ring polar mesh glued to the interface arc.
//! The physical part depends only on the profile, `R` and `h_target`, so runs
//! with different `rho` share it vertex-for-vertex.

use super::mesh::{norm, signed_area, BoundaryEdge, BoundaryTag, Mesh, Point, Region};
use super::profile::SurfaceProfile;
use crate::error::{Error, Result};
use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct MeshOptions {
    /// Optional polygonal obstacle (counter-clockwise) inside the physical region.
    pub obstacle: Option<Vec<Point>>,
    /// Minimum distance, in units of `h_target`, between lattice points and the boundary.
    pub clearance: f64,
}

impl Default for MeshOptions {
    fn default() -> Self {
        MeshOptions {
            obstacle: None,
            clearance: 0.6,
        }
    }
}

pub fn generate_mesh(
    profile: &SurfaceProfile,
    inner_radius: f64,
    outer_radius: f64,
    h_target: f64,
) -> Result<Mesh> {
    generate_mesh_with(profile, inner_radius, outer_radius, h_target, &MeshOptions::default())
}

fn seg_dist(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

fn inside_polygon(poly: &[Point], p: Point) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Points along `x2 = h(x1)`, `x1` from `-R` to `R`, equally spaced in arc length.
fn surface_polyline(profile: &SurfaceProfile, radius: f64, h: f64) -> Vec<Point> {
    if profile.is_flat() {
        let n = ((2.0 * radius / h).ceil() as usize).max(2);
        return (0..=n)
            .map(|k| [-radius + 2.0 * radius * k as f64 / n as f64, 0.0])
            .collect();
    }
    let samples = ((80.0 * radius / h).ceil() as usize).max(4000);
    let xs: Vec<f64> = (0..=samples)
        .map(|i| -radius + 2.0 * radius * i as f64 / samples as f64)
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| profile.height(x)).collect();
    let mut arc = vec![0.0; samples + 1];
    for i in 1..=samples {
        arc[i] = arc[i - 1] + (xs[i] - xs[i - 1]).hypot(ys[i] - ys[i - 1]);
    }
    let total = arc[samples];
    let n = ((total / h).ceil() as usize).max(2);
    let mut out = Vec::with_capacity(n + 1);
    out.push([-radius, 0.0]);
    let mut i = 1;
    for k in 1..n {
        let target = total * k as f64 / n as f64;
        while arc[i] < target {
            i += 1;
        }
        let w = (target - arc[i - 1]) / (arc[i] - arc[i - 1]);
        let x = xs[i - 1] + w * (xs[i] - xs[i - 1]);
        out.push([x, profile.height(x)]);
    }
    out.push([radius, 0.0]);
    out
}

fn resample_polygon(poly: &[Point], h: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let n = (((b[0] - a[0]).hypot(b[1] - a[1]) / h).ceil() as usize).max(1);
        for k in 0..n {
            let t = k as f64 / n as f64;
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

fn ring_angles(n: usize) -> Vec<f64> {
    (0..=n).map(|k| PI * k as f64 / n as f64).collect()
}

fn on_circle(r: f64, theta: f64, k: usize, n: usize) -> Point {
    // exact endpoints on the axis
    if k == 0 {
        [r, 0.0]
    } else if k == n {
        [-r, 0.0]
    } else {
        [r * theta.cos(), r * theta.sin()]
    }
}

pub fn generate_mesh_with(
    profile: &SurfaceProfile,
    inner_radius: f64,
    outer_radius: f64,
    h_target: f64,
    options: &MeshOptions,
) -> Result<Mesh> {
    let (r_in, r_out, h) = (inner_radius, outer_radius, h_target);
    if !(r_in > 0.0 && r_out > r_in) {
        return Err(Error::InvalidInput(format!(
            "need 0 < R < rho, got R = {r_in}, rho = {r_out}"
        )));
    }
    if !(h > 0.0 && h <= 0.5 * (r_out - r_in) && h <= 0.25 * r_in) {
        return Err(Error::InvalidInput(format!(
            "h_target = {h} must be positive and below (rho - R)/2 and R/4"
        )));
    }
    if profile.support_radius() >= r_in {
        return Err(Error::InvalidInput(format!(
            "surface perturbation (support {}) spills past R = {r_in}",
            profile.support_radius()
        )));
    }
    for x in [-r_in + 1e-9, r_in - 1e-9] {
        if profile.height(x).abs() > 0.0 {
            return Err(Error::InvalidInput("profile must vanish near |x1| = R".into()));
        }
    }

    // Boundary loop of the physical region, counter-clockwise.
    let bottom = surface_polyline(profile, r_in, h);
    if bottom.iter().any(|p| norm(*p) > r_in * (1.0 - 1e-12) && p[1] != 0.0) {
        return Err(Error::InvalidInput("surface leaves the interface circle".into()));
    }
    let n_arc = ((PI * r_in / h).ceil() as usize).max(4);
    let arc_angles = ring_angles(n_arc);
    let mut loop_pts: Vec<Point> = bottom.clone();
    for k in 1..n_arc {
        loop_pts.push(on_circle(r_in, arc_angles[k], k, n_arc));
    }
    let n_loop = loop_pts.len();
    let n_bottom = bottom.len();
    let bottom_last = n_bottom - 1;
    let mut interface: Vec<usize> = vec![bottom_last];
    interface.extend(n_bottom..n_loop);
    interface.push(0);

    let obstacle: Option<Vec<Point>> = options.obstacle.as_ref().map(|p| resample_polygon(p, h));
    if let Some(obs) = &obstacle {
        if obs.len() < 3 {
            return Err(Error::InvalidInput("obstacle needs at least 3 vertices".into()));
        }
        for &p in obs {
            let clearance = (0..n_loop)
                .map(|i| seg_dist(p, loop_pts[i], loop_pts[(i + 1) % n_loop]))
                .fold(f64::INFINITY, f64::min);
            if !inside_polygon(&loop_pts, p) || clearance < h {
                return Err(Error::InvalidInput(
                    "obstacle must lie inside the physical region with clearance h".into(),
                ));
            }
        }
        let area: f64 = (0..obs.len())
            .map(|i| {
                let (a, b) = (obs[i], obs[(i + 1) % obs.len()]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum();
        if area <= 0.0 {
            return Err(Error::InvalidInput("obstacle polygon must be counter-clockwise".into()));
        }
    }

    let mut segments: Vec<(Point, Point)> = (0..n_loop)
        .map(|i| (loop_pts[i], loop_pts[(i + 1) % n_loop]))
        .collect();
    if let Some(obs) = &obstacle {
        segments.extend((0..obs.len()).map(|i| (obs[i], obs[(i + 1) % obs.len()])));
    }

    // Interior lattice, symmetric about x1 = 0.
    let dy = 0.5 * 3f64.sqrt() * h;
    let y_lo = bottom.iter().map(|p| p[1]).fold(0.0, f64::min);
    let min_gap = options.clearance * h;
    let mut lattice: Vec<Point> = Vec::new();
    let rows = ((r_in - y_lo) / dy).ceil() as usize;
    let cols = (r_in / h).ceil() as i64 + 1;
    for j in 1..rows {
        let y = y_lo + j as f64 * dy;
        let shift = if j % 2 == 1 { 0.5 } else { 0.0 };
        for i in -cols..=cols {
            let x = (i as f64 + shift) * h;
            let p = [x, y];
            if norm(p) >= r_in || !inside_polygon(&loop_pts, p) {
                continue;
            }
            if let Some(obs) = &obstacle {
                if inside_polygon(obs, p) {
                    continue;
                }
            }
            if segments.iter().any(|&(a, b)| seg_dist(p, a, b) < min_gap) {
                continue;
            }
            lattice.push(p);
        }
    }

    // Constrained Delaunay triangulation of the physical region.
    let mut vertices: Vec<Point> = loop_pts.clone();
    let obstacle_start = vertices.len();
    if let Some(obs) = &obstacle {
        vertices.extend_from_slice(obs);
    }
    let obstacle_end = vertices.len();
    vertices.extend_from_slice(&lattice);

    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let mut spade_to_ours: Vec<usize> = Vec::with_capacity(vertices.len());
    let mut handles = Vec::with_capacity(vertices.len());
    for (i, p) in vertices.iter().enumerate() {
        let handle = cdt
            .insert(Point2::new(p[0], p[1]))
            .map_err(|e| Error::Mesh(format!("triangulation insert failed: {e:?}")))?;
        if handle.index() != spade_to_ours.len() {
            return Err(Error::Mesh(format!("vertex {i} duplicates an earlier vertex")));
        }
        spade_to_ours.push(i);
        handles.push(handle);
    }
    let mut add_loop = |range: std::ops::Range<usize>| -> Result<()> {
        let n = range.len();
        for k in 0..n {
            let (a, b) = (range.start + k, range.start + (k + 1) % n);
            if !cdt.can_add_constraint(handles[a], handles[b]) {
                return Err(Error::Mesh("boundary polyline self-intersects".into()));
            }
            cdt.add_constraint(handles[a], handles[b]);
        }
        Ok(())
    };
    add_loop(0..n_loop)?;
    if obstacle.is_some() {
        add_loop(obstacle_start..obstacle_end)?;
    }
    if cdt.num_vertices() != vertices.len() {
        return Err(Error::Mesh("constraint insertion split a boundary edge".into()));
    }

    let mut triangles: Vec<[usize; 3]> = Vec::new();
    for face in cdt.inner_faces() {
        let [a, b, c] = face.vertices().map(|v| spade_to_ours[v.fix().index()]);
        let (pa, pb, pc) = (vertices[a], vertices[b], vertices[c]);
        let cen = [(pa[0] + pb[0] + pc[0]) / 3.0, (pa[1] + pb[1] + pc[1]) / 3.0];
        if !inside_polygon(&loop_pts, cen) {
            continue;
        }
        if let Some(obs) = &obstacle {
            if inside_polygon(obs, cen) {
                continue;
            }
        }
        let area = signed_area(pa, pb, pc);
        triangles.push(if area > 0.0 { [a, b, c] } else { [a, c, b] });
    }
    // deterministic order independent of spade's internal face numbering
    triangles.sort_by(|x, y| {
        let mut sx = *x;
        let mut sy = *y;
        sx.sort_unstable();
        sy.sort_unstable();
        sx.cmp(&sy)
    });
    let mut regions = vec![Region::Physical; triangles.len()];

    let mut boundary_edges: Vec<BoundaryEdge> = (0..n_bottom - 1)
        .map(|i| BoundaryEdge {
            vertices: [i, i + 1],
            tag: BoundaryTag::Surface,
        })
        .collect();
    if obstacle.is_some() {
        let n = obstacle_end - obstacle_start;
        for k in 0..n {
            boundary_edges.push(BoundaryEdge {
                vertices: [obstacle_start + (k + 1) % n, obstacle_start + k],
                tag: BoundaryTag::Surface,
            });
        }
    }

    // PML annulus: rings of vertices at radii R + k dr, zipped pairwise.
    let n_rings = ((r_out - r_in) / h).ceil() as usize;
    let dr = (r_out - r_in) / n_rings as f64;
    let mut prev_ring: Vec<usize> = interface.clone();
    let mut prev_angles = arc_angles.clone();
    for k in 1..=n_rings {
        let r = if k == n_rings { r_out } else { r_in + k as f64 * dr };
        let n_seg = n_arc.max((PI * r / h).ceil() as usize);
        let angles = ring_angles(n_seg);
        let ring: Vec<usize> = (0..=n_seg)
            .map(|m| {
                vertices.push(on_circle(r, angles[m], m, n_seg));
                vertices.len() - 1
            })
            .collect();
        let (mut i, mut j) = (0usize, 0usize);
        let (na, nb) = (prev_ring.len() - 1, ring.len() - 1);
        while i < na || j < nb {
            let advance_inner = if i == na {
                false
            } else if j == nb {
                true
            } else {
                let d_inner = {
                    let (p, q) = (vertices[prev_ring[i + 1]], vertices[ring[j]]);
                    (p[0] - q[0]).hypot(p[1] - q[1])
                };
                let d_outer = {
                    let (p, q) = (vertices[prev_ring[i]], vertices[ring[j + 1]]);
                    (p[0] - q[0]).hypot(p[1] - q[1])
                };
                d_inner < d_outer || (d_inner == d_outer && prev_angles[i + 1] <= angles[j + 1])
            };
            let tri = if advance_inner {
                i += 1;
                [prev_ring[i - 1], ring[j], prev_ring[i]]
            } else {
                j += 1;
                [prev_ring[i], ring[j - 1], ring[j]]
            };
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            triangles.push(if area > 0.0 { tri } else { [tri[0], tri[2], tri[1]] });
            regions.push(Region::Pml);
        }
        boundary_edges.push(BoundaryEdge {
            vertices: [ring[0], prev_ring[0]],
            tag: BoundaryTag::Surface,
        });
        boundary_edges.push(BoundaryEdge {
            vertices: [prev_ring[na], ring[nb]],
            tag: BoundaryTag::Surface,
        });
        prev_ring = ring;
        prev_angles = angles;
    }
    for m in 0..prev_ring.len() - 1 {
        boundary_edges.push(BoundaryEdge {
            vertices: [prev_ring[m], prev_ring[m + 1]],
            tag: BoundaryTag::Outer,
        });
    }

    let mesh = Mesh::from_parts(
        vertices,
        triangles,
        boundary_edges,
        regions,
        interface,
        r_in,
        r_out,
    );
    mesh.validate()?;
    Ok(mesh)
}
