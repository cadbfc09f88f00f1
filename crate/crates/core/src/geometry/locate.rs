use super::mesh::{signed_area, Mesh, Point};

/// Triangle index plus barycentric coordinates of a located point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub triangle: usize,
    pub barycentric: [f64; 3],
}

const BARY_TOL: f64 = 1e-10;

/// Uniform bucket grid over triangle bounding boxes.
#[derive(Debug)]
pub struct Locator {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl Locator {
    pub fn new(mesh: &Mesh) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &mesh.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let nt = mesh.triangles.len().max(1);
        let area = ((hi[0] - lo[0]) * (hi[1] - lo[1])).max(1e-300);
        let cell = (area / nt as f64).sqrt() * 2.0;
        let nx = (((hi[0] - lo[0]) / cell).ceil() as usize).max(1);
        let ny = (((hi[1] - lo[1]) / cell).ceil() as usize).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        let clamp = |v: f64, n: usize| (v.max(0.0) as usize).min(n - 1);
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let pts = tri.map(|v| mesh.vertices[v]);
            let xmin = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let xmax = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            let ymin = pts.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
            let ymax = pts.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
            let (i0, i1) = (clamp((xmin - lo[0]) / cell, nx), clamp((xmax - lo[0]) / cell, nx));
            let (j0, j1) = (clamp((ymin - lo[1]) / cell, ny), clamp((ymax - lo[1]) / cell, ny));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(t);
                }
            }
        }
        Locator {
            origin: lo,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    fn bucket(&self, p: Point) -> Option<usize> {
        let fx = (p[0] - self.origin[0]) / self.cell;
        let fy = (p[1] - self.origin[1]) / self.cell;
        let eps = 1e-9;
        if fx < -eps || fy < -eps || fx > self.nx as f64 + eps || fy > self.ny as f64 + eps {
            return None;
        }
        let i = (fx.max(0.0) as usize).min(self.nx - 1);
        let j = (fy.max(0.0) as usize).min(self.ny - 1);
        Some(j * self.nx + i)
    }
}

pub fn barycentric(tri: [Point; 3], p: Point) -> [f64; 3] {
    let area = signed_area(tri[0], tri[1], tri[2]);
    let l0 = signed_area(p, tri[1], tri[2]) / area;
    let l1 = signed_area(tri[0], p, tri[2]) / area;
    [l0, l1, 1.0 - l0 - l1]
}

/// Finds a triangle containing `point`; `None` when the point lies outside
/// the meshed domain.
pub fn locate(mesh: &Mesh, point: Point) -> Option<Location> {
    let loc = mesh.locator();
    let bucket = loc.bucket(point)?;
    let mut best: Option<(f64, Location)> = None;
    for &t in &loc.buckets[bucket] {
        let bary = barycentric(mesh.triangle_points(t), point);
        let worst = bary.iter().copied().fold(f64::INFINITY, f64::min);
        if worst >= -BARY_TOL {
            // prefer the triangle where the point is deepest inside
            if best.is_none_or(|(w, _)| worst > w) {
                best = Some((
                    worst,
                    Location {
                        triangle: t,
                        barycentric: bary,
                    },
                ));
            }
        }
    }
    best.map(|(_, l)| l)
}

/// Interpolates a nodal field at a point (0 outside the domain).
pub fn interpolate(mesh: &Mesh, field: &[f64], point: Point) -> Option<f64> {
    let l = locate(mesh, point)?;
    let tri = mesh.triangles[l.triangle];
    Some((0..3).map(|k| l.barycentric[k] * field[tri[k]]).sum())
}
