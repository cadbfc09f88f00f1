use crate::error::{Error, Result};
use std::collections::HashMap;
use std::sync::OnceLock;

use super::locate::Locator;

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// The perturbed surface, its flat continuation, and any obstacle boundary.
    Surface,
    /// The outer semicircle `|x| = rho`.
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Physical,
    Pml,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub tag: BoundaryTag,
}

/// Triangulation of the truncated half-disk with region and boundary tags.
#[derive(Debug)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub regions: Vec<Region>,
    /// Vertices on the interface circle `|x| = R`, ordered by polar angle.
    pub interface_vertices: Vec<usize>,
    pub inner_radius: f64,
    pub outer_radius: f64,
    locator: OnceLock<Locator>,
}

impl Clone for Mesh {
    fn clone(&self) -> Self {
        Mesh::from_parts(
            self.vertices.clone(),
            self.triangles.clone(),
            self.boundary_edges.clone(),
            self.regions.clone(),
            self.interface_vertices.clone(),
            self.inner_radius,
            self.outer_radius,
        )
    }
}

/// Summary statistics used in manifests and tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshStats {
    pub vertices: usize,
    pub triangles: usize,
    pub boundary_edges: usize,
    pub physical_triangles: usize,
    pub min_angle_deg: f64,
    pub max_edge: f64,
    pub area: f64,
}

pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

pub fn norm(p: Point) -> f64 {
    p[0].hypot(p[1])
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Mesh {
    pub fn from_parts(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
        regions: Vec<Region>,
        interface_vertices: Vec<usize>,
        inner_radius: f64,
        outer_radius: f64,
    ) -> Self {
        Mesh {
            vertices,
            triangles,
            boundary_edges,
            regions,
            interface_vertices,
            inner_radius,
            outer_radius,
            locator: OnceLock::new(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        signed_area(a, b, c)
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.triangle_points(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Vertices touched by at least one physical-region triangle, sorted.
    pub fn physical_vertices(&self) -> Vec<usize> {
        let mut mark = vec![false; self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            if self.regions[t] == Region::Physical {
                for &v in tri {
                    mark[v] = true;
                }
            }
        }
        (0..self.vertices.len()).filter(|&v| mark[v]).collect()
    }

    /// The triangulation of `|x| <= R` alone, plus the map from its vertex
    /// indices to this mesh's. The interface circle becomes the OUTER boundary.
    pub fn physical_submesh(&self) -> Result<(Mesh, Vec<usize>)> {
        let keep = self.physical_vertices();
        let mut new_index = vec![usize::MAX; self.vertices.len()];
        for (k, &v) in keep.iter().enumerate() {
            new_index[v] = k;
        }
        let mut triangles = Vec::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            if self.regions[t] == Region::Physical {
                triangles.push(tri.map(|v| new_index[v]));
            }
        }
        let mut count: HashMap<[usize; 2], usize> = HashMap::new();
        for tri in &triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *count.entry([a.min(b), a.max(b)]).or_default() += 1;
            }
        }
        let mut boundary_edges: Vec<BoundaryEdge> = self
            .boundary_edges
            .iter()
            .filter(|e| e.vertices.iter().all(|&v| new_index[v] != usize::MAX))
            .map(|e| BoundaryEdge { vertices: e.vertices.map(|v| new_index[v]), tag: e.tag })
            .filter(|e| {
                let [a, b] = e.vertices;
                count.get(&[a.min(b), a.max(b)]) == Some(&1)
            })
            .collect();
        let interface: Vec<usize> = self.interface_vertices.iter().map(|&v| new_index[v]).collect();
        if interface.contains(&usize::MAX) {
            return Err(Error::Mesh("interface vertex outside the physical region".into()));
        }
        for w in interface.windows(2) {
            boundary_edges.push(BoundaryEdge { vertices: [w[0], w[1]], tag: BoundaryTag::Outer });
        }
        let vertices = keep.iter().map(|&v| self.vertices[v]).collect();
        let regions = vec![Region::Physical; triangles.len()];
        let sub = Mesh::from_parts(
            vertices,
            triangles,
            boundary_edges,
            regions,
            interface,
            self.inner_radius,
            self.inner_radius,
        );
        sub.validate()?;
        Ok((sub, keep))
    }

    /// Per-vertex flag: lies on a SURFACE or OUTER edge.
    pub fn boundary_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.vertices.len()];
        for e in &self.boundary_edges {
            mask[e.vertices[0]] = true;
            mask[e.vertices[1]] = true;
        }
        mask
    }

    /// Vertices of boundary edges carrying `tag`.
    pub fn tagged_vertices(&self, tag: BoundaryTag) -> Vec<usize> {
        let mut mark = vec![false; self.vertices.len()];
        for e in self.boundary_edges.iter().filter(|e| e.tag == tag) {
            mark[e.vertices[0]] = true;
            mark[e.vertices[1]] = true;
        }
        (0..self.vertices.len()).filter(|&v| mark[v]).collect()
    }

    pub fn locator(&self) -> &Locator {
        self.locator.get_or_init(|| Locator::new(self))
    }

    pub fn stats(&self) -> MeshStats {
        let mut min_angle = f64::INFINITY;
        let mut max_edge: f64 = 0.0;
        let mut area = 0.0;
        for t in 0..self.triangles.len() {
            let p = self.triangle_points(t);
            area += signed_area(p[0], p[1], p[2]);
            for k in 0..3 {
                let a = p[k];
                let b = p[(k + 1) % 3];
                let c = p[(k + 2) % 3];
                max_edge = max_edge.max(dist(a, b));
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - a[0], c[1] - a[1]];
                let cos = (u[0] * v[0] + u[1] * v[1]) / (norm(u) * norm(v));
                min_angle = min_angle.min(cos.clamp(-1.0, 1.0).acos().to_degrees());
            }
        }
        MeshStats {
            vertices: self.vertices.len(),
            triangles: self.triangles.len(),
            boundary_edges: self.boundary_edges.len(),
            physical_triangles: self
                .regions
                .iter()
                .filter(|&&r| r == Region::Physical)
                .count(),
            min_angle_deg: min_angle,
            max_edge,
            area,
        }
    }

    /// Edge -> incident triangles.
    pub fn edge_map(&self) -> HashMap<[usize; 2], Vec<usize>> {
        let mut map: HashMap<[usize; 2], Vec<usize>> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                map.entry([a.min(b), a.max(b)]).or_default().push(t);
            }
        }
        map
    }

    /// Checks the structural invariants: orientation, conformity, boundary
    /// closure, no duplicate vertices, and region tags consistent with radii.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.regions.len() != self.triangles.len() {
            return Err(Error::Mesh("one region tag per triangle required".into()));
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return Err(Error::Mesh(format!("triangle {t} references a missing vertex")));
            }
            if self.triangle_area(t) <= 0.0 {
                return Err(Error::Mesh(format!("triangle {t} has non-positive area")));
            }
        }
        let tol = 1e-12 * self.outer_radius;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.vertices[a][0].total_cmp(&self.vertices[b][0]));
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (self.vertices[order[i]], self.vertices[order[j]]);
                if b[0] - a[0] > tol {
                    break;
                }
                if dist(a, b) <= tol {
                    return Err(Error::Mesh(format!(
                        "duplicate vertices {} and {}",
                        order[i], order[j]
                    )));
                }
            }
        }

        let edges = self.edge_map();
        let mut boundary: HashMap<[usize; 2], BoundaryTag> = HashMap::new();
        for e in &self.boundary_edges {
            let [a, b] = e.vertices;
            boundary.insert([a.min(b), a.max(b)], e.tag);
        }
        for (key, tris) in &edges {
            match (tris.len(), boundary.contains_key(key)) {
                (2, false) | (1, true) => {}
                (1, false) => {
                    return Err(Error::Mesh(format!("edge {key:?} is on the hull but untagged")))
                }
                (k, _) => {
                    return Err(Error::Mesh(format!(
                        "edge {key:?} has {k} incident triangles (tagged: {})",
                        boundary.contains_key(key)
                    )))
                }
            }
        }
        if boundary.len() != self.boundary_edges.len() || boundary.keys().any(|k| !edges.contains_key(k)) {
            return Err(Error::Mesh("boundary edge list does not match mesh hull".into()));
        }
        // boundary closure: every boundary vertex has even degree
        let mut degree = vec![0usize; n];
        for e in &self.boundary_edges {
            degree[e.vertices[0]] += 1;
            degree[e.vertices[1]] += 1;
        }
        if let Some(v) = degree.iter().position(|&d| d % 2 == 1) {
            return Err(Error::Mesh(format!("boundary is not closed at vertex {v}")));
        }
        let rtol = 1e-8 * self.outer_radius;
        for e in self.boundary_edges.iter().filter(|e| e.tag == BoundaryTag::Outer) {
            for &v in &e.vertices {
                if (norm(self.vertices[v]) - self.outer_radius).abs() > rtol {
                    return Err(Error::Mesh(format!("OUTER vertex {v} is off |x| = rho")));
                }
            }
        }
        for &v in &self.interface_vertices {
            if (norm(self.vertices[v]) - self.inner_radius).abs() > rtol {
                return Err(Error::Mesh(format!("interface vertex {v} is off |x| = R")));
            }
        }
        for t in 0..self.triangles.len() {
            let pml = norm(self.centroid(t)) > self.inner_radius;
            if pml != (self.regions[t] == Region::Pml) {
                return Err(Error::Mesh(format!(
                    "triangle {t} region tag disagrees with its centroid radius"
                )));
            }
        }
        Ok(())
    }
}
