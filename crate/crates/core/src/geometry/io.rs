//! Plain-text mesh format.
//!
//! ```text
//! vertices N
//! x y              (N lines)
//! triangles M
//! i j k region     (M lines, region 0 = physical, 1 = PML)
//! boundary K
//! i j tag          (K lines, tag 1 = surface, 2 = outer)
//! ```
//!
//! Indices are 0-based. On import `rho` is the largest vertex radius and `R`
//! the largest radius among vertices of physical triangles.

use super::mesh::{norm, BoundaryEdge, BoundaryTag, Mesh, Region};
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub fn format_mesh(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "vertices {}", mesh.vertices.len());
    for p in &mesh.vertices {
        let _ = writeln!(s, "{} {}", p[0], p[1]);
    }
    let _ = writeln!(s, "triangles {}", mesh.triangles.len());
    for (t, r) in mesh.triangles.iter().zip(&mesh.regions) {
        let region = match r {
            Region::Physical => 0,
            Region::Pml => 1,
        };
        let _ = writeln!(s, "{} {} {} {}", t[0], t[1], t[2], region);
    }
    let _ = writeln!(s, "boundary {}", mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let tag = match e.tag {
            BoundaryTag::Surface => 1,
            BoundaryTag::Outer => 2,
        };
        let _ = writeln!(s, "{} {} {}", e.vertices[0], e.vertices[1], tag);
    }
    s
}

pub fn write_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_mesh(mesh))?;
    Ok(())
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text, path)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    path: PathBuf,
    line: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line: self.line,
            message: message.into(),
        }
    }

    fn next_fields(&mut self) -> Result<Vec<&'a str>> {
        loop {
            let Some((i, line)) = self.inner.next() else {
                self.line += 1;
                return Err(self.err("unexpected end of file"));
            };
            self.line = i + 1;
            let line = line.trim();
            if !line.is_empty() && !line.starts_with('#') {
                return Ok(line.split_whitespace().collect());
            }
        }
    }

    fn header(&mut self, name: &str) -> Result<usize> {
        let f = self.next_fields()?;
        if f.len() != 2 || f[0] != name {
            return Err(self.err(format!("expected `{name} <count>`")));
        }
        f[1].parse().map_err(|_| self.err(format!("bad {name} count `{}`", f[1])))
    }

    fn numbers<T: std::str::FromStr>(&mut self, n: usize) -> Result<Vec<T>> {
        let f = self.next_fields()?;
        if f.len() != n {
            return Err(self.err(format!("expected {n} fields, found {}", f.len())));
        }
        f.iter()
            .map(|s| s.parse().map_err(|_| self.err(format!("cannot parse `{s}`"))))
            .collect()
    }
}

pub fn parse_mesh(text: &str, path: &Path) -> Result<Mesh> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        path: path.to_path_buf(),
        line: 0,
    };
    let nv = lines.header("vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let v: Vec<f64> = lines.numbers(2)?;
        if !v.iter().all(|x| x.is_finite()) {
            return Err(lines.err("non-finite coordinate"));
        }
        vertices.push([v[0], v[1]]);
    }
    let nt = lines.header("triangles")?;
    let mut triangles = Vec::with_capacity(nt);
    let mut regions = Vec::with_capacity(nt);
    for _ in 0..nt {
        let v: Vec<usize> = lines.numbers(4)?;
        if v[..3].iter().any(|&i| i >= nv) {
            return Err(lines.err("vertex index out of range"));
        }
        triangles.push([v[0], v[1], v[2]]);
        regions.push(match v[3] {
            0 => Region::Physical,
            1 => Region::Pml,
            r => return Err(lines.err(format!("unknown region {r}"))),
        });
    }
    let nb = lines.header("boundary")?;
    let mut boundary_edges = Vec::with_capacity(nb);
    for _ in 0..nb {
        let v: Vec<usize> = lines.numbers(3)?;
        if v[..2].iter().any(|&i| i >= nv) {
            return Err(lines.err("vertex index out of range"));
        }
        let tag = match v[2] {
            1 => BoundaryTag::Surface,
            2 => BoundaryTag::Outer,
            t => return Err(lines.err(format!("unknown boundary tag {t}"))),
        };
        boundary_edges.push(BoundaryEdge {
            vertices: [v[0], v[1]],
            tag,
        });
    }

    let outer_radius = vertices.iter().map(|&p| norm(p)).fold(0.0, f64::max);
    let mut is_physical = vec![false; nv];
    for (t, r) in triangles.iter().zip(&regions) {
        if *r == Region::Physical {
            for &i in t {
                is_physical[i] = true;
            }
        }
    }
    let inner_radius = (0..nv)
        .filter(|&i| is_physical[i])
        .map(|i| norm(vertices[i]))
        .fold(0.0, f64::max);
    if !(inner_radius > 0.0) {
        return Err(Error::Mesh(format!("{}: no physical triangles", path.display())));
    }
    let mut interface: Vec<usize> = (0..nv)
        .filter(|&i| is_physical[i] && (norm(vertices[i]) - inner_radius).abs() <= 1e-9 * inner_radius)
        .collect();
    interface.sort_by(|&a, &b| {
        let ta = vertices[a][1].atan2(vertices[a][0]);
        let tb = vertices[b][1].atan2(vertices[b][0]);
        ta.total_cmp(&tb)
    });
    let mesh = Mesh::from_parts(
        vertices,
        triangles,
        boundary_edges,
        regions,
        interface,
        inner_radius,
        outer_radius,
    );
    mesh.validate()?;
    Ok(mesh)
}
