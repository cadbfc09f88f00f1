//! Trajectory export: legacy VTK snapshots and CSV time series.

use super::run::{stability_functionals, Trajectory};
use super::state::State;
use crate::error::Result;
use crate::geometry::Mesh;
use std::io::Write;

/// Writes an ASCII legacy VTK unstructured grid with point data `u`, `u_star`
/// (scalars) and `p`, `p_star` (vectors).
pub fn write_vtk<W: Write>(mut w: W, mesh: &Mesh, state: &State) -> Result<()> {
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "pml snapshot t={}", state.t)?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", mesh.num_vertices())?;
    for p in &mesh.vertices {
        writeln!(w, "{} {} 0", p[0], p[1])?;
    }
    let nt = mesh.num_triangles();
    writeln!(w, "CELLS {} {}", nt, 4 * nt)?;
    for t in &mesh.triangles {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(w, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(w, "5")?;
    }
    writeln!(w, "POINT_DATA {}", mesh.num_vertices())?;
    for (name, vals) in [("u", &state.u), ("u_star", &state.u_star)] {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in vals {
            writeln!(w, "{v}")?;
        }
    }
    for (name, x, y) in [("p", &state.px, &state.py), ("p_star", &state.p_star_x, &state.p_star_y)] {
        writeln!(w, "VECTORS {name} double")?;
        for (a, b) in x.iter().zip(y.iter()) {
            writeln!(w, "{a} {b} 0")?;
        }
    }
    Ok(())
}

/// Columns: `t, probe_0, ..., energy, max_abs_u`.
pub fn write_probes_csv<W: Write>(mut w: W, traj: &Trajectory) -> Result<()> {
    write!(w, "t")?;
    for k in 0..traj.probes.len() {
        write!(w, ",probe_{k}")?;
    }
    writeln!(w, ",energy,max_abs_u")?;
    for (r, vals) in traj.records.iter().zip(&traj.probe_values) {
        write!(w, "{}", r.t)?;
        for v in vals {
            write!(w, ",{v}")?;
        }
        writeln!(w, ",{},{}", r.energy, r.max_abs_u)?;
    }
    Ok(())
}

/// Per-step norms followed by the aggregated functionals as comment lines.
pub fn write_functionals_csv<W: Write>(mut w: W, traj: &Trajectory) -> Result<()> {
    writeln!(
        w,
        "t,source_factor,energy,dt_u,dt_p,dt_u_star,dt_p_star,sigma_u,dt_u_plus_sigma_u,forcing"
    )?;
    for r in &traj.records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.t, r.source_factor, r.energy, r.dt_u, r.dt_p, r.dt_u_star, r.dt_p_star, r.sigma_u, r.dt_u_plus_sigma_u, r.forcing
        )?;
    }
    let f = stability_functionals(traj);
    writeln!(w, "# lhs_thm_gg={}", f.lhs_thm_gg)?;
    writeln!(w, "# rhs_thm_gg={}", f.rhs_thm_gg)?;
    writeln!(w, "# lhs_lem_sg={}", f.lhs_lem_sg)?;
    writeln!(w, "# rhs_lem_sg={}", f.rhs_lem_sg)?;
    Ok(())
}
