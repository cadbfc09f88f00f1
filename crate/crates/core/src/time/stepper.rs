use super::state::State;
use crate::error::{Error, Result};
use crate::fem::{assemble_mass, BlockBuilder, DofMap, Field, LuSolver, SparseMatrix};
use crate::geometry::Mesh;
use crate::pml::{assemble_time_blocks, pml_matrices_at_quad, PmlProfile, TimeBlocks};

/// Implicit Euler for the first-order PML system, solved monolithically.
///
/// Per step, with `M` the mass matrix and `d = dt`:
///
/// ```text
/// (M/d + M_{s+sh}) u + M_{sh} u* - Bx px - By py = M/d u0 + F
/// (M/d + L1) p - (M/d + L2) p*                    = M/d (p0 - p*0)
/// M/d u* - M_s u                                  = M/d u*0
/// M/d p* + G u                                    = M/d p*0
/// ```
///
/// where `G = (Bx^T, By^T)` pairs `grad u` with the test function. `u` is
/// eliminated on Dirichlet vertices; the factorization is reused every step.
pub struct Stepper {
    pub dofs: DofMap,
    pub blocks: TimeBlocks,
    /// `(sigma^2 u, v)`, used by the stability functionals.
    pub m_sigma_sq: SparseMatrix<f64>,
    pub dt: f64,
    system: LuSolver<f64>,
}

impl std::fmt::Debug for Stepper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Stepper")
            .field("dt", &self.dt)
            .field("unknowns", &self.dofs.total())
            .finish()
    }
}

impl Stepper {
    pub fn new(mesh: &Mesh, profile: &PmlProfile, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
        }
        let blocks = assemble_time_blocks(mesh, profile)?;
        let m_sigma_sq = assemble_mass(mesh, |q| pml_matrices_at_quad(profile, q, None).sigma.powi(2));
        let dofs = DofMap::new(mesh);
        let matrix = Self::system_matrix(&dofs, &blocks, dt)?;
        let system = LuSolver::new(&matrix)?;
        Ok(Stepper {
            dofs,
            blocks,
            m_sigma_sq,
            dt,
            system,
        })
    }

    fn system_matrix(dofs: &DofMap, b: &TimeBlocks, dt: f64) -> Result<SparseMatrix<f64>> {
        let free = &dofs.free_u;
        let all: Vec<usize> = (0..dofs.num_vertices).collect();
        let m_dt = b.mass.scale(1.0 / dt);
        let off = |f| dofs.offset(f);
        let mut bb = BlockBuilder::new();
        use Field::*;

        bb.add(&m_dt.add(&b.m_sigma_sum)?.select(free, free), 0, 0, 1.0);
        bb.add(&b.m_coupling.select(free, &all), 0, off(UStar), 1.0);
        bb.add(&b.bx.select(free, &all), 0, off(Px), -1.0);
        bb.add(&b.by.select(free, &all), 0, off(Py), -1.0);

        let (p, ps) = ([Px, Py], [PStarX, PStarY]);
        for a in 0..2 {
            for c in 0..2 {
                let (l1, l2) = (&b.m_lambda1[a][c], &b.m_lambda2[a][c]);
                if a == c {
                    bb.add(&m_dt.add(l1)?, off(p[a]), off(p[c]), 1.0);
                    bb.add(&m_dt.add(l2)?, off(p[a]), off(ps[c]), -1.0);
                } else {
                    bb.add(l1, off(p[a]), off(p[c]), 1.0);
                    bb.add(l2, off(p[a]), off(ps[c]), -1.0);
                }
            }
        }

        bb.add(&m_dt, off(UStar), off(UStar), 1.0);
        bb.add(&b.m_sigma.select(&all, free), off(UStar), 0, -1.0);

        let (bxt, byt) = (b.bx.transpose(), b.by.transpose());
        bb.add(&m_dt, off(PStarX), off(PStarX), 1.0);
        bb.add(&bxt.select(&all, free), off(PStarX), 0, 1.0);
        bb.add(&m_dt, off(PStarY), off(PStarY), 1.0);
        bb.add(&byt.select(&all, free), off(PStarY), 0, 1.0);

        let n = dofs.total();
        bb.build(n, n)
    }

    pub fn num_unknowns(&self) -> usize {
        self.dofs.total()
    }

    /// Load vector `\int f phi_i` from nodal source values, integrated over the physical region.
    pub fn load(&self, f_nodal: &[f64]) -> Result<Vec<f64>> {
        self.blocks.source_mass.matvec(f_nodal)
    }

    fn pack(&self, s: &State) -> Vec<f64> {
        let d = &self.dofs;
        let mut x = vec![0.0; d.total()];
        for (k, &v) in d.free_u.iter().enumerate() {
            x[k] = s.u[v];
        }
        for (field, vals) in [
            (Field::Px, &s.px),
            (Field::Py, &s.py),
            (Field::UStar, &s.u_star),
            (Field::PStarX, &s.p_star_x),
            (Field::PStarY, &s.p_star_y),
        ] {
            let o = d.offset(field);
            x[o..o + vals.len()].copy_from_slice(vals);
        }
        x
    }

    fn unpack(&self, x: &[f64], t: f64) -> State {
        let d = &self.dofs;
        State {
            u: d.extract(x, Field::U),
            px: d.extract(x, Field::Px),
            py: d.extract(x, Field::Py),
            u_star: d.extract(x, Field::UStar),
            p_star_x: d.extract(x, Field::PStarX),
            p_star_y: d.extract(x, Field::PStarY),
            t,
        }
    }

    fn rhs(&self, s: &State, load: &[f64]) -> Result<Vec<f64>> {
        let d = &self.dofs;
        let m = &self.blocks.mass;
        let inv = 1.0 / self.dt;
        let mut r = vec![0.0; d.total()];
        let mu = m.matvec(&s.u)?;
        for (k, &v) in d.free_u.iter().enumerate() {
            r[k] = inv * mu[v] + load[v];
        }
        let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>();
        let blocks = [
            (Field::Px, m.matvec(&diff(&s.px, &s.p_star_x))?),
            (Field::Py, m.matvec(&diff(&s.py, &s.p_star_y))?),
            (Field::UStar, m.matvec(&s.u_star)?),
            (Field::PStarX, m.matvec(&s.p_star_x)?),
            (Field::PStarY, m.matvec(&s.p_star_y)?),
        ];
        for (field, vals) in blocks {
            let o = d.offset(field);
            for (i, v) in vals.into_iter().enumerate() {
                r[o + i] = inv * v;
            }
        }
        Ok(r)
    }

    /// Advances one step; `load` is the load vector at the new time level.
    pub fn step(&self, state: &State, load: &[f64]) -> Result<State> {
        if load.len() != self.dofs.num_vertices {
            return Err(Error::DimensionMismatch {
                expected: self.dofs.num_vertices,
                got: load.len(),
            });
        }
        let x = self.system.solve(&self.rhs(state, load)?)?;
        Ok(self.unpack(&x, state.t + self.dt))
    }

    /// Relative residual of the discrete equations between two stored states,
    /// recomputed from the blocks independently of the factorization.
    pub fn residual(&self, prev: &State, next: &State, load: &[f64]) -> Result<f64> {
        let x = self.pack(next);
        let ax = self.system.matrix().matvec(&x)?;
        let b = self.rhs(prev, load)?;
        let num: f64 = ax.iter().zip(&b).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let den: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(if den == 0.0 { num } else { num / den })
    }
}
