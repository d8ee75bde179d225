//! Volume bilinear and trilinear forms and load vectors.
//!
//! Velocity coefficient vectors stack the two components: `[u_x; u_y]`,
//! each block indexed by the dofs of the scalar velocity space.

use super::SparseMatrix;
use crate::fem::{FeSpace, Tabulation, TriangleRule, ASSEMBLY_DEGREE};
use crate::mesh::Point;

/// Per-cell quadrature data: physical weights, basis values and gradients.
pub(crate) struct CellQuadrature {
    pub rule: TriangleRule,
    pub tab: Tabulation,
    pub weights: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
    n_local: usize,
}

impl CellQuadrature {
    pub fn new(space: &FeSpace, degree: usize) -> Self {
        let rule = TriangleRule::new(degree);
        let tab = Tabulation::new(space.kind(), &rule.points);
        let n_local = space.kind().n_local();
        CellQuadrature {
            weights: vec![0.0; rule.len()],
            grads: vec![[0.0; 2]; rule.len() * n_local],
            rule,
            tab,
            n_local,
        }
    }

    pub fn reinit(&mut self, space: &FeSpace, t: usize) {
        let g = space.mesh().geometry(t);
        for (q, w) in self.weights.iter_mut().enumerate() {
            *w = 2.0 * g.area * self.rule.weights[q];
        }
        let n = self.n_local;
        for q in 0..self.rule.len() {
            self.tab
                .gradients_at(q, &g.grad_bary, &mut self.grads[q * n..(q + 1) * n]);
        }
    }

    pub fn phi(&self, q: usize) -> &[f64] {
        self.tab.values_at(q)
    }

    pub fn grad(&self, q: usize) -> &[[f64; 2]] {
        &self.grads[q * self.n_local..(q + 1) * self.n_local]
    }

    pub fn n_points(&self) -> usize {
        self.rule.len()
    }
}

fn scalar_at(dofs: &[usize], phi: &[f64], c: &[f64]) -> f64 {
    dofs.iter().zip(phi).map(|(&d, p)| c[d] * p).sum()
}

fn grad_at(dofs: &[usize], grad: &[[f64; 2]], c: &[f64]) -> [f64; 2] {
    dofs.iter().zip(grad).fold([0.0; 2], |g, (&d, dp)| {
        [g[0] + c[d] * dp[0], g[1] + c[d] * dp[1]]
    })
}

fn assemble_cellwise(space: &FeSpace, mut local: impl FnMut(usize, &CellQuadrature, &mut [f64])) -> SparseMatrix {
    let n = space.kind().n_local();
    let mut cq = CellQuadrature::new(space, ASSEMBLY_DEGREE);
    let pattern = space.sparsity();
    let mut values = vec![0.0; pattern.col_idx.len()];
    let mut ke = vec![0.0; n * n];
    for t in 0..space.n_cells() {
        cq.reinit(space, t);
        ke.iter_mut().for_each(|v| *v = 0.0);
        local(t, &cq, &mut ke);
        for (&slot, v) in pattern.cell_slots[t * n * n..(t + 1) * n * n].iter().zip(&ke) {
            values[slot] += v;
        }
    }
    SparseMatrix::from_csr(
        space.n_dofs(),
        space.n_dofs(),
        pattern.row_ptr.clone(),
        pattern.col_idx.clone(),
        values,
    )
}

/// Scalar mass matrix `M_ij = (phi_j, phi_i)`.
pub fn assemble_mass(space: &FeSpace) -> SparseMatrix {
    let n = space.kind().n_local();
    assemble_cellwise(space, |_, cq, ke| {
        for q in 0..cq.n_points() {
            let (w, phi) = (cq.weights[q], cq.phi(q));
            for i in 0..n {
                for j in 0..n {
                    ke[i * n + j] += w * phi[i] * phi[j];
                }
            }
        }
    })
}

/// Scalar stiffness matrix `A_ij = coeff (grad phi_j, grad phi_i)`.
pub fn assemble_stiffness(space: &FeSpace, coeff: f64) -> SparseMatrix {
    let n = space.kind().n_local();
    assemble_cellwise(space, |_, cq, ke| {
        for q in 0..cq.n_points() {
            let (w, g) = (coeff * cq.weights[q], cq.grad(q));
            for i in 0..n {
                for j in 0..n {
                    ke[i * n + j] += w * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                }
            }
        }
    })
}

/// Skew-symmetrized convection matrix `N(w)_ij = c(w; phi_j, phi_i)` with
/// `c(u; v, z) = 1/2 (u . grad v, z) - 1/2 (u . grad z, v)`. The same scalar
/// block acts on both velocity components.
pub fn assemble_convection(space: &FeSpace, w: &[f64]) -> SparseMatrix {
    let nd = space.n_dofs();
    assert_eq!(w.len(), 2 * nd, "advecting field must have two components");
    let (wx, wy) = w.split_at(nd);
    let n = space.kind().n_local();
    let mut adv = vec![0.0; n];
    assemble_cellwise(space, |t, cq, ke| {
        let dofs = space.cell_dofs(t);
        for q in 0..cq.n_points() {
            let phi = cq.phi(q);
            let b = [scalar_at(dofs, phi, wx), scalar_at(dofs, phi, wy)];
            let g = cq.grad(q);
            for (a, gi) in adv.iter_mut().zip(g) {
                *a = b[0] * gi[0] + b[1] * gi[1];
            }
            let wq = 0.5 * cq.weights[q];
            for i in 0..n {
                for j in 0..n {
                    ke[i * n + j] += wq * (adv[j] * phi[i] - adv[i] * phi[j]);
                }
            }
        }
    })
}

/// `c(u; v, w)` for stacked vector fields on `space`.
pub fn trilinear_c(space: &FeSpace, u: &[f64], v: &[f64], w: &[f64]) -> f64 {
    let nd = space.n_dofs();
    let split = |x: &[f64]| -> [Vec<f64>; 2] { [x[..nd].to_vec(), x[nd..].to_vec()] };
    let (u, v, w) = (split(u), split(v), split(w));
    let mut cq = CellQuadrature::new(space, ASSEMBLY_DEGREE);
    let mut total = 0.0;
    for t in 0..space.n_cells() {
        cq.reinit(space, t);
        let dofs = space.cell_dofs(t);
        for q in 0..cq.n_points() {
            let (phi, g) = (cq.phi(q), cq.grad(q));
            let uq = [scalar_at(dofs, phi, &u[0]), scalar_at(dofs, phi, &u[1])];
            let mut s = 0.0;
            for c in 0..2 {
                let gv = grad_at(dofs, g, &v[c]);
                let gw = grad_at(dofs, g, &w[c]);
                let vq = scalar_at(dofs, phi, &v[c]);
                let wq = scalar_at(dofs, phi, &w[c]);
                s += (uq[0] * gv[0] + uq[1] * gv[1]) * wq - (uq[0] * gw[0] + uq[1] * gw[1]) * vq;
            }
            total += 0.5 * cq.weights[q] * s;
        }
    }
    total
}

/// Divergence coupling `(B_x, B_y)` with `B_c[q][j] = (psi_q, d_c phi_j)`.
pub fn assemble_div_coupling(vel: &FeSpace, pres: &FeSpace) -> (SparseMatrix, SparseMatrix) {
    assert!(std::sync::Arc::ptr_eq(vel.mesh(), pres.mesh()), "spaces must share a mesh");
    let nv = vel.kind().n_local();
    let np = pres.kind().n_local();
    let mut cq = CellQuadrature::new(vel, ASSEMBLY_DEGREE);
    let ptab = Tabulation::new(pres.kind(), &cq.rule.points);
    let mut tx = Vec::with_capacity(vel.n_cells() * nv * np);
    let mut ty = Vec::with_capacity(vel.n_cells() * nv * np);
    for t in 0..vel.n_cells() {
        cq.reinit(vel, t);
        let (vd, pd) = (vel.cell_dofs(t), pres.cell_dofs(t));
        let mut bx = vec![0.0; np * nv];
        let mut by = vec![0.0; np * nv];
        for q in 0..cq.n_points() {
            let (w, g, psi) = (cq.weights[q], cq.grad(q), ptab.values_at(q));
            for a in 0..np {
                for j in 0..nv {
                    bx[a * nv + j] += w * psi[a] * g[j][0];
                    by[a * nv + j] += w * psi[a] * g[j][1];
                }
            }
        }
        for a in 0..np {
            for j in 0..nv {
                tx.push((pd[a], vd[j], bx[a * nv + j]));
                ty.push((pd[a], vd[j], by[a * nv + j]));
            }
        }
    }
    (
        SparseMatrix::from_triplets(pres.n_dofs(), vel.n_dofs(), tx),
        SparseMatrix::from_triplets(pres.n_dofs(), vel.n_dofs(), ty),
    )
}

/// Load vector `(f, v)` for a vector-valued source, stacked by component.
pub fn assemble_load(space: &FeSpace, f: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
    let nd = space.n_dofs();
    let mut out = vec![0.0; 2 * nd];
    let mut cq = CellQuadrature::new(space, ASSEMBLY_DEGREE);
    for t in 0..space.n_cells() {
        cq.reinit(space, t);
        let g = space.mesh().geometry(t);
        let dofs = space.cell_dofs(t);
        for q in 0..cq.n_points() {
            let x = g.map(cq.rule.points[q]);
            let fq = f(x);
            let w = cq.weights[q];
            for (&d, p) in dofs.iter().zip(cq.phi(q)) {
                out[d] += w * fq[0] * p;
                out[nd + d] += w * fq[1] * p;
            }
        }
    }
    out
}

/// Integral of each basis function, `(1, phi_i)`.
pub fn basis_integrals(space: &FeSpace) -> Vec<f64> {
    let mut out = vec![0.0; space.n_dofs()];
    let mut cq = CellQuadrature::new(space, ASSEMBLY_DEGREE);
    for t in 0..space.n_cells() {
        cq.reinit(space, t);
        for q in 0..cq.n_points() {
            for (&d, p) in space.cell_dofs(t).iter().zip(cq.phi(q)) {
                out[d] += cq.weights[q] * p;
            }
        }
    }
    out
}

/// Applies a scalar block to both components of a stacked vector.
pub fn block_mul(m: &SparseMatrix, x: &[f64]) -> Vec<f64> {
    let n = m.ncols();
    let mut y = m.mul_vec(&x[..n]);
    y.extend(m.mul_vec(&x[n..]));
    y
}
