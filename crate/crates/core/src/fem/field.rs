//! Coefficient vectors bound to a finite element space.

use std::sync::Arc;

use super::{physical_gradient, FeSpace, Tabulation, TriangleRule, NORM_DEGREE};
use crate::mesh::Point;

/// A scalar finite element function.
#[derive(Clone, Debug)]
pub struct FeField {
    pub space: Arc<FeSpace>,
    pub values: Vec<f64>,
}

impl FeField {
    pub fn zeros(space: Arc<FeSpace>) -> Self {
        let values = vec![0.0; space.n_dofs()];
        FeField { space, values }
    }

    /// Nodal interpolant of `f` for continuous spaces, elementwise L2
    /// projection for discontinuous ones.
    pub fn interpolate(space: Arc<FeSpace>, f: impl Fn(Point) -> f64) -> Self {
        if space.kind().is_continuous() {
            let values = space.dof_points().into_iter().map(f).collect();
            return FeField { space, values };
        }
        let rule = TriangleRule::new(NORM_DEGREE);
        let tab = Tabulation::new(space.kind(), &rule.points);
        let nl = space.kind().n_local();
        let mut values = vec![0.0; space.n_dofs()];
        for t in 0..space.n_cells() {
            let g = space.mesh().geometry(t);
            let mut mass = [[0.0; 3]; 3];
            let mut rhs = [0.0; 3];
            for (q, (&bary, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
                let psi = tab.values_at(q);
                let fx = f(g.map(bary));
                for a in 0..nl {
                    rhs[a] += w * fx * psi[a];
                    for b in 0..nl {
                        mass[a][b] += w * psi[a] * psi[b];
                    }
                }
            }
            solve_small(nl, &mut mass, &mut rhs);
            for (a, &d) in space.cell_dofs(t).iter().enumerate() {
                values[d] = rhs[a];
            }
        }
        FeField { space, values }
    }

    pub fn evaluate(&self, t: usize, bary: [f64; 3]) -> f64 {
        evaluate(&self.space, &self.values, t, bary)
    }

    pub fn gradient(&self, t: usize, bary: [f64; 3]) -> [f64; 2] {
        gradient(&self.space, &self.values, t, bary)
    }

    /// Value at a physical point, or `None` outside the mesh.
    pub fn evaluate_at(&self, p: Point) -> Option<f64> {
        let (t, bary) = self.space.mesh().locate(p)?;
        Some(self.evaluate(t, bary))
    }
}

/// Value of the function with coefficients `coeffs` in cell `t` at `bary`.
pub fn evaluate(space: &FeSpace, coeffs: &[f64], t: usize, bary: [f64; 3]) -> f64 {
    let kind = space.kind();
    let mut phi = [0.0; 6];
    kind.values(bary, &mut phi);
    space
        .cell_dofs(t)
        .iter()
        .zip(&phi)
        .map(|(&d, p)| coeffs[d] * p)
        .sum()
}

pub fn gradient(space: &FeSpace, coeffs: &[f64], t: usize, bary: [f64; 3]) -> [f64; 2] {
    let kind = space.kind();
    let mut d = [[0.0; 3]; 6];
    kind.bary_derivatives(bary, &mut d);
    let gb = space.mesh().geometry(t).grad_bary;
    let mut g = [0.0; 2];
    for (&dof, dk) in space.cell_dofs(t).iter().zip(&d) {
        let pg = physical_gradient(dk, &gb);
        g[0] += coeffs[dof] * pg[0];
        g[1] += coeffs[dof] * pg[1];
    }
    g
}

/// Solves a dense system of size at most 3 by Gaussian elimination.
pub(crate) fn solve_small(n: usize, a: &mut [[f64; 3]; 3], b: &mut [f64; 3]) {
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * b[j]).sum();
        b[k] = (b[k] - s) / a[k][k];
    }
}
