//! Space-time error norms against a closed-form solution.

use super::ManufacturedSolution;
use crate::fem::{physical_gradient, FeSpace, Tabulation, TriangleRule};
use crate::scheme::{CoupledDiscretization, SchemeConfig, Snapshot};
use crate::{Error, Result};

/// `(||e||_{L2}^2, |e|_{H1}^2)` of a stacked velocity in one subdomain at time `t`.
pub fn spatial_error_sq(
    space: &FeSpace,
    u: &[f64],
    exact: &ManufacturedSolution,
    domain: usize,
    t: f64,
    degree: usize,
) -> (f64, f64) {
    let nd = space.n_dofs();
    let rule = TriangleRule::new(degree);
    let tab = Tabulation::new(space.kind(), &rule.points);
    let (mut l2, mut h1) = (0.0, 0.0);
    for c in 0..space.n_cells() {
        let g = space.mesh().geometry(c);
        let dofs = space.cell_dofs(c);
        for (q, (&bary, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let w = 2.0 * g.area * w;
            let e = exact.eval(domain, g.map(bary), t);
            let phi = tab.values_at(q);
            let n = space.kind().n_local();
            let d = &tab.derivatives[q * n..(q + 1) * n];
            for comp in 0..2 {
                let coeffs = &u[comp * nd..(comp + 1) * nd];
                let mut val = 0.0;
                let mut grad = [0.0; 2];
                for ((&dof, p), dk) in dofs.iter().zip(phi).zip(d) {
                    val += coeffs[dof] * p;
                    let pg = physical_gradient(dk, &g.grad_bary);
                    grad[0] += coeffs[dof] * pg[0];
                    grad[1] += coeffs[dof] * pg[1];
                }
                l2 += w * (e.u[comp] - val).powi(2);
                h1 += w * ((e.grad[comp][0] - grad[0]).powi(2) + (e.grad[comp][1] - grad[1]).powi(2));
            }
        }
    }
    (l2, h1)
}

/// Errors of the defect and corrected velocities in
/// `(dt sum_{j=1}^{T/dt} ||e(t_j)||^2)^{1/2}` with the full `H1` norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms {
    pub defect_l2: f64,
    pub defect_h1: f64,
    pub corrected_l2: f64,
    pub corrected_h1: f64,
}

impl ErrorNorms {
    pub fn as_array(&self) -> [f64; 4] {
        [self.defect_l2, self.defect_h1, self.corrected_l2, self.corrected_h1]
    }
}

/// Accumulates the discrete space-time norms level by level.
#[derive(Clone, Debug)]
pub struct ErrorAccumulator {
    dt: f64,
    degree: usize,
    sums: [f64; 4],
    levels: Vec<usize>,
}

impl ErrorAccumulator {
    pub fn new(dt: f64, degree: usize) -> Self {
        ErrorAccumulator {
            dt,
            degree,
            sums: [0.0; 4],
            levels: Vec::new(),
        }
    }

    pub fn add(&mut self, disc: &CoupledDiscretization, exact: &ManufacturedSolution, snap: &Snapshot) {
        for i in 0..2 {
            let space = &disc.domains[i].velocity;
            let (dl2, dh1) = spatial_error_sq(space, &snap.defect_velocity[i], exact, i, snap.time, self.degree);
            let (cl2, ch1) = spatial_error_sq(space, &snap.corrected_velocity[i], exact, i, snap.time, self.degree);
            self.sums[0] += self.dt * dl2;
            self.sums[1] += self.dt * (dl2 + dh1);
            self.sums[2] += self.dt * cl2;
            self.sums[3] += self.dt * (cl2 + ch1);
        }
        self.levels.push(snap.level);
    }

    /// Final norms; every level `1..=n_levels` must have been added exactly once.
    pub fn finish(mut self, n_levels: usize) -> Result<ErrorNorms> {
        self.levels.sort_unstable();
        if self.levels != (1..=n_levels).collect::<Vec<_>>() {
            return Err(Error::State(format!(
                "error norms need every level 1..={n_levels}, got {} snapshots",
                self.levels.len()
            )));
        }
        let s = self.sums.map(f64::sqrt);
        Ok(ErrorNorms {
            defect_l2: s[0],
            defect_h1: s[1],
            corrected_l2: s[2],
            corrected_h1: s[3],
        })
    }
}

/// Space-time error norms from snapshots covering every time level.
pub fn error_norms(
    disc: &CoupledDiscretization,
    snapshots: &[Snapshot],
    exact: &ManufacturedSolution,
    cfg: &SchemeConfig,
    degree: usize,
) -> Result<ErrorNorms> {
    let mut acc = ErrorAccumulator::new(cfg.dt, degree);
    for s in snapshots {
        acc.add(disc, exact, s);
    }
    acc.finish(cfg.n_levels())
}
