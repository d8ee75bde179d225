//! Elementwise L2 projection of velocity gradients and the subgrid load.

use std::sync::Arc;

use super::volume::CellQuadrature;
use crate::fem::{solve_small, FeSpace, Tabulation, ASSEMBLY_DEGREE};

/// Projected velocity gradient on a discontinuous space. Components are
/// ordered `[d_x u_x, d_y u_x, d_x u_y, d_y u_y]`.
#[derive(Clone, Debug)]
pub struct GradientField {
    pub space: Arc<FeSpace>,
    pub components: [Vec<f64>; 4],
}

impl GradientField {
    pub fn zeros(space: Arc<FeSpace>) -> Self {
        let n = space.n_dofs();
        GradientField {
            space,
            components: std::array::from_fn(|_| vec![0.0; n]),
        }
    }

    pub fn evaluate(&self, t: usize, bary: [f64; 3]) -> [f64; 4] {
        std::array::from_fn(|c| crate::fem::evaluate(&self.space, &self.components[c], t, bary))
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.iter().all(|&v| v == 0.0))
    }
}

/// Componentwise L2 projection of `grad u` onto the discontinuous space `target`.
pub fn project_gradient(vel: &FeSpace, u: &[f64], target: Arc<FeSpace>) -> GradientField {
    assert!(!target.kind().is_continuous(), "projection space must be discontinuous");
    assert!(Arc::ptr_eq(vel.mesh(), target.mesh()), "spaces must share a mesh");
    let nd = vel.n_dofs();
    let (ux, uy) = u.split_at(nd);
    let nl = target.kind().n_local();
    let mut cq = CellQuadrature::new(vel, ASSEMBLY_DEGREE);
    let ttab = Tabulation::new(target.kind(), &cq.rule.points);
    let mut g = GradientField::zeros(target.clone());
    for t in 0..vel.n_cells() {
        cq.reinit(vel, t);
        let dofs = vel.cell_dofs(t);
        let mut mass = [[0.0; 3]; 3];
        let mut rhs = [[0.0; 3]; 4];
        for q in 0..cq.n_points() {
            let (w, psi, gr) = (cq.weights[q], ttab.values_at(q), cq.grad(q));
            let mut du = [0.0; 4];
            for (&d, gp) in dofs.iter().zip(gr) {
                du[0] += ux[d] * gp[0];
                du[1] += ux[d] * gp[1];
                du[2] += uy[d] * gp[0];
                du[3] += uy[d] * gp[1];
            }
            for a in 0..nl {
                for b in 0..nl {
                    mass[a][b] += w * psi[a] * psi[b];
                }
                for c in 0..4 {
                    rhs[c][a] += w * du[c] * psi[a];
                }
            }
        }
        let tdofs = target.cell_dofs(t);
        for c in 0..4 {
            let mut m = mass;
            solve_small(nl, &mut m, &mut rhs[c]);
            for a in 0..nl {
                g.components[c][tdofs[a]] = rhs[c][a];
            }
        }
    }
    g
}

/// Stacked load `nu_t (G, grad phi_i)`.
pub fn assemble_subgrid_rhs(g: &GradientField, nu_t: f64, vel: &FeSpace) -> Vec<f64> {
    let nd = vel.n_dofs();
    let mut out = vec![0.0; 2 * nd];
    if g.is_zero() || nu_t == 0.0 {
        return out;
    }
    let mut cq = CellQuadrature::new(vel, ASSEMBLY_DEGREE);
    let ttab = Tabulation::new(g.space.kind(), &cq.rule.points);
    for t in 0..vel.n_cells() {
        cq.reinit(vel, t);
        let tdofs = g.space.cell_dofs(t);
        for q in 0..cq.n_points() {
            let psi = ttab.values_at(q);
            let gq: [f64; 4] =
                std::array::from_fn(|c| tdofs.iter().zip(psi).map(|(&d, p)| g.components[c][d] * p).sum());
            let w = nu_t * cq.weights[q];
            for (&d, gp) in vel.cell_dofs(t).iter().zip(cq.grad(q)) {
                out[d] += w * (gq[0] * gp[0] + gq[1] * gp[1]);
                out[nd + d] += w * (gq[2] * gp[0] + gq[3] * gp[1]);
            }
        }
    }
    out
}

/// Largest `|(G - grad u, S)|` over the basis functions `S` of the
/// projection space, for each of the four components.
pub fn projection_residual(vel: &FeSpace, u: &[f64], g: &GradientField) -> f64 {
    let h = project_residual_vectors(vel, u, g);
    h.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

fn project_residual_vectors(vel: &FeSpace, u: &[f64], g: &GradientField) -> [Vec<f64>; 4] {
    let nd = vel.n_dofs();
    let (ux, uy) = u.split_at(nd);
    let mut cq = CellQuadrature::new(vel, ASSEMBLY_DEGREE);
    let ttab = Tabulation::new(g.space.kind(), &cq.rule.points);
    let mut r: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; g.space.n_dofs()]);
    for t in 0..vel.n_cells() {
        cq.reinit(vel, t);
        let dofs = vel.cell_dofs(t);
        let tdofs = g.space.cell_dofs(t);
        for q in 0..cq.n_points() {
            let psi = ttab.values_at(q);
            let mut du = [0.0; 4];
            for (&d, gp) in dofs.iter().zip(cq.grad(q)) {
                du[0] += ux[d] * gp[0];
                du[1] += ux[d] * gp[1];
                du[2] += uy[d] * gp[0];
                du[3] += uy[d] * gp[1];
            }
            for c in 0..4 {
                let gq: f64 = tdofs.iter().zip(psi).map(|(&d, p)| g.components[c][d] * p).sum();
                for (&d, p) in tdofs.iter().zip(psi) {
                    r[c][d] += cq.weights[q] * (gq - du[c]) * p;
                }
            }
        }
    }
    r
}

/// `||grad u - G||^2` over the mesh.
pub fn gradient_deviation_sq(vel: &FeSpace, u: &[f64], g: &GradientField) -> f64 {
    let nd = vel.n_dofs();
    let (ux, uy) = u.split_at(nd);
    let mut cq = CellQuadrature::new(vel, ASSEMBLY_DEGREE);
    let ttab = Tabulation::new(g.space.kind(), &cq.rule.points);
    let mut total = 0.0;
    for t in 0..vel.n_cells() {
        cq.reinit(vel, t);
        let dofs = vel.cell_dofs(t);
        let tdofs = g.space.cell_dofs(t);
        for q in 0..cq.n_points() {
            let psi = ttab.values_at(q);
            let mut du = [0.0; 4];
            for (&d, gp) in dofs.iter().zip(cq.grad(q)) {
                du[0] += ux[d] * gp[0];
                du[1] += ux[d] * gp[1];
                du[2] += uy[d] * gp[0];
                du[3] += uy[d] * gp[1];
            }
            for (c, duc) in du.iter().enumerate() {
                let gq: f64 = tdofs.iter().zip(psi).map(|(&d, p)| g.components[c][d] * p).sum();
                total += cq.weights[q] * (duc - gq).powi(2);
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{ElementKind, FeField};
    use crate::forms::{assemble_stiffness, block_mul};
    use crate::mesh::generate_rect_mesh;

    fn spaces(kind: ElementKind) -> (Arc<FeSpace>, Arc<FeSpace>) {
        let mesh = Arc::new(generate_rect_mesh(3, 2, (0.0, 1.0, 0.0, 1.0)).unwrap());
        (FeSpace::new(mesh.clone(), ElementKind::P2), FeSpace::new(mesh, kind))
    }

    fn field(s: &Arc<FeSpace>) -> Vec<f64> {
        let mut v = FeField::interpolate(s.clone(), |p| p[0] * p[0] - p[0] * p[1]).values;
        v.extend(FeField::interpolate(s.clone(), |p| (3.0 * p[0]).sin() * p[1]).values);
        v
    }

    #[test]
    fn p1_projection_is_exact_for_p2_gradients() {
        let (v, l) = spaces(ElementKind::DiscP1);
        let u = field(&v);
        let g = project_gradient(&v, &u, l);
        for t in 0..v.n_cells() {
            for bary in [[0.1, 0.2, 0.7], [0.5, 0.25, 0.25]] {
                let gx = crate::fem::gradient(&v, &u[..v.n_dofs()], t, bary);
                let e = g.evaluate(t, bary);
                assert!((e[0] - gx[0]).abs() < 1e-12 && (e[1] - gx[1]).abs() < 1e-12);
            }
        }
        assert!(projection_residual(&v, &u, &g) < 1e-13);
    }

    #[test]
    fn p0_projection_is_orthogonal() {
        let (v, l) = spaces(ElementKind::DiscP0);
        let u = field(&v);
        let g = project_gradient(&v, &u, l);
        assert!(projection_residual(&v, &u, &g) < 1e-13);
    }

    #[test]
    fn subgrid_load_cancels_stiffness_for_exact_gradient() {
        let (v, l) = spaces(ElementKind::DiscP1);
        let u = field(&v);
        let g = project_gradient(&v, &u, l.clone());
        let a = assemble_stiffness(&v, 0.3);
        let au = block_mul(&a, &u);
        let s = assemble_subgrid_rhs(&g, 0.3, &v);
        assert!(au.iter().zip(&s).all(|(x, y)| (x - y).abs() < 1e-13));
        assert!(assemble_subgrid_rhs(&GradientField::zeros(l), 0.3, &v).iter().all(|&x| x == 0.0));
    }
}
