//! Finite element spaces and time-independent operators of both subdomains.

use std::sync::Arc;

use super::Problem;
use crate::fem::{Constraints, ElementKind, FeSpace};
use crate::forms::{assemble_div_coupling, assemble_mass, assemble_stiffness, basis_integrals, SparseMatrix};
use crate::mesh::{BoundaryTag, CoupledMesh, InterfacePairing, Mesh, Point};
use crate::{Error, Result};

/// Taylor-Hood spaces, the gradient projection space and the constant
/// matrices of one subdomain.
#[derive(Debug)]
pub struct Subdomain {
    pub mesh: Arc<Mesh>,
    pub velocity: Arc<FeSpace>,
    pub pressure: Arc<FeSpace>,
    pub gradient: Arc<FeSpace>,
    pub mass: SparseMatrix,
    /// Unit-coefficient stiffness matrix.
    pub stiffness: SparseMatrix,
    pub div: (SparseMatrix, SparseMatrix),
    pub pressure_weights: Vec<f64>,
    dof_points: Vec<Point>,
    tagged_dofs: Vec<(BoundaryTag, Vec<usize>)>,
}

impl Subdomain {
    fn new(mesh: Mesh, subgrid: ElementKind) -> Self {
        let mesh = Arc::new(mesh);
        let velocity = FeSpace::new(mesh.clone(), ElementKind::P2);
        let pressure = FeSpace::new(mesh.clone(), ElementKind::P1);
        let gradient = FeSpace::new(mesh.clone(), subgrid);
        let tagged_dofs = BoundaryTag::ALL
            .iter()
            .map(|&t| (t, velocity.boundary_dofs(t)))
            .collect();
        Subdomain {
            mass: assemble_mass(&velocity),
            stiffness: assemble_stiffness(&velocity, 1.0),
            div: assemble_div_coupling(&velocity, &pressure),
            pressure_weights: basis_integrals(&pressure),
            dof_points: velocity.dof_points(),
            tagged_dofs,
            mesh,
            velocity,
            pressure,
            gradient,
        }
    }

    pub fn n_velocity(&self) -> usize {
        self.velocity.n_dofs()
    }

    /// Total unknowns of the saddle system (two velocity components and pressure).
    pub fn n_unknowns(&self) -> usize {
        2 * self.velocity.n_dofs() + self.pressure.n_dofs()
    }

    pub fn dof_points(&self) -> &[Point] {
        &self.dof_points
    }

    /// Velocity constraints at time `t`: Dirichlet parts fix both components
    /// (and take precedence where they meet the interface); on the interface
    /// only the normal (vertical) component is fixed to zero.
    pub fn constraints(&self, domain: usize, problem: &dyn Problem, t: f64) -> Result<Constraints> {
        let n = self.n_velocity();
        let mut c = Constraints::new();
        for (tag, dofs) in &self.tagged_dofs {
            if !tag.is_dirichlet() {
                continue;
            }
            for &d in dofs {
                let x = self.dof_points[d];
                let v = problem
                    .boundary_velocity(domain, *tag, t, x)
                    .ok_or(Error::MissingBoundaryData {
                        tag: *tag,
                        dof: d,
                        x: x[0],
                        y: x[1],
                    })?;
                c.set(d, v[0]);
                c.set(n + d, v[1]);
            }
        }
        for (tag, dofs) in &self.tagged_dofs {
            if *tag == BoundaryTag::Interface {
                for &d in dofs {
                    c.set_if_free(n + d, 0.0);
                }
            }
        }
        Ok(c)
    }

    /// Divergence residual `B u` of a stacked velocity.
    pub fn divergence(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n_velocity();
        let mut r = self.div.0.mul_vec(&u[..n]);
        self.div.1.mul_vec_add(1.0, &u[n..], &mut r);
        r
    }
}

/// Both subdomains and the interface pairing (side `i` of the pairing is subdomain `i`).
#[derive(Debug)]
pub struct CoupledDiscretization {
    pub domains: [Subdomain; 2],
    pub pairing: InterfacePairing,
}

impl CoupledDiscretization {
    pub fn new(coupled: CoupledMesh, subgrid: ElementKind) -> Result<Self> {
        for s in &coupled.pairing.segments {
            let (a, b) = (s.points[0], s.points[s.points.len() - 1]);
            if (a[1] - b[1]).abs() > 1e-12 * (1.0 + (a[0] - b[0]).abs()) {
                return Err(Error::InvalidMesh(
                    "interface edges must be horizontal (the normal component is the y-component)".into(),
                ));
            }
        }
        let CoupledMesh { mesh1, mesh2, pairing } = coupled;
        Ok(CoupledDiscretization {
            domains: [Subdomain::new(mesh1, subgrid), Subdomain::new(mesh2, subgrid)],
            pairing,
        })
    }

    pub fn n_unknowns(&self) -> usize {
        self.domains.iter().map(Subdomain::n_unknowns).sum()
    }
}
