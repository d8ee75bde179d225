//! Interface traces, jump magnitudes and interface integrals.
//!
//! Pointwise interface data is stored in the flat order of the pairing:
//! segment by segment, quadrature point by quadrature point. `side` selects
//! which mesh of the pairing the space lives on (0 or 1).

use super::SparseMatrix;
use crate::fem::FeSpace;
use crate::mesh::InterfacePairing;

/// Velocity traces `(u_x, u_y)` of a stacked field at every interface point.
pub fn interface_traces(space: &FeSpace, u: &[f64], pairing: &InterfacePairing, side: usize) -> Vec<[f64; 2]> {
    let nd = space.n_dofs();
    let kind = space.kind();
    let mut phi = [0.0; 6];
    pairing
        .side_points(side)
        .map(|(t, _, bary, _)| {
            kind.values(bary, &mut phi);
            let mut v = [0.0; 2];
            for (&d, p) in space.cell_dofs(t).iter().zip(&phi) {
                v[0] += u[d] * p;
                v[1] += u[nd + d] * p;
            }
            v
        })
        .collect()
}

/// Euclidean norm of the trace difference at one point.
pub fn jump_magnitude(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// `|[u]|` at every interface point given the traces of both sides.
pub fn jump_magnitudes(traces1: &[[f64; 2]], traces2: &[[f64; 2]]) -> Vec<f64> {
    assert_eq!(traces1.len(), traces2.len());
    traces1.iter().zip(traces2).map(|(&a, &b)| jump_magnitude(a, b)).collect()
}

/// Weights of the pairing in flat point order.
pub fn interface_weights(pairing: &InterfacePairing) -> Vec<f64> {
    pairing.side_points(0).map(|(_, _, _, w)| w).collect()
}

/// Scalar interface mass `K_ij = kappa * int_I weight phi_j phi_i ds`.
pub fn assemble_interface_mass(
    space: &FeSpace,
    pairing: &InterfacePairing,
    side: usize,
    weight: &[f64],
    kappa: f64,
) -> SparseMatrix {
    assert_eq!(weight.len(), pairing.n_points());
    assert!(weight.iter().all(|&w| w >= 0.0), "interface weight must be non-negative");
    let kind = space.kind();
    let n = kind.n_local();
    let mut phi = [0.0; 6];
    let mut triplets = Vec::with_capacity(pairing.n_points() * n * n);
    for ((t, _, bary, w), &c) in pairing.side_points(side).zip(weight) {
        if c == 0.0 {
            continue;
        }
        kind.values(bary, &mut phi);
        let dofs = space.cell_dofs(t);
        for i in 0..n {
            if phi[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if phi[j] != 0.0 {
                    triplets.push((dofs[i], dofs[j], kappa * w * c * phi[i] * phi[j]));
                }
            }
        }
    }
    SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), triplets)
}

/// Stacked load `int_I g . (phi_i e_c) ds` for pointwise vector data `g`.
pub fn interface_load(space: &FeSpace, pairing: &InterfacePairing, side: usize, g: &[[f64; 2]]) -> Vec<f64> {
    assert_eq!(g.len(), pairing.n_points());
    let nd = space.n_dofs();
    let kind = space.kind();
    let mut phi = [0.0; 6];
    let mut out = vec![0.0; 2 * nd];
    for ((t, _, bary, w), gq) in pairing.side_points(side).zip(g) {
        kind.values(bary, &mut phi);
        for (&d, p) in space.cell_dofs(t).iter().zip(&phi) {
            out[d] += w * gq[0] * p;
            out[nd + d] += w * gq[1] * p;
        }
    }
    out
}

/// Geometric-averaging load
/// `kappa * int_I u_j |[w^n]|^{1/2} |[w^{n-1}]|^{1/2} phi_i ds`, where
/// `other` holds the traces of the other subdomain's velocity.
pub fn assemble_interface_ga_rhs(
    space: &FeSpace,
    pairing: &InterfacePairing,
    side: usize,
    other: &[[f64; 2]],
    jump_a: &[f64],
    jump_b: &[f64],
    kappa: f64,
) -> Vec<f64> {
    let g: Vec<[f64; 2]> = other
        .iter()
        .zip(jump_a.iter().zip(jump_b))
        .map(|(u, (&a, &b))| {
            let s = kappa * a.sqrt() * b.sqrt();
            [s * u[0], s * u[1]]
        })
        .collect();
    interface_load(space, pairing, side, &g)
}
