//! One-to-one matching of the interface edges of two conforming meshes.

use super::{dist, BoundaryTag, Mesh, Point};
use crate::fem::gauss_legendre;
use crate::{Error, Result};

/// Gauss points per interface edge (exact for polynomials of degree 7).
pub const EDGE_QUADRATURE_POINTS: usize = 4;

/// A matched pair of interface edges with shared quadrature points.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceSegment {
    /// Boundary-edge indices in mesh 1 and mesh 2.
    pub edges: [usize; 2],
    pub triangles: [usize; 2],
    pub local_edges: [usize; 2],
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    /// Barycentric coordinates of every point in the owning triangle of each side.
    pub bary: [Vec<[f64; 3]>; 2],
}

impl InterfaceSegment {
    pub fn length(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn swapped(&self) -> Self {
        InterfaceSegment {
            edges: [self.edges[1], self.edges[0]],
            triangles: [self.triangles[1], self.triangles[0]],
            local_edges: [self.local_edges[1], self.local_edges[0]],
            points: self.points.clone(),
            weights: self.weights.clone(),
            bary: [self.bary[1].clone(), self.bary[0].clone()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct InterfacePairing {
    pub segments: Vec<InterfaceSegment>,
}

impl InterfacePairing {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Total number of shared quadrature points.
    pub fn n_points(&self) -> usize {
        self.segments.iter().map(|s| s.points.len()).sum()
    }

    /// The same pairing seen from the other mesh.
    pub fn transposed(&self) -> Self {
        InterfacePairing {
            segments: self.segments.iter().map(InterfaceSegment::swapped).collect(),
        }
    }

    /// Iterates `(segment, point index, triangle, barycentric, weight)` on one side.
    pub fn side_points(&self, side: usize) -> impl Iterator<Item = (usize, usize, [f64; 3], f64)> + '_ {
        self.segments.iter().flat_map(move |s| {
            (0..s.points.len()).map(move |q| (s.triangles[side], q, s.bary[side][q], s.weights[q]))
        })
    }
}

fn lex_less(a: Point, b: Point) -> bool {
    (a[0], a[1]) < (b[0], b[1])
}

/// Pairs every interface-tagged edge of `mesh1` with the coincident
/// interface edge of `mesh2` (endpoints equal within `tol`).
pub fn build_interface_pairing(mesh1: &Mesh, mesh2: &Mesh, tol: f64) -> Result<InterfacePairing> {
    let iface1: Vec<usize> = mesh1.edges_with_tag(BoundaryTag::Interface).map(|(i, _)| i).collect();
    let iface2: Vec<usize> = mesh2.edges_with_tag(BoundaryTag::Interface).map(|(i, _)| i).collect();
    let endpoints = |m: &Mesh, e: usize| m.boundary_edges()[e].vertices.map(|v| m.vertices()[v]);

    let mut taken = vec![false; iface2.len()];
    let (gl_nodes, gl_weights) = gauss_legendre(EDGE_QUADRATURE_POINTS);
    let mut segments = Vec::with_capacity(iface1.len());
    for &e1 in &iface1 {
        let [a1, b1] = endpoints(mesh1, e1);
        let found = iface2.iter().enumerate().find(|&(k, &e2)| {
            let [a2, b2] = endpoints(mesh2, e2);
            !taken[k]
                && ((dist(a1, a2) <= tol && dist(b1, b2) <= tol) || (dist(a1, b2) <= tol && dist(b1, a2) <= tol))
        });
        let Some((k, &e2)) = found else {
            return Err(Error::Pairing {
                mesh: 1,
                edge: e1,
                a: a1,
                b: b1,
            });
        };
        taken[k] = true;
        let [a2, b2] = endpoints(mesh2, e2);
        let (a2, b2) = if dist(a1, a2) <= tol { (a2, b2) } else { (b2, a2) };
        // Shared endpoints, symmetric in the two meshes, ordered lexicographically.
        let mid = |p: Point, q: Point| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
        let (mut start, mut end) = (mid(a1, a2), mid(b1, b2));
        if lex_less(end, start) {
            std::mem::swap(&mut start, &mut end);
        }
        let length = dist(start, end);
        let points: Vec<Point> = gl_nodes
            .iter()
            .map(|&s| [start[0] + s * (end[0] - start[0]), start[1] + s * (end[1] - start[1])])
            .collect();
        let weights: Vec<f64> = gl_weights.iter().map(|w| w * length).collect();

        let side_bary = |m: &Mesh, e: usize| -> Vec<[f64; 3]> {
            let be = &m.boundary_edges()[e];
            let k = be.local_edge;
            let v_first = m.vertices()[be.vertices[0]];
            // Parameter runs from local vertex k to local vertex k+1.
            let forward = dist(v_first, start) <= dist(v_first, end);
            gl_nodes
                .iter()
                .map(|&s| {
                    let s = if forward { s } else { 1.0 - s };
                    let mut l = [0.0; 3];
                    l[k] = 1.0 - s;
                    l[(k + 1) % 3] = s;
                    l
                })
                .collect()
        };
        let be1 = &mesh1.boundary_edges()[e1];
        let be2 = &mesh2.boundary_edges()[e2];
        segments.push(InterfaceSegment {
            edges: [e1, e2],
            triangles: [be1.triangle, be2.triangle],
            local_edges: [be1.local_edge, be2.local_edge],
            points,
            weights,
            bary: [side_bary(mesh1, e1), side_bary(mesh2, e2)],
        });
    }
    if let Some(k) = taken.iter().position(|t| !t) {
        let e2 = iface2[k];
        let [a, b] = endpoints(mesh2, e2);
        return Err(Error::Pairing { mesh: 2, edge: e2, a, b });
    }
    segments.sort_by(|s, t| {
        let (p, q) = (s.points[0], t.points[0]);
        p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1]))
    });
    Ok(InterfacePairing { segments })
}
