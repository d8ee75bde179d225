//! Global degree-of-freedom numbering of a scalar finite element space.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use super::ElementKind;
use crate::mesh::{BoundaryTag, Mesh, Point};

/// Scalar finite element space on a mesh.
///
/// Continuous `P2` numbers the vertex dofs first (dof `v` for vertex `v`)
/// and then one dof per edge (`n_vertices + e`). Discontinuous spaces number
/// cell by cell.
#[derive(Debug)]
pub struct FeSpace {
    mesh: Arc<Mesh>,
    kind: ElementKind,
    n_dofs: usize,
    cell_dofs: Vec<usize>,
    sparsity: OnceLock<Sparsity>,
}

/// Compressed-row pattern of all cell matrices, with the position of every
/// local entry `(t, i, j)` at `cell_slots[(t * n + i) * n + j]`.
#[derive(Debug)]
pub struct Sparsity {
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub cell_slots: Vec<usize>,
}

impl FeSpace {
    pub fn new(mesh: Arc<Mesh>, kind: ElementKind) -> Arc<Self> {
        let nt = mesh.n_triangles();
        let nl = kind.n_local();
        let mut cell_dofs = Vec::with_capacity(nt * nl);
        let n_dofs = match kind {
            ElementKind::P1 => {
                mesh.triangles().iter().for_each(|t| cell_dofs.extend_from_slice(t));
                mesh.n_vertices()
            }
            ElementKind::P2 => {
                let nv = mesh.n_vertices();
                for (t, te) in mesh.triangles().iter().zip(mesh.triangle_edges()) {
                    cell_dofs.extend_from_slice(t);
                    cell_dofs.extend(te.iter().map(|e| nv + e));
                }
                nv + mesh.edges().len()
            }
            ElementKind::DiscP0 | ElementKind::DiscP1 => {
                cell_dofs.extend(0..nt * nl);
                nt * nl
            }
        };
        Arc::new(FeSpace {
            mesh,
            kind,
            n_dofs,
            cell_dofs,
            sparsity: OnceLock::new(),
        })
    }

    /// Pattern shared by every matrix assembled cell by cell on this space.
    pub fn sparsity(&self) -> &Sparsity {
        self.sparsity.get_or_init(|| {
            let n = self.kind.n_local();
            let mut entries: Vec<(usize, usize, usize)> = Vec::with_capacity(self.cell_dofs.len() * n);
            for t in 0..self.n_cells() {
                let dofs = self.cell_dofs(t);
                for (i, &di) in dofs.iter().enumerate() {
                    for (j, &dj) in dofs.iter().enumerate() {
                        entries.push((di, dj, (t * n + i) * n + j));
                    }
                }
            }
            entries.sort_unstable();
            let mut row_ptr = vec![0; self.n_dofs + 1];
            let mut col_idx = Vec::new();
            let mut cell_slots = vec![0; entries.len()];
            let mut last = None;
            for (i, j, k) in entries {
                if last != Some((i, j)) {
                    col_idx.push(j);
                    row_ptr[i + 1] += 1;
                    last = Some((i, j));
                }
                cell_slots[k] = col_idx.len() - 1;
            }
            for i in 0..self.n_dofs {
                row_ptr[i + 1] += row_ptr[i];
            }
            Sparsity {
                row_ptr,
                col_idx,
                cell_slots,
            }
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn n_cells(&self) -> usize {
        self.mesh.n_triangles()
    }

    pub fn cell_dofs(&self, t: usize) -> &[usize] {
        let n = self.kind.n_local();
        &self.cell_dofs[t * n..(t + 1) * n]
    }

    /// Coordinates of every nodal point (for discontinuous spaces a point may repeat).
    pub fn dof_points(&self) -> Vec<Point> {
        let mut pts = vec![[0.0; 2]; self.n_dofs];
        let nodes = self.kind.nodes();
        for t in 0..self.n_cells() {
            let g = self.mesh.geometry(t);
            for (&d, &node) in self.cell_dofs(t).iter().zip(&nodes) {
                pts[d] = g.map(node);
            }
        }
        pts
    }

    /// Dofs located on boundary edges with the given tag, sorted and unique.
    /// Empty for discontinuous spaces.
    pub fn boundary_dofs(&self, tag: BoundaryTag) -> Vec<usize> {
        if !self.kind.is_continuous() {
            return Vec::new();
        }
        let mut set = BTreeSet::new();
        for (_, be) in self.mesh.edges_with_tag(tag) {
            let dofs = self.cell_dofs(be.triangle);
            let k = be.local_edge;
            set.insert(dofs[k]);
            set.insert(dofs[(k + 1) % 3]);
            if self.kind == ElementKind::P2 {
                set.insert(dofs[3 + k]);
            }
        }
        set.into_iter().collect()
    }
}
