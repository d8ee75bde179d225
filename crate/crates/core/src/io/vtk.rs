//! Legacy ASCII VTK export of P2 velocity and P1 pressure fields.
//!
//! Every triangle is split into four through its edge midpoints, so the
//! visualization mesh has one point per velocity dof and P2 values are
//! written without interpolation.

use std::fmt::Write;
use std::path::Path;

use super::csv::write_text;
use crate::fem::{evaluate, ElementKind, FeSpace};
use crate::{Error, Result};

/// Fields of one subdomain.
pub struct VtkPart<'a> {
    pub velocity_space: &'a FeSpace,
    /// Stacked `[u_x; u_y]`.
    pub velocity: &'a [f64],
    pub pressure_space: &'a FeSpace,
    pub pressure: &'a [f64],
}

/// Sub-triangles of a P2 cell in local node numbering.
const SPLIT: [[usize; 3]; 4] = [[0, 3, 5], [3, 1, 4], [5, 4, 2], [3, 4, 5]];

/// Renders all parts into one unstructured grid.
pub fn vtk_string(title: &str, parts: &[VtkPart<'_>]) -> Result<String> {
    let mut points = Vec::new();
    let mut cells = Vec::new();
    let mut velocity = Vec::new();
    let mut pressure = Vec::new();
    for part in parts {
        let vs = part.velocity_space;
        if vs.kind() != ElementKind::P2 {
            return Err(Error::InvalidArgument("velocity must be P2".into()));
        }
        let nd = vs.n_dofs();
        if part.velocity.len() != 2 * nd || part.pressure.len() != part.pressure_space.n_dofs() {
            return Err(Error::InvalidArgument("field length does not match its space".into()));
        }
        let offset = points.len();
        points.extend(vs.dof_points());
        velocity.extend((0..nd).map(|d| [part.velocity[d], part.velocity[nd + d]]));
        let mut p = vec![0.0; nd];
        let nodes = ElementKind::P2.nodes();
        for t in 0..vs.n_cells() {
            let dofs = vs.cell_dofs(t);
            for (&d, &node) in dofs.iter().zip(&nodes) {
                p[d] = evaluate(part.pressure_space, part.pressure, t, node);
            }
            for s in SPLIT {
                cells.push(s.map(|k| offset + dofs[k]));
            }
        }
        pressure.extend(p);
    }

    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", points.len());
    for p in &points {
        let _ = writeln!(s, "{:.12e} {:.12e} 0", p[0], p[1]);
    }
    let _ = writeln!(s, "CELLS {} {}", cells.len(), 4 * cells.len());
    for c in &cells {
        let _ = writeln!(s, "3 {} {} {}", c[0], c[1], c[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {}", cells.len());
    for _ in &cells {
        s.push_str("5\n");
    }
    let _ = writeln!(s, "POINT_DATA {}", points.len());
    s.push_str("VECTORS velocity double\n");
    for v in &velocity {
        let _ = writeln!(s, "{:.12e} {:.12e} 0", v[0], v[1]);
    }
    s.push_str("SCALARS pressure double 1\nLOOKUP_TABLE default\n");
    for p in &pressure {
        let _ = writeln!(s, "{p:.12e}");
    }
    s.push_str("SCALARS magnitude double 1\nLOOKUP_TABLE default\n");
    for v in &velocity {
        let _ = writeln!(s, "{:.12e}", v[0].hypot(v[1]));
    }
    Ok(s)
}

pub fn export_vtk(path: &Path, title: &str, parts: &[VtkPart<'_>]) -> Result<()> {
    write_text(path, &vtk_string(title, parts)?)
}
