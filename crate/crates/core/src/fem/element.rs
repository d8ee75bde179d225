//! Lagrange reference elements expressed in barycentric coordinates.

use std::fmt;
use std::str::FromStr;

/// Local numbering of `P2`: nodes 0..3 are the vertices, node `3 + k` is the
/// midpoint of local edge `k`, which joins vertices `k` and `(k + 1) % 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementKind {
    P1,
    P2,
    DiscP0,
    DiscP1,
}

impl ElementKind {
    pub fn n_local(self) -> usize {
        match self {
            ElementKind::P1 | ElementKind::DiscP1 => 3,
            ElementKind::P2 => 6,
            ElementKind::DiscP0 => 1,
        }
    }

    pub fn degree(self) -> usize {
        match self {
            ElementKind::DiscP0 => 0,
            ElementKind::P1 | ElementKind::DiscP1 => 1,
            ElementKind::P2 => 2,
        }
    }

    pub fn is_continuous(self) -> bool {
        matches!(self, ElementKind::P1 | ElementKind::P2)
    }

    /// Barycentric coordinates of the local nodes.
    pub fn nodes(self) -> Vec<[f64; 3]> {
        match self {
            ElementKind::DiscP0 => vec![[1.0 / 3.0; 3]],
            ElementKind::P1 | ElementKind::DiscP1 => vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            ElementKind::P2 => vec![
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [0.5, 0.5, 0.0],
                [0.0, 0.5, 0.5],
                [0.5, 0.0, 0.5],
            ],
        }
    }

    /// Basis function values at `l`.
    pub fn values(self, l: [f64; 3], out: &mut [f64]) {
        match self {
            ElementKind::DiscP0 => out[0] = 1.0,
            ElementKind::P1 | ElementKind::DiscP1 => out[..3].copy_from_slice(&l),
            ElementKind::P2 => {
                for i in 0..3 {
                    out[i] = l[i] * (2.0 * l[i] - 1.0);
                    out[3 + i] = 4.0 * l[i] * l[(i + 1) % 3];
                }
            }
        }
    }

    /// Partial derivatives of every basis function with respect to the three
    /// barycentric coordinates (treated as independent variables).
    pub fn bary_derivatives(self, l: [f64; 3], out: &mut [[f64; 3]]) {
        match self {
            ElementKind::DiscP0 => out[0] = [0.0; 3],
            ElementKind::P1 | ElementKind::DiscP1 => {
                out[0] = [1.0, 0.0, 0.0];
                out[1] = [0.0, 1.0, 0.0];
                out[2] = [0.0, 0.0, 1.0];
            }
            ElementKind::P2 => {
                for i in 0..3 {
                    let mut d = [0.0; 3];
                    d[i] = 4.0 * l[i] - 1.0;
                    out[i] = d;
                    let j = (i + 1) % 3;
                    let mut d = [0.0; 3];
                    d[i] = 4.0 * l[j];
                    d[j] = 4.0 * l[i];
                    out[3 + i] = d;
                }
            }
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElementKind::P1 => "P1",
            ElementKind::P2 => "P2",
            ElementKind::DiscP0 => "P0-disc",
            ElementKind::DiscP1 => "P1-disc",
        })
    }
}

impl FromStr for ElementKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p1" => Ok(ElementKind::P1),
            "p2" => Ok(ElementKind::P2),
            "p0" | "p0-disc" | "dp0" => Ok(ElementKind::DiscP0),
            "p1-disc" | "dp1" => Ok(ElementKind::DiscP1),
            other => Err(format!("unknown element '{other}'")),
        }
    }
}

/// Basis values and barycentric derivatives tabulated at the points of a rule.
#[derive(Clone, Debug)]
pub struct Tabulation {
    pub kind: ElementKind,
    pub n_points: usize,
    pub values: Vec<f64>,
    pub derivatives: Vec<[f64; 3]>,
}

impl Tabulation {
    pub fn new(kind: ElementKind, points: &[[f64; 3]]) -> Self {
        let n = kind.n_local();
        let mut values = vec![0.0; n * points.len()];
        let mut derivatives = vec![[0.0; 3]; n * points.len()];
        for (q, &p) in points.iter().enumerate() {
            kind.values(p, &mut values[q * n..(q + 1) * n]);
            kind.bary_derivatives(p, &mut derivatives[q * n..(q + 1) * n]);
        }
        Tabulation {
            kind,
            n_points: points.len(),
            values,
            derivatives,
        }
    }

    pub fn values_at(&self, q: usize) -> &[f64] {
        let n = self.kind.n_local();
        &self.values[q * n..(q + 1) * n]
    }

    /// Physical gradients at point `q` given the barycentric gradients of a cell.
    pub fn gradients_at(&self, q: usize, grad_bary: &[[f64; 2]; 3], out: &mut [[f64; 2]]) {
        let n = self.kind.n_local();
        for (o, d) in out.iter_mut().zip(&self.derivatives[q * n..(q + 1) * n]) {
            *o = physical_gradient(d, grad_bary);
        }
    }
}

pub fn physical_gradient(d: &[f64; 3], grad_bary: &[[f64; 2]; 3]) -> [f64; 2] {
    [
        d[0] * grad_bary[0][0] + d[1] * grad_bary[1][0] + d[2] * grad_bary[2][0],
        d[0] * grad_bary[0][1] + d[1] * grad_bary[1][1] + d[2] * grad_bary[2][1],
    ]
}
