//! Channel with a cylindrical obstacle above a porous-like lower basin.

use std::collections::HashMap;

use super::{rect_grid, BoundaryTag, Mesh, Point, GEOMETRY_TOL};
use crate::{Error, Result};

/// Layout of the obstacle benchmark. The upper domain is the channel
/// `[0, length] x [0, height]` minus a disk; the lower domain is
/// `[lower_x.0, lower_x.1] x [-lower_depth, 0]` and touches the channel
/// along `y = 0`, which is the interface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObstacleGeometry {
    pub length: f64,
    pub height: f64,
    pub center: Point,
    pub radius: f64,
    pub lower_x: (f64, f64),
    pub lower_depth: f64,
}

impl Default for ObstacleGeometry {
    fn default() -> Self {
        ObstacleGeometry {
            length: 6.0,
            height: 1.0,
            center: [1.0, 0.5],
            radius: 0.05,
            lower_x: (1.0, 5.0),
            lower_depth: 1.0,
        }
    }
}

impl ObstacleGeometry {
    pub fn tag_upper(&self, p: [Point; 2]) -> BoundaryTag {
        let on = |f: &dyn Fn(Point) -> bool| f(p[0]) && f(p[1]);
        let tol = 1e-9;
        if on(&|q| q[0].abs() < tol) {
            BoundaryTag::Inflow
        } else if on(&|q| (q[0] - self.length).abs() < tol) {
            BoundaryTag::Outflow
        } else if on(&|q| q[1].abs() < tol && q[0] >= self.lower_x.0 - tol && q[0] <= self.lower_x.1 + tol) {
            BoundaryTag::Interface
        } else {
            BoundaryTag::Wall
        }
    }

    pub fn tag_lower(&self, p: [Point; 2]) -> BoundaryTag {
        if p[0][1].abs() < GEOMETRY_TOL && p[1][1].abs() < GEOMETRY_TOL {
            BoundaryTag::Interface
        } else {
            BoundaryTag::Wall
        }
    }
}

/// Growth ratio `q` such that `first * (q^n - 1) / (q - 1) = total`.
fn geometric_ratio(first: f64, total: f64, n: usize) -> f64 {
    if first * n as f64 >= total {
        return 1.0;
    }
    let sum = |q: f64| first * (q.powi(n as i32) - 1.0) / (q - 1.0);
    let (mut lo, mut hi) = (1.0 + 1e-12, 2.0);
    while sum(hi) < total {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sum(mid) < total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

struct Builder {
    vertices: Vec<Point>,
    lookup: HashMap<(i64, i64), usize>,
    triangles: Vec<[usize; 3]>,
}

impl Builder {
    fn vertex(&mut self, p: Point) -> usize {
        let key = ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64);
        *self.lookup.entry(key).or_insert_with(|| {
            self.vertices.push(p);
            self.vertices.len() - 1
        })
    }

    fn triangle(&mut self, mut t: [usize; 3]) {
        let [a, b, c] = t.map(|v| self.vertices[v]);
        let area = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        if area < 0.0 {
            t.swap(1, 2);
        }
        self.triangles.push(t);
    }

    fn block(&mut self, nx: usize, ny: usize, bbox: (f64, f64, f64, f64)) {
        let (verts, tris) = rect_grid(nx, ny, bbox);
        let ids: Vec<usize> = verts.into_iter().map(|p| self.vertex(p)).collect();
        for t in tris {
            self.triangle(t.map(|v| ids[v]));
        }
    }
}

/// Meshes of the obstacle benchmark at resolution `m` (cells per unit
/// length; must be even and at least 2). Returns `(upper, lower)`.
///
/// The channel is assembled from a structured block left of the cylinder,
/// an O-grid around it filling a unit square, and a structured block to
/// the right. All blocks share node spacing `1/m` on their common edges and
/// along `y = 0`, so the interface is conforming.
pub fn obstacle_meshes(m: usize) -> Result<(Mesh, Mesh)> {
    let geo = ObstacleGeometry::default();
    if m < 2 || m % 2 != 0 {
        return Err(Error::InvalidArgument(format!("obstacle resolution must be even and >= 2, got {m}")));
    }
    let mut b = Builder {
        vertices: Vec::new(),
        lookup: HashMap::new(),
        triangles: Vec::new(),
    };
    let (cx, cy) = (geo.center[0], geo.center[1]);
    let half = 0.5 * geo.height;
    b.block(m / 2, m, (0.0, cx - half, 0.0, geo.height));
    b.block(9 * m / 2, m, (cx + half, geo.length, 0.0, geo.height));

    let n_around = 4 * m;
    let square_point = |s: usize| -> Point {
        let side = s / m;
        let t = (s % m) as f64 / m as f64;
        let (x0, x1, y0, y1) = (cx - half, cx + half, cy - half, cy + half);
        match side {
            0 => [x0 + t * (x1 - x0), y0],
            1 => [x1, y0 + t * (y1 - y0)],
            2 => [x1 - t * (x1 - x0), y1],
            _ => [x0, y1 - t * (y1 - y0)],
        }
    };
    let layers = m;
    let first = 2.0 * std::f64::consts::PI * geo.radius / n_around as f64;
    let q = geometric_ratio(first, half - geo.radius, layers);
    let mut rho = vec![0.0; layers + 1];
    for l in 1..=layers {
        rho[l] = rho[l - 1] + q.powi(l as i32 - 1);
    }
    let total = rho[layers];
    rho.iter_mut().for_each(|r| *r /= total);
    rho[layers] = 1.0;

    let mut ring: Vec<Vec<usize>> = Vec::with_capacity(n_around);
    for s in 0..n_around {
        let outer = square_point(s);
        let (dx, dy) = (outer[0] - cx, outer[1] - cy);
        let norm = dx.hypot(dy);
        let inner = [cx + geo.radius * dx / norm, cy + geo.radius * dy / norm];
        let column = rho
            .iter()
            .enumerate()
            .map(|(l, &r)| {
                if l == layers {
                    b.vertex(outer)
                } else {
                    b.vertex([inner[0] + r * (outer[0] - inner[0]), inner[1] + r * (outer[1] - inner[1])])
                }
            })
            .collect();
        ring.push(column);
    }
    for s in 0..n_around {
        let s1 = (s + 1) % n_around;
        for l in 0..layers {
            let (a, bb, c, d) = (ring[s][l], ring[s1][l], ring[s1][l + 1], ring[s][l + 1]);
            b.triangle([a, bb, c]);
            b.triangle([a, c, d]);
        }
    }

    let upper = Mesh::new(b.vertices, b.triangles, |_, p| geo.tag_upper(p))?;
    let lower_cells = ((geo.lower_x.1 - geo.lower_x.0) * m as f64).round() as usize;
    let depth_cells = (geo.lower_depth * m as f64).round() as usize;
    let (verts, tris) = rect_grid(
        lower_cells,
        depth_cells,
        (geo.lower_x.0, geo.lower_x.1, -geo.lower_depth, 0.0),
    );
    let lower = Mesh::new(verts, tris, |_, p| geo.tag_lower(p))?;
    Ok((upper, lower))
}
