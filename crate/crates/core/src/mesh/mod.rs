//! Triangular meshes of the two subdomains and the interface between them.

mod gmsh;
mod interface;
mod obstacle;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

pub use gmsh::{default_tag_table, export_gmsh, import_gmsh, TagTable};
pub use interface::{build_interface_pairing, InterfacePairing, InterfaceSegment, EDGE_QUADRATURE_POINTS};
pub use obstacle::{obstacle_meshes, ObstacleGeometry};

pub type Point = [f64; 2];

/// Coordinate tolerance used to classify generated boundary edges.
pub const GEOMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    Wall,
    Interface,
    Inflow,
    Outflow,
}

impl BoundaryTag {
    pub const ALL: [BoundaryTag; 4] = [
        BoundaryTag::Wall,
        BoundaryTag::Interface,
        BoundaryTag::Inflow,
        BoundaryTag::Outflow,
    ];

    /// Tags on which the full velocity vector is prescribed.
    pub fn is_dirichlet(self) -> bool {
        !matches!(self, BoundaryTag::Interface)
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::Wall => "wall",
            BoundaryTag::Interface => "interface",
            BoundaryTag::Inflow => "inflow",
            BoundaryTag::Outflow => "outflow",
        }
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundaryTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundaryTag::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown boundary tag '{s}'")))
    }
}

/// A boundary edge, oriented counterclockwise with respect to its triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub tag: BoundaryTag,
    pub triangle: usize,
    /// Local edge `k` joins local vertices `k` and `(k + 1) % 3`.
    pub local_edge: usize,
}

/// Affine geometry of one triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleGeometry {
    pub area: f64,
    /// Physical gradients of the three barycentric coordinates.
    pub grad_bary: [[f64; 2]; 3],
    pub vertices: [Point; 3],
}

impl TriangleGeometry {
    pub fn new(vertices: [Point; 3]) -> Self {
        let [p0, p1, p2] = vertices;
        let twice_area = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let inv = 1.0 / twice_area;
        let grad_bary = [
            [(p1[1] - p2[1]) * inv, (p2[0] - p1[0]) * inv],
            [(p2[1] - p0[1]) * inv, (p0[0] - p2[0]) * inv],
            [(p0[1] - p1[1]) * inv, (p1[0] - p0[0]) * inv],
        ];
        TriangleGeometry {
            area: 0.5 * twice_area,
            grad_bary,
            vertices,
        }
    }

    pub fn map(&self, bary: [f64; 3]) -> Point {
        let v = &self.vertices;
        [
            bary[0] * v[0][0] + bary[1] * v[1][0] + bary[2] * v[2][0],
            bary[0] * v[0][1] + bary[1] * v[1][1] + bary[2] * v[2][1],
        ]
    }

    pub fn barycentric(&self, p: Point) -> [f64; 3] {
        let v0 = self.vertices[0];
        let l1 = self.grad_bary[1][0] * (p[0] - v0[0]) + self.grad_bary[1][1] * (p[1] - v0[1]);
        let l2 = self.grad_bary[2][0] * (p[0] - v0[0]) + self.grad_bary[2][1] * (p[1] - v0[1]);
        [1.0 - l1 - l2, l1, l2]
    }
}

/// Conforming triangulation with counterclockwise triangles and tagged
/// boundary edges. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    triangle_edges: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
}

impl Mesh {
    /// Builds the edge topology and tags every boundary edge through `tagger`,
    /// which receives the two endpoint coordinates of the edge.
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        mut tagger: impl FnMut([usize; 2], [Point; 2]) -> BoundaryTag,
    ) -> Result<Mesh> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("mesh has no triangles".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidMesh(format!("triangle {t} references a missing vertex")));
            }
            let g = TriangleGeometry::new(tri.map(|v| vertices[v]));
            if !(g.area > 0.0) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} has non-positive signed area {}",
                    g.area
                )));
            }
        }

        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut owners: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0; 3];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = [a.min(b), a.max(b)];
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    owners.push(Vec::new());
                    edges.len() - 1
                });
                owners[e].push((t, k));
                te[k] = e;
            }
            triangle_edges.push(te);
        }

        let mut boundary_edges = Vec::new();
        for (e, own) in owners.iter().enumerate() {
            match own.as_slice() {
                [(t, k)] => {
                    let tri = triangles[*t];
                    let pair = [tri[*k], tri[(*k + 1) % 3]];
                    let tag = tagger(pair, pair.map(|v| vertices[v]));
                    boundary_edges.push(BoundaryEdge {
                        vertices: pair,
                        tag,
                        triangle: *t,
                        local_edge: *k,
                    });
                }
                [(t0, k0), (t1, k1)] => {
                    let a = triangles[*t0][*k0];
                    let b = triangles[*t1][*k1];
                    if a == b {
                        return Err(Error::InvalidMesh(format!(
                            "edge {:?} is traversed in the same direction by triangles {t0} and {t1}",
                            edges[e]
                        )));
                    }
                }
                _ => {
                    return Err(Error::InvalidMesh(format!(
                        "edge {:?} is shared by {} triangles",
                        edges[e],
                        own.len()
                    )))
                }
            }
        }
        // Deterministic order: by owning triangle, then local edge.
        boundary_edges.sort_by_key(|b| (b.triangle, b.local_edge));

        let mut used = vec![false; vertices.len()];
        for tri in &triangles {
            for &v in tri {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::InvalidMesh(format!("vertex {v} is not used by any triangle")));
        }

        let mesh = Mesh {
            vertices,
            triangles,
            edges,
            triangle_edges,
            boundary_edges,
        };
        let chi = mesh.euler_characteristic();
        let expected = 1 - mesh.hole_count() as i64;
        if chi != expected {
            return Err(Error::InvalidMesh(format!(
                "Euler relation violated: V - E + F = {chi}, expected {expected}"
            )));
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangle_edges(&self) -> &[[usize; 3]] {
        &self.triangle_edges
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn geometry(&self, t: usize) -> TriangleGeometry {
        TriangleGeometry::new(self.triangles[t].map(|v| self.vertices[v]))
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        self.geometry(t).area
    }

    pub fn area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.signed_area(t)).sum()
    }

    /// Largest edge length.
    pub fn max_edge_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|&[a, b]| dist(self.vertices[a], self.vertices[b]))
            .fold(0.0, f64::max)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Number of closed boundary loops.
    pub fn boundary_loop_count(&self) -> usize {
        let mut parent: HashMap<usize, usize> = HashMap::new();
        fn find(parent: &mut HashMap<usize, usize>, v: usize) -> usize {
            let p = *parent.entry(v).or_insert(v);
            if p == v {
                v
            } else {
                let r = find(parent, p);
                parent.insert(v, r);
                r
            }
        }
        for b in &self.boundary_edges {
            let ra = find(&mut parent, b.vertices[0]);
            let rb = find(&mut parent, b.vertices[1]);
            if ra != rb {
                parent.insert(ra, rb);
            }
        }
        let keys: Vec<usize> = parent.keys().copied().collect();
        let mut roots: Vec<usize> = keys.into_iter().map(|v| find(&mut parent, v)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    pub fn hole_count(&self) -> usize {
        self.boundary_loop_count().saturating_sub(1)
    }

    pub fn edges_with_tag(&self, tag: BoundaryTag) -> impl Iterator<Item = (usize, &BoundaryEdge)> {
        self.boundary_edges
            .iter()
            .enumerate()
            .filter(move |(_, b)| b.tag == tag)
    }

    /// Finds a triangle containing `p` and the barycentric coordinates of `p` in it.
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        let tol = 1e-12;
        (0..self.n_triangles()).find_map(|t| {
            let bary = self.geometry(t).barycentric(p);
            bary.iter().all(|&l| l >= -tol).then_some((t, bary))
        })
    }
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Tags edges lying on `y = 0` as interface, everything else as wall.
pub fn tag_by_interface_line(_: [usize; 2], p: [Point; 2]) -> BoundaryTag {
    if p[0][1].abs() < GEOMETRY_TOL && p[1][1].abs() < GEOMETRY_TOL {
        BoundaryTag::Interface
    } else {
        BoundaryTag::Wall
    }
}

/// Uniform `nx` x `ny` grid of the box `(xmin, xmax, ymin, ymax)`, every cell
/// split along its lower-left to upper-right diagonal. Boundary edges on
/// `y = 0` are tagged [`BoundaryTag::Interface`], all others [`BoundaryTag::Wall`].
pub fn generate_rect_mesh(nx: usize, ny: usize, bbox: (f64, f64, f64, f64)) -> Result<Mesh> {
    structured_rect(nx, ny, bbox, tag_by_interface_line)
}

pub(crate) fn structured_rect(
    nx: usize,
    ny: usize,
    bbox: (f64, f64, f64, f64),
    tagger: impl FnMut([usize; 2], [Point; 2]) -> BoundaryTag,
) -> Result<Mesh> {
    let (xmin, xmax, ymin, ymax) = bbox;
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidArgument(format!("grid counts must be positive, got {nx} x {ny}")));
    }
    if !(xmax > xmin && ymax > ymin) {
        return Err(Error::InvalidArgument(format!("degenerate bounding box {bbox:?}")));
    }
    let (vertices, triangles) = rect_grid(nx, ny, bbox);
    Mesh::new(vertices, triangles, tagger)
}

pub(crate) fn rect_grid(nx: usize, ny: usize, bbox: (f64, f64, f64, f64)) -> (Vec<Point>, Vec<[usize; 3]>) {
    let (xmin, xmax, ymin, ymax) = bbox;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        let y = ymin + (ymax - ymin) * j as f64 / ny as f64;
        for i in 0..=nx {
            let x = xmin + (xmax - xmin) * i as f64 / nx as f64;
            vertices.push([x, y]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v11, v01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    (vertices, triangles)
}

/// Splits every triangle into four congruent children. New vertices are the
/// edge midpoints, numbered `n_vertices + edge index`, so the refined vertex
/// set coincides with the nodes of a P2 space on the parent mesh.
pub fn refine_uniform(mesh: &Mesh) -> Result<Mesh> {
    let nv = mesh.n_vertices();
    let mut vertices = mesh.vertices.clone();
    for &[a, b] in &mesh.edges {
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
    }
    let mut triangles = Vec::with_capacity(4 * mesh.n_triangles());
    for (tri, te) in mesh.triangles.iter().zip(&mesh.triangle_edges) {
        let [a, b, c] = *tri;
        let (mab, mbc, mca) = (nv + te[0], nv + te[1], nv + te[2]);
        triangles.push([a, mab, mca]);
        triangles.push([mab, b, mbc]);
        triangles.push([mca, mbc, c]);
        triangles.push([mab, mbc, mca]);
    }
    let mut parent_tag: HashMap<[usize; 2], BoundaryTag> = HashMap::new();
    let edge_lookup: HashMap<[usize; 2], usize> =
        mesh.edges.iter().enumerate().map(|(e, &k)| (k, e)).collect();
    for b in &mesh.boundary_edges {
        let [a, c] = b.vertices;
        let m = nv + edge_lookup[&[a.min(c), a.max(c)]];
        parent_tag.insert([a.min(m), a.max(m)], b.tag);
        parent_tag.insert([c.min(m), c.max(m)], b.tag);
    }
    Mesh::new(vertices, triangles, |[a, b], _| {
        parent_tag
            .get(&[a.min(b), a.max(b)])
            .copied()
            .unwrap_or(BoundaryTag::Wall)
    })
}

/// Two subdomain meshes with their matched interface.
#[derive(Clone, Debug)]
pub struct CoupledMesh {
    pub mesh1: Mesh,
    pub mesh2: Mesh,
    pub pairing: InterfacePairing,
}

impl CoupledMesh {
    pub fn new(mesh1: Mesh, mesh2: Mesh) -> Result<Self> {
        let pairing = build_interface_pairing(&mesh1, &mesh2, 1e-10)?;
        Ok(CoupledMesh { mesh1, mesh2, pairing })
    }

    /// Unit squares above and below `y = 0` with `n` cells per side.
    pub fn unit_squares(n: usize) -> Result<Self> {
        let upper = generate_rect_mesh(n, n, (0.0, 1.0, 0.0, 1.0))?;
        let lower = generate_rect_mesh(n, n, (0.0, 1.0, -1.0, 0.0))?;
        Self::new(upper, lower)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> Mesh {
        generate_rect_mesh(n, n, (0.0, 1.0, 0.0, 1.0)).unwrap()
    }

    #[test]
    fn smallest_grid() {
        let m = unit(1);
        assert_eq!(m.n_vertices(), 4);
        assert_eq!(m.n_triangles(), 2);
        assert_eq!(m.boundary_edges().len(), 4);
        assert_eq!(m.edges().len(), 5);
    }

    #[test]
    fn counts_for_eight_by_eight() {
        let m = unit(8);
        assert_eq!(m.n_vertices(), 81);
        assert_eq!(m.n_triangles(), 128);
    }

    #[test]
    fn lower_square_has_eight_interface_edges() {
        let m = generate_rect_mesh(8, 8, (0.0, 1.0, -1.0, 0.0)).unwrap();
        let iface: Vec<_> = m.edges_with_tag(BoundaryTag::Interface).collect();
        assert_eq!(iface.len(), 8);
        for (_, e) in iface {
            for v in e.vertices {
                assert_eq!(m.vertices()[v][1], 0.0);
            }
        }
        assert_eq!(m.edges_with_tag(BoundaryTag::Wall).count(), 24);
    }

    #[test]
    fn bad_arguments_rejected() {
        assert!(generate_rect_mesh(0, 3, (0.0, 1.0, 0.0, 1.0)).is_err());
        assert!(generate_rect_mesh(2, 3, (1.0, 1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn refinement_counts_and_area() {
        let m = unit(1);
        let r = refine_uniform(&m).unwrap();
        assert_eq!(r.n_triangles(), 8);
        assert_eq!(r.n_vertices(), 9);
        let rr = refine_uniform(&r).unwrap();
        assert_eq!(rr.n_triangles(), 32);
        assert!((rr.area() - 1.0).abs() < 1e-14);
        assert!((0..rr.n_triangles()).all(|t| rr.signed_area(t) > 0.0));
    }

    #[test]
    fn refinement_inherits_tags() {
        let m = generate_rect_mesh(2, 2, (0.0, 1.0, -1.0, 0.0)).unwrap();
        let r = refine_uniform(&m).unwrap();
        assert_eq!(r.edges_with_tag(BoundaryTag::Interface).count(), 4);
        assert_eq!(r.edges_with_tag(BoundaryTag::Wall).count(), 12);
    }

    #[test]
    fn euler_relation_with_hole() {
        // Square annulus: outer square [0,3]^2 minus the middle cell.
        let (vertices, triangles) = rect_grid(3, 3, (0.0, 3.0, 0.0, 3.0));
        let triangles: Vec<_> = triangles
            .into_iter()
            .enumerate()
            .filter(|(t, _)| t / 2 != 4)
            .map(|(_, t)| t)
            .collect();
        let m = Mesh::new(vertices, triangles, |_, _| BoundaryTag::Wall).unwrap();
        assert_eq!(m.hole_count(), 1);
        assert_eq!(m.euler_characteristic(), 0);
    }

    #[test]
    fn clockwise_triangle_rejected() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(Mesh::new(v, vec![[0, 2, 1]], |_, _| BoundaryTag::Wall).is_err());
    }

    #[test]
    fn locate_finds_containing_triangle() {
        let m = unit(4);
        let (t, bary) = m.locate([0.3, 0.7]).unwrap();
        let p = m.geometry(t).map(bary);
        assert!((p[0] - 0.3).abs() < 1e-14 && (p[1] - 0.7).abs() < 1e-14);
        assert!(m.locate([1.5, 0.5]).is_none());
    }

    #[test]
    fn tag_parsing() {
        assert_eq!("Interface".parse::<BoundaryTag>().unwrap(), BoundaryTag::Interface);
        assert!("floor".parse::<BoundaryTag>().is_err());
    }
}
