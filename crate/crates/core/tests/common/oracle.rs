//! Dense reference assembly: Lagrange bases built from a physical-coordinate
//! Vandermonde system, polynomials kept as monomial coefficients, and a
//! collapsed Gauss rule written from scratch.

use std::sync::Arc;

use ffddc::fem::{ElementKind, FeSpace};
use ffddc::forms::{
    assemble_convection, assemble_correction_terms, assemble_div_coupling, assemble_interface_ga_rhs,
    assemble_interface_mass, assemble_load, assemble_mass, assemble_stiffness, assemble_subgrid_rhs,
    interface_traces, jump_magnitudes, project_gradient, CorrectionInputs, CorrectionTerms,
};
use ffddc::mesh::{tag_by_interface_line, CoupledMesh, Mesh, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;
const MAX_DEG: usize = 7;

#[derive(Clone, Copy)]
struct Poly([[f64; MAX_DEG]; MAX_DEG]);

impl Poly {
    fn zero() -> Self {
        Poly([[0.0; MAX_DEG]; MAX_DEG])
    }

    fn eval(&self, p: Point) -> f64 {
        let mut s = 0.0;
        for a in 0..MAX_DEG {
            for b in 0..MAX_DEG - a {
                s += self.0[a][b] * p[0].powi(a as i32) * p[1].powi(b as i32);
            }
        }
        s
    }

    fn dx(&self) -> Self {
        let mut r = Poly::zero();
        for a in 1..MAX_DEG {
            for b in 0..MAX_DEG - a {
                r.0[a - 1][b] = a as f64 * self.0[a][b];
            }
        }
        r
    }

    fn dy(&self) -> Self {
        let mut r = Poly::zero();
        for a in 0..MAX_DEG {
            for b in 1..MAX_DEG - a {
                r.0[a][b - 1] = b as f64 * self.0[a][b];
            }
        }
        r
    }
}

fn gauss_legendre_01(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            (0.5 * (1.0 - x), 0.5 * w)
        })
        .collect()
}

fn triangle_points(v: [Point; 3]) -> Vec<(Point, f64)> {
    let g = gauss_legendre_01(8);
    let jac = ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1])).abs();
    let mut out = Vec::new();
    for &(s, ws) in &g {
        for &(r, wr) in &g {
            let (xi, eta) = (s, r * (1.0 - s));
            let x = [
                v[0][0] + xi * (v[1][0] - v[0][0]) + eta * (v[2][0] - v[0][0]),
                v[0][1] + xi * (v[1][1] - v[0][1]) + eta * (v[2][1] - v[0][1]),
            ];
            out.push((x, ws * wr * (1.0 - s) * jac));
        }
    }
    out
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Local basis of one triangle and the global index of each local function.
struct Cell {
    vertices: [Point; 3],
    basis: Vec<Poly>,
    dofs: Vec<usize>,
}

fn lagrange_cells(mesh: &Mesh, degree: usize, space: &FeSpace) -> Vec<Cell> {
    let monomials: Vec<(usize, usize)> =
        (0..=degree).flat_map(|d| (0..=d).map(move |b| (d - b, b))).collect();
    let global = space.dof_points();
    mesh.triangles()
        .iter()
        .map(|tri| {
            let v = tri.map(|i| mesh.vertices()[i]);
            let mut nodes = v.to_vec();
            if degree == 2 {
                for k in 0..3 {
                    let (a, b) = (v[k], v[(k + 1) % 3]);
                    nodes.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
                }
            }
            let vander: Vec<Vec<f64>> = nodes
                .iter()
                .map(|p| monomials.iter().map(|&(a, b)| p[0].powi(a as i32) * p[1].powi(b as i32)).collect())
                .collect();
            let basis = (0..nodes.len())
                .map(|i| {
                    let mut e = vec![0.0; nodes.len()];
                    e[i] = 1.0;
                    let c = solve_dense(vander.clone(), e);
                    let mut p = Poly::zero();
                    for (&(a, b), ci) in monomials.iter().zip(c) {
                        p.0[a][b] = ci;
                    }
                    p
                })
                .collect();
            let dofs = nodes
                .iter()
                .map(|p| {
                    global
                        .iter()
                        .position(|g| (g[0] - p[0]).abs() < 1e-12 && (g[1] - p[1]).abs() < 1e-12)
                        .expect("node without a global dof")
                })
                .collect();
            Cell { vertices: v, basis, dofs }
        })
        .collect()
}

struct Oracle {
    vel: Arc<FeSpace>,
    pres: Arc<FeSpace>,
    cells: Vec<Cell>,
    pcells: Vec<Cell>,
}

impl Oracle {
    fn new(mesh: &Mesh) -> Self {
        let m = Arc::new(mesh.clone());
        let vel = FeSpace::new(m.clone(), ElementKind::P2);
        let pres = FeSpace::new(m, ElementKind::P1);
        let cells = lagrange_cells(mesh, 2, &vel);
        let pcells = lagrange_cells(mesh, 1, &pres);
        Oracle { vel, pres, cells, pcells }
    }

    fn nd(&self) -> usize {
        self.vel.n_dofs()
    }

    fn value(&self, cell: &Cell, u: &[f64], p: Point) -> [f64; 2] {
        let nd = self.nd();
        let mut v = [0.0; 2];
        for (b, &d) in cell.basis.iter().zip(&cell.dofs) {
            let phi = b.eval(p);
            v[0] += u[d] * phi;
            v[1] += u[nd + d] * phi;
        }
        v
    }

    fn grad(&self, cell: &Cell, u: &[f64], p: Point) -> [[f64; 2]; 2] {
        let nd = self.nd();
        let mut g = [[0.0; 2]; 2];
        for (b, &d) in cell.basis.iter().zip(&cell.dofs) {
            let gb = [b.dx().eval(p), b.dy().eval(p)];
            for c in 0..2 {
                g[0][c] += u[d] * gb[c];
                g[1][c] += u[nd + d] * gb[c];
            }
        }
        g
    }

    /// Dense scalar matrix from a local integrand `(phi_i, phi_j, x) -> value`.
    fn scalar_matrix(&self, f: impl Fn(&Cell, &Poly, &Poly, Point) -> f64) -> Vec<Vec<f64>> {
        let nd = self.nd();
        let mut m = vec![vec![0.0; nd]; nd];
        for cell in &self.cells {
            for (x, w) in triangle_points(cell.vertices) {
                for (bi, &di) in cell.basis.iter().zip(&cell.dofs) {
                    for (bj, &dj) in cell.basis.iter().zip(&cell.dofs) {
                        m[di][dj] += w * f(cell, bi, bj, x);
                    }
                }
            }
        }
        m
    }

    /// Stacked load from a local integrand `(phi_i, x) -> [component x, component y]`.
    fn load(&self, f: impl Fn(&Cell, &Poly, Point) -> [f64; 2]) -> Vec<f64> {
        let nd = self.nd();
        let mut out = vec![0.0; 2 * nd];
        for cell in &self.cells {
            for (x, w) in triangle_points(cell.vertices) {
                for (b, &d) in cell.basis.iter().zip(&cell.dofs) {
                    let v = f(cell, b, x);
                    out[d] += w * v[0];
                    out[nd + d] += w * v[1];
                }
            }
        }
        out
    }

    /// Cells with an edge on `y = 0` together with that edge.
    fn interface_edges(&self) -> Vec<(usize, [Point; 2])> {
        let mut out = Vec::new();
        for (t, c) in self.cells.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (c.vertices[k], c.vertices[(k + 1) % 3]);
                if a[1].abs() < 1e-14 && b[1].abs() < 1e-14 {
                    let (a, b) = if a[0] < b[0] { (a, b) } else { (b, a) };
                    out.push((t, [a, b]));
                }
            }
        }
        out
    }
}

struct Pair {
    up: Oracle,
    low: Oracle,
    coupled: CoupledMesh,
}

impl Pair {
    fn side(&self, s: usize) -> &Oracle {
        if s == 0 {
            &self.up
        } else {
            &self.low
        }
    }

    /// Interface points `(x, weight, own cell, other cell)` on a 4-point Gauss rule per edge.
    fn interface_points(&self, side: usize) -> Vec<(Point, f64, usize, usize)> {
        let (own, other) = (self.side(side), self.side(1 - side));
        let other_edges = other.interface_edges();
        let g = gauss_legendre_01(4);
        let mut out = Vec::new();
        for (t, [a, b]) in own.interface_edges() {
            let (s, _) = other_edges
                .iter()
                .find(|(_, e)| (e[0][0] - a[0]).abs() < 1e-12 && (e[1][0] - b[0]).abs() < 1e-12)
                .expect("unmatched interface edge");
            let len = b[0] - a[0];
            for &(r, w) in &g {
                out.push(([a[0] + r * len, 0.0], w * len, t, *s));
            }
        }
        out
    }

    /// Stacked interface load `int_I g(x, own cell, other cell) . phi ds`.
    fn interface_load(&self, side: usize, g: impl Fn(Point, usize, usize) -> [f64; 2]) -> Vec<f64> {
        let own = self.side(side);
        let nd = own.nd();
        let mut out = vec![0.0; 2 * nd];
        for (x, w, t, s) in self.interface_points(side) {
            let gv = g(x, t, s);
            let cell = &own.cells[t];
            for (b, &d) in cell.basis.iter().zip(&cell.dofs) {
                let phi = b.eval(x);
                out[d] += w * gv[0] * phi;
                out[nd + d] += w * gv[1] * phi;
            }
        }
        out
    }

    fn jump(&self, side: usize, u: [&[f64]; 2], x: Point, t: usize, s: usize) -> f64 {
        let (own, other) = (self.side(side), self.side(1 - side));
        let a = own.value(&own.cells[t], u[side], x);
        let b = other.value(&other.cells[s], u[1 - side], x);
        (a[0] - b[0]).hypot(a[1] - b[1])
    }
}

fn meshes() -> Vec<(Mesh, Mesh)> {
    let upper = Mesh::new(
        vec![[0.0, 0.0], [0.45, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        vec![[0, 1, 4], [1, 3, 4], [1, 2, 3]],
        tag_by_interface_line,
    )
    .unwrap();
    let lower = Mesh::new(
        vec![[0.0, 0.0], [0.45, 0.0], [1.0, 0.0], [1.0, -1.0], [0.0, -1.0]],
        vec![[0, 4, 1], [1, 4, 3], [1, 3, 2]],
        tag_by_interface_line,
    )
    .unwrap();
    let skew_up = Mesh::new(
        vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.4, 0.55]],
        vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]],
        tag_by_interface_line,
    )
    .unwrap();
    let single_low = Mesh::new(
        vec![[0.0, 0.0], [1.0, 0.0], [0.3, -0.8]],
        vec![[0, 2, 1]],
        tag_by_interface_line,
    )
    .unwrap();
    vec![(upper, lower), (skew_up, single_low)]
}

fn pairs() -> Vec<Pair> {
    meshes()
        .into_iter()
        .map(|(a, b)| Pair {
            up: Oracle::new(&a),
            low: Oracle::new(&b),
            coupled: CoupledMesh::new(a, b).unwrap(),
        })
        .collect()
}

fn random(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn assert_dense(sparse: &ffddc::forms::SparseMatrix, dense: &[Vec<f64>], what: &str) {
    for (i, row) in dense.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let got = sparse.get(i, j);
            assert!((got - v).abs() < TOL, "{what} ({i},{j}): {got} vs {v}");
        }
    }
}

fn assert_vec(got: &[f64], want: &[f64], what: &str) {
    assert_eq!(got.len(), want.len(), "{what}");
    for (i, (a, b)) in got.iter().zip(want).enumerate() {
        assert!((a - b).abs() < TOL, "{what} [{i}]: {a} vs {b}");
    }
}

pub fn mass_and_stiffness() {
    for pair in pairs() {
        for o in [&pair.up, &pair.low] {
            let m = o.scalar_matrix(|_, a, b, x| a.eval(x) * b.eval(x));
            assert_dense(&assemble_mass(&o.vel), &m, "mass");
            let k = o.scalar_matrix(|_, a, b, x| 0.7 * (a.dx().eval(x) * b.dx().eval(x) + a.dy().eval(x) * b.dy().eval(x)));
            assert_dense(&assemble_stiffness(&o.vel, 0.7), &k, "stiffness");
        }
    }
}

pub fn skew_convection() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for pair in pairs() {
        for o in [&pair.up, &pair.low] {
            let w = random(&mut rng, 2 * o.nd());
            let n = o.scalar_matrix(|cell, zi, phj, x| {
                let wq = o.value(cell, &w, x);
                let adv_j = wq[0] * phj.dx().eval(x) + wq[1] * phj.dy().eval(x);
                let adv_i = wq[0] * zi.dx().eval(x) + wq[1] * zi.dy().eval(x);
                0.5 * (adv_j * zi.eval(x) - adv_i * phj.eval(x))
            });
            assert_dense(&assemble_convection(&o.vel, &w), &n, "convection");
        }
    }
}

pub fn divergence_coupling() {
    for pair in pairs() {
        for o in [&pair.up, &pair.low] {
            let (bx, by) = assemble_div_coupling(&o.vel, &o.pres);
            let (np, nd) = (o.pres.n_dofs(), o.nd());
            let mut dx = vec![vec![0.0; nd]; np];
            let mut dy = vec![vec![0.0; nd]; np];
            for (cell, pcell) in o.cells.iter().zip(&o.pcells) {
                for (x, w) in triangle_points(cell.vertices) {
                    for (psi, &a) in pcell.basis.iter().zip(&pcell.dofs) {
                        for (phi, &j) in cell.basis.iter().zip(&cell.dofs) {
                            dx[a][j] += w * psi.eval(x) * phi.dx().eval(x);
                            dy[a][j] += w * psi.eval(x) * phi.dy().eval(x);
                        }
                    }
                }
            }
            assert_dense(&bx, &dx, "B_x");
            assert_dense(&by, &dy, "B_y");
        }
    }
}

pub fn polynomial_load() {
    let f = |x: Point| [x[0] * x[0] - 2.0 * x[1], x[0] * x[1] + 0.5];
    for pair in pairs() {
        for o in [&pair.up, &pair.low] {
            let want = o.load(|_, b, x| {
                let (fv, phi) = (f(x), b.eval(x));
                [fv[0] * phi, fv[1] * phi]
            });
            assert_vec(&assemble_load(&o.vel, f), &want, "load");
        }
    }
}

pub fn gradient_projection_and_subgrid_load() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for pair in pairs() {
        for o in [&pair.up, &pair.low] {
            let u = random(&mut rng, 2 * o.nd());
            let p1 = FeSpace::new(o.vel.mesh().clone(), ElementKind::DiscP1);
            let g1 = project_gradient(&o.vel, &u, p1);
            let want = o.load(|cell, b, x| {
                let g = o.grad(cell, &u, x);
                let gb = [b.dx().eval(x), b.dy().eval(x)];
                [0.3 * (g[0][0] * gb[0] + g[0][1] * gb[1]), 0.3 * (g[1][0] * gb[0] + g[1][1] * gb[1])]
            });
            assert_vec(&assemble_subgrid_rhs(&g1, 0.3, &o.vel), &want, "subgrid load, P1 projection");

            let p0 = FeSpace::new(o.vel.mesh().clone(), ElementKind::DiscP0);
            let g0 = project_gradient(&o.vel, &u, p0.clone());
            for (t, cell) in o.cells.iter().enumerate() {
                let mut mean = [0.0; 4];
                let mut area = 0.0;
                for (x, w) in triangle_points(cell.vertices) {
                    let g = o.grad(cell, &u, x);
                    let flat = [g[0][0], g[0][1], g[1][0], g[1][1]];
                    for c in 0..4 {
                        mean[c] += w * flat[c];
                    }
                    area += w;
                }
                let d = p0.cell_dofs(t)[0];
                for c in 0..4 {
                    assert!((g0.components[c][d] - mean[c] / area).abs() < TOL, "P0 projection");
                }
            }
        }
    }
}

pub fn interface_mass_and_geometric_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for pair in pairs() {
        let u = [random(&mut rng, 2 * pair.up.nd()), random(&mut rng, 2 * pair.low.nd())];
        let w = [random(&mut rng, 2 * pair.up.nd()), random(&mut rng, 2 * pair.low.nd())];
        for side in 0..2 {
            let pairing = if side == 0 {
                pair.coupled.pairing.clone()
            } else {
                pair.coupled.pairing.transposed()
            };
            let o = pair.side(side);
            let other = pair.side(1 - side);
            let own_tr = |v: &[f64]| interface_traces(&o.vel, v, &pairing, 0);
            let oth_tr = |v: &[f64]| interface_traces(&other.vel, v, &pairing, 1);
            let ju = jump_magnitudes(&own_tr(&u[side]), &oth_tr(&u[1 - side]));
            let jw = jump_magnitudes(&own_tr(&w[side]), &oth_tr(&w[1 - side]));

            let k = assemble_interface_mass(&o.vel, &pairing, 0, &ju, 1.7);
            let nd = o.nd();
            let mut dense = vec![vec![0.0; nd]; nd];
            for (x, wq, t, s) in pair.interface_points(side) {
                let j = pair.jump(side, [&u[0], &u[1]], x, t, s);
                let cell = &o.cells[t];
                for (bi, &di) in cell.basis.iter().zip(&cell.dofs) {
                    for (bj, &dj) in cell.basis.iter().zip(&cell.dofs) {
                        dense[di][dj] += 1.7 * wq * j * bi.eval(x) * bj.eval(x);
                    }
                }
            }
            assert_dense(&k, &dense, "interface mass");

            let ga = assemble_interface_ga_rhs(&o.vel, &pairing, 0, &oth_tr(&u[1 - side]), &ju, &jw, 1.7);
            let want = pair.interface_load(side, |x, t, s| {
                let (a, b) = (pair.jump(side, [&u[0], &u[1]], x, t, s), pair.jump(side, [&w[0], &w[1]], x, t, s));
                let uj = other.value(&other.cells[s], &u[1 - side], x);
                let c = 1.7 * a.sqrt() * b.sqrt();
                [c * uj[0], c * uj[1]]
            });
            assert_vec(&ga, &want, "geometric-average load");
        }
    }
}

pub fn correction_terms_term_by_term() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let (nu, nu_t, kappa) = (0.4, 0.15, 1.3);
    let f_new = |x: Point| [x[0] * x[1] + 1.0, x[0] - x[1] * x[1]];
    let f_old = |x: Point| [2.0 * x[1], x[0] * x[0] - 0.5];
    for pair in pairs() {
        let nds = [pair.up.nd(), pair.low.nd()];
        // Levels n+1, n, n-1 on both sides.
        let u: Vec<[Vec<f64>; 2]> = (0..3).map(|_| nds.map(|n| random(&mut rng, 2 * n))).collect();
        for side in 0..2 {
            let pairing = if side == 0 {
                pair.coupled.pairing.clone()
            } else {
                pair.coupled.pairing.transposed()
            };
            let o = pair.side(side);
            let other = pair.side(1 - side);
            let p_new = random(&mut rng, o.pres.n_dofs());
            let p_old = random(&mut rng, o.pres.n_dofs());
            let own_tr = |v: &[f64]| interface_traces(&o.vel, v, &pairing, 0);
            let oth_tr = |v: &[f64]| interface_traces(&other.vel, v, &pairing, 1);
            let jumps: Vec<Vec<f64>> =
                u.iter().map(|lv| jump_magnitudes(&own_tr(&lv[side]), &oth_tr(&lv[1 - side]))).collect();
            let (other_new, other_old) = (oth_tr(&u[0][1 - side]), oth_tr(&u[1][1 - side]));
            let load_new = assemble_load(&o.vel, f_new);
            let load_old = assemble_load(&o.vel, f_old);
            let stiffness = assemble_stiffness(&o.vel, 1.0);
            let div = assemble_div_coupling(&o.vel, &o.pres);
            let terms = assemble_correction_terms(&CorrectionInputs {
                space: &o.vel,
                pairing: &pairing,
                side: 0,
                nu,
                nu_t,
                kappa,
                load_new: &load_new,
                load_old: &load_old,
                stiffness: &stiffness,
                div: (&div.0, &div.1),
                u_new: &u[0][side],
                u_old: &u[1][side],
                p_new: &p_new,
                p_old: &p_old,
                other_new: &other_new,
                other_old: &other_old,
                jump_new: &jumps[0],
                jump_old: &jumps[1],
                jump_older: &jumps[2],
            });

            let (un, uo) = (&u[0][side], &u[1][side]);
            let grad_pair = |cell: &Cell, b: &Poly, x: Point, v: &[f64], c: f64| {
                let g = o.grad(cell, v, x);
                let gb = [b.dx().eval(x), b.dy().eval(x)];
                [c * (g[0][0] * gb[0] + g[0][1] * gb[1]), c * (g[1][0] * gb[0] + g[1][1] * gb[1])]
            };
            let du: Vec<f64> = un.iter().zip(uo.iter()).map(|(a, b)| a - b).collect();
            let su: Vec<f64> = un.iter().zip(uo.iter()).map(|(a, b)| a + b).collect();
            let jump = |lvl: usize, x: Point, t: usize, s: usize| {
                pair.jump(side, [&u[lvl][0], &u[lvl][1]], x, t, s)
            };
            let own = |v: &[f64], x: Point, t: usize| o.value(&o.cells[t], v, x);
            let oth = |v: &[f64], x: Point, s: usize| other.value(&other.cells[s], v, x);
            let sc = |c: f64, v: [f64; 2]| [c * v[0], c * v[1]];
            let conv = |cell: &Cell, b: &Poly, x: Point, w: &[f64]| {
                let (wq, g) = (o.value(cell, w, x), o.grad(cell, w, x));
                let (phi, gb) = (b.eval(x), [b.dx().eval(x), b.dy().eval(x)]);
                let adv_phi = wq[0] * gb[0] + wq[1] * gb[1];
                std::array::from_fn::<f64, 2, _>(|c| {
                    0.5 * ((wq[0] * g[c][0] + wq[1] * g[c][1]) * phi - adv_phi * wq[c])
                })
            };
            let dp: Vec<f64> = p_new.iter().zip(&p_old).map(|(a, b)| a - b).collect();

            let want: [Vec<f64>; 10] = [
                o.load(|_, b, x| {
                    let (a, c) = (f_new(x), f_old(x));
                    sc(0.5 * b.eval(x), [a[0] + c[0], a[1] + c[1]])
                }),
                o.load(|cell, b, x| grad_pair(cell, b, x, &du, 0.5 * (nu + nu_t))),
                o.load(|cell, b, x| grad_pair(cell, b, x, &su, 0.5 * nu_t)),
                pair.interface_load(side, |x, t, s| sc(-0.5 * kappa * (jump(0, x, t, s) - jump(1, x, t, s)), own(un, x, t))),
                pair.interface_load(side, |x, t, s| {
                    let (a, b) = (own(un, x, t), own(uo, x, t));
                    sc(0.5 * kappa * jump(1, x, t, s), [a[0] - b[0], a[1] - b[1]])
                }),
                pair.interface_load(side, |x, t, s| {
                    sc(-kappa * (jump(1, x, t, s) * jump(2, x, t, s)).sqrt(), oth(&u[1][1 - side], x, s))
                }),
                pair.interface_load(side, |x, t, s| sc(0.5 * kappa * jump(0, x, t, s), oth(&u[0][1 - side], x, s))),
                pair.interface_load(side, |x, t, s| sc(0.5 * kappa * jump(1, x, t, s), oth(&u[1][1 - side], x, s))),
                o.load(|cell, b, x| {
                    let (a, c) = (conv(cell, b, x, un), conv(cell, b, x, uo));
                    sc(0.5, [a[0] - c[0], a[1] - c[1]])
                }),
                {
                    let mut out = vec![0.0; 2 * o.nd()];
                    for (cell, pcell) in o.cells.iter().zip(&o.pcells) {
                        for (x, w) in triangle_points(cell.vertices) {
                            let q: f64 = pcell.basis.iter().zip(&pcell.dofs).map(|(p, &d)| dp[d] * p.eval(x)).sum();
                            for (b, &d) in cell.basis.iter().zip(&cell.dofs) {
                                out[d] -= 0.5 * w * q * b.dx().eval(x);
                                out[o.nd() + d] -= 0.5 * w * q * b.dy().eval(x);
                            }
                        }
                    }
                    out
                },
            ];
            for (k, name) in CorrectionTerms::NAMES.iter().enumerate() {
                assert_vec(&terms.terms[k], &want[k], name);
            }
        }
    }
}
