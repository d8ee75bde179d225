//! Direct solution of the per-subdomain velocity-pressure systems.
//!
//! The assembled system for stacked unknowns `[u_x; u_y; p]` is
//!
//! ```text
//! [ A   0  -Bx^T ] [u_x]   [f_x]
//! [ 0   A  -By^T ] [u_y] = [f_y]
//! [ Bx  By   0   ] [ p ]   [ 0 ]
//! ```
//!
//! Constrained velocity rows become identity rows carrying the prescribed
//! value. One pressure row is replaced by `p_0 = 0` to remove the constant
//! mode, and the pressure is shifted to zero mean afterwards.

use faer::prelude::*;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::Mat;

use crate::fem::Constraints;
use crate::forms::SparseMatrix;
use crate::{Error, Result};

/// Relative residual bound `||Ax - b||_inf <= tol * ||b||_inf` every solve must meet.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// One velocity-pressure system.
pub struct SaddleSystem<'a> {
    /// Scalar velocity block, applied to both components.
    pub velocity: &'a SparseMatrix,
    /// Divergence blocks `(B_x, B_y)`, pressure rows by velocity columns.
    pub div: (&'a SparseMatrix, &'a SparseMatrix),
    /// Stacked velocity right-hand side.
    pub rhs: &'a [f64],
    /// Prescribed values on stacked velocity unknowns.
    pub constraints: &'a Constraints,
    /// `int psi_q dx` for every pressure basis function.
    pub pressure_weights: &'a [f64],
}

/// Solver statistics, useful for performance checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub symbolic_factorizations: usize,
    pub numeric_factorizations: usize,
    /// Solves done by GMRES preconditioned with an earlier factorization.
    pub preconditioned_solves: usize,
}

/// GMRES iterations allowed before an earlier factorization is considered stale.
const REUSE_ITERATIONS: usize = 25;
/// A solve needing more GMRES iterations than this schedules a refactorization.
const REFRESH_ITERATIONS: usize = 5;

/// Sparse LU solver that reuses its symbolic analysis while the sparsity
/// pattern of the assembled system stays the same. With reuse enabled, a
/// factorization of an earlier, nearby matrix preconditions GMRES and the
/// matrix is refactored only when GMRES stalls.
#[derive(Clone, Default)]
pub struct SaddleSolver {
    layout: Option<Layout>,
    lu: Option<Lu<usize, f64>>,
    reuse: bool,
    stats: SolverStats,
}

/// Compressed-column structure of one assembled system together with the
/// slot of every generated entry, so that refilling values needs no sort.
#[derive(Clone)]
struct Layout {
    coords: Vec<(usize, usize)>,
    slots: Vec<usize>,
    symbolic: SymbolicSparseColMat<usize>,
    lu: SymbolicLu<usize>,
}

impl Layout {
    fn new(size: usize, coords: Vec<(usize, usize)>) -> Result<Self> {
        let mut order: Vec<usize> = (0..coords.len()).collect();
        order.sort_unstable_by_key(|&k| (coords[k].1, coords[k].0));
        let mut slots = vec![0; coords.len()];
        let mut col_ptr = vec![0usize; size + 1];
        let mut row_idx = Vec::with_capacity(coords.len());
        let mut last = None;
        for &k in &order {
            let (i, j) = coords[k];
            if last != Some((i, j)) {
                row_idx.push(i);
                col_ptr[j + 1] += 1;
                last = Some((i, j));
            }
            slots[k] = row_idx.len() - 1;
        }
        for j in 0..size {
            col_ptr[j + 1] += col_ptr[j];
        }
        let symbolic = SymbolicSparseColMat::new_checked(size, size, col_ptr, None, row_idx);
        let lu = SymbolicLu::try_new(symbolic.as_ref()).map_err(|_| Error::SingularSystem)?;
        Ok(Layout {
            coords,
            slots,
            symbolic,
            lu,
        })
    }

    fn matrix(&self, values: &[f64]) -> SparseColMat<usize, f64> {
        let mut v = vec![0.0; self.symbolic.row_idx().len()];
        for (&s, x) in self.slots.iter().zip(values) {
            v[s] += x;
        }
        SparseColMat::new(self.symbolic.clone(), v)
    }
}

impl std::fmt::Debug for SaddleSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SaddleSolver").field("stats", &self.stats).finish()
    }
}

impl SaddleSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Solver that preconditions with stale factorizations when it can.
    pub fn with_reuse() -> Self {
        SaddleSolver {
            reuse: true,
            ..Self::default()
        }
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    /// Returns `(velocity, pressure)`, the pressure with zero mean.
    pub fn solve(&mut self, sys: &SaddleSystem<'_>) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = sys.velocity.nrows();
        let np = sys.div.0.nrows();
        let size = 2 * n + np;
        if sys.rhs.len() != 2 * n || sys.pressure_weights.len() != np {
            return Err(Error::InvalidArgument(format!(
                "saddle system sizes disagree: velocity block {n}, rhs {}, pressure {np}, weights {}",
                sys.rhs.len(),
                sys.pressure_weights.len()
            )));
        }
        let mask = sys.constraints.mask(2 * n);
        let capacity = 2 * sys.velocity.nnz() + 2 * (sys.div.0.nnz() + sys.div.1.nnz()) + sys.constraints.len() + 1;
        let mut coords = Vec::with_capacity(capacity);
        let mut values = Vec::with_capacity(capacity);
        let mut push = |i: usize, j: usize, v: f64| {
            coords.push((i, j));
            values.push(v);
        };
        for c in 0..2 {
            let off = c * n;
            for (i, j, v) in sys.velocity.iter() {
                if !mask[off + i] {
                    push(off + i, off + j, v);
                }
            }
        }
        let pin = 0;
        for (c, b) in [sys.div.0, sys.div.1].into_iter().enumerate() {
            let off = c * n;
            for (q, j, v) in b.iter() {
                if !mask[off + j] {
                    push(off + j, 2 * n + q, -v);
                }
                if q != pin {
                    push(2 * n + q, off + j, v);
                }
            }
        }
        let mut rhs = vec![0.0; size];
        rhs[..2 * n].copy_from_slice(sys.rhs);
        for (d, v) in sys.constraints.iter() {
            push(d, d, 1.0);
            rhs[d] = v;
        }
        push(2 * n + pin, 2 * n + pin, 1.0);
        rhs[2 * n + pin] = 0.0;

        let fresh = !matches!(&self.layout, Some(l) if l.coords == coords);
        if fresh {
            self.layout = Some(Layout::new(size, coords)?);
            self.lu = None;
            self.stats.symbolic_factorizations += 1;
        }
        let a = self.layout.as_ref().unwrap().matrix(&values);
        let x = self.factor_and_solve(&a, &rhs)?;
        let mut u = x[..2 * n].to_vec();
        sys.constraints.apply(&mut u);
        let mut p = x[2 * n..].to_vec();
        enforce_pressure_mean(&mut p, sys.pressure_weights);
        Ok((u, p))
    }

    fn factor_and_solve(&mut self, a: &SparseColMat<usize, f64>, rhs: &[f64]) -> Result<Vec<f64>> {
        let bnorm = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let b = Mat::<f64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        if self.reuse {
            if let Some(lu) = &self.lu {
                if let Some((x, iterations)) = gmres(a, lu, &b, bnorm) {
                    self.stats.preconditioned_solves += 1;
                    if iterations > REFRESH_ITERATIONS {
                        self.lu = None;
                    }
                    return Ok(x);
                }
            }
        }
        let symbolic = self.layout.as_ref().map(|l| l.lu.clone()).unwrap();
        let lu = Lu::try_new_with_symbolic(symbolic, a.as_ref()).map_err(|_| Error::SingularSystem)?;
        self.stats.numeric_factorizations += 1;

        let size = rhs.len();
        let mut x = lu.solve(&b);
        let (r, _) = residual(a, &b, &x);
        x += lu.solve(&r);
        let (_, rnorm) = residual(a, &b, &x);
        if self.reuse {
            self.lu = Some(lu);
        }
        if !(0..size).all(|i| x[(i, 0)].is_finite()) {
            return Err(Error::SingularSystem);
        }
        if rnorm > RESIDUAL_TOL * bnorm {
            return Err(Error::SolverAccuracy {
                residual: rnorm / bnorm.max(f64::MIN_POSITIVE),
                tolerance: RESIDUAL_TOL,
            });
        }
        Ok((0..size).map(|i| x[(i, 0)]).collect())
    }
}

fn residual(a: &SparseColMat<usize, f64>, b: &Mat<f64>, x: &Mat<f64>) -> (Mat<f64>, f64) {
    let ax = a * x;
    let r = b - ax;
    let norm = (0..r.nrows()).fold(0.0f64, |m, i| m.max(r[(i, 0)].abs()));
    (r, norm)
}

fn dot(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    (0..a.nrows()).map(|i| a[(i, 0)] * b[(i, 0)]).sum()
}

/// Right-preconditioned restarted GMRES. Returns the solution and the
/// iteration count, or `None` if the residual bound is not met within
/// [`REUSE_ITERATIONS`] iterations in total.
fn gmres(a: &SparseColMat<usize, f64>, lu: &Lu<usize, f64>, b: &Mat<f64>, bnorm: f64) -> Option<(Vec<f64>, usize)> {
    let n = b.nrows();
    let target = 0.1 * RESIDUAL_TOL * bnorm;
    let mut x = lu.solve(b);
    let mut budget = REUSE_ITERATIONS;
    loop {
        let (r, rmax) = residual(a, b, &x);
        if !rmax.is_finite() {
            return None;
        }
        if rmax <= RESIDUAL_TOL * bnorm {
            return Some(((0..n).map(|i| x[(i, 0)]).collect(), REUSE_ITERATIONS - budget));
        }
        if budget == 0 {
            return None;
        }
        let beta = dot(&r, &r).sqrt();
        let m = budget;
        let mut v: Vec<Mat<f64>> = vec![&r * faer::Scale(1.0 / beta)];
        let mut z: Vec<Mat<f64>> = Vec::with_capacity(m);
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut used = 0;
        for k in 0..m {
            used = k + 1;
            let zk = lu.solve(&v[k]);
            let mut w = a * &zk;
            z.push(zk);
            for (i, vi) in v.iter().enumerate() {
                h[i][k] = dot(&w, vi);
                w -= vi * faer::Scale(h[i][k]);
            }
            let wnorm = dot(&w, &w).sqrt();
            h[k + 1][k] = wnorm;
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let d = h[k][k].hypot(h[k + 1][k]);
            if d == 0.0 || !d.is_finite() {
                return None;
            }
            cs[k] = h[k][k] / d;
            sn[k] = h[k + 1][k] / d;
            h[k][k] = d;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            if g[k + 1].abs() <= target || wnorm == 0.0 {
                break;
            }
            v.push(&w * faer::Scale(1.0 / wnorm));
        }
        let mut y = vec![0.0; used];
        for i in (0..used).rev() {
            let s: f64 = (i + 1..used).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        for (zi, yi) in z.iter().zip(&y) {
            x += zi * faer::Scale(*yi);
        }
        budget -= used;
    }
}

/// One-shot solve without symbolic reuse.
pub fn solve_saddle(sys: &SaddleSystem<'_>) -> Result<(Vec<f64>, Vec<f64>)> {
    SaddleSolver::new().solve(sys)
}

/// Subtracts the area-weighted mean `sum w_q p_q / sum w_q`, where
/// `w_q = int psi_q dx` (exact for Lagrange pressure spaces).
pub fn enforce_pressure_mean(p: &mut [f64], weights: &[f64]) {
    let area: f64 = weights.iter().sum();
    let mean = p.iter().zip(weights).map(|(a, w)| a * w).sum::<f64>() / area;
    p.iter_mut().for_each(|v| *v -= mean);
}

/// `int p dx` given basis integrals of the pressure space.
pub fn pressure_mean(p: &[f64], weights: &[f64]) -> f64 {
    p.iter().zip(weights).map(|(a, w)| a * w).sum::<f64>() / weights.iter().sum::<f64>()
}
