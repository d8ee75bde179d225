//! Closed-form manufactured solution on the two unit squares and its forcing.
//!
//! With `A = a nu_1`, `B = a nu_1 / sqrt(kappa a)`, `g = x^2 (1-x)^2`,
//! `h = x (1-x)(2x-1)`, `q = x (1-x)`:
//!
//! ```text
//! upper:  u_x = A e^{-2t} g (1 + y)        + B e^{-t} q
//!         u_y = A e^{-2t} h y (2 + y)      + B e^{-t} y (2x - 1)
//! lower:  u_x = A e^{-2t} g (1 + c y),          c = nu_1 / nu_2
//!         u_y = A e^{-2t} h y (2 + c y)
//! ```
//!
//! The pressure vanishes and the forcing is `u_t + (u . grad) u - nu lap u`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fem::FeSpace;
use crate::mesh::{BoundaryTag, Point};
use crate::scheme::{Problem, Variant};

/// Parameters of the manufactured solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManufacturedParams {
    pub a: f64,
    pub nu: [f64; 2],
    pub kappa: f64,
}

impl ManufacturedParams {
    /// Moderate viscosities (`nu = 0.5, 0.1`, `a = 1`).
    pub const MODERATE: ManufacturedParams = ManufacturedParams {
        a: 1.0,
        nu: [0.5, 0.1],
        kappa: 1.0,
    };
    /// Small viscosities (`nu = 0.005, 0.001`, `a = 1 / nu_1`).
    pub const SMALL: ManufacturedParams = ManufacturedParams {
        a: 200.0,
        nu: [0.005, 0.001],
        kappa: 1.0,
    };
}

/// Numbered setups of the reference convergence tables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TablePreset {
    pub number: u8,
    pub params: ManufacturedParams,
    pub variant: Variant,
}

impl TablePreset {
    pub fn get(number: u8) -> Option<TablePreset> {
        let (params, variant) = match number {
            1 => (ManufacturedParams::MODERATE, Variant::Av),
            2 => (ManufacturedParams::MODERATE, Variant::Sav),
            3 => (ManufacturedParams::SMALL, Variant::Av),
            4 => (ManufacturedParams::SMALL, Variant::Sav),
            _ => return None,
        };
        Some(TablePreset { number, params, variant })
    }
}

/// Value and derivatives of the exact velocity at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactValues {
    pub u: [f64; 2],
    /// `grad[c][k] = d u_c / d x_k`.
    pub grad: [[f64; 2]; 2],
    pub dt: [f64; 2],
    pub laplacian: [f64; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManufacturedSolution {
    pub params: ManufacturedParams,
    /// Added to the x-component of the forcing; zero except in oracle self-tests.
    pub forcing_offset: f64,
}

impl ManufacturedSolution {
    pub fn new(params: ManufacturedParams) -> Self {
        ManufacturedSolution {
            params,
            forcing_offset: 0.0,
        }
    }

    /// Exact values in subdomain `domain` (0 = upper, 1 = lower).
    pub fn eval(&self, domain: usize, p: Point, t: f64) -> ExactValues {
        let ManufacturedParams { a, nu, kappa } = self.params;
        let (x, y) = (p[0], p[1]);
        let amp = a * nu[0];
        let e2 = amp * (-2.0 * t).exp();
        let e1 = if domain == 0 { nu[0] * (a / kappa).sqrt() * (-t).exp() } else { 0.0 };
        let c = if domain == 0 { 1.0 } else { nu[0] / nu[1] };

        let g = x * x * (1.0 - x) * (1.0 - x);
        let g1 = 2.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
        let g2 = 2.0 - 12.0 * x + 12.0 * x * x;
        let h = x * (1.0 - x) * (2.0 * x - 1.0);
        let h1 = -6.0 * x * x + 6.0 * x - 1.0;
        let h2 = -12.0 * x + 6.0;
        let q = x * (1.0 - x);
        let q1 = 1.0 - 2.0 * x;
        let q2 = -2.0;
        let s = 2.0 * x - 1.0;

        let (pp, pp1) = (1.0 + c * y, c);
        let (r, r1, r2) = (2.0 * y + c * y * y, 2.0 + 2.0 * c * y, 2.0 * c);

        let u = [e2 * g * pp + e1 * q, e2 * h * r + e1 * s * y];
        let grad = [
            [e2 * g1 * pp + e1 * q1, e2 * g * pp1],
            [e2 * h1 * r + e1 * 2.0 * y, e2 * h * r1 + e1 * s],
        ];
        let dt = [-2.0 * e2 * g * pp - e1 * q, -2.0 * e2 * h * r - e1 * s * y];
        let laplacian = [e2 * g2 * pp + e1 * q2, e2 * (h2 * r + h * r2)];
        ExactValues { u, grad, dt, laplacian }
    }

    pub fn velocity(&self, domain: usize, p: Point, t: f64) -> [f64; 2] {
        self.eval(domain, p, t).u
    }

    /// `u_t + (u . grad) u - nu lap u` (the pressure is zero).
    pub fn forcing(&self, domain: usize, p: Point, t: f64) -> [f64; 2] {
        let e = self.eval(domain, p, t);
        let nu = self.params.nu[domain];
        let f: [f64; 2] = std::array::from_fn(|c| {
            e.dt[c] + e.u[0] * e.grad[c][0] + e.u[1] * e.grad[c][1] - nu * e.laplacian[c]
        });
        [f[0] + self.forcing_offset, f[1]]
    }

    /// Momentum residual `u_t + (u . grad) u - nu lap u - f` with every
    /// derivative of the velocity taken by central differences of step `step`.
    pub fn fd_residual(&self, domain: usize, p: Point, t: f64, step: f64) -> [f64; 2] {
        let u = |x: f64, y: f64, t: f64| self.velocity(domain, [x, y], t);
        let (x, y) = (p[0], p[1]);
        let hs = step;
        let c = u(x, y, t);
        let (xp, xm) = (u(x + hs, y, t), u(x - hs, y, t));
        let (yp, ym) = (u(x, y + hs, t), u(x, y - hs, t));
        let (tp, tm) = (u(x, y, t + hs), u(x, y, t - hs));
        let f = self.forcing(domain, p, t);
        let nu = self.params.nu[domain];
        std::array::from_fn(|k| {
            let ut = (tp[k] - tm[k]) / (2.0 * hs);
            let ux = (xp[k] - xm[k]) / (2.0 * hs);
            let uy = (yp[k] - ym[k]) / (2.0 * hs);
            let lap = (xp[k] + xm[k] + yp[k] + ym[k] - 4.0 * c[k]) / (hs * hs);
            ut + c[0] * ux + c[1] * uy - nu * lap - f[k]
        })
    }
}

/// Largest finite-difference momentum residual over `n_points` random
/// points in both subdomains and times in `[0, 1]`.
pub fn verify_forcing(sol: &ManufacturedSolution, n_points: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for k in 0..n_points {
        let domain = k % 2;
        let x = rng.gen_range(0.0..1.0);
        let y = if domain == 0 { rng.gen_range(0.0..1.0) } else { rng.gen_range(-1.0..0.0) };
        let t = rng.gen_range(0.0..1.0);
        let r = sol.fd_residual(domain, [x, y], t, 1e-4);
        worst = worst.max(r[0].abs()).max(r[1].abs());
    }
    worst
}

/// The manufactured solution as a problem for the stepper.
#[derive(Clone, Debug)]
pub struct ManufacturedProblem {
    pub solution: ManufacturedSolution,
}

impl ManufacturedProblem {
    pub fn new(params: ManufacturedParams) -> Self {
        ManufacturedProblem {
            solution: ManufacturedSolution::new(params),
        }
    }
}

impl Problem for ManufacturedProblem {
    fn name(&self) -> &str {
        "manufactured"
    }

    fn forcing(&self, domain: usize, t: f64, x: Point) -> [f64; 2] {
        self.solution.forcing(domain, x, t)
    }

    fn boundary_velocity(&self, domain: usize, _: BoundaryTag, t: f64, x: Point) -> Option<[f64; 2]> {
        Some(self.solution.velocity(domain, x, t))
    }

    fn initial_velocity(&self, domain: usize, space: &Arc<FeSpace>, t: f64, _: usize) -> Vec<f64> {
        crate::scheme::interpolate_vector(space, |x| self.solution.velocity(domain, x, t))
    }
}
