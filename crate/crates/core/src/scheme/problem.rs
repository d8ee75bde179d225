//! Data of a coupled flow problem: forcing, boundary values, initial fields.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fem::{FeField, FeSpace};
use crate::mesh::{BoundaryTag, Point};

/// Problem data for the two subdomains (0 = upper, 1 = lower).
pub trait Problem {
    fn name(&self) -> &str;

    /// Body force at time `t`.
    fn forcing(&self, domain: usize, t: f64, x: Point) -> [f64; 2];

    /// `true` if the forcing vanishes identically, which lets the stepper skip load assembly.
    fn is_unforced(&self) -> bool {
        false
    }

    /// Velocity prescribed on a Dirichlet boundary part, or `None` if the
    /// problem has no data there.
    fn boundary_velocity(&self, domain: usize, tag: BoundaryTag, t: f64, x: Point) -> Option<[f64; 2]>;

    /// Stacked velocity coefficients at the initial level `level` (0 or 1), time `t`.
    fn initial_velocity(&self, domain: usize, space: &Arc<FeSpace>, t: f64, level: usize) -> Vec<f64>;

    /// Pressure coefficients at level 1.
    fn initial_pressure(&self, _domain: usize, space: &Arc<FeSpace>, _t: f64) -> Vec<f64> {
        vec![0.0; space.n_dofs()]
    }
}

/// Interpolates a vector function into stacked coefficients.
pub fn interpolate_vector(space: &Arc<FeSpace>, f: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
    let mut v = FeField::interpolate(space.clone(), |p| f(p)[0]).values;
    v.extend(FeField::interpolate(space.clone(), |p| f(p)[1]).values);
    v
}

/// Channel flow past a cylinder above a basin at rest. The upper domain has
/// a parabolic profile of unit mean speed on inflow and outflow, no slip on
/// the walls and the cylinder, and starts from the same profile everywhere.
#[derive(Clone, Debug)]
pub struct ObstacleProblem {
    pub height: f64,
}

impl Default for ObstacleProblem {
    fn default() -> Self {
        ObstacleProblem { height: 1.0 }
    }
}

impl ObstacleProblem {
    pub fn profile(&self, y: f64) -> [f64; 2] {
        let s = y / self.height;
        [6.0 * s * (1.0 - s), 0.0]
    }
}

impl Problem for ObstacleProblem {
    fn name(&self) -> &str {
        "obstacle"
    }

    fn forcing(&self, _: usize, _: f64, _: Point) -> [f64; 2] {
        [0.0, 0.0]
    }

    fn is_unforced(&self) -> bool {
        true
    }

    fn boundary_velocity(&self, domain: usize, tag: BoundaryTag, _: f64, x: Point) -> Option<[f64; 2]> {
        match (domain, tag) {
            (_, BoundaryTag::Wall) => Some([0.0, 0.0]),
            (0, BoundaryTag::Inflow | BoundaryTag::Outflow) => Some(self.profile(x[1])),
            _ => None,
        }
    }

    fn initial_velocity(&self, domain: usize, space: &Arc<FeSpace>, _: f64, _: usize) -> Vec<f64> {
        if domain == 0 {
            interpolate_vector(space, |p| self.profile(p[1]))
        } else {
            vec![0.0; 2 * space.n_dofs()]
        }
    }
}

/// Unforced flow with homogeneous no-slip data started from seeded random
/// velocity coefficients; the energy can only decay.
#[derive(Clone, Debug)]
pub struct DecayProblem {
    pub seed: u64,
    pub amplitude: f64,
}

impl DecayProblem {
    pub fn new(seed: u64) -> Self {
        DecayProblem { seed, amplitude: 1.0 }
    }
}

impl Problem for DecayProblem {
    fn name(&self) -> &str {
        "decay"
    }

    fn forcing(&self, _: usize, _: f64, _: Point) -> [f64; 2] {
        [0.0, 0.0]
    }

    fn is_unforced(&self) -> bool {
        true
    }

    fn boundary_velocity(&self, _: usize, _: BoundaryTag, _: f64, _: Point) -> Option<[f64; 2]> {
        Some([0.0, 0.0])
    }

    fn initial_velocity(&self, domain: usize, space: &Arc<FeSpace>, _: f64, level: usize) -> Vec<f64> {
        let stream = self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((domain as u64) << 8 | level as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(stream);
        (0..2 * space.n_dofs())
            .map(|_| self.amplitude * rng.gen_range(-1.0..1.0))
            .collect()
    }
}
