//! Discrete energy bookkeeping of the defect step for unforced problems.
//!
//! With `E^n = sum_i ||u_i^n||^2 + dt nu_T,i ||grad u_i^n||^2
//! + kappa dt int_I |[u^{n-1}]| (|u_1^n|^2 + |u_2^n|^2)`, testing the defect
//! equations with `2 dt u^{n+1}` gives, for homogeneous data,
//!
//! ```text
//! E^{n+1} - E^n + sum_i ||u_i^{n+1} - u_i^n||^2 + 2 dt sum_i nu_i ||grad u_i^{n+1}||^2
//!   + dt sum_i nu_T,i (||grad u_i^{n+1} - G_i^n||^2 + ||grad u_i^n - G_i^n||^2)
//!   + kappa dt sum_i int_I | |[u^n]|^{1/2} u_i^{n+1} - |[u^{n-1}]|^{1/2} u_j^n |^2 = 0.
//! ```
//!
//! The stability bound keeps only part of the dissipation, so its left side
//! never exceeds `E^1`.

use super::{CoupledDiscretization, DefectResult, SchemeConfig, StepperState};
use crate::forms::{block_mul, gradient_deviation_sq, interface_traces, interface_weights, jump_magnitudes};

/// Stability bookkeeping after one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityReport {
    pub step: usize,
    /// Left side of the stability bound up to the new level.
    pub lhs: f64,
    /// Right side (initial-data bound).
    pub rhs: f64,
    /// Energy `E^{n+1}`.
    pub energy: f64,
    /// Residual of the one-step energy identity, relative to `E^n`.
    pub identity_residual: f64,
}

impl StabilityReport {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }

    /// `lhs <= rhs` up to a relative tolerance.
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + rel_tol) + rel_tol * f64::MIN_POSITIVE
    }
}

/// Accumulates the dissipation sums of the stability bound over a run.
#[derive(Clone, Debug)]
pub struct EnergyMonitor {
    rhs: f64,
    dissipation: f64,
    energy: f64,
    pub reports: Vec<StabilityReport>,
}

fn sq_norms(disc: &CoupledDiscretization, u: [&[f64]; 2]) -> ([f64; 2], [f64; 2]) {
    let mut l2 = [0.0; 2];
    let mut h1 = [0.0; 2];
    for i in 0..2 {
        let d = &disc.domains[i];
        l2[i] = dot(u[i], &block_mul(&d.mass, u[i]));
        h1[i] = dot(u[i], &block_mul(&d.stiffness, u[i]));
    }
    (l2, h1)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn traces(disc: &CoupledDiscretization, u: [&[f64]; 2]) -> [Vec<[f64; 2]>; 2] {
    [0, 1].map(|i| interface_traces(&disc.domains[i].velocity, u[i], &disc.pairing, i))
}

fn energy(disc: &CoupledDiscretization, cfg: &SchemeConfig, u: [&[f64]; 2], u_prev: [&[f64]; 2]) -> f64 {
    let (l2, h1) = sq_norms(disc, u);
    let w = interface_weights(&disc.pairing);
    let tp = traces(disc, u_prev);
    let jump = jump_magnitudes(&tp[0], &tp[1]);
    let t = traces(disc, u);
    let iface: f64 = (0..w.len())
        .map(|q| w[q] * jump[q] * (sq(t[0][q]) + sq(t[1][q])))
        .sum();
    l2[0] + l2[1] + cfg.dt * (cfg.nu_t[0] * h1[0] + cfg.nu_t[1] * h1[1]) + cfg.kappa * cfg.dt * iface
}

fn sq(v: [f64; 2]) -> f64 {
    v[0] * v[0] + v[1] * v[1]
}

impl EnergyMonitor {
    /// Starts from the initial levels held in `state` (levels 1 and 0).
    pub fn new(disc: &CoupledDiscretization, cfg: &SchemeConfig, state: &StepperState) -> Self {
        let d = &state.domains;
        let e1 = energy(disc, cfg, [&d[0].u_hat, &d[1].u_hat], [&d[0].u_hat_prev, &d[1].u_hat_prev]);
        EnergyMonitor {
            rhs: e1,
            dissipation: 0.0,
            energy: e1,
            reports: Vec::new(),
        }
    }

    pub fn initial_bound(&self) -> f64 {
        self.rhs
    }

    /// Accounts for the defect step from `state` (levels `n`, `n-1`) to `defect` (level `n+1`).
    pub fn record(
        &mut self,
        disc: &CoupledDiscretization,
        cfg: &SchemeConfig,
        state: &StepperState,
        defect: &DefectResult,
    ) -> StabilityReport {
        let d = &state.domains;
        let new = [defect.u[0].as_slice(), defect.u[1].as_slice()];
        let cur = [d[0].u_hat.as_slice(), d[1].u_hat.as_slice()];
        let prev = [d[0].u_hat_prev.as_slice(), d[1].u_hat_prev.as_slice()];
        let e_new = energy(disc, cfg, new, cur);

        let (_, h1_new) = sq_norms(disc, new);
        let mut diff_sq = 0.0;
        let mut viscous = 0.0;
        let mut subgrid = 0.0;
        for i in 0..2 {
            let dom = &disc.domains[i];
            let diff: Vec<f64> = new[i].iter().zip(cur[i]).map(|(a, b)| a - b).collect();
            diff_sq += dot(&diff, &block_mul(&dom.mass, &diff));
            viscous += cfg.nu[i] * h1_new[i];
            if cfg.nu_t[i] != 0.0 {
                subgrid += cfg.nu_t[i]
                    * (gradient_deviation_sq(&dom.velocity, new[i], &d[i].g)
                        + gradient_deviation_sq(&dom.velocity, cur[i], &d[i].g));
            }
        }
        let w = interface_weights(&disc.pairing);
        let (tn, tc, tp) = (traces(disc, new), traces(disc, cur), traces(disc, prev));
        let (jc, jp) = (jump_magnitudes(&tc[0], &tc[1]), jump_magnitudes(&tp[0], &tp[1]));
        let mut iface = 0.0;
        for q in 0..w.len() {
            let (a, b) = (jc[q].sqrt(), jp[q].sqrt());
            for i in 0..2 {
                let j = 1 - i;
                iface += w[q] * sq([a * tn[i][q][0] - b * tc[j][q][0], a * tn[i][q][1] - b * tc[j][q][1]]);
            }
        }
        let iface = cfg.kappa * cfg.dt * iface;

        let identity = e_new - self.energy + diff_sq + 2.0 * cfg.dt * viscous + cfg.dt * subgrid + iface;
        self.dissipation += cfg.dt * viscous + cfg.dt * subgrid + iface;
        let report = StabilityReport {
            step: state.n,
            lhs: e_new + self.dissipation,
            rhs: self.rhs,
            energy: e_new,
            identity_residual: identity.abs() / self.energy.max(f64::MIN_POSITIVE),
        };
        self.energy = e_new;
        self.reports.push(report);
        report
    }
}
