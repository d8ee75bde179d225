//! Driving the stepper over the whole time interval.

use super::{
    correction_step, defect_step, initialize, CoupledDiscretization, EnergyMonitor, Problem, SchemeConfig,
    StabilityReport, StepperState,
};
use crate::fem::evaluate;
use crate::forms::{block_mul, interface_traces, interface_weights, jump_magnitudes};
use crate::mesh::Point;
use crate::{Error, Result};

/// A point at which the corrected velocity is sampled every step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probe {
    pub domain: usize,
    pub point: Point,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Times at which full fields are stored; each must lie on the time grid.
    pub snapshot_times: Vec<f64>,
    /// Track the stability bound (meaningful for unforced, homogeneous problems).
    pub energy_monitor: bool,
    pub probe: Option<Probe>,
}

/// Defect and corrected fields at one time level.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub level: usize,
    pub time: f64,
    pub defect_velocity: [Vec<f64>; 2],
    pub defect_pressure: [Vec<f64>; 2],
    pub corrected_velocity: [Vec<f64>; 2],
    pub corrected_pressure: [Vec<f64>; 2],
}

impl Snapshot {
    fn of(state: &StepperState, cfg: &SchemeConfig) -> Self {
        let d = &state.domains;
        Snapshot {
            level: state.n,
            time: cfg.time(state.n),
            defect_velocity: [d[0].u_hat.clone(), d[1].u_hat.clone()],
            defect_pressure: [d[0].p_hat.clone(), d[1].p_hat.clone()],
            corrected_velocity: [d[0].u_tilde.clone(), d[1].u_tilde.clone()],
            corrected_pressure: [d[0].p_tilde.clone(), d[1].p_tilde.clone()],
        }
    }
}

/// Per-step bookkeeping.
#[derive(Clone, Debug)]
pub struct StepDiagnostics {
    /// Step index `n`; the step produced level `n + 1`.
    pub step: usize,
    pub time: f64,
    pub defect_picard: [usize; 2],
    pub correction_picard: [usize; 2],
    /// `sum_i ||u_i||^2` of the defect and corrected velocities at the new level.
    pub defect_energy: f64,
    pub corrected_energy: f64,
    /// `kappa int_I |[u]|^3 ds` of the new defect velocity.
    pub interface_dissipation: f64,
    /// Largest Euclidean norm of the discrete divergence `B u` over subdomains (defect velocity).
    pub divergence: f64,
    pub stability: Option<StabilityReport>,
    pub probe: Option<[f64; 2]>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub diagnostics: Vec<StepDiagnostics>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: StepperState,
    pub initial_bound: Option<f64>,
}

fn grid_level(t: f64, cfg: &SchemeConfig) -> Result<usize> {
    let r = t / cfg.dt;
    let level = r.round();
    if (r - level).abs() > 1e-9 || level < 1.0 || level as usize > cfg.n_levels() {
        return Err(Error::InvalidArgument(format!(
            "snapshot time {t} is not a time level in [dt, T] for dt = {}",
            cfg.dt
        )));
    }
    Ok(level as usize)
}

/// Runs the scheme from the initial levels to the final time.
pub fn run(
    disc: &CoupledDiscretization,
    problem: &dyn Problem,
    cfg: &SchemeConfig,
    options: &RunOptions,
) -> Result<Trajectory> {
    let mut state = initialize(disc, problem, cfg)?;
    let mut snapshot_levels = options
        .snapshot_times
        .iter()
        .map(|&t| grid_level(t, cfg))
        .collect::<Result<Vec<_>>>()?;
    snapshot_levels.sort_unstable();
    snapshot_levels.dedup();
    let probe = match options.probe {
        Some(p) => {
            let mesh = &disc.domains[p.domain].mesh;
            let loc = mesh.locate(p.point).ok_or_else(|| {
                Error::InvalidArgument(format!("probe point {:?} is outside subdomain {}", p.point, p.domain))
            })?;
            Some((p.domain, loc))
        }
        None => None,
    };
    let mut monitor = options.energy_monitor.then(|| EnergyMonitor::new(disc, cfg, &state));
    let mut snapshots = Vec::new();
    if snapshot_levels.first() == Some(&1) {
        snapshots.push(Snapshot::of(&state, cfg));
    }
    let weights = interface_weights(&disc.pairing);
    let mut diagnostics = Vec::with_capacity(cfg.n_steps());
    for _ in 0..cfg.n_steps() {
        let step = state.n;
        let defect = defect_step(disc, problem, cfg, &mut state)?;
        let stability = monitor.as_mut().map(|m| m.record(disc, cfg, &state, &defect));
        let correction = correction_step(disc, problem, cfg, &mut state, &defect)?;
        let finite = defect
            .u
            .iter()
            .chain(&correction.u)
            .chain(&defect.p)
            .chain(&correction.p)
            .all(|v| v.iter().all(|x| x.is_finite()));
        if !finite {
            return Err(Error::NonFinite { step });
        }

        let energy = |u: &[Vec<f64>; 2]| -> f64 {
            (0..2)
                .map(|i| {
                    let m = block_mul(&disc.domains[i].mass, &u[i]);
                    m.iter().zip(&u[i]).map(|(a, b)| a * b).sum::<f64>()
                })
                .sum()
        };
        let tr = [0, 1].map(|i| interface_traces(&disc.domains[i].velocity, &defect.u[i], &disc.pairing, i));
        let jump = jump_magnitudes(&tr[0], &tr[1]);
        let interface_dissipation = cfg.kappa * weights.iter().zip(&jump).map(|(w, j)| w * j.powi(3)).sum::<f64>();
        let divergence = (0..2)
            .map(|i| {
                let r = disc.domains[i].divergence(&defect.u[i]);
                r.iter().map(|v| v * v).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max);
        let probe_value = probe.map(|(dom, (t, bary))| {
            let space = &disc.domains[dom].velocity;
            let n = space.n_dofs();
            let u = &correction.u[dom];
            [evaluate(space, &u[..n], t, bary), evaluate(space, &u[n..], t, bary)]
        });
        diagnostics.push(StepDiagnostics {
            step,
            time: cfg.time(step + 1),
            defect_picard: defect.picard,
            correction_picard: correction.picard,
            defect_energy: energy(&defect.u),
            corrected_energy: energy(&correction.u),
            interface_dissipation,
            divergence,
            stability,
            probe: probe_value,
        });
        state.advance(defect, correction);
        if snapshot_levels.binary_search(&state.n).is_ok() {
            snapshots.push(Snapshot::of(&state, cfg));
        }
    }
    Ok(Trajectory {
        diagnostics,
        snapshots,
        initial_bound: monitor.map(|m| m.initial_bound()),
        final_state: state,
    })
}
