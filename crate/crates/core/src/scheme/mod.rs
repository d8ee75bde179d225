//! Two-step time stepping: a stabilized defect step followed by a deferred
//! correction step, with geometric averaging of the interface terms so the
//! two subdomains decouple within every step.

mod discretization;
mod monitor;
mod problem;
mod run;
mod stepper;

use std::fmt;
use std::str::FromStr;

use crate::fem::ElementKind;
use crate::{Error, Result};

pub use discretization::{CoupledDiscretization, Subdomain};
pub use monitor::{EnergyMonitor, StabilityReport};
pub use problem::{interpolate_vector, DecayProblem, ObstacleProblem, Problem};
pub use run::{run, Probe, RunOptions, Snapshot, StepDiagnostics, Trajectory};
pub use stepper::{
    correction_step, correction_step_ordered, defect_step, defect_step_ordered, initialize, CorrectionResult,
    DefectResult, DomainState, StepperState,
};

/// Stabilization variant of the defect step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Subgrid artificial viscosity: only the resolved-scale fluctuation is damped.
    Sav,
    /// Plain artificial viscosity (the projected gradient is taken as zero).
    Av,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Sav => "SAV",
            Variant::Av => "AV",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sav" => Ok(Variant::Sav),
            "av" => Ok(Variant::Av),
            other => Err(format!("unknown variant '{other}' (expected SAV or AV)")),
        }
    }
}

/// Parameters of the time stepper. Index 0 is the upper subdomain, index 1 the lower.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeConfig {
    pub nu: [f64; 2],
    pub nu_t: [f64; 2],
    pub kappa: f64,
    pub dt: f64,
    pub final_time: f64,
    pub variant: Variant,
    /// Polynomial degree of the discontinuous gradient projection space (0 or 1).
    pub subgrid_degree: usize,
    pub picard_tol: f64,
    pub picard_max: usize,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            nu: [1.0, 1.0],
            nu_t: [0.0, 0.0],
            kappa: 1.0,
            dt: 0.1,
            final_time: 1.0,
            variant: Variant::Sav,
            subgrid_degree: 1,
            picard_tol: 1e-9,
            picard_max: 50,
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !self.nu.iter().all(|&v| v > 0.0 && v.is_finite()) {
            return bad(format!("viscosities must be positive, got {:?}", self.nu));
        }
        if !self.nu_t.iter().all(|&v| v >= 0.0 && v.is_finite()) {
            return bad(format!("eddy viscosities must be non-negative, got {:?}", self.nu_t));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return bad(format!("kappa must be non-negative, got {}", self.kappa));
        }
        if !(self.dt > 0.0 && self.final_time > 0.0) {
            return bad(format!("dt and final time must be positive, got {} and {}", self.dt, self.final_time));
        }
        let ratio = self.final_time / self.dt;
        if (ratio - ratio.round()).abs() > 1e-12 * ratio.max(1.0) || ratio.round() < 2.0 {
            return bad(format!(
                "final time {} must be an integer multiple (at least 2) of dt {}",
                self.final_time, self.dt
            ));
        }
        if self.subgrid_degree > 1 {
            return bad(format!("subgrid degree must be 0 or 1, got {}", self.subgrid_degree));
        }
        if !(self.picard_tol > 0.0) || self.picard_max == 0 {
            return bad("Picard tolerance and iteration cap must be positive".into());
        }
        Ok(())
    }

    /// Number of time levels after the initial one, `T / dt`.
    pub fn n_levels(&self) -> usize {
        (self.final_time / self.dt).round() as usize
    }

    /// Number of steps `M`; step `n = 1..=M` computes level `n + 1`.
    pub fn n_steps(&self) -> usize {
        self.n_levels() - 1
    }

    pub fn time(&self, level: usize) -> f64 {
        level as f64 * self.dt
    }

    pub fn subgrid_element(&self) -> ElementKind {
        if self.subgrid_degree == 0 {
            ElementKind::DiscP0
        } else {
            ElementKind::DiscP1
        }
    }
}
