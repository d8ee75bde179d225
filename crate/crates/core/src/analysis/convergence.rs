//! Convergence studies under simultaneous refinement of `h`, `dt` and `nu_T`.

use super::{error_norms, ErrorNorms, ManufacturedParams, ManufacturedProblem};
use crate::fem::NORM_DEGREE;
use crate::mesh::CoupledMesh;
use crate::scheme::{run, CoupledDiscretization, RunOptions, SchemeConfig, Variant};
use crate::{Error, Result};

/// One refinement level.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    /// `1/h`, equal to `1/dt` and `1/nu_T`.
    pub level: usize,
    pub errors: ErrorNorms,
}

/// Errors per level with observed rates `log2(e_{j-1} / e_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub variant: Variant,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Rates of the four error columns for row `j` (`None` for the first row).
    pub fn rates(&self, j: usize) -> [Option<f64>; 4] {
        if j == 0 {
            return [None; 4];
        }
        let (a, b) = (self.rows[j - 1].errors.as_array(), self.rows[j].errors.as_array());
        let scale = (self.rows[j].level as f64 / self.rows[j - 1].level as f64).log2();
        std::array::from_fn(|k| Some((a[k] / b[k]).log2() / scale))
    }
}

/// Scheme settings of the manufactured runs at one level.
pub fn level_config(params: &ManufacturedParams, variant: Variant, level: usize) -> SchemeConfig {
    let h = 1.0 / level as f64;
    SchemeConfig {
        nu: params.nu,
        nu_t: [h, h],
        kappa: params.kappa,
        dt: h,
        final_time: 1.0,
        variant,
        ..SchemeConfig::default()
    }
}

/// Deviations from the default study setup.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StudySettings {
    /// Degree of the gradient projection space (0 or 1).
    pub subgrid_degree: usize,
    /// Fixed eddy viscosity instead of `nu_T = h`.
    pub nu_t: Option<f64>,
}

impl Default for StudySettings {
    fn default() -> Self {
        StudySettings {
            subgrid_degree: 1,
            nu_t: None,
        }
    }
}

/// Runs one level and returns its space-time errors.
pub fn run_level(params: &ManufacturedParams, variant: Variant, level: usize, settings: &StudySettings) -> Result<ErrorNorms> {
    let base = level_config(params, variant, level);
    let cfg = SchemeConfig {
        subgrid_degree: settings.subgrid_degree,
        nu_t: settings.nu_t.map_or(base.nu_t, |v| [v, v]),
        ..base
    };
    let disc = CoupledDiscretization::new(CoupledMesh::unit_squares(level)?, cfg.subgrid_element())?;
    let problem = ManufacturedProblem::new(*params);
    let options = RunOptions {
        snapshot_times: (1..=cfg.n_levels()).map(|l| cfg.time(l)).collect(),
        ..RunOptions::default()
    };
    let traj = run(&disc, &problem, &cfg, &options)?;
    error_norms(&disc, &traj.snapshots, &problem.solution, &cfg, NORM_DEGREE)
}

fn check_levels(levels: &[usize]) -> Result<()> {
    if levels.is_empty() || levels.iter().any(|&l| l < 2 || !l.is_power_of_two()) || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "levels must be ascending powers of two (>= 2), got {levels:?}"
        )));
    }
    Ok(())
}

pub fn convergence_study(
    params: &ManufacturedParams,
    variant: Variant,
    levels: &[usize],
    settings: &StudySettings,
) -> Result<ConvergenceTable> {
    check_levels(levels)?;
    let rows = levels
        .iter()
        .map(|&level| {
            Ok(ConvergenceRow {
                level,
                errors: run_level(params, variant, level, settings)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable { variant, rows })
}

/// Both variants on identical meshes, with AV/SAV error ratios per level and column.
#[derive(Clone, Debug, PartialEq)]
pub struct VariantComparison {
    pub av: ConvergenceTable,
    pub sav: ConvergenceTable,
}

impl VariantComparison {
    pub fn ratios(&self) -> Vec<(usize, [f64; 4])> {
        self.av
            .rows
            .iter()
            .zip(&self.sav.rows)
            .map(|(a, s)| {
                let (ea, es) = (a.errors.as_array(), s.errors.as_array());
                (a.level, std::array::from_fn(|k| ea[k] / es[k]))
            })
            .collect()
    }
}

pub fn compare_variants(params: &ManufacturedParams, levels: &[usize], settings: &StudySettings) -> Result<VariantComparison> {
    Ok(VariantComparison {
        av: convergence_study(params, Variant::Av, levels, settings)?,
        sav: convergence_study(params, Variant::Sav, levels, settings)?,
    })
}
