//! Manufactured solutions, error norms and convergence studies.

mod convergence;
mod manufactured;
mod norms;

pub use convergence::{
    compare_variants, convergence_study, level_config, run_level, ConvergenceRow, ConvergenceTable, StudySettings,
    VariantComparison,
};
pub use manufactured::{
    verify_forcing, ExactValues, ManufacturedParams, ManufacturedProblem, ManufacturedSolution, TablePreset,
};
pub use norms::{error_norms, spatial_error_sq, ErrorAccumulator, ErrorNorms};
