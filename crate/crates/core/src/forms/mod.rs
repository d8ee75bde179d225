//! Assembly of the bilinear, trilinear and interface forms of the scheme.

mod correction;
mod interface;
mod projection;
mod sparse;
mod volume;

pub use correction::{assemble_correction_terms, CorrectionInputs, CorrectionTerms};
pub use interface::{
    assemble_interface_ga_rhs, assemble_interface_mass, interface_load, interface_traces, interface_weights,
    jump_magnitude, jump_magnitudes,
};
pub use projection::{
    assemble_subgrid_rhs, gradient_deviation_sq, project_gradient, projection_residual, GradientField,
};
pub use sparse::SparseMatrix;
pub use volume::{
    assemble_convection, assemble_div_coupling, assemble_load, assemble_mass, assemble_stiffness, basis_integrals,
    block_mul, trilinear_c,
};
