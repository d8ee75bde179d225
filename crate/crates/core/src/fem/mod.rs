//! Finite element building blocks: quadrature, reference elements, dof maps.

mod constraints;
mod element;
mod field;
mod quadrature;
mod space;

pub use constraints::Constraints;
pub use element::{physical_gradient, ElementKind, Tabulation};
pub(crate) use field::solve_small;
pub use field::{evaluate, gradient, FeField};
pub use quadrature::{gauss_legendre, TriangleRule};
pub use space::{FeSpace, Sparsity};

/// Quadrature degree used for assembly.
pub const ASSEMBLY_DEGREE: usize = 6;
/// Quadrature degree used for error norms.
pub const NORM_DEGREE: usize = 10;
