//! Finite-element solver for two incompressible Navier-Stokes fluids coupled
//! through a nonlinear friction interface, advanced in time with a
//! subgrid-artificial-viscosity defect step followed by a deferred correction
//! step.
//!
//! The crate is organised bottom-up:
//!
//! * [`mesh`] builds, refines and imports triangulations and pairs the
//!   interface edges of the two subdomains.
//! * [`fem`] holds reference elements, quadrature, degree-of-freedom maps and
//!   discrete fields.
//! * [`forms`] assembles every bilinear, trilinear and interface term.
//! * [`linsolve`] solves the velocity-pressure saddle-point systems.
//! * [`scheme`] drives the defect and correction steps.
//! * [`analysis`] provides the manufactured solution, error norms and
//!   convergence tables.
//! * [`io`] reads run configurations and writes CSV/VTK output.

pub mod analysis;
pub mod error;
pub mod fem;
pub mod forms;
pub mod io;
pub mod linsolve;
pub mod mesh;
pub mod scheme;

pub use error::{Error, Result};
