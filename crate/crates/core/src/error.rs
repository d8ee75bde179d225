use std::path::PathBuf;

use crate::mesh::BoundaryTag;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported element type {element_type} at line {line}")]
    UnsupportedElement { line: usize, element_type: u32 },

    #[error("no triangles in mesh file")]
    NoTriangles,

    #[error("interface pairing failed: edge {edge} of mesh {mesh} ({a:?} -> {b:?}) has no partner")]
    Pairing {
        mesh: usize,
        edge: usize,
        a: [f64; 2],
        b: [f64; 2],
    },

    #[error("missing boundary data for {tag:?} dof {dof} at ({x}, {y})")]
    MissingBoundaryData {
        tag: BoundaryTag,
        dof: usize,
        x: f64,
        y: f64,
    },

    #[error("triangle index {index} out of range (mesh has {count})")]
    TriangleOutOfRange { index: usize, count: usize },

    #[error("singular saddle-point factorization (are the velocity and pressure constraints complete?)")]
    SingularSystem,

    #[error("linear solve residual {residual:e} exceeds tolerance {tolerance:e}")]
    SolverAccuracy { residual: f64, tolerance: f64 },

    #[error("Picard iteration did not converge in {iterations} iterations (last increment {increment:e}) at step {step}")]
    PicardDivergence {
        step: usize,
        iterations: usize,
        increment: f64,
    },

    #[error("non-finite value detected at step {step}")]
    NonFinite { step: usize },

    #[error("stepper state error: {0}")]
    State(String),

    #[error("config error in [{section}] {key}: {message}")]
    Config {
        section: String,
        key: String,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(section: &str, key: &str, message: impl Into<String>) -> Self {
        Error::Config {
            section: section.to_string(),
            key: key.to_string(),
            message: message.into(),
        }
    }
}
