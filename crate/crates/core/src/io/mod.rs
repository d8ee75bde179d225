//! Run configuration, CSV tables and VTK export.

mod config;
mod csv;
mod vtk;

pub use config::{
    load_config, parse_config, MeshSource, ProblemKind, RunConfig, OBSTACLE_DT, OBSTACLE_FINAL_TIME, OBSTACLE_NU,
    OBSTACLE_NU_T, OBSTACLE_PROBE, OBSTACLE_RESOLUTION,
};
pub use csv::{
    comparison_csv, diagnostics_csv, format_sci, parse_table_csv, table_csv, write_text, DIAGNOSTICS_HEADER,
    TABLE_HEADER,
};
pub use vtk::{export_vtk, vtk_string, VtkPart};
