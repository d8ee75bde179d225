//! Command-line driver: convergence tables, variant comparisons, full runs
//! with VTK output, forcing verification and mesh export.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ffddc::analysis::{
    compare_variants, convergence_study, error_norms, verify_forcing, ConvergenceTable, ManufacturedParams,
    ManufacturedSolution, StudySettings, TablePreset,
};
use ffddc::fem::NORM_DEGREE;
use ffddc::io::{
    comparison_csv, diagnostics_csv, export_vtk, format_sci, load_config, table_csv, write_text, ProblemKind,
    RunConfig, VtkPart,
};
use ffddc::mesh::export_gmsh;
use ffddc::scheme::{run, CoupledDiscretization, RunOptions, Variant};
use ffddc::Error;

const DEFAULT_LEVELS: [usize; 3] = [8, 16, 32];
const FORCING_SAMPLES: usize = 1000;
const FORCING_TOLERANCE: f64 = 1e-5;

#[derive(Parser)]
#[command(name = "ffddc", version, about = "Two-fluid Navier-Stokes solver with defect-deferred correction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence table of a manufactured problem.
    Converge(StudyArgs),
    /// Full run from a configuration file: VTK snapshots and per-step diagnostics.
    Run(RunArgs),
    /// Both variants on the same levels with AV/SAV error ratios.
    Compare(StudyArgs),
    /// Finite-difference residual check of the manufactured forcing.
    VerifyForcing(ForcingArgs),
    /// Writes the subdomain meshes of a configuration as MSH 2.2.
    ExportMesh(MeshArgs),
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long, conflicts_with = "table")]
    config: Option<PathBuf>,
    /// Manufactured setup 1-4.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    table: Option<u8>,
    /// Comma-separated values of 1/h.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    #[arg(long, value_parser = parse_variant)]
    variant: Option<Variant>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Fixed eddy viscosity instead of nu_T = h.
    #[arg(long)]
    nu_t: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_parser = parse_variant)]
    variant: Option<Variant>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    final_time: Option<f64>,
}

#[derive(Args)]
struct ForcingArgs {
    #[arg(long, conflicts_with = "table")]
    config: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    table: Option<u8>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Perturbs the forcing to exercise the failure path.
    #[arg(long, hide = true)]
    corrupt_forcing: bool,
}

#[derive(Args)]
struct MeshArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse()
}

/// A failure with its exit code: 1 for numerical failures, 2 for usage and configuration errors.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let usage = matches!(
            e,
            Error::Config { .. }
                | Error::Parse { .. }
                | Error::InvalidArgument(_)
                | Error::Io { .. }
                | Error::InvalidMesh(_)
                | Error::UnsupportedElement { .. }
                | Error::NoTriangles
                | Error::Pairing { .. }
        );
        Failure {
            code: if usage { 2 } else { 1 },
            error: e.into(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        error: anyhow::anyhow!(msg.into()),
    }
}

fn numerical(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 1, error: e.into() }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Converge(a) => cmd_converge(a),
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::VerifyForcing(a) => cmd_verify_forcing(a),
        Command::ExportMesh(a) => cmd_export_mesh(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

/// Manufactured parameters, default variant, levels and a file stem.
struct Study {
    params: ManufacturedParams,
    variant: Variant,
    levels: Vec<usize>,
    stem: String,
    settings: StudySettings,
}

fn study(a: &StudyArgs) -> Result<Study, Failure> {
    let (params, variant, levels, stem, subgrid_degree) = match (&a.table, &a.config) {
        (Some(n), _) => {
            let p = TablePreset::get(*n).expect("range-checked table id");
            (p.params, p.variant, DEFAULT_LEVELS.to_vec(), format!("table{n}"), 1)
        }
        (None, Some(path)) => {
            let cfg = load_config(path)?;
            let params = cfg
                .problem
                .manufactured()
                .ok_or_else(|| usage(format!("{}: a manufactured problem kind is required", path.display())))?;
            let stem = match cfg.problem {
                ProblemKind::Table(n) => format!("table{n}"),
                _ => "custom".into(),
            };
            (params, cfg.scheme.variant, cfg.levels, stem, cfg.scheme.subgrid_degree)
        }
        (None, None) => return Err(usage("one of --table or --config is required")),
    };
    if let Some(v) = a.nu_t {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(usage(format!("--nu-t must be non-negative, got {v}")));
        }
    }
    Ok(Study {
        params,
        variant: a.variant.unwrap_or(variant),
        levels: a.levels.clone().unwrap_or(levels),
        stem,
        settings: StudySettings {
            subgrid_degree,
            nu_t: a.nu_t,
        },
    })
}

fn study_error(e: Error) -> Failure {
    match e {
        Error::InvalidArgument(m) => usage(m),
        other => numerical(other),
    }
}

fn print_table(t: &ConvergenceTable) {
    println!("variant {}", t.variant);
    print!("{}", table_csv(t));
}

fn cmd_converge(a: StudyArgs) -> CmdResult {
    let s = study(&a)?;
    let table = convergence_study(&s.params, s.variant, &s.levels, &s.settings).map_err(study_error)?;
    print_table(&table);
    let path = a.out.join(format!("{}_{}.csv", s.stem, s.variant.to_string().to_lowercase()));
    write_text(&path, &table_csv(&table)).map_err(numerical)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_compare(a: StudyArgs) -> CmdResult {
    let s = study(&a)?;
    let cmp = compare_variants(&s.params, &s.levels, &s.settings).map_err(study_error)?;
    print_table(&cmp.av);
    print_table(&cmp.sav);
    let csv = comparison_csv(&cmp);
    println!("AV/SAV ratios");
    print!("{csv}");
    let path = a.out.join(format!("{}_compare.csv", s.stem));
    write_text(&path, &csv).map_err(numerical)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_verify_forcing(a: ForcingArgs) -> CmdResult {
    let params = match (&a.table, &a.config) {
        (Some(n), _) => TablePreset::get(*n).expect("range-checked table id").params,
        (None, Some(path)) => load_config(path)?
            .problem
            .manufactured()
            .ok_or_else(|| usage("a manufactured problem kind is required"))?,
        (None, None) => return Err(usage("one of --table or --config is required")),
    };
    let mut sol = ManufacturedSolution::new(params);
    if a.corrupt_forcing {
        sol.forcing_offset = 1e-3;
    }
    let worst = verify_forcing(&sol, FORCING_SAMPLES, a.seed);
    println!("max forcing residual over {FORCING_SAMPLES} samples: {}", format_sci(worst));
    if worst < FORCING_TOLERANCE {
        println!("PASS (< {})", format_sci(FORCING_TOLERANCE));
        Ok(())
    } else {
        Err(numerical(anyhow::anyhow!(
            "forcing residual {} exceeds {}",
            format_sci(worst),
            format_sci(FORCING_TOLERANCE)
        )))
    }
}

fn output_dir(cfg: &RunConfig, over: &Option<PathBuf>) -> PathBuf {
    over.clone().unwrap_or_else(|| cfg.output_dir.clone())
}

fn cmd_export_mesh(a: MeshArgs) -> CmdResult {
    let cfg = load_config(&a.config)?;
    let mesh = cfg.mesh.build()?;
    let dir = output_dir(&cfg, &a.out);
    for (name, m) in [("upper", &mesh.mesh1), ("lower", &mesh.mesh2)] {
        let path = dir.join(format!("{name}.msh"));
        write_text(&path, &export_gmsh(m)).map_err(numerical)?;
        println!("wrote {} ({} triangles)", path.display(), m.n_triangles());
    }
    Ok(())
}

fn cmd_run(a: RunArgs) -> CmdResult {
    let mut cfg = load_config(&a.config)?;
    if let Some(v) = a.variant {
        cfg.scheme.variant = v;
    }
    if let Some(t) = a.final_time {
        cfg.scheme.final_time = t;
        cfg.snapshot_times.retain(|&s| s <= t + 1e-9);
    }
    cfg.validate()?;
    let dir = output_dir(&cfg, &a.out);
    let disc = CoupledDiscretization::new(cfg.mesh.build()?, cfg.scheme.subgrid_element())?;
    let problem = cfg.build_problem();
    println!(
        "{} run: {} unknowns, dt = {}, T = {}, variant {}",
        problem.name(),
        disc.n_unknowns(),
        cfg.scheme.dt,
        cfg.scheme.final_time,
        cfg.scheme.variant
    );

    let manufactured = cfg.problem.manufactured();
    let mut snapshot_times = cfg.snapshot_times.clone();
    if manufactured.is_some() {
        snapshot_times = (1..=cfg.scheme.n_levels()).map(|l| cfg.scheme.time(l)).collect();
    }
    let options = RunOptions {
        snapshot_times,
        energy_monitor: cfg.energy_monitor,
        probe: cfg.probe,
    };
    let traj = run(&disc, problem.as_ref(), &cfg.scheme, &options).map_err(numerical)?;

    let diag_path = dir.join("diagnostics.csv");
    write_text(&diag_path, &diagnostics_csv(&traj.diagnostics)).map_err(numerical)?;
    println!("wrote {}", diag_path.display());

    for snap in &traj.snapshots {
        if !cfg.snapshot_times.iter().any(|&t| (t - snap.time).abs() < 1e-9) {
            continue;
        }
        let parts: Vec<VtkPart> = (0..2)
            .map(|i| VtkPart {
                velocity_space: &disc.domains[i].velocity,
                velocity: &snap.corrected_velocity[i],
                pressure_space: &disc.domains[i].pressure,
                pressure: &snap.corrected_pressure[i],
            })
            .collect();
        let path = dir.join(format!("fields_t{:.2}.vtk", snap.time));
        export_vtk(&path, &format!("corrected fields at t = {}", snap.time), &parts).map_err(numerical)?;
        println!("wrote {}", path.display());
    }

    if let Some(last) = traj.diagnostics.last() {
        println!(
            "final step {}: corrected energy {}, divergence {}",
            last.step,
            format_sci(last.corrected_energy),
            format_sci(last.divergence)
        );
    }
    if cfg.energy_monitor {
        let worst = traj
            .diagnostics
            .iter()
            .filter_map(|d| d.stability)
            .map(|r| r.lhs - r.rhs)
            .fold(f64::NEG_INFINITY, f64::max);
        println!("stability bound margin (lhs - rhs, max over steps): {}", format_sci(worst));
    }
    if let Some(params) = manufactured {
        let sol = ManufacturedSolution::new(params);
        let e = error_norms(&disc, &traj.snapshots, &sol, &cfg.scheme, NORM_DEGREE).map_err(numerical)?;
        println!("1/h,e1_L2,e1_H1,e2_L2,e2_H1");
        let cells: Vec<String> = e.as_array().iter().map(|&v| format_sci(v)).collect();
        println!("{},{}", (1.0 / cfg.scheme.dt).round(), cells.join(","));
    }
    Ok(())
}
