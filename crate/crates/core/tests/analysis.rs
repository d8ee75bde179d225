use ffddc::analysis::{
    compare_variants, convergence_study, error_norms, level_config, spatial_error_sq, ManufacturedParams,
    ManufacturedProblem, ManufacturedSolution, StudySettings,
};
use ffddc::fem::{ElementKind, NORM_DEGREE};
use ffddc::mesh::CoupledMesh;
use ffddc::scheme::{run, CoupledDiscretization, RunOptions, Snapshot, Variant};

fn disc(n: usize) -> CoupledDiscretization {
    CoupledDiscretization::new(CoupledMesh::unit_squares(n).unwrap(), ElementKind::DiscP1).unwrap()
}

fn constant_snapshots(d: &CoupledDiscretization, levels: usize, dt: f64, value: f64) -> Vec<Snapshot> {
    let fields = [0, 1].map(|i| vec![value; 2 * d.domains[i].velocity.n_dofs()]);
    let pressures = [0, 1].map(|i| vec![0.0; d.domains[i].pressure.n_dofs()]);
    (1..=levels)
        .map(|level| Snapshot {
            level,
            time: level as f64 * dt,
            defect_velocity: fields.clone(),
            defect_pressure: pressures.clone(),
            corrected_velocity: fields.clone(),
            corrected_pressure: pressures.clone(),
        })
        .collect()
}

fn zero_solution() -> ManufacturedSolution {
    ManufacturedSolution::new(ManufacturedParams {
        a: 0.0,
        ..ManufacturedParams::MODERATE
    })
}

#[test]
fn zero_error_gives_zero_norms() {
    let d = disc(2);
    let cfg = level_config(&ManufacturedParams::MODERATE, Variant::Sav, 4);
    let snaps = constant_snapshots(&d, cfg.n_levels(), cfg.dt, 0.0);
    let e = error_norms(&d, &snaps, &zero_solution(), &cfg, NORM_DEGREE).unwrap();
    assert_eq!(e.as_array(), [0.0; 4]);
}

#[test]
fn constant_error_scales_with_root_of_final_time() {
    let d = disc(2);
    let cfg = level_config(&ManufacturedParams::MODERATE, Variant::Sav, 4);
    let snaps = constant_snapshots(&d, cfg.n_levels(), cfg.dt, 0.3);
    let exact = zero_solution();
    let e = error_norms(&d, &snaps, &exact, &cfg, NORM_DEGREE).unwrap();
    let eps_sq: f64 = (0..2)
        .map(|i| spatial_error_sq(&d.domains[i].velocity, &snaps[0].corrected_velocity[i], &exact, i, 0.0, NORM_DEGREE).0)
        .sum();
    // Two unit squares, two components, value 0.3.
    assert!((eps_sq - 4.0 * 0.09).abs() < 1e-13);
    let expected = eps_sq.sqrt() * cfg.final_time.sqrt();
    assert!((e.corrected_l2 - expected).abs() < 1e-13);
    assert!((e.defect_h1 - expected).abs() < 1e-13);
}

#[test]
fn missing_snapshot_is_an_error() {
    let d = disc(2);
    let cfg = level_config(&ManufacturedParams::MODERATE, Variant::Sav, 4);
    let mut snaps = constant_snapshots(&d, cfg.n_levels(), cfg.dt, 0.0);
    snaps.remove(1);
    assert!(error_norms(&d, &snaps, &zero_solution(), &cfg, NORM_DEGREE).is_err());
}

#[test]
fn error_quadrature_is_saturated() {
    let params = ManufacturedParams::MODERATE;
    let cfg = level_config(&params, Variant::Sav, 4);
    let d = disc(4);
    let problem = ManufacturedProblem::new(params);
    let options = RunOptions {
        snapshot_times: (1..=cfg.n_levels()).map(|l| cfg.time(l)).collect(),
        ..RunOptions::default()
    };
    let traj = run(&d, &problem, &cfg, &options).unwrap();
    let fine = error_norms(&d, &traj.snapshots, &problem.solution, &cfg, NORM_DEGREE).unwrap();
    // The squared error is a polynomial of degree 10 in space, so the default
    // rule is already exact and doubling the degree changes nothing.
    let finer = error_norms(&d, &traj.snapshots, &problem.solution, &cfg, 2 * NORM_DEGREE).unwrap();
    for (a, b) in fine.as_array().iter().zip(finer.as_array()) {
        assert!(((a - b) / a).abs() < 1e-8, "{a} vs {b}");
    }
    let coarse = error_norms(&d, &traj.snapshots, &problem.solution, &cfg, NORM_DEGREE / 2).unwrap();
    assert!(((fine.corrected_l2 - coarse.corrected_l2) / fine.corrected_l2).abs() > 1e-8);
}

#[test]
fn errors_decrease_under_refinement() {
    let t = convergence_study(&ManufacturedParams::MODERATE, Variant::Sav, &[4, 8], &StudySettings::default()).unwrap();
    for rate in t.rates(1) {
        assert!(rate.unwrap() > 0.0);
    }
    assert_eq!(t.rates(0), [None; 4]);
}

#[test]
fn variants_coincide_without_eddy_viscosity() {
    let settings = StudySettings {
        nu_t: Some(0.0),
        ..StudySettings::default()
    };
    let cmp = compare_variants(&ManufacturedParams::MODERATE, &[2, 4], &settings).unwrap();
    for (_, r) in cmp.ratios() {
        for v in r {
            assert!((v - 1.0).abs() < 1e-12, "{v}");
        }
    }
}

#[test]
fn levels_must_be_ascending_powers_of_two() {
    let p = ManufacturedParams::MODERATE;
    let s = StudySettings::default();
    assert!(convergence_study(&p, Variant::Sav, &[8, 4], &s).is_err());
    assert!(convergence_study(&p, Variant::Sav, &[6], &s).is_err());
    assert!(convergence_study(&p, Variant::Sav, &[], &s).is_err());
}
