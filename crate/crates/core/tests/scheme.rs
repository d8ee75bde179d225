use std::sync::Arc;

use ffddc::fem::{ElementKind, FeSpace};
use ffddc::forms::projection_residual;
use ffddc::mesh::{BoundaryTag, CoupledMesh, Point};
use ffddc::scheme::{
    correction_step, correction_step_ordered, defect_step, defect_step_ordered, initialize, interpolate_vector, run,
    CoupledDiscretization, DecayProblem, ObstacleProblem, Problem, RunOptions, SchemeConfig, Variant,
};

fn disc(n: usize) -> CoupledDiscretization {
    CoupledDiscretization::new(CoupledMesh::unit_squares(n).unwrap(), ElementKind::DiscP1).unwrap()
}

fn config(dt: f64, steps: usize, variant: Variant) -> SchemeConfig {
    SchemeConfig {
        nu: [0.3, 0.05],
        nu_t: [0.2, 0.1],
        kappa: 1.5,
        dt,
        final_time: dt * (steps + 1) as f64,
        variant,
        ..SchemeConfig::default()
    }
}

/// Steady shear `u = (y^2, 0)` with `p = 0`: continuous across `y = 0`,
/// tangentially stress-free there, and inside the P2 space.
struct Shear {
    nu: [f64; 2],
}

impl Problem for Shear {
    fn name(&self) -> &str {
        "shear"
    }

    fn forcing(&self, domain: usize, _: f64, _: Point) -> [f64; 2] {
        [-2.0 * self.nu[domain], 0.0]
    }

    fn boundary_velocity(&self, _: usize, _: BoundaryTag, _: f64, x: Point) -> Option<[f64; 2]> {
        Some([x[1] * x[1], 0.0])
    }

    fn initial_velocity(&self, _: usize, space: &Arc<FeSpace>, _: f64, _: usize) -> Vec<f64> {
        interpolate_vector(space, |x| [x[1] * x[1], 0.0])
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn zero_data_stays_zero() {
    let d = disc(3);
    let cfg = SchemeConfig {
        kappa: 0.0,
        ..config(0.1, 4, Variant::Sav)
    };
    let problem = DecayProblem {
        seed: 1,
        amplitude: 0.0,
    };
    let traj = run(&d, &problem, &cfg, &RunOptions::default()).unwrap();
    let s = &traj.final_state.domains;
    for dom in s {
        assert!(dom.u_hat.iter().chain(&dom.u_tilde).chain(&dom.p_hat).all(|&v| v == 0.0));
    }
}

#[test]
fn steady_field_in_the_space_is_reproduced() {
    let d = disc(3);
    for variant in [Variant::Sav, Variant::Av] {
        let cfg = config(0.1, 3, variant);
        let problem = Shear { nu: cfg.nu };
        let traj = run(&d, &problem, &cfg, &RunOptions::default()).unwrap();
        for (i, dom) in traj.final_state.domains.iter().enumerate() {
            let exact = problem.initial_velocity(i, &d.domains[i].velocity, 0.0, 0);
            assert!(max_diff(&dom.u_hat, &exact) < 1e-10, "{variant} defect");
            assert!(max_diff(&dom.u_tilde, &exact) < 1e-10, "{variant} corrected");
            assert!(dom.p_tilde.iter().all(|p| p.abs() < 1e-9));
        }
    }
}

#[test]
fn subdomain_order_does_not_matter() {
    let d = disc(3);
    let cfg = config(0.2, 3, Variant::Sav);
    let problem = DecayProblem::new(7);
    let mut a = initialize(&d, &problem, &cfg).unwrap();
    let mut b = a.clone();
    for _ in 0..cfg.n_steps() {
        let da = defect_step(&d, &problem, &cfg, &mut a).unwrap();
        let db = defect_step_ordered(&d, &problem, &cfg, &mut b, [1, 0]).unwrap();
        assert_eq!(da.u, db.u);
        assert_eq!(da.p, db.p);
        let ca = correction_step(&d, &problem, &cfg, &mut a, &da).unwrap();
        let cb = correction_step_ordered(&d, &problem, &cfg, &mut b, &db, [1, 0]).unwrap();
        assert_eq!(ca.u, cb.u);
        assert_eq!(ca.p, cb.p);
        a.advance(da, ca);
        b.advance(db, cb);
    }
}

#[test]
fn variants_coincide_without_eddy_viscosity() {
    let d = disc(3);
    let problem = DecayProblem::new(3);
    let base = SchemeConfig {
        nu_t: [0.0, 0.0],
        ..config(0.1, 3, Variant::Sav)
    };
    let sav = run(&d, &problem, &base, &RunOptions::default()).unwrap();
    let av = run(
        &d,
        &problem,
        &SchemeConfig {
            variant: Variant::Av,
            ..base
        },
        &RunOptions::default(),
    )
    .unwrap();
    for i in 0..2 {
        let (s, a) = (&sav.final_state.domains[i], &av.final_state.domains[i]);
        assert!(max_diff(&s.u_hat, &a.u_hat) < 1e-12);
        assert!(max_diff(&s.u_tilde, &a.u_tilde) < 1e-12);
    }
}

#[test]
fn single_step_run() {
    let d = disc(2);
    let cfg = config(0.5, 1, Variant::Av);
    assert_eq!(cfg.n_steps(), 1);
    let traj = run(&d, &DecayProblem::new(1), &cfg, &RunOptions::default()).unwrap();
    assert_eq!(traj.diagnostics.len(), 1);
    assert_eq!(traj.final_state.n, 2);
}

#[test]
fn reruns_are_bitwise_identical() {
    let d = disc(3);
    let cfg = config(0.1, 4, Variant::Sav);
    let problem = DecayProblem::new(11);
    let a = run(&d, &problem, &cfg, &RunOptions::default()).unwrap();
    let b = run(&d, &problem, &cfg, &RunOptions::default()).unwrap();
    for i in 0..2 {
        assert_eq!(a.final_state.domains[i].u_tilde, b.final_state.domains[i].u_tilde);
        assert_eq!(a.final_state.domains[i].p_tilde, b.final_state.domains[i].p_tilde);
    }
    let ea: Vec<f64> = a.diagnostics.iter().map(|s| s.corrected_energy).collect();
    let eb: Vec<f64> = b.diagnostics.iter().map(|s| s.corrected_energy).collect();
    assert_eq!(ea, eb);
}

#[test]
fn initial_gradient_satisfies_projection_orthogonality() {
    let d = disc(3);
    let cfg = config(0.1, 2, Variant::Sav);
    let state = initialize(&d, &DecayProblem::new(5), &cfg).unwrap();
    for i in 0..2 {
        let dom = &state.domains[i];
        assert!(projection_residual(&d.domains[i].velocity, &dom.u_hat, &dom.g) < 1e-11);
    }
}

#[test]
fn energy_identity_closes_and_bound_holds() {
    let d = disc(3);
    for variant in [Variant::Sav, Variant::Av] {
        let cfg = config(1.0, 6, variant);
        let options = RunOptions {
            energy_monitor: true,
            ..RunOptions::default()
        };
        let traj = run(&d, &DecayProblem::new(2), &cfg, &options).unwrap();
        for s in &traj.diagnostics {
            let r = s.stability.unwrap();
            assert!(r.identity_residual.abs() < 1e-10, "{variant}: {r:?}");
            assert!(r.holds(1e-10), "{variant}: {r:?}");
        }
    }
}

#[test]
fn zero_initial_data_gives_zero_bound() {
    let d = disc(2);
    let cfg = config(1.0, 2, Variant::Sav);
    let options = RunOptions {
        energy_monitor: true,
        ..RunOptions::default()
    };
    let problem = DecayProblem {
        seed: 0,
        amplitude: 0.0,
    };
    let traj = run(&d, &problem, &cfg, &options).unwrap();
    assert_eq!(traj.initial_bound, Some(0.0));
    assert!(traj.diagnostics.iter().all(|s| s.stability.unwrap().lhs == 0.0));
}

#[test]
fn obstacle_initial_data() {
    let (up, low) = ffddc::mesh::obstacle_meshes(2).unwrap();
    let d = CoupledDiscretization::new(CoupledMesh::new(up, low).unwrap(), ElementKind::DiscP1).unwrap();
    let cfg = SchemeConfig {
        nu: [1e-3, 1.0],
        nu_t: [0.01, 0.01],
        dt: 0.01,
        final_time: 0.02,
        ..SchemeConfig::default()
    };
    let state = initialize(&d, &ObstacleProblem::default(), &cfg).unwrap();
    assert!(state.domains[1].u_hat.iter().all(|&v| v == 0.0));
    assert!(state.domains[0].u_hat.iter().any(|&v| v > 1.0));
    assert!(state.domains[0].p_hat.iter().all(|&v| v == 0.0));
}

#[test]
fn snapshot_times_must_lie_on_the_grid() {
    let d = disc(2);
    let cfg = config(0.1, 2, Variant::Sav);
    let options = RunOptions {
        snapshot_times: vec![0.15],
        ..RunOptions::default()
    };
    assert!(run(&d, &DecayProblem::new(1), &cfg, &options).is_err());
}
