//! Defect and correction steps with their Picard inner iterations.

use super::{CoupledDiscretization, Problem, SchemeConfig, Subdomain, Variant};
use crate::fem::Constraints;
use crate::forms::{
    assemble_convection, assemble_correction_terms, assemble_interface_ga_rhs, assemble_interface_mass,
    assemble_load, assemble_subgrid_rhs, block_mul, interface_traces, jump_magnitudes, project_gradient,
    CorrectionInputs, GradientField, SparseMatrix,
};
use crate::linsolve::{SaddleSolver, SaddleSystem};
use crate::mesh::InterfacePairing;
use crate::{Error, Result};

/// Lagged fields of one subdomain.
#[derive(Clone, Debug)]
pub struct DomainState {
    /// Defect velocity at levels `n` and `n - 1` (stacked components).
    pub u_hat: Vec<f64>,
    pub u_hat_prev: Vec<f64>,
    /// Defect pressure at level `n`.
    pub p_hat: Vec<f64>,
    /// Projected defect gradient at level `n` (zero for the AV variant).
    pub g: GradientField,
    /// Corrected velocity at levels `n` and `n - 1`.
    pub u_tilde: Vec<f64>,
    pub u_tilde_prev: Vec<f64>,
    /// Corrected pressure at level `n`.
    pub p_tilde: Vec<f64>,
}

/// Everything carried from one step to the next.
#[derive(Clone, Debug)]
pub struct StepperState {
    /// Current time level `n` (the newest known level).
    pub n: usize,
    pub domains: [DomainState; 2],
    load: Option<[Vec<f64>; 2]>,
    solvers: [SaddleSolver; 2],
}

impl StepperState {
    pub fn new(n: usize, domains: [DomainState; 2]) -> Self {
        StepperState {
            n,
            domains,
            load: None,
            solvers: [SaddleSolver::with_reuse(), SaddleSolver::with_reuse()],
        }
    }

    /// Moves to level `n + 1` with the given step results.
    pub fn advance(&mut self, defect: DefectResult, correction: CorrectionResult) {
        let DefectResult { u, p, g, load, .. } = defect;
        for (i, ((((u, p), g), ut), pt)) in u
            .into_iter()
            .zip(p)
            .zip(g)
            .zip(correction.u)
            .zip(correction.p)
            .enumerate()
        {
            let d = &mut self.domains[i];
            d.u_hat_prev = std::mem::replace(&mut d.u_hat, u);
            d.p_hat = p;
            d.g = g;
            d.u_tilde_prev = std::mem::replace(&mut d.u_tilde, ut);
            d.p_tilde = pt;
        }
        self.load = Some(load);
        self.n += 1;
    }

    pub fn solver_stats(&self) -> [crate::linsolve::SolverStats; 2] {
        [self.solvers[0].stats(), self.solvers[1].stats()]
    }
}

/// Output of the defect step for both subdomains (level `n + 1`).
#[derive(Clone, Debug)]
pub struct DefectResult {
    pub u: [Vec<f64>; 2],
    pub p: [Vec<f64>; 2],
    pub g: [GradientField; 2],
    pub picard: [usize; 2],
    /// `(f^{n+1}, v)` per subdomain.
    pub load: [Vec<f64>; 2],
}

/// Output of the correction step for both subdomains (level `n + 1`).
#[derive(Clone, Debug)]
pub struct CorrectionResult {
    pub u: [Vec<f64>; 2],
    pub p: [Vec<f64>; 2],
    pub picard: [usize; 2],
}

/// Sets up levels 0 and 1 from the problem's initial data.
pub fn initialize(disc: &CoupledDiscretization, problem: &dyn Problem, cfg: &SchemeConfig) -> Result<StepperState> {
    cfg.validate()?;
    let mut domains = Vec::with_capacity(2);
    for (i, dom) in disc.domains.iter().enumerate() {
        let mut u0 = problem.initial_velocity(i, &dom.velocity, cfg.time(0), 0);
        dom.constraints(i, problem, cfg.time(0))?.apply(&mut u0);
        let mut u1 = problem.initial_velocity(i, &dom.velocity, cfg.time(1), 1);
        dom.constraints(i, problem, cfg.time(1))?.apply(&mut u1);
        let p1 = problem.initial_pressure(i, &dom.pressure, cfg.time(1));
        let g = subgrid_gradient(dom, &u1, cfg);
        domains.push(DomainState {
            u_hat: u1.clone(),
            u_hat_prev: u0.clone(),
            p_hat: p1.clone(),
            g,
            u_tilde: u1,
            u_tilde_prev: u0,
            p_tilde: p1,
        });
    }
    let d1 = domains.pop().unwrap();
    let d0 = domains.pop().unwrap();
    Ok(StepperState::new(1, [d0, d1]))
}

fn subgrid_gradient(dom: &Subdomain, u: &[f64], cfg: &SchemeConfig) -> GradientField {
    match cfg.variant {
        Variant::Sav => project_gradient(&dom.velocity, u, dom.gradient.clone()),
        Variant::Av => GradientField::zeros(dom.gradient.clone()),
    }
}

fn load(dom: &Subdomain, problem: &dyn Problem, domain: usize, t: f64) -> Vec<f64> {
    if problem.is_unforced() {
        vec![0.0; 2 * dom.n_velocity()]
    } else {
        assemble_load(&dom.velocity, |x| problem.forcing(domain, t, x))
    }
}

fn traces(disc: &CoupledDiscretization, fields: [&[f64]; 2]) -> [Vec<[f64; 2]>; 2] {
    [0, 1].map(|i| interface_traces(&disc.domains[i].velocity, fields[i], &disc.pairing, i))
}

fn jumps(t: &[Vec<[f64; 2]>; 2]) -> Vec<f64> {
    jump_magnitudes(&t[0], &t[1])
}

fn l2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

struct PicardProblem<'a> {
    dom: &'a Subdomain,
    /// Velocity block without convection.
    base: SparseMatrix,
    rhs: Vec<f64>,
    constraints: Constraints,
}

fn picard(
    pp: &PicardProblem<'_>,
    solver: &mut SaddleSolver,
    guess: &[f64],
    cfg: &SchemeConfig,
    step: usize,
) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let mut w = guess.to_vec();
    pp.constraints.apply(&mut w);
    let mut increment = f64::INFINITY;
    for it in 1..=cfg.picard_max {
        let conv = assemble_convection(&pp.dom.velocity, &w);
        let lhs = SparseMatrix::linear_combination(&[(1.0, &pp.base), (1.0, &conv)]);
        let (u, p) = solver.solve(&SaddleSystem {
            velocity: &lhs,
            div: (&pp.dom.div.0, &pp.dom.div.1),
            rhs: &pp.rhs,
            constraints: &pp.constraints,
            pressure_weights: &pp.dom.pressure_weights,
        })?;
        if !u.iter().chain(&p).all(|v| v.is_finite()) {
            return Err(Error::NonFinite { step });
        }
        let diff: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a - b).collect();
        let norm = l2(&u);
        increment = if norm == 0.0 { l2(&diff) } else { l2(&diff) / norm };
        w = u;
        if increment < cfg.picard_tol || (norm == 0.0 && increment == 0.0) {
            return Ok((w, p, it));
        }
    }
    Err(Error::PicardDivergence {
        step,
        iterations: cfg.picard_max,
        increment,
    })
}

fn base_matrix(dom: &Subdomain, pairing: &InterfacePairing, side: usize, jump: &[f64], cfg: &SchemeConfig) -> SparseMatrix {
    let k = assemble_interface_mass(&dom.velocity, pairing, side, jump, cfg.kappa);
    SparseMatrix::linear_combination(&[
        (1.0 / cfg.dt, &dom.mass),
        (cfg.nu[side] + cfg.nu_t[side], &dom.stiffness),
        (1.0, &k),
    ])
}

fn add_into(acc: &mut [f64], x: &[f64]) {
    acc.iter_mut().zip(x).for_each(|(a, b)| *a += b);
}

/// Defect step for both subdomains, in the natural order.
pub fn defect_step(
    disc: &CoupledDiscretization,
    problem: &dyn Problem,
    cfg: &SchemeConfig,
    state: &mut StepperState,
) -> Result<DefectResult> {
    defect_step_ordered(disc, problem, cfg, state, [0, 1])
}

/// Defect step solving the subdomains in `order`. Each solve reads only
/// levels `n` and `n - 1` of the other subdomain, so the order cannot
/// change the result.
pub fn defect_step_ordered(
    disc: &CoupledDiscretization,
    problem: &dyn Problem,
    cfg: &SchemeConfig,
    state: &mut StepperState,
    order: [usize; 2],
) -> Result<DefectResult> {
    let n = state.n;
    let t_new = cfg.time(n + 1);
    let st = &state.domains;
    let tr_n = traces(disc, [&st[0].u_hat, &st[1].u_hat]);
    let tr_nm1 = traces(disc, [&st[0].u_hat_prev, &st[1].u_hat_prev]);
    let (j_n, j_nm1) = (jumps(&tr_n), jumps(&tr_nm1));

    let mut out: [Option<(Vec<f64>, Vec<f64>, GradientField, usize, Vec<f64>)>; 2] = [None, None];
    for i in order {
        let j = 1 - i;
        let dom = &disc.domains[i];
        let s = &state.domains[i];
        let f_new = load(dom, problem, i, t_new);
        let mut rhs = f_new.clone();
        add_into(&mut rhs, &block_mul(&dom.mass, &s.u_hat).iter().map(|v| v / cfg.dt).collect::<Vec<_>>());
        add_into(
            &mut rhs,
            &assemble_interface_ga_rhs(&dom.velocity, &disc.pairing, i, &tr_n[j], &j_n, &j_nm1, cfg.kappa),
        );
        if cfg.variant == Variant::Sav {
            add_into(&mut rhs, &assemble_subgrid_rhs(&s.g, cfg.nu_t[i], &dom.velocity));
        }
        let pp = PicardProblem {
            dom,
            base: base_matrix(dom, &disc.pairing, i, &j_n, cfg),
            rhs,
            constraints: dom.constraints(i, problem, t_new)?,
        };
        let guess: Vec<f64> = s.u_hat.iter().zip(&s.u_hat_prev).map(|(a, b)| 2.0 * a - b).collect();
        let (u, p, its) = picard(&pp, &mut state.solvers[i], &guess, cfg, n)?;
        let g = subgrid_gradient(dom, &u, cfg);
        out[i] = Some((u, p, g, its, f_new));
    }
    let [a, b] = out.map(Option::unwrap);
    Ok(DefectResult {
        u: [a.0, b.0],
        p: [a.1, b.1],
        g: [a.2, b.2],
        picard: [a.3, b.3],
        load: [a.4, b.4],
    })
}

/// Correction step for both subdomains, in the natural order.
pub fn correction_step(
    disc: &CoupledDiscretization,
    problem: &dyn Problem,
    cfg: &SchemeConfig,
    state: &mut StepperState,
    defect: &DefectResult,
) -> Result<CorrectionResult> {
    correction_step_ordered(disc, problem, cfg, state, defect, [0, 1])
}

/// Correction step solving the subdomains in `order`. Reads the defect
/// results of both subdomains but only levels `n`, `n - 1` of the corrected fields.
pub fn correction_step_ordered(
    disc: &CoupledDiscretization,
    problem: &dyn Problem,
    cfg: &SchemeConfig,
    state: &mut StepperState,
    defect: &DefectResult,
    order: [usize; 2],
) -> Result<CorrectionResult> {
    let n = state.n;
    let t_new = cfg.time(n + 1);
    let st = &state.domains;
    let tt_n = traces(disc, [&st[0].u_tilde, &st[1].u_tilde]);
    let tt_nm1 = traces(disc, [&st[0].u_tilde_prev, &st[1].u_tilde_prev]);
    let (jt_n, jt_nm1) = (jumps(&tt_n), jumps(&tt_nm1));
    let th_new = traces(disc, [&defect.u[0], &defect.u[1]]);
    let th_n = traces(disc, [&st[0].u_hat, &st[1].u_hat]);
    let th_nm1 = traces(disc, [&st[0].u_hat_prev, &st[1].u_hat_prev]);
    let (jh_new, jh_n, jh_nm1) = (jumps(&th_new), jumps(&th_n), jumps(&th_nm1));
    let old_loads: [Vec<f64>; 2] = match &state.load {
        Some(l) => l.clone(),
        None => [0, 1].map(|i| load(&disc.domains[i], problem, i, cfg.time(n))),
    };

    let mut out: [Option<(Vec<f64>, Vec<f64>, usize)>; 2] = [None, None];
    for i in order {
        let j = 1 - i;
        let dom = &disc.domains[i];
        let s = &state.domains[i];
        let terms = assemble_correction_terms(&CorrectionInputs {
            space: &dom.velocity,
            pairing: &disc.pairing,
            side: i,
            nu: cfg.nu[i],
            nu_t: cfg.nu_t[i],
            kappa: cfg.kappa,
            load_new: &defect.load[i],
            load_old: &old_loads[i],
            stiffness: &dom.stiffness,
            div: (&dom.div.0, &dom.div.1),
            u_new: &defect.u[i],
            u_old: &s.u_hat,
            p_new: &defect.p[i],
            p_old: &s.p_hat,
            other_new: &th_new[j],
            other_old: &th_n[j],
            jump_new: &jh_new,
            jump_old: &jh_n,
            jump_older: &jh_nm1,
        });
        let mut rhs = terms.total();
        add_into(&mut rhs, &block_mul(&dom.mass, &s.u_tilde).iter().map(|v| v / cfg.dt).collect::<Vec<_>>());
        add_into(
            &mut rhs,
            &assemble_interface_ga_rhs(&dom.velocity, &disc.pairing, i, &tt_n[j], &jt_n, &jt_nm1, cfg.kappa),
        );
        let pp = PicardProblem {
            dom,
            base: base_matrix(dom, &disc.pairing, i, &jt_n, cfg),
            rhs,
            constraints: dom.constraints(i, problem, t_new)?,
        };
        let (u, p, its) = picard(&pp, &mut state.solvers[i], &defect.u[i], cfg, n)?;
        out[i] = Some((u, p, its));
    }
    let [a, b] = out.map(Option::unwrap);
    Ok(CorrectionResult {
        u: [a.0, b.0],
        p: [a.1, b.1],
        picard: [a.2, b.2],
    })
}
