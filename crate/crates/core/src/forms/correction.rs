//! Right-hand side of the correction step, kept term by term.

use super::{assemble_convection, block_mul, interface_load, interface_traces, SparseMatrix};
use crate::fem::FeSpace;
use crate::mesh::InterfacePairing;

/// Everything the correction right-hand side of one subdomain depends on.
/// Velocity vectors are stacked `[u_x; u_y]`; interface data is in the flat
/// point order of `pairing`, seen from `side`.
pub struct CorrectionInputs<'a> {
    pub space: &'a FeSpace,
    pub pairing: &'a InterfacePairing,
    pub side: usize,
    pub nu: f64,
    pub nu_t: f64,
    pub kappa: f64,
    /// `(f^{n+1}, v)` and `(f^n, v)`.
    pub load_new: &'a [f64],
    pub load_old: &'a [f64],
    /// Unit-coefficient scalar stiffness matrix.
    pub stiffness: &'a SparseMatrix,
    /// Divergence coupling blocks `(B_x, B_y)`.
    pub div: (&'a SparseMatrix, &'a SparseMatrix),
    /// Defect velocities and pressures at the new and old level.
    pub u_new: &'a [f64],
    pub u_old: &'a [f64],
    pub p_new: &'a [f64],
    pub p_old: &'a [f64],
    /// Traces of the other subdomain's defect velocity at the new and old level.
    pub other_new: &'a [[f64; 2]],
    pub other_old: &'a [[f64; 2]],
    /// Jump magnitudes of the defect velocity at levels `n+1`, `n`, `n-1`.
    pub jump_new: &'a [f64],
    pub jump_old: &'a [f64],
    pub jump_older: &'a [f64],
}

/// The ten right-hand-side contributions, in the order of [`CorrectionTerms::NAMES`].
#[derive(Clone, Debug)]
pub struct CorrectionTerms {
    pub terms: [Vec<f64>; 10],
}

impl CorrectionTerms {
    pub const NAMES: [&'static str; 10] = [
        "trapezoidal forcing",
        "anti-diffusion",
        "added viscosity",
        "interface jump difference",
        "interface velocity difference",
        "lagged geometric average",
        "new-level interface drag",
        "old-level interface drag",
        "convection difference",
        "pressure difference",
    ];

    pub fn total(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.terms[0].len()];
        for t in &self.terms {
            for (o, v) in out.iter_mut().zip(t) {
                *o += v;
            }
        }
        out
    }
}

pub fn assemble_correction_terms(inp: &CorrectionInputs<'_>) -> CorrectionTerms {
    let nd = inp.space.n_dofs();
    let (k, pairing, side, space) = (inp.kappa, inp.pairing, inp.side, inp.space);
    let axpby = |a: f64, x: &[f64], b: f64, y: &[f64]| -> Vec<f64> {
        x.iter().zip(y).map(|(x, y)| a * x + b * y).collect()
    };

    let forcing = axpby(0.5, inp.load_new, 0.5, inp.load_old);
    let du = axpby(1.0, inp.u_new, -1.0, inp.u_old);
    let su = axpby(1.0, inp.u_new, 1.0, inp.u_old);
    let anti = block_mul(inp.stiffness, &du)
        .into_iter()
        .map(|v| 0.5 * (inp.nu + inp.nu_t) * v)
        .collect();
    let added = block_mul(inp.stiffness, &su)
        .into_iter()
        .map(|v| 0.5 * inp.nu_t * v)
        .collect();

    let own_new = interface_traces(space, inp.u_new, pairing, side);
    let own_old = interface_traces(space, inp.u_old, pairing, side);
    let pointwise = |f: &dyn Fn(usize) -> [f64; 2]| -> Vec<f64> {
        let g: Vec<[f64; 2]> = (0..pairing.n_points()).map(f).collect();
        interface_load(space, pairing, side, &g)
    };
    let (jn1, jn, jm1) = (inp.jump_new, inp.jump_old, inp.jump_older);
    let scale = |s: f64, v: [f64; 2]| [s * v[0], s * v[1]];
    let jump_diff = pointwise(&|q| scale(-0.5 * k * (jn1[q] - jn[q]), own_new[q]));
    let vel_diff = pointwise(&|q| {
        scale(0.5 * k * jn[q], [own_new[q][0] - own_old[q][0], own_new[q][1] - own_old[q][1]])
    });
    let lagged_ga = pointwise(&|q| scale(-k * jn[q].sqrt() * jm1[q].sqrt(), inp.other_old[q]));
    let drag_new = pointwise(&|q| scale(0.5 * k * jn1[q], inp.other_new[q]));
    let drag_old = pointwise(&|q| scale(0.5 * k * jn[q], inp.other_old[q]));

    let n_new = assemble_convection(space, inp.u_new);
    let n_old = assemble_convection(space, inp.u_old);
    let convection = axpby(0.5, &block_mul(&n_new, inp.u_new), -0.5, &block_mul(&n_old, inp.u_old));

    let dp: Vec<f64> = inp.p_new.iter().zip(inp.p_old).map(|(a, b)| a - b).collect();
    let mut pressure = vec![0.0; 2 * nd];
    let (px, py) = pressure.split_at_mut(nd);
    inp.div.0.mul_transpose_vec_add(-0.5, &dp, px);
    inp.div.1.mul_transpose_vec_add(-0.5, &dp, py);

    CorrectionTerms {
        terms: [
            forcing, anti, added, jump_diff, vel_diff, lagged_ga, drag_new, drag_old, convection, pressure,
        ],
    }
}
