//! Alternating lower bound for the diamond distance.
//!
//! For a pure input `psi` on system and reference, the output difference is
//! `D(psi) = (Phi (x) id)(psi psi^dagger) - psi psi^dagger`. With
//! `P = sign(D(psi))` fixed, `Re tr(P D(psi'))` is maximized over unit `psi'`
//! by the top eigenvector of `Q(P) = sum_k (L_k^dagger (x) 1) P (L_k (x) 1) - P`.
//! Alternating the two steps never decreases `(1/2) ||D(psi)||_1`.

use rayon::prelude::*;

use crate::channel::Channel;
use crate::error::Result;
use crate::matkernel::{identity, kron, spectral_unchecked, ComplexMatrix, ComplexVector};
use crate::random::{ginibre, seeded_rng};

const MAX_ROUNDS: usize = 200;
const STALL_TOL: f64 = 1e-13;

/// Objective history of one see-saw run.
#[derive(Debug, Clone)]
pub struct SeesawRun {
    pub history: Vec<f64>,
}

impl SeesawRun {
    pub fn best(&self) -> f64 {
        self.history.iter().copied().fold(0.0, f64::max)
    }
}

struct Lifted {
    ops: Vec<ComplexMatrix>,
}

impl Lifted {
    fn new(phi: &Channel) -> Result<Self> {
        let d = phi.dim();
        let kraus = phi.kraus_or_canonical()?;
        let one = identity(d);
        Ok(Lifted { ops: kraus.iter().map(|k| kron(k, &one)).collect() })
    }

    fn output_difference(&self, psi: &ComplexVector) -> ComplexMatrix {
        let proj = psi * psi.adjoint();
        let mut out = -&proj;
        for l in &self.ops {
            out += l * &proj * l.adjoint();
        }
        out
    }

    fn value_and_sign(&self, psi: &ComplexVector) -> (f64, ComplexMatrix) {
        let eig = spectral_unchecked(&crate::matkernel::hermitian_part(&self.output_difference(psi)));
        let value = 0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>();
        (value, eig.map_values(|x| if x >= 0.0 { 1.0 } else { -1.0 }))
    }

    fn best_input(&self, sign: &ComplexMatrix) -> ComplexVector {
        let mut q = -sign;
        for l in &self.ops {
            q += l.adjoint() * sign * l;
        }
        let eig = spectral_unchecked(&crate::matkernel::hermitian_part(&q));
        eig.vectors[0].clone()
    }
}

fn run_from(lifted: &Lifted, mut psi: ComplexVector) -> SeesawRun {
    let mut history = Vec::new();
    let (mut value, mut sign) = lifted.value_and_sign(&psi);
    history.push(value);
    for _ in 0..MAX_ROUNDS {
        psi = lifted.best_input(&sign);
        let (next, next_sign) = lifted.value_and_sign(&psi);
        history.push(next);
        if next <= value + STALL_TOL {
            break;
        }
        value = next;
        sign = next_sign;
    }
    SeesawRun { history }
}

/// Runs the see-saw from `restarts` random inputs drawn from `seed + i`.
pub fn seesaw_run(phi: &Channel, seed: u64, restarts: usize) -> Result<Vec<SeesawRun>> {
    let lifted = Lifted::new(phi)?;
    let n = phi.dim() * phi.dim();
    Ok((0..restarts.max(1) as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded_rng(seed.wrapping_add(i));
            let g = ginibre(&mut rng, n, 1);
            let psi = g.column(0).normalize();
            run_from(&lifted, psi)
        })
        .collect())
}

/// Best see-saw value over all restarts; a valid lower bound on the distance.
pub fn seesaw_lower_bound(phi: &Channel, seed: u64, restarts: usize) -> Result<f64> {
    Ok(seesaw_run(phi, seed, restarts)?.iter().map(SeesawRun::best).fold(0.0, f64::max))
}
