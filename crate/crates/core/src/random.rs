//! Seeded random matrices and channels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::Channel;
use crate::matkernel::{c, ComplexMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix of i.i.d. standard complex normal entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the phase fix on `diag(R)`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let qr = ginibre(rng, d, d).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { c(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `rank` Kraus operators cut from the first `d` columns of a Haar unitary
/// of size `rank * d`, so that `sum K^dagger K = 1` exactly.
pub fn random_kraus<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> Vec<ComplexMatrix> {
    let u = haar_unitary(rng, rank * d);
    (0..rank)
        .map(|k| u.view((k * d, 0), (d, d)).into_owned())
        .collect()
}

/// A random CPTP channel of Kraus rank at most `rank`.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> Channel {
    Channel::from_kraus(random_kraus(rng, d, rank.max(1)), d).expect("random Kraus set is well-formed")
}

/// Random density matrix from a Ginibre ensemble.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = ginibre(rng, d, d);
    let rho = &g * g.adjoint();
    let tr = crate::matkernel::trace(&rho).re;
    rho.scale(1.0 / tr)
}
