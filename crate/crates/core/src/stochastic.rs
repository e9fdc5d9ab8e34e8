//! Stochastic channels: `Phi = lambda id + (1 - lambda) Phi_perp` with
//! `J(Phi_perp) col(1) = 0`.
//!
//! Detection works on the Choi side: `Phi` is stochastic exactly when
//! `col(1)` is an eigenvector of `J(Phi)` with a strictly positive eigenvalue.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::matkernel::{
    c, col, hs_inner, identity, kron, ket_bra, paulis, sigma_z, spectral_unchecked, trace,
    trace_norm, zeros, ComplexMatrix,
};
use crate::random::{ginibre, seeded_rng};

/// Default tolerance for [`stochastic_eigenvalue`].
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// Returns `lambda` when `J(Phi) col(1) = lambda col(1)` with `lambda > tol`.
///
/// The eigenvector test is entrywise with slack `tol * sqrt(d)`; `lambda` is
/// read off as `col(1)^dagger J col(1) / d`, which is the process fidelity.
pub fn stochastic_eigenvalue(phi: &Channel, tol: f64) -> Option<f64> {
    let d = phi.dim();
    let w = phi.choi_times_identity_vector();
    let ones = col(&identity(d));
    let lambda = (ones.adjoint() * &w)[(0, 0)].re / d as f64;
    let slack = tol * (d as f64).sqrt();
    let fits = w.iter().zip(ones.iter()).all(|(wi, oi)| (wi - oi * lambda).norm() <= slack);
    (fits && lambda > tol).then_some(lambda)
}

pub fn is_stochastic(phi: &Channel) -> bool {
    stochastic_eigenvalue(phi, STOCHASTIC_TOL).is_some()
}

/// `Phi = lambda id + (1 - lambda) Phi_perp`; `orthogonal_part` is absent when `lambda = 1`.
#[derive(Debug, Clone)]
pub struct StochasticDecomposition {
    pub lambda: f64,
    pub orthogonal_part: Option<Channel>,
}

impl StochasticDecomposition {
    pub fn dim(&self) -> Option<usize> {
        self.orthogonal_part.as_ref().map(Channel::dim)
    }

    /// `lambda J(id) + (1 - lambda) J(Phi_perp)` as a channel of dimension `d`.
    pub fn reconstruct(&self, d: usize) -> Result<Channel> {
        match &self.orthogonal_part {
            None => Ok(Channel::identity(d)),
            Some(perp) => compose(self.lambda, perp),
        }
    }
}

/// Splits a stochastic channel into its noiseless weight and orthogonal error channel.
pub fn decompose(phi: &Channel) -> Result<StochasticDecomposition> {
    phi.ensure_cptp()?;
    let lambda = stochastic_eigenvalue(phi, STOCHASTIC_TOL).ok_or(Error::NotStochastic)?;
    if 1.0 - lambda <= STOCHASTIC_TOL {
        return Ok(StochasticDecomposition { lambda, orthogonal_part: None });
    }
    let d = phi.dim();
    let id = Channel::identity(d);
    let perp_choi = (phi.choi() - id.choi().scale(lambda)).scale(1.0 / (1.0 - lambda));
    let perp = Channel::from_choi(perp_choi, d)?;
    Ok(StochasticDecomposition { lambda, orthogonal_part: Some(perp) })
}

/// `lambda id + (1 - lambda) Phi_perp`. The error channel must be orthogonal
/// to the identity, `J(Phi_perp) col(1) = 0`.
pub fn compose(lambda: f64, orthogonal_part: &Channel) -> Result<Channel> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} outside (0, 1]")));
    }
    let overlap = max_abs_vec(&orthogonal_part.choi_times_identity_vector());
    if overlap > STOCHASTIC_TOL {
        return Err(Error::InvalidParameter(format!(
            "error channel is not orthogonal to the identity (|J col(1)| = {overlap:e})"
        )));
    }
    let id = Channel::identity(orthogonal_part.dim());
    Channel::mix(&[(lambda, &id), (1.0 - lambda, orthogonal_part)])
}

fn max_abs_vec(v: &crate::matkernel::ComplexVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The non-unital stochastic channel on `C^2 (x) C^m`, `d = 2m`:
/// Kraus `sqrt(lambda) 1`, and `sqrt(1 - lambda) sigma_z (x) |0><j|` for `j < m`.
pub fn nonunital_example(lambda: f64, d: usize) -> Result<Channel> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} outside (0, 1]")));
    }
    if d < 4 || !d.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("dimension {d} must be even and at least 4")));
    }
    let m = d / 2;
    let mut kraus = vec![identity(d).scale(lambda.sqrt())];
    if lambda < 1.0 {
        let w = (1.0 - lambda).sqrt();
        for j in 0..m {
            kraus.push(kron(&sigma_z(), &ket_bra(m, 0, j)).scale(w));
        }
    }
    Channel::from_kraus(kraus, d)
}

/// `Dep_alpha(X) = alpha X + (1 - alpha) tr(X) 1/d`, with Choi `alpha J(id) + (1 - alpha) 1/d^2`.
pub fn depolarizing(alpha: f64, d: usize) -> Result<Channel> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside [0, 1]")));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let n = d * d;
    let choi = Channel::identity(d).choi().scale(alpha) + identity(n).scale((1.0 - alpha) / n as f64);
    Channel::from_choi(choi, d)?.with_canonical_kraus()
}

/// The `n`-qubit Pauli operator with base-4 digits `index` (first qubit most
/// significant; digits 0..3 select `1, X, Y, Z`).
pub fn pauli_string(n: usize, index: usize) -> ComplexMatrix {
    let single = paulis();
    let mut out = identity(1);
    for q in (0..n).rev() {
        let digit = (index / 4usize.pow(q as u32)) % 4;
        out = kron(&out, &single[digit]);
    }
    out
}

/// Pauli channel with Kraus `sqrt(p_P) P`; `probabilities` has length `4^n`.
pub fn pauli_channel(probabilities: &[f64]) -> Result<Channel> {
    let len = probabilities.len();
    let n = (0..8).find(|&n| 4usize.pow(n) == len).filter(|&n| n > 0).ok_or_else(|| {
        Error::InvalidParameter(format!("{len} probabilities is not a power of 4"))
    })? as usize;
    if probabilities.iter().any(|&p| !p.is_finite() || p < 0.0) {
        return Err(Error::InvalidParameter("probabilities must be nonnegative".into()));
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("probabilities sum to {total}, not 1")));
    }
    let kraus = probabilities
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, &p)| pauli_string(n, i).scale(p.sqrt()))
        .collect();
    Channel::from_kraus(kraus, 1 << n)
}

/// Bloch-ball parameters of a qubit map: distortion `eta` and the image
/// `kappa` of the maximally mixed state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitParams {
    pub eta: [f64; 3],
    pub kappa: [f64; 3],
}

impl QubitParams {
    pub fn new(eta: [f64; 3], kappa: [f64; 3]) -> Self {
        QubitParams { eta, kappa }
    }

    pub fn is_finite(&self) -> bool {
        self.eta.iter().chain(&self.kappa).all(|x| x.is_finite())
    }
}

/// The qubit Choi matrix in Bloch parameters, scaled by `1/4` to unit trace.
///
/// Complete positivity is not implied by the parameters; check with
/// [`Channel::validate`].
pub fn qubit_choi_bz(params: &QubitParams) -> Result<Channel> {
    if !params.is_finite() {
        return Err(Error::InvalidParameter("non-finite qubit parameters".into()));
    }
    let [ex, ey, ez] = params.eta;
    let [kx, ky, kz] = params.kappa;
    let k = c(kx, ky);
    let kc = k.conj();
    let r = |x: f64| c(x, 0.0);
    let entries = [
        r(1.0 + ez + kz), r(0.0), k, r(ex + ey),
        r(0.0), r(1.0 - ez + kz), r(ex - ey), k,
        kc, r(ex - ey), r(1.0 - ez - kz), r(0.0),
        r(ex + ey), kc, r(0.0), r(1.0 + ez - kz),
    ];
    let choi = ComplexMatrix::from_row_slice(4, 4, &entries).scale(0.25);
    Channel::from_choi(choi, 2)
}

/// Removes the identity component: `K - (tr K / d) 1`.
pub fn traceless_part(k: &ComplexMatrix) -> ComplexMatrix {
    let d = k.nrows();
    k - identity(d) * (trace(k) / d as f64)
}

/// HS Gram-Schmidt; linearly dependent inputs are dropped.
fn gram_schmidt(mats: Vec<ComplexMatrix>) -> Vec<ComplexMatrix> {
    let mut out: Vec<ComplexMatrix> = Vec::new();
    for mut m in mats {
        for q in &out {
            let proj = hs_inner(q, &m).expect("equal shapes");
            m -= q * proj;
        }
        let norm = hs_inner(&m, &m).expect("equal shapes").re.sqrt();
        if norm > 1e-12 {
            out.push(m.scale(1.0 / norm));
        }
    }
    out
}

/// Outcome of [`complete_traceless`].
#[derive(Debug, Clone)]
pub struct TracelessCompletion {
    pub kraus: Vec<ComplexMatrix>,
    /// `max |sum K^dagger K - 1|`
    pub tp_residual: f64,
    /// `max_k |tr K_k|`
    pub trace_residual: f64,
    pub iterations: usize,
}

/// Pushes a set of Kraus generators onto `{traceless K_k, sum K^dagger K = 1}`
/// by alternating the traceless projection with the polar normalization
/// `K_k <- K_k S^{-1/2}`, `S = sum K^dagger K`.
///
/// Ends on a normalization step, so the returned set is trace preserving to
/// rounding; `trace_residual` records how far it is from traceless.
pub fn complete_traceless(generators: &[ComplexMatrix], max_iter: usize) -> Option<TracelessCompletion> {
    let d = generators.first()?.nrows();
    let mut ks: Vec<ComplexMatrix> = generators.iter().map(traceless_part).collect();
    let mut trace_residual = f64::INFINITY;
    let mut iterations = 0;
    for it in 0..max_iter.max(1) {
        iterations = it + 1;
        for k in ks.iter_mut() {
            *k = traceless_part(k);
        }
        let gram = kraus_gram(&ks, d);
        let eig = spectral_unchecked(&gram);
        if eig.min() <= 1e-12 * eig.max().max(1e-300) || eig.min() <= 0.0 {
            return None;
        }
        let inv_sqrt = eig.map_values(|x| 1.0 / x.sqrt());
        for k in ks.iter_mut() {
            *k = &*k * &inv_sqrt;
        }
        trace_residual = ks.iter().map(|k| trace(k).norm()).fold(0.0, f64::max);
        if trace_residual <= 1e-13 {
            break;
        }
    }
    let tp_residual = crate::matkernel::max_abs_diff(&kraus_gram(&ks, d), &identity(d));
    Some(TracelessCompletion { kraus: ks, tp_residual, trace_residual, iterations })
}

fn kraus_gram(ks: &[ComplexMatrix], d: usize) -> ComplexMatrix {
    let mut gram = zeros(d, d);
    for k in ks {
        gram += k.adjoint() * k;
    }
    gram
}

/// Random CPTP channel orthogonal to the identity, with `rank` traceless Kraus operators.
///
/// Generators are Ginibre matrices made traceless and HS-orthogonalized,
/// then completed by [`complete_traceless`]. Draws are retried until the
/// completion converges.
pub fn random_orthogonal_channel<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> Channel {
    assert!(d >= 2, "no traceless channels in dimension 1");
    let rank = rank.clamp(1, d * d - 1);
    loop {
        let gens: Vec<_> = (0..rank).map(|_| traceless_part(&ginibre(rng, d, d))).collect();
        let gens = gram_schmidt(gens);
        if gens.len() < rank {
            continue;
        }
        if let Some(done) = complete_traceless(&gens, 500) {
            if done.trace_residual <= 1e-12 && done.tp_residual <= 1e-12 {
                return Channel::from_kraus(done.kraus, d).expect("completed Kraus set is well-formed");
            }
        }
    }
}

/// Random stochastic channel `lambda id + (1 - lambda) Phi_perp` with `lambda`
/// uniform in `[lo, hi]`.
pub fn random_stochastic_channel<R: Rng + ?Sized>(rng: &mut R, d: usize, lo: f64, hi: f64) -> (f64, Channel) {
    let lambda = rng.random_range(lo..=hi);
    let rank = rng.random_range(1..=d * d - 1);
    let perp = random_orthogonal_channel(rng, d, rank);
    let ch = compose(lambda, &perp).expect("orthogonal part passes the overlap check");
    (lambda, ch)
}

/// Result of [`search_nonunital`].
#[derive(Debug, Clone)]
pub struct NonunitalSearch {
    /// `|| Phi(1) - 1 ||_1` of the witness.
    pub best_nonunitality: f64,
    pub lambda: f64,
    pub witness: Channel,
    pub tp_residual: f64,
    /// Best value per restart, in restart order.
    pub per_restart: Vec<f64>,
}

/// Search configuration for [`search_nonunital`].
#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Number of traceless Kraus generators; defaults to `d`.
    pub generators: Option<usize>,
    /// Fix `lambda`; when absent it is optimized through a logistic parameter.
    pub lambda: Option<f64>,
    /// Initial compass step.
    pub initial_step: f64,
    pub min_step: f64,
    /// Objective evaluations per restart.
    pub max_evaluations: usize,
    /// Weight of the trace-preservation penalty.
    pub penalty: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            generators: None,
            lambda: None,
            initial_step: 0.5,
            min_step: 1e-4,
            max_evaluations: 40_000,
            penalty: 1e3,
        }
    }
}

struct SearchProblem {
    d: usize,
    generators: usize,
    lambda: Option<f64>,
    penalty: f64,
}

struct Evaluated {
    value: f64,
    nonunitality: f64,
    lambda: f64,
    channel: Option<Channel>,
    tp_residual: f64,
}

impl SearchProblem {
    fn len(&self) -> usize {
        self.generators * self.d * self.d * 2 + usize::from(self.lambda.is_none())
    }

    fn decode(&self, theta: &[f64]) -> (Vec<ComplexMatrix>, f64) {
        let d = self.d;
        let per = d * d * 2;
        let gens = (0..self.generators)
            .map(|g| {
                let p = &theta[g * per..(g + 1) * per];
                ComplexMatrix::from_fn(d, d, |i, j| c(p[2 * (i * d + j)], p[2 * (i * d + j) + 1]))
            })
            .collect();
        let lambda = match self.lambda {
            Some(l) => l,
            None => 1.0 / (1.0 + (-theta[self.len() - 1]).exp()),
        };
        (gens, lambda)
    }

    /// Nonunitality minus the penalty on whatever trace-preservation and
    /// tracelessness residual survives completion.
    fn evaluate(&self, theta: &[f64], keep: bool) -> Evaluated {
        let d = self.d;
        let (gens, lambda) = self.decode(theta);
        let fail = Evaluated { value: f64::NEG_INFINITY, nonunitality: 0.0, lambda, channel: None, tp_residual: f64::INFINITY };
        let Some(done) = complete_traceless(&gens, 200) else { return fail };
        let residual = done.tp_residual + done.trace_residual;
        let Ok(perp) = Channel::from_kraus(done.kraus, d) else { return fail };
        let image = perp.apply(&identity(d)).expect("dimension matches");
        let nonunitality = (1.0 - lambda) * trace_norm(&(image - identity(d))).expect("square");
        let channel = if keep {
            let id = Channel::identity(d);
            Channel::mix(&[(lambda, &id), (1.0 - lambda, &perp)]).ok()
        } else {
            None
        };
        Evaluated {
            value: nonunitality - self.penalty * residual,
            nonunitality,
            lambda,
            channel,
            tp_residual: done.tp_residual,
        }
    }
}

/// Compass search: each coordinate is tried at `+step` and `-step`, keeping
/// improvements; the step halves after a sweep with no improvement.
fn compass_ascent(problem: &SearchProblem, mut theta: Vec<f64>, opts: &SearchOptions) -> (Vec<f64>, f64) {
    let mut best = problem.evaluate(&theta, false).value;
    let mut step = opts.initial_step;
    let mut evals = 1;
    while step >= opts.min_step && evals < opts.max_evaluations {
        let mut improved = false;
        for i in 0..theta.len() {
            for sign in [1.0, -1.0] {
                let old = theta[i];
                theta[i] = old + sign * step;
                let v = problem.evaluate(&theta, false).value;
                evals += 1;
                if v > best {
                    best = v;
                    improved = true;
                    break;
                }
                theta[i] = old;
            }
            if evals >= opts.max_evaluations {
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (theta, best)
}

/// Multi-start search for the most non-unital stochastic channel
/// `lambda id + (1 - lambda) Phi_perp` in dimension `d`, measured by
/// `|| Phi(1) - 1 ||_1`.
///
/// Restart `i` draws its start from `seed + i`; restarts run in parallel and
/// are merged in index order, so output depends only on the arguments.
pub fn search_nonunital(d: usize, seed: u64, restarts: usize, opts: &SearchOptions) -> Result<NonunitalSearch> {
    if d < 2 {
        return Err(Error::InvalidParameter("search needs d >= 2".into()));
    }
    if restarts == 0 {
        return Err(Error::InvalidParameter("need at least one restart".into()));
    }
    if let Some(l) = opts.lambda {
        if !(l > 0.0 && l <= 1.0) {
            return Err(Error::InvalidParameter(format!("lambda = {l} outside (0, 1]")));
        }
    }
    let problem = SearchProblem {
        d,
        generators: opts.generators.unwrap_or(d).clamp(1, d * d - 1),
        lambda: opts.lambda,
        penalty: opts.penalty,
    };
    let finals: Vec<(Vec<f64>, f64)> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded_rng(seed.wrapping_add(i as u64));
            let theta: Vec<f64> = (0..problem.len()).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
            compass_ascent(&problem, theta, opts)
        })
        .collect();
    let mut best_index = 0;
    for (i, (_, v)) in finals.iter().enumerate() {
        if *v > finals[best_index].1 {
            best_index = i;
        }
    }
    let best = problem.evaluate(&finals[best_index].0, true);
    let witness = best.channel.ok_or_else(|| Error::InvalidParameter("no restart produced a valid channel".into()))?;
    Ok(NonunitalSearch {
        best_nonunitality: best.nonunitality,
        lambda: best.lambda,
        witness,
        tp_residual: best.tp_residual,
        per_restart: finals.iter().map(|(_, v)| *v).collect(),
    })
}

/// `|| Phi(1) - 1 ||_1`.
pub fn nonunitality_trace_norm(phi: &Channel) -> f64 {
    let d = phi.dim();
    let image = phi.apply(&identity(d)).expect("dimension matches");
    trace_norm(&(image - identity(d))).expect("square")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::{max_abs_diff, sigma_x, sigma_y};
    use crate::random::random_channel;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eigenvalue_examples() {
        assert_abs_diff_eq!(stochastic_eigenvalue(&Channel::identity(2), 1e-9).unwrap(), 1.0, epsilon = 1e-14);
        let ex = nonunital_example(0.9, 4).unwrap();
        assert_abs_diff_eq!(stochastic_eigenvalue(&ex, 1e-9).unwrap(), 0.9, epsilon = 1e-12);
        assert!(stochastic_eigenvalue(&Channel::unitary(sigma_x()).unwrap(), 1e-9).is_none());
    }

    #[test]
    fn eigenvalue_equals_fidelity() {
        let mut rng = seeded_rng(3);
        for d in 2..=4 {
            let (lambda, ch) = random_stochastic_channel(&mut rng, d, 0.1, 0.95);
            let detected = stochastic_eigenvalue(&ch, 1e-9).unwrap();
            assert_abs_diff_eq!(detected, lambda, epsilon = 1e-10);
            assert_abs_diff_eq!(detected, ch.process_fidelity(), epsilon = 1e-10);
        }
    }

    #[test]
    fn generic_channels_are_not_stochastic() {
        let mut rng = seeded_rng(4);
        for d in 2..=4 {
            assert!(!is_stochastic(&random_channel(&mut rng, d, 3)));
        }
    }

    #[test]
    fn decompose_identity() {
        let dec = decompose(&Channel::identity(3)).unwrap();
        assert_abs_diff_eq!(dec.lambda, 1.0, epsilon = 1e-14);
        assert!(dec.orthogonal_part.is_none());
    }

    #[test]
    fn decompose_depolarizing() {
        let alpha = 0.6;
        let dep = depolarizing(alpha, 2).unwrap();
        let dec = decompose(&dep).unwrap();
        assert_abs_diff_eq!(dec.lambda, alpha + (1.0 - alpha) / 4.0, epsilon = 1e-12);
        let perp = dec.orthogonal_part.unwrap();
        let uniform = Channel::mix(&[
            (1.0 / 3.0, &Channel::unitary(sigma_x()).unwrap()),
            (1.0 / 3.0, &Channel::unitary(sigma_y()).unwrap()),
            (1.0 / 3.0, &Channel::unitary(sigma_z()).unwrap()),
        ])
        .unwrap();
        assert!(perp.choi_distance(&uniform) <= 1e-12);
        assert!(perp.validate().is_cptp());
    }

    #[test]
    fn decompose_nonunital_example() {
        let ex = nonunital_example(0.7, 4).unwrap();
        let dec = decompose(&ex).unwrap();
        assert_abs_diff_eq!(dec.lambda, 0.7, epsilon = 1e-12);
        let perp = dec.orthogonal_part.clone().unwrap();
        assert!(perp.validate().is_cptp());
        let expect = Channel::from_kraus(
            vec![kron(&sigma_z(), &ket_bra(2, 0, 0)), kron(&sigma_z(), &ket_bra(2, 0, 1))],
            4,
        )
        .unwrap();
        assert!(perp.choi_distance(&expect) <= 1e-12);
        assert!(dec.reconstruct(4).unwrap().choi_distance(&ex) <= 1e-12);
        assert!(max_abs_vec(&perp.choi_times_identity_vector()) <= 1e-12);
    }

    #[test]
    fn decompose_rejects_non_stochastic() {
        assert!(matches!(decompose(&Channel::unitary(sigma_x()).unwrap()), Err(Error::NotStochastic)));
    }

    #[test]
    fn nonunital_example_checks() {
        assert!(nonunital_example(1.0, 4).unwrap().choi_distance(&Channel::identity(4)) <= 1e-15);
        let ex6 = nonunital_example(0.9, 6).unwrap();
        assert_abs_diff_eq!(stochastic_eigenvalue(&ex6, 1e-9).unwrap(), 0.9, epsilon = 1e-12);
        let r = ex6.validate();
        assert!(r.is_cptp() && !r.is_unital);
        assert!(nonunital_example(0.9, 5).is_err());
        assert!(nonunital_example(0.9, 2).is_err());
        assert!(nonunital_example(0.0, 4).is_err());
        assert!(nonunital_example(1.1, 4).is_err());
    }

    #[test]
    fn depolarizing_checks() {
        assert!(depolarizing(1.0, 3).unwrap().choi_distance(&Channel::identity(3)) <= 1e-15);
        assert_abs_diff_eq!(depolarizing(0.0, 2).unwrap().process_fidelity(), 0.25, epsilon = 1e-15);
        assert!(depolarizing(1.5, 2).is_err());
        assert!(depolarizing(0.5, 3).unwrap().validate().is_cptp());
    }

    #[test]
    fn pauli_channel_checks() {
        let ch = pauli_channel(&[0.9, 0.1, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(stochastic_eigenvalue(&ch, 1e-9).unwrap(), 0.9, epsilon = 1e-12);
        assert!(ch.validate().is_unital);
        assert!(pauli_channel(&[0.5, 0.5, 0.1]).is_err());
        assert!(pauli_channel(&[0.5, 0.6, 0.0, -0.1]).is_err());
        let mut probs = vec![0.0; 16];
        probs[0] = 0.7;
        probs[5] = 0.3;
        let two = pauli_channel(&probs).unwrap();
        assert_eq!(two.dim(), 4);
        assert!(two.validate().is_cptp());
        assert_eq!(pauli_string(2, 5), kron(&sigma_x(), &sigma_x()));
        assert_eq!(pauli_string(2, 3), kron(&identity(2), &sigma_z()));
    }

    #[test]
    fn bz_examples() {
        let dep = qubit_choi_bz(&QubitParams::new([0.0; 3], [0.0; 3])).unwrap();
        assert!(max_abs_diff(dep.choi(), &identity(4).scale(0.25)) <= 1e-15);

        let id = qubit_choi_bz(&QubitParams::new([1.0; 3], [0.0; 3])).unwrap();
        assert!(id.choi_distance(&Channel::identity(2)) <= 1e-15);

        let gamma: f64 = 0.2;
        let ad = qubit_choi_bz(&QubitParams::new([(1.0 - gamma).sqrt(), (1.0 - gamma).sqrt(), 1.0 - gamma], [0.0, 0.0, gamma]))
            .unwrap();
        let r = ad.validate();
        assert!(r.is_cptp(), "{r:?}");
        assert!(!r.is_unital);
    }

    #[test]
    fn bz_unital_iff_kappa_zero() {
        let mut rng = seeded_rng(12);
        for _ in 0..200 {
            let eta = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let kappa = [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)];
            let ch = qubit_choi_bz(&QubitParams::new(eta, kappa)).unwrap();
            assert!(ch.validate().is_tp);
            assert!(!ch.validate().is_unital);
            let ch0 = qubit_choi_bz(&QubitParams::new(eta, [0.0; 3])).unwrap();
            assert!(ch0.validate().unitality_residual <= 1e-14);
        }
    }

    #[test]
    fn completion_produces_traceless_isometry() {
        let mut rng = seeded_rng(8);
        for d in 2..=4 {
            let ch = random_orthogonal_channel(&mut rng, d, d);
            for k in ch.kraus().unwrap() {
                assert!(trace(k).norm() <= 1e-12);
            }
            assert!(ch.validate().tp_residual <= 1e-12);
            assert!(max_abs_vec(&ch.choi_times_identity_vector()) <= 1e-12);
        }
    }

    #[test]
    fn convex_combinations_stay_stochastic() {
        let mut rng = seeded_rng(22);
        for d in 2..=3 {
            let (la, a) = random_stochastic_channel(&mut rng, d, 0.2, 0.9);
            let (lb, b) = random_stochastic_channel(&mut rng, d, 0.2, 0.9);
            let m = Channel::mix(&[(0.25, &a), (0.75, &b)]).unwrap();
            let lm = stochastic_eigenvalue(&m, 1e-9).unwrap();
            assert_abs_diff_eq!(lm, 0.25 * la + 0.75 * lb, epsilon = 1e-10);
        }
    }

    #[test]
    fn qubit_search_finds_only_unital_channels() {
        let opts = SearchOptions { max_evaluations: 2_000, ..Default::default() };
        let out = search_nonunital(2, 5, 3, &opts).unwrap();
        assert!(out.best_nonunitality <= 1e-6, "{}", out.best_nonunitality);
        assert!(out.tp_residual <= 1e-6);
    }

    #[test]
    fn search_is_deterministic() {
        let opts = SearchOptions { max_evaluations: 500, lambda: Some(0.9), ..Default::default() };
        let a = search_nonunital(3, 77, 2, &opts).unwrap();
        let b = search_nonunital(3, 77, 2, &opts).unwrap();
        assert_eq!(a.best_nonunitality.to_bits(), b.best_nonunitality.to_bits());
        assert_eq!(a.per_restart, b.per_restart);
        assert_eq!(a.witness.choi(), b.witness.choi());
    }
}
