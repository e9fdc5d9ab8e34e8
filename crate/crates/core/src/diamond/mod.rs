//! Diamond distance to the identity, `r(Phi) = (1/2) || Phi - id ||_diamond`.
//!
//! For a difference of trace-preserving maps with unnormalized Choi matrix
//! `C = d (J(Phi) - J(id))` the distance is the value of
//!
//! ```text
//! maximize  Re tr(C W)   s.t.  0 <= W <= 1 (x) rho,  rho >= 0,  tr rho = 1
//! minimize  ||Tr_out Z||_inf   s.t.  Z >= C,  Z >= 0
//! ```
//!
//! The pair is solved with the interior-point method in [`sdp`] after the
//! real embedding `A + iB -> [[A, -B], [B, A]]`. Bounds are certified from
//! the final iterate: `rho` yields a pure input whose output trace distance is
//! a lower bound, and `Z` shifted into exact feasibility yields an upper bound.

pub mod sdp;
pub mod seesaw;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::matkernel::{
    c, hermitian_part, identity, kron, partial_trace_first, psd_sqrt, spectral_unchecked, trace,
    ComplexMatrix,
};
use crate::stochastic::{stochastic_eigenvalue, STOCHASTIC_TOL};

pub use seesaw::{seesaw_lower_bound, seesaw_run, SeesawRun};

use sdp::{BlockSdp, IpmOptions, IpmStatus, SparseSym};

/// Certified gap below which an SDP solve counts as converged.
pub const SDP_GAP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiamondMethod {
    Sdp,
    StochasticFastPath,
    SeesawOnly,
}

impl std::fmt::Display for DiamondMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DiamondMethod::Sdp => "sdp",
            DiamondMethod::StochasticFastPath => "stochastic_fast_path",
            DiamondMethod::SeesawOnly => "seesaw_only",
        })
    }
}

/// Diamond distance with a certified bracket `primal_bound <= value <= dual_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiamondResult {
    pub value: f64,
    pub primal_bound: f64,
    pub dual_bound: f64,
    pub gap: f64,
    pub method: DiamondMethod,
}

/// `C = d (J(Phi) - J(id))` for a channel of dimension `d`.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub choi_difference: ComplexMatrix,
    pub dim: usize,
}

impl SdpProblem {
    pub fn from_channel(phi: &Channel) -> Self {
        let d = phi.dim();
        let id = Channel::identity(d);
        SdpProblem { choi_difference: (phi.choi() - id.choi()).scale(d as f64), dim: d }
    }

    /// Half the trace norm of `(1 (x) B) C (1 (x) B)^dagger`: the output trace
    /// distance for the input `col(B)`, which must be a unit vector.
    pub fn value_for_input(&self, b: &ComplexMatrix) -> f64 {
        let lift = kron(&identity(self.dim), b);
        let out = hermitian_part(&(&lift * &self.choi_difference * lift.adjoint()));
        0.5 * spectral_unchecked(&out).values.iter().map(|v| v.abs()).sum::<f64>()
    }
}

/// Outcome of [`watrous_sdp_solve`].
#[derive(Debug, Clone)]
pub struct SdpOutcome {
    /// Midpoint of the certified bracket.
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub iterations: usize,
    /// Certified gap within [`SDP_GAP_TOL`], whatever the solver status.
    pub converged: bool,
    pub status: IpmStatus,
    /// Optimal input state on the reference system.
    pub input_state: ComplexMatrix,
}

/// Real embedding `A + iB -> [[A, -B], [B, A]]`.
fn embed(m: &ComplexMatrix) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Inverse of [`embed`], averaging the two copies.
fn unembed(m: &DMatrix<f64>) -> ComplexMatrix {
    let n = m.nrows() / 2;
    ComplexMatrix::from_fn(n, n, |i, j| {
        let re = 0.5 * (m[(i, j)] + m[(n + i, n + j)]);
        let im = 0.5 * (m[(n + i, j)] - m[(i, n + j)]);
        c(re, im)
    })
}

#[derive(Clone, Copy)]
enum Part {
    Re,
    Im,
}

/// Adds `coeff * Re(X_ab)` (or `-coeff * Im(X_ab)`) for a Hermitian `n x n`
/// matrix stored embedded in `block`.
fn add_entry_functional(s: &mut SparseSym, block: usize, n: usize, a: usize, b: usize, part: Part, coeff: f64) {
    match part {
        Part::Re if a == b => {
            s.add_sym(block, a, a, 0.5 * coeff);
            s.add_sym(block, n + a, n + a, 0.5 * coeff);
        }
        Part::Re => {
            s.add_sym(block, a, b, 0.25 * coeff);
            s.add_sym(block, n + a, n + b, 0.25 * coeff);
        }
        Part::Im => {
            s.add_sym(block, a, n + b, 0.25 * coeff);
            s.add_sym(block, b, n + a, -0.25 * coeff);
        }
    }
}

/// Block layout: `0 = W`, `1 = V = 1 (x) rho - W`, `2 = rho`; equality
/// constraints `W + V - 1 (x) rho = 0` entrywise and `tr rho = 1`.
fn build_primal(problem: &SdpProblem) -> BlockSdp {
    let d = problem.dim;
    let n = d * d;
    let mut constraints = Vec::with_capacity(n * n + 1);
    for a in 0..n {
        for b in a..n {
            let parts: &[Part] = if a == b { &[Part::Re] } else { &[Part::Re, Part::Im] };
            for &part in parts {
                let mut s = SparseSym::new();
                add_entry_functional(&mut s, 0, n, a, b, part, 1.0);
                add_entry_functional(&mut s, 1, n, a, b, part, 1.0);
                let (oa, ia) = (a / d, a % d);
                let (ob, ib) = (b / d, b % d);
                if oa == ob {
                    add_entry_functional(&mut s, 2, d, ia, ib, part, -1.0);
                }
                constraints.push(s);
            }
        }
    }
    let mut tr = SparseSym::new();
    for i in 0..d {
        add_entry_functional(&mut tr, 2, d, i, i, Part::Re, 1.0);
    }
    constraints.push(tr);
    let mut b = vec![0.0; constraints.len()];
    *b.last_mut().unwrap() = 1.0;

    let c_w = embed(&problem.choi_difference) * -0.5;
    BlockSdp {
        block_sizes: vec![2 * n, 2 * n, 2 * d],
        c: vec![c_w, DMatrix::zeros(2 * n, 2 * n), DMatrix::zeros(2 * d, 2 * d)],
        constraints,
        b,
    }
}

/// Normalized PSD part of a Hermitian matrix, or the maximally mixed state
/// if nothing positive survives.
fn to_density(m: &ComplexMatrix) -> ComplexMatrix {
    let d = m.nrows();
    let clipped = spectral_unchecked(&hermitian_part(m)).map_values(|x| x.max(0.0));
    let tr = trace(&clipped).re;
    if tr > 1e-300 {
        clipped.scale(1.0 / tr)
    } else {
        identity(d).scale(1.0 / d as f64)
    }
}

/// Upper bound `lambda_max(Tr_out Z')` with `Z' = Z + delta 1` shifted so that
/// `Z' >= C` and `Z' >= 0` hold exactly.
fn certified_upper(problem: &SdpProblem, z: &ComplexMatrix) -> f64 {
    let d = problem.dim;
    let z = hermitian_part(z);
    let slack_c = spectral_unchecked(&hermitian_part(&(&z - &problem.choi_difference))).min();
    let slack_0 = spectral_unchecked(&z).min();
    let delta = (-slack_c).max(-slack_0).max(0.0);
    let shifted = &z + identity(d * d).scale(delta);
    let reduced = partial_trace_first(&shifted, d, d).expect("square by construction");
    spectral_unchecked(&hermitian_part(&reduced)).max()
}

/// Lower bound from the input state `rho`: the trace distance reached by its
/// purification `col(sqrt(rho))`.
fn certified_lower(problem: &SdpProblem, rho: &ComplexMatrix) -> f64 {
    let b = psd_sqrt(&hermitian_part(rho)).expect("Hermitian by construction");
    problem.value_for_input(&b)
}

/// Solves the diamond-distance SDP and certifies both bounds.
pub fn watrous_sdp_solve(problem: &SdpProblem) -> Result<SdpOutcome> {
    watrous_sdp_solve_with(problem, &IpmOptions::default())
}

pub fn watrous_sdp_solve_with(problem: &SdpProblem, opts: &IpmOptions) -> Result<SdpOutcome> {
    let d = problem.dim;
    let n = d * d;
    if problem.choi_difference.shape() != (n, n) {
        return Err(Error::shape(format!("({n}, {n})"), format!("{:?}", problem.choi_difference.shape())));
    }
    let residual = crate::matkernel::hermitian_residual(&problem.choi_difference);
    if residual > crate::matkernel::HERMITIAN_TOL * d as f64 {
        return Err(Error::NotHermitian { residual });
    }
    let problem = SdpProblem { choi_difference: hermitian_part(&problem.choi_difference), dim: d };
    let sol = build_primal(&problem).solve(opts);
    let rho = to_density(&unembed(&sol.x[2]));
    let z = unembed(&sol.s[1]).scale(2.0);
    let lower = certified_lower(&problem, &rho);
    let upper = certified_upper(&problem, &z).max(lower);
    let gap = upper - lower;
    Ok(SdpOutcome {
        value: 0.5 * (lower + upper),
        lower,
        upper,
        gap,
        iterations: sol.iterations,
        status: sol.status,
        converged: gap <= SDP_GAP_TOL,
        input_state: rho,
    })
}

#[derive(Debug, Clone)]
pub struct DiamondOptions {
    /// Skip the stochastic fast path.
    pub force_sdp: bool,
    /// Seed for the see-saw fallback.
    pub seed: u64,
    pub seesaw_restarts: usize,
}

impl Default for DiamondOptions {
    fn default() -> Self {
        DiamondOptions { force_sdp: false, seed: 0, seesaw_restarts: 8 }
    }
}

/// Diamond distance of a CPTP channel from the identity.
///
/// Stochastic channels take the fast path `1 - lambda` unless `force_sdp` is
/// set. Otherwise the SDP is solved; if its certified gap stays above
/// [`SDP_GAP_TOL`], the see-saw lower bound is folded in and the result is
/// reported with [`DiamondMethod::SeesawOnly`].
pub fn diamond_distance(phi: &Channel, opts: &DiamondOptions) -> Result<DiamondResult> {
    phi.ensure_cptp()?;
    if !opts.force_sdp {
        if let Some(lambda) = stochastic_eigenvalue(phi, STOCHASTIC_TOL) {
            let value = 1.0 - lambda;
            let infidelity = phi.process_infidelity();
            let (lo, hi) = (infidelity.min(value), value.max(infidelity));
            return Ok(DiamondResult {
                value,
                primal_bound: lo,
                dual_bound: hi,
                gap: hi - lo,
                method: DiamondMethod::StochasticFastPath,
            });
        }
    }
    let outcome = watrous_sdp_solve(&SdpProblem::from_channel(phi))?;
    if outcome.converged {
        return Ok(DiamondResult {
            value: outcome.value,
            primal_bound: outcome.lower,
            dual_bound: outcome.upper,
            gap: outcome.gap,
            method: DiamondMethod::Sdp,
        });
    }
    let seesaw = seesaw_lower_bound(phi, opts.seed, opts.seesaw_restarts)?;
    let lower = outcome.lower.max(seesaw);
    let upper = outcome.upper.max(lower);
    Ok(DiamondResult {
        value: lower,
        primal_bound: lower,
        dual_bound: upper,
        gap: upper - lower,
        method: DiamondMethod::SeesawOnly,
    })
}
