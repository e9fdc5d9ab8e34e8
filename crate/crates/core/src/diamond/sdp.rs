//! Dense primal-dual interior-point method for block-diagonal real SDPs.
//!
//! ```text
//! primal:  minimize <C, X>  s.t.  <A_i, X> = b_i,  X >= 0
//! dual:    maximize b^T y   s.t.  sum_i y_i A_i + S = C,  S >= 0
//! ```
//!
//! `X`, `S`, `C` and the `A_i` are block diagonal with real symmetric blocks.
//! Constraint matrices are sparse. Each iteration takes an infeasible
//! path-following step along the HKM direction with a fixed centering
//! parameter, solving the Schur complement system by dense Cholesky.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// One entry `(block, row, col, value)`; both `(r, c)` and `(c, r)` are listed
/// for off-diagonal positions, so `<A, X> = sum value * X[block][(row, col)]`.
#[derive(Debug, Clone, Default)]
pub struct SparseSym {
    pub entries: Vec<(usize, usize, usize, f64)>,
}

impl SparseSym {
    pub fn new() -> Self {
        SparseSym::default()
    }

    /// Adds `value` at `(r, c)` and, when off-diagonal, at `(c, r)`.
    pub fn add_sym(&mut self, block: usize, r: usize, c: usize, value: f64) {
        if value == 0.0 {
            return;
        }
        self.entries.push((block, r, c, value));
        if r != c {
            self.entries.push((block, c, r, value));
        }
    }

    fn dot(&self, x: &[DMatrix<f64>]) -> f64 {
        self.entries.iter().map(|&(b, r, c, v)| v * x[b][(r, c)]).sum()
    }

    fn add_scaled_to(&self, alpha: f64, out: &mut [DMatrix<f64>]) {
        for &(b, r, c, v) in &self.entries {
            out[b][(r, c)] += alpha * v;
        }
    }
}

#[derive(Debug, Clone)]
pub struct BlockSdp {
    pub block_sizes: Vec<usize>,
    pub c: Vec<DMatrix<f64>>,
    pub constraints: Vec<SparseSym>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct IpmOptions {
    pub max_iterations: usize,
    /// Centering parameter `sigma` in `XS = sigma mu I`.
    pub centering: f64,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    /// Relative duality gap target.
    pub gap_tol: f64,
    /// Relative primal and dual infeasibility target.
    pub feasibility_tol: f64,
}

impl Default for IpmOptions {
    fn default() -> Self {
        IpmOptions {
            max_iterations: 200,
            centering: 0.1,
            step_fraction: 0.95,
            gap_tol: 1e-9,
            feasibility_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IpmStatus {
    Converged,
    IterationLimit,
    /// The Schur complement or an iterate lost definiteness.
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct IpmSolution {
    pub x: Vec<DMatrix<f64>>,
    pub y: DVector<f64>,
    pub s: Vec<DMatrix<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
    pub status: IpmStatus,
}

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn frobenius(a: &[DMatrix<f64>]) -> f64 {
    a.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest `alpha` keeping `X + alpha dX` positive definite (infinite if unbounded).
fn max_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> Option<f64> {
    let chol = x.clone().cholesky()?;
    let l = chol.l();
    let left = l.solve_lower_triangular(dx)?;
    let both = l.solve_lower_triangular(&left.transpose())?;
    let min = symmetrize(&both).symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    Some(if min >= 0.0 { f64::INFINITY } else { -1.0 / min })
}

impl BlockSdp {
    fn apply_a(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(self.constraints.len(), self.constraints.iter().map(|a| a.dot(x)))
    }

    fn apply_at(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out = self.zeros();
        for (a, &yi) in self.constraints.iter().zip(y.iter()) {
            a.add_scaled_to(yi, &mut out);
        }
        out
    }

    fn zeros(&self) -> Vec<DMatrix<f64>> {
        self.block_sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect()
    }

    /// `M_ij = <A_i, X A_j S^{-1}>`.
    fn schur_complement(&self, x: &[DMatrix<f64>], s_inv: &[DMatrix<f64>]) -> DMatrix<f64> {
        let m = self.constraints.len();
        let rows: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|i| {
                let ai = &self.constraints[i];
                (0..=i)
                    .map(|j| {
                        let aj = &self.constraints[j];
                        let mut acc = 0.0;
                        for &(b, p, q, v) in &ai.entries {
                            let xb = &x[b];
                            let sb = &s_inv[b];
                            for &(b2, p2, q2, v2) in &aj.entries {
                                if b2 == b {
                                    acc += v * v2 * xb[(q, p2)] * sb[(q2, p)];
                                }
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let mut out = DMatrix::zeros(m, m);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }

    /// Runs the interior-point iteration from a scaled-identity start.
    pub fn solve(&self, opts: &IpmOptions) -> IpmSolution {
        let total_dim: usize = self.block_sizes.iter().sum();
        let c_norm = frobenius(&self.c);
        let b_norm = self.b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let b = DVector::from_column_slice(&self.b);

        let x_scale = (total_dim as f64).sqrt().max(1.0);
        let s_scale = (1.0 + c_norm).max((total_dim as f64).sqrt());
        let mut x: Vec<DMatrix<f64>> = self.block_sizes.iter().map(|&n| DMatrix::identity(n, n) * x_scale).collect();
        let mut s: Vec<DMatrix<f64>> = self.block_sizes.iter().map(|&n| DMatrix::identity(n, n) * s_scale).collect();
        let mut y = DVector::zeros(self.constraints.len());

        let mut status = IpmStatus::IterationLimit;
        let mut iterations = 0;
        let mut pinf;
        let mut dinf;
        loop {
            let rp = &b - self.apply_a(&x);
            let at_y = self.apply_at(&y);
            let rd: Vec<DMatrix<f64>> = (0..x.len()).map(|k| &self.c[k] - &s[k] - &at_y[k]).collect();
            pinf = rp.norm() / (1.0 + b_norm);
            dinf = frobenius(&rd) / (1.0 + c_norm);
            let pobj = inner(&self.c, &x);
            let dobj = b.dot(&y);
            let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
            if rel_gap <= opts.gap_tol && pinf <= opts.feasibility_tol && dinf <= opts.feasibility_tol {
                status = IpmStatus::Converged;
                break;
            }
            if iterations >= opts.max_iterations {
                break;
            }
            iterations += 1;

            let mu = inner(&x, &s) / total_dim as f64;
            let Some(s_inv) = s.iter().map(|sk| sk.clone().cholesky().map(|ch| ch.inverse())).collect::<Option<Vec<_>>>()
            else {
                status = IpmStatus::NumericalFailure;
                break;
            };

            // R_c = sigma mu S^{-1} - X;  h = rp - A(R_c - X Rd S^{-1})
            let sigma_mu = opts.centering * mu;
            let rc: Vec<DMatrix<f64>> = (0..x.len()).map(|k| &s_inv[k] * sigma_mu - &x[k]).collect();
            let shifted: Vec<DMatrix<f64>> = (0..x.len()).map(|k| &rc[k] - &x[k] * &rd[k] * &s_inv[k]).collect();
            let h = &rp - self.apply_a(&shifted);

            let mut schur = self.schur_complement(&x, &s_inv);
            let dy = match solve_spd(&mut schur, &h) {
                Some(dy) => dy,
                None => {
                    status = IpmStatus::NumericalFailure;
                    break;
                }
            };
            let at_dy = self.apply_at(&dy);
            let ds: Vec<DMatrix<f64>> = (0..x.len()).map(|k| &rd[k] - &at_dy[k]).collect();
            let dx: Vec<DMatrix<f64>> =
                (0..x.len()).map(|k| symmetrize(&(&rc[k] - &x[k] * &ds[k] * &s_inv[k]))).collect();

            let mut alpha_p = f64::INFINITY;
            let mut alpha_d = f64::INFINITY;
            for k in 0..x.len() {
                match (max_step(&x[k], &dx[k]), max_step(&s[k], &ds[k])) {
                    (Some(ap), Some(ad)) => {
                        alpha_p = alpha_p.min(ap);
                        alpha_d = alpha_d.min(ad);
                    }
                    _ => {
                        status = IpmStatus::NumericalFailure;
                    }
                }
            }
            if status == IpmStatus::NumericalFailure {
                break;
            }
            let alpha_p = (opts.step_fraction * alpha_p).min(1.0);
            let alpha_d = (opts.step_fraction * alpha_d).min(1.0);
            for k in 0..x.len() {
                x[k] += &dx[k] * alpha_p;
                s[k] += &ds[k] * alpha_d;
            }
            y += dy * alpha_d;
        }

        IpmSolution {
            primal_objective: inner(&self.c, &x),
            dual_objective: b.dot(&y),
            x,
            y,
            s,
            primal_infeasibility: pinf,
            dual_infeasibility: dinf,
            iterations,
            status,
        }
    }
}

/// Cholesky solve with a small diagonal shift on failure.
fn solve_spd(m: &mut DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = m.clone().cholesky() {
        return Some(ch.solve(rhs));
    }
    let scale = m.diagonal().iter().cloned().fold(0.0, f64::max).max(1e-300);
    for shift in [1e-14, 1e-12, 1e-10] {
        let mut shifted = m.clone();
        for i in 0..shifted.nrows() {
            shifted[(i, i)] += shift * scale;
        }
        if let Some(ch) = shifted.cholesky() {
            return Some(ch.solve(rhs));
        }
    }
    None
}
