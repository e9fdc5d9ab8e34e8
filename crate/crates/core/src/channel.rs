//! Quantum channels stored canonically by their normalized Choi state.
//!
//! The Choi state of a map `Phi` on `d x d` matrices is
//! `J(Phi) = (1/d) sum_ij Phi(E_ij) (x) E_ij`: the first tensor factor is the
//! output space and the second the input (reference) space. For a Kraus set
//! `{L_k}` this is `J = (1/d) sum_k col(L_k^T) col(L_k^T)^dagger`.

use std::borrow::Cow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matkernel::{
    col, ensure_finite, ensure_square, ensure_unitary, hermitian_part, hermitian_residual,
    hermitian_spectral, identity, kron, max_abs_diff, partial_trace_first, partial_trace_second,
    uncol, zeros, ComplexMatrix, HERMITIAN_TOL,
};

/// Tolerance on the smallest Choi eigenvalue for complete positivity.
pub const CP_TOL: f64 = 1e-9;
/// Tolerance on `max |sum L^dagger L - 1|` for trace preservation.
pub const TP_TOL: f64 = 1e-9;
/// Tolerance on `max |Phi(1) - 1|` for unitality.
pub const UNITAL_TOL: f64 = 1e-9;
/// Choi eigenvalues at or below this are dropped from the canonical Kraus set.
pub const KRAUS_CUTOFF: f64 = 1e-12;
/// Tolerance used when checking that conjugating matrices are unitary.
pub const UNITARY_TOL: f64 = 1e-9;

/// A linear map on `d x d` matrices, usually CPTP.
///
/// The Choi state is authoritative. A Kraus list, when present, was either
/// supplied at construction or produced by [`Channel::with_canonical_kraus`].
#[derive(Debug, Clone)]
pub struct Channel {
    dim: usize,
    choi: ComplexMatrix,
    kraus: Option<Vec<ComplexMatrix>>,
}

/// Outcome of checking complete positivity, trace preservation, and unitality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CptpReport {
    pub is_cp: bool,
    pub min_choi_eigenvalue: f64,
    pub is_tp: bool,
    pub tp_residual: f64,
    pub is_unital: bool,
    pub unitality_residual: f64,
}

impl CptpReport {
    pub fn is_cptp(&self) -> bool {
        self.is_cp && self.is_tp
    }
}

impl Channel {
    /// Builds a channel from Kraus operators, computing its Choi state.
    pub fn from_kraus(kraus: Vec<ComplexMatrix>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if kraus.is_empty() {
            return Err(Error::InvalidParameter("empty Kraus list".into()));
        }
        for k in &kraus {
            if k.shape() != (dim, dim) {
                return Err(Error::shape(format!("({dim}, {dim}) Kraus operator"), format!("{:?}", k.shape())));
            }
            ensure_finite(k)?;
        }
        let choi = choi_of_kraus(&kraus, dim);
        Ok(Channel { dim, choi, kraus: Some(kraus) })
    }

    /// Wraps a normalized Choi state. The matrix is symmetrized; it must be
    /// Hermitian within [`HERMITIAN_TOL`].
    pub fn from_choi(choi: ComplexMatrix, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let n = dim * dim;
        if choi.shape() != (n, n) {
            return Err(Error::shape(format!("({n}, {n}) Choi matrix"), format!("{:?}", choi.shape())));
        }
        ensure_finite(&choi)?;
        let residual = hermitian_residual(&choi);
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Channel { dim, choi: hermitian_part(&choi), kraus: None })
    }

    pub fn identity(dim: usize) -> Self {
        Channel::from_kraus(vec![identity(dim)], dim).expect("identity Kraus is well-formed")
    }

    /// `Ad_u : X -> u X u^dagger`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        let dim = ensure_square(&u)?;
        ensure_unitary(&u, UNITARY_TOL)?;
        Channel::from_kraus(vec![u], dim)
    }

    /// Convex (or general real) combination `sum_i w_i Phi_i` of channels of equal dimension.
    pub fn mix(terms: &[(f64, &Channel)]) -> Result<Self> {
        let dim = terms.first().ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?.1.dim;
        let mut choi = zeros(dim * dim, dim * dim);
        for (w, ch) in terms {
            if ch.dim != dim {
                return Err(Error::shape(dim, ch.dim));
            }
            choi += ch.choi.scale(*w);
        }
        let kraus = if terms.iter().all(|(w, ch)| *w >= 0.0 && ch.kraus.is_some()) {
            let mut all = Vec::new();
            for (w, ch) in terms.iter().filter(|(w, _)| *w > 0.0) {
                all.extend(ch.kraus.as_ref().unwrap().iter().map(|k| k.scale(w.sqrt())));
            }
            Some(all)
        } else {
            None
        };
        Ok(Channel { dim, choi, kraus })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn kraus(&self) -> Option<&[ComplexMatrix]> {
        self.kraus.as_deref()
    }

    /// Replaces any Kraus cache with the canonical Kraus operators.
    pub fn with_canonical_kraus(mut self) -> Result<Self> {
        self.kraus = Some(self.canonical_kraus()?);
        Ok(self)
    }

    /// Drops the Kraus cache.
    pub fn choi_only(mut self) -> Self {
        self.kraus = None;
        self
    }

    /// Hilbert-Schmidt orthogonal Kraus operators from the Choi eigendecomposition,
    /// `L_k = sqrt(d lambda_k) uncol(v_k)^T`, in descending eigenvalue order.
    pub fn canonical_kraus(&self) -> Result<Vec<ComplexMatrix>> {
        let spectrum = hermitian_spectral(&self.choi)?;
        if spectrum.min() < -CP_TOL {
            return Err(Error::NotPositive { min_eigenvalue: spectrum.min() });
        }
        let d = self.dim;
        let mut out = Vec::new();
        for (&value, v) in spectrum.values.iter().zip(&spectrum.vectors) {
            if value <= KRAUS_CUTOFF {
                break;
            }
            let l = uncol(v, d, d)?.transpose().scale((d as f64 * value).sqrt());
            out.push(l);
        }
        Ok(out)
    }

    pub(crate) fn kraus_or_canonical(&self) -> Result<Cow<'_, [ComplexMatrix]>> {
        match &self.kraus {
            Some(k) => Ok(Cow::Borrowed(k)),
            None => Ok(Cow::Owned(self.canonical_kraus()?)),
        }
    }

    /// `Phi(X)`. Uses the Kraus cache when present, otherwise contracts the
    /// Choi state directly: `Phi(X) = d Tr_in[J (1 (x) X^T)]`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.dim;
        if x.shape() != (d, d) {
            return Err(Error::shape(format!("({d}, {d})"), format!("{:?}", x.shape())));
        }
        if let Some(kraus) = &self.kraus {
            let mut out = zeros(d, d);
            for l in kraus {
                out += l * x * l.adjoint();
            }
            return Ok(out);
        }
        let lifted = &self.choi * kron(&identity(d), &x.transpose());
        Ok(partial_trace_second(&lifted, d, d)?.scale(d as f64))
    }

    /// `sum_k L_k^dagger L_k`, computed from the Choi state as `d (Tr_out J)^T`.
    pub fn kraus_gram(&self) -> ComplexMatrix {
        let d = self.dim;
        partial_trace_first(&self.choi, d, d)
            .expect("Choi shape is checked on construction")
            .transpose()
            .scale(d as f64)
    }

    pub fn validate(&self) -> CptpReport {
        let d = self.dim;
        let min_choi_eigenvalue = crate::matkernel::spectral_unchecked(&self.choi).min();
        let tp_residual = max_abs_diff(&self.kraus_gram(), &identity(d));
        let unitality_residual = self.unitality_residual();
        CptpReport {
            is_cp: min_choi_eigenvalue >= -CP_TOL,
            min_choi_eigenvalue,
            is_tp: tp_residual <= TP_TOL,
            tp_residual,
            is_unital: unitality_residual <= UNITAL_TOL,
            unitality_residual,
        }
    }

    /// `max |Phi(1) - 1|`.
    pub fn unitality_residual(&self) -> f64 {
        let d = self.dim;
        let image = self.apply(&identity(d)).expect("identity has the channel dimension");
        max_abs_diff(&image, &identity(d))
    }

    /// Errors unless the channel is CPTP within the module tolerances.
    pub fn ensure_cptp(&self) -> Result<CptpReport> {
        let report = self.validate();
        if !report.is_cp {
            return Err(Error::NotCptp(format!("min Choi eigenvalue {:e}", report.min_choi_eigenvalue)));
        }
        if !report.is_tp {
            return Err(Error::NotCptp(format!("trace-preservation residual {:e}", report.tp_residual)));
        }
        Ok(report)
    }

    /// Process fidelity to the identity, `F_e = (1/d) col(1)^dagger J col(1)`.
    pub fn process_fidelity(&self) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += self.choi[(i * d + i, j * d + j)].re;
            }
        }
        acc / d as f64
    }

    pub fn process_infidelity(&self) -> f64 {
        1.0 - self.process_fidelity()
    }

    /// `J(Phi) col(1)`.
    pub fn choi_times_identity_vector(&self) -> crate::matkernel::ComplexVector {
        &self.choi * col(&identity(self.dim))
    }

    /// `Ad_u o Phi o Ad_v`, with Choi `(u (x) v^T) J (u (x) v^T)^dagger`.
    pub fn sandwich(u: &ComplexMatrix, phi: &Channel, v: &ComplexMatrix) -> Result<Channel> {
        let d = phi.dim;
        for m in [u, v] {
            if m.shape() != (d, d) {
                return Err(Error::shape(format!("({d}, {d})"), format!("{:?}", m.shape())));
            }
            ensure_unitary(m, UNITARY_TOL)?;
        }
        let w = kron(u, &v.transpose());
        let choi = &w * &phi.choi * w.adjoint();
        let kraus = phi.kraus.as_ref().map(|ks| ks.iter().map(|l| u * l * v).collect());
        Ok(Channel { dim: d, choi, kraus })
    }

    /// Largest entrywise Choi difference to another channel.
    pub fn choi_distance(&self, other: &Channel) -> f64 {
        max_abs_diff(&self.choi, &other.choi)
    }
}

/// `(1/d) sum_k col(L_k^T) col(L_k^T)^dagger`.
pub fn choi_of_kraus(kraus: &[ComplexMatrix], dim: usize) -> ComplexMatrix {
    let n = dim * dim;
    let mut choi = zeros(n, n);
    for l in kraus {
        let v = col(&l.transpose());
        choi += &v * v.adjoint();
    }
    choi.scale(1.0 / dim as f64)
}

/// Checked version of [`choi_of_kraus`] returning a [`Channel`].
pub fn choi_of(kraus: Vec<ComplexMatrix>, dim: usize) -> Result<Channel> {
    Channel::from_kraus(kraus, dim)
}
