//! Finite unitary 1-designs as weighted sets of unitaries.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matkernel::{
    c, col, ensure_square, ensure_unitary, identity, kron, max_abs_diff, unitarity_residual, zeros,
    ComplexMatrix,
};
use crate::stochastic::pauli_string;

/// Tolerance on `sum of weights = 1`.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Tolerance on `U^dagger U = 1` for design elements.
pub const ELEMENT_UNITARY_TOL: f64 = 1e-10;
/// Default tolerance for [`verify_1design`].
pub const DESIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct DesignElement {
    pub weight: f64,
    pub unitary: ComplexMatrix,
}

/// A normalized measure on the unitary group supported on finitely many points.
#[derive(Debug, Clone)]
pub struct UnitaryDesign {
    dim: usize,
    elements: Vec<DesignElement>,
}

impl UnitaryDesign {
    /// Checks that weights are positive and sum to one and that every element is unitary.
    pub fn new(dim: usize, elements: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidParameter("design has no elements".into()));
        }
        let mut total = 0.0;
        for (w, u) in &elements {
            if !w.is_finite() || *w <= 0.0 {
                return Err(Error::InvalidParameter(format!("design weight {w} is not positive")));
            }
            if u.shape() != (dim, dim) {
                return Err(Error::shape(format!("({dim}, {dim})"), format!("{:?}", u.shape())));
            }
            crate::matkernel::ensure_finite(u)?;
            ensure_unitary(u, ELEMENT_UNITARY_TOL)?;
            total += w;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidParameter(format!("design weights sum to {total}, not 1")));
        }
        Ok(UnitaryDesign {
            dim,
            elements: elements.into_iter().map(|(weight, unitary)| DesignElement { weight, unitary }).collect(),
        })
    }

    /// Uniform weights over the given unitaries.
    pub fn uniform(dim: usize, unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        let w = 1.0 / unitaries.len().max(1) as f64;
        UnitaryDesign::new(dim, unitaries.into_iter().map(|u| (w, u)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[DesignElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `sum_i w_i (u_i (x) conj(u_i))`.
    pub fn first_moment(&self) -> ComplexMatrix {
        let n = self.dim * self.dim;
        let mut s = zeros(n, n);
        for e in &self.elements {
            s += kron(&e.unitary, &e.unitary.map(|z| z.conj())).scale(e.weight);
        }
        s
    }

    /// `sum_i w_i u_i X u_i^dagger`.
    pub fn average_conjugation(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = zeros(self.dim, self.dim);
        for e in &self.elements {
            out += (&e.unitary * x * e.unitary.adjoint()).scale(e.weight);
        }
        out
    }
}

/// Outcome of [`verify_1design`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignCheck {
    pub passes: bool,
    pub residual: f64,
}

/// Compares the first moment `sum w u (x) conj(u)` with `(1/d) col(1) col(1)^dagger`
/// entrywise.
pub fn verify_1design(mu: &UnitaryDesign, tol: f64) -> DesignCheck {
    let d = mu.dim;
    let v = col(&identity(d));
    let target = (&v * v.adjoint()).scale(1.0 / d as f64);
    let residual = max_abs_diff(&mu.first_moment(), &target);
    DesignCheck { passes: residual <= tol, residual }
}

/// Uniform design over the `4^n` tensor products of `1, X, Y, Z`.
pub fn pauli_design(n_qubits: usize) -> Result<UnitaryDesign> {
    if n_qubits == 0 || n_qubits > 6 {
        return Err(Error::InvalidParameter(format!("Pauli design on {n_qubits} qubits is not supported")));
    }
    let count = 4usize.pow(n_qubits as u32);
    UnitaryDesign::uniform(1 << n_qubits, (0..count).map(|i| pauli_string(n_qubits, i)).collect())
}

/// Clock `Z = diag(1, w, ..., w^{d-1})`, `w = exp(2 pi i / d)`.
pub fn clock(d: usize) -> ComplexMatrix {
    let mut z = zeros(d, d);
    for j in 0..d {
        z[(j, j)] = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / d as f64);
    }
    z
}

/// Cyclic shift `|j> -> |j + 1 mod d>`.
pub fn shift(d: usize) -> ComplexMatrix {
    let mut x = zeros(d, d);
    for j in 0..d {
        x[((j + 1) % d, j)] = c(1.0, 0.0);
    }
    x
}

/// Uniform design over `X^a Z^b`, `a, b in 0..d`, ordered lexicographically by `(a, b)`.
pub fn weyl_heisenberg_design(d: usize) -> Result<UnitaryDesign> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("Weyl-Heisenberg design needs d >= 2, got {d}")));
    }
    let x = shift(d);
    let z = clock(d);
    let mut elements = Vec::with_capacity(d * d);
    let mut xa = identity(d);
    for _a in 0..d {
        let mut zb = identity(d);
        for _b in 0..d {
            elements.push(&xa * &zb);
            zb = &zb * &z;
        }
        xa = &xa * &x;
    }
    UnitaryDesign::uniform(d, elements)
}

/// Conjugates every element by `U`: `u_i -> U u_i U^dagger`, weights unchanged.
pub fn rotated_design(u: &ComplexMatrix, mu: &UnitaryDesign) -> Result<UnitaryDesign> {
    let d = ensure_square(u)?;
    if d != mu.dim {
        return Err(Error::shape(mu.dim, d));
    }
    ensure_unitary(u, 1e-9)?;
    let elements = mu
        .elements
        .iter()
        .map(|e| DesignElement { weight: e.weight, unitary: u * &e.unitary * u.adjoint() })
        .collect();
    Ok(UnitaryDesign { dim: d, elements })
}

/// Largest `|U^dagger U - 1|` entry over the elements.
pub fn max_unitarity_residual(mu: &UnitaryDesign) -> f64 {
    mu.elements.iter().map(|e| unitarity_residual(&e.unitary)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::{sigma_x, sigma_y, sigma_z, trace};
    use crate::random::{ginibre, haar_unitary, seeded_rng};
    use approx::assert_abs_diff_eq;

    #[test]
    fn pauli_designs_verify() {
        let mu = pauli_design(1).unwrap();
        assert_eq!(mu.len(), 4);
        assert!(verify_1design(&mu, DESIGN_TOL).passes);
        for n in 1..=3 {
            let mu = pauli_design(n).unwrap();
            assert_eq!(mu.len(), 4usize.pow(n as u32));
            for e in mu.elements() {
                assert_eq!(e.weight, 0.25f64.powi(n as i32));
            }
            let check = verify_1design(&mu, DESIGN_TOL);
            assert!(check.passes && check.residual <= 1e-11, "{check:?}");
        }
    }

    #[test]
    fn trivial_sets_fail() {
        let only_identity = UnitaryDesign::uniform(2, vec![identity(2)]).unwrap();
        let check = verify_1design(&only_identity, DESIGN_TOL);
        assert!(!check.passes);
        // first moment is 1_4; the target has zeros on the (1,1) and (2,2) diagonal entries
        assert_abs_diff_eq!(check.residual, 1.0, epsilon = 1e-15);

        let with_z = UnitaryDesign::uniform(2, vec![identity(2), sigma_z()]).unwrap();
        assert!(!verify_1design(&with_z, DESIGN_TOL).passes);
    }

    #[test]
    fn weyl_heisenberg_designs_verify() {
        for d in 2..=6 {
            let mu = weyl_heisenberg_design(d).unwrap();
            assert_eq!(mu.len(), d * d);
            assert!(max_unitarity_residual(&mu) <= 1e-14);
            let check = verify_1design(&mu, DESIGN_TOL);
            assert!(check.passes && check.residual <= 1e-11, "d={d} {check:?}");
        }
        assert!(weyl_heisenberg_design(1).is_err());
    }

    #[test]
    fn wh2_matches_paulis_up_to_phase() {
        let mu = weyl_heisenberg_design(2).unwrap();
        let expected = [identity(2), sigma_z(), sigma_x(), sigma_y()];
        for (e, p) in mu.elements().iter().zip(&expected) {
            let overlap = crate::matkernel::hs_inner(p, &e.unitary).unwrap();
            assert_abs_diff_eq!(overlap.norm(), 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn rotation_keeps_verification() {
        let mut rng = seeded_rng(9);
        let mu = pauli_design(1).unwrap();
        let same = rotated_design(&identity(2), &mu).unwrap();
        for (a, b) in same.elements().iter().zip(mu.elements()) {
            assert!(max_abs_diff(&a.unitary, &b.unitary) <= 1e-15);
        }
        for _ in 0..5 {
            let u = haar_unitary(&mut rng, 2);
            let rot = rotated_design(&u, &mu).unwrap();
            assert!(verify_1design(&rot, DESIGN_TOL).passes);
        }
        let bad = UnitaryDesign::uniform(2, vec![identity(2), sigma_z()]).unwrap();
        let u = haar_unitary(&mut rng, 2);
        let before = verify_1design(&bad, DESIGN_TOL);
        let after = verify_1design(&rotated_design(&u, &bad).unwrap(), DESIGN_TOL);
        assert_eq!(before.passes, after.passes);
        assert!(rotated_design(&identity(2).scale(2.0), &mu).is_err());
        assert!(rotated_design(&identity(3), &mu).is_err());
    }

    #[test]
    fn conjugation_average_is_trace_over_d() {
        let mut rng = seeded_rng(10);
        let designs = [pauli_design(1).unwrap(), pauli_design(2).unwrap(), weyl_heisenberg_design(3).unwrap()];
        for mu in &designs {
            let d = mu.dim();
            let x = ginibre(&mut rng, d, d);
            let avg = mu.average_conjugation(&x);
            let expect = identity(d) * (trace(&x) / d as f64);
            assert!(max_abs_diff(&avg, &expect) <= 1e-10);
        }
    }

    #[test]
    fn constructor_validation() {
        assert!(UnitaryDesign::new(2, vec![(0.5, identity(2))]).is_err());
        assert!(UnitaryDesign::new(2, vec![(1.0, identity(2).scale(1.1))]).is_err());
        assert!(UnitaryDesign::new(2, vec![(-0.5, identity(2)), (1.5, sigma_x())]).is_err());
        assert!(UnitaryDesign::new(2, vec![]).is_err());
    }
}
