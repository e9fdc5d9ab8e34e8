//! Stochastic quantum channels.
//!
//! Channels are stored by their normalized Choi state. On top of that the
//! crate provides detection and decomposition of stochastic channels
//! (`lambda id + (1 - lambda) Phi_perp`), finite unitary 1-designs and
//! twirling, process fidelity, and the diamond distance to the identity via a
//! dense interior-point semidefinite program with certified bounds.

pub mod channel;
pub mod designs;
pub mod diamond;
pub mod error;
pub mod matkernel;
pub mod random;
pub mod formats;
pub mod stochastic;
pub mod suites;
pub mod twirl;

pub use channel::{Channel, CptpReport};
pub use designs::{pauli_design, rotated_design, verify_1design, weyl_heisenberg_design, UnitaryDesign};
pub use diamond::{diamond_distance, DiamondMethod, DiamondResult};
pub use error::{Error, Result};
pub use matkernel::{ComplexMatrix, ComplexVector};
pub use stochastic::{decompose, nonunital_example, stochastic_eigenvalue, QubitParams, StochasticDecomposition};
pub use twirl::{twirl_choi, twirl_definition, TwirlMethod};
