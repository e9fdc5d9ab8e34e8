//! Twirling a channel over a finite unitary design.
//!
//! [`twirl_definition`] averages the conjugated maps by their action on the
//! matrix units; [`twirl_choi`] averages `Ad_{u (x) conj(u)}` on the Choi
//! state. The two routes agree exactly in exact arithmetic, so comparing them
//! checks the Choi-side formula.

use crate::channel::Channel;
use crate::designs::UnitaryDesign;
use crate::error::{Error, Result};
use crate::matkernel::{kron, ket_bra, zeros};

fn check_dims(phi: &Channel, mu: &UnitaryDesign) -> Result<usize> {
    if phi.dim() != mu.dim() {
        return Err(Error::shape(format!("design of dimension {}", phi.dim()), mu.dim()));
    }
    Ok(phi.dim())
}

/// `sum_i w_i Ad_{u_i} o Phi o Ad_{u_i^dagger}`, with the Choi state assembled
/// from the averaged action on each `E_jk` as `(1/d) sum_jk Phi_mu(E_jk) (x) E_jk`.
///
/// Terms are accumulated in design-element order.
pub fn twirl_definition(phi: &Channel, mu: &UnitaryDesign) -> Result<Channel> {
    let d = check_dims(phi, mu)?;
    let mut choi = zeros(d * d, d * d);
    for j in 0..d {
        for k in 0..d {
            let unit = ket_bra(d, j, k);
            let mut image = zeros(d, d);
            for e in mu.elements() {
                let u = &e.unitary;
                let inner = u.adjoint() * &unit * u;
                image += (u * phi.apply(&inner)? * u.adjoint()).scale(e.weight);
            }
            choi += kron(&image, &unit);
        }
    }
    Channel::from_choi(choi.scale(1.0 / d as f64), d)
}

/// `J(Phi_mu) = sum_i w_i (u_i (x) conj(u_i)) J(Phi) (u_i (x) conj(u_i))^dagger`,
/// accumulated in design-element order.
pub fn twirl_choi(phi: &Channel, mu: &UnitaryDesign) -> Result<Channel> {
    let d = check_dims(phi, mu)?;
    let mut choi = zeros(d * d, d * d);
    for e in mu.elements() {
        let w = kron(&e.unitary, &e.unitary.map(|z| z.conj()));
        choi += (&w * phi.choi() * w.adjoint()).scale(e.weight);
    }
    Channel::from_choi(choi, d)
}

/// Which route(s) to use when twirling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwirlMethod {
    Definition,
    Choi,
    Both,
}

impl std::str::FromStr for TwirlMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "definition" => Ok(TwirlMethod::Definition),
            "choi" => Ok(TwirlMethod::Choi),
            "both" => Ok(TwirlMethod::Both),
            other => Err(Error::Parse(format!("unknown twirl method `{other}`"))),
        }
    }
}

/// Twirled channel plus, for [`TwirlMethod::Both`], the max Choi deviation
/// between the two routes.
#[derive(Debug, Clone)]
pub struct TwirlOutcome {
    pub channel: Channel,
    pub deviation: Option<f64>,
}

pub fn twirl(phi: &Channel, mu: &UnitaryDesign, method: TwirlMethod) -> Result<TwirlOutcome> {
    match method {
        TwirlMethod::Definition => Ok(TwirlOutcome { channel: twirl_definition(phi, mu)?, deviation: None }),
        TwirlMethod::Choi => Ok(TwirlOutcome { channel: twirl_choi(phi, mu)?, deviation: None }),
        TwirlMethod::Both => {
            let by_def = twirl_definition(phi, mu)?;
            let by_choi = twirl_choi(phi, mu)?;
            let deviation = by_def.choi_distance(&by_choi);
            Ok(TwirlOutcome { channel: by_choi, deviation: Some(deviation) })
        }
    }
}
