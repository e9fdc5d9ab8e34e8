//! Text encodings of channels and designs, and the `name:args` constructor keys.
//!
//! Matrices are JSON arrays of rows, each entry a two-element `[re, im]`
//! array. A channel document is
//!
//! ```json
//! { "dim": 2, "kraus": [ [[[1,0],[0,0]],[[0,0],[1,0]]] ] }
//! ```
//!
//! with exactly one of `kraus` (list of `dim x dim` matrices) or `choi`
//! (one `dim^2 x dim^2` matrix). A design document is
//! `{ "dim": d, "elements": [ { "weight": w, "unitary": M }, ... ] }` and a
//! unitary document is `{ "dim": d, "unitary": M }`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::designs::{pauli_design, rotated_design, weyl_heisenberg_design, UnitaryDesign};
use crate::error::{Error, Result};
use crate::matkernel::{c, identity, ComplexMatrix};
use crate::random::{random_channel, seeded_rng};
use crate::stochastic::{depolarizing, nonunital_example, pauli_channel, qubit_choi_bz, QubitParams};

type Encoded = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelDoc {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kraus: Option<Vec<Encoded>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    choi: Option<Encoded>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementDoc {
    weight: f64,
    unitary: Encoded,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DesignDoc {
    dim: usize,
    elements: Vec<ElementDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitaryDoc {
    dim: usize,
    unitary: Encoded,
}

fn encode(m: &ComplexMatrix) -> Encoded {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn decode(rows: &Encoded, n: usize, what: &str) -> Result<ComplexMatrix> {
    if rows.len() != n {
        return Err(Error::shape(format!("{what} with {n} rows"), rows.len()));
    }
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::shape(format!("{what} row {i} with {n} entries"), row.len()));
        }
        for (j, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
            m[(i, j)] = c(re, im);
        }
    }
    Ok(m)
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Parses a channel document. The channel is not required to be CPTP.
pub fn channel_from_json(text: &str) -> Result<Channel> {
    let doc: ChannelDoc = parse_json(text)?;
    let d = doc.dim;
    if d == 0 {
        return Err(Error::InvalidParameter("dim must be positive".into()));
    }
    match (doc.kraus, doc.choi) {
        (Some(kraus), None) => {
            if kraus.is_empty() {
                return Err(Error::Parse("empty Kraus list".into()));
            }
            let ops = kraus.iter().map(|k| decode(k, d, "Kraus operator")).collect::<Result<Vec<_>>>()?;
            Channel::from_kraus(ops, d)
        }
        (None, Some(choi)) => Channel::from_choi(decode(&choi, d * d, "Choi matrix")?, d),
        _ => Err(Error::Parse("expected exactly one of `kraus` or `choi`".into())),
    }
}

/// Serializes the Kraus cache when present, the Choi state otherwise.
pub fn channel_to_json(phi: &Channel) -> String {
    let doc = match phi.kraus() {
        Some(k) => ChannelDoc { dim: phi.dim(), kraus: Some(k.iter().map(encode).collect()), choi: None },
        None => ChannelDoc { dim: phi.dim(), kraus: None, choi: Some(encode(phi.choi())) },
    };
    serde_json::to_string_pretty(&doc).expect("finite matrices serialize")
}

pub fn design_from_json(text: &str) -> Result<UnitaryDesign> {
    let doc: DesignDoc = parse_json(text)?;
    let elements = doc
        .elements
        .iter()
        .map(|e| Ok((e.weight, decode(&e.unitary, doc.dim, "design element")?)))
        .collect::<Result<Vec<_>>>()?;
    UnitaryDesign::new(doc.dim, elements)
}

pub fn design_to_json(mu: &UnitaryDesign) -> String {
    let doc = DesignDoc {
        dim: mu.dim(),
        elements: mu.elements().iter().map(|e| ElementDoc { weight: e.weight, unitary: encode(&e.unitary) }).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("finite matrices serialize")
}

pub fn unitary_from_json(text: &str) -> Result<ComplexMatrix> {
    let doc: UnitaryDoc = parse_json(text)?;
    let u = decode(&doc.unitary, doc.dim, "unitary")?;
    crate::matkernel::ensure_unitary(&u, crate::designs::ELEMENT_UNITARY_TOL)?;
    Ok(u)
}

pub fn unitary_to_json(u: &ComplexMatrix) -> String {
    serde_json::to_string_pretty(&UnitaryDoc { dim: u.nrows(), unitary: encode(u) }).expect("finite matrices serialize")
}

fn numbers(args: &str, key: &str) -> Result<Vec<f64>> {
    args.split(',')
        .map(|a| {
            let x: f64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad number `{a}` in `{key}`")))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(Error::Parse(format!("non-finite number `{a}` in `{key}`")))
            }
        })
        .collect()
}

fn integer(x: f64, key: &str) -> Result<usize> {
    if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(Error::Parse(format!("expected a non-negative integer in `{key}`, got {x}")))
    }
}

fn arity(values: &[f64], allowed: &[usize], key: &str) -> Result<()> {
    if allowed.contains(&values.len()) {
        Ok(())
    } else {
        Err(Error::Parse(format!("`{key}` takes {allowed:?} arguments, got {}", values.len())))
    }
}

/// Builds a channel from a constructor key:
///
/// | key | channel |
/// |-----|---------|
/// | `identity[:d]` | identity on `C^d`, default `d = 2` |
/// | `depolarizing:alpha[,d]` | `alpha id + (1 - alpha) tr(.) 1/d`, default `d = 2` |
/// | `pauli:p0,px,py,pz` | qubit Pauli channel |
/// | `nonunital-example:lambda,d` | non-unital stochastic channel with weight `lambda` on the identity (alias `paper-example`) |
/// | `bz:ex,ey,ez,kx,ky,kz` | qubit map in Bloch parameters |
/// | `random:d[,rank[,seed]]` | random CPTP channel |
pub fn channel_from_key(key: &str) -> Result<Channel> {
    let (name, args) = key.split_once(':').unwrap_or((key, ""));
    let vals = if args.is_empty() { Vec::new() } else { numbers(args, key)? };
    match name {
        "identity" => {
            arity(&vals, &[0, 1], key)?;
            let d = vals.first().map(|&x| integer(x, key)).transpose()?.unwrap_or(2);
            if d == 0 {
                return Err(Error::InvalidParameter("dimension must be positive".into()));
            }
            Ok(Channel::identity(d))
        }
        "depolarizing" => {
            arity(&vals, &[1, 2], key)?;
            let d = vals.get(1).map(|&x| integer(x, key)).transpose()?.unwrap_or(2);
            depolarizing(vals[0], d)
        }
        "pauli" => {
            arity(&vals, &[4], key)?;
            pauli_channel(&vals)
        }
        "nonunital-example" | "paper-example" => {
            arity(&vals, &[2], key)?;
            nonunital_example(vals[0], integer(vals[1], key)?)
        }
        "bz" => {
            arity(&vals, &[6], key)?;
            qubit_choi_bz(&QubitParams::new([vals[0], vals[1], vals[2]], [vals[3], vals[4], vals[5]]))
        }
        "random" => {
            arity(&vals, &[1, 2, 3], key)?;
            let d = integer(vals[0], key)?;
            let rank = vals.get(1).map(|&x| integer(x, key)).transpose()?.unwrap_or(d * d);
            let seed = vals.get(2).map(|&x| integer(x, key)).transpose()?.unwrap_or(0);
            if d == 0 || rank == 0 || d > 6 {
                return Err(Error::InvalidParameter(format!("random channel needs 1 <= d <= 6 and rank >= 1 in `{key}`")));
            }
            Ok(random_channel(&mut seeded_rng(seed as u64), d, rank))
        }
        _ => Err(Error::Parse(format!("unknown channel key `{key}`"))),
    }
}

/// A channel from an existing file path, otherwise from a constructor key.
pub fn load_channel(input: &str) -> Result<Channel> {
    let path = Path::new(input);
    if path.is_file() {
        channel_from_json(&read_file(path)?)
    } else if looks_like_path(input) {
        Err(Error::Io { path: input.to_string(), source: std::io::Error::from(std::io::ErrorKind::NotFound) })
    } else {
        channel_from_key(input)
    }
}

fn looks_like_path(input: &str) -> bool {
    input.ends_with(".json") || input.contains('/') || input.contains('\\')
}

/// Builds a design from a key (`pauli:n`, `wh:d`, `rotated:<key>:<unitary-file>`)
/// or loads a design document from a file path.
pub fn load_design(input: &str) -> Result<UnitaryDesign> {
    if let Some(rest) = input.strip_prefix("rotated:") {
        let (inner, file) = rest
            .rsplit_once(':')
            .ok_or_else(|| Error::Parse(format!("expected `rotated:<key>:<unitary-file>`, got `{input}`")))?;
        let u = unitary_from_json(&read_file(Path::new(file))?)?;
        return rotated_design(&u, &load_design(inner)?);
    }
    let path = Path::new(input);
    if path.is_file() {
        return design_from_json(&read_file(path)?);
    }
    if looks_like_path(input) {
        return Err(Error::Io { path: input.to_string(), source: std::io::Error::from(std::io::ErrorKind::NotFound) });
    }
    let (name, arg) = input.split_once(':').ok_or_else(|| Error::Parse(format!("unknown design key `{input}`")))?;
    let n: usize = arg.trim().parse().map_err(|_| Error::Parse(format!("bad integer in design key `{input}`")))?;
    match name {
        "pauli" => pauli_design(n),
        "wh" => weyl_heisenberg_design(n),
        _ => Err(Error::Parse(format!("unknown design key `{input}`"))),
    }
}

/// `1_d` as a unitary document, a convenient template for rotation files.
pub fn identity_unitary_json(d: usize) -> String {
    unitary_to_json(&identity(d))
}
