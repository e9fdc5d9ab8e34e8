//! Reproduction suites: numerical checks of the stochastic-channel theorems.
//!
//! Each check produces one [`Check`] line. Suites run independent checks in
//! parallel but always report them in a fixed order.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{choi_of_kraus, Channel};
use crate::designs::{pauli_design, rotated_design, verify_1design, weyl_heisenberg_design, UnitaryDesign, DESIGN_TOL};
use crate::diamond::{diamond_distance, watrous_sdp_solve, DiamondOptions, SdpProblem};
use crate::error::{Error, Result};
use crate::matkernel::{col, hs_inner, identity, ket_bra, kron, max_abs_diff, sigma_z, trace_norm, ComplexMatrix};
use crate::random::{ginibre, haar_unitary, random_channel, seeded_rng};
use crate::stochastic::{
    nonunital_example, qubit_choi_bz, random_stochastic_channel, search_nonunital, stochastic_eigenvalue,
    QubitParams, SearchOptions, STOCHASTIC_TOL,
};
use crate::twirl::{twirl, twirl_choi, TwirlMethod};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check { name: name.to_string(), passed, detail }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Thm1,
    Thm23,
    Thm4,
    Lemma1,
    Designs,
    Example,
    Kernel,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = ["thm1", "thm2-3", "thm4", "lemma1", "designs", "example", "kernel", "all"];
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "thm1" => Suite::Thm1,
            "thm2-3" => Suite::Thm23,
            "thm4" => Suite::Thm4,
            "lemma1" => Suite::Lemma1,
            "designs" => Suite::Designs,
            "example" => Suite::Example,
            "kernel" => Suite::Kernel,
            "all" => Suite::All,
            other => {
                return Err(Error::Parse(format!(
                    "unknown suite `{other}`; expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

/// Runs a suite; `seed` fixes every random instance.
pub fn run_suite(suite: Suite, seed: u64) -> Vec<Check> {
    match suite {
        Suite::Thm1 => vec![stochastic_diamond_equals_infidelity(seed), diamond_lower_bound(seed)],
        Suite::Thm23 => {
            let (stochastic, unital) = twirl_theorems(seed);
            vec![stochastic, unital, design_dependence(seed)]
        }
        Suite::Thm4 => vec![qubit_unitality(seed), nonunital_search(seed)],
        Suite::Lemma1 => vec![twirl_routes_agree(seed)],
        Suite::Designs => vec![design_verification()],
        Suite::Example => vec![example_check()],
        Suite::Kernel => vec![kernel_identities(seed), kraus_round_trip(seed)],
        Suite::All => [Suite::Kernel, Suite::Designs, Suite::Example, Suite::Lemma1, Suite::Thm23, Suite::Thm1, Suite::Thm4]
            .into_iter()
            .flat_map(|s| run_suite(s, seed))
            .collect(),
    }
}

/// SDP diamond distance equals `1 - F_e` for stochastic channels.
pub fn stochastic_diamond_equals_infidelity(seed: u64) -> Check {
    let mut cases: Vec<(String, f64, Channel)> = Vec::new();
    for d in [4, 6] {
        for lambda in [0.5, 0.9, 0.99] {
            cases.push((format!("example({lambda},{d})"), 1.0 - lambda, nonunital_example(lambda, d).expect("valid")));
        }
    }
    let mut rng = seeded_rng(seed);
    for d in 2..=4 {
        for i in 0..50 {
            let (lambda, ch) = random_stochastic_channel(&mut rng, d, 0.05, 0.95);
            cases.push((format!("random d={d} #{i}"), 1.0 - lambda, ch));
        }
    }
    let results: Vec<Result<(f64, f64, bool)>> = cases
        .par_iter()
        .map(|(_, expected, ch)| {
            let out = watrous_sdp_solve(&SdpProblem::from_channel(ch))?;
            let err = (out.value - ch.process_infidelity()).abs().max((out.value - expected).abs());
            Ok((err, out.gap, out.converged))
        })
        .collect();
    let mut worst = 0.0f64;
    let mut worst_gap = 0.0f64;
    let mut failures = Vec::new();
    for ((name, _, _), r) in cases.iter().zip(results) {
        match r {
            Ok((err, gap, converged)) => {
                worst = worst.max(err);
                worst_gap = worst_gap.max(gap);
                if err > 1e-6 || !converged {
                    failures.push(name.clone());
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    Check::new(
        "thm1 stochastic r_diamond = r",
        failures.is_empty(),
        format!("{} channels, max |sdp - r| = {worst:.3e}, max gap = {worst_gap:.3e}, failures {failures:?}", cases.len()),
    )
}

/// SDP diamond distance is at least the process infidelity for all channels.
pub fn diamond_lower_bound(seed: u64) -> Check {
    let mut rng = seeded_rng(seed.wrapping_add(1));
    let channels: Vec<Channel> = (0..100)
        .map(|i| {
            let d = 2 + i % 2;
            let rank = rng.random_range(1..=d * d);
            random_channel(&mut rng, d, rank)
        })
        .collect();
    let opts = DiamondOptions { force_sdp: true, seed, ..Default::default() };
    let slack: Vec<Result<f64>> = channels
        .par_iter()
        .map(|ch| {
            let r = diamond_distance(ch, &opts)?;
            if r.method != crate::diamond::DiamondMethod::Sdp {
                return Err(Error::InvalidParameter("SDP did not converge".into()));
            }
            Ok(r.value - ch.process_infidelity())
        })
        .collect();
    let errors = slack.iter().filter(|s| s.is_err()).count();
    let min = slack.iter().filter_map(|s| s.as_ref().ok()).copied().fold(f64::INFINITY, f64::min);
    Check::new(
        "thm1 r_diamond >= r for CPTP",
        errors == 0 && min >= -1e-7,
        format!("100 channels (d=2,3), min(sdp - r) = {min:.3e}, solver failures {errors}"),
    )
}

/// `Phi(1_4)` for the non-unital stochastic example at `lambda = 0.9`.
pub fn example_check() -> Check {
    let lambda = 0.9;
    let ex = nonunital_example(lambda, 4).expect("valid");
    let report = ex.validate();
    let detected = stochastic_eigenvalue(&ex, STOCHASTIC_TOL);
    let image = ex.apply(&identity(4)).expect("dimension");
    let expected = identity(4).scale(lambda) + kron(&identity(2), &ket_bra(2, 0, 0).scale(2.0)).scale(1.0 - lambda);
    let image_err = max_abs_diff(&image, &expected);
    let nonunitality = trace_norm(&(&image - identity(4))).expect("square");
    let lambda_err = detected.map(|l| (l - lambda).abs()).unwrap_or(f64::INFINITY);
    let passed = report.is_cptp() && lambda_err <= 1e-12 && image_err <= 1e-12 && (nonunitality - 0.4).abs() <= 1e-10;
    Check::new(
        "example non-unital stochastic channel",
        passed,
        format!(
            "cptp={}, lambda={detected:?}, |Phi(1) - expected| = {image_err:.3e}, ||Phi(1) - 1||_1 = {nonunitality:.12}",
            report.is_cptp()
        ),
    )
}

fn rotated_pauli(seed: u64) -> UnitaryDesign {
    let u = haar_unitary(&mut seeded_rng(seed.wrapping_add(2)), 2);
    rotated_design(&u, &pauli_design(1).expect("valid")).expect("unitary rotation")
}

fn twirl_designs(seed: u64) -> Vec<(&'static str, UnitaryDesign)> {
    vec![
        ("pauli:1", pauli_design(1).expect("valid")),
        ("pauli:2", pauli_design(2).expect("valid")),
        ("wh:2", weyl_heisenberg_design(2).expect("valid")),
        ("wh:3", weyl_heisenberg_design(3).expect("valid")),
        ("wh:4", weyl_heisenberg_design(4).expect("valid")),
        ("rotated pauli:1", rotated_pauli(seed)),
    ]
}

/// Definition-side and Choi-side twirls agree.
pub fn twirl_routes_agree(seed: u64) -> Check {
    let mut rng = seeded_rng(seed.wrapping_add(3));
    let mut worst = 0.0f64;
    let mut count = 0;
    for (key, mu) in twirl_designs(seed).into_iter().filter(|(k, _)| *k != "wh:2") {
        for _ in 0..20 {
            let d = mu.dim();
            let rank = rng.random_range(1..=d * d);
            let ch = random_channel(&mut rng, d, rank);
            match twirl(&ch, &mu, TwirlMethod::Both) {
                Ok(out) => worst = worst.max(out.deviation.unwrap_or(f64::INFINITY)),
                Err(e) => return Check::new("lemma1 twirl routes agree", false, format!("{key}: {e}")),
            }
            count += 1;
        }
    }
    Check::new(
        "lemma1 twirl routes agree",
        worst <= 1e-11,
        format!("{count} twirls over pauli:1, pauli:2, wh:3, wh:4, rotated pauli:1; max deviation = {worst:.3e}"),
    )
}

/// Theorems on twirled channels: stochastic with `lambda = F_e`, and unital.
pub fn twirl_theorems(seed: u64) -> (Check, Check) {
    let mut rng = seeded_rng(seed.wrapping_add(4));
    let mut lambda_err = 0.0f64;
    let mut unital_res = 0.0f64;
    let mut undetected = Vec::new();
    let mut count = 0;
    let mut unverified = Vec::new();
    for (key, mu) in twirl_designs(seed) {
        if !verify_1design(&mu, DESIGN_TOL).passes {
            unverified.push(key);
            continue;
        }
        let d = mu.dim();
        let mut made = 0;
        while made < 20 {
            let rank = rng.random_range(1..=d * d);
            let ch = random_channel(&mut rng, d, rank);
            let fe = ch.process_fidelity();
            if fe <= 0.01 {
                continue;
            }
            made += 1;
            count += 1;
            let tw = twirl_choi(&ch, &mu).expect("dimensions agree");
            match stochastic_eigenvalue(&tw, STOCHASTIC_TOL) {
                Some(l) => lambda_err = lambda_err.max((l - fe).abs()),
                None => undetected.push(key),
            }
            unital_res = unital_res.max(tw.unitality_residual());
        }
    }
    let ok = unverified.is_empty();
    (
        Check::new(
            "thm2 twirl is stochastic with lambda = F_e",
            ok && undetected.is_empty() && lambda_err <= 1e-10,
            format!("{count} twirls, undetected {undetected:?}, unverified designs {unverified:?}, max |lambda - F_e| = {lambda_err:.3e}"),
        ),
        Check::new(
            "thm3 twirl is unital",
            ok && unital_res <= 1e-10,
            format!("{count} twirls, max unitality residual = {unital_res:.3e}"),
        ),
    )
}

/// Twirling the example by `wh:4` and by a rotated `wh:4`.
pub fn design_dependence(seed: u64) -> Check {
    let ex = nonunital_example(0.9, 4).expect("valid");
    let mu = weyl_heisenberg_design(4).expect("valid");
    let u = haar_unitary(&mut seeded_rng(seed.wrapping_add(5)), 4);
    let rot = rotated_design(&u, &mu).expect("unitary rotation");
    let a = twirl_choi(&ex, &mu).expect("dimensions agree");
    let b = twirl_choi(&ex, &rot).expect("dimensions agree");
    let choi_diff = a.choi_distance(&b);
    let fe_diff = (a.process_fidelity() - b.process_fidelity()).abs();
    let opts = DiamondOptions { seed, ..Default::default() };
    let (da, db) = match (diamond_distance(&a, &opts), diamond_distance(&b, &opts)) {
        (Ok(x), Ok(y)) => (x.value, y.value),
        (Err(e), _) | (_, Err(e)) => return Check::new("thm2 design dependence", false, e.to_string()),
    };
    let forced = DiamondOptions { force_sdp: true, ..opts };
    let sdp_diff = match (diamond_distance(&a, &forced), diamond_distance(&b, &forced)) {
        (Ok(x), Ok(y)) => (x.value - y.value).abs(),
        _ => f64::INFINITY,
    };
    let passed = choi_diff > 1e-3 && fe_diff <= 1e-9 && (da - db).abs() <= 1e-9 && sdp_diff <= 1e-6;
    Check::new(
        "thm2 design dependence",
        passed,
        format!(
            "max Choi difference = {choi_diff:.3e}, |dF_e| = {fe_diff:.3e}, |dr_diamond| = {:.3e}, SDP |dr_diamond| = {sdp_diff:.3e}",
            (da - db).abs()
        ),
    )
}

/// Rejection-samples CP-valid qubit maps. A third are drawn uniformly, a
/// third have `kappa = 0`, and a third have `kappa` scaled down by
/// `10^-s` with `s` uniform in `[4, 12]`, which probes the detection tolerance.
pub fn sample_qubit_params<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<(QubitParams, Channel)> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut draw = || rng.random_range(-1.0..=1.0);
        let eta = [draw(), draw(), draw()];
        let mut kappa = [draw(), draw(), draw()];
        match out.len() % 3 {
            1 => kappa = [0.0; 3],
            2 => {
                let s: f64 = rng.random_range(4.0..=12.0);
                kappa = kappa.map(|k| k * 10f64.powf(-s));
            }
            _ => {}
        }
        let params = QubitParams::new(eta, kappa);
        if let Ok(ch) = qubit_choi_bz(&params) {
            if ch.validate().is_cptp() {
                out.push((params, ch));
            }
        }
    }
    out
}

/// Stochastic qubit channels are unital, and searches for counterexamples
/// succeed only from `d = 4`.
pub fn qubit_unitality(seed: u64) -> Check {
    let samples = sample_qubit_params(&mut seeded_rng(seed.wrapping_add(6)), 10_000);
    let mut detected = 0;
    let mut worst = 0.0f64;
    for (_, ch) in &samples {
        if stochastic_eigenvalue(ch, STOCHASTIC_TOL).is_some() {
            detected += 1;
            worst = worst.max(ch.unitality_residual());
        }
    }
    Check::new(
        "thm4 stochastic qubit channels are unital",
        detected > 0 && worst <= 1e-8,
        format!("{} CP samples, {detected} stochastic, max unitality residual = {worst:.3e}", samples.len()),
    )
}

pub fn nonunital_search(seed: u64) -> Check {
    let qubit = search_nonunital(2, seed, 50, &SearchOptions::default());
    let ququart = search_nonunital(4, seed, 4, &SearchOptions { lambda: Some(0.9), ..Default::default() });
    match (qubit, ququart) {
        (Ok(q2), Ok(q4)) => Check::new(
            "thm4 non-unital search",
            q2.best_nonunitality <= 1e-6 && q4.best_nonunitality >= 0.4 - 1e-4 && q4.tp_residual <= 1e-9,
            format!(
                "d=2 best = {:.3e} (50 restarts), d=4 lambda=0.9 best = {:.9} (tp residual {:.1e})",
                q2.best_nonunitality, q4.best_nonunitality, q4.tp_residual
            ),
        ),
        (Err(e), _) | (_, Err(e)) => Check::new("thm4 non-unital search", false, e.to_string()),
    }
}

/// Pauli and Weyl-Heisenberg designs verify; `{1}` and `{1, sigma_z}` do not.
pub fn design_verification() -> Check {
    let mut lines = Vec::new();
    let mut passed = true;
    let mut good: Vec<(String, UnitaryDesign)> = vec![
        ("pauli:1".into(), pauli_design(1).expect("valid")),
        ("pauli:2".into(), pauli_design(2).expect("valid")),
    ];
    for d in 2..=6 {
        good.push((format!("wh:{d}"), weyl_heisenberg_design(d).expect("valid")));
    }
    for (key, mu) in &good {
        let check = verify_1design(mu, DESIGN_TOL);
        passed &= check.passes && check.residual <= 1e-11;
        lines.push(format!("{key} {:.1e}", check.residual));
    }
    let bad = [
        ("{1}", UnitaryDesign::uniform(2, vec![identity(2)]).expect("valid")),
        ("{1,Z}", UnitaryDesign::uniform(2, vec![identity(2), sigma_z()]).expect("valid")),
    ];
    for (key, mu) in &bad {
        let check = verify_1design(mu, DESIGN_TOL);
        passed &= !check.passes;
        lines.push(format!("{key} rejected={} ({:.2})", !check.passes, check.residual));
    }
    Check::new("designs 1-design verification", passed, lines.join(", "))
}

/// Vectorization identities on random rectangular instances.
pub fn kernel_identities(seed: u64) -> Check {
    let mut rng = seeded_rng(seed.wrapping_add(7));
    let mut vec_err = 0.0f64;
    let mut trace_err = 0.0f64;
    for _ in 0..1000 {
        let (m, n, p, q) = (
            rng.random_range(1..=4),
            rng.random_range(1..=4),
            rng.random_range(1..=4),
            rng.random_range(1..=4),
        );
        let a = ginibre(&mut rng, m, n);
        let b = ginibre(&mut rng, n, p);
        let cm = ginibre(&mut rng, p, q);
        let lhs = col(&(&a * &b * &cm));
        let rhs = kron(&cm.transpose(), &a) * col(&b);
        vec_err = vec_err.max((lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max));
        let x = ginibre(&mut rng, m, n);
        let y = ginibre(&mut rng, m, n);
        let direct = hs_inner(&x, &y).expect("same shape");
        let via_col = (col(&x).adjoint() * col(&y))[(0, 0)];
        trace_err = trace_err.max((direct - via_col).norm());
    }
    Check::new(
        "kernel vectorization identities",
        vec_err <= 1e-12 && trace_err <= 1e-12,
        format!("1000 instances, col(ABC) err = {vec_err:.3e}, tr(A^dagger B) err = {trace_err:.3e}"),
    )
}

/// Canonical Kraus operators reproduce the Choi state.
pub fn kraus_round_trip(seed: u64) -> Check {
    let mut rng = seeded_rng(seed.wrapping_add(8));
    let mut worst = 0.0f64;
    for i in 0..100 {
        let d = 2 + i % 3;
        let rank = rng.random_range(1..=d * d);
        let ch = random_channel(&mut rng, d, rank).choi_only();
        let kraus: Vec<ComplexMatrix> = ch.canonical_kraus().expect("Choi is PSD");
        worst = worst.max(max_abs_diff(&choi_of_kraus(&kraus, d), ch.choi()));
    }
    Check::new("kernel canonical Kraus round trip", worst <= 1e-9, format!("100 channels, max Choi error = {worst:.3e}"))
}
