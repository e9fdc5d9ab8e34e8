//! Acceptance criteria, one line per criterion.
//!
//! Reference values come from oracles written here rather than from the
//! library: Kraus-trace fidelities, explicit-loop Choi states, Kronecker
//! products and vectorization, closed-form channel images.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use stochan::designs::{max_unitarity_residual, DESIGN_TOL};
use stochan::diamond::{diamond_distance, watrous_sdp_solve, DiamondMethod, DiamondOptions, SdpProblem};
use stochan::matkernel::{col, identity, sigma_z, ComplexMatrix};
use stochan::random::{ginibre, haar_unitary, random_channel, seeded_rng};
use stochan::stochastic::{
    qubit_choi_bz, random_stochastic_channel, search_nonunital, QubitParams, SearchOptions, STOCHASTIC_TOL,
};
use stochan::suites::sample_qubit_params;
use stochan::{
    nonunital_example, pauli_design, rotated_design, stochastic_eigenvalue, twirl_choi, twirl_definition,
    verify_1design, weyl_heisenberg_design, Channel, UnitaryDesign,
};

const SEED: u64 = 20_240_601;

fn kraus_of(ch: &Channel) -> Vec<ComplexMatrix> {
    ch.kraus().map(<[_]>::to_vec).unwrap_or_else(|| ch.canonical_kraus().unwrap())
}

/// `F_e = sum_k |tr L_k|^2 / d^2`.
fn fidelity_oracle(kraus: &[ComplexMatrix], d: usize) -> f64 {
    kraus.iter().map(|l| l.trace().norm_sqr()).sum::<f64>() / (d * d) as f64
}

/// `(1/d) sum_ij Phi(E_ij) (x) E_ij` with every product and Kronecker entry
/// written out as loops.
fn choi_oracle(kraus: &[ComplexMatrix], d: usize) -> ComplexMatrix {
    let mut j = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for k in 0..d {
            for l in kraus {
                for a in 0..d {
                    for b in 0..d {
                        // (L E_ik L^dagger)_ab = L_ai conj(L_bk)
                        let v = l[(a, i)] * l[(b, k)].conj() / d as f64;
                        j[(a * d + i, b * d + k)] += v;
                    }
                }
            }
        }
    }
    j
}

fn naive_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.nrows(), b.ncols());
    for i in 0..a.nrows() {
        for j in 0..b.ncols() {
            for k in 0..a.ncols() {
                out[(i, j)] += a[(i, k)] * b[(k, j)];
            }
        }
    }
    out
}

fn naive_kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = (b.nrows(), b.ncols());
    let mut out = ComplexMatrix::zeros(a.nrows() * p, a.ncols() * q);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            for k in 0..p {
                for l in 0..q {
                    out[(i * p + k, j * q + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Column stacking: entry `(i, j)` goes to index `j * rows + i`.
fn naive_col(m: &ComplexMatrix) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); m.nrows() * m.ncols()];
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            v[j * m.nrows() + i] = m[(i, j)];
        }
    }
    v
}

fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn image_of_identity(kraus: &[ComplexMatrix], d: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(d, d);
    for l in kraus {
        out += naive_mul(l, &l.adjoint());
    }
    out
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn criterion_1() -> Outcome {
    let mut cases: Vec<(String, f64, Channel)> = Vec::new();
    for d in [4, 6] {
        for lambda in [0.5, 0.9, 0.99] {
            cases.push((format!("example({lambda},{d})"), 1.0 - lambda, nonunital_example(lambda, d).unwrap()));
        }
    }
    let mut rng = seeded_rng(SEED);
    for d in 2..=4 {
        for i in 0..50 {
            let (lambda, ch) = random_stochastic_channel(&mut rng, d, 0.05, 0.95);
            cases.push((format!("random d={d} #{i}"), 1.0 - lambda, ch));
        }
    }
    let rows: Vec<(f64, f64, bool)> = cases
        .par_iter()
        .map(|(_, constructed_r, ch)| {
            let d = ch.dim();
            let r_oracle = 1.0 - fidelity_oracle(&kraus_of(ch), d);
            let out = watrous_sdp_solve(&SdpProblem::from_channel(ch)).unwrap();
            ((out.value - r_oracle).abs(), (r_oracle - constructed_r).abs(), out.converged)
        })
        .collect();
    let worst = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let construction = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let unconverged = rows.iter().filter(|r| !r.2).count();
    Outcome {
        passed: worst <= 1e-6 && construction <= 1e-10 && unconverged == 0,
        detail: format!(
            "{} stochastic channels, max |SDP - r| = {worst:.2e}, max |r - (1 - lambda)| = {construction:.2e}, unconverged {unconverged}",
            cases.len()
        ),
    }
}

fn criterion_2() -> Outcome {
    let mut rng = seeded_rng(SEED + 2);
    let channels: Vec<Channel> = (0..100)
        .map(|i| {
            let d = 2 + i % 2;
            let rank = rng.random_range(1..=d * d);
            random_channel(&mut rng, d, rank)
        })
        .collect();
    let opts = DiamondOptions { force_sdp: true, ..Default::default() };
    let rows: Vec<(f64, bool)> = channels
        .par_iter()
        .map(|ch| {
            let r = diamond_distance(ch, &opts).unwrap();
            let r_oracle = 1.0 - fidelity_oracle(&kraus_of(ch), ch.dim());
            (r.value - r_oracle, r.method == DiamondMethod::Sdp)
        })
        .collect();
    let min = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let non_sdp = rows.iter().filter(|r| !r.1).count();
    Outcome {
        passed: min >= -1e-7 && non_sdp == 0,
        detail: format!("100 random channels (d=2,3), min(SDP - r) = {min:.2e}, non-SDP results {non_sdp}"),
    }
}

fn criterion_3() -> Outcome {
    let ex = nonunital_example(0.9, 4).unwrap();
    let cptp = ex.validate().is_cptp();
    let lambda = stochastic_eigenvalue(&ex, STOCHASTIC_TOL);
    let image = ex.apply(&identity(4)).unwrap();
    // 0.9 * 1_4 + 0.1 * 1_2 (x) 2|0><0| = diag(1.1, 0.9, 1.1, 0.9)
    let mut expected = ComplexMatrix::zeros(4, 4);
    for (i, v) in [1.1, 0.9, 1.1, 0.9].into_iter().enumerate() {
        expected[(i, i)] = Complex64::new(v, 0.0);
    }
    let image_err = max_diff(&image, &expected);
    let singular = (&image - identity(4)).singular_values();
    let trace_norm: f64 = singular.iter().sum();
    let lambda_err = lambda.map(|l| (l - 0.9).abs()).unwrap_or(f64::INFINITY);
    Outcome {
        passed: cptp && lambda_err <= 1e-12 && image_err <= 1e-12 && (trace_norm - 0.4).abs() <= 1e-10,
        detail: format!(
            "cptp={cptp}, |lambda - 0.9| = {lambda_err:.2e}, |Phi(1) - expected| = {image_err:.2e}, ||Phi(1) - 1||_1 = {trace_norm:.12}"
        ),
    }
}

/// Twirl through the Kraus set `{sqrt(w) u L u^dagger}` and the loop-built Choi state.
fn twirl_oracle(ch: &Channel, mu: &UnitaryDesign) -> ComplexMatrix {
    let d = ch.dim();
    let mut kraus = Vec::new();
    for e in mu.elements() {
        for l in kraus_of(ch) {
            kraus.push(naive_mul(&naive_mul(&e.unitary, &l), &e.unitary.adjoint()).scale(e.weight.sqrt()));
        }
    }
    choi_oracle(&kraus, d)
}

fn designs_under_test(seed: u64) -> Vec<(&'static str, UnitaryDesign)> {
    let u2 = haar_unitary(&mut seeded_rng(seed), 2);
    vec![
        ("pauli:1", pauli_design(1).unwrap()),
        ("pauli:2", pauli_design(2).unwrap()),
        ("wh:3", weyl_heisenberg_design(3).unwrap()),
        ("wh:4", weyl_heisenberg_design(4).unwrap()),
        ("rotated pauli:1", rotated_design(&u2, &pauli_design(1).unwrap()).unwrap()),
    ]
}

fn criterion_4() -> Outcome {
    let mut rng = seeded_rng(SEED + 4);
    let mut routes = 0.0f64;
    let mut oracle = 0.0f64;
    for (_, mu) in designs_under_test(SEED + 40) {
        let d = mu.dim();
        for _ in 0..20 {
            let rank = rng.random_range(1..=d * d);
            let ch = random_channel(&mut rng, d, rank);
            let by_def = twirl_definition(&ch, &mu).unwrap();
            let by_choi = twirl_choi(&ch, &mu).unwrap();
            routes = routes.max(max_diff(by_def.choi(), by_choi.choi()));
            oracle = oracle.max(max_diff(by_choi.choi(), &twirl_oracle(&ch, &mu)));
        }
    }
    Outcome {
        passed: routes <= 1e-11 && oracle <= 1e-11,
        detail: format!("100 twirls, max |J_def - J_choi| = {routes:.2e}, max |J_choi - Kraus-route J| = {oracle:.2e}"),
    }
}

struct TwirlRecord {
    lambda_err: f64,
    detected: bool,
    unital_lib: f64,
    unital_oracle: f64,
}

fn twirl_records() -> (Vec<TwirlRecord>, Vec<&'static str>) {
    let mut rng = seeded_rng(SEED + 5);
    let mut designs = designs_under_test(SEED + 50);
    designs.push(("wh:2", weyl_heisenberg_design(2).unwrap()));
    let mut records = Vec::new();
    let mut unverified = Vec::new();
    for (key, mu) in designs {
        if !verify_1design(&mu, DESIGN_TOL).passes {
            unverified.push(key);
            continue;
        }
        let d = mu.dim();
        let mut made = 0;
        while made < 20 {
            let rank = rng.random_range(1..=d * d);
            let ch = random_channel(&mut rng, d, rank);
            let kraus = kraus_of(&ch);
            let fe = fidelity_oracle(&kraus, d);
            if fe <= 0.01 {
                continue;
            }
            made += 1;
            let tw = twirl_choi(&ch, &mu).unwrap();
            let lambda = stochastic_eigenvalue(&tw, STOCHASTIC_TOL);
            let phi_one = image_of_identity(&kraus, d);
            let mut avg = ComplexMatrix::zeros(d, d);
            for e in mu.elements() {
                avg += naive_mul(&naive_mul(&e.unitary, &phi_one), &e.unitary.adjoint()).scale(e.weight);
            }
            records.push(TwirlRecord {
                lambda_err: lambda.map(|l| (l - fe).abs()).unwrap_or(f64::INFINITY),
                detected: lambda.is_some(),
                unital_lib: tw.unitality_residual(),
                unital_oracle: max_diff(&avg, &identity(d)),
            });
        }
    }
    (records, unverified)
}

fn criterion_5(records: &[TwirlRecord], unverified: &[&str]) -> Outcome {
    let undetected = records.iter().filter(|r| !r.detected).count();
    let worst = records.iter().map(|r| r.lambda_err).fold(0.0, f64::max);
    Outcome {
        passed: unverified.is_empty() && undetected == 0 && worst <= 1e-10,
        detail: format!(
            "{} twirls over 6 designs, unverified designs {unverified:?}, undetected {undetected}, max |lambda - F_e| = {worst:.2e}",
            records.len()
        ),
    }
}

fn criterion_6(records: &[TwirlRecord]) -> Outcome {
    let lib = records.iter().map(|r| r.unital_lib).fold(0.0, f64::max);
    let oracle = records.iter().map(|r| r.unital_oracle).fold(0.0, f64::max);
    Outcome {
        passed: !records.is_empty() && lib <= 1e-10 && oracle <= 1e-10,
        detail: format!("{} twirls, max unitality residual = {lib:.2e} (Kraus-route oracle {oracle:.2e})", records.len()),
    }
}

fn criterion_7() -> Outcome {
    let ex = nonunital_example(0.9, 4).unwrap();
    let mu = weyl_heisenberg_design(4).unwrap();
    let u = haar_unitary(&mut seeded_rng(SEED + 7), 4);
    let rot = rotated_design(&u, &mu).unwrap();
    let a = twirl_choi(&ex, &mu).unwrap();
    let b = twirl_choi(&ex, &rot).unwrap();
    let choi_diff = max_diff(a.choi(), b.choi());
    let fe_a = fidelity_oracle(&kraus_of(&a), 4);
    let fe_b = fidelity_oracle(&kraus_of(&b), 4);
    let opts = DiamondOptions::default();
    let ra = diamond_distance(&a, &opts).unwrap();
    let rb = diamond_distance(&b, &opts).unwrap();
    let forced = DiamondOptions { force_sdp: true, ..Default::default() };
    let sa = diamond_distance(&a, &forced).unwrap();
    let sb = diamond_distance(&b, &forced).unwrap();
    let passed = choi_diff > 1e-3
        && (fe_a - fe_b).abs() <= 1e-9
        && (ra.value - rb.value).abs() <= 1e-9
        && (sa.value - sb.value).abs() <= 1e-6;
    Outcome {
        passed,
        detail: format!(
            "max Choi difference = {choi_diff:.3e}, |dF_e| = {:.2e}, |dr_diamond| = {:.2e} (SDP {:.2e})",
            (fe_a - fe_b).abs(),
            (ra.value - rb.value).abs(),
            (sa.value - sb.value).abs()
        ),
    }
}

/// Residual of `Phi(1) = 1` in Bloch parameters: `kappa . sigma` up to the sign of `sigma_y`.
fn bloch_unitality_oracle(p: &QubitParams) -> f64 {
    let [kx, ky, kz] = p.kappa;
    kz.abs().max((kx * kx + ky * ky).sqrt())
}

fn criterion_8() -> Outcome {
    let samples = sample_qubit_params(&mut seeded_rng(SEED + 8), 10_000);
    let mut detected = 0;
    let mut worst = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let mut not_cp = 0;
    for (p, ch) in &samples {
        if !qubit_choi_bz(p).unwrap().validate().is_cptp() {
            not_cp += 1;
        }
        if stochastic_eigenvalue(ch, STOCHASTIC_TOL).is_some() {
            detected += 1;
            worst = worst.max(ch.unitality_residual());
            worst_oracle = worst_oracle.max(bloch_unitality_oracle(p));
        }
    }
    let part_a = not_cp == 0 && detected > 0 && worst <= 1e-8 && worst_oracle <= 1e-8;
    let q2 = search_nonunital(2, SEED, 50, &SearchOptions::default()).unwrap();
    let q4 = search_nonunital(4, SEED, 4, &SearchOptions { lambda: Some(0.9), ..Default::default() }).unwrap();
    let witness_kraus = kraus_of(&q4.witness);
    let witness_image = image_of_identity(&witness_kraus, 4);
    let witness_nonunitality: f64 = (&witness_image - identity(4)).singular_values().iter().sum();
    let witness_stochastic = stochastic_eigenvalue(&q4.witness, STOCHASTIC_TOL).is_some();
    let part_b = q2.best_nonunitality <= 1e-6
        && witness_nonunitality >= 0.4 - 1e-4
        && witness_stochastic
        && q4.witness.validate().is_cptp();
    Outcome {
        passed: part_a && part_b,
        detail: format!(
            "(a) {} CP samples, {detected} stochastic, max unitality residual = {worst:.2e}; (b) d=2 best = {:.2e}, d=4 lambda=0.9 witness ||Phi(1) - 1||_1 = {witness_nonunitality:.6} (stochastic={witness_stochastic})",
            samples.len(),
            q2.best_nonunitality
        ),
    }
}

/// `sum_i w_i u_i E_jk u_i^dagger = delta_jk 1 / d` for every matrix unit.
fn design_oracle(mu: &UnitaryDesign) -> f64 {
    let d = mu.dim();
    let mut worst = 0.0f64;
    for j in 0..d {
        for k in 0..d {
            let mut avg = ComplexMatrix::zeros(d, d);
            for e in mu.elements() {
                for a in 0..d {
                    for b in 0..d {
                        avg[(a, b)] += e.unitary[(a, j)] * e.unitary[(b, k)].conj() * e.weight;
                    }
                }
            }
            let target = if j == k { identity(d).scale(1.0 / d as f64) } else { ComplexMatrix::zeros(d, d) };
            worst = worst.max(max_diff(&avg, &target));
        }
    }
    worst
}

fn criterion_9() -> Outcome {
    let mut good = vec![pauli_design(1).unwrap(), pauli_design(2).unwrap()];
    for d in 2..=6 {
        good.push(weyl_heisenberg_design(d).unwrap());
    }
    let mut worst = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let mut all_pass = true;
    for mu in &good {
        let check = verify_1design(mu, DESIGN_TOL);
        all_pass &= check.passes && max_unitarity_residual(mu) <= 1e-12;
        worst = worst.max(check.residual);
        worst_oracle = worst_oracle.max(design_oracle(mu));
    }
    let bad = [
        UnitaryDesign::uniform(2, vec![identity(2)]).unwrap(),
        UnitaryDesign::uniform(2, vec![identity(2), sigma_z()]).unwrap(),
    ];
    let bad_rejected = bad.iter().all(|mu| !verify_1design(mu, DESIGN_TOL).passes && design_oracle(mu) > 1e-3);
    Outcome {
        passed: all_pass && worst <= 1e-11 && worst_oracle <= 1e-11 && bad_rejected,
        detail: format!(
            "pauli:1,2 and wh:2..6 max residual = {worst:.2e} (oracle {worst_oracle:.2e}); {{1}} and {{1,Z}} rejected = {bad_rejected}"
        ),
    }
}

fn criterion_10() -> Outcome {
    let mut rng = seeded_rng(SEED + 10);
    let mut vec_err = 0.0f64;
    let mut tr_err = 0.0f64;
    for _ in 0..1000 {
        let dims: Vec<usize> = (0..4).map(|_| rng.random_range(1..=4)).collect();
        let a = ginibre(&mut rng, dims[0], dims[1]);
        let b = ginibre(&mut rng, dims[1], dims[2]);
        let c = ginibre(&mut rng, dims[2], dims[3]);
        let lhs = col(&(&a * &b * &c));
        let rhs = naive_kron(&c.transpose(), &a) * col(&b);
        let oracle = naive_col(&naive_mul(&naive_mul(&a, &b), &c));
        for ((x, y), z) in lhs.iter().zip(rhs.iter()).zip(&oracle) {
            vec_err = vec_err.max((x - y).norm()).max((x - z).norm());
        }
        let x = ginibre(&mut rng, dims[0], dims[1]);
        let y = ginibre(&mut rng, dims[0], dims[1]);
        let direct = naive_mul(&x.adjoint(), &y).trace();
        let via_col: Complex64 = naive_col(&x).iter().zip(naive_col(&y)).map(|(p, q)| p.conj() * q).sum();
        let lib = (col(&x).adjoint() * col(&y))[(0, 0)];
        tr_err = tr_err.max((direct - via_col).norm()).max((direct - lib).norm());
    }
    let mut round_trip = 0.0f64;
    for i in 0..100 {
        let d = 2 + i % 3;
        let rank = rng.random_range(1..=d * d);
        let ch = random_channel(&mut rng, d, rank).choi_only();
        let kraus = ch.canonical_kraus().unwrap();
        round_trip = round_trip.max(max_diff(&choi_oracle(&kraus, d), ch.choi()));
    }
    Outcome {
        passed: vec_err <= 1e-12 && tr_err <= 1e-12 && round_trip <= 1e-9,
        detail: format!(
            "1000 instances: col(ABC) err = {vec_err:.2e}, tr(A^dagger B) err = {tr_err:.2e}; 100 Kraus round trips, max Choi err = {round_trip:.2e}"
        ),
    }
}

fn main() {
    let start = std::time::Instant::now();
    let (records, unverified) = twirl_records();
    let outcomes: Vec<(usize, Outcome)> = vec![
        (1, criterion_1()),
        (2, criterion_2()),
        (3, criterion_3()),
        (4, criterion_4()),
        (5, criterion_5(&records, &unverified)),
        (6, criterion_6(&records)),
        (7, criterion_7()),
        (8, criterion_8()),
        (9, criterion_9()),
        (10, criterion_10()),
    ];
    let mut failed = 0;
    for (n, o) in &outcomes {
        println!("criterion {n:>2} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {}/{} passed in {:.1?}", outcomes.len() - failed, outcomes.len(), start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
