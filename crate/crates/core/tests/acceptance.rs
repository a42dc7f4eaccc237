//! Acceptance gate. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sectionrep::boundary::{ck_norm, extends_to_ck, GrowthSpec, SampledSection};
use sectionrep::charfactor::{factor_characters, verify_factorization, Monomial, MultiplicativePolynomial};
use sectionrep::evalrep::{
    classify_inducible, commutant_analysis, extract_highest_weight, realize, Classification, EvalRepSpec,
    FiniteInvolutiveAlgebra, Functional, RepMatrices,
};
use sectionrep::irrep::{build_irrep, operator_norm, torus_norm, CompactElement};
use sectionrep::rootdata::{build_root_system, kappa_norm, Normalization, RootSystem, Series, TorusElement, Weight};
use sectionrep::selftest::{random_compact, random_multiset, random_spec, random_unit, random_weight};
use sectionrep::series::{TermRule, Verdict};
use sectionrep::uhf::{itp_equivalent, powers_factor_type, projective_distance, FactorType, ProductState, VectorSequence, VectorTail};

const SEED: u64 = 0x5ec7_10e5;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn rs(rank: usize) -> RootSystem {
    build_root_system(Series::A, rank).unwrap()
}

// Independent oracles in the ε-basis of the defining representation.

/// Highest weight in ε-coordinates, `λ_ε_k = Σ_{j≥k} λ_j`, padded with 0.
fn eps_weight(lambda: &[i64]) -> Vec<f64> {
    let r = lambda.len();
    (0..=r).map(|k| lambda[k.min(r)..].iter().sum::<i64>() as f64).collect()
}

/// Diagonal of `x = i·Σ c_j H_j` divided by `i`.
fn eps_torus(c: &[f64]) -> Vec<f64> {
    let r = c.len();
    (0..=r)
        .map(|k| {
            let cur = if k < r { c[k] } else { 0.0 };
            let prev = if k > 0 { c[k - 1] } else { 0.0 };
            cur - prev
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// `∏_{i<j} (λ_ε_i − λ_ε_j + j − i)/(j − i)`.
fn weyl_dim_oracle(lambda: &[i64]) -> u64 {
    let e = eps_weight(lambda);
    let n = e.len();
    let mut num = 1.0f64;
    let mut den = 1.0f64;
    for i in 0..n {
        for j in i + 1..n {
            num *= e[i] - e[j] + (j - i) as f64;
            den *= (j - i) as f64;
        }
    }
    (num / den).round() as u64
}

/// `max_σ |Σ_k λ_ε_σ(k)·d_k|` over the symmetric group.
fn torus_norm_oracle(lambda: &[i64], c: &[f64]) -> f64 {
    let e = eps_weight(lambda);
    let d = eps_torus(c);
    permutations(e.len())
        .iter()
        .map(|p| p.iter().zip(&d).map(|(&s, dk)| e[s] * dk).sum::<f64>().abs())
        .fold(0.0, f64::max)
}

/// Trace-form norms: `⟨λ, λ⟩` of the traceless part, and `−tr(x²)`.
fn trace_norm_weight(lambda: &[i64]) -> f64 {
    let e = eps_weight(lambda);
    let mean = e.iter().sum::<f64>() / e.len() as f64;
    e.iter().map(|v| (v - mean).powi(2)).sum::<f64>().sqrt()
}

fn trace_norm_element(x: &CompactElement) -> f64 {
    let d = eps_torus(&x.torus);
    let roots: f64 = x.real.iter().chain(&x.imag).map(|c| 2.0 * c * c).sum();
    (roots + d.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for rank in 1..=3 {
        let rs = rs(rank);
        let bound = [0, 199, 20, 8][rank];
        let mut stack: Vec<Vec<i64>> = vec![vec![]];
        while let Some(w) = stack.pop() {
            if w.len() == rank {
                if weyl_dim_oracle(&w) > 200 {
                    continue;
                }
                let rho = build_irrep(&rs, &Weight::from_ints(&w)).unwrap();
                checked += 1;
                if rho.dim() as u64 != weyl_dim_oracle(&w) {
                    bad.push(w);
                }
                continue;
            }
            for c in 0..=bound {
                let mut v = w.clone();
                v.push(c);
                stack.push(v);
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} weights checked, mismatches {bad:?}"))
}

fn criterion_2(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst_torus: f64 = 0.0;
    let mut bound_violations = 0;
    let mut upper_cases = 0;
    let mut norm_mismatch: f64 = 0.0;
    let mut c_estimate = f64::INFINITY;
    for rank in 1..=3 {
        let rs = rs(rank);
        for _ in 0..50 {
            let w = random_weight(rng, rank, 2);
            let ints = w.int_coords().unwrap();
            let rho = build_irrep(&rs, &w).unwrap();
            let c: Vec<f64> = (0..rank).map(|_| rng.random_range(-2.0..2.0)).collect();
            let x = TorusElement::new(c.clone());
            let op = operator_norm(&rho, &CompactElement::from_torus(&x)).unwrap();
            let oracle = torus_norm_oracle(&ints, &c);
            worst_torus = worst_torus.max((op - oracle).abs()).max((torus_norm(&rho, &x) - oracle).abs());
        }
        for _ in 0..3 {
            let w = random_weight(rng, rank, 2);
            if w.is_zero() {
                continue;
            }
            let ints = w.int_coords().unwrap();
            let rho = build_irrep(&rs, &w).unwrap();
            for _ in 0..200 {
                let x = random_compact(rng, &rs);
                let op = operator_norm(&rho, &x).unwrap();
                for n in [Normalization::ShortRoot2, Normalization::Killing] {
                    let product = kappa_norm(&rs, &w, n) * x.kappa_norm(&rs, n);
                    if op > product * (1.0 + 1e-12) {
                        bound_violations += 1;
                    }
                }
                let oracle_product = trace_norm_weight(&ints) * trace_norm_element(&x);
                let product = kappa_norm(&rs, &w, Normalization::ShortRoot2) * x.kappa_norm(&rs, Normalization::ShortRoot2);
                norm_mismatch = norm_mismatch.max((product - oracle_product).abs() / oracle_product);
                c_estimate = c_estimate.min(op / product);
                upper_cases += 1;
            }
        }
    }
    let ok = worst_torus <= 1e-9 && bound_violations == 0 && norm_mismatch <= 1e-12 && c_estimate > 0.0;
    outcome(
        ok,
        format!(
            "torus deviation {worst_torus:.1e}; {upper_cases} bound cases, {bound_violations} violations; \
             empirical C(k) = {c_estimate:.4}"
        ),
    )
}

fn criterion_3(rng: &mut ChaCha8Rng) -> Outcome {
    let mut failures = 0;
    let mut largest = 0;
    for _ in 0..100 {
        let rank = rng.random_range(1..=2);
        let rs = rs(rank);
        let spec = random_spec(rng, &rs, 3, 2, 200);
        let rep = realize(&spec).unwrap();
        largest = largest.max(rep.dim);
        let ok = extract_highest_weight(&rep)
            .is_ok_and(|hw| hw.e_dim == 1 && classify_inducible(&hw.functional) == Classification::Inducible(spec.clone()));
        if !ok {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("100 specs, {failures} failures, largest dimension {largest}"))
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    m.qr().q()
}

fn criterion_4(rng: &mut ChaCha8Rng) -> Outcome {
    let mut failures = Vec::new();
    let mut min_gap = f64::INFINITY;
    let mut cases = 0;
    let mut check = |rep: &RepMatrices, expected: usize, label: &str, rng: &mut ChaCha8Rng| {
        for twisted in [false, true] {
            let rep = if twisted {
                rep.conjugated(&random_unitary(rng, rep.dim))
            } else {
                rep.clone()
            };
            let report = commutant_analysis(&rep).unwrap();
            cases += 1;
            min_gap = min_gap.min(report.gap());
            if report.dim != expected || report.gap() < 1e3 {
                failures.push(format!("{label}: dim {} gap {:.1e}", report.dim, report.gap()));
            }
        }
    };
    for _ in 0..10 {
        let rank = rng.random_range(1..=2);
        let rs = rs(rank);
        let spec = loop {
            let s = random_spec(rng, &rs, 2, 2, 60);
            if !s.entries().is_empty() {
                break s;
            }
        };
        let rep = realize(&spec).unwrap();
        check(&rep, 1, "irreducible", rng);
        check(&rep.direct_sum(&rep).unwrap(), 4, "doubled", rng);
        // same points, different weight at one of them
        let mut other = spec.entries().to_vec();
        let bump = rng.random_range(0..rank);
        let mut coords = other[0].1.int_coords().unwrap();
        coords[bump] += 1;
        other[0].1 = Weight::from_ints(&coords);
        let other = EvalRepSpec::new(&rs, other).unwrap();
        let rep2 = realize(&other).unwrap();
        if rep.dim + rep2.dim <= 200 {
            check(&rep.direct_sum(&rep2).unwrap(), 2, "inequivalent sum", rng);
        }
    }
    outcome(
        failures.is_empty(),
        format!("{cases} cases, minimum gap {min_gap:.2e}, failures {failures:?}"),
    )
}

fn criterion_5(rng: &mut ChaCha8Rng) -> Outcome {
    let mut cases = 0;
    let mut wrong = 0;
    let mut accepted = 0;
    let zero = Rational64::from_integer(0);
    for m in 1..=4 {
        for alg in FiniteInvolutiveAlgebra::all(m) {
            for _ in 0..50 {
                let rank = rng.random_range(1..=2);
                let rs = rs(rank);
                let restrict = rng.random_bool(0.5);
                let values: Vec<Vec<Rational64>> = (0..rank)
                    .map(|_| {
                        (0..m)
                            .map(|j| {
                                if restrict && !alg.is_fixed(j) {
                                    return zero;
                                }
                                let num = rng.random_range(-1..=3);
                                let den = if rng.random_bool(0.15) { 2 } else { 1 };
                                Rational64::new(num, den)
                            })
                            .collect()
                    })
                    .collect();
                let on_cycle = (0..m).any(|j| !alg.is_fixed(j) && (0..rank).any(|i| values[i][j] != zero));
                let fixed_ok = alg
                    .fixed_points()
                    .iter()
                    .all(|&j| (0..rank).all(|i| values[i][j].is_integer() && values[i][j] >= zero));
                let f = Functional::new(alg.clone(), &rs, values.clone()).unwrap();
                let got = classify_inducible(&f);
                cases += 1;
                let right = match &got {
                    Classification::Inducible(spec) => {
                        accepted += 1;
                        let expected: Vec<(String, Vec<i64>)> = alg
                            .fixed_points()
                            .into_iter()
                            .filter(|&j| (0..rank).any(|i| values[i][j] != zero))
                            .map(|j| (format!("p{}", j + 1), (0..rank).map(|i| values[i][j].to_integer()).collect()))
                            .collect();
                        let produced: Vec<(String, Vec<i64>)> = spec
                            .entries()
                            .iter()
                            .map(|(p, w)| (p.id.clone(), w.int_coords().unwrap()))
                            .collect();
                        !on_cycle && fixed_ok && expected == produced
                    }
                    Classification::NotInducible(_) => on_cycle || !fixed_ok,
                };
                if !right {
                    wrong += 1;
                }
            }
        }
    }
    outcome(wrong == 0, format!("{cases} functionals, {accepted} accepted, {wrong} misclassified"))
}

/// Convergence of `Σ rule(n)` by the textbook tests.
fn converges_oracle(rule: &TermRule) -> bool {
    match rule {
        TermRule::Const { c } => *c == 0.0,
        TermRule::Power { c, p } => *c == 0.0 || *p > 1.0,
        TermRule::Geometric { .. } | TermRule::EventuallyZero { .. } => true,
        TermRule::FinitelyModified { base, .. } => converges_oracle(base),
    }
}

fn criterion_6(rng: &mut ChaCha8Rng) -> Outcome {
    let mut notes = Vec::new();
    let powers = [
        (0.0, FactorType::TypeI),
        (0.5, FactorType::TypeII1),
        (0.25, FactorType::TypeIII),
    ];
    let powers_ok = powers
        .iter()
        .all(|&(p, t)| powers_factor_type(&ProductState::constant(p).unwrap()) == t);
    if !powers_ok {
        notes.push("Powers cases".to_string());
    }

    let rel = |prefix: Vec<Vec<Complex64>>, rule: TermRule| VectorSequence {
        site_dim: 2,
        prefix,
        tail: VectorTail::Deficit { rule },
    };
    let e1 = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let rotated = |deficit: f64| {
        // |⟨e1, w⟩| = cos θ = 1 − deficit
        let c = 1.0 - deficit;
        vec![Complex64::new(c, 0.0), Complex64::new(0.0, (1.0 - c * c).max(0.0).sqrt())]
    };
    let mut cases: Vec<(VectorSequence, VectorSequence, bool)> = Vec::new();
    let rules = [
        TermRule::Power { c: 1.0, p: 2.0 },
        TermRule::Const { c: 0.5 },
        TermRule::Power { c: 0.5, p: 1.0 },
        TermRule::Power { c: 0.3, p: 1.5 },
        TermRule::Power { c: 1.0, p: 0.5 },
        TermRule::Geometric { c: 0.9, q: 0.7 },
        TermRule::EventuallyZero { prefix: vec![1.0, 0.5, 0.25] },
        TermRule::Const { c: 0.0 },
        TermRule::FinitelyModified {
            base: Box::new(TermRule::Const { c: 0.1 }),
            overrides: BTreeMap::from([(1, 0.0), (2, 0.0)]),
        },
        TermRule::FinitelyModified {
            base: Box::new(TermRule::Power { c: 1.0, p: 3.0 }),
            overrides: BTreeMap::from([(1, 1.0)]),
        },
    ];
    let base = VectorSequence::constant(e1.clone()).unwrap();
    for rule in &rules {
        cases.push((base.clone(), rel(vec![], rule.clone()), converges_oracle(rule)));
        // first sites materialized from the same rule
        let prefix: Vec<_> = (1..=3).map(|n| rotated(rule.term(n))).collect();
        cases.push((rel(prefix, rule.clone()), base.clone(), converges_oracle(rule)));
    }
    while cases.len() < 30 {
        let same = rng.random_bool(0.5);
        let a = random_unit(rng, 3);
        let b = if same { a.iter().map(|z| z * Complex64::from_polar(1.0, 0.7)).collect() } else { random_unit(rng, 3) };
        let prefix = (0..rng.random_range(0..4)).map(|_| random_unit(rng, 3)).collect();
        let v = VectorSequence {
            site_dim: 3,
            prefix,
            tail: VectorTail::Constant { vector: a },
        };
        let w = VectorSequence::constant(b).unwrap();
        cases.push((v, w, same));
    }
    let mismatches = cases
        .iter()
        .filter(|(v, w, expect)| {
            let verdict = itp_equivalent(v, w).unwrap();
            let certified = match verdict {
                Verdict::Holds { bound } => {
                    let s = sectionrep::uhf::deficit_series(v, w).unwrap().unwrap();
                    s.partial_sum(10_000) <= bound * (1.0 + 1e-12) + 1e-15
                }
                _ => true,
            };
            !certified || verdict.holds() != *expect || verdict.fails() == *expect
        })
        .count();
    if mismatches > 0 {
        notes.push(format!("{mismatches} equivalence mismatches"));
    }

    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let d = rng.random_range(1..=5);
        let v = random_unit(rng, d);
        let w = random_unit(rng, d);
        let ip: Complex64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
        let dist = projective_distance(&v, &w).unwrap();
        worst = worst.max((dist * dist - 2.0 * (1.0 - ip.norm())).abs());
    }
    if worst > 1e-12 {
        notes.push(format!("distance identity off by {worst:.1e}"));
    }
    outcome(
        notes.is_empty(),
        format!("Powers cases {powers_ok}; {} equivalence cases; distance identity max error {worst:.1e} {notes:?}", cases.len()),
    )
}

fn criterion_7() -> Outcome {
    let mut notes = Vec::new();
    let verdict = |k| {
        extends_to_ck(&GrowthSpec::new(k, TermRule::Power { c: 1.0, p: 2.0 }, TermRule::Const { c: 1.0 }).unwrap()).unwrap()
    };
    if !verdict(0).fails() {
        notes.push("k = 0 does not fail".to_string());
    }
    if let Some(k) = (1..=10).find(|&k| !verdict(k).holds()) {
        notes.push(format!("k = {k} does not hold"));
    }
    let rs = rs(1);
    let mut worst_ratio: f64 = 0.0;
    let mut worst_analytic: f64 = 0.0;
    for k in 0..=3u32 {
        for gamma in [0.1, 0.5, 0.9] {
            for delta in [1.0, 0.1] {
                let s = SampledSection::critical(k, gamma, delta, 1e-4);
                let norm = ck_norm(&s, k, &rs, Normalization::Killing).unwrap();
                let bound = std::f64::consts::E * (1..=k + 1).product::<u32>() as f64 * delta;
                worst_ratio = worst_ratio.max(norm / bound);
                // Σ_j (k+γ)(k+γ−1)⋯(k+γ−j+1), attained at x = 1
                let a = k as f64 + gamma;
                let analytic: f64 = (0..=k).map(|j| (0..j).map(|t| a - t as f64).product::<f64>()).sum::<f64>() * delta;
                worst_analytic = worst_analytic.max((norm - analytic).abs() / analytic);
                if norm > 1.05 * bound {
                    notes.push(format!("k={k} γ={gamma} δ={delta}: {norm} > 1.05·{bound}"));
                }
            }
        }
    }
    if worst_analytic > 1e-3 {
        notes.push(format!("finite differences off the analytic value by {worst_analytic:.1e}"));
    }
    outcome(
        notes.is_empty(),
        format!("max ‖s_γ‖_k / (e(k+1)!δ) = {worst_ratio:.3}, analytic deviation {worst_analytic:.1e} {notes:?}"),
    )
}

fn planted(rng: &mut ChaCha8Rng) -> MultiplicativePolynomial {
    let m = rng.random_range(2..=6);
    let cm = random_multiset(rng, m, 8);
    let m = cm.m.max(2);
    let mut exps = cm.exponents();
    exps.resize(m, 0);
    let mut other = vec![0u32; m];
    for _ in 0..rng.random_range(1..=8) {
        other[rng.random_range(0..m)] += 1;
    }
    if other == exps {
        other[0] += 1;
    }
    let eps = Complex64::new(rng.random_range(0.01..1.0), rng.random_range(-1.0..1.0));
    MultiplicativePolynomial::from_monomials(
        vec![
            Monomial {
                exponents: exps,
                coefficient: Complex64::new(1.0, 0.0),
            },
            Monomial {
                exponents: other,
                coefficient: eps,
            },
        ],
        Some(m),
        None,
    )
    .unwrap()
}

fn criterion_8(rng: &mut ChaCha8Rng) -> Outcome {
    let mut wrong = 0;
    for t in 0..200 {
        let cm = random_multiset(rng, 6, 8);
        let exps = cm.exponents();
        let phi = if t % 2 == 0 {
            MultiplicativePolynomial::character_product(&cm)
        } else {
            let e = exps.clone();
            MultiplicativePolynomial::black_box(cm.m, cm.degree(), move |a| {
                a.iter().zip(&e).fold(Complex64::new(1.0, 0.0), |acc, (z, &k)| acc * z.powu(k))
            })
            .unwrap()
        };
        let seed = rng.random();
        match factor_characters(&phi, seed) {
            Ok(got) if got == cm && verify_factorization(&phi, &got, 1000, seed ^ 0xabc) => {}
            _ => wrong += 1,
        }
    }
    let mut worst_rate: f64 = 1.0;
    for _ in 0..20 {
        let phi = planted(rng);
        let rejected = (0..100u64).filter(|&s| factor_characters(&phi, s).is_err()).count();
        worst_rate = worst_rate.min(rejected as f64 / 100.0);
    }
    outcome(
        wrong == 0 && worst_rate >= 0.99,
        format!("200 products, {wrong} not recovered; worst planted rejection rate {worst_rate:.2}"),
    )
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let criteria: Vec<(&str, Duration, Box<dyn FnOnce(&mut ChaCha8Rng) -> Outcome>)> = vec![
        ("1 dimension oracle", Duration::from_secs(30), Box::new(|_| criterion_1())),
        ("2 norm formula and bound", Duration::from_secs(60), Box::new(criterion_2)),
        ("3 classification round trip", Duration::from_secs(120), Box::new(criterion_3)),
        ("4 commutant pattern", Duration::from_secs(120), Box::new(criterion_4)),
        ("5 involutivity obstruction", Duration::from_secs(60), Box::new(criterion_5)),
        ("6 UHF criteria", Duration::from_secs(60), Box::new(criterion_6)),
        ("7 growth condition", Duration::from_secs(60), Box::new(|_| criterion_7())),
        ("8 character factorization", Duration::from_secs(60), Box::new(criterion_8)),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let out = run(&mut rng);
        let elapsed = start.elapsed();
        let ok = out.ok && elapsed <= limit;
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] criterion {name}: {} ({:.2}s, limit {}s)",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
