//! Randomized invariant suite, deterministic for a given seed.
//!
//! The generators are public so integration tests can draw from the same
//! input distributions.

use nalgebra::Matrix2;
use num_complex::Complex64;
use num_rational::Rational64;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::{ck_norm, critical_bound, extends_to_ck, GrowthSpec, SampledSection};
use crate::charfactor::{factor_characters, verify_factorization, CharacterMultiset, MultiplicativePolynomial};
use crate::evalrep::{
    classify_inducible, commutant_dim, extract_highest_weight, realize, Classification, EvalRepSpec,
    FiniteInvolutiveAlgebra, Functional, Point,
};
use crate::irrep::{build_irrep, operator_norm, torus_norm, CompactElement};
use crate::rootdata::{build_root_system, kappa_norm, weyl_dim, Normalization, RootSystem, Series, TorusElement, Weight};
use crate::series::{TermRule, Verdict};
use crate::uhf::{itp_equivalent, projective_distance, state_eval, ProductState, VectorSequence, VectorTail};

pub const DEFAULT_SEED: u64 = 20_240_611;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn root_system(rank: usize) -> RootSystem {
    build_root_system(Series::A, rank).expect("rank within bounds")
}

/// All dominant weights with coordinates in `0..=max_entry`.
pub fn dominant_weights(rank: usize, max_entry: i64) -> Vec<Weight> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|w: Vec<i64>| {
                (0..=max_entry).map(move |c| {
                    let mut v = w.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out.iter().map(|w| Weight::from_ints(w)).collect()
}

pub fn random_weight(rng: &mut impl Rng, rank: usize, max_entry: i64) -> Weight {
    Weight::from_ints(&(0..rank).map(|_| rng.random_range(0..=max_entry)).collect::<Vec<_>>())
}

pub fn random_torus(rng: &mut impl Rng, rank: usize) -> TorusElement {
    TorusElement::new((0..rank).map(|_| rng.random_range(-2.0..2.0)).collect())
}

pub fn random_compact(rng: &mut impl Rng, rs: &RootSystem) -> CompactElement {
    let np = rs.positive_roots().len();
    let mut draw = |n: usize| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>();
    CompactElement {
        torus: draw(rs.rank()),
        real: draw(np),
        imag: draw(np),
    }
}

/// A spec on at most `max_points` points with weight entries `≤ max_entry`
/// and total dimension `≤ max_dim`.
pub fn random_spec(rng: &mut impl Rng, rs: &RootSystem, max_points: usize, max_entry: i64, max_dim: u64) -> EvalRepSpec {
    loop {
        let n = rng.random_range(1..=max_points);
        let entries: Vec<(Point, Weight)> = (0..n)
            .map(|j| (Point::new(format!("x{j}")), random_weight(rng, rs.rank(), max_entry)))
            .collect();
        let spec = EvalRepSpec::new(rs, entries).expect("distinct points");
        if spec.dim().is_ok_and(|d| d <= max_dim) {
            return spec;
        }
    }
}

pub fn random_rule(rng: &mut impl Rng) -> TermRule {
    let c = rng.random_range(0.0..3.0);
    match rng.random_range(0..5) {
        0 => TermRule::Const { c },
        1 => TermRule::Power {
            c,
            p: rng.random_range(-1.0..3.0),
        },
        2 => TermRule::Geometric {
            c,
            q: rng.random_range(0.0..0.99),
        },
        3 => TermRule::EventuallyZero {
            prefix: (0..rng.random_range(0..5)).map(|_| rng.random_range(0.0..2.0)).collect(),
        },
        _ => TermRule::FinitelyModified {
            base: Box::new(TermRule::Power {
                c,
                p: rng.random_range(0.5..3.0),
            }),
            overrides: (0..3).map(|_| (rng.random_range(1..20), rng.random_range(0.0..2.0))).collect(),
        },
    }
}

/// A rule with terms in `[0, 1]`, usable as a deficit.
pub fn random_deficit_rule(rng: &mut impl Rng) -> TermRule {
    let c = rng.random_range(0.0..1.0);
    match rng.random_range(0..4) {
        0 => TermRule::Const { c },
        1 => TermRule::Power {
            c,
            p: rng.random_range(0.0..3.0),
        },
        2 => TermRule::Geometric {
            c,
            q: rng.random_range(0.0..0.99),
        },
        _ => TermRule::EventuallyZero {
            prefix: (0..rng.random_range(0..5)).map(|_| rng.random_range(0.0..1.0)).collect(),
        },
    }
}

pub fn random_unit(rng: &mut impl Rng, d: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

pub fn random_multiset(rng: &mut impl Rng, max_m: usize, max_degree: u32) -> CharacterMultiset {
    let m = rng.random_range(1..=max_m);
    let n = rng.random_range(0..=max_degree);
    let mut exps = vec![0u32; m];
    for _ in 0..n {
        exps[rng.random_range(0..m)] += 1;
    }
    CharacterMultiset::from_exponents(&exps)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub passed: bool,
    pub properties: Vec<PropertyOutcome>,
}

struct Tally {
    name: &'static str,
    cases: usize,
    failures: usize,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            cases: 0,
            failures: 0,
        }
    }

    fn check(&mut self, ok: bool) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
        }
    }

    fn done(self) -> PropertyOutcome {
        PropertyOutcome {
            name: self.name.to_string(),
            cases: self.cases,
            failures: self.failures,
        }
    }
}

fn dimension_oracle() -> PropertyOutcome {
    let mut t = Tally::new("irrep dimension equals Weyl dimension");
    for (rank, max) in [(1, 6), (2, 2), (3, 1)] {
        let rs = root_system(rank);
        for w in dominant_weights(rank, max) {
            let ok = match (build_irrep(&rs, &w), weyl_dim(&rs, &w)) {
                (Ok(rho), Ok(d)) => rho.dim() as u64 == d,
                _ => false,
            };
            t.check(ok);
        }
    }
    t.done()
}

fn norm_properties(rng: &mut ChaCha8Rng) -> Vec<PropertyOutcome> {
    let mut torus = Tally::new("operator norm on the torus equals the weight formula");
    let mut upper = Tally::new("operator norm is bounded by the product of κ-norms");
    for rank in 1..=2 {
        let rs = root_system(rank);
        for _ in 0..10 {
            let w = random_weight(rng, rank, 2);
            let rho = build_irrep(&rs, &w).expect("small weight");
            let x = random_torus(rng, rank);
            let ok = operator_norm(&rho, &CompactElement::from_torus(&x))
                .is_ok_and(|n| (n - torus_norm(&rho, &x)).abs() <= 1e-9 * n.max(1.0));
            torus.check(ok);
            let y = random_compact(rng, &rs);
            let norm = Normalization::ShortRoot2;
            let bound = kappa_norm(&rs, &w, norm) * y.kappa_norm(&rs, norm);
            upper.check(operator_norm(&rho, &y).is_ok_and(|n| n <= bound * (1.0 + 1e-9) + 1e-12));
        }
    }
    vec![torus.done(), upper.done()]
}

fn classification_properties(rng: &mut ChaCha8Rng) -> Vec<PropertyOutcome> {
    let mut round = Tally::new("classification recovers realized specs");
    for _ in 0..8 {
        let rank = rng.random_range(1..=2);
        let rs = root_system(rank);
        let spec = random_spec(rng, &rs, 2, 2, 40);
        let ok = realize(&spec)
            .and_then(|rep| extract_highest_weight(&rep))
            .is_ok_and(|hw| hw.e_dim == 1 && classify_inducible(&hw.functional) == Classification::Inducible(spec.clone()));
        round.check(ok);
    }

    let mut schur = Tally::new("commutant dimension follows Schur");
    let rs = root_system(2);
    let a = realize(&EvalRepSpec::new(&rs, vec![(Point::new("x"), Weight::from_ints(&[1, 1]))]).unwrap()).unwrap();
    let b = realize(&EvalRepSpec::new(&rs, vec![(Point::new("x"), Weight::from_ints(&[1, 0]))]).unwrap()).unwrap();
    let c = realize(&EvalRepSpec::new(&rs, vec![(Point::new("x"), Weight::from_ints(&[0, 2]))]).unwrap()).unwrap();
    schur.check(commutant_dim(&a).ok() == Some(1));
    schur.check(commutant_dim(&b.direct_sum(&c).unwrap()).ok() == Some(2));
    schur.check(commutant_dim(&a.direct_sum(&a).unwrap()).ok() == Some(4));

    let mut invol = Tally::new("inducible iff σ-invariant support with dominant fixed columns");
    let rs1 = root_system(1);
    for m in 1..=3 {
        for alg in FiniteInvolutiveAlgebra::all(m) {
            for _ in 0..5 {
                let values: Vec<Vec<Rational64>> = vec![(0..m)
                    .map(|_| Rational64::new(rng.random_range(-2..=3), *[1, 2].choose(rng).unwrap()))
                    .collect()];
                let f = Functional::new(alg.clone(), &rs1, values.clone()).unwrap();
                let expected = (0..m).all(|j| {
                    let v = values[0][j];
                    if alg.is_fixed(j) {
                        v.is_integer() && v >= Rational64::from_integer(0)
                    } else {
                        v == Rational64::from_integer(0)
                    }
                });
                invol.check(classify_inducible(&f).is_inducible() == expected);
            }
        }
    }
    vec![round.done(), schur.done(), invol.done()]
}

fn uhf_properties(rng: &mut ChaCha8Rng) -> Vec<PropertyOutcome> {
    let mut certs = Tally::new("certified bounds dominate partial sums");
    for _ in 0..30 {
        let rule = random_rule(rng);
        let s = rule.normal_form();
        let ok = match s.decide() {
            Verdict::Holds { bound } => s.partial_sum(10_000) <= bound * (1.0 + 1e-12),
            Verdict::Fails { .. } => !s.converges(),
            Verdict::Unknown { .. } => false,
        };
        certs.check(ok);
    }

    let mut sym = Tally::new("product-vector equivalence is reflexive and symmetric");
    for _ in 0..20 {
        let base = VectorSequence::constant(random_unit(rng, 2)).unwrap();
        let rel = VectorSequence {
            site_dim: 2,
            prefix: (0..rng.random_range(0..3)).map(|_| random_unit(rng, 2)).collect(),
            tail: VectorTail::Deficit {
                rule: random_deficit_rule(rng),
            },
        };
        let refl = itp_equivalent(&base, &base).is_ok_and(|v| v.holds());
        let fwd = itp_equivalent(&base, &rel).map(|v| v.name());
        let bwd = itp_equivalent(&rel, &base).map(|v| v.name());
        sym.check(refl && fwd.is_ok() && fwd == bwd);
    }

    let mut tri = Tally::new("projective distance satisfies the triangle inequality");
    for _ in 0..100 {
        let d = rng.random_range(1..=4);
        let (u, v, w) = (random_unit(rng, d), random_unit(rng, d), random_unit(rng, d));
        let ok = match (projective_distance(&u, &w), projective_distance(&u, &v), projective_distance(&v, &w)) {
            (Ok(a), Ok(b), Ok(c)) => a <= b + c + 1e-9,
            _ => false,
        };
        tri.check(ok);
    }

    let mut mult = Tally::new("product states are multiplicative over disjoint supports");
    for _ in 0..20 {
        let s = ProductState::constant(rng.random_range(0.0..=0.5)).unwrap();
        let mut random_m = || {
            Matrix2::from_fn(|_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        };
        let a = vec![(1, random_m()), (3, random_m())];
        let b = vec![(2, random_m()), (5, random_m())];
        let joint: Vec<_> = a.iter().chain(&b).cloned().collect();
        let ok = match (state_eval(&s, &a), state_eval(&s, &b), state_eval(&s, &joint)) {
            (Ok(x), Ok(y), Ok(z)) => (x * y - z).norm() <= 1e-12 * (1.0 + z.norm()),
            _ => false,
        };
        mult.check(ok);
    }
    vec![certs.done(), sym.done(), tri.done(), mult.done()]
}

fn boundary_properties(rng: &mut ChaCha8Rng) -> Vec<PropertyOutcome> {
    let mut mono = Tally::new("growth condition is monotone in k");
    for _ in 0..20 {
        let d = TermRule::Power {
            c: rng.random_range(0.1..1.0),
            p: rng.random_range(0.0..3.0),
        };
        let w = TermRule::Power {
            c: rng.random_range(0.1..2.0),
            p: rng.random_range(-2.0..2.0),
        };
        let verdicts: Vec<bool> = (0..5)
            .map(|k| extends_to_ck(&GrowthSpec::new(k, d.clone(), w.clone()).unwrap()).is_ok_and(|v| v.holds()))
            .collect();
        mono.check(verdicts.windows(2).all(|p| !p[0] || p[1]));
    }

    let mut crit = Tally::new("critical sections obey the factorial C^k bound");
    let rs = root_system(1);
    for k in 0..=2 {
        for gamma in [0.1, 0.5, 0.9] {
            let delta = rng.random_range(0.1..1.0);
            let s = SampledSection::critical(k, gamma, delta, 1e-3);
            crit.check(ck_norm(&s, k, &rs, Normalization::Killing).is_ok_and(|n| n <= critical_bound(k) * delta));
        }
    }
    vec![mono.done(), crit.done()]
}

fn factor_properties(rng: &mut ChaCha8Rng) -> PropertyOutcome {
    let mut t = Tally::new("character products factor back to their multisets");
    for _ in 0..20 {
        let cm = random_multiset(rng, 6, 8);
        let phi = MultiplicativePolynomial::character_product(&cm);
        let seed = rng.random();
        let ok = factor_characters(&phi, seed).is_ok_and(|got| got == cm && verify_factorization(&phi, &got, 200, seed));
        t.check(ok);
    }
    t.done()
}

/// Runs every property; the report is a function of `seed` alone.
pub fn run(seed: u64) -> SelftestReport {
    let mut rng = rng(seed);
    let mut properties = vec![dimension_oracle()];
    properties.extend(norm_properties(&mut rng));
    properties.extend(classification_properties(&mut rng));
    properties.extend(uhf_properties(&mut rng));
    properties.extend(boundary_properties(&mut rng));
    properties.push(factor_properties(&mut rng));
    SelftestReport {
        seed,
        passed: properties.iter().all(PropertyOutcome::passed),
        properties,
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_and_is_deterministic() {
        let a = run(DEFAULT_SEED);
        for p in &a.properties {
            assert!(p.passed(), "{} failed {}/{}", p.name, p.failures, p.cases);
        }
        assert_eq!(a, run(DEFAULT_SEED));
    }
}
