//! Factorization of multiplicative polynomial maps `ℂ^m → ℂ` into products
//! of characters. The characters of `ℂ^m` are the coordinate projections.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evalrep::FiniteInvolutiveAlgebra;

/// Relative tolerance of pointwise identity checks.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;
/// Allowed distance of a recovered exponent from an integer.
pub const EXPONENT_TOLERANCE: f64 = 1e-6;
/// Random pairs tested for `φ(ab) = φ(a)φ(b)`.
pub const MULTIPLICATIVITY_PAIRS: usize = 16;
pub const VERIFY_TRIALS: usize = 1000;

pub type BlackBox = Arc<dyn Fn(&[Complex64]) -> Complex64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub coefficient: Complex64,
}

#[derive(Clone)]
pub enum Evaluator {
    BlackBox(BlackBox),
    Monomials(Vec<Monomial>),
}

impl fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evaluator::BlackBox(_) => write!(f, "BlackBox(..)"),
            Evaluator::Monomials(m) => f.debug_tuple("Monomials").field(m).finish(),
        }
    }
}

/// A polynomial map `φ: ℂ^m → ℂ` of declared degree `N`.
#[derive(Debug, Clone)]
pub struct MultiplicativePolynomial {
    m: usize,
    degree: u32,
    evaluator: Evaluator,
}

impl MultiplicativePolynomial {
    pub fn black_box(m: usize, degree: u32, f: impl Fn(&[Complex64]) -> Complex64 + Send + Sync + 'static) -> Result<Self> {
        if m == 0 {
            return Err(Error::Invalid("m must be positive".into()));
        }
        Ok(MultiplicativePolynomial {
            m,
            degree,
            evaluator: Evaluator::BlackBox(Arc::new(f)),
        })
    }

    /// A coefficient table; the degree defaults to the largest total degree.
    pub fn from_monomials(monomials: Vec<Monomial>, m: Option<usize>, degree: Option<u32>) -> Result<Self> {
        let m = match m {
            Some(m) => m,
            None => monomials
                .first()
                .map(|t| t.exponents.len())
                .ok_or_else(|| Error::Invalid("m is required for an empty table".into()))?,
        };
        if m == 0 {
            return Err(Error::Invalid("m must be positive".into()));
        }
        for t in &monomials {
            if t.exponents.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "monomial has {} exponents, expected {m}",
                    t.exponents.len()
                )));
            }
            if !(t.coefficient.re.is_finite() && t.coefficient.im.is_finite()) {
                return Err(Error::Invalid("coefficients must be finite".into()));
            }
        }
        let inferred = monomials
            .iter()
            .filter(|t| t.coefficient != Complex64::new(0.0, 0.0))
            .map(|t| t.exponents.iter().sum::<u32>())
            .max()
            .unwrap_or(0);
        Ok(MultiplicativePolynomial {
            m,
            degree: degree.unwrap_or(inferred),
            evaluator: Evaluator::Monomials(monomials),
        })
    }

    /// `∏ a_i^{m_i}` as a table with one monomial.
    pub fn character_product(cm: &CharacterMultiset) -> Self {
        let monomials = vec![Monomial {
            exponents: cm.exponents(),
            coefficient: Complex64::new(1.0, 0.0),
        }];
        MultiplicativePolynomial {
            m: cm.m,
            degree: cm.degree(),
            evaluator: Evaluator::Monomials(monomials),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    pub fn eval(&self, a: &[Complex64]) -> Complex64 {
        match &self.evaluator {
            Evaluator::BlackBox(f) => f(a),
            Evaluator::Monomials(ts) => ts
                .iter()
                .map(|t| {
                    t.exponents
                        .iter()
                        .zip(a)
                        .fold(t.coefficient, |acc, (&e, z)| acc * z.powu(e))
                })
                .sum(),
        }
    }
}

/// Exponents `m_i` of `φ = ∏_i π_i^{m_i}`, indexed from 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterMultiset {
    pub m: usize,
    #[serde(with = "one_based")]
    pub multiplicities: BTreeMap<usize, u32>,
}

mod one_based {
    use std::collections::BTreeMap;

    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<usize, u32>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, u32>, D::Error> {
        BTreeMap::<String, u32>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| match k.parse::<usize>() {
                Ok(i) if i >= 1 => Ok((i, v)),
                _ => Err(D::Error::custom(format!("character index `{k}` must be a positive integer"))),
            })
            .collect()
    }
}

impl CharacterMultiset {
    pub fn new(m: usize, multiplicities: BTreeMap<usize, u32>) -> Result<Self> {
        let cm = CharacterMultiset {
            m,
            multiplicities: multiplicities.into_iter().filter(|&(_, v)| v > 0).collect(),
        };
        if let Some(&i) = cm.multiplicities.keys().find(|&&i| i == 0 || i > m) {
            return Err(Error::DimensionMismatch(format!("character index {i} outside 1..={m}")));
        }
        Ok(cm)
    }

    pub fn from_exponents(exponents: &[u32]) -> Self {
        CharacterMultiset {
            m: exponents.len(),
            multiplicities: exponents
                .iter()
                .enumerate()
                .filter(|&(_, &e)| e > 0)
                .map(|(i, &e)| (i + 1, e))
                .collect(),
        }
    }

    pub fn exponents(&self) -> Vec<u32> {
        (1..=self.m)
            .map(|i| self.multiplicities.get(&i).copied().unwrap_or(0))
            .collect()
    }

    pub fn degree(&self) -> u32 {
        self.multiplicities.values().sum()
    }
}

/// Uniform sample of the unit disk.
fn disk_point(rng: &mut impl Rng) -> Complex64 {
    let r: f64 = rng.random::<f64>().sqrt();
    let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, t)
}

fn disk_vector(rng: &mut impl Rng, m: usize) -> Vec<Complex64> {
    (0..m).map(|_| disk_point(rng)).collect()
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= IDENTITY_TOLERANCE * (1.0 + a.norm())
}

/// Checks `|φ(a) − ∏ a_i^{m_i}| ≤ 1e−9·(1 + |φ(a)|)` on `trials` points of the unit polydisk.
pub fn verify_factorization(phi: &MultiplicativePolynomial, cm: &CharacterMultiset, trials: usize, seed: u64) -> bool {
    if cm.m != phi.m {
        return false;
    }
    let exps = cm.exponents();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).all(|_| {
        let a = disk_vector(&mut rng, phi.m);
        let product = a.iter().zip(&exps).fold(Complex64::new(1.0, 0.0), |acc, (z, &e)| acc * z.powu(e));
        close(phi.eval(&a), product)
    })
}

/// Writes a multiplicative `φ` as a product of coordinate characters.
pub fn factor_characters(phi: &MultiplicativePolynomial, seed: u64) -> Result<CharacterMultiset> {
    let m = phi.m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MULTIPLICATIVITY_PAIRS {
        let a = disk_vector(&mut rng, m);
        let b = disk_vector(&mut rng, m);
        let ab: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let lhs = phi.eval(&ab);
        let rhs = phi.eval(&a) * phi.eval(&b);
        if !close(lhs, rhs) {
            return Err(Error::NotMultiplicative(format!(
                "φ(ab) = {lhs:.6e} but φ(a)φ(b) = {rhs:.6e}"
            )));
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let mut exponents = Vec::with_capacity(m);
    for i in 0..m {
        let mut a = vec![one; m];
        a[i] = Complex64::new(2.0, 0.0);
        let v = phi.eval(&a);
        let value = v.norm().log2();
        let real_positive = v.re > 0.0 && v.im.abs() <= EXPONENT_TOLERANCE * v.norm();
        let rounded = value.round();
        if !real_positive || !value.is_finite() || (value - rounded).abs() > EXPONENT_TOLERANCE || rounded < 0.0 {
            return Err(Error::NonIntegerExponent { index: i + 1, value });
        }
        exponents.push(rounded as u32);
    }
    let cm = CharacterMultiset::from_exponents(&exponents);
    if cm.degree() != phi.degree {
        return Err(Error::InconsistentDegree {
            declared: phi.degree,
            got: cm.degree(),
        });
    }
    if !verify_factorization(phi, &cm, VERIFY_TRIALS, seed.wrapping_add(1)) {
        return Err(Error::NotMultiplicative(
            "recovered character product disagrees with φ at a sample point".into(),
        ));
    }
    Ok(cm)
}

/// True if every character in the product is fixed by the involution.
pub fn involutive_support(cm: &CharacterMultiset, alg: &FiniteInvolutiveAlgebra) -> Result<bool> {
    if cm.m != alg.dim() {
        return Err(Error::DimensionMismatch(format!(
            "multiset over ℂ^{} but algebra of dimension {}",
            cm.m,
            alg.dim()
        )));
    }
    Ok(cm.multiplicities.keys().all(|&i| alg.is_fixed(i - 1)))
}

/// JSON form of a coefficient table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    pub monomials: Vec<Monomial>,
}

impl PolynomialDoc {
    pub fn to_polynomial(&self) -> Result<MultiplicativePolynomial> {
        MultiplicativePolynomial::from_monomials(self.monomials.clone(), self.m, self.degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[(&[u32], f64)]) -> MultiplicativePolynomial {
        let monomials = rows
            .iter()
            .map(|(e, c)| Monomial {
                exponents: e.to_vec(),
                coefficient: Complex64::new(*c, 0.0),
            })
            .collect();
        MultiplicativePolynomial::from_monomials(monomials, None, None).unwrap()
    }

    #[test]
    fn factor_examples() {
        let cm = factor_characters(&table(&[(&[1, 0], 1.0)]), 7).unwrap();
        assert_eq!(cm.multiplicities, BTreeMap::from([(1, 1)]));
        let cm = factor_characters(&table(&[(&[2, 0, 1], 1.0)]), 7).unwrap();
        assert_eq!(cm.multiplicities, BTreeMap::from([(1, 2), (3, 1)]));
        let bad = table(&[(&[1, 1, 0], 1.0), (&[0, 0, 1], 1.0)]);
        assert!(matches!(factor_characters(&bad, 7), Err(Error::NotMultiplicative(_))));
    }

    #[test]
    fn black_box_and_degree() {
        let phi = MultiplicativePolynomial::black_box(2, 3, |a| a[0] * a[1] * a[1]).unwrap();
        assert_eq!(factor_characters(&phi, 1).unwrap().exponents(), vec![1, 2]);
        let phi = MultiplicativePolynomial::black_box(2, 2, |a| a[0] * a[1] * a[1]).unwrap();
        assert_eq!(
            factor_characters(&phi, 1),
            Err(Error::InconsistentDegree { declared: 2, got: 3 })
        );
        let noisy = MultiplicativePolynomial::black_box(1, 1, |a| a[0] * 1.001).unwrap();
        assert!(factor_characters(&noisy, 1).is_err());
    }

    #[test]
    fn verification_examples() {
        let phi = table(&[(&[2, 0, 1], 1.0)]);
        let good = CharacterMultiset::new(3, BTreeMap::from([(1, 2), (3, 1)])).unwrap();
        let swapped = CharacterMultiset::new(3, BTreeMap::from([(1, 1), (3, 2)])).unwrap();
        assert!(verify_factorization(&phi, &good, 100, 3));
        assert!(!verify_factorization(&phi, &swapped, 100, 3));
        let constant = MultiplicativePolynomial::black_box(2, 0, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(verify_factorization(&constant, &CharacterMultiset::from_exponents(&[0, 0]), 10, 3));
    }

    #[test]
    fn involutive_examples() {
        let cm = CharacterMultiset::new(2, BTreeMap::from([(1, 1)])).unwrap();
        assert!(involutive_support(&cm, &FiniteInvolutiveAlgebra::identity(2)).unwrap());
        assert!(!involutive_support(&cm, &FiniteInvolutiveAlgebra::swapped_pair()).unwrap());
        let alg = FiniteInvolutiveAlgebra::from_one_based(&[2, 1, 3]).unwrap();
        let cm3 = CharacterMultiset::new(3, BTreeMap::from([(3, 2)])).unwrap();
        assert!(involutive_support(&cm3, &alg).unwrap());
        assert!(involutive_support(&cm3, &FiniteInvolutiveAlgebra::identity(2)).is_err());
    }

    #[test]
    fn doc_shape() {
        let doc: PolynomialDoc =
            serde_json::from_str(r#"{"monomials":[{"exponents":[2,0,1],"coefficient":[1.0,0.0]}]}"#).unwrap();
        let phi = doc.to_polynomial().unwrap();
        assert_eq!((phi.m(), phi.degree()), (3, 3));
        let cm = CharacterMultiset::from_exponents(&[2, 0, 1]);
        assert_eq!(serde_json::to_string(&cm).unwrap(), r#"{"m":3,"multiplicities":{"1":2,"3":1}}"#);
    }
}
