//! Infinite tensor products of matrix algebras: equivalence of product
//! vectors, the projective metric, Powers factors and product states.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Series, TermRule, Verdict};

/// Unit norm tolerance for materialized vectors.
pub const UNIT_TOLERANCE: f64 = 1e-12;

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_unit(v: &[Complex64]) -> Result<()> {
    let n = norm(v);
    if (n - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NotUnit(n));
    }
    Ok(())
}

fn inner(v: &[Complex64], w: &[Complex64]) -> Complex64 {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

/// `1 − |⟨v, w⟩|` for unit vectors.
///
/// Evaluated as `½·min_θ ‖v − e^{iθ}w‖²`, which avoids the cancellation in
/// `1 − |⟨v, w⟩|` when the vectors are nearly parallel.
pub fn deficit(v: &[Complex64], w: &[Complex64]) -> f64 {
    let z = inner(v, w);
    let phase = if z.norm() > 0.0 { z.conj() / z.norm() } else { Complex64::new(1.0, 0.0) };
    0.5 * v.iter().zip(w).map(|(a, b)| (a - phase * b).norm_sqr()).sum::<f64>()
}

/// `d([v], [w]) = √(2(1 − |⟨v, w⟩|))` on the projective space.
pub fn projective_distance(v: &[Complex64], w: &[Complex64]) -> Result<f64> {
    if v.len() != w.len() {
        return Err(Error::DimensionMismatch(format!("vectors of length {} and {}", v.len(), w.len())));
    }
    check_unit(v)?;
    check_unit(w)?;
    Ok((2.0 * deficit(v, w)).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorTail {
    /// `v_n` is this vector for every site past the prefix.
    Constant { vector: Vec<Complex64> },
    /// Compared with another sequence, `1 − |⟨v_n, w_n⟩|` follows `rule`.
    Deficit { rule: TermRule },
}

/// A sequence of unit vectors `v_n ∈ ℂ^d`, `n ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorSequence {
    pub site_dim: usize,
    #[serde(default)]
    pub prefix: Vec<Vec<Complex64>>,
    pub tail: VectorTail,
}

impl VectorSequence {
    pub fn constant(vector: Vec<Complex64>) -> Result<Self> {
        let s = VectorSequence {
            site_dim: vector.len(),
            prefix: Vec::new(),
            tail: VectorTail::Constant { vector },
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.site_dim == 0 {
            return Err(Error::Invalid("site dimension must be positive".into()));
        }
        let check = |v: &Vec<Complex64>| -> Result<()> {
            if v.len() != self.site_dim {
                return Err(Error::DimensionMismatch(format!(
                    "vector of length {} at site dimension {}",
                    v.len(),
                    self.site_dim
                )));
            }
            check_unit(v)
        };
        self.prefix.iter().try_for_each(check)?;
        match &self.tail {
            VectorTail::Constant { vector } => check(vector),
            VectorTail::Deficit { rule } => {
                rule.validate()?;
                if rule.normal_form().supremum().is_none_or(|s| s > 1.0) {
                    return Err(Error::InvalidRule("a deficit never exceeds 1".into()));
                }
                Ok(())
            }
        }
    }

    /// `v_n` when it is determined by the sequence alone.
    pub fn vector(&self, n: u64) -> Option<&[Complex64]> {
        let idx = usize::try_from(n.checked_sub(1)?).ok()?;
        match (self.prefix.get(idx), &self.tail) {
            (Some(v), _) => Some(v),
            (None, VectorTail::Constant { vector }) => Some(vector),
            (None, VectorTail::Deficit { .. }) => None,
        }
    }
}

/// The deficit series `n ↦ 1 − |⟨v_n, w_n⟩|` in normal form.
///
/// `None` when both tails are relative, which the language cannot compare.
pub fn deficit_series(v: &VectorSequence, w: &VectorSequence) -> Result<Option<Series>> {
    if v.site_dim != w.site_dim {
        return Err(Error::DimensionMismatch(format!(
            "site dimensions {} and {}",
            v.site_dim, w.site_dim
        )));
    }
    v.validate()?;
    w.validate()?;
    if v == w {
        return Ok(Some(Series::zero()));
    }
    let tail = match (&v.tail, &w.tail) {
        (VectorTail::Constant { vector: a }, VectorTail::Constant { vector: b }) => {
            let d = deficit(a, b);
            // unit vectors carry an uncertainty of UNIT_TOLERANCE
            let d = if d <= UNIT_TOLERANCE { 0.0 } else { d };
            Series::tail(d, 0.0, 1.0)
        }
        (VectorTail::Deficit { rule }, VectorTail::Constant { .. })
        | (VectorTail::Constant { .. }, VectorTail::Deficit { rule }) => rule.normal_form(),
        (VectorTail::Deficit { .. }, VectorTail::Deficit { .. }) => return Ok(None),
    };
    let reach = v.prefix.len().max(w.prefix.len()) as u64;
    let overrides: Vec<(u64, f64)> = (1..=reach)
        .filter_map(|n| Some((n, deficit(v.vector(n)?, w.vector(n)?))))
        .collect();
    Ok(Some(tail.with_overrides(overrides)))
}

/// Decides unitary equivalence of the product representations
/// `⊗(ℂ^d, v_n)` and `⊗(ℂ^d, w_n)` by summability of the deficit series.
pub fn itp_equivalent(v: &VectorSequence, w: &VectorSequence) -> Result<Verdict> {
    match deficit_series(v, w)? {
        Some(s) => Ok(s.decide()),
        None => {
            // report what the prefixes alone contribute
            let reach = v.prefix.len().min(w.prefix.len()) as u64;
            let partial: f64 = (1..=reach)
                .filter_map(|n| Some(deficit(v.vector(n)?, w.vector(n)?)))
                .sum();
            Ok(Verdict::Unknown {
                partial_sum: partial,
                terms_examined: reach,
            })
        }
    }
}

/// Σ d([v_n], [w_n])², which is twice the deficit series.
pub fn distance_sq_series(v: &VectorSequence, w: &VectorSequence) -> Result<Option<Series>> {
    Ok(deficit_series(v, w)?.map(|s| s.scale(2.0)))
}

/// Per-site weights `p_n ∈ [0, 1/2]` of the state
/// `φ_n(a b; c d) = p_n·a + (1 − p_n)·d` on `M₂(ℂ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductState {
    pub rule: TermRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorType {
    TypeI,
    TypeII1,
    TypeIII,
    Unknown,
}

impl ProductState {
    pub fn new(rule: TermRule) -> Result<Self> {
        rule.validate()?;
        match rule.normal_form().supremum() {
            Some(s) if s <= 0.5 => Ok(ProductState { rule }),
            _ => Err(Error::InvalidRule("state weights must lie in [0, 1/2]".into())),
        }
    }

    pub fn constant(p: f64) -> Result<Self> {
        Self::new(TermRule::Const { c: p })
    }

    pub fn weight(&self, n: u64) -> f64 {
        self.rule.term(n)
    }
}

/// Factor type of the GNS representation of `⊗ φ_n`, for the cases the
/// tail of the rule decides: eventually 0, eventually 1/2, and a constant
/// tail strictly between them.
pub fn powers_factor_type(s: &ProductState) -> FactorType {
    match s.rule.normal_form().eventual_constant() {
        Some(0.0) => FactorType::TypeI,
        Some(0.5) => FactorType::TypeII1,
        Some(p) if 0.0 < p && p < 0.5 => FactorType::TypeIII,
        _ => FactorType::Unknown,
    }
}

/// Evaluates `⊗ φ_n` on `⊗_n A_n` with `A_n = 1` off the listed sites.
pub fn state_eval(s: &ProductState, op: &[(u64, Matrix2<Complex64>)]) -> Result<Complex64> {
    let mut seen = std::collections::BTreeSet::new();
    let mut acc = Complex64::new(1.0, 0.0);
    for (n, m) in op {
        if *n == 0 {
            return Err(Error::InvalidSite(*n));
        }
        if !seen.insert(*n) {
            return Err(Error::DuplicateSite(*n));
        }
        let p = s.weight(*n);
        acc *= m[(0, 0)] * p + m[(1, 1)] * (1.0 - p);
    }
    Ok(acc)
}

/// A norm rule with finite supremum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundedRule {
    rule: TermRule,
    sup: f64,
}

impl BoundedRule {
    pub fn new(rule: TermRule) -> Result<Self> {
        rule.validate()?;
        let sup = rule
            .normal_form()
            .supremum()
            .ok_or_else(|| Error::UnboundedRule(rule.to_string()))?;
        Ok(BoundedRule { rule, sup })
    }

    pub fn rule(&self) -> &TermRule {
        &self.rule
    }

    pub fn sup(&self) -> f64 {
        self.sup
    }
}

/// Boundedness of `η_ρ`, with `‖η_ρ‖ ≤ sup_n ‖ρ_n‖` as the certificate.
pub fn l1_embedding_bound(norms: &BoundedRule) -> Verdict {
    Verdict::Holds { bound: norms.sup }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn distances() {
        let e1 = vec![c(1.0), c(0.0)];
        let e2 = vec![c(0.0), c(1.0)];
        assert_eq!(projective_distance(&e1, &e1).unwrap(), 0.0);
        assert!((projective_distance(&e1, &e2).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let w = vec![c((PI / 3.0).cos()), c((PI / 3.0).sin())];
        assert!((projective_distance(&e1, &w).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(projective_distance(&[c(2.0)], &[c(1.0)]), Err(Error::NotUnit(_))));
    }

    #[test]
    fn equivalence_examples() {
        let v = VectorSequence::constant(vec![c(1.0), c(0.0)]).unwrap();
        assert_eq!(itp_equivalent(&v, &v).unwrap(), Verdict::Holds { bound: 0.0 });
        let rel = |rule| VectorSequence {
            site_dim: 2,
            prefix: vec![],
            tail: VectorTail::Deficit { rule },
        };
        assert!(itp_equivalent(&v, &rel(TermRule::Power { c: 1.0, p: 2.0 })).unwrap().holds());
        assert!(itp_equivalent(&rel(TermRule::Const { c: 0.5 }), &v).unwrap().fails());
        let both = itp_equivalent(&rel(TermRule::Const { c: 0.5 }), &rel(TermRule::Const { c: 0.0 })).unwrap();
        assert_eq!(both.name(), "unknown");
        let other = VectorSequence::constant(vec![c(0.0), c(1.0)]).unwrap();
        assert!(itp_equivalent(&v, &other).unwrap().fails());
        // differing only on a prefix
        let mut mixed = v.clone();
        mixed.prefix = vec![vec![c(0.0), c(1.0)]; 3];
        let Verdict::Holds { bound } = itp_equivalent(&v, &mixed).unwrap() else { panic!() };
        assert!((bound - 3.0).abs() < 1e-12);
    }

    #[test]
    fn powers_cases() {
        assert_eq!(powers_factor_type(&ProductState::constant(0.0).unwrap()), FactorType::TypeI);
        assert_eq!(powers_factor_type(&ProductState::constant(0.5).unwrap()), FactorType::TypeII1);
        assert_eq!(powers_factor_type(&ProductState::constant(0.25).unwrap()), FactorType::TypeIII);
        let g = ProductState::new(TermRule::Geometric { c: 0.5, q: 0.5 }).unwrap();
        assert_eq!(powers_factor_type(&g), FactorType::Unknown);
        assert!(ProductState::constant(0.75).is_err());
    }

    #[test]
    fn state_values() {
        let s = ProductState::constant(0.25).unwrap();
        assert_eq!(state_eval(&s, &[]).unwrap(), c(1.0));
        let a = Matrix2::new(c(1.0), c(0.0), c(0.0), c(0.0));
        assert_eq!(state_eval(&s, &[(1, a)]).unwrap(), c(0.25));
        let d = Matrix2::new(c(0.0), c(0.0), c(0.0), c(1.0));
        assert_eq!(state_eval(&s, &[(1, d), (2, d)]).unwrap(), c(0.5625));
        assert_eq!(state_eval(&s, &[(1, d), (1, d)]), Err(Error::DuplicateSite(1)));
    }

    #[test]
    fn embedding_bounds() {
        let b = BoundedRule::new(TermRule::Const { c: 1.0 }).unwrap();
        assert_eq!(l1_embedding_bound(&b), Verdict::Holds { bound: 1.0 });
        let b = BoundedRule::new(TermRule::EventuallyZero { prefix: vec![3.0, 2.0, 1.0] }).unwrap();
        assert_eq!(l1_embedding_bound(&b), Verdict::Holds { bound: 3.0 });
        assert!(matches!(
            BoundedRule::new(TermRule::Power { c: 1.0, p: -1.0 }),
            Err(Error::UnboundedRule(_))
        ));
    }
}
