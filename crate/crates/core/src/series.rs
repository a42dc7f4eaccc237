//! A closed-form language of nonnegative sequences with decidable summability.
//!
//! Every rule normalizes to `c · n^(−p) · q^(n−1)` for `n ≥ 1`, with finitely
//! many overridden terms. That family is closed under products and integer
//! powers, and `Σ_n` converges iff `c = 0`, `q < 1`, or `p > 1`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonnegative sequence indexed from `n = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TermRule {
    /// `c`
    Const { c: f64 },
    /// `c · n^(−p)`
    Power { c: f64, p: f64 },
    /// `c · q^(n−1)` with `0 ≤ q < 1`
    Geometric { c: f64, q: f64 },
    /// The listed terms, then zeros.
    EventuallyZero { prefix: Vec<f64> },
    /// `base` with finitely many terms replaced.
    FinitelyModified {
        base: Box<TermRule>,
        #[serde(with = "index_map")]
        overrides: BTreeMap<u64, f64>,
    },
}

// Tagged enums buffer their content, which loses serde_json's handling of
// integer map keys, so keys go through strings explicitly.
mod index_map {
    use std::collections::BTreeMap;

    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<u64, f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u64, f64>, D::Error> {
        BTreeMap::<String, f64>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| {
                k.parse::<u64>()
                    .map(|k| (k, v))
                    .map_err(|_| D::Error::custom(format!("override index `{k}` is not a positive integer")))
            })
            .collect()
    }
}

fn check_term(what: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::InvalidRule(format!("{what} must be finite and nonnegative, got {v}")));
    }
    Ok(())
}

impl TermRule {
    pub fn validate(&self) -> Result<()> {
        match self {
            TermRule::Const { c } => check_term("c", *c),
            TermRule::Power { c, p } => {
                check_term("c", *c)?;
                if !p.is_finite() {
                    return Err(Error::InvalidRule(format!("exponent must be finite, got {p}")));
                }
                Ok(())
            }
            TermRule::Geometric { c, q } => {
                check_term("c", *c)?;
                if !(0.0..1.0).contains(q) {
                    return Err(Error::InvalidRule(format!("ratio must lie in [0, 1), got {q}")));
                }
                Ok(())
            }
            TermRule::EventuallyZero { prefix } => prefix.iter().try_for_each(|&v| check_term("term", v)),
            TermRule::FinitelyModified { base, overrides } => {
                base.validate()?;
                for (&n, &v) in overrides {
                    if n == 0 {
                        return Err(Error::InvalidRule("override index must be ≥ 1".into()));
                    }
                    check_term("override", v)?;
                }
                Ok(())
            }
        }
    }

    pub fn term(&self, n: u64) -> f64 {
        self.normal_form().term(n)
    }

    pub fn normal_form(&self) -> Series {
        match self {
            TermRule::Const { c } => Series::tail(*c, 0.0, 1.0),
            TermRule::Power { c, p } => Series::tail(*c, *p, 1.0),
            TermRule::Geometric { c, q } => Series::tail(*c, 0.0, *q),
            TermRule::EventuallyZero { prefix } => Series {
                overrides: prefix.iter().enumerate().map(|(i, &v)| (i as u64 + 1, v)).collect(),
                ..Series::zero()
            },
            TermRule::FinitelyModified { base, overrides } => {
                let mut s = base.normal_form();
                s.overrides.extend(overrides.iter().map(|(&k, &v)| (k, v)));
                s
            }
        }
    }

    /// Parses the short form used on the command line:
    /// `const:c`, `power:c,p`, `geometric:c,q`, `ezero:t1,t2,..`.
    pub fn parse_short(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if args.trim().is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| {
                    a.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidRule(format!("bad number `{a}` in `{s}`")))
                })
                .collect::<Result<_>>()?
        };
        let arity = |n: usize| -> Result<()> {
            if nums.len() != n {
                return Err(Error::InvalidRule(format!("`{kind}` takes {n} argument(s) in `{s}`")));
            }
            Ok(())
        };
        let rule = match kind.trim() {
            "const" => {
                arity(1)?;
                TermRule::Const { c: nums[0] }
            }
            "power" => {
                arity(2)?;
                TermRule::Power { c: nums[0], p: nums[1] }
            }
            "geometric" | "geom" => {
                arity(2)?;
                TermRule::Geometric { c: nums[0], q: nums[1] }
            }
            "ezero" | "eventually_zero" => TermRule::EventuallyZero { prefix: nums },
            other => return Err(Error::InvalidRule(format!("unknown rule kind `{other}`"))),
        };
        rule.validate()?;
        Ok(rule)
    }
}

impl fmt::Display for TermRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermRule::Const { c } => write!(f, "const:{c}"),
            TermRule::Power { c, p } => write!(f, "power:{c},{p}"),
            TermRule::Geometric { c, q } => write!(f, "geometric:{c},{q}"),
            TermRule::EventuallyZero { prefix } => {
                write!(f, "ezero:")?;
                for (i, v) in prefix.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
            TermRule::FinitelyModified { base, overrides } => {
                write!(f, "{base} with {} override(s)", overrides.len())
            }
        }
    }
}

/// Normal form `n ↦ overrides[n]` or `coeff · n^(−power) · ratio^(n−1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub coeff: f64,
    pub power: f64,
    pub ratio: f64,
    pub overrides: BTreeMap<u64, f64>,
}

/// Why a series diverges.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Divergence {
    /// Terms tend to a positive constant.
    ConstantTerms { c: f64 },
    /// `c · n^(−p)` with `0 < p ≤ 1`.
    SlowPSeries { p: f64 },
    /// `c · n^(−p)` with `p < 0`.
    GrowingTerms { p: f64 },
}

/// Outcome of a summability decision.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Decided convergent; `bound` is a closed-form upper bound on the sum.
    Holds { bound: f64 },
    Fails { witness: Divergence },
    /// Outside the decidable language.
    Unknown { partial_sum: f64, terms_examined: u64 },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Holds { .. } => "holds",
            Verdict::Fails { .. } => "fails",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

impl Series {
    pub fn zero() -> Self {
        Series::tail(0.0, 0.0, 1.0)
    }

    pub fn tail(coeff: f64, power: f64, ratio: f64) -> Self {
        Series {
            coeff,
            power,
            ratio,
            overrides: BTreeMap::new(),
        }
    }

    pub fn tail_term(&self, n: u64) -> f64 {
        if self.coeff == 0.0 {
            return 0.0;
        }
        let nf = n as f64;
        self.coeff * nf.powf(-self.power) * self.ratio.powi((n - 1).min(i32::MAX as u64) as i32)
    }

    pub fn term(&self, n: u64) -> f64 {
        self.overrides.get(&n).copied().unwrap_or_else(|| self.tail_term(n))
    }

    pub fn partial_sum(&self, terms: u64) -> f64 {
        (1..=terms).map(|n| self.term(n)).sum()
    }

    pub fn scale(&self, s: f64) -> Series {
        Series {
            coeff: self.coeff * s,
            power: self.power,
            ratio: self.ratio,
            overrides: self.overrides.iter().map(|(&n, &v)| (n, v * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Series) -> Series {
        let mut overrides = BTreeMap::new();
        for &n in self.overrides.keys().chain(other.overrides.keys()) {
            overrides.insert(n, self.term(n) * other.term(n));
        }
        Series {
            coeff: self.coeff * other.coeff,
            power: self.power + other.power,
            ratio: self.ratio * other.ratio,
            overrides,
        }
    }

    /// `n ↦ t_n^k`, with `0^0 = 1`.
    pub fn powi(&self, k: u32) -> Series {
        if k == 0 {
            return Series::tail(1.0, 0.0, 1.0);
        }
        Series {
            coeff: self.coeff.powi(k as i32),
            power: self.power * k as f64,
            ratio: self.ratio.powi(k as i32),
            overrides: self.overrides.iter().map(|(&n, &v)| (n, v.powi(k as i32))).collect(),
        }
    }

    /// Replaces the terms at the given indices.
    pub fn with_overrides(mut self, overrides: impl IntoIterator<Item = (u64, f64)>) -> Series {
        self.overrides.extend(overrides);
        self
    }

    pub fn converges(&self) -> bool {
        self.coeff == 0.0 || self.ratio < 1.0 || self.power > 1.0
    }

    /// True if the tail is eventually the constant returned.
    pub fn eventual_constant(&self) -> Option<f64> {
        if self.coeff == 0.0 || self.ratio == 0.0 {
            Some(0.0)
        } else if self.power == 0.0 && self.ratio == 1.0 {
            Some(self.coeff)
        } else {
            None
        }
    }

    /// Upper bound on `Σ_{n≥1} coeff·n^(−power)·ratio^(n−1)` when it converges.
    fn tail_sum_bound(&self) -> f64 {
        let c = self.coeff;
        if c == 0.0 {
            return 0.0;
        }
        if self.ratio < 1.0 {
            if self.power >= 0.0 {
                return c / (1.0 - self.ratio);
            }
            // n^a q^(n−1) with a = −power > 0: sum until the term ratio
            // ((n+1)/n)^a·q drops below ρ < 1, then bound the rest geometrically.
            let a = -self.power;
            let q = self.ratio;
            let rho = q.sqrt();
            let mut n = 1u64;
            let mut acc = 0.0;
            loop {
                let t = self.tail_term(n);
                let step = ((n as f64 + 1.0) / n as f64).powf(a) * q;
                if step <= rho {
                    return (acc + t / (1.0 - rho)) * (1.0 + 1e-12);
                }
                acc += t;
                n += 1;
            }
        }
        // ratio == 1 and power > 1: ζ(p) ≤ 1 + 1/(p−1)
        c * self.power / (self.power - 1.0)
    }

    /// Decides summability, attaching a certified bound or a divergence witness.
    pub fn decide(&self) -> Verdict {
        if self.converges() {
            let extra: f64 = self
                .overrides
                .iter()
                .map(|(&n, &v)| (v - self.tail_term(n)).max(0.0))
                .sum();
            return Verdict::Holds {
                bound: self.tail_sum_bound() + extra,
            };
        }
        let witness = if self.power == 0.0 {
            Divergence::ConstantTerms { c: self.coeff }
        } else if self.power > 0.0 {
            Divergence::SlowPSeries { p: self.power }
        } else {
            Divergence::GrowingTerms { p: self.power }
        };
        Verdict::Fails { witness }
    }

    /// `sup_n t_n`, or `None` when the terms are unbounded.
    pub fn supremum(&self) -> Option<f64> {
        let over = self.overrides.values().copied().fold(0.0, f64::max);
        if self.coeff == 0.0 {
            return Some(over);
        }
        let first_free = (1..).find(|n| !self.overrides.contains_key(n)).expect("finitely many overrides");
        let tail = if self.power >= 0.0 {
            // nonincreasing in n
            self.tail_term(first_free)
        } else if self.ratio >= 1.0 {
            return None;
        } else {
            let peak = (-self.power / -self.ratio.ln()).ceil().max(1.0) as u64;
            (first_free..=peak.max(first_free) + 2)
                .filter(|n| !self.overrides.contains_key(n))
                .map(|n| self.tail_term(n))
                .fold(0.0, f64::max)
        };
        Some(over.max(tail))
    }
}
