//! C^k boundary behaviour on the model `X = [0, 1]` with `∂X = {0}`.
//!
//! Sections are sampled on a uniform grid `x_i = i·h` and differentiated by
//! finite differences that are second order accurate or better. In this
//! trivial model the constant relating the C^k norm to the coordinate
//! derivatives is 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evalrep::EvalRepSpec;
use crate::irrep::{build_irrep, operator_norm, CompactElement, Irrep};
use crate::rootdata::{kappa_norm, Normalization, RootSystem};
use crate::series::{TermRule, Verdict};

/// Relative tolerance of the vanishing-order check at the boundary.
pub const ORDER_TOLERANCE: f64 = 1e-3;

/// Data of the growth condition `Σ_n ‖λ_n‖_κ · d_nᵏ < ∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSpec {
    pub k: u32,
    pub distance_rule: TermRule,
    pub weight_norm_rule: TermRule,
}

impl GrowthSpec {
    pub fn new(k: u32, distance_rule: TermRule, weight_norm_rule: TermRule) -> Result<Self> {
        let g = GrowthSpec {
            k,
            distance_rule,
            weight_norm_rule,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        self.distance_rule.validate()?;
        self.weight_norm_rule.validate()?;
        let d = self.distance_rule.normal_form();
        if d.coeff <= 0.0 || d.ratio <= 0.0 || d.overrides.values().any(|&v| v <= 0.0) {
            return Err(Error::InvalidRule("boundary distances must be positive".into()));
        }
        Ok(())
    }
}

/// Decides whether the product of evaluation representations extends to
/// sections of class C^k vanishing to order k on the boundary.
pub fn extends_to_ck(g: &GrowthSpec) -> Result<Verdict> {
    g.validate()?;
    let d = g.distance_rule.normal_form();
    let w = g.weight_norm_rule.normal_form();
    Ok(w.mul(&d.powi(g.k)).decide())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SectionValues {
    /// Multiples of a fixed unit direction.
    Scalar(Vec<f64>),
    Compact(Vec<CompactElement>),
}

/// A section of the trivial bundle sampled at `x_i = i·grid_step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledSection {
    pub grid_step: f64,
    pub values: SectionValues,
    /// Direction for scalar samples. Rescaled to unit κ-norm; defaults to `i·H_1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<CompactElement>,
}

fn flat(x: &CompactElement, rs: &RootSystem) -> Vec<f64> {
    let np = rs.positive_roots().len();
    let pad = |v: &[f64], n: usize| (0..n).map(|i| v.get(i).copied().unwrap_or(0.0)).collect::<Vec<_>>();
    let mut out = pad(&x.torus, rs.rank());
    out.extend(pad(&x.real, np));
    out.extend(pad(&x.imag, np));
    out
}

fn unflat(v: &[f64], rs: &RootSystem) -> CompactElement {
    let r = rs.rank();
    let np = rs.positive_roots().len();
    CompactElement {
        torus: v[..r].to_vec(),
        real: v[r..r + np].to_vec(),
        imag: v[r + np..].to_vec(),
    }
}

/// Fornberg's weights for derivatives `0..=m` at `x0` on the nodes `xs`.
fn fornberg(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

impl SampledSection {
    pub fn scalar(grid_step: f64, values: Vec<f64>) -> Self {
        SampledSection {
            grid_step,
            values: SectionValues::Scalar(values),
            direction: None,
        }
    }

    /// Samples `f` on `[0, 1]`.
    pub fn from_fn(grid_step: f64, f: impl Fn(f64) -> f64) -> Self {
        let n = (1.0 / grid_step).round() as usize;
        Self::scalar(grid_step, (0..=n).map(|i| f(i as f64 * grid_step)).collect())
    }

    /// The critical family `δ·x^(k+γ)·ξ₀`.
    pub fn critical(k: u32, gamma: f64, delta: f64, grid_step: f64) -> Self {
        Self::from_fn(grid_step, |x| delta * x.powf(k as f64 + gamma))
    }

    pub fn len(&self) -> usize {
        match &self.values {
            SectionValues::Scalar(v) => v.len(),
            SectionValues::Compact(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn extent(&self) -> f64 {
        self.len().saturating_sub(1) as f64 * self.grid_step
    }

    pub fn validate(&self, rs: &RootSystem) -> Result<()> {
        if !(self.grid_step.is_finite() && self.grid_step > 0.0) {
            return Err(Error::Invalid(format!("grid step must be positive, got {}", self.grid_step)));
        }
        if self.is_empty() {
            return Err(Error::GridTooCoarse { needed: 1, got: 0 });
        }
        let np = rs.positive_roots().len();
        let fits = |x: &CompactElement| {
            x.torus.len() <= rs.rank()
                && x.real.len() <= np
                && x.imag.len() <= np
                && x.torus.iter().chain(&x.real).chain(&x.imag).all(|c| c.is_finite())
        };
        match &self.values {
            SectionValues::Scalar(v) => {
                if v.iter().any(|c| !c.is_finite()) {
                    return Err(Error::Invalid("section samples must be finite".into()));
                }
            }
            SectionValues::Compact(v) => {
                if !v.iter().all(fits) {
                    return Err(Error::DimensionMismatch(format!(
                        "section values do not fit rank {}",
                        rs.rank()
                    )));
                }
            }
        }
        if let Some(d) = &self.direction {
            if !fits(d) || d.is_zero() {
                return Err(Error::Invalid("direction must be a nonzero element of the rank".into()));
            }
        }
        Ok(())
    }

    /// The unit direction multiplying scalar samples.
    pub fn unit_direction(&self, rs: &RootSystem, normalization: Normalization) -> CompactElement {
        let d = self.direction.clone().unwrap_or_else(|| {
            let mut t = vec![0.0; rs.rank()];
            t[0] = 1.0;
            CompactElement::simple(&t, &[], &[])
        });
        let n = d.kappa_norm(rs, normalization);
        d.scale(1.0 / n)
    }

    /// Samples as flat coordinate vectors; scalar samples have one coordinate.
    fn coordinate_samples(&self, rs: &RootSystem) -> Vec<Vec<f64>> {
        match &self.values {
            SectionValues::Scalar(v) => v.iter().map(|&c| vec![c]).collect(),
            SectionValues::Compact(v) => v.iter().map(|x| flat(x, rs)).collect(),
        }
    }

    /// `j`-th derivative at grid index `i`, one entry per coordinate.
    fn derivative(samples: &[Vec<f64>], h: f64, i: usize, j: usize) -> Vec<f64> {
        let n = samples.len();
        if j == 0 {
            return samples[i].clone();
        }
        let width = ((j + 2) | 1).min(n);
        let half = width / 2;
        let start = i.saturating_sub(half).min(n - width);
        let nodes: Vec<f64> = (start..start + width).map(|t| t as f64 - i as f64).collect();
        let w = &fornberg(0.0, &nodes, j)[j];
        let scale = h.powi(j as i32);
        let dim = samples[0].len();
        (0..dim)
            .map(|c| (0..width).map(|t| w[t] * samples[start + t][c]).sum::<f64>() / scale)
            .collect()
    }

    /// `‖∇ʲ s(x_i)‖_κ` for `j = 0..=k`, given the coordinate samples.
    fn derivative_norms(
        &self,
        samples: &[Vec<f64>],
        rs: &RootSystem,
        normalization: Normalization,
        i: usize,
        k: usize,
    ) -> Vec<f64> {
        (0..=k)
            .map(|j| {
                let d = Self::derivative(samples, self.grid_step, i, j);
                match &self.values {
                    SectionValues::Scalar(_) => d[0].abs(),
                    SectionValues::Compact(_) => unflat(&d, rs).kappa_norm(rs, normalization),
                }
            })
            .collect()
    }

    /// `s(x)` by linear interpolation between grid points.
    pub fn value_at(&self, rs: &RootSystem, normalization: Normalization, x: f64) -> Result<CompactElement> {
        let n = self.len();
        let t = x / self.grid_step;
        if !(x.is_finite() && t >= -1e-9 && t <= (n - 1) as f64 + 1e-9) {
            return Err(Error::OutsideGrid(x));
        }
        let t = t.clamp(0.0, (n - 1) as f64);
        let i = (t.floor() as usize).min(n.saturating_sub(2));
        let frac = if n == 1 { 0.0 } else { t - i as f64 };
        let lerp = |a: &CompactElement, b: &CompactElement| a.scale(1.0 - frac).add(&b.scale(frac));
        match &self.values {
            SectionValues::Scalar(v) => {
                let s = if n == 1 { v[0] } else { v[i] * (1.0 - frac) + v[i + 1] * frac };
                Ok(self.unit_direction(rs, normalization).scale(s))
            }
            SectionValues::Compact(v) => Ok(if n == 1 { v[0].clone() } else { lerp(&v[i], &v[i + 1]) }),
        }
    }
}

/// `‖s‖_k = sup_x Σ_{j≤k} ‖∇ʲ s(x)‖_κ` over the grid.
pub fn ck_norm(s: &SampledSection, k: u32, rs: &RootSystem, normalization: Normalization) -> Result<f64> {
    s.validate(rs)?;
    let needed = k as usize + 2;
    if s.len() < needed {
        return Err(Error::GridTooCoarse { needed, got: s.len() });
    }
    let samples = s.coordinate_samples(rs);
    Ok((0..s.len())
        .map(|i| s.derivative_norms(&samples, rs, normalization, i, k as usize).iter().sum::<f64>())
        .fold(0.0, f64::max))
}

/// Both sides of `‖ρ(s(x))‖ ≤ (1/k!)·‖λ‖_κ·xᵏ·‖s‖_k`.
pub fn eval_norm_chain(
    rho: &Irrep,
    s: &SampledSection,
    x: f64,
    k: u32,
    normalization: Normalization,
) -> Result<(f64, f64)> {
    let rs = rho.root_system();
    let norm_k = ck_norm(s, k, rs, normalization)?;
    let at_zero = s.derivative_norms(&s.coordinate_samples(rs), rs, normalization, 0, k as usize);
    let tol = ORDER_TOLERANCE * norm_k.max(1.0);
    for (j, &v) in at_zero.iter().enumerate().take(k as usize) {
        if v > tol {
            return Err(Error::OrderViolation {
                k,
                order: j as u32,
                value: v,
            });
        }
    }
    let value = s.value_at(rs, normalization, x)?;
    let lhs = operator_norm(rho, &value)?;
    let factorial: f64 = (1..=k).map(f64::from).product();
    let rhs = kappa_norm(rs, rho.highest_weight(), normalization) * x.powi(k as i32) * norm_k / factorial;
    Ok((lhs, rhs))
}

/// `‖η(s)‖ = Σ_x ‖ρ_x(s(d_x))‖`, each point placed at its boundary distance.
pub fn eta_norm(spec: &EvalRepSpec, s: &SampledSection, normalization: Normalization) -> Result<f64> {
    let rs = spec.root_system();
    s.validate(rs)?;
    let mut total = 0.0;
    for (p, w) in spec.entries() {
        let d = p
            .boundary_distance
            .ok_or_else(|| Error::MissingBoundaryDistance(p.id.clone()))?;
        let rho = build_irrep(rs, w)?;
        total += operator_norm(&rho, &s.value_at(rs, normalization, d)?)?;
    }
    Ok(total)
}

/// `e·(k+1)!`, the bound on `‖x^(k+γ)‖_k` over `[0, 1]` uniform in `γ ∈ (0, 1)`.
pub fn critical_bound(k: u32) -> f64 {
    std::f64::consts::E * (1..=k + 1).map(f64::from).product::<f64>()
}
