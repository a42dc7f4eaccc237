//! Irreducible highest-weight modules of `sl_{r+1}` with an exact invariant
//! inner product, and operator norms on the compact form `su_{r+1}`.
//!
//! `V(λ)` is realized as the cyclic submodule generated by `v_μ ⊗ e_{1..k}`
//! inside `V(μ) ⊗ Λ^k ℂ^{r+1}` where `λ = μ + ω_k`. Unrolling the recursion
//! embeds `V(λ)` in a tensor product of exterior powers of the defining
//! representation. The exterior powers are unitary in their standard basis
//! with `E_iᵀ = F_i`, so the restricted product inner product is invariant
//! and exact.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exact::{self, q_int, Echelon, SparseMatrix, SparseVec, Q};
use crate::rootdata::{
    is_dominant_integral, torus_kappa_norm, weyl_dim, weyl_orbit, Normalization, RootSystem,
    TorusElement, Weight,
};

pub const MAX_IRREP_DIM: u64 = 2000;

/// Documented accuracy of floating-point norm computations.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// `Λ^k ℂ^n` in the basis `e_S`, `S` a `k`-subset in lexicographic order.
struct ExteriorPower {
    subsets: Vec<u32>,
    index: HashMap<u32, usize>,
    weights: Vec<Vec<i64>>,
}

impl ExteriorPower {
    fn new(n: usize, k: usize) -> Self {
        let mut subsets: Vec<u32> = (0u32..(1u32 << n))
            .filter(|m| m.count_ones() as usize == k)
            .collect();
        // lexicographic on sorted elements, so {0..k-1} comes first
        subsets.sort_by_key(|m| {
            let mut elems: Vec<u32> = (0..n as u32).filter(|i| m & (1 << i) != 0).collect();
            elems.resize(k, 0);
            elems
        });
        let index = subsets.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let weights = subsets
            .iter()
            .map(|&m| {
                (0..n - 1)
                    .map(|j| i64::from(m >> j & 1 == 1) - i64::from(m >> (j + 1) & 1 == 1))
                    .collect()
            })
            .collect();
        ExteriorPower {
            subsets,
            index,
            weights,
        }
    }

    fn dim(&self) -> usize {
        self.subsets.len()
    }

    /// `E_j e_S`: moves `j+1` to `j`. Adjacent indices, so the sign is `+1`.
    fn raise(&self, j: usize, b: usize) -> Option<usize> {
        let m = self.subsets[b];
        (m >> (j + 1) & 1 == 1 && m >> j & 1 == 0).then(|| self.index[&(m ^ (0b11 << j))])
    }

    fn lower(&self, j: usize, b: usize) -> Option<usize> {
        let m = self.subsets[b];
        (m >> j & 1 == 1 && m >> (j + 1) & 1 == 0).then(|| self.index[&(m ^ (0b11 << j))])
    }
}

/// `Sym^m Λ^k ℂ^n` in the basis of monomials, each a nondecreasing list of
/// exterior basis indices. The monomial `e_{0..k-1}^m` comes first.
struct SymmetricPower {
    ext: ExteriorPower,
    monomials: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    weights: Vec<Vec<i64>>,
}

impl SymmetricPower {
    fn new(n: usize, k: usize, m: usize) -> Self {
        let ext = ExteriorPower::new(n, k);
        let mut monomials = Vec::new();
        let mut current = Vec::with_capacity(m);
        fn fill(d: usize, m: usize, from: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if current.len() == m {
                out.push(current.clone());
                return;
            }
            for a in from..d {
                current.push(a);
                fill(d, m, a, current, out);
                current.pop();
            }
        }
        fill(ext.dim(), m, 0, &mut current, &mut monomials);
        let index = monomials.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let weights = monomials
            .iter()
            .map(|mono| {
                let mut w = vec![0i64; n - 1];
                for &a in mono {
                    for (x, y) in w.iter_mut().zip(&ext.weights[a]) {
                        *x += y;
                    }
                }
                w
            })
            .collect();
        SymmetricPower {
            ext,
            monomials,
            index,
            weights,
        }
    }

    fn dim(&self) -> usize {
        self.monomials.len()
    }

    /// `E_j` (or `F_j`) acting as a derivation: each factor moved in turn,
    /// weighted by its multiplicity.
    fn act(&self, raise: bool, j: usize, b: usize) -> Vec<(usize, i64)> {
        let mono = &self.monomials[b];
        let mut out = Vec::new();
        let mut i = 0;
        while i < mono.len() {
            let a = mono[i];
            let mut count = 1;
            while i + count < mono.len() && mono[i + count] == a {
                count += 1;
            }
            let moved = if raise { self.ext.raise(j, a) } else { self.ext.lower(j, a) };
            if let Some(a2) = moved {
                let mut next = mono.clone();
                next[i] = a2;
                next.sort_unstable();
                out.push((self.index[&next], count as i64));
            }
            i += count;
        }
        out
    }
}

/// A module with exact generators in a weight basis.
#[derive(Debug, Clone)]
struct ExactRep {
    weights: Vec<Vec<i64>>,
    /// Weight spaces as contiguous index ranges.
    spaces: Vec<(Vec<i64>, Range<usize>)>,
    e: Vec<SparseMatrix>,
    f: Vec<SparseMatrix>,
    gram: SparseMatrix,
}

impl ExactRep {
    fn trivial(rank: usize) -> Self {
        ExactRep {
            weights: vec![vec![0; rank]],
            spaces: vec![(vec![0; rank], 0..1)],
            e: vec![SparseMatrix::zeros(1, 1); rank],
            f: vec![SparseMatrix::zeros(1, 1); rank],
            gram: SparseMatrix::identity(1),
        }
    }

    fn dim(&self) -> usize {
        self.weights.len()
    }
}

struct WeightSpace {
    weight: Vec<i64>,
    vectors: Vec<SparseVec>,
    echelon: Echelon,
}

/// Basis vector `b = F_j·p / scale` with `p` an earlier basis vector.
struct Parent {
    vector: usize,
    j: usize,
    scale: Q,
}

/// Cyclic submodule of `base ⊗ ext` generated by the tensor of highest
/// weight vectors (both at index 0).
///
/// The invariant form is filled in only when `with_gram` is set; it is not
/// needed to build later steps.
fn cyclic_tensor(rs: &RootSystem, base: &ExactRep, ext: &SymmetricPower, with_gram: bool) -> ExactRep {
    let r = rs.rank();
    let de = ext.dim();
    let alpha: Vec<Vec<i64>> = (0..r).map(|j| rs.positive_roots()[j].weight.clone()).collect();

    let ambient = |ops: &[SparseMatrix], raise: bool, j: usize, v: &SparseVec| -> SparseVec {
        let mut out = SparseVec::new();
        for (&idx, x) in v {
            let (a, b) = (idx / de, idx % de);
            for (&a2, c) in &ops[j].cols[a] {
                exact::add_at(&mut out, a2 * de + b, x * c);
            }
            for (b2, c) in ext.act(raise, j, b) {
                exact::add_at(&mut out, a * de + b2, x * Q::from_integer(c.into()));
            }
        }
        out
    };
    let top: Vec<i64> = base.weights[0]
        .iter()
        .zip(&ext.weights[0])
        .map(|(a, b)| a + b)
        .collect();
    let seed: SparseVec = [(0usize, Q::one())].into_iter().collect();
    let mut echelon = Echelon::new();
    echelon.try_insert(&seed);
    let mut spaces = vec![WeightSpace {
        weight: top.clone(),
        vectors: vec![seed],
        echelon,
    }];
    // parents[s][t] for every vector except the seed
    let mut parents: Vec<Vec<Option<(usize, Parent)>>> = vec![vec![None]];
    let mut by_weight: HashMap<Vec<i64>, usize> = HashMap::from([(top, 0)]);
    let mut level = vec![0usize];
    while !level.is_empty() {
        let mut next = Vec::new();
        for &s in &level {
            for j in 0..r {
                for t in 0..spaces[s].vectors.len() {
                    let image = ambient(&base.f, false, j, &spaces[s].vectors[t]);
                    if image.is_empty() {
                        continue;
                    }
                    let target: Vec<i64> = spaces[s]
                        .weight
                        .iter()
                        .zip(&alpha[j])
                        .map(|(w, a)| w - a)
                        .collect();
                    let ti = *by_weight.entry(target.clone()).or_insert_with(|| {
                        spaces.push(WeightSpace {
                            weight: target,
                            vectors: Vec::new(),
                            echelon: Echelon::new(),
                        });
                        parents.push(Vec::new());
                        next.push(spaces.len() - 1);
                        spaces.len() - 1
                    });
                    let lead = image.values().next().expect("nonempty image").clone();
                    let normalized = exact::scale(&image, &lead.recip());
                    if spaces[ti].echelon.try_insert(&normalized) {
                        spaces[ti].vectors.push(normalized);
                        parents[ti].push(Some((s, Parent { vector: t, j, scale: lead })));
                    }
                }
            }
        }
        level = next;
    }

    let mut offsets = Vec::with_capacity(spaces.len());
    let mut weights = Vec::new();
    let mut ranges = Vec::with_capacity(spaces.len());
    for sp in &spaces {
        offsets.push(weights.len());
        let start = weights.len();
        weights.extend(std::iter::repeat_n(sp.weight.clone(), sp.vectors.len()));
        ranges.push((sp.weight.clone(), start..weights.len()));
    }
    let dim = weights.len();
    let mut e = vec![SparseMatrix::zeros(dim, dim); r];
    let mut f = vec![SparseMatrix::zeros(dim, dim); r];
    let mut gram = SparseMatrix::zeros(dim, dim);
    for (s, sp) in spaces.iter().enumerate() {
        for (t, v) in sp.vectors.iter().enumerate() {
            let col = offsets[s] + t;
            for j in 0..r {
                for (raise, ops, out) in [(true, &base.e, &mut e[j]), (false, &base.f, &mut f[j])] {
                    let image = ambient(ops, raise, j, v);
                    if image.is_empty() {
                        continue;
                    }
                    let target: Vec<i64> = sp
                        .weight
                        .iter()
                        .zip(&alpha[j])
                        .map(|(w, a)| if raise { w + a } else { w - a })
                        .collect();
                    let ti = by_weight[&target];
                    let coords = spaces[ti]
                        .echelon
                        .coordinates(&image)
                        .expect("submodule is closed under the generators");
                    for (k, c) in coords.into_iter().enumerate() {
                        out.set(offsets[ti] + k, col, c);
                    }
                }
            }
        }
    }
    if with_gram {
        // ⟨F_j p, w⟩ = ⟨p, E_j w⟩, weight spaces in the order they were found
        gram.set(0, 0, Q::one());
        for (s, sp) in spaces.iter().enumerate().skip(1) {
            for (u, parent) in parents[s].iter().enumerate() {
                let (ps, p) = parent.as_ref().expect("only the seed lacks a parent");
                let prow = offsets[*ps] + p.vector;
                let inv = p.scale.recip();
                for t in 0..sp.vectors.len() {
                    let col = offsets[s] + t;
                    let mut acc = Q::zero();
                    for (&c, x) in &e[p.j].cols[col] {
                        let g = gram.get(prow, c);
                        if !g.is_zero() {
                            acc += x * g;
                        }
                    }
                    gram.set(offsets[s] + u, col, acc * &inv);
                }
            }
        }
    }
    ExactRep {
        weights,
        spaces: ranges,
        e,
        f,
        gram,
    }
}

/// Orthonormalized real generators: `e[α]` for every positive root, `h[j]`
/// the diagonal of `H_j`. Lowering operators are `e[α]ᵀ`.
#[derive(Debug, Clone)]
pub struct OrthonormalRep {
    pub e: Vec<DMatrix<f64>>,
    pub h: Vec<DVector<f64>>,
}

impl OrthonormalRep {
    pub fn dim(&self) -> usize {
        self.h.first().map_or(1, |h| h.len())
    }

    /// `ρ(x)` as a complex matrix.
    pub fn lie_matrix(&self, x: &LieElement) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (j, c) in x.h.iter().enumerate() {
            for p in 0..n {
                m[(p, p)] += c * self.h[j][p];
            }
        }
        for (a, (ce, cf)) in x.e.iter().zip(&x.f).enumerate() {
            if ce.is_zero() && cf.is_zero() {
                continue;
            }
            let e = &self.e[a];
            for p in 0..n {
                for q in 0..n {
                    let v = e[(p, q)];
                    if v != 0.0 {
                        m[(p, q)] += ce * v;
                        m[(q, p)] += cf * v;
                    }
                }
            }
        }
        m
    }
}

/// An element of `𝔤 = sl_{r+1}`: coefficients of `H_j` and of the root
/// vectors `E_α`, `F_α` over the positive roots (simple roots first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct LieElement {
    #[serde(default)]
    pub h: Vec<Complex64>,
    #[serde(default)]
    pub e: Vec<Complex64>,
    #[serde(default)]
    pub f: Vec<Complex64>,
}

impl LieElement {
    pub fn zero(rs: &RootSystem) -> Self {
        let np = rs.positive_roots().len();
        LieElement {
            h: vec![Complex64::zero(); rs.rank()],
            e: vec![Complex64::zero(); np],
            f: vec![Complex64::zero(); np],
        }
    }

    /// Zero-pads the coefficient vectors to full length.
    pub fn padded(&self, rs: &RootSystem) -> Result<Self> {
        let np = rs.positive_roots().len();
        if self.h.len() > rs.rank() || self.e.len() > np || self.f.len() > np {
            return Err(Error::DimensionMismatch(format!(
                "Lie element has more coefficients than rank {} allows",
                rs.rank()
            )));
        }
        let mut out = self.clone();
        out.h.resize(rs.rank(), Complex64::zero());
        out.e.resize(np, Complex64::zero());
        out.f.resize(np, Complex64::zero());
        Ok(out)
    }

    pub fn add(&self, other: &LieElement) -> LieElement {
        let zip = |a: &[Complex64], b: &[Complex64]| -> Vec<Complex64> {
            let n = a.len().max(b.len());
            (0..n)
                .map(|i| a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default())
                .collect()
        };
        LieElement {
            h: zip(&self.h, &other.h),
            e: zip(&self.e, &other.e),
            f: zip(&self.f, &other.f),
        }
    }

    pub fn scale(&self, s: Complex64) -> LieElement {
        LieElement {
            h: self.h.iter().map(|c| c * s).collect(),
            e: self.e.iter().map(|c| c * s).collect(),
            f: self.f.iter().map(|c| c * s).collect(),
        }
    }
}

/// An element of the compact form
/// `x = Σ torus_j·i·H_j + Σ_α real_α·(E_α − F_α) + Σ_α imag_α·i·(E_α + F_α)`.
///
/// `real` and `imag` run over the positive roots with the simple roots first;
/// shorter vectors are zero-padded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct CompactElement {
    #[serde(default)]
    pub torus: Vec<f64>,
    #[serde(default)]
    pub real: Vec<f64>,
    #[serde(default)]
    pub imag: Vec<f64>,
}

impl CompactElement {
    pub fn from_torus(x: &TorusElement) -> Self {
        CompactElement {
            torus: x.coords.clone(),
            ..Default::default()
        }
    }

    /// `Σ c_i·i·H_i + a_i·(E_i − F_i) + b_i·i·(E_i + F_i)` over simple indices.
    pub fn simple(c: &[f64], a: &[f64], b: &[f64]) -> Self {
        CompactElement {
            torus: c.to_vec(),
            real: a.to_vec(),
            imag: b.to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.torus
            .iter()
            .chain(&self.real)
            .chain(&self.imag)
            .all(|&c| c == 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        CompactElement {
            torus: self.torus.iter().map(|c| c * s).collect(),
            real: self.real.iter().map(|c| c * s).collect(),
            imag: self.imag.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &CompactElement) -> Self {
        let zip = |a: &[f64], b: &[f64]| -> Vec<f64> {
            (0..a.len().max(b.len()))
                .map(|i| a.get(i).copied().unwrap_or(0.0) + b.get(i).copied().unwrap_or(0.0))
                .collect()
        };
        CompactElement {
            torus: zip(&self.torus, &other.torus),
            real: zip(&self.real, &other.real),
            imag: zip(&self.imag, &other.imag),
        }
    }

    fn check(&self, rs: &RootSystem) -> Result<()> {
        let np = rs.positive_roots().len();
        if self.torus.len() > rs.rank() || self.real.len() > np || self.imag.len() > np {
            return Err(Error::DimensionMismatch(format!(
                "compact element has more coefficients than rank {} allows",
                rs.rank()
            )));
        }
        Ok(())
    }

    pub fn to_lie(&self) -> LieElement {
        let i = Complex64::i();
        let n = self.real.len().max(self.imag.len());
        let re = |k: usize| self.real.get(k).copied().unwrap_or(0.0);
        let im = |k: usize| self.imag.get(k).copied().unwrap_or(0.0);
        LieElement {
            h: self.torus.iter().map(|&c| i * c).collect(),
            e: (0..n).map(|k| Complex64::new(re(k), im(k))).collect(),
            f: (0..n).map(|k| Complex64::new(-re(k), im(k))).collect(),
        }
    }

    /// κ-norm, computed from `−tr(x²)` in the defining representation.
    ///
    /// Root vectors are matrix units there, so
    /// `−tr(x²) = 2·Σ_α (real_α² + imag_α²) + torusᵀ·C·torus`.
    pub fn kappa_norm(&self, rs: &RootSystem, normalization: Normalization) -> f64 {
        let root_part: f64 = self
            .real
            .iter()
            .chain(&self.imag)
            .map(|c| 2.0 * c * c)
            .sum();
        let torus_part = torus_kappa_norm(rs, &TorusElement::new(self.torus.clone()), Normalization::ShortRoot2);
        let short = root_part + torus_part * torus_part;
        let scale = match normalization {
            Normalization::ShortRoot2 => 1.0,
            Normalization::Killing => 2.0 * rs.defining_dim() as f64,
        };
        (short * scale).sqrt()
    }
}

/// A finite-dimensional irreducible representation of `sl_{r+1}`.
///
/// Generators are stored sparsely in a weight basis; the exported form is
/// dense. Basis vector 0 is the highest weight vector.
#[derive(Debug, Clone)]
pub struct Irrep {
    rs: RootSystem,
    highest_weight: Weight,
    rep: ExactRep,
    ortho: OnceLock<std::result::Result<Arc<OrthonormalRep>, Error>>,
}

pub fn build_irrep(rs: &RootSystem, lambda: &Weight) -> Result<Irrep> {
    rs.check_weight(lambda)?;
    if !is_dominant_integral(rs, lambda) {
        return Err(Error::NotDominant(lambda.to_string()));
    }
    let expected = weyl_dim(rs, lambda)?;
    if expected > MAX_IRREP_DIM {
        return Err(Error::DimensionCap {
            dim: expected,
            cap: MAX_IRREP_DIM,
        });
    }
    let coords = lambda.int_coords().expect("dominant weights are integral");
    let n = rs.defining_dim();
    // V(μ + m·ω_k) ⊂ V(μ) ⊗ Sym^m Λ^k, one fundamental weight at a time
    let steps: Vec<(usize, usize)> = coords
        .iter()
        .enumerate()
        .filter(|(_, m)| **m > 0)
        .map(|(i, &m)| (i + 1, m as usize))
        .collect();
    let mut rep = ExactRep::trivial(rs.rank());
    let last = steps.len();
    for (step, (k, m)) in steps.into_iter().enumerate() {
        rep = cyclic_tensor(rs, &rep, &SymmetricPower::new(n, k, m), step + 1 == last);
    }
    if rep.dim() as u64 != expected {
        return Err(Error::NumericalFailure(format!(
            "cyclic closure produced dimension {} but the Weyl dimension is {expected}",
            rep.dim()
        )));
    }
    Ok(Irrep {
        rs: rs.clone(),
        highest_weight: lambda.clone(),
        rep,
        ortho: OnceLock::new(),
    })
}

impl Irrep {
    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn highest_weight(&self) -> &Weight {
        &self.highest_weight
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn hw_vector_index(&self) -> usize {
        0
    }

    pub fn e(&self, i: usize) -> &SparseMatrix {
        &self.rep.e[i]
    }

    pub fn f(&self, i: usize) -> &SparseMatrix {
        &self.rep.f[i]
    }

    pub fn h(&self, i: usize) -> SparseMatrix {
        let mut m = SparseMatrix::zeros(self.dim(), self.dim());
        for (p, w) in self.rep.weights.iter().enumerate() {
            m.set(p, p, q_int(w[i]));
        }
        m
    }

    pub fn gram(&self) -> &SparseMatrix {
        &self.rep.gram
    }

    /// Weight of each basis vector, in fundamental-weight coordinates.
    pub fn basis_weights(&self) -> &[Vec<i64>] {
        &self.rep.weights
    }

    /// Exact raising operators for every positive root, built as iterated
    /// commutators `E_{ε_a−ε_{b+1}} = [E_{ε_a−ε_b}, E_b]`.
    pub fn root_raising(&self) -> Vec<SparseMatrix> {
        root_operators(&self.rs, &self.rep.e, |x, s| x.commutator(s))
    }

    /// Exact lowering operators `F_{ε_a−ε_{b+1}} = [F_b, F_{ε_a−ε_b}]`.
    pub fn root_lowering(&self) -> Vec<SparseMatrix> {
        root_operators(&self.rs, &self.rep.f, |x, s| s.commutator(x))
    }

    /// The generators in a basis orthonormal for the invariant inner product.
    pub fn orthonormal(&self) -> Result<Arc<OrthonormalRep>> {
        self.ortho
            .get_or_init(|| orthonormalize(self).map(Arc::new))
            .clone()
    }

    pub fn compact_matrix(&self, x: &CompactElement) -> Result<DMatrix<Complex64>> {
        x.check(&self.rs)?;
        Ok(self.orthonormal()?.lie_matrix(&x.to_lie()))
    }

    pub fn lie_matrix(&self, x: &LieElement) -> Result<DMatrix<Complex64>> {
        let x = x.padded(&self.rs)?;
        Ok(self.orthonormal()?.lie_matrix(&x))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let generators: Vec<_> = (0..self.rs.rank())
            .map(|i| {
                json!({
                    "index": i + 1,
                    "E": self.e(i).to_dense_strings(),
                    "F": self.f(i).to_dense_strings(),
                    "H": self.h(i).to_dense_strings(),
                })
            })
            .collect();
        json!({
            "series": "A",
            "rank": self.rs.rank(),
            "highest_weight": self.highest_weight,
            "dimension": self.dim(),
            "hw_vector_index": self.hw_vector_index(),
            "basis_weights": self.rep.weights,
            "generators": generators,
            "gram": self.gram().to_dense_strings(),
        })
    }
}

fn root_operators(
    rs: &RootSystem,
    simple: &[SparseMatrix],
    bracket: impl Fn(&SparseMatrix, &SparseMatrix) -> SparseMatrix,
) -> Vec<SparseMatrix> {
    let mut by_span: HashMap<(usize, usize), SparseMatrix> = HashMap::new();
    let mut out = Vec::with_capacity(rs.positive_roots().len());
    for root in rs.positive_roots() {
        let (a, b) = root.span;
        let op = if b - a == 1 {
            simple[a].clone()
        } else {
            bracket(&by_span[&(a, b - 1)], &simple[b - 1])
        };
        by_span.insert((a, b), op.clone());
        out.push(op);
    }
    out
}

/// Blockwise Cholesky of the weight-diagonal Gram matrix.
///
/// Each block is first rescaled by `D^{-1/2}` (its diagonal), computed in
/// exact arithmetic, so that huge Gram entries never reach `f64`.
fn orthonormalize(irrep: &Irrep) -> Result<OrthonormalRep> {
    let rep = &irrep.rep;
    let n = rep.dim();
    let gram = &rep.gram;
    let diag: Vec<Q> = (0..n).map(|p| gram.get(p, p)).collect();
    let mut lower = Vec::with_capacity(rep.spaces.len());
    let mut lower_inv_t = Vec::with_capacity(rep.spaces.len());
    for (_, range) in &rep.spaces {
        let size = range.len();
        let mut block = DMatrix::<f64>::zeros(size, size);
        for (u, p) in range.clone().enumerate() {
            for (v, q) in range.clone().enumerate() {
                let g = gram.get(p, q);
                let ratio = &g * &g / (&diag[p] * &diag[q]);
                let mag = exact::signed_sqrt(&ratio).abs();
                block[(u, v)] = if g < Q::zero() { -mag } else { mag };
            }
        }
        let chol = nalgebra::Cholesky::new(block).ok_or_else(|| {
            Error::NumericalFailure("Gram block is not numerically positive definite".into())
        })?;
        let l = chol.l();
        let inv = l.clone().try_inverse().ok_or_else(|| {
            Error::NumericalFailure("Cholesky factor is singular".into())
        })?;
        lower.push(l);
        lower_inv_t.push(inv.transpose());
    }

    // M' = Lᵀ · (D^{1/2} M D^{-1/2}) · L^{-T}, blockwise.
    let transform = |m: &SparseMatrix| -> DMatrix<f64> {
        let mut x = DMatrix::<f64>::zeros(n, n);
        for (q, col) in m.cols.iter().enumerate() {
            for (&p, v) in col {
                let ratio = v * v * &diag[p] / &diag[q];
                let mag = exact::signed_sqrt(&ratio).abs();
                x[(p, q)] = if *v < Q::zero() { -mag } else { mag };
            }
        }
        let mut y = DMatrix::<f64>::zeros(n, n);
        for (b, (_, range)) in rep.spaces.iter().enumerate() {
            let rows = x.rows(range.start, range.len());
            let prod = lower[b].transpose() * rows;
            y.rows_mut(range.start, range.len()).copy_from(&prod);
        }
        let mut z = DMatrix::<f64>::zeros(n, n);
        for (b, (_, range)) in rep.spaces.iter().enumerate() {
            let cols = y.columns(range.start, range.len());
            let prod = cols * &lower_inv_t[b];
            z.columns_mut(range.start, range.len()).copy_from(&prod);
        }
        z
    };
    let e = irrep.root_raising().iter().map(transform).collect();
    let h = (0..irrep.rs.rank())
        .map(|j| DVector::from_iterator(n, rep.weights.iter().map(|w| w[j] as f64)))
        .collect();
    Ok(OrthonormalRep { e, h })
}

/// Joint eigenspace dimensions of the `H_i`.
pub fn weight_multiplicities(rho: &Irrep) -> BTreeMap<Weight, usize> {
    let mut out = BTreeMap::new();
    for (w, range) in &rho.rep.spaces {
        *out.entry(Weight::from_ints(w)).or_insert(0) += range.len();
    }
    out
}

/// Largest absolute eigenvalue of a skew-Hermitian matrix.
pub fn skew_hermitian_norm(m: &DMatrix<Complex64>) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    // −i·m is Hermitian with the same eigenvalue moduli.
    let herm = m.map(|z| Complex64::new(z.im, -z.re));
    let offdiag = (0..herm.nrows())
        .flat_map(|p| (0..herm.ncols()).map(move |q| (p, q)))
        .any(|(p, q)| p != q && herm[(p, q)].norm() > 0.0);
    if !offdiag {
        return Ok((0..herm.nrows())
            .map(|p| herm[(p, p)].re.abs())
            .fold(0.0, f64::max));
    }
    let eig = nalgebra::SymmetricEigen::try_new(herm, 1e-14, 10_000)
        .ok_or_else(|| Error::NumericalFailure("Hermitian eigen-solve did not converge".into()))?;
    Ok(eig.eigenvalues.iter().fold(0.0, |acc, v| acc.max(v.abs())))
}

/// Largest singular value of an arbitrary complex matrix.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> Result<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0.0);
    }
    let svd = nalgebra::SVD::try_new(m.clone(), false, false, 1e-15, 10_000)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    Ok(svd.singular_values.iter().fold(0.0, |acc: f64, v| acc.max(*v)))
}

/// Spectral norm of `ρ(x)` for `x` in the compact form.
pub fn operator_norm(rho: &Irrep, x: &CompactElement) -> Result<f64> {
    if x.is_zero() {
        return Ok(0.0);
    }
    skew_hermitian_norm(&rho.compact_matrix(x)?)
}

/// `max_{w ∈ 𝒲λ} |⟨w, x⟩|`.
pub fn torus_norm(rho: &Irrep, x: &TorusElement) -> f64 {
    let orbit = weyl_orbit(&rho.rs, &rho.highest_weight).expect("highest weight is integral");
    orbit.iter().map(|w| w.pair(x).abs()).fold(0.0, f64::max)
}

/// Exact variant of [`torus_norm`] for rational torus elements.
pub fn torus_norm_exact(rho: &Irrep, x: &[Rational64]) -> Rational64 {
    let orbit = weyl_orbit(&rho.rs, &rho.highest_weight).expect("highest weight is integral");
    orbit
        .iter()
        .map(|w| {
            w.coords()
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum::<Rational64>()
        })
        .map(|v| if v < Rational64::zero() { -v } else { v })
        .max()
        .unwrap_or_else(Rational64::zero)
}
