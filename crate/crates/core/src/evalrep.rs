//! Evaluation representations of `𝔤 ⊗ ℂ^m` and their classification data.
//!
//! A finite list of `(point, dominant weight)` pairs at distinct points
//! describes the irreducible representation `⊗_x ρ_{λ_x}`, with a section `s`
//! acting by `Σ_x 1 ⊗ … ⊗ ρ_{λ_x}(s(x)) ⊗ … ⊗ 1`.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::irrep::{build_irrep, LieElement, OrthonormalRep};
use crate::json::{rational_from_value, rational_to_value};
use crate::rootdata::{build_root_system, is_dominant_integral, RootSystem, Series, Weight};

/// Cap on the total dimension of a realized representation.
pub const MAX_REALIZE_DIM: usize = 2000;
/// Cap on the dimension accepted by [`commutant_dim`].
pub const MAX_COMMUTANT_DIM: usize = 200;
/// Singular values below this (relative to the largest, floored at 1) are zero.
pub const COMMUTANT_RANK_TOL: f64 = 1e-8;
/// Eigenvalues of `Σ E^*E` below this count as kernel.
pub const KERNEL_TOL: f64 = 1e-8;
/// Eigenvalue-to-rational rounding tolerance and denominator cap.
pub const ROUNDING_TOL: f64 = 1e-6;
pub const MAX_DENOMINATOR: i64 = 64;

/// `ℂ^m` with the involution `a ↦ conj(a∘σ)` for a permutation `σ` with `σ² = id`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteInvolutiveAlgebra {
    perm: Vec<usize>,
}

impl FiniteInvolutiveAlgebra {
    /// `perm` is 0-based.
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let m = perm.len();
        if m == 0 {
            return Err(Error::InvalidInvolution("empty permutation".into()));
        }
        for (i, &p) in perm.iter().enumerate() {
            if p >= m {
                return Err(Error::InvalidInvolution(format!("image {p} out of range")));
            }
            if perm[p] != i {
                return Err(Error::InvalidInvolution(format!(
                    "σ(σ({i})) = {} ≠ {i}",
                    perm[p]
                )));
            }
        }
        Ok(FiniteInvolutiveAlgebra { perm })
    }

    pub fn from_one_based(perm: &[usize]) -> Result<Self> {
        if perm.contains(&0) {
            return Err(Error::InvalidInvolution("entries are 1-based".into()));
        }
        Self::new(perm.iter().map(|p| p - 1).collect())
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.perm.iter().map(|p| p + 1).collect()
    }

    pub fn identity(m: usize) -> Self {
        FiniteInvolutiveAlgebra {
            perm: (0..m).collect(),
        }
    }

    /// `ℂ²` with swapped conjugation; it has no involutive characters.
    pub fn swapped_pair() -> Self {
        FiniteInvolutiveAlgebra { perm: vec![1, 0] }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn sigma(&self, j: usize) -> usize {
        self.perm[j]
    }

    /// Coordinate characters `a ↦ a_j` that are involutive.
    pub fn is_fixed(&self, j: usize) -> bool {
        self.perm[j] == j
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&j| self.is_fixed(j)).collect()
    }

    /// Enumerates every involution of `{0..m}`.
    pub fn all(m: usize) -> Vec<Self> {
        fn rec(perm: &mut Vec<Option<usize>>, out: &mut Vec<Vec<usize>>) {
            let Some(i) = perm.iter().position(Option::is_none) else {
                out.push(perm.iter().map(|p| p.unwrap()).collect());
                return;
            };
            perm[i] = Some(i);
            rec(perm, out);
            for j in i + 1..perm.len() {
                if perm[j].is_none() {
                    perm[i] = Some(j);
                    perm[j] = Some(i);
                    rec(perm, out);
                    perm[j] = None;
                }
            }
            perm[i] = None;
        }
        let mut out = Vec::new();
        rec(&mut vec![None; m], &mut out);
        out.into_iter().map(|perm| FiniteInvolutiveAlgebra { perm }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_distance: Option<f64>,
}

impl Point {
    pub fn new(id: impl Into<String>) -> Self {
        Point {
            id: id.into(),
            boundary_distance: None,
        }
    }

    pub fn at(id: impl Into<String>, boundary_distance: f64) -> Self {
        Point {
            id: id.into(),
            boundary_distance: Some(boundary_distance),
        }
    }
}

/// Classification data of an irreducible evaluation representation.
///
/// Entries are kept sorted by point id. Entries with zero weight are trivial
/// tensor factors and are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRepSpec {
    rs: RootSystem,
    entries: Vec<(Point, Weight)>,
}

impl EvalRepSpec {
    pub fn new(rs: &RootSystem, entries: Vec<(Point, Weight)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (p, w) in &entries {
            rs.check_weight(w)?;
            if !is_dominant_integral(rs, w) {
                return Err(Error::NotDominant(w.to_string()));
            }
            if !seen.insert(p.id.clone()) {
                return Err(Error::DuplicatePoint(p.id.clone()));
            }
        }
        let mut entries: Vec<_> = entries.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        entries.sort_by(|a, b| a.0.id.cmp(&b.0.id));
        Ok(EvalRepSpec {
            rs: rs.clone(),
            entries,
        })
    }

    /// The trivial representation.
    pub fn empty(rs: &RootSystem) -> Self {
        EvalRepSpec {
            rs: rs.clone(),
            entries: Vec::new(),
        }
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn entries(&self) -> &[(Point, Weight)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> Result<u64> {
        self.entries
            .iter()
            .try_fold(1u64, |acc, (_, w)| Ok(acc.saturating_mul(crate::rootdata::weyl_dim(&self.rs, w)?)))
    }

    /// The data with its point labels erased, for comparison up to relabeling.
    pub fn weight_multiset(&self) -> Vec<Weight> {
        let mut ws: Vec<Weight> = self.entries.iter().map(|(_, w)| w.clone()).collect();
        ws.sort();
        ws
    }
}

fn same_rank(a: &RootSystem, b: &RootSystem) -> Result<()> {
    if a.rank() != b.rank() {
        return Err(Error::RankMismatch(a.rank(), b.rank()));
    }
    Ok(())
}

/// Tensor product of representations supported on disjoint point sets.
pub fn tensor(a: &EvalRepSpec, b: &EvalRepSpec) -> Result<EvalRepSpec> {
    same_rank(&a.rs, &b.rs)?;
    let ids: BTreeSet<&str> = a.entries.iter().map(|(p, _)| p.id.as_str()).collect();
    if let Some((p, _)) = b.entries.iter().find(|(p, _)| ids.contains(p.id.as_str())) {
        return Err(Error::PointCollision(p.id.clone()));
    }
    EvalRepSpec::new(&a.rs, a.entries.iter().chain(&b.entries).cloned().collect())
}

/// Two specs describe equivalent representations iff they have the same
/// points with the same weights.
pub fn equivalent(a: &EvalRepSpec, b: &EvalRepSpec) -> Result<bool> {
    same_rank(&a.rs, &b.rs)?;
    let key = |s: &EvalRepSpec| -> Vec<(String, Weight)> {
        s.entries.iter().map(|(p, w)| (p.id.clone(), w.clone())).collect()
    };
    Ok(key(a) == key(b))
}

/// Concrete operators `π(E_i ⊗ δ_j)`, `π(F_i ⊗ δ_j)`, `π(H_i ⊗ δ_j)` in an
/// orthonormal basis. Indexing is `[site][simple index]`.
#[derive(Debug, Clone)]
pub struct RepMatrices {
    pub rank: usize,
    pub points: Vec<Point>,
    pub dim: usize,
    pub e: Vec<Vec<DMatrix<Complex64>>>,
    pub f: Vec<Vec<DMatrix<Complex64>>>,
    pub h: Vec<Vec<DMatrix<Complex64>>>,
}

impl RepMatrices {
    pub fn sites(&self) -> usize {
        self.points.len()
    }

    /// Block-diagonal direct sum over the same sites.
    pub fn direct_sum(&self, other: &RepMatrices) -> Result<RepMatrices> {
        if self.rank != other.rank || self.sites() != other.sites() {
            return Err(Error::DimensionMismatch(
                "direct sum needs the same rank and number of sites".into(),
            ));
        }
        let n = self.dim + other.dim;
        let block = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| {
            let mut m = DMatrix::zeros(n, n);
            m.view_mut((0, 0), (self.dim, self.dim)).copy_from(a);
            m.view_mut((self.dim, self.dim), (other.dim, other.dim)).copy_from(b);
            m
        };
        let sum = |x: &[Vec<DMatrix<Complex64>>], y: &[Vec<DMatrix<Complex64>>]| {
            x.iter()
                .zip(y)
                .map(|(xs, ys)| xs.iter().zip(ys).map(|(a, b)| block(a, b)).collect())
                .collect()
        };
        Ok(RepMatrices {
            rank: self.rank,
            points: self.points.clone(),
            dim: n,
            e: sum(&self.e, &other.e),
            f: sum(&self.f, &other.f),
            h: sum(&self.h, &other.h),
        })
    }

    /// Simultaneous conjugation `U^* X U` of every generator.
    pub fn conjugated(&self, u: &DMatrix<Complex64>) -> RepMatrices {
        let conj = |ops: &[Vec<DMatrix<Complex64>>]| -> Vec<Vec<DMatrix<Complex64>>> {
            ops.iter()
                .map(|site| site.iter().map(|x| u.adjoint() * x * u).collect())
                .collect()
        };
        RepMatrices {
            rank: self.rank,
            points: self.points.clone(),
            dim: self.dim,
            e: conj(&self.e),
            f: conj(&self.f),
            h: conj(&self.h),
        }
    }

    /// Largest violation of the `𝔤^{⊕m}` relations and of commutation between sites.
    pub fn relation_defect(&self) -> f64 {
        let br = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| a * b - b * a;
        let mut worst: f64 = 0.0;
        let c = crate::rootdata::build_root_system(Series::A, self.rank)
            .map(|rs| rs.cartan_matrix().to_vec())
            .unwrap_or_default();
        for s in 0..self.sites() {
            for t in 0..self.sites() {
                for i in 0..self.rank {
                    for j in 0..self.rank {
                        let (ei, fi, hi) = (&self.e[s][i], &self.f[s][i], &self.h[s][i]);
                        let (ej, fj) = (&self.e[t][j], &self.f[t][j]);
                        if s == t {
                            let w = c[j][i] as f64;
                            worst = worst.max((br(hi, ej) - ej * Complex64::from(w)).norm());
                            worst = worst.max((br(hi, fj) + fj * Complex64::from(w)).norm());
                            let expect = if i == j { hi.clone() } else { DMatrix::zeros(self.dim, self.dim) };
                            worst = worst.max((br(ei, fj) - expect).norm());
                        } else {
                            for x in [&self.e[t][j], &self.f[t][j], &self.h[t][j]] {
                                for y in [ei, fi, hi] {
                                    worst = worst.max(br(x, y).norm());
                                }
                            }
                        }
                    }
                }
            }
        }
        worst
    }
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(Complex64::from)
}

fn kron_site(dims: &[usize], site: usize, op: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let left: usize = dims[..site].iter().product();
    let right: usize = dims[site + 1..].iter().product();
    let l = DMatrix::<Complex64>::identity(left, left);
    let r = DMatrix::<Complex64>::identity(right, right);
    l.kronecker(op).kronecker(&r)
}

fn site_reps(spec: &EvalRepSpec) -> Result<(Vec<usize>, Vec<std::sync::Arc<OrthonormalRep>>)> {
    let mut dims = Vec::with_capacity(spec.len());
    let mut total: usize = 1;
    for (_, w) in &spec.entries {
        let d = crate::rootdata::weyl_dim(&spec.rs, w)?;
        total = total.saturating_mul(d as usize);
        if total > MAX_REALIZE_DIM {
            return Err(Error::DimensionCap {
                dim: total as u64,
                cap: MAX_REALIZE_DIM as u64,
            });
        }
        dims.push(d as usize);
    }
    let reps = spec
        .entries
        .iter()
        .map(|(_, w)| build_irrep(&spec.rs, w)?.orthonormal())
        .collect::<Result<Vec<_>>>()?;
    Ok((dims, reps))
}

/// Realizes the tensor product of the site representations as matrices.
pub fn realize(spec: &EvalRepSpec) -> Result<RepMatrices> {
    let (dims, reps) = site_reps(spec)?;
    let r = spec.rs.rank();
    let mut e = Vec::with_capacity(dims.len());
    let mut f = Vec::with_capacity(dims.len());
    let mut h = Vec::with_capacity(dims.len());
    for (site, rep) in reps.iter().enumerate() {
        let es: Vec<_> = (0..r).map(|i| kron_site(&dims, site, &to_complex(&rep.e[i]))).collect();
        f.push(es.iter().map(|m| m.adjoint()).collect());
        e.push(es);
        h.push(
            (0..r)
                .map(|i| kron_site(&dims, site, &to_complex(&DMatrix::from_diagonal(&rep.h[i]))))
                .collect(),
        );
    }
    Ok(RepMatrices {
        rank: r,
        points: spec.entries.iter().map(|(p, _)| p.clone()).collect(),
        dim: dims.iter().product(),
        e,
        f,
        h,
    })
}

/// `π(s) = Σ_x 1 ⊗ … ⊗ ρ_x(s(x)) ⊗ … ⊗ 1`. Section values at points outside the
/// spec are ignored.
pub fn apply(spec: &EvalRepSpec, section: &BTreeMap<String, LieElement>) -> Result<DMatrix<Complex64>> {
    let (dims, reps) = site_reps(spec)?;
    let n: usize = dims.iter().product();
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for (site, ((point, _), rep)) in spec.entries.iter().zip(&reps).enumerate() {
        if let Some(x) = section.get(&point.id) {
            let local = rep.lie_matrix(&x.padded(&spec.rs)?);
            out += kron_site(&dims, site, &local);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutantReport {
    pub dim: usize,
    /// Number of unknowns after block reduction by the Cartan action.
    pub unknowns: usize,
    pub smallest_kept: Option<f64>,
    pub largest_discarded: Option<f64>,
}

impl CommutantReport {
    /// Ratio between the smallest kept and the largest discarded singular value.
    pub fn gap(&self) -> f64 {
        match (self.smallest_kept, self.largest_discarded) {
            (Some(k), Some(d)) if d > 0.0 => k / d,
            _ => f64::INFINITY,
        }
    }
}

/// Fixed irrational weights for a generic linear combination of commuting operators.
fn generic_coefficients(n: usize) -> Vec<f64> {
    const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    (0..n)
        .map(|k| (PRIMES[k % PRIMES.len()] as f64).sqrt() * (1.0 + (k / PRIMES.len()) as f64))
        .collect()
}

fn hermitian_eigen(m: DMatrix<Complex64>) -> Result<nalgebra::SymmetricEigen<Complex64, nalgebra::Dyn>> {
    nalgebra::SymmetricEigen::try_new(m, 1e-14, 10_000)
        .ok_or_else(|| Error::NumericalFailure("Hermitian eigen-solve did not converge".into()))
}

/// Eigenbasis of a generic combination of the Cartan operators, with the
/// eigenvalue clusters (joint weight spaces) as index ranges.
fn cartan_eigenbasis(rep: &RepMatrices) -> Result<(DMatrix<Complex64>, Vec<std::ops::Range<usize>>)> {
    let hs: Vec<&DMatrix<Complex64>> = rep.h.iter().flatten().collect();
    let coeffs = generic_coefficients(hs.len());
    let mut combo = DMatrix::<Complex64>::zeros(rep.dim, rep.dim);
    for (h, c) in hs.iter().zip(&coeffs) {
        combo += *h * Complex64::from(*c);
    }
    let combo = (&combo + combo.adjoint()) * Complex64::from(0.5);
    let eig = hermitian_eigen(combo)?;
    let mut order: Vec<usize> = (0..rep.dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut u = DMatrix::<Complex64>::zeros(rep.dim, rep.dim);
    for (k, &src) in order.iter().enumerate() {
        u.set_column(k, &eig.eigenvectors.column(src));
    }
    let mut clusters = Vec::new();
    let mut start = 0;
    for k in 1..=rep.dim {
        if k == rep.dim || eig.eigenvalues[order[k]] - eig.eigenvalues[order[k - 1]] > 1e-6 {
            clusters.push(start..k);
            start = k;
        }
    }
    Ok((u, clusters))
}

/// Dimension of the commutant, with the singular-value gap of the solve.
///
/// Any `B` commuting with the Cartan operators preserves their joint
/// eigenspaces, so `B` is block diagonal in a Cartan eigenbasis. Only those
/// blocks are unknowns; the linear system `[B, π(E)] = [B, π(F)] = 0` is then
/// solved by SVD and the nullity read off.
pub fn commutant_analysis(rep: &RepMatrices) -> Result<CommutantReport> {
    if rep.dim > MAX_COMMUTANT_DIM {
        return Err(Error::DimensionCap {
            dim: rep.dim as u64,
            cap: MAX_COMMUTANT_DIM as u64,
        });
    }
    let (u, clusters) = cartan_eigenbasis(rep)?;
    let rotated = rep.conjugated(&u);
    let mut offsets = Vec::with_capacity(clusters.len());
    let mut unknowns = 0;
    for c in &clusters {
        offsets.push(unknowns);
        unknowns += c.len() * c.len();
    }
    let var = |ci: usize, a: usize, b: usize| -> usize {
        let c = &clusters[ci];
        offsets[ci] + (a - c.start) * c.len() + (b - c.start)
    };

    let mut rows: Vec<Vec<(usize, Complex64)>> = Vec::new();
    let ops: Vec<&DMatrix<Complex64>> = rotated.e.iter().chain(&rotated.f).flatten().collect();
    for x in ops {
        // Blocks X[cp, cq] that are numerically nonzero.
        for (cp, p_range) in clusters.iter().enumerate() {
            for (cq, q_range) in clusters.iter().enumerate() {
                let block = x.view((p_range.start, q_range.start), (p_range.len(), q_range.len()));
                if block.norm() < 1e-12 {
                    continue;
                }
                for p in p_range.clone() {
                    for q in q_range.clone() {
                        // (BX − XB)[p,q] = Σ_s B[p,s] X[s,q] − Σ_t X[p,t] B[t,q]
                        let mut row = Vec::new();
                        for s in p_range.clone() {
                            let v = x[(s, q)];
                            if v.norm() > 0.0 {
                                row.push((var(cp, p, s), v));
                            }
                        }
                        for t in q_range.clone() {
                            let v = x[(p, t)];
                            if v.norm() > 0.0 {
                                row.push((var(cq, t, q), -v));
                            }
                        }
                        if !row.is_empty() {
                            rows.push(row);
                        }
                    }
                }
            }
        }
    }
    let singular = constraint_singular_values(&rows, unknowns)?;
    let top = singular.iter().copied().fold(0.0, f64::max).max(1.0);
    let threshold = COMMUTANT_RANK_TOL * top;
    let kept: Vec<f64> = singular.iter().copied().filter(|&s| s >= threshold).collect();
    let discarded: Vec<f64> = singular.iter().copied().filter(|&s| s < threshold).collect();
    // Unknowns beyond the number of singular values are free as well.
    let rank = kept.len();
    Ok(CommutantReport {
        dim: unknowns - rank,
        unknowns,
        smallest_kept: kept.iter().copied().reduce(f64::min),
        largest_discarded: discarded.iter().copied().reduce(f64::max),
    })
}

/// Singular values of the sparse constraint system. Tall systems are first
/// compressed with a QR factorization, which preserves singular values.
fn constraint_singular_values(rows: &[Vec<(usize, Complex64)>], unknowns: usize) -> Result<Vec<f64>> {
    if unknowns == 0 || rows.is_empty() {
        return Ok(Vec::new());
    }
    let mut m = DMatrix::<Complex64>::zeros(rows.len(), unknowns);
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            m[(i, j)] += v;
        }
    }
    let square = if m.nrows() > m.ncols() {
        m.qr().r()
    } else {
        m
    };
    let svd = nalgebra::SVD::try_new(square, false, false, 1e-15, 10_000)
        .ok_or_else(|| Error::NumericalFailure("SVD of the commutant system did not converge".into()))?;
    Ok(svd.singular_values.iter().copied().collect())
}

pub fn commutant_dim(rep: &RepMatrices) -> Result<usize> {
    Ok(commutant_analysis(rep)?.dim)
}

/// A linear functional on `𝔤⁰ = 𝔥 ⊗ ℂ^m`: `values[i][j] = λ(ǎ_i ⊗ e_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    pub alg: FiniteInvolutiveAlgebra,
    pub rs: RootSystem,
    pub values: Vec<Vec<Rational64>>,
    /// Labels of the `m` coordinates of `ℂ^m`.
    pub points: Vec<Point>,
}

impl Functional {
    pub fn new(alg: FiniteInvolutiveAlgebra, rs: &RootSystem, values: Vec<Vec<Rational64>>) -> Result<Self> {
        let points = (1..=alg.dim()).map(|j| Point::new(format!("p{j}"))).collect();
        Self::with_points(alg, rs, values, points)
    }

    pub fn with_points(
        alg: FiniteInvolutiveAlgebra,
        rs: &RootSystem,
        values: Vec<Vec<Rational64>>,
        points: Vec<Point>,
    ) -> Result<Self> {
        if values.len() != rs.rank() || values.iter().any(|row| row.len() != alg.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "functional must be {}×{}",
                rs.rank(),
                alg.dim()
            )));
        }
        if points.len() != alg.dim() {
            return Err(Error::DimensionMismatch("one point label per coordinate".into()));
        }
        Ok(Functional {
            alg,
            rs: rs.clone(),
            values,
            points,
        })
    }

    pub fn column(&self, j: usize) -> Weight {
        Weight(self.values.iter().map(|row| row[j]).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HighestWeight {
    /// `dim ℰ`, the joint kernel of the raising operators.
    pub e_dim: usize,
    pub functional: Functional,
}

fn round_rational(x: f64) -> Result<Rational64> {
    for q in 1..=MAX_DENOMINATOR {
        let p = (x * q as f64).round();
        if (x - p / q as f64).abs() <= ROUNDING_TOL {
            return Ok(Rational64::new(p as i64, q));
        }
    }
    Err(Error::NonRationalEigenvalue(x))
}

/// Computes `ℰ = ⋂ ker π(E_i ⊗ δ_j)` and the Cartan functional on it.
///
/// Only simple raising operators are used. Every positive root vector is an
/// iterated commutator of simple ones, and a commutator `[X, Y]` kills any
/// vector killed by both `X` and `Y`; hence the joint kernel of the simple
/// raising operators equals the joint kernel of all of `𝔤⁺`.
pub fn extract_highest_weight(rep: &RepMatrices) -> Result<HighestWeight> {
    let n = rep.dim;
    let mut gram = DMatrix::<Complex64>::zeros(n, n);
    for e in rep.e.iter().flatten() {
        gram += e.adjoint() * e;
    }
    let eig = hermitian_eigen(gram)?;
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max).max(1.0);
    let kernel: Vec<usize> = (0..n)
        .filter(|&k| eig.eigenvalues[k] <= KERNEL_TOL * top)
        .collect();
    if kernel.is_empty() {
        return Err(Error::EmptyKernel);
    }
    let mut basis = DMatrix::<Complex64>::zeros(n, kernel.len());
    for (c, &k) in kernel.iter().enumerate() {
        basis.set_column(c, &eig.eigenvectors.column(k));
    }
    let e_dim = kernel.len();

    let hs: Vec<&DMatrix<Complex64>> = rep.h.iter().flatten().collect();
    let vector = if e_dim == 1 {
        basis.column(0).into_owned()
    } else {
        let coeffs = generic_coefficients(hs.len());
        let mut combo = DMatrix::<Complex64>::zeros(e_dim, e_dim);
        for (h, c) in hs.iter().zip(&coeffs) {
            combo += basis.adjoint() * *h * &basis * Complex64::from(*c);
        }
        let combo = (&combo + combo.adjoint()) * Complex64::from(0.5);
        let inner = hermitian_eigen(combo)?;
        let best = (0..e_dim)
            .max_by(|&a, &b| inner.eigenvalues[a].total_cmp(&inner.eigenvalues[b]))
            .expect("nonempty kernel");
        &basis * inner.eigenvectors.column(best)
    };
    let norm = vector.norm();
    let vector = vector / Complex64::from(norm);

    let m = rep.sites();
    let r = rep.rank;
    let mut values = vec![vec![Rational64::zero(); m]; r];
    for j in 0..m {
        for (i, row) in values.iter_mut().enumerate() {
            let hv = &rep.h[j][i] * &vector;
            let mu = vector.dotc(&hv).re;
            let residual = (&hv - &vector * Complex64::from(mu)).norm();
            if residual > ROUNDING_TOL {
                return Err(Error::NonScalarAction(residual));
            }
            row[j] = round_rational(mu)?;
        }
    }
    let rs = build_root_system(Series::A, r)?;
    let functional =
        Functional::with_points(FiniteInvolutiveAlgebra::identity(m), &rs, values, rep.points.clone())?;
    Ok(HighestWeight { e_dim, functional })
}

/// Sites and indices are numbered from 1, matching the JSON involution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason")]
pub enum NotInducibleReason {
    /// A nonzero value at a coordinate swapped by `σ` with `partner`.
    NonInvolutiveSupport { site: usize, partner: usize },
    NegativeCoefficient { site: usize, index: usize },
    NonIntegralCoefficient { site: usize, index: usize },
}

impl NotInducibleReason {
    pub fn kind(&self) -> &'static str {
        match self {
            NotInducibleReason::NonInvolutiveSupport { .. } => "NonInvolutiveSupport",
            NotInducibleReason::NegativeCoefficient { .. } => "NegativeCoefficient",
            NotInducibleReason::NonIntegralCoefficient { .. } => "NonIntegralCoefficient",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    Inducible(EvalRepSpec),
    NotInducible(NotInducibleReason),
}

impl Classification {
    pub fn is_inducible(&self) -> bool {
        matches!(self, Classification::Inducible(_))
    }
}

/// Decides whether `λ` is the highest weight of a bounded unitary
/// representation, returning its evaluation data if so.
///
/// `λ` is inducible iff it vanishes on every coordinate moved by `σ` and
/// each column at a `σ`-fixed coordinate is dominant integral.
pub fn classify_inducible(lambda: &Functional) -> Classification {
    let m = lambda.alg.dim();
    let r = lambda.rs.rank();
    for j in 0..m {
        if !lambda.alg.is_fixed(j) && (0..r).any(|i| !lambda.values[i][j].is_zero()) {
            return Classification::NotInducible(NotInducibleReason::NonInvolutiveSupport {
                site: j + 1,
                partner: lambda.alg.sigma(j) + 1,
            });
        }
    }
    let mut entries = Vec::new();
    for j in lambda.alg.fixed_points() {
        for i in 0..r {
            let v = lambda.values[i][j];
            if !v.is_integer() {
                return Classification::NotInducible(NotInducibleReason::NonIntegralCoefficient {
                    site: j + 1,
                    index: i + 1,
                });
            }
            if v.is_negative() {
                return Classification::NotInducible(NotInducibleReason::NegativeCoefficient {
                    site: j + 1,
                    index: i + 1,
                });
            }
        }
        let column = lambda.column(j);
        if !column.is_zero() {
            entries.push((lambda.points[j].clone(), column));
        }
    }
    Classification::Inducible(
        EvalRepSpec::new(&lambda.rs, entries).expect("columns checked dominant at distinct points"),
    )
}

// JSON documents.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub point: String,
    pub weight: Weight,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_distance: Option<f64>,
}

/// `{ "series": "A", "rank": r, "entries": [...], "involution": optional }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalRepSpecDoc {
    pub series: String,
    pub rank: usize,
    pub entries: Vec<EntryDoc>,
    /// 1-based permutation over `entries` in the order given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<Vec<usize>>,
}

impl EvalRepSpecDoc {
    /// Validates the document. Entries at points moved by the involution must
    /// carry the zero weight, since such points support no bounded unitary
    /// evaluation representation.
    pub fn to_spec(&self) -> Result<EvalRepSpec> {
        let rs = build_root_system(self.series.parse()?, self.rank)?;
        if let Some(perm) = &self.involution {
            if perm.len() != self.entries.len() {
                return Err(Error::DimensionMismatch(
                    "involution must permute the entries".into(),
                ));
            }
            let alg = FiniteInvolutiveAlgebra::from_one_based(perm)?;
            for (j, e) in self.entries.iter().enumerate() {
                if !alg.is_fixed(j) && !e.weight.is_zero() {
                    return Err(Error::Invalid(format!(
                        "point `{}` is moved by the involution but carries weight {}",
                        e.point, e.weight
                    )));
                }
            }
        }
        EvalRepSpec::new(
            &rs,
            self.entries
                .iter()
                .map(|e| {
                    (
                        Point {
                            id: e.point.clone(),
                            boundary_distance: e.boundary_distance,
                        },
                        e.weight.clone(),
                    )
                })
                .collect(),
        )
    }

    pub fn from_spec(spec: &EvalRepSpec) -> Self {
        EvalRepSpecDoc {
            series: "A".into(),
            rank: spec.rs.rank(),
            entries: spec
                .entries
                .iter()
                .map(|(p, w)| EntryDoc {
                    point: p.id.clone(),
                    weight: w.clone(),
                    boundary_distance: p.boundary_distance,
                })
                .collect(),
            involution: None,
        }
    }
}

/// `{ "series": "A", "rank": r, "values": [[..]], "involution": optional, "points": optional }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalDoc {
    pub series: String,
    pub rank: usize,
    pub values: Vec<Vec<serde_json::Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
}

impl FunctionalDoc {
    pub fn to_functional(&self) -> Result<Functional> {
        let rs = build_root_system(self.series.parse()?, self.rank)?;
        let values = self
            .values
            .iter()
            .map(|row| row.iter().map(|v| rational_from_value(v).map_err(Error::Invalid)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let m = values.first().map_or(0, |row| row.len());
        let alg = match &self.involution {
            Some(perm) => FiniteInvolutiveAlgebra::from_one_based(perm)?,
            None => FiniteInvolutiveAlgebra::identity(m),
        };
        match &self.points {
            Some(ids) => Functional::with_points(alg, &rs, values, ids.iter().map(Point::new).collect()),
            None => Functional::new(alg, &rs, values),
        }
    }

    pub fn from_functional(f: &Functional) -> Self {
        FunctionalDoc {
            series: "A".into(),
            rank: f.rs.rank(),
            values: f
                .values
                .iter()
                .map(|row| row.iter().map(rational_to_value).collect())
                .collect(),
            involution: Some(f.alg.one_based()),
            points: Some(f.points.iter().map(|p| p.id.clone()).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(r: usize) -> RootSystem {
        build_root_system(Series::A, r).unwrap()
    }

    fn spec(r: usize, entries: &[(&str, &[i64])]) -> EvalRepSpec {
        EvalRepSpec::new(
            &rs(r),
            entries
                .iter()
                .map(|(p, w)| (Point::new(*p), Weight::from_ints(w)))
                .collect(),
        )
        .unwrap()
    }

    fn q(rows: &[&[i64]]) -> Vec<Vec<Rational64>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| Rational64::from_integer(v)).collect())
            .collect()
    }

    #[test]
    fn involutions() {
        assert!(FiniteInvolutiveAlgebra::new(vec![1, 2, 0]).is_err());
        assert!(FiniteInvolutiveAlgebra::new(vec![0, 2, 1]).is_ok());
        // involution counts 1, 2, 4, 10
        let counts: Vec<usize> = (1..=4).map(|m| FiniteInvolutiveAlgebra::all(m).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 10]);
        assert!(FiniteInvolutiveAlgebra::swapped_pair().fixed_points().is_empty());
    }

    #[test]
    fn tensor_examples() {
        let x = spec(1, &[("x", &[2])]);
        let y = spec(1, &[("y", &[1])]);
        assert_eq!(tensor(&EvalRepSpec::empty(&rs(1)), &x).unwrap(), x);
        assert_eq!(tensor(&x, &y).unwrap(), spec(1, &[("x", &[2]), ("y", &[1])]));
        let x1 = spec(1, &[("x", &[1])]);
        assert_eq!(tensor(&x1, &x1), Err(Error::PointCollision("x".into())));
        assert!(matches!(tensor(&x1, &spec(2, &[("y", &[1, 0])])), Err(Error::RankMismatch(1, 2))));
    }

    #[test]
    fn equivalence_examples() {
        let s = spec(1, &[("x", &[1]), ("y", &[2])]);
        assert!(equivalent(&s, &s).unwrap());
        assert!(!equivalent(&spec(1, &[("x", &[2])]), &spec(1, &[("x", &[1])])).unwrap());
        assert!(equivalent(&s, &spec(1, &[("y", &[2]), ("x", &[1])])).unwrap());
    }

    #[test]
    fn realize_examples() {
        let one = realize(&spec(1, &[("x", &[1])])).unwrap();
        assert_eq!(one.dim, 2);
        let two = realize(&spec(1, &[("x", &[1]), ("y", &[1])])).unwrap();
        assert_eq!(two.dim, 4);
        assert!(two.relation_defect() < 1e-9);
        let empty = realize(&EvalRepSpec::empty(&rs(1))).unwrap();
        assert_eq!(empty.dim, 1);
        assert_eq!(empty.sites(), 0);
    }

    #[test]
    fn apply_examples() {
        let s = spec(1, &[("x", &[1])]);
        let zero = apply(&s, &BTreeMap::new()).unwrap();
        assert_eq!(zero.norm(), 0.0);
        let h = LieElement {
            h: vec![Complex64::from(1.0)],
            ..Default::default()
        };
        let m = apply(&s, &BTreeMap::from([("x".to_string(), h.clone())])).unwrap();
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::from(1.0),
            Complex64::from(-1.0),
        ]));
        assert!((m - expected).norm() < 1e-12);
        let s2 = spec(1, &[("x", &[1]), ("y", &[1])]);
        let section = BTreeMap::from([("x".to_string(), h.clone()), ("y".to_string(), h)]);
        let m2 = apply(&s2, &section).unwrap();
        let mut diag: Vec<f64> = (0..4).map(|k| m2[(k, k)].re).collect();
        diag.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(diag, vec![2.0, 0.0, 0.0, -2.0]);
    }

    #[test]
    fn commutant_examples() {
        let a = realize(&spec(2, &[("x", &[1, 1])])).unwrap();
        assert_eq!(commutant_dim(&a).unwrap(), 1);
        let b = realize(&spec(2, &[("x", &[1, 0])])).unwrap();
        // (1,0) and (0,2) on one site: inequivalent irreps
        let c = realize(&spec(2, &[("x", &[0, 2])])).unwrap();
        assert_eq!(commutant_dim(&a.direct_sum(&a).unwrap()).unwrap(), 4);
        assert_eq!(commutant_dim(&b.direct_sum(&c).unwrap()).unwrap(), 2);
    }

    #[test]
    fn extract_examples() {
        let hw = extract_highest_weight(&realize(&spec(1, &[("x", &[2])])).unwrap()).unwrap();
        assert_eq!(hw.e_dim, 1);
        assert_eq!(hw.functional.values, q(&[&[2]]));
        let hw2 =
            extract_highest_weight(&realize(&spec(1, &[("x", &[2]), ("y", &[1])])).unwrap()).unwrap();
        assert_eq!(hw2.e_dim, 1);
        assert_eq!(hw2.functional.values, q(&[&[2, 1]]));
        let a = realize(&spec(1, &[("x", &[1])])).unwrap();
        let b = realize(&spec(1, &[("x", &[2])])).unwrap();
        assert_eq!(extract_highest_weight(&a.direct_sum(&b).unwrap()).unwrap().e_dim, 2);
    }

    #[test]
    fn classify_examples() {
        let a1 = rs(1);
        let f = Functional::new(FiniteInvolutiveAlgebra::identity(2), &a1, q(&[&[2, 1]])).unwrap();
        assert_eq!(
            classify_inducible(&f),
            Classification::Inducible(spec(1, &[("p1", &[2]), ("p2", &[1])]))
        );
        let neg = Functional::new(FiniteInvolutiveAlgebra::identity(2), &a1, q(&[&[-1, 2]])).unwrap();
        assert_eq!(
            classify_inducible(&neg),
            Classification::NotInducible(NotInducibleReason::NegativeCoefficient { site: 1, index: 1 })
        );
        let d = Functional::new(FiniteInvolutiveAlgebra::swapped_pair(), &a1, q(&[&[1, 1]])).unwrap();
        assert_eq!(
            classify_inducible(&d),
            Classification::NotInducible(NotInducibleReason::NonInvolutiveSupport { site: 1, partner: 2 })
        );
        let half = Functional::new(
            FiniteInvolutiveAlgebra::identity(1),
            &a1,
            vec![vec![Rational64::new(1, 2)]],
        )
        .unwrap();
        assert!(matches!(
            classify_inducible(&half),
            Classification::NotInducible(NotInducibleReason::NonIntegralCoefficient { .. })
        ));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_rational(2.0000001).unwrap(), Rational64::from_integer(2));
        assert_eq!(round_rational(-0.5).unwrap(), Rational64::new(-1, 2));
        assert!(round_rational(std::f64::consts::PI).is_err());
    }

    #[test]
    fn doc_round_trip() {
        let json = r#"{"series":"A","rank":1,"entries":[{"point":"y","weight":[1]},{"point":"x","weight":[2],"boundary_distance":0.5}]}"#;
        let doc: EvalRepSpecDoc = serde_json::from_str(json).unwrap();
        let s = doc.to_spec().unwrap();
        assert_eq!(s.entries()[0].0, Point::at("x", 0.5));
        let back = serde_json::to_string(&EvalRepSpecDoc::from_spec(&s)).unwrap();
        assert_eq!(
            back,
            r#"{"series":"A","rank":1,"entries":[{"point":"x","weight":[2],"boundary_distance":0.5},{"point":"y","weight":[1]}]}"#
        );
        let bad = r#"{"series":"A","rank":1,"entries":[{"point":"x","weight":[1]},{"point":"y","weight":[0]}],"involution":[2,1]}"#;
        let doc: EvalRepSpecDoc = serde_json::from_str(bad).unwrap();
        assert!(doc.to_spec().is_err());
    }
}
