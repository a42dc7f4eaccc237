//! Exact rational linear algebra on sparse vectors.
//!
//! Vectors are `BTreeMap<usize, Q>` with no explicit zeros. The echelon
//! tracker performs rank-revealing elimination in insertion order with the
//! smallest nonzero index as pivot, so bases built from it are reproducible.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;
pub type SparseVec = BTreeMap<usize, Q>;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `"p/q"`, or `"p"` for integers.
pub fn q_to_string(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn q_parse(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| Q::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

/// `sign(q)·sqrt(|q|)` in floating point, robust to numerators and
/// denominators far outside the `f64` range.
pub fn signed_sqrt(q: &Q) -> f64 {
    let mag = q.abs().to_f64().unwrap_or(f64::NAN).sqrt();
    if q.is_negative() {
        -mag
    } else {
        mag
    }
}

pub fn axpy(target: &mut SparseVec, scale: &Q, source: &SparseVec) {
    for (&k, v) in source {
        let entry = target.entry(k).or_insert_with(Q::zero);
        *entry += scale * v;
        if entry.is_zero() {
            target.remove(&k);
        }
    }
}

pub fn add_at(target: &mut SparseVec, index: usize, value: Q) {
    if value.is_zero() {
        return;
    }
    let entry = target.entry(index).or_insert_with(Q::zero);
    *entry += value;
    if entry.is_zero() {
        target.remove(&index);
    }
}

pub fn scale(v: &SparseVec, s: &Q) -> SparseVec {
    if s.is_zero() {
        return SparseVec::new();
    }
    v.iter().map(|(&k, x)| (k, x * s)).collect()
}

/// Rescales `v` so its first nonzero coordinate is 1.
pub fn normalize_leading(v: &SparseVec) -> SparseVec {
    match v.values().next() {
        Some(lead) => scale(v, &lead.recip()),
        None => SparseVec::new(),
    }
}

struct EchelonRow {
    pivot: usize,
    row: SparseVec,
    /// Row expressed in the inserted basis vectors.
    combo: Vec<Q>,
}

/// Incremental row echelon form over a growing list of basis vectors.
#[derive(Default)]
pub struct Echelon {
    rows: Vec<EchelonRow>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `v`, returning the remainder and the coefficients (over the
    /// inserted basis) of the part that was removed.
    fn reduce(&self, v: &SparseVec) -> (SparseVec, Vec<Q>) {
        let mut rem = v.clone();
        let mut coeffs = vec![Q::zero(); self.rows.len()];
        for row in &self.rows {
            if let Some(c) = rem.get(&row.pivot).cloned() {
                // row.row[pivot] == 1
                axpy(&mut rem, &(-&c), &row.row);
                for (acc, b) in coeffs.iter_mut().zip(&row.combo) {
                    *acc += &c * b;
                }
            }
        }
        (rem, coeffs)
    }

    /// Coordinates of `v` in the inserted basis, or `None` if `v` is not in the span.
    pub fn coordinates(&self, v: &SparseVec) -> Option<Vec<Q>> {
        let (rem, coeffs) = self.reduce(v);
        rem.is_empty().then_some(coeffs)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Inserts `v` as the next basis vector if it is independent of the span.
    pub fn try_insert(&mut self, v: &SparseVec) -> bool {
        let (rem, coeffs) = self.reduce(v);
        let Some((&pivot, lead)) = rem.iter().next() else {
            return false;
        };
        let inv = lead.recip();
        // rem = v_new − Σ coeffs·basis
        let mut combo: Vec<Q> = coeffs.iter().map(|c| -c * &inv).collect();
        combo.push(inv.clone());
        for row in &mut self.rows {
            row.combo.push(Q::zero());
        }
        self.rows.push(EchelonRow {
            pivot,
            row: scale(&rem, &inv),
            combo,
        });
        true
    }
}

/// Sparse matrix stored by columns: `cols[j]` is the image of basis vector `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols: vec![SparseVec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for (j, col) in m.cols.iter_mut().enumerate() {
            col.insert(j, Q::one());
        }
        m
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        self.cols[c].get(&r).cloned().unwrap_or_else(Q::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        if v.is_zero() {
            self.cols[c].remove(&r);
        } else {
            self.cols[c].insert(r, v);
        }
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&j, x) in v {
            axpy(&mut out, x, &self.cols[j]);
        }
        out
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: other.cols.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        let mut out = self.clone();
        for (j, col) in other.cols.iter().enumerate() {
            axpy(&mut out.cols[j], &-Q::one(), col);
        }
        out
    }

    pub fn scaled(&self, s: &Q) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols.iter().map(|c| scale(c, s)).collect(),
        }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut out = SparseMatrix::zeros(self.ncols(), self.rows);
        for (j, col) in self.cols.iter().enumerate() {
            for (&i, v) in col {
                out.cols[i].insert(j, v.clone());
            }
        }
        out
    }

    pub fn commutator(&self, other: &SparseMatrix) -> SparseMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    /// Dense row-major rendering as `"p/q"` strings.
    pub fn to_dense_strings(&self) -> Vec<Vec<String>> {
        let mut out = vec![vec!["0".to_string(); self.ncols()]; self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for (&i, v) in col {
                out[i][j] = q_to_string(v);
            }
        }
        out
    }
}
