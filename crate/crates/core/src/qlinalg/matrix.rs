use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::Rational;
use super::LinalgError;

/// Sparse rational vector keyed by coordinate index. Zero entries are never
/// stored.
pub type SparseVec = BTreeMap<usize, Rational>;

/// Ordered list of distinct basis keys with the inverse lookup.
#[derive(Debug, Clone)]
pub struct IndexedBasis<K> {
    keys: Vec<K>,
    index: HashMap<K, usize>,
}

impl<K: Ord + Hash + Clone> IndexedBasis<K> {
    /// Builds a basis from keys in the given order. Duplicates are an error.
    pub fn new(keys: Vec<K>) -> Result<Self, LinalgError> {
        let mut index = HashMap::with_capacity(keys.len());
        for (i, k) in keys.iter().enumerate() {
            if index.insert(k.clone(), i).is_some() {
                return Err(LinalgError::DuplicateKey(i));
            }
        }
        Ok(IndexedBasis { keys, index })
    }

    /// Builds a basis with keys in their total order.
    pub fn sorted(mut keys: Vec<K>) -> Self {
        keys.sort();
        keys.dedup();
        Self::new(keys).expect("deduplicated keys")
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn key(&self, i: usize) -> &K {
        &self.keys[i]
    }

    pub fn position(&self, k: &K) -> Option<usize> {
        self.index.get(k).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &K> {
        self.keys.iter()
    }
}

/// Sparse rational matrix. Entries are kept in row-major order and never
/// hold zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries.insert((i, i), Rational::one());
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from(x)).collect())
            .collect();
        let mut m = Self::from_dense(&dense);
        if rows.is_empty() {
            m.cols = 0;
        }
        m
    }

    /// Assembles a matrix from sparse columns.
    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (&i, x) in col {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    /// Assembles a matrix from sparse rows.
    pub fn from_rows(cols: usize, rows: &[SparseVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (&j, x) in row {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, x: Rational) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        if x.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), x);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.entries.iter().map(|(&(i, j), x)| (i, j, x))
    }

    pub fn row_vectors(&self) -> Vec<SparseVec> {
        let mut out = vec![SparseVec::new(); self.rows];
        for (&(i, j), x) in &self.entries {
            out[i].insert(j, x.clone());
        }
        out
    }

    pub fn column(&self, j: usize) -> SparseVec {
        self.entries
            .iter()
            .filter(|(&(_, c), _)| c == j)
            .map(|(&(i, _), x)| (i, x.clone()))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (&(i, j), x) in &self.entries {
            t.entries.insert((j, i), x.clone());
        }
        t
    }

    pub fn mul(&self, rhs: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        let mut rhs_rows: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); rhs.rows];
        for (&(k, j), b) in &rhs.entries {
            rhs_rows[k].push((j, b));
        }
        let mut acc: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (&(i, k), a) in &self.entries {
            for &(j, b) in &rhs_rows[k] {
                *acc.entry((i, j)).or_insert_with(Rational::zero) += a * b;
            }
        }
        acc.retain(|_, x| !x.is_zero());
        Ok(SparseMatrix { rows: self.rows, cols: rhs.cols, entries: acc })
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&(i, j), a) in &self.entries {
            if let Some(x) = v.get(&j) {
                *out.entry(i).or_insert_with(Rational::zero) += a * x;
            }
        }
        out.retain(|_, x| !x.is_zero());
        out
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && self.entries.len() == self.rows
            && self.entries.iter().all(|(&(i, j), x)| i == j && x.is_one())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        rank(self)
    }
}

// Integer rows used by the fraction-free elimination: sorted by column,
// primitive (content 1), leading entry positive.
type IntRow = Vec<(usize, BigInt)>;

fn primitive_row(v: &SparseVec) -> IntRow {
    let mut lcm = BigInt::one();
    for x in v.values() {
        lcm = lcm.lcm(x.denom());
    }
    let row: IntRow = v
        .iter()
        .filter(|(_, x)| !x.is_zero())
        .map(|(&j, x)| (j, x.numer() * (&lcm / x.denom())))
        .collect();
    normalize(row)
}

fn normalize(mut row: IntRow) -> IntRow {
    let mut g = BigInt::zero();
    for (_, x) in &row {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for (_, x) in row.iter_mut() {
            *x /= &g;
        }
    }
    if row.first().is_some_and(|(_, x)| x.is_negative()) {
        for (_, x) in row.iter_mut() {
            *x = -&*x;
        }
    }
    row
}

/// Eliminates the entry of `row` at `pivot`'s leading column:
/// `row <- (p/g) row - (r/g) pivot`, then strips the content.
fn eliminate(row: &IntRow, at: usize, pivot: &IntRow) -> IntRow {
    let p = &pivot[0].1;
    debug_assert_eq!(pivot[0].0, at);
    let r = match row.iter().find(|(j, _)| *j == at) {
        Some((_, r)) => r.clone(),
        None => return row.clone(),
    };
    let g = p.gcd(&r);
    let a = p / &g;
    let b = &r / &g;
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut k) = (0, 0);
    while i < row.len() || k < pivot.len() {
        let ci = row.get(i).map(|e| e.0);
        let ck = pivot.get(k).map(|e| e.0);
        let (col, val) = match (ci, ck) {
            (Some(x), Some(y)) if x == y => {
                let v = &a * &row[i].1 - &b * &pivot[k].1;
                i += 1;
                k += 1;
                (x, v)
            }
            (Some(x), Some(y)) if x < y => {
                let v = &a * &row[i].1;
                i += 1;
                (x, v)
            }
            (Some(x), None) => {
                let v = &a * &row[i].1;
                i += 1;
                (x, v)
            }
            (_, Some(y)) => {
                let v = -(&b * &pivot[k].1);
                k += 1;
                (y, v)
            }
            (None, None) => unreachable!(),
        };
        if !val.is_zero() {
            out.push((col, val));
        }
    }
    normalize(out)
}

/// Row echelon form with distinct leading columns, pivots chosen column by
/// column as the candidate of smallest bit length.
fn echelon(rows: Vec<IntRow>) -> Vec<IntRow> {
    let mut buckets: BTreeMap<usize, Vec<IntRow>> = BTreeMap::new();
    for r in rows.into_iter().filter(|r| !r.is_empty()) {
        buckets.entry(r[0].0).or_default().push(r);
    }
    let mut out = Vec::new();
    while let Some((col, mut cands)) = buckets.pop_first() {
        let best = (0..cands.len())
            .min_by_key(|&i| (cands[i][0].1.bits(), cands[i].len()))
            .expect("nonempty bucket");
        let pivot = cands.swap_remove(best);
        for r in cands {
            let r2 = eliminate(&r, col, &pivot);
            if let Some(&(lead, _)) = r2.first() {
                buckets.entry(lead).or_default().push(r2);
            }
        }
        out.push(pivot);
    }
    out
}

/// Rank over the rationals by fraction-free elimination.
pub fn rank(m: &SparseMatrix) -> usize {
    let rows: Vec<IntRow> = m.row_vectors().iter().map(primitive_row).collect();
    echelon(rows).len()
}

/// Rank of a list of sparse vectors.
pub fn rank_of(vectors: &[SparseVec]) -> usize {
    echelon(vectors.iter().map(primitive_row).collect()).len()
}

fn kernel_from_rows(cols: usize, rows: Vec<IntRow>) -> Vec<SparseVec> {
    kernel_with_free_cols(cols, rows).into_iter().map(|(_, v)| v).collect()
}

/// Kernel basis paired with the free column at which each vector is `1`.
fn kernel_with_free_cols(cols: usize, rows: Vec<IntRow>) -> Vec<(usize, SparseVec)> {
    let mut ech = echelon(rows);
    // back substitution to reduced echelon form
    for i in (0..ech.len()).rev() {
        let (pc, _) = ech[i][0].clone();
        let pivot = ech[i].clone();
        for row in ech.iter_mut().take(i) {
            if row.iter().any(|(j, _)| *j == pc) {
                *row = eliminate_tail(row, pc, &pivot);
            }
        }
    }
    let pivot_cols: Vec<usize> = ech.iter().map(|r| r[0].0).collect();
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; cols];
        for &c in &pivot_cols {
            v[c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = SparseVec::new();
        v.insert(free, Rational::one());
        for row in &ech {
            if let Some((_, x)) = row.iter().find(|(j, _)| *j == free) {
                let p = &row[0];
                v.insert(p.0, -Rational::new(x.clone(), p.1.clone()));
            }
        }
        basis.push((free, v));
    }
    basis
}

// Like `eliminate`, but for a column that is not the row's leading column.
fn eliminate_tail(row: &IntRow, at: usize, pivot: &IntRow) -> IntRow {
    let p = &pivot[0].1;
    let r = row.iter().find(|(j, _)| *j == at).map(|(_, x)| x.clone()).expect("entry present");
    let g = p.gcd(&r);
    let a = p / &g;
    let b = &r / &g;
    let mut acc: BTreeMap<usize, BigInt> = row.iter().map(|(j, x)| (*j, &a * x)).collect();
    for (j, x) in pivot {
        let e = acc.entry(*j).or_insert_with(BigInt::zero);
        *e -= &b * x;
    }
    normalize(acc.into_iter().filter(|(_, x)| !x.is_zero()).collect())
}

/// Basis of the right kernel `{v : m v = 0}`; its size is `cols - rank`.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    let rows: Vec<IntRow> = m.row_vectors().iter().map(primitive_row).collect();
    kernel_from_rows(m.cols(), rows)
}

/// Basis of the intersection of the kernels of `ms`, all acting on a space
/// of dimension `cols`. The empty family gives the whole space.
pub fn joint_kernel(cols: usize, ms: &[SparseMatrix]) -> Result<Vec<SparseVec>, LinalgError> {
    let mut rows = Vec::new();
    for m in ms {
        if m.cols() != cols {
            return Err(LinalgError::DimensionMismatch { expected: cols, found: m.cols() });
        }
        rows.extend(m.row_vectors().iter().map(primitive_row));
    }
    Ok(kernel_from_rows(cols, rows))
}

/// Dimension of the joint kernel without materializing a basis.
pub fn joint_kernel_dim(cols: usize, ms: &[SparseMatrix]) -> Result<usize, LinalgError> {
    let mut rows = Vec::new();
    for m in ms {
        if m.cols() != cols {
            return Err(LinalgError::DimensionMismatch { expected: cols, found: m.cols() });
        }
        rows.extend(m.row_vectors().iter().map(primitive_row));
    }
    Ok(cols - echelon(rows).len())
}

/// Joint kernel with a coordinate chart: each basis vector is `1` at its
/// own free column and `0` at the free columns of the others.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<SparseVec>,
    free_cols: Vec<usize>,
}

impl Subspace {
    pub fn joint_kernel(cols: usize, ms: &[SparseMatrix]) -> Result<Self, LinalgError> {
        let mut rows = Vec::new();
        for m in ms {
            if m.cols() != cols {
                return Err(LinalgError::DimensionMismatch { expected: cols, found: m.cols() });
            }
            rows.extend(m.row_vectors().iter().map(primitive_row));
        }
        let (free_cols, basis) = kernel_with_free_cols(cols, rows).into_iter().unzip();
        Ok(Subspace { ambient: cols, basis, free_cols })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    /// Coordinates of a vector known to lie in the subspace.
    pub fn coordinates(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (k, c) in self.free_cols.iter().enumerate() {
            if let Some(x) = v.get(c) {
                out.insert(k, x.clone());
            }
        }
        debug_assert!(self.embed(&out) == *v, "vector outside subspace");
        out
    }

    /// Ambient vector with the given coordinates.
    pub fn embed(&self, coords: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&k, c) in coords {
            for (&j, x) in &self.basis[k] {
                let e = out.entry(j).or_insert_with(Rational::zero);
                *e += &(x * c);
            }
        }
        out.retain(|_, x| !x.is_zero());
        out
    }

    /// Matrix of an endomorphism `m` of the ambient space preserving the
    /// subspace, in subspace coordinates.
    pub fn restrict(&self, m: &SparseMatrix) -> SparseMatrix {
        let cols: Vec<SparseVec> =
            self.basis.iter().map(|v| self.coordinates(&m.apply(v))).collect();
        SparseMatrix::from_columns(self.dim(), &cols)
    }
}

/// Incrementally grown row space supporting membership tests and reduction.
#[derive(Debug, Clone, Default)]
pub struct RowSpace {
    pivots: BTreeMap<usize, IntRow>,
}

impl RowSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn reduce_int(&self, mut v: IntRow) -> IntRow {
        let mut idx = 0;
        while idx < v.len() {
            let c = v[idx].0;
            match self.pivots.get(&c) {
                Some(p) => v = eliminate_at(&v, c, p),
                None => idx += 1,
            }
        }
        v
    }

    /// Adds `v`; returns whether it enlarged the space.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce_int(primitive_row(v));
        match r.first() {
            None => false,
            Some(&(lead, _)) => {
                let r = normalize(r);
                self.pivots.insert(lead, r);
                true
            }
        }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce_int(primitive_row(v)).is_empty()
    }
}

// Eliminate column `at` (not necessarily leading) of `row` using a pivot row
// whose leading column is `at`.
fn eliminate_at(row: &IntRow, at: usize, pivot: &IntRow) -> IntRow {
    if row.first().is_some_and(|(j, _)| *j == at) {
        eliminate(row, at, pivot)
    } else {
        eliminate_tail(row, at, pivot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::rational::q;

    fn annihilates(m: &SparseMatrix, v: &SparseVec) -> bool {
        m.apply(v).is_empty()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(SparseMatrix::identity(2).rank(), 2);
        assert_eq!(SparseMatrix::from_i64(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(SparseMatrix::zeros(3, 5).rank(), 0);
        assert_eq!(SparseMatrix::zeros(0, 0).rank(), 0);
    }

    #[test]
    fn kernel_examples() {
        let m = SparseMatrix::from_i64(&[&[1, 1]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        assert_eq!(&k[0][&0] + &k[0][&1], Rational::zero());

        assert!(kernel_basis(&SparseMatrix::identity(3)).is_empty());

        let m = SparseMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        // proportional to (2, -1)
        assert_eq!(&k[0][&0] + &(&k[0][&1] * &q(2, 1)), Rational::zero());
        assert!(annihilates(&m, &k[0]));
    }

    #[test]
    fn joint_kernel_examples() {
        let a = SparseMatrix::from_i64(&[&[1, 0]]);
        let b = SparseMatrix::from_i64(&[&[0, 1]]);
        assert!(joint_kernel(2, &[a, b]).unwrap().is_empty());
        assert_eq!(joint_kernel(3, &[]).unwrap().len(), 3);
        let a = SparseMatrix::from_i64(&[&[1, 1, 0]]);
        let b = SparseMatrix::from_i64(&[&[0, 1, 1]]);
        assert_eq!(joint_kernel(3, &[a.clone(), b]).unwrap().len(), 1);
        let bad = SparseMatrix::from_i64(&[&[1, 1]]);
        assert!(matches!(
            joint_kernel(3, &[a, bad]),
            Err(LinalgError::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn row_space_membership() {
        let mut rs = RowSpace::new();
        let v1: SparseVec = [(0, q(1, 2)), (2, q(3, 1))].into_iter().collect();
        let v2: SparseVec = [(1, q(1, 1)), (2, q(-1, 3))].into_iter().collect();
        assert!(rs.insert(&v1));
        assert!(rs.insert(&v2));
        let combo: SparseVec =
            [(0, q(1, 1)), (1, q(-2, 1)), (2, q(6, 1) + q(2, 3))].into_iter().collect();
        assert!(rs.contains(&combo));
        assert!(!rs.insert(&combo));
        let other: SparseVec = [(2, q(1, 1))].into_iter().collect();
        assert!(!rs.contains(&other));
        assert_eq!(rs.rank(), 2);
    }

    #[test]
    fn product_and_identity() {
        let a = SparseMatrix::from_i64(&[&[1, 2], &[0, 1]]);
        let b = SparseMatrix::from_i64(&[&[1, -2], &[0, 1]]);
        assert!(a.mul(&b).unwrap().is_identity());
        assert!(a.mul(&SparseMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn duplicate_basis_keys_rejected() {
        assert!(IndexedBasis::new(vec![1, 2, 1]).is_err());
        let b = IndexedBasis::sorted(vec![3, 1, 2]);
        assert_eq!(b.position(&3), Some(2));
    }
}
