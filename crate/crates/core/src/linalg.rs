//! Dense linear algebra over prime fields.
//!
//! Every homology group, Hom-space and syzygy in the engine is computed by
//! reducing small dense matrices over `F_p`. Matrices are row-major and a
//! matrix represents a linear map from `cols`-dimensional to `rows`-dimensional
//! space acting on column vectors.

use std::fmt;

use crate::error::{QpdError, Result};

/// A prime field `F_p` with `2 <= p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if p < 2 || p >= (1 << 31) {
            return Err(QpdError::Argument(format!(
                "field modulus {p} outside [2, 2^31)"
            )));
        }
        if !is_prime(p) {
            return Err(QpdError::Argument(format!("field modulus {p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + (self.p - b) as u64;
        (s % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1u32 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    pub fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    /// Symmetric representative in `(-p/2, p/2]`, used when moving
    /// coefficients between fields.
    pub fn centered(&self, a: u32) -> i64 {
        if a as u64 * 2 > self.p as u64 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n as u64 {
        if n as u64 % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[{}x{} / F_{}]", self.rows, self.cols, self.field.p)?;
        for r in 0..self.rows {
            write!(f, "\n  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Result of Gauss-Jordan elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.p;
        }
        m
    }

    pub fn from_vec(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        let p = field.p;
        Matrix {
            field,
            rows,
            cols,
            data: data.into_iter().map(|v| v % p).collect(),
        }
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&v| field.from_i64(v)));
        }
        Matrix {
            field,
            rows: r,
            cols: c,
            data,
        }
    }

    /// Matrix whose columns are the given vectors (all of length `dim`).
    pub fn from_columns(field: PrimeField, dim: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(field, dim, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), dim);
            for (i, &v) in col.iter().enumerate() {
                m.data[i * m.cols + j] = v;
            }
        }
        m
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }
    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.p;
    }
    #[inline]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let p = self.field.p as u64;
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (slot, &b) in acc.iter_mut().zip(orow) {
                    *slot = (*slot + a * b as u64) % p;
                }
            }
            for (c, &v) in acc.iter().enumerate() {
                out.data[r * other.cols + c] = v as u32;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        let p = self.field.p as u64;
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let mut s = 0u64;
                for (&a, &b) in row.iter().zip(v) {
                    if a != 0 && b != 0 {
                        s = (s + a as u64 * b as u64) % p;
                    }
                }
                s as u32
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, s: u32) -> Matrix {
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, s)).collect(),
        }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(self.field.p - 1)
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zeros(self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            out.data[r * out.cols..r * out.cols + self.cols].copy_from_slice(self.row(r));
            out.data[r * out.cols + self.cols..(r + 1) * out.cols].copy_from_slice(other.row(r));
        }
        out
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Block matrix from a grid of blocks. Row heights and column widths are
    /// given explicitly so empty blocks are allowed.
    pub fn from_blocks(
        field: PrimeField,
        heights: &[usize],
        widths: &[usize],
        block: impl Fn(usize, usize) -> Option<Matrix>,
    ) -> Matrix {
        let rows: usize = heights.iter().sum();
        let cols: usize = widths.iter().sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut r0 = 0;
        for (bi, &h) in heights.iter().enumerate() {
            let mut c0 = 0;
            for (bj, &w) in widths.iter().enumerate() {
                if let Some(b) = block(bi, bj) {
                    assert_eq!((b.rows, b.cols), (h, w), "block ({bi},{bj}) has wrong shape");
                    for r in 0..h {
                        out.data[(r0 + r) * cols + c0..(r0 + r) * cols + c0 + w]
                            .copy_from_slice(b.row(r));
                    }
                }
                c0 += w;
            }
            r0 += h;
        }
        out
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                out.data[r * idx.len() + j] = self.data[r * self.cols + c];
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            field: self.field,
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    fn row_axpy(&mut self, target: usize, source: usize, factor: u32) {
        // row_target -= factor * row_source
        if factor == 0 {
            return;
        }
        let p = self.field.p as u64;
        let neg = (p - factor as u64) % p;
        let cols = self.cols;
        let (a, b) = if target < source {
            let (lo, hi) = self.data.split_at_mut(source * cols);
            (&mut lo[target * cols..(target + 1) * cols], &hi[..cols])
        } else {
            let (lo, hi) = self.data.split_at_mut(target * cols);
            (&mut hi[..cols], &lo[source * cols..(source + 1) * cols])
        };
        for (x, &y) in a.iter_mut().zip(b.iter()) {
            if y != 0 {
                *x = ((*x as u64 + neg * y as u64) % p) as u32;
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, s: u32) {
        let f = self.field;
        for v in &mut self.data[r * self.cols..(r + 1) * self.cols] {
            *v = f.mul(*v, s);
        }
    }

    /// Reduced row echelon form, computed by Gauss-Jordan elimination.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = m.field.inv(m.get(r, c));
            m.scale_row(r, inv);
            for i in 0..m.rows {
                if i != r {
                    let f = m.get(i, c);
                    m.row_axpy(i, r, f);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            rank: pivots.len(),
            matrix: m,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        if self.rows < self.cols {
            self.transpose().rref().rank
        } else {
            self.rref().rank
        }
    }

    /// Columns form a basis of the null space.
    pub fn kernel_basis(&self) -> Matrix {
        let Rref { matrix, pivots, .. } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut k = Matrix::zeros(self.field, self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            k.data[fc * free.len() + j] = 1 % self.field.p;
            for (i, &pc) in pivots.iter().enumerate() {
                let v = matrix.get(i, fc);
                k.data[pc * free.len() + j] = self.field.neg(v);
            }
        }
        k
    }

    /// Returns some `x` with `self * x = b`, or `None` when `b` has a column
    /// outside the column space.
    pub fn solve(&self, b: &Matrix) -> Result<Option<Matrix>> {
        if b.rows != self.rows {
            return Err(QpdError::Argument(format!(
                "solve: right-hand side has {} rows, matrix has {}",
                b.rows, self.rows
            )));
        }
        let aug = self.hstack(b).rref();
        let mut x = Matrix::zeros(self.field, self.cols, b.cols);
        for (i, &pc) in aug.pivots.iter().enumerate() {
            if pc >= self.cols {
                return Ok(None);
            }
            for k in 0..b.cols {
                x.data[pc * b.cols + k] = aug.matrix.get(i, self.cols + k);
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let aug = self.hstack(&Matrix::identity(self.field, n)).rref();
        if aug.rank < n || aug.pivots[n - 1] != n - 1 {
            return None;
        }
        let idx: Vec<usize> = (n..2 * n).collect();
        Some(aug.matrix.select_columns(&idx))
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

/// An echelon basis of a subspace of `F_p^dim`: supports membership tests,
/// reduction modulo the subspace and coordinates with respect to the basis.
///
/// Rows are kept in reduced echelon form, so the coordinate of a member `v`
/// along basis row `i` is simply `v[pivots[i]]`.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    field: PrimeField,
    dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn empty(field: PrimeField, dim: usize) -> Self {
        EchelonBasis {
            field,
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Span of the given vectors.
    pub fn span(field: PrimeField, dim: usize, vectors: &[Vec<u32>]) -> Self {
        let mut e = Self::empty(field, dim);
        for v in vectors {
            e.insert(v.clone());
        }
        e
    }

    /// Span of the columns of `m`.
    pub fn column_span(m: &Matrix) -> Self {
        let mut e = Self::empty(m.field(), m.rows());
        if m.cols == 0 || m.rows == 0 {
            return e;
        }
        let r = m.transpose().rref();
        for i in 0..r.rank {
            e.rows.push(r.matrix.row(i).to_vec());
            e.pivots.push(r.pivots[i]);
        }
        e
    }

    pub fn full(field: PrimeField, dim: usize) -> Self {
        let mut e = Self::empty(field, dim);
        for i in 0..dim {
            let mut v = vec![0; dim];
            v[i] = 1 % field.p();
            e.rows.push(v);
            e.pivots.push(i);
        }
        e
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Subtract the subspace component; the result vanishes on every pivot.
    pub fn reduce(&self, v: &mut [u32]) {
        let f = self.field;
        let p = f.p() as u64;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if c == 0 {
                continue;
            }
            let neg = p - c as u64;
            for (x, &y) in v.iter_mut().zip(row) {
                if y != 0 {
                    *x = ((*x as u64 + neg * y as u64) % p) as u32;
                }
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Adds `v` to the span; returns `true` if the dimension grew.
    pub fn insert(&mut self, mut v: Vec<u32>) -> bool {
        assert_eq!(v.len(), self.dim);
        self.reduce(&mut v);
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let f = self.field;
        let inv = f.inv(v[pc]);
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
        let p = f.p() as u64;
        for row in self.rows.iter_mut() {
            let c = row[pc];
            if c != 0 {
                let neg = p - c as u64;
                for (x, &y) in row.iter_mut().zip(&v) {
                    if y != 0 {
                        *x = ((*x as u64 + neg * y as u64) % p) as u32;
                    }
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < pc);
        self.pivots.insert(pos, pc);
        self.rows.insert(pos, v);
        true
    }

    /// Coordinates of a member of the span. Callers must ensure membership.
    pub fn coords(&self, v: &[u32]) -> Vec<u32> {
        self.pivots.iter().map(|&pc| v[pc]).collect()
    }

    /// Standard basis vectors completing this subspace to the whole space.
    pub fn complement_coordinates(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.dim];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.dim).filter(|&i| !is_pivot[i]).collect()
    }
}

/// The quotient `upper / lower` of nested subspaces of a common ambient
/// space, with chosen lifts and a coordinate map.
#[derive(Clone, Debug)]
pub struct Subquotient {
    lower: EchelonBasis,
    lifts: EchelonBasis,
}

impl Subquotient {
    /// `upper` need not contain `lower` as a set of vectors, but the quotient
    /// is only meaningful when it does.
    pub fn new(upper: &[Vec<u32>], lower: EchelonBasis) -> Self {
        let field = lower.field;
        let dim = lower.dim;
        let mut lifts = EchelonBasis::empty(field, dim);
        for u in upper {
            let mut w = u.clone();
            lower.reduce(&mut w);
            lifts.insert(w);
        }
        Subquotient { lower, lifts }
    }

    pub fn dim(&self) -> usize {
        self.lifts.dim()
    }

    pub fn lifts(&self) -> &[Vec<u32>] {
        self.lifts.basis()
    }

    /// Coordinates in the quotient of an element of `upper`.
    pub fn coords(&self, v: &[u32]) -> Vec<u32> {
        let mut w = v.to_vec();
        self.lower.reduce(&mut w);
        self.lifts.coords(&w)
    }

    pub fn lower(&self) -> &EchelonBasis {
        &self.lower
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(PrimeField::new(100).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(2_147_483_647).is_ok());
    }

    #[test]
    fn rref_examples() {
        let m = Matrix::from_rows(f(2), &[vec![1, 1], vec![1, 1]]);
        assert_eq!(m.rref().rank, 1);

        let id = Matrix::identity(f(101), 3);
        let r = id.rref();
        assert_eq!(r.rank, 3);
        assert_eq!(r.pivots, vec![0, 1, 2]);

        let m = Matrix::from_rows(f(101), &[vec![2, 4], vec![1, 2]]);
        let r = m.rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.matrix.row(0), &[1, 2]);
        assert_eq!(r.matrix.row(1), &[0, 0]);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Matrix::identity(f(101), 2).kernel_basis().cols(), 0);
        assert_eq!(Matrix::zeros(f(101), 2, 3).kernel_basis().cols(), 3);
        let k = Matrix::from_rows(f(2), &[vec![1, 1]]).kernel_basis();
        assert_eq!(k.cols(), 1);
        assert_eq!(k.column(0), vec![1, 1]);
    }

    #[test]
    fn solve_examples() {
        let fld = f(101);
        let b = Matrix::from_rows(fld, &[vec![5, 7], vec![3, 100]]);
        let x = Matrix::identity(fld, 2).solve(&b).unwrap().unwrap();
        assert_eq!(x, b);

        let m = Matrix::from_rows(f(2), &[vec![1, 1]]);
        let x = m.solve(&Matrix::from_rows(f(2), &[vec![0]])).unwrap().unwrap();
        assert!(m.mul(&x).is_zero());

        let m = Matrix::from_rows(f(3), &[vec![1], vec![1]]);
        let b = Matrix::from_rows(f(3), &[vec![1], vec![2]]);
        assert!(m.solve(&b).unwrap().is_none());

        assert!(m.solve(&Matrix::zeros(f(3), 3, 1)).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let fld = f(101);
        let m = Matrix::from_rows(fld, &[vec![2, 1], vec![7, 3]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(fld, 2));
        assert!(Matrix::from_rows(fld, &[vec![1, 2], vec![2, 4]]).inverse().is_none());
    }

    #[test]
    fn subquotient_coordinates() {
        let fld = f(7);
        // upper = span(e0, e1), lower = span(e0 + e1)
        let lower = EchelonBasis::span(fld, 3, &[vec![1, 1, 0]]);
        let sq = Subquotient::new(&[vec![1, 0, 0], vec![0, 1, 0]], lower);
        assert_eq!(sq.dim(), 1);
        let a = sq.coords(&[1, 0, 0]);
        let b = sq.coords(&[0, 1, 0]);
        assert_eq!(fld.add(a[0], b[0]), 0);
        assert_eq!(sq.coords(&[3, 3, 0]), vec![0]);
    }

    fn matrix_strategy() -> impl Strategy<Value = (u32, Matrix)> {
        (prop_oneof![Just(2u32), Just(3), Just(101)], 0usize..6, 0usize..6).prop_flat_map(
            |(p, r, c)| {
                proptest::collection::vec(0u32..p, r * c).prop_map(move |data| {
                    (p, Matrix::from_vec(PrimeField::new(p).unwrap(), r, c, data))
                })
            },
        )
    }

    proptest! {
        #[test]
        fn rank_nullity((_p, m) in matrix_strategy()) {
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.cols(), m.cols());
            prop_assert!(m.mul(&k).is_zero());
            prop_assert_eq!(k.rank(), k.cols());
        }

        #[test]
        fn rref_idempotent((_p, m) in matrix_strategy()) {
            let r1 = m.rref();
            let r2 = r1.matrix.rref();
            prop_assert_eq!(&r1.matrix, &r2.matrix);
            prop_assert_eq!(r1.rank, r2.rank);
        }

        #[test]
        fn solve_witness((_p, m) in matrix_strategy(), seed in 0u64..1000) {
            // b in the column space by construction
            let fld = m.field();
            let xs: Vec<u32> = (0..m.cols()).map(|i| ((seed as usize * 31 + i * 7) as u32) % fld.p()).collect();
            let b = Matrix::from_columns(fld, m.rows(), &[m.mul_vec(&xs)]);
            let x = m.solve(&b).unwrap().expect("b is in the column space");
            prop_assert_eq!(m.mul(&x), b);
        }

        #[test]
        fn echelon_span_dimension_is_rank((_p, m) in matrix_strategy()) {
            let e = EchelonBasis::column_span(&m);
            prop_assert_eq!(e.dim(), m.rank());
            for c in m.columns() {
                prop_assert!(e.contains(&c));
            }
        }
    }
}
