//! Dense linear algebra over a prime field.
//!
//! Entries are canonical residues in `[0, p)`. Elimination always picks the
//! topmost nonzero entry of the leftmost remaining column, so every result is
//! a deterministic function of the input.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Scalar arithmetic modulo a prime `p < 2^16`.
#[inline]
pub fn add(p: u32, a: u32, b: u32) -> u32 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub(p: u32, a: u32, b: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn mul(p: u32, a: u32, b: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
pub fn neg(p: u32, a: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

pub fn inv(p: u32, a: u32) -> u32 {
    assert!(a % p != 0, "inverse of zero");
    // Fermat: a^(p-2)
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Reduce an arbitrary integer to its canonical residue.
pub fn residue(p: u32, x: i64) -> u32 {
    x.rem_euclid(p as i64) as u32
}

/// `(-1)^k` as a residue.
pub fn sign(p: u32, k: i64) -> u32 {
    if k.rem_euclid(2) == 0 {
        1 % p
    } else {
        p - 1
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix<F_{}>{}x{}[", self.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        Matrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Matrix::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Build from integer rows, reducing every entry mod `p`.
    pub fn from_rows(p: u32, rows: usize, cols: usize, entries: &[Vec<i64>]) -> Self {
        assert_eq!(entries.len(), rows);
        let mut m = Matrix::zeros(p, rows, cols);
        for (r, row) in entries.iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (c, &x) in row.iter().enumerate() {
                m.set(r, c, residue(p, x));
            }
        }
        m
    }

    pub fn from_fn(p: u32, rows: usize, cols: usize, f: impl Fn(usize, usize) -> u32) -> Self {
        let mut m = Matrix::zeros(p, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c) % p);
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(p: u32, rows: usize, cols: &[Vec<u32>]) -> Self {
        let mut m = Matrix::zeros(p, rows, cols.len());
        for (c, v) in cols.iter().enumerate() {
            assert_eq!(v.len(), rows);
            for (r, &x) in v.iter().enumerate() {
                m.set(r, c, x);
            }
        }
        m
    }

    pub fn column_vector(p: u32, v: &[u32]) -> Self {
        Matrix { p, rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, x: u32) {
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == (r == c) as u32))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product {:?} * {:?}", self.shape(), other.shape());
        let p = self.p;
        let mut out = Matrix::zeros(p, self.rows, other.cols);
        let pp = p as u64;
        // accumulate in u64, reducing once per row pass to stay exact
        let mut acc = vec![0u64; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            let mut pending = 0u32;
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                for (c, &b) in orow.iter().enumerate() {
                    acc[c] += a * b as u64;
                }
                pending += 1;
                if pending == 1024 {
                    acc.iter_mut().for_each(|x| *x %= pp);
                    pending = 0;
                }
            }
            for c in 0..other.cols {
                out.set(r, c, (acc[c] % pp) as u32);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(self.cols, v.len());
        let pp = self.p as u64;
        (0..self.rows)
            .map(|r| {
                let mut acc = 0u64;
                for (k, &x) in v.iter().enumerate() {
                    acc = (acc + self.get(r, k) as u64 * x as u64) % pp;
                }
                acc as u32
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in sum");
        let p = self.p;
        Matrix {
            p,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| add(p, a, b)).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in difference");
        let p = self.p;
        Matrix {
            p,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| sub(p, a, b)).collect(),
        }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(self.p - 1)
    }

    pub fn scale(&self, s: u32) -> Matrix {
        let p = self.p;
        Matrix { p, rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| mul(p, a, s)).collect() }
    }

    /// Multiply by `(-1)^k`.
    pub fn signed(&self, k: i64) -> Matrix {
        if k.rem_euclid(2) == 0 {
            self.clone()
        } else {
            self.neg()
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.p, self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        Matrix::from_fn(self.p, r1 - r0, c1 - c0, |r, c| self.get(r0 + r, c0 + c))
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.p, self.rows, cols.len(), |r, c| self.get(r, cols[c]))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_fn(self.p, rows.len(), self.cols, |r, c| self.get(rows[r], c))
    }

    pub fn hstack(p: u32, rows: usize, blocks: &[&Matrix]) -> Matrix {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(p, rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows);
            out.paste(0, off, b);
            off += b.cols;
        }
        out
    }

    pub fn vstack(p: u32, cols: usize, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut out = Matrix::zeros(p, rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.cols, cols);
            out.paste(off, 0, b);
            off += b.rows;
        }
        out
    }

    /// Block-diagonal sum.
    pub fn block_diag(p: u32, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(p, rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.paste(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    /// Copy `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols, "paste out of bounds");
        for r in 0..block.rows {
            let dst = (r0 + r) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(r));
        }
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let p = self.p;
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for k in 0..cols {
                    self.data.swap(pr * cols + k, r * cols + k);
                }
            }
            let iv = inv(p, self.get(r, c));
            if iv != 1 {
                for k in c..cols {
                    let x = self.get(r, k);
                    self.set(r, k, mul(p, x, iv));
                }
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f == 0 {
                    continue;
                }
                let nf = neg(p, f);
                for k in c..cols {
                    let b = self.data[r * cols + k];
                    if b != 0 {
                        let a = self.data[i * cols + k];
                        self.data[i * cols + k] = ((a as u64 + nf as u64 * b as u64) % p as u64) as u32;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, as the columns of a matrix in reduced column
    /// echelon form.
    pub fn kernel(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let n = self.cols;
        let mut is_pivot = vec![false; n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut vecs = Vec::new();
        for f in (0..n).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; n];
            v[f] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = neg(self.p, r.get(row, f));
            }
            vecs.push(v);
        }
        canonical_columns(self.p, n, &vecs)
    }

    /// Basis of the column space in reduced column echelon form.
    pub fn image(&self) -> Matrix {
        let vecs: Vec<Vec<u32>> = (0..self.cols).map(|c| self.col(c)).collect();
        canonical_columns(self.p, self.rows, &vecs)
    }

    /// A solution `X` of `self * X = b` with every free variable set to zero,
    /// or `None` when the system is inconsistent.
    pub fn solve(&self, b: &Matrix) -> Option<Matrix> {
        assert_eq!(self.rows, b.rows, "solve: row mismatch");
        let p = self.p;
        let n = self.cols;
        let aug = Matrix::hstack(p, self.rows, &[self, b]);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&c| c >= n) {
            return None;
        }
        let mut x = Matrix::zeros(p, n, b.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            for k in 0..b.cols {
                x.set(pc, k, r.get(row, n + k));
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let x = self.solve(&Matrix::identity(self.p, self.rows))?;
        if self.mul(&x).is_identity() {
            Some(x)
        } else {
            None
        }
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows
    }
}

/// The unique reduced-echelon basis of the span of `vecs`, as columns.
pub fn canonical_columns(p: u32, dim: usize, vecs: &[Vec<u32>]) -> Matrix {
    if vecs.is_empty() {
        return Matrix::zeros(p, dim, 0);
    }
    let rows: Vec<Vec<i64>> = vecs.iter().map(|v| v.iter().map(|&x| x as i64).collect()).collect();
    let m = Matrix::from_rows(p, vecs.len(), dim, &rows);
    let (r, pivots) = m.rref();
    Matrix::from_fn(p, dim, pivots.len(), |i, j| r.get(j, i))
}

/// Incrementally maintained reduced echelon basis of a subspace of `F_p^n`.
#[derive(Clone, Debug)]
pub struct Span {
    p: u32,
    n: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Span {
    pub fn new(p: u32, n: usize) -> Self {
        Span { p, n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    /// Residual of `v` after reduction against the current basis.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let p = self.p;
        let mut w = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let f = w[pc];
            if f != 0 {
                let nf = neg(p, f);
                for (x, &y) in w.iter_mut().zip(row) {
                    if y != 0 {
                        *x = add(p, *x, mul(p, nf, y));
                    }
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Insert `v`; returns `true` when the span grew.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.n);
        let p = self.p;
        let mut w = self.reduce(v);
        let Some(pc) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let iv = inv(p, w[pc]);
        w.iter_mut().for_each(|x| *x = mul(p, *x, iv));
        for row in &mut self.rows {
            let f = row[pc];
            if f != 0 {
                let nf = neg(p, f);
                for (x, &y) in row.iter_mut().zip(&w) {
                    if y != 0 {
                        *x = add(p, *x, mul(p, nf, y));
                    }
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < pc);
        self.rows.insert(pos, w);
        self.pivots.insert(pos, pc);
        true
    }

    /// Basis as columns, in reduced column echelon form.
    pub fn basis(&self) -> Matrix {
        Matrix::from_cols(self.p, self.n, &self.rows)
    }
}
