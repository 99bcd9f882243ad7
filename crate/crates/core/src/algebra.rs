//! Finite-dimensional associative unital algebras given by structure constants.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Unvalidated algebra data, as read from input files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraData {
    pub p: u32,
    pub dim: usize,
    pub basis: Vec<String>,
    pub unit: Vec<u32>,
    /// `mul[i][j]` holds the coordinates of `e_i * e_j`.
    pub mul: Vec<Vec<Vec<u32>>>,
}

struct Inner {
    data: AlgebraData,
    left: Vec<Matrix>,
    right: Vec<Matrix>,
}

/// A validated algebra. Cheap to clone; equality is structural.
#[derive(Clone)]
pub struct Algebra(Arc<Inner>);

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.data.p == other.0.data.p
                && self.0.data.dim == other.0.data.dim
                && self.0.data.unit == other.0.data.unit
                && self.0.data.mul == other.0.data.mul)
    }
}
impl Eq for Algebra {}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Algebra(F_{}, dim {}, basis {:?})", self.p(), self.dim(), self.0.data.basis)
    }
}

impl Algebra {
    /// Check shapes, residues, associativity and the unit axioms.
    pub fn validate(data: AlgebraData) -> Result<Algebra> {
        let AlgebraData { p, dim, .. } = data;
        if !(2..65536).contains(&p) || !linalg::is_prime(p) {
            return Err(Error::ShapeMismatch(format!("p = {p} is not a prime below 2^16")));
        }
        if dim == 0 {
            return Err(Error::ShapeMismatch("algebra dimension must be positive".into()));
        }
        if data.basis.len() != dim {
            return Err(Error::ShapeMismatch(format!("{} basis labels for dimension {dim}", data.basis.len())));
        }
        if data.unit.len() != dim {
            return Err(Error::ShapeMismatch(format!("unit has length {}, expected {dim}", data.unit.len())));
        }
        if data.mul.len() != dim || data.mul.iter().any(|r| r.len() != dim || r.iter().any(|v| v.len() != dim)) {
            return Err(Error::ShapeMismatch(format!("mul must be a {dim}x{dim} array of length-{dim} vectors")));
        }
        let in_range = |v: &[u32]| v.iter().all(|&x| x < p);
        if !in_range(&data.unit) || !data.mul.iter().flatten().all(|v| in_range(v)) {
            return Err(Error::ShapeMismatch("entries must be canonical residues in [0, p)".into()));
        }
        let alg = Algebra::build(data);
        alg.check_axioms()?;
        Ok(alg)
    }

    fn build(data: AlgebraData) -> Algebra {
        let (p, d) = (data.p, data.dim);
        // left[i][:, j] = e_i e_j, right[i][:, j] = e_j e_i
        let left = (0..d).map(|i| Matrix::from_fn(p, d, d, |r, j| data.mul[i][j][r])).collect();
        let right = (0..d).map(|i| Matrix::from_fn(p, d, d, |r, j| data.mul[j][i][r])).collect();
        Algebra(Arc::new(Inner { data, left, right }))
    }

    fn check_axioms(&self) -> Result<()> {
        let d = self.dim();
        // (e_i e_j) e_k = L(e_i e_j) e_k; e_i (e_j e_k) = L_i (e_j e_k)
        for i in 0..d {
            for j in 0..d {
                let lij = self.left_mult(&self.0.data.mul[i][j]);
                for k in 0..d {
                    let lhs = lij.col(k);
                    let rhs = self.0.left[i].mul_vec(&self.0.data.mul[j][k]);
                    if lhs != rhs {
                        return Err(Error::NonAssociative(i, j, k));
                    }
                }
            }
        }
        let lu = self.left_mult(&self.0.data.unit);
        let ru = self.right_mult(&self.0.data.unit);
        for i in 0..d {
            let e = unit_vector(d, i);
            if lu.mul_vec(&e) != e || ru.mul_vec(&e) != e {
                return Err(Error::UnitFailure(i));
            }
        }
        Ok(())
    }

    pub fn data(&self) -> &AlgebraData {
        &self.0.data
    }
    pub fn p(&self) -> u32 {
        self.0.data.p
    }
    pub fn dim(&self) -> usize {
        self.0.data.dim
    }
    pub fn unit(&self) -> &[u32] {
        &self.0.data.unit
    }
    pub fn labels(&self) -> &[String] {
        &self.0.data.basis
    }

    /// Left multiplication by `e_i` on the regular representation.
    pub fn left(&self, i: usize) -> &Matrix {
        &self.0.left[i]
    }

    /// Right multiplication by `e_i` on the regular representation.
    pub fn right(&self, i: usize) -> &Matrix {
        &self.0.right[i]
    }

    /// Left multiplication by an arbitrary element.
    pub fn left_mult(&self, a: &[u32]) -> Matrix {
        combine(self.p(), self.dim(), a, &self.0.left)
    }

    pub fn right_mult(&self, a: &[u32]) -> Matrix {
        combine(self.p(), self.dim(), a, &self.0.right)
    }

    pub fn product(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        self.left_mult(a).mul_vec(b)
    }

    pub fn same_field(&self, other: &Algebra) -> Result<()> {
        if self.p() == other.p() {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn opposite(&self) -> Algebra {
        let d = self.dim();
        let mut data = self.0.data.clone();
        data.mul = (0..d).map(|i| (0..d).map(|j| self.0.data.mul[j][i].clone()).collect()).collect();
        Algebra::build(data)
    }

    pub fn is_commutative(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| self.0.data.mul[i][j] == self.0.data.mul[j][i]))
    }

    /// The ground field as a one-dimensional algebra.
    pub fn field(p: u32) -> Algebra {
        Algebra::validate(AlgebraData { p, dim: 1, basis: vec!["1".into()], unit: vec![1], mul: vec![vec![vec![1]]] })
            .expect("prime field")
    }

    /// `F_p[x]/(x^n)` in the monomial basis.
    pub fn truncated_poly(p: u32, n: usize) -> Algebra {
        assert!(n >= 1);
        let basis = (0..n).map(monomial_label).collect();
        let mul = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut v = vec![0; n];
                        if i + j < n {
                            v[i + j] = 1;
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        Algebra::validate(AlgebraData { p, dim: n, basis, unit: unit_vector(n, 0), mul }).expect("truncated polynomial algebra")
    }

    /// Upper-triangular `n x n` matrices, basis `e_ij` with `i <= j` in row-major order.
    pub fn triangular(p: u32, n: usize) -> Algebra {
        assert!(n >= 1);
        let idx: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let d = idx.len();
        let pos = |a: usize, b: usize| idx.iter().position(|&e| e == (a, b)).unwrap();
        let basis = idx.iter().map(|(i, j)| format!("e{}{}", i + 1, j + 1)).collect();
        let mut unit = vec![0; d];
        for i in 0..n {
            unit[pos(i, i)] = 1;
        }
        let mul = idx
            .iter()
            .map(|&(i, j)| {
                idx.iter()
                    .map(|&(k, l)| {
                        let mut v = vec![0; d];
                        if j == k {
                            v[pos(i, l)] = 1;
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        Algebra::validate(AlgebraData { p, dim: d, basis, unit, mul }).expect("triangular algebra")
    }

    /// `A (x) B` with basis `a_i (x) b_j` at index `i * dim B + j`.
    pub fn tensor(a: &Algebra, b: &Algebra) -> Result<Algebra> {
        a.same_field(b)?;
        let (da, db) = (a.dim(), b.dim());
        let d = da * db;
        let p = a.p();
        let basis = (0..d).map(|k| format!("{}*{}", a.labels()[k / db], b.labels()[k % db])).collect();
        let unit = kron(p, a.unit(), b.unit());
        let mul = (0..d)
            .map(|x| {
                (0..d)
                    .map(|y| kron(p, &a.0.data.mul[x / db][y / db], &b.0.data.mul[x % db][y % db]))
                    .collect()
            })
            .collect();
        Algebra::validate(AlgebraData { p, dim: d, basis, unit, mul })
    }

    /// `A x B` with the basis of `A` followed by the basis of `B`.
    pub fn product_of(a: &Algebra, b: &Algebra) -> Result<Algebra> {
        a.same_field(b)?;
        let (da, db) = (a.dim(), b.dim());
        let d = da + db;
        let basis = a.labels().iter().map(|s| format!("{s}_1")).chain(b.labels().iter().map(|s| format!("{s}_2"))).collect();
        let unit = a.unit().iter().chain(b.unit()).copied().collect();
        let mul = (0..d)
            .map(|x| {
                (0..d)
                    .map(|y| {
                        let mut v = vec![0; d];
                        if x < da && y < da {
                            v[..da].copy_from_slice(&a.0.data.mul[x][y]);
                        } else if x >= da && y >= da {
                            v[da..].copy_from_slice(&b.0.data.mul[x - da][y - da]);
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        Algebra::validate(AlgebraData { p: a.p(), dim: d, basis, unit, mul })
    }
}

fn monomial_label(i: usize) -> String {
    match i {
        0 => "1".into(),
        1 => "x".into(),
        _ => format!("x^{i}"),
    }
}

pub fn unit_vector(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn kron(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| linalg::mul(p, x, y))).collect()
}

/// `sum_k a_k mats[k]`.
pub(crate) fn combine(p: u32, n: usize, a: &[u32], mats: &[Matrix]) -> Matrix {
    let mut out = Matrix::zeros(p, n, n);
    for (k, &c) in a.iter().enumerate() {
        if c != 0 {
            out = out.add(&mats[k].scale(c));
        }
    }
    out
}

pub fn tensor_algebra(a: &Algebra, b: &Algebra) -> Result<Algebra> {
    Algebra::tensor(a, b)
}

pub fn product_algebra(a: &Algebra, b: &Algebra) -> Result<Algebra> {
    Algebra::product_of(a, b)
}

pub fn truncated_poly(p: u32, n: usize) -> Algebra {
    Algebra::truncated_poly(p, n)
}

pub fn triangular(p: u32, n: usize) -> Algebra {
    Algebra::triangular(p, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dual_numbers_data(xx: u32) -> AlgebraData {
        AlgebraData {
            p: 2,
            dim: 2,
            basis: vec!["1".into(), "x".into()],
            unit: vec![1, 0],
            mul: vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![xx, 0]]],
        }
    }

    #[test]
    fn validates_textbook_and_group_algebra() {
        assert!(Algebra::validate(dual_numbers_data(0)).is_ok());
        assert!(Algebra::validate(dual_numbers_data(1)).is_ok());
    }

    #[test]
    fn rejects_broken_triple() {
        let mut d = dual_numbers_data(0);
        d.basis.push("y".into());
        d.dim = 3;
        d.unit = vec![1, 0, 0];
        // x*y = y but y*... left zero, makes (x x) y = 0 vs x (x y) = y
        d.mul = vec![
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
            vec![vec![0, 1, 0], vec![0, 0, 0], vec![0, 0, 1]],
            vec![vec![0, 0, 1], vec![0, 0, 0], vec![0, 0, 0]],
        ];
        assert!(matches!(Algebra::validate(d), Err(Error::NonAssociative(..))));
    }

    #[test]
    fn rejects_bad_unit_and_shape() {
        let mut d = dual_numbers_data(0);
        d.unit = vec![0, 1];
        assert!(matches!(Algebra::validate(d), Err(Error::UnitFailure(_))));
        let mut d = dual_numbers_data(0);
        d.mul.pop();
        assert!(matches!(Algebra::validate(d), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn opposite_is_involution() {
        let t = Algebra::triangular(3, 2);
        assert_eq!(t.opposite().opposite().data(), t.data());
        assert_ne!(t.opposite(), t);
        let a = Algebra::truncated_poly(2, 2);
        assert_eq!(a.opposite(), a);
    }

    #[test]
    fn constructor_dimensions() {
        let a = Algebra::truncated_poly(2, 2);
        assert_eq!(Algebra::tensor(&a, &a).unwrap().dim(), 4);
        assert_eq!(Algebra::triangular(2, 3).dim(), 6);
        assert_eq!(Algebra::product_of(&a, &Algebra::triangular(2, 2)).unwrap().dim(), 5);
        assert!(Algebra::tensor(&a, &Algebra::truncated_poly(3, 2)).is_err());
    }

    #[test]
    fn regular_left_action_of_x() {
        let a = Algebra::truncated_poly(2, 2);
        assert_eq!(a.left(1), &Matrix::from_rows(2, 2, 2, &[vec![0, 0], vec![1, 0]]));
    }
}
