//! Linear systems whose unknowns are module homomorphisms.
//!
//! Every unknown ranges over a fixed basis of a Hom space, and every equation
//! is a sum of terms `L X R` equal to a known matrix. Solutions set all free
//! coordinates to zero, which makes them deterministic.

use crate::error::Result;
use crate::linalg::Matrix;
use crate::module::{HomSpace, Module};

pub struct Term {
    pub left: Option<Matrix>,
    pub unknown: usize,
    pub right: Option<Matrix>,
    pub scale: u32,
}

pub struct Equation {
    pub terms: Vec<Term>,
    pub rhs: Matrix,
}

pub struct LinearProblem {
    p: u32,
    spaces: Vec<HomSpace>,
    equations: Vec<Equation>,
}

impl LinearProblem {
    pub fn new(p: u32) -> Self {
        LinearProblem { p, spaces: Vec::new(), equations: Vec::new() }
    }

    /// Register an unknown homomorphism `src -> tgt`; returns its index.
    pub fn unknown(&mut self, src: &Module, tgt: &Module) -> Result<usize> {
        self.spaces.push(HomSpace::new(src, tgt)?);
        Ok(self.spaces.len() - 1)
    }

    pub fn space(&self, u: usize) -> &HomSpace {
        &self.spaces[u]
    }

    pub fn equation(&mut self, terms: Vec<Term>, rhs: Matrix) {
        self.equations.push(Equation { terms, rhs });
    }

    fn layout(&self) -> (Vec<usize>, usize, Vec<usize>, usize) {
        let mut col_off = Vec::new();
        let mut c = 0;
        for s in &self.spaces {
            col_off.push(c);
            c += s.dim();
        }
        let mut row_off = Vec::new();
        let mut r = 0;
        for e in &self.equations {
            row_off.push(r);
            r += e.rhs.rows() * e.rhs.cols();
        }
        (col_off, c, row_off, r)
    }

    fn system(&self) -> (Matrix, Matrix) {
        let p = self.p;
        let (col_off, ncols, row_off, nrows) = self.layout();
        let mut a = Matrix::zeros(p, nrows, ncols);
        let mut b = Matrix::zeros(p, nrows, 1);
        for (ei, e) in self.equations.iter().enumerate() {
            let cols = e.rhs.cols();
            for r in 0..e.rhs.rows() {
                for c in 0..cols {
                    b.set(row_off[ei] + r * cols + c, 0, e.rhs.get(r, c));
                }
            }
            for t in &e.terms {
                let space = &self.spaces[t.unknown];
                for bi in 0..space.dim() {
                    let mut x = space.basis_matrix(bi);
                    if let Some(l) = &t.left {
                        x = l.mul(&x);
                    }
                    if let Some(rm) = &t.right {
                        x = x.mul(rm);
                    }
                    if t.scale != 1 {
                        x = x.scale(t.scale);
                    }
                    assert_eq!(x.shape(), e.rhs.shape(), "term shape disagrees with right-hand side");
                    let col = col_off[t.unknown] + bi;
                    for r in 0..x.rows() {
                        for c in 0..cols {
                            let v = x.get(r, c);
                            if v != 0 {
                                let row = row_off[ei] + r * cols + c;
                                let cur = a.get(row, col);
                                a.set(row, col, crate::linalg::add(p, cur, v));
                            }
                        }
                    }
                }
            }
        }
        (a, b)
    }

    /// The zero-free-variable solution, one matrix per unknown.
    pub fn solve(&self) -> Option<Vec<Matrix>> {
        let (a, b) = self.system();
        let x = a.solve(&b)?;
        let (col_off, _, _, _) = self.layout();
        Some(
            self.spaces
                .iter()
                .enumerate()
                .map(|(u, s)| {
                    let coords: Vec<u32> = (0..s.dim()).map(|k| x.get(col_off[u] + k, 0)).collect();
                    s.to_matrix(&coords)
                })
                .collect(),
        )
    }
}

pub fn term(unknown: usize) -> Term {
    Term { left: None, unknown, right: None, scale: 1 }
}

impl Term {
    pub fn left(mut self, l: Matrix) -> Self {
        self.left = Some(l);
        self
    }
    pub fn right(mut self, r: Matrix) -> Self {
        self.right = Some(r);
        self
    }
    pub fn scaled(mut self, s: u32) -> Self {
        self.scale = s;
        self
    }
}
