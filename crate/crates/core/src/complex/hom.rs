use super::{ChainMap, Complex, Homology};
use crate::algebra::Algebra;
use crate::linalg::Matrix;
use crate::linsys::{term, LinearProblem};
use crate::module::{HomSpace, Module};
use crate::par;
use std::collections::BTreeMap;

struct Block {
    i: i64,
    space: HomSpace,
    offset: usize,
}

/// `Hom(M, N)` as a complex of vector spaces, with the coordinates of each degree.
///
/// Degree `k` is `⊕_i Hom(M_i, N_{i+k})`, blocks ordered by `i`, and the
/// differential is `d(f) = d^N f - (-1)^k f d^M`.
pub struct HomComplex {
    pub src: Complex,
    pub tgt: Complex,
    pub cx: Complex,
    blocks: BTreeMap<i64, Vec<Block>>,
}

pub fn hom_complex(m: &Complex, n: &Complex) -> HomComplex {
    let p = m.p();
    let field = Algebra::field(p);
    if m.mods.is_empty() || n.mods.is_empty() {
        return HomComplex { src: m.clone(), tgt: n.clone(), cx: Complex::zero(&field), blocks: BTreeMap::new() };
    }
    let (klo, khi) = (n.lo - m.hi(), n.hi() - m.lo);
    let degrees: Vec<i64> = (klo..=khi).collect();
    let built = par::map(degrees.clone(), |k| {
        let mut off = 0;
        let mut blocks = Vec::new();
        for i in m.lo..=m.hi() {
            if i + k < n.lo || i + k > n.hi() {
                continue;
            }
            let space = HomSpace::new(&m.module(i), &n.module(i + k)).expect("same algebra");
            let dim = space.dim();
            blocks.push(Block { i, space, offset: off });
            off += dim;
        }
        (blocks, off)
    });
    let mut blocks = BTreeMap::new();
    let mut dims = BTreeMap::new();
    for (k, (b, total)) in degrees.iter().zip(built) {
        blocks.insert(*k, b);
        dims.insert(*k, total);
    }
    let diffs = par::map((klo + 1..=khi).collect(), |k| {
        let rows = dims[&(k - 1)];
        let mut cols = Vec::with_capacity(dims[&k]);
        for b in &blocks[&k] {
            let dn = n.d(b.i + k);
            let dm = m.d(b.i + 1);
            for t in 0..b.space.dim() {
                let f = b.space.basis_matrix(t);
                let mut v = vec![0u32; rows];
                for tb in &blocks[&(k - 1)] {
                    let img = if tb.i == b.i {
                        dn.mul(&f)
                    } else if tb.i == b.i + 1 {
                        f.mul(&dm).signed(k + 1)
                    } else {
                        continue;
                    };
                    for (j, x) in tb.space.coords(&img).into_iter().enumerate() {
                        v[tb.offset + j] = x;
                    }
                }
                cols.push(v);
            }
        }
        Matrix::from_cols(p, rows, &cols)
    });
    let mods = (klo..=khi).map(|k| Module::free(&field, dims[&k])).collect();
    let cx = Complex::raw(&field, klo, mods, diffs);
    HomComplex { src: m.clone(), tgt: n.clone(), cx, blocks }
}

impl HomComplex {
    pub fn dim(&self, k: i64) -> usize {
        self.cx.dim(k)
    }

    /// Coordinates of a graded map of degree `k`.
    pub fn coords(&self, f: &ChainMap) -> Vec<u32> {
        let k = f.deg;
        let mut v = vec![0u32; self.dim(k)];
        if let Some(bs) = self.blocks.get(&k) {
            for b in bs {
                for (j, x) in b.space.coords(&f.comp(b.i)).into_iter().enumerate() {
                    v[b.offset + j] = x;
                }
            }
        }
        v
    }

    pub fn element(&self, k: i64, v: &[u32]) -> ChainMap {
        let p = self.src.p();
        let bs = self.blocks.get(&k);
        ChainMap::from_fn(&self.src, &self.tgt, k, |i| {
            if let Some(b) = bs.and_then(|bs| bs.iter().find(|b| b.i == i)) {
                b.space.to_matrix(&v[b.offset..b.offset + b.space.dim()])
            } else {
                Matrix::zeros(p, self.tgt.dim(i + k), self.src.dim(i))
            }
        })
    }

    /// `H^n = H_{-n}` of the Hom complex.
    pub fn cohomology(&self, n: i64) -> Homology {
        self.cx.homology(-n)
    }

    pub fn cohomology_dim(&self, n: i64) -> usize {
        self.cx.homology_dim(-n)
    }

    /// Representative cocycles of `H^n`, as graded maps of degree `-n`.
    pub fn cocycles(&self, n: i64) -> Vec<ChainMap> {
        let h = self.cohomology(n);
        (0..h.dim).map(|c| self.element(-n, &h.reps.col(c))).collect()
    }

    /// Classes in `H^n` of the given degree `-n` cycles, one column each.
    pub fn classes(&self, n: i64, maps: &[ChainMap]) -> Matrix {
        let cols: Vec<Vec<u32>> = maps.iter().map(|f| self.coords(f)).collect();
        let z = Matrix::from_cols(self.src.p(), self.dim(-n), &cols);
        self.cohomology(n).coords(&z)
    }
}

/// A degree `n + 1` map `κ` with `d(κ) = φ - ψ`, or `None` if none exists.
///
/// The returned homotopy has all free coordinates of the linear system set to zero.
pub fn solve_homotopy(phi: &ChainMap, psi: &ChainMap) -> Option<ChainMap> {
    solve_homotopy_on(phi, psi, phi.src.lo, phi.src.hi())
}

/// As [`solve_homotopy`], imposing `d(κ)_i = φ_i - ψ_i` only for `i` in `[lo, hi]`.
///
/// Used on brutal truncations of unbounded complexes, where the boundary
/// degrees carry artefacts of the truncation.
pub fn solve_homotopy_on(phi: &ChainMap, psi: &ChainMap, lo: i64, hi: i64) -> Option<ChainMap> {
    assert_eq!(phi.deg, psi.deg);
    let (m, n) = (&phi.src, &phi.tgt);
    let k = phi.deg + 1;
    let p = m.p();
    if m.mods.is_empty() || n.mods.is_empty() {
        return phi.sub(psi).is_zero().then(|| ChainMap::zero(m, n, k));
    }
    let mut lp = LinearProblem::new(p);
    let mut unk = BTreeMap::new();
    for i in m.lo..=m.hi() {
        if n.dim(i + k) > 0 && m.dim(i) > 0 {
            unk.insert(i, lp.unknown(&m.module(i), &n.module(i + k)).expect("same algebra"));
        }
    }
    let diff = phi.sub(psi);
    for i in lo.max(m.lo)..=hi.min(m.hi()) {
        let rhs = diff.comp(i);
        if rhs.rows() == 0 || rhs.cols() == 0 {
            continue;
        }
        let mut terms = Vec::new();
        if let Some(&u) = unk.get(&i) {
            terms.push(term(u).left(n.d(i + k)));
        }
        if let Some(&u) = unk.get(&(i - 1)) {
            terms.push(term(u).right(m.d(i)).scaled(crate::linalg::sign(p, k + 1)));
        }
        if terms.is_empty() {
            if !rhs.is_zero() {
                return None;
            }
            continue;
        }
        lp.equation(terms, rhs);
    }
    let sol = lp.solve()?;
    Some(ChainMap::from_fn(m, n, k, |i| match unk.get(&i) {
        Some(&u) => sol[u].clone(),
        None => Matrix::zeros(p, n.dim(i + k), m.dim(i)),
    }))
}

/// Contractible iff the identity is null-homotopic.
pub fn is_contractible(c: &Complex) -> bool {
    let id = ChainMap::identity(c);
    solve_homotopy(&id, &ChainMap::zero(c, c, 0)).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::cone;

    fn periodic(alg: &Algebra, len: usize) -> Complex {
        let a = Module::regular(alg);
        Complex::new(alg, 0, vec![a; len], vec![alg.left(1).clone(); len - 1]).unwrap()
    }

    #[test]
    fn hom_of_simple() {
        let alg = Algebra::truncated_poly(2, 2);
        let k = crate::module::cokernel(&crate::module::ModMap::new(&Module::regular(&alg), &Module::regular(&alg), alg.left(1).clone()).unwrap()).0;
        let c = Complex::concentrated(&k, 0);
        let h = hom_complex(&c, &c);
        assert_eq!(h.cx.total_dim(), 1);
        assert_eq!(h.cohomology_dim(0), 1);
    }

    #[test]
    fn hom_differential_squares_to_zero() {
        let alg = Algebra::truncated_poly(3, 3);
        let c = {
            let a = Module::regular(&alg);
            let x = alg.left(1).clone();
            let x2 = alg.left(2).clone();
            Complex::new(&alg, 0, vec![a.clone(), a.clone(), a], vec![x, x2]).unwrap()
        };
        let h = hom_complex(&c, &c.shift(1));
        for k in h.cx.lo()..=h.cx.hi() {
            assert!(h.cx.d(k - 1).mul(&h.cx.d(k)).is_zero());
        }
    }

    #[test]
    fn differential_matches_formula() {
        let alg = Algebra::truncated_poly(3, 2);
        let c = periodic(&alg, 3);
        let h = hom_complex(&c, &c);
        for k in h.cx.lo() + 1..=h.cx.hi() {
            for t in 0..h.dim(k) {
                let mut v = vec![0; h.dim(k)];
                v[t] = 1;
                let f = h.element(k, &v);
                let via_cx = h.cx.d(k).mul_vec(&v);
                assert_eq!(h.coords(&f.boundary()), via_cx);
            }
        }
    }

    #[test]
    fn periodic_exact_but_not_contractible() {
        let alg = Algebra::truncated_poly(2, 2);
        let c = periodic(&alg, 6);
        assert!(c.is_exact_on(1, 4));
        let id = ChainMap::identity(&c);
        assert!(solve_homotopy_on(&id, &ChainMap::zero(&c, &c, 0), 1, 4).is_none());
    }

    #[test]
    fn cone_identity_contractible() {
        let alg = Algebra::truncated_poly(2, 2);
        let c = periodic(&alg, 3);
        let k = cone(&ChainMap::identity(&c)).unwrap();
        let h = solve_homotopy(&ChainMap::identity(&k.cx), &ChainMap::zero(&k.cx, &k.cx, 0)).unwrap();
        assert_eq!(h.boundary(), ChainMap::identity(&k.cx));
    }

    #[test]
    fn self_homotopy_is_zero() {
        let alg = Algebra::truncated_poly(2, 2);
        let c = periodic(&alg, 3);
        let id = ChainMap::identity(&c);
        assert!(solve_homotopy(&id, &id).unwrap().is_zero());
    }
}
