//! Bounded complexes of modules, graded homomorphisms and homology.
//!
//! Indexing is homological: `d(n): C_n -> C_{n-1}`. Cohomological degrees are
//! `H^n = H_{-n}`.

mod hom;
mod lazy;
mod ses;

pub use hom::{hom_complex, is_contractible, solve_homotopy, solve_homotopy_on, HomComplex};
pub use lazy::LazyComplex;
pub use ses::{connecting_hom, connecting_with, factor_through_cone, theta, ConeFactorization, SplitSES};

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Span};
use crate::module::Module;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    alg: Algebra,
    lo: i64,
    mods: Vec<Module>,
    /// `diffs[k] = d(lo + k)`; `diffs[0]` maps into the zero module.
    diffs: Vec<Matrix>,
}

impl Complex {
    /// `diffs[k]` is `d(lo + k + 1)`, so there is one fewer differential than modules.
    pub fn new(alg: &Algebra, lo: i64, mods: Vec<Module>, diffs: Vec<Matrix>) -> Result<Complex> {
        if !mods.is_empty() && diffs.len() + 1 != mods.len() {
            return Err(Error::ShapeMismatch(format!("{} modules need {} differentials, got {}", mods.len(), mods.len() - 1, diffs.len())));
        }
        for m in &mods {
            if m.algebra() != alg {
                return Err(Error::AlgebraMismatch);
            }
        }
        let c = Complex::raw(alg, lo, mods, diffs);
        c.check()?;
        Ok(c)
    }

    pub(crate) fn raw(alg: &Algebra, lo: i64, mods: Vec<Module>, diffs: Vec<Matrix>) -> Complex {
        let p = alg.p();
        let mut all = Vec::with_capacity(mods.len());
        if let Some(m0) = mods.first() {
            all.push(Matrix::zeros(p, 0, m0.dim()));
        }
        all.extend(diffs);
        Complex { alg: alg.clone(), lo, mods, diffs: all }
    }

    /// Build from per-degree closures on `[lo, hi]`; `d(n)` is asked for `lo < n <= hi`.
    pub(crate) fn from_fn(alg: &Algebra, lo: i64, hi: i64, m: impl Fn(i64) -> Module, d: impl Fn(i64) -> Matrix) -> Complex {
        if hi < lo {
            return Complex::zero(alg);
        }
        let mods = (lo..=hi).map(&m).collect();
        let diffs = (lo + 1..=hi).map(d).collect();
        Complex::raw(alg, lo, mods, diffs)
    }

    fn check(&self) -> Result<()> {
        for n in self.lo..=self.hi() {
            let d = self.d(n);
            let (src, tgt) = (self.module(n), self.module(n - 1));
            if d.shape() != (tgt.dim(), src.dim()) {
                return Err(Error::ValidationError(format!("differential in degree {n} has shape {:?}", d.shape())));
            }
            if !src.is_hom_to(&tgt, &d) {
                return Err(Error::ValidationError(format!("differential in degree {n} is not a module map")));
            }
            if !self.d(n - 1).mul(&d).is_zero() {
                return Err(Error::ValidationError(format!("d(d) != 0 in degree {n}")));
            }
        }
        Ok(())
    }

    pub fn zero(alg: &Algebra) -> Complex {
        Complex { alg: alg.clone(), lo: 0, mods: Vec::new(), diffs: Vec::new() }
    }

    /// `M` placed in degree `n`.
    pub fn concentrated(m: &Module, n: i64) -> Complex {
        Complex::raw(m.algebra(), n, vec![m.clone()], Vec::new())
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }
    pub fn p(&self) -> u32 {
        self.alg.p()
    }
    pub fn lo(&self) -> i64 {
        self.lo
    }
    pub fn hi(&self) -> i64 {
        self.lo + self.mods.len() as i64 - 1
    }

    fn index(&self, n: i64) -> Option<usize> {
        if n >= self.lo && n <= self.hi() {
            Some((n - self.lo) as usize)
        } else {
            None
        }
    }

    pub fn module(&self, n: i64) -> Module {
        match self.index(n) {
            Some(k) => self.mods[k].clone(),
            None => Module::zero(&self.alg),
        }
    }

    pub fn dim(&self, n: i64) -> usize {
        self.index(n).map_or(0, |k| self.mods[k].dim())
    }

    /// `d(n): C_n -> C_{n-1}`, zero outside the stored window.
    pub fn d(&self, n: i64) -> Matrix {
        match self.index(n) {
            Some(k) if k > 0 => self.diffs[k].clone(),
            _ => Matrix::zeros(self.p(), self.dim(n - 1), self.dim(n)),
        }
    }

    /// Least degree with a nonzero module (`None` for the zero complex).
    pub fn inf(&self) -> Option<i64> {
        (self.lo..=self.hi()).find(|&n| self.dim(n) > 0)
    }

    pub fn sup(&self) -> Option<i64> {
        (self.lo..=self.hi()).rev().find(|&n| self.dim(n) > 0)
    }

    pub fn total_dim(&self) -> usize {
        self.mods.iter().map(|m| m.dim()).sum()
    }

    pub fn is_free(&self) -> bool {
        self.mods.iter().all(|m| m.free_rank().is_some())
    }

    pub fn homology(&self, n: i64) -> Homology {
        Homology::new(&self.d(n), &self.d(n + 1))
    }

    pub fn homology_dim(&self, n: i64) -> usize {
        let z = self.dim(n) - self.d(n).rank();
        z - self.d(n + 1).rank()
    }

    pub fn homology_inf(&self) -> Option<i64> {
        (self.lo..=self.hi()).find(|&n| self.homology_dim(n) > 0)
    }

    pub fn homology_sup(&self) -> Option<i64> {
        (self.lo..=self.hi()).rev().find(|&n| self.homology_dim(n) > 0)
    }

    pub fn is_exact(&self) -> bool {
        (self.lo..=self.hi()).all(|n| self.homology_dim(n) == 0)
    }

    pub fn is_exact_on(&self, lo: i64, hi: i64) -> bool {
        (lo..=hi).all(|n| self.homology_dim(n) == 0)
    }

    /// `C_n = Coker d(n+1)` with its projection from the degree-`n` module.
    pub fn coker_at(&self, n: i64) -> (Module, Matrix) {
        self.module(n).quotient(&self.d(n + 1))
    }

    /// `Σ^i C`: degree `n` holds `C_{n-i}` and differentials pick up `(-1)^i`.
    pub fn shift(&self, i: i64) -> Complex {
        let diffs = self.diffs.iter().map(|d| d.signed(i)).collect();
        Complex { alg: self.alg.clone(), lo: self.lo + i, mods: self.mods.clone(), diffs }
    }

    /// Brutal truncation to the degrees in `[a, b]`.
    pub fn restrict(&self, a: i64, b: i64) -> Complex {
        let a = a.max(self.lo);
        let b = b.min(self.hi());
        Complex::from_fn(&self.alg, a, b, |n| self.module(n), |n| self.d(n))
    }

    /// `C_{>=n}`.
    pub fn truncate_above(&self, n: i64) -> Complex {
        self.restrict(n, self.hi())
    }

    /// `C_{<=n}`.
    pub fn truncate_below(&self, n: i64) -> Complex {
        self.restrict(self.lo, n)
    }

    /// The same complex stored on a window covering `[a, b]` (padding with zeros).
    pub fn padded(&self, a: i64, b: i64) -> Complex {
        let (a, b) = if self.mods.is_empty() { (a, b) } else { (a.min(self.lo), b.max(self.hi())) };
        Complex::from_fn(&self.alg, a, b, |n| self.module(n), |n| self.d(n))
    }

    /// Drop zero modules at both ends.
    pub fn trimmed(&self) -> Complex {
        match (self.inf(), self.sup()) {
            (Some(a), Some(b)) => self.restrict(a, b),
            _ => Complex::zero(&self.alg),
        }
    }

    pub fn direct_sum(parts: &[Complex]) -> (Complex, Vec<ChainMap>, Vec<ChainMap>) {
        assert!(!parts.is_empty());
        let alg = parts[0].alg.clone();
        let p = alg.p();
        let nonempty: Vec<&Complex> = parts.iter().filter(|c| !c.mods.is_empty()).collect();
        let lo = nonempty.iter().map(|c| c.lo).min().unwrap_or(0);
        let hi = nonempty.iter().map(|c| c.hi()).max().unwrap_or(-1);
        let sum = Complex::from_fn(
            &alg,
            lo,
            hi,
            |n| Module::direct_sum(&parts.iter().map(|c| c.module(n)).collect::<Vec<_>>()).module,
            |n| Matrix::block_diag(p, &parts.iter().map(|c| c.d(n)).collect::<Vec<_>>().iter().collect::<Vec<_>>()),
        );
        let mut inj = Vec::new();
        let mut proj = Vec::new();
        for (j, c) in parts.iter().enumerate() {
            let block = |n: i64| {
                let off: usize = parts[..j].iter().map(|q| q.dim(n)).sum();
                let mut m = Matrix::zeros(p, sum.dim(n), c.dim(n));
                m.paste(off, 0, &Matrix::identity(p, c.dim(n)));
                m
            };
            inj.push(ChainMap::from_fn(c, &sum, 0, block));
            proj.push(ChainMap::from_fn(&sum, c, 0, |n| block(n).transpose()));
        }
        (sum, inj, proj)
    }
}

/// Cycles, boundaries and a fixed set of homology representatives.
#[derive(Clone, Debug)]
pub struct Homology {
    pub dim: usize,
    pub cycles: Matrix,
    pub boundaries: Matrix,
    /// Representatives of a basis of homology, as columns.
    pub reps: Matrix,
    /// `[boundaries | reps]`, a basis of the cycles.
    frame: Matrix,
}

impl Homology {
    /// Homology at the middle of `. --in--> . --out--> .`.
    pub fn new(out: &Matrix, inc: &Matrix) -> Homology {
        let p = out.p();
        let n = out.cols();
        let cycles = out.kernel();
        let boundaries = inc.image();
        let mut span = Span::new(p, n);
        for c in 0..boundaries.cols() {
            span.insert(&boundaries.col(c));
        }
        let mut reps = Vec::new();
        for c in 0..cycles.cols() {
            let v = cycles.col(c);
            if span.insert(&v) {
                reps.push(v);
            }
        }
        let reps = Matrix::from_cols(p, n, &reps);
        let frame = Matrix::hstack(p, n, &[&boundaries, &reps]);
        Homology { dim: reps.cols(), cycles, boundaries, reps, frame }
    }

    /// Homology classes of the given cycles (columns), as coordinate columns.
    pub fn coords(&self, z: &Matrix) -> Matrix {
        let x = self.frame.solve(z).expect("vector is not a cycle");
        let b = self.boundaries.cols();
        x.submatrix(b, b + self.dim, 0, z.cols())
    }

    pub fn is_cycle_boundary(&self, z: &[u32]) -> bool {
        self.boundaries.solve(&Matrix::column_vector(self.frame.p(), z)).is_some()
    }
}

/// A graded homomorphism `src -> tgt` of degree `deg`: `comp(i): src_i -> tgt_{i+deg}`.
///
/// Nothing forces it to commute with the differentials; see [`ChainMap::is_chain_map`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub src: Complex,
    pub tgt: Complex,
    pub deg: i64,
    comps: Vec<Matrix>,
}

impl ChainMap {
    pub fn from_fn(src: &Complex, tgt: &Complex, deg: i64, f: impl Fn(i64) -> Matrix) -> ChainMap {
        let comps = (src.lo..=src.hi())
            .map(|i| {
                let m = f(i);
                assert_eq!(m.shape(), (tgt.dim(i + deg), src.dim(i)), "component {i} has wrong shape");
                m
            })
            .collect();
        ChainMap { src: src.clone(), tgt: tgt.clone(), deg, comps }
    }

    /// Validating constructor: every component must be a module map.
    pub fn new(src: &Complex, tgt: &Complex, deg: i64, comps: impl Fn(i64) -> Matrix) -> Result<ChainMap> {
        let mut mats = Vec::new();
        for i in src.lo..=src.hi() {
            let m = comps(i);
            if m.shape() != (tgt.dim(i + deg), src.dim(i)) {
                return Err(Error::ShapeMismatch(format!("component {i} has shape {:?}", m.shape())));
            }
            if !src.module(i).is_hom_to(&tgt.module(i + deg), &m) {
                return Err(Error::NotAMorphism(format!("component {i} is not a module map")));
            }
            mats.push(m);
        }
        Ok(ChainMap { src: src.clone(), tgt: tgt.clone(), deg, comps: mats })
    }

    pub fn zero(src: &Complex, tgt: &Complex, deg: i64) -> ChainMap {
        ChainMap::from_fn(src, tgt, deg, |i| Matrix::zeros(src.p(), tgt.dim(i + deg), src.dim(i)))
    }

    pub fn identity(c: &Complex) -> ChainMap {
        ChainMap::from_fn(c, c, 0, |i| Matrix::identity(c.p(), c.dim(i)))
    }

    pub fn comp(&self, i: i64) -> Matrix {
        if i >= self.src.lo && i <= self.src.hi() {
            return self.comps[(i - self.src.lo) as usize].clone();
        }
        Matrix::zeros(self.src.p(), self.tgt.dim(i + self.deg), self.src.dim(i))
    }

    /// `d(f) = d f - (-1)^|f| f d`, as a graded map of degree `deg - 1`.
    pub fn boundary(&self) -> ChainMap {
        let k = self.deg;
        ChainMap::from_fn(&self.src, &self.tgt, k - 1, |i| {
            let a = self.tgt.d(i + k).mul(&self.comp(i));
            let b = self.comp(i - 1).mul(&self.src.d(i)).signed(k);
            a.sub(&b)
        })
    }

    pub fn is_chain_map(&self) -> bool {
        (self.src.lo..=self.src.hi() + 1).all(|i| {
            let a = self.tgt.d(i + self.deg).mul(&self.comp(i));
            let b = self.comp(i - 1).mul(&self.src.d(i)).signed(self.deg);
            a == b
        })
    }

    pub fn is_morphism(&self) -> bool {
        self.deg == 0 && self.is_chain_map()
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ChainMap) -> ChainMap {
        ChainMap::from_fn(&first.src, &self.tgt, first.deg + self.deg, |i| self.comp(i + first.deg).mul(&first.comp(i)))
    }

    pub fn add(&self, other: &ChainMap) -> ChainMap {
        assert_eq!(self.deg, other.deg);
        ChainMap::from_fn(&self.src, &self.tgt, self.deg, |i| self.comp(i).add(&other.comp(i)))
    }

    pub fn sub(&self, other: &ChainMap) -> ChainMap {
        assert_eq!(self.deg, other.deg);
        ChainMap::from_fn(&self.src, &self.tgt, self.deg, |i| self.comp(i).sub(&other.comp(i)))
    }

    pub fn neg(&self) -> ChainMap {
        ChainMap::from_fn(&self.src, &self.tgt, self.deg, |i| self.comp(i).neg())
    }

    pub fn scale(&self, s: u32) -> ChainMap {
        ChainMap::from_fn(&self.src, &self.tgt, self.deg, |i| self.comp(i).scale(s))
    }

    pub fn is_zero(&self) -> bool {
        (self.src.lo..=self.src.hi()).all(|i| self.comp(i).is_zero())
    }

    /// Same components, reinterpreted between other complexes with the same modules.
    pub fn retarget(&self, src: &Complex, tgt: &Complex) -> ChainMap {
        ChainMap::from_fn(src, tgt, self.deg, |i| self.comp(i))
    }

    pub fn is_degreewise_surjective(&self) -> bool {
        (self.src.lo.min(self.tgt.lo - self.deg)..=self.src.hi().max(self.tgt.hi() - self.deg)).all(|i| self.comp(i).rank() == self.tgt.dim(i + self.deg))
    }

    pub fn is_degreewise_injective(&self) -> bool {
        (self.src.lo..=self.src.hi()).all(|i| self.comp(i).rank() == self.src.dim(i))
    }

    /// `H_n(f): H_n(src) -> H_{n+deg}(tgt)` in the chosen representatives.
    pub fn on_homology(&self, n: i64) -> Matrix {
        let hs = self.src.homology(n);
        let ht = self.tgt.homology(n + self.deg);
        ht.coords(&self.comp(n).mul(&hs.reps))
    }

    /// Degrees in which either side can have homology.
    fn joint_window(&self) -> (i64, i64) {
        (self.src.lo.min(self.tgt.lo - self.deg), self.src.hi().max(self.tgt.hi() - self.deg))
    }

    pub fn is_quasiiso(&self) -> bool {
        let (a, b) = self.joint_window();
        self.is_quasiiso_on(a, b)
    }

    /// `H_n(f)` bijective for `n` in `[a, b]`.
    pub fn is_quasiiso_on(&self, a: i64, b: i64) -> bool {
        (a..=b).all(|n| {
            let hs = self.src.homology_dim(n);
            let ht = self.tgt.homology_dim(n + self.deg);
            hs == ht && (hs == 0 || self.on_homology(n).rank() == hs)
        })
    }
}

/// `Cone(λ)_n = M_{n-1} ⊕ N_n` with `d(m, y) = (-dm, -λm + dy)`, plus the
/// canonical maps `N -> Cone(λ) -> ΣM`.
#[derive(Clone, Debug)]
pub struct Cone {
    pub cx: Complex,
    pub incl: ChainMap,
    pub proj: ChainMap,
}

pub fn cone(lambda: &ChainMap) -> Result<Cone> {
    if !lambda.is_morphism() {
        return Err(Error::NotAMorphism("cone needs a degree-0 chain map".into()));
    }
    Ok(cone_unchecked(lambda))
}

pub(crate) fn cone_unchecked(lambda: &ChainMap) -> Cone {
    let (m, n) = (&lambda.src, &lambda.tgt);
    let alg = n.algebra().clone();
    let p = alg.p();
    let (lo, hi) = span_of(&[(m.lo + 1, m.hi() + 1, m.mods.is_empty()), (n.lo, n.hi(), n.mods.is_empty())]);
    let cx = Complex::from_fn(
        &alg,
        lo,
        hi,
        |k| Module::direct_sum(&[m.module(k - 1), n.module(k)]).module,
        |k| {
            let (a, b) = (m.dim(k - 1), n.dim(k));
            let (a2, b2) = (m.dim(k - 2), n.dim(k - 1));
            let mut d = Matrix::zeros(p, a2 + b2, a + b);
            d.paste(0, 0, &m.d(k - 1).neg());
            d.paste(a2, 0, &lambda.comp(k - 1).neg());
            d.paste(a2, a, &n.d(k));
            d
        },
    );
    let sm = m.shift(1);
    let incl = ChainMap::from_fn(n, &cx, 0, |k| {
        let mut e = Matrix::zeros(p, cx.dim(k), n.dim(k));
        e.paste(m.dim(k - 1), 0, &Matrix::identity(p, n.dim(k)));
        e
    });
    let proj = ChainMap::from_fn(&cx, &sm, 0, |k| {
        let mut e = Matrix::zeros(p, m.dim(k - 1), cx.dim(k));
        e.paste(0, 0, &Matrix::identity(p, m.dim(k - 1)));
        e
    });
    Cone { cx, incl, proj }
}

/// Smallest window covering the given nonempty `(lo, hi, empty)` ranges.
pub(crate) fn span_of(ranges: &[(i64, i64, bool)]) -> (i64, i64) {
    let live: Vec<_> = ranges.iter().filter(|r| !r.2).collect();
    if live.is_empty() {
        return (0, -1);
    }
    (live.iter().map(|r| r.0).min().unwrap(), live.iter().map(|r| r.1).max().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dual_numbers() -> Algebra {
        Algebra::truncated_poly(2, 2)
    }

    /// `A --x--> A --x--> A` in degrees 2, 1, 0.
    fn periodic_piece(alg: &Algebra, len: usize) -> Complex {
        let a = Module::regular(alg);
        let x = alg.left(1).clone();
        Complex::new(alg, 0, vec![a; len], vec![x; len - 1]).unwrap()
    }

    #[test]
    fn shift_signs() {
        let alg = Algebra::truncated_poly(3, 2);
        let c = periodic_piece(&alg, 2);
        let s = c.shift(1);
        assert_eq!(s.lo(), 1);
        assert_eq!(s.d(2).get(1, 0), 2);
        assert_eq!(s.shift(-1), c);
    }

    #[test]
    fn periodic_homology() {
        let alg = dual_numbers();
        let c = periodic_piece(&alg, 5);
        for n in 1..4 {
            assert_eq!(c.homology_dim(n), 0);
        }
        assert_eq!(c.homology_dim(0), 1);
        assert_eq!(c.homology_dim(4), 1);
    }

    #[test]
    fn rejects_nonzero_square() {
        let alg = Algebra::truncated_poly(2, 3);
        let a = Module::regular(&alg);
        let x = alg.left(1).clone();
        let err = Complex::new(&alg, 0, vec![a.clone(), a.clone(), a], vec![x.clone(), x]).unwrap_err();
        assert!(matches!(err, Error::ValidationError(ref s) if s.contains("degree 2")));
    }

    #[test]
    fn cone_of_identity_is_exact() {
        let alg = dual_numbers();
        let c = periodic_piece(&alg, 3);
        let k = cone(&ChainMap::identity(&c)).unwrap();
        assert!(k.cx.is_exact());
        assert!(k.incl.is_morphism());
        assert!(k.proj.is_morphism());
    }

    #[test]
    fn quasiiso_iff_cone_exact() {
        let alg = dual_numbers();
        let a = Complex::concentrated(&Module::regular(&alg), 0);
        let x = ChainMap::from_fn(&a, &a, 0, |_| alg.left(1).clone());
        assert!(!x.is_quasiiso());
        assert!(!cone(&x).unwrap().cx.is_exact());
        let id = ChainMap::identity(&a);
        assert!(id.is_quasiiso());
        assert!(cone(&id).unwrap().cx.is_exact());
    }

    #[test]
    fn coker_of_exact_piece() {
        let alg = dual_numbers();
        let c = periodic_piece(&alg, 3);
        let (q, _) = c.coker_at(1);
        assert_eq!(q.dim(), 1);
    }

    #[test]
    fn direct_sum_maps() {
        let alg = dual_numbers();
        let c = periodic_piece(&alg, 3);
        let k = Complex::concentrated(&Module::free(&alg, 2), 5);
        let (s, inj, proj) = Complex::direct_sum(&[c.clone(), k]);
        assert_eq!((s.lo(), s.hi()), (0, 5));
        assert!(inj[0].is_morphism() && proj[0].is_morphism());
        assert!(proj[0].compose(&inj[0]) == ChainMap::identity(&c));
    }
}
