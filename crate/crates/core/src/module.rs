//! Finitely generated left modules and their homomorphisms.

use crate::algebra::{combine, unit_vector, Algebra};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Span};
use rand::Rng;
use std::fmt;
use std::sync::Arc;

struct Inner {
    alg: Algebra,
    dim: usize,
    action: Vec<Matrix>,
    free_rank: Option<usize>,
}

/// A left module: one action matrix per algebra basis element, acting on columns.
///
/// Modules built by [`Module::free`] remember their rank; their basis is the
/// block basis `e_k g_j` at index `j * dim A + k`.
#[derive(Clone)]
pub struct Module(Arc<Inner>);

impl PartialEq for Module {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.dim == other.0.dim && self.0.alg == other.0.alg && self.0.action == other.0.action)
    }
}
impl Eq for Module {}

impl fmt::Debug for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.free_rank {
            Some(r) => write!(f, "Module(free rank {r}, dim {})", self.0.dim),
            None => write!(f, "Module(dim {})", self.0.dim),
        }
    }
}

impl Module {
    /// Validate action matrices against the structure constants.
    pub fn new(alg: &Algebra, dim: usize, action: Vec<Matrix>) -> Result<Module> {
        let d = alg.dim();
        if action.len() != d {
            return Err(Error::ShapeMismatch(format!("{} action matrices for an algebra of dimension {d}", action.len())));
        }
        for (i, a) in action.iter().enumerate() {
            if a.shape() != (dim, dim) || a.p() != alg.p() {
                return Err(Error::ShapeMismatch(format!("action[{i}] has shape {:?}, expected {dim}x{dim}", a.shape())));
            }
        }
        let m = Module::raw(alg, dim, action, None);
        m.check_axioms()?;
        Ok(m)
    }

    pub(crate) fn raw(alg: &Algebra, dim: usize, action: Vec<Matrix>, free_rank: Option<usize>) -> Module {
        Module(Arc::new(Inner { alg: alg.clone(), dim, action, free_rank }))
    }

    fn check_axioms(&self) -> Result<()> {
        let alg = &self.0.alg;
        let d = alg.dim();
        if !self.act_elem(alg.unit()).is_identity() {
            return Err(Error::ValidationError("unit does not act as the identity".into()));
        }
        for i in 0..d {
            for j in 0..d {
                let lhs = self.0.action[i].mul(&self.0.action[j]);
                let rhs = self.act_elem(&alg.data().mul[i][j]);
                if lhs != rhs {
                    return Err(Error::ValidationError(format!("action does not respect e_{i} * e_{j}")));
                }
            }
        }
        Ok(())
    }

    pub fn zero(alg: &Algebra) -> Module {
        Module::raw(alg, 0, vec![Matrix::zeros(alg.p(), 0, 0); alg.dim()], Some(0))
    }

    pub fn regular(alg: &Algebra) -> Module {
        Module::free(alg, 1)
    }

    pub fn free(alg: &Algebra, r: usize) -> Module {
        let p = alg.p();
        let action = (0..alg.dim())
            .map(|i| {
                let l = alg.left(i);
                Matrix::block_diag(p, &vec![l; r])
            })
            .collect();
        Module::raw(alg, r * alg.dim(), action, Some(r))
    }

    pub fn algebra(&self) -> &Algebra {
        &self.0.alg
    }
    pub fn p(&self) -> u32 {
        self.0.alg.p()
    }
    pub fn dim(&self) -> usize {
        self.0.dim
    }
    pub fn is_zero(&self) -> bool {
        self.0.dim == 0
    }
    pub fn action(&self, i: usize) -> &Matrix {
        &self.0.action[i]
    }
    pub fn actions(&self) -> &[Matrix] {
        &self.0.action
    }
    pub fn free_rank(&self) -> Option<usize> {
        self.0.free_rank
    }

    /// Action of an arbitrary algebra element.
    pub fn act_elem(&self, a: &[u32]) -> Matrix {
        combine(self.p(), self.0.dim, a, &self.0.action)
    }

    /// Generators of a free module, one column per block.
    pub fn free_generators(&self) -> Option<Matrix> {
        let r = self.0.free_rank?;
        let d = self.0.alg.dim();
        let unit = self.0.alg.unit();
        let mut g = Matrix::zeros(self.p(), self.0.dim, r);
        for j in 0..r {
            for k in 0..d {
                g.set(j * d + k, j, unit[k]);
            }
        }
        Some(g)
    }

    pub fn same_algebra(&self, other: &Module) -> Result<()> {
        if self.0.alg == other.0.alg {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    /// Does `f: self -> cod` intertwine the actions?
    pub fn is_hom_to(&self, cod: &Module, f: &Matrix) -> bool {
        f.shape() == (cod.dim(), self.dim())
            && (0..self.0.alg.dim()).all(|i| f.mul(self.action(i)) == cod.action(i).mul(f))
    }

    /// Submodule spanned by the columns of `basis` (which must be invariant).
    pub fn submodule(&self, basis: &Matrix) -> Module {
        let action = self
            .0
            .action
            .iter()
            .map(|a| basis.solve(&a.mul(basis)).expect("subspace is not invariant"))
            .collect();
        Module::raw(&self.0.alg, basis.cols(), action, if basis.cols() == 0 { Some(0) } else { None })
    }

    /// Quotient by an invariant subspace, with its projection.
    ///
    /// The complement is spanned by the standard basis vectors not already in
    /// the span of `sub`, taken in index order.
    pub fn quotient(&self, sub: &Matrix) -> (Module, Matrix) {
        let p = self.p();
        let m = self.dim();
        let mut span = Span::new(p, m);
        for c in 0..sub.cols() {
            span.insert(&sub.col(c));
        }
        let k = span.dim();
        let mut comp = Vec::new();
        for i in 0..m {
            if span.insert(&unit_vector(m, i)) {
                comp.push(unit_vector(m, i));
            }
        }
        let sub_basis = sub.image();
        let e = Matrix::from_cols(p, m, &comp);
        let b = Matrix::hstack(p, m, &[&sub_basis, &e]);
        let binv = b.inverse().expect("extended basis is invertible");
        let proj = binv.submatrix(k, m, 0, m);
        let action = self.0.action.iter().map(|a| proj.mul(&a.mul(&e))).collect();
        (Module::raw(&self.0.alg, m - k, action, if m == k { Some(0) } else { None }), proj)
    }

    /// Smallest submodule containing the given vectors.
    pub fn closure(&self, vecs: &[Vec<u32>]) -> Span {
        let mut span = Span::new(self.p(), self.dim());
        let mut queue: Vec<Vec<u32>> = Vec::new();
        for v in vecs {
            if span.insert(v) {
                queue.push(v.clone());
            }
        }
        while let Some(v) = queue.pop() {
            for a in &self.0.action {
                let w = a.mul_vec(&v);
                if span.insert(&w) {
                    queue.push(w);
                }
            }
        }
        span
    }

    pub fn direct_sum(mods: &[Module]) -> DirectSum {
        assert!(!mods.is_empty());
        let alg = mods[0].algebra().clone();
        let p = alg.p();
        let dims: Vec<usize> = mods.iter().map(|m| m.dim()).collect();
        let total: usize = dims.iter().sum();
        let action = (0..alg.dim())
            .map(|i| Matrix::block_diag(p, &mods.iter().map(|m| m.action(i)).collect::<Vec<_>>()))
            .collect();
        let free_rank = mods.iter().map(|m| m.free_rank()).sum::<Option<usize>>();
        let module = Module::raw(&alg, total, action, free_rank);
        let mut inj = Vec::new();
        let mut proj = Vec::new();
        let mut off = 0;
        for &d in &dims {
            let mut i = Matrix::zeros(p, total, d);
            i.paste(off, 0, &Matrix::identity(p, d));
            proj.push(i.transpose());
            inj.push(i);
            off += d;
        }
        DirectSum { module, inj, proj }
    }
}

pub struct DirectSum {
    pub module: Module,
    pub inj: Vec<Matrix>,
    pub proj: Vec<Matrix>,
}

/// A module homomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMap {
    pub dom: Module,
    pub cod: Module,
    pub matrix: Matrix,
}

impl ModMap {
    pub fn new(dom: &Module, cod: &Module, matrix: Matrix) -> Result<ModMap> {
        dom.same_algebra(cod)?;
        if matrix.shape() != (cod.dim(), dom.dim()) {
            return Err(Error::ShapeMismatch(format!("map matrix {:?}, expected {}x{}", matrix.shape(), cod.dim(), dom.dim())));
        }
        if !dom.is_hom_to(cod, &matrix) {
            return Err(Error::NotAMorphism("matrix does not intertwine the actions".into()));
        }
        Ok(ModMap { dom: dom.clone(), cod: cod.clone(), matrix })
    }

    pub fn identity(m: &Module) -> ModMap {
        ModMap { dom: m.clone(), cod: m.clone(), matrix: Matrix::identity(m.p(), m.dim()) }
    }

    pub fn zero(dom: &Module, cod: &Module) -> ModMap {
        ModMap { dom: dom.clone(), cod: cod.clone(), matrix: Matrix::zeros(dom.p(), cod.dim(), dom.dim()) }
    }

    pub fn compose(&self, first: &ModMap) -> ModMap {
        ModMap { dom: first.dom.clone(), cod: self.cod.clone(), matrix: self.matrix.mul(&first.matrix) }
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn is_valid(&self) -> bool {
        self.dom.is_hom_to(&self.cod, &self.matrix)
    }
}

/// Kernel with its inclusion; the basis is in reduced column echelon form.
pub fn kernel(f: &ModMap) -> (Module, ModMap) {
    let k = f.matrix.kernel();
    let sub = f.dom.submodule(&k);
    let inc = ModMap { dom: sub.clone(), cod: f.dom.clone(), matrix: k };
    (sub, inc)
}

pub fn image(f: &ModMap) -> (Module, ModMap) {
    let im = f.matrix.image();
    let sub = f.cod.submodule(&im);
    let inc = ModMap { dom: sub.clone(), cod: f.cod.clone(), matrix: im };
    (sub, inc)
}

pub fn cokernel(f: &ModMap) -> (Module, ModMap) {
    let (q, proj) = f.cod.quotient(&f.matrix);
    let pm = ModMap { dom: f.cod.clone(), cod: q.clone(), matrix: proj };
    (q, pm)
}

/// How generators of a free cover are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum CoverStrategy {
    /// Basis vectors outside the submodule generated so far, largest cyclic
    /// submodule first, then thinned and merged.
    Greedy,
    /// Keep every basis vector.
    AllBasis,
    /// The greedy generators with the first one repeated, so every cover has
    /// a free summand in its kernel.
    Redundant,
}

/// A free module mapping onto `M`, with the kernel of that map.
#[derive(Clone, Debug)]
pub struct FreeCover {
    pub free: Module,
    /// The chosen generators, as columns in `M`.
    pub gens: Matrix,
    pub pi: Matrix,
    pub kernel: Module,
    pub iota: Matrix,
}

/// The map `A^r -> N` sending the `j`th generator to column `j` of `images`.
pub fn free_map(free: &Module, target: &Module, images: &Matrix) -> Matrix {
    let r = free.free_rank().expect("free source");
    assert_eq!(images.shape(), (target.dim(), r));
    let d = free.algebra().dim();
    let mut out = Matrix::zeros(target.p(), target.dim(), r * d);
    for j in 0..r {
        let u = images.col(j);
        for k in 0..d {
            let v = target.action(k).mul_vec(&u);
            for (row, x) in v.into_iter().enumerate() {
                out.set(row, j * d + k, x);
            }
        }
    }
    out
}

pub fn free_cover_with(m: &Module, strategy: CoverStrategy) -> FreeCover {
    let alg = m.algebra();
    let p = m.p();
    let n = m.dim();
    if let (CoverStrategy::Greedy, Some(r)) = (strategy, m.free_rank()) {
        // recorded generators: greedy scanning over-covers when the unit is not a basis vector
        let gens = m.free_generators().unwrap();
        let free = Module::free(alg, r);
        let pi = free_map(&free, m, &gens);
        let kernel = free.submodule(&Matrix::zeros(p, free.dim(), 0));
        return FreeCover { free, gens, pi, kernel, iota: Matrix::zeros(p, n, 0) };
    }
    let kept: Vec<Vec<u32>> = match strategy {
        CoverStrategy::Greedy => greedy_generators(m),
        CoverStrategy::AllBasis => (0..n).map(|b| unit_vector(n, b)).collect(),
        CoverStrategy::Redundant => {
            let mut g = greedy_generators(m);
            if let Some(first) = g.first().cloned() {
                g.push(first);
            }
            g
        }
    };
    let r = kept.len();
    let gens = Matrix::from_cols(p, n, &kept);
    let free = Module::free(alg, r);
    let pi = free_map(&free, m, &gens);
    let kmat = pi.kernel();
    let kernel = free.submodule(&kmat);
    FreeCover { free, gens, pi, kernel, iota: kmat }
}

/// `Σ A v` over the given vectors; `A v` is spanned by the `e_i v`.
fn generated(m: &Module, vecs: &[&Vec<u32>]) -> Span {
    let mut span = Span::new(m.p(), m.dim());
    for v in vecs {
        for a in m.actions() {
            span.insert(&a.mul_vec(v));
        }
    }
    span
}

/// Basis vectors with the largest cyclic submodules first, thinned to an
/// irredundant set, then merged pairwise where a sum still generates. Merging
/// matters over non-local algebras, where one generator can cover several
/// indecomposable summands of the top.
fn greedy_generators(m: &Module) -> Vec<Vec<u32>> {
    let n = m.dim();
    let mut order: Vec<(usize, Vec<u32>)> = (0..n)
        .map(|b| {
            let e = unit_vector(n, b);
            (generated(m, &[&e]).dim(), e)
        })
        .collect();
    order.sort_by(|x, y| y.0.cmp(&x.0));
    let mut kept: Vec<Vec<u32>> = Vec::new();
    let mut span = Span::new(m.p(), n);
    for (_, e) in order {
        if span.dim() == n {
            break;
        }
        if !span.contains(&e) {
            for a in m.actions() {
                span.insert(&a.mul_vec(&e));
            }
            kept.push(e);
        }
    }
    let spans = |vs: &[Vec<u32>]| generated(m, &vs.iter().collect::<Vec<_>>()).dim() == n;
    let mut i = kept.len();
    while i > 0 {
        i -= 1;
        let mut rest = kept.clone();
        rest.remove(i);
        if spans(&rest) {
            kept = rest;
        }
    }
    let p = m.p();
    'merge: loop {
        for i in 0..kept.len() {
            for j in i + 1..kept.len() {
                let s: Vec<u32> = kept[i].iter().zip(&kept[j]).map(|(&x, &y)| crate::linalg::add(p, x, y)).collect();
                let mut trial = kept.clone();
                trial.remove(j);
                trial[i] = s;
                if spans(&trial) {
                    kept = trial;
                    continue 'merge;
                }
            }
        }
        break;
    }
    kept
}

pub fn free_cover(m: &Module) -> FreeCover {
    free_cover_with(m, CoverStrategy::Greedy)
}

/// Solve for a module map `A^r -> N` (given by generator images) subject to
/// `X * b = c`. Returns the generator images.
pub fn solve_free_map_right(free: &Module, target: &Module, b: &Matrix, c: &Matrix) -> Option<Matrix> {
    let r = free.free_rank().expect("free source");
    let n = target.dim();
    let d = free.algebra().dim();
    let p = target.p();
    assert_eq!(b.rows(), r * d);
    assert_eq!(c.shape(), (n, b.cols()));
    let cols = b.cols();
    // unknown (j, s): generator j maps to e_s; its map sends e_k g_j to action[k][:, s]
    let mut sys = Matrix::zeros(p, n * cols, r * n);
    for j in 0..r {
        for s in 0..n {
            let unk = j * n + s;
            for k in 0..d {
                let a = target.action(k);
                for col in 0..cols {
                    let coef = b.get(j * d + k, col);
                    if coef == 0 {
                        continue;
                    }
                    for row in 0..n {
                        let x = a.get(row, s);
                        if x != 0 {
                            let idx = row * cols + col;
                            let cur = sys.get(idx, unk);
                            sys.set(idx, unk, crate::linalg::add(p, cur, crate::linalg::mul(p, coef, x)));
                        }
                    }
                }
            }
        }
    }
    let rhs = Matrix::from_fn(p, n * cols, 1, |idx, _| c.get(idx / cols, idx % cols));
    let sol = sys.solve(&rhs)?;
    Some(Matrix::from_fn(p, n, r, |s, j| sol.get(j * n + s, 0)))
}

/// `Hom_A(M, N)`, parametrised by the images of a fixed generating set of `M`.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub src: Module,
    pub tgt: Module,
    gens: Matrix,
    free: Module,
    section: Matrix,
    /// Basis of admissible generator-image vectors, as columns.
    basis: Matrix,
    free_src: bool,
}

impl HomSpace {
    pub fn new(src: &Module, tgt: &Module) -> Result<HomSpace> {
        src.same_algebra(tgt)?;
        let p = src.p();
        let n = tgt.dim();
        if let Some(r) = src.free_rank() {
            return Ok(HomSpace {
                src: src.clone(),
                tgt: tgt.clone(),
                gens: src.free_generators().unwrap(),
                free: src.clone(),
                section: Matrix::identity(p, src.dim()),
                basis: Matrix::identity(p, r * n),
                free_src: true,
            });
        }
        let cover = free_cover(src);
        let r = cover.gens.cols();
        let d = src.algebra().dim();
        let kdim = cover.iota.cols();
        // constraint: the induced map on the free module kills the kernel
        let mut sys = Matrix::zeros(p, n * kdim, r * n);
        for j in 0..r {
            for s in 0..n {
                let unk = j * n + s;
                for k in 0..d {
                    let a = tgt.action(k);
                    for col in 0..kdim {
                        let coef = cover.iota.get(j * d + k, col);
                        if coef == 0 {
                            continue;
                        }
                        for row in 0..n {
                            let x = a.get(row, s);
                            if x != 0 {
                                let idx = row * kdim + col;
                                let cur = sys.get(idx, unk);
                                sys.set(idx, unk, crate::linalg::add(p, cur, crate::linalg::mul(p, coef, x)));
                            }
                        }
                    }
                }
            }
        }
        let basis = sys.kernel();
        let section = cover.pi.solve(&Matrix::identity(p, src.dim())).expect("cover is surjective");
        Ok(HomSpace { src: src.clone(), tgt: tgt.clone(), gens: cover.gens, free: cover.free, section, basis, free_src: false })
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    fn map_of_images(&self, images: &Matrix) -> Matrix {
        if self.free_src {
            free_map(&self.free, &self.tgt, images)
        } else {
            free_map(&self.free, &self.tgt, images).mul(&self.section)
        }
    }

    /// The map with the given coordinates in this basis.
    pub fn to_matrix(&self, coords: &[u32]) -> Matrix {
        self.from_flat(&self.basis.mul_vec(coords))
    }

    fn from_flat(&self, v: &[u32]) -> Matrix {
        let n = self.tgt.dim();
        let r = self.gens.cols();
        let images = Matrix::from_fn(self.src.p(), n, r, |s, j| v[j * n + s]);
        self.map_of_images(&images)
    }

    pub fn basis_matrix(&self, t: usize) -> Matrix {
        self.from_flat(&self.basis.col(t))
    }

    pub fn basis_maps(&self) -> Vec<Matrix> {
        (0..self.dim()).map(|t| self.basis_matrix(t)).collect()
    }

    /// Coordinates of a homomorphism in this basis.
    pub fn coords(&self, f: &Matrix) -> Vec<u32> {
        let images = f.mul(&self.gens);
        let n = self.tgt.dim();
        let r = self.gens.cols();
        let v: Vec<u32> = (0..r * n).map(|idx| images.get(idx % n, idx / n)).collect();
        if self.free_src {
            return v;
        }
        let x = self.basis.solve(&Matrix::column_vector(self.src.p(), &v)).expect("not a homomorphism of the stated modules");
        x.col(0)
    }

    /// Coordinates of several maps, one column each.
    pub fn coords_matrix(&self, maps: &[Matrix]) -> Matrix {
        let cols: Vec<Vec<u32>> = maps.iter().map(|f| self.coords(f)).collect();
        Matrix::from_cols(self.src.p(), self.dim(), &cols)
    }
}

/// Basis of `Hom_A(M, N)` as a list of matrices.
pub fn hom_space(m: &Module, n: &Module) -> Result<Vec<ModMap>> {
    let h = HomSpace::new(m, n)?;
    Ok(h.basis_maps().into_iter().map(|f| ModMap { dom: m.clone(), cod: n.clone(), matrix: f }).collect())
}

/// A splitting of the free cover of a projective module.
#[derive(Clone, Debug)]
pub struct ProjectiveWitness {
    pub cover: FreeCover,
    pub section: Matrix,
}

/// `Some` exactly when the free cover splits; the section satisfies `pi * s = id`.
pub fn is_projective(m: &Module) -> Option<ProjectiveWitness> {
    let p = m.p();
    let cover = free_cover(m);
    let kdim = cover.kernel.dim();
    let retraction = if kdim == 0 {
        Matrix::zeros(p, 0, cover.free.dim())
    } else {
        let images = solve_free_map_right(&cover.free, &cover.kernel, &cover.iota, &Matrix::identity(p, kdim))?;
        free_map(&cover.free, &cover.kernel, &images)
    };
    let e = Matrix::identity(p, cover.free.dim()).sub(&cover.iota.mul(&retraction));
    let sigma = cover.pi.solve(&Matrix::identity(p, m.dim())).expect("cover is surjective");
    let section = e.mul(&sigma);
    debug_assert!(cover.pi.mul(&section).is_identity());
    Some(ProjectiveWitness { cover, section })
}

/// `D(M) = Hom_k(M, k)` as a module over the opposite algebra.
pub fn linear_dual(m: &Module) -> Module {
    let op = m.algebra().opposite();
    let action = m.actions().iter().map(|a| a.transpose()).collect();
    Module::raw(&op, m.dim(), action, None)
}

/// `M* = Hom_A(M, A)` as a left module over the opposite algebra.
#[derive(Clone, Debug)]
pub struct StarDual {
    pub module: Module,
    pub hom: HomSpace,
}

pub fn star_dual(m: &Module) -> StarDual {
    let alg = m.algebra();
    let op = alg.opposite();
    let hom = HomSpace::new(m, &Module::regular(alg)).expect("same algebra");
    let k = hom.dim();
    let basis = hom.basis_maps();
    let action = (0..alg.dim())
        .map(|i| {
            let imgs: Vec<Matrix> = basis.iter().map(|phi| alg.right(i).mul(phi)).collect();
            hom.coords_matrix(&imgs)
        })
        .collect::<Vec<_>>();
    let module = Module::raw(&op, k, action, m.free_rank());
    StarDual { module, hom }
}

/// `f*: Y* -> X*` for `f: X -> Y`.
pub fn star_dual_map(f: &Matrix, dx: &StarDual, dy: &StarDual) -> Matrix {
    let imgs: Vec<Matrix> = dy.hom.basis_maps().iter().map(|phi| phi.mul(f)).collect();
    dx.hom.coords_matrix(&imgs)
}

/// `M`, its star dual, its double dual, and the evaluation map `M -> M**`.
#[derive(Clone, Debug)]
pub struct Bidual {
    pub star: StarDual,
    pub double: StarDual,
    pub eval: Matrix,
}

pub fn bidual(m: &Module) -> Bidual {
    let star = star_dual(m);
    let double = star_dual(&star.module);
    let phis = star.hom.basis_maps();
    let p = m.p();
    let d = m.algebra().dim();
    let cols: Vec<Vec<u32>> = (0..m.dim())
        .map(|b| {
            let e = unit_vector(m.dim(), b);
            let ev = Matrix::from_cols(p, d, &phis.iter().map(|phi| phi.mul_vec(&e)).collect::<Vec<_>>());
            double.hom.coords(&ev)
        })
        .collect();
    let eval = Matrix::from_cols(p, double.module.dim(), &cols);
    Bidual { star, double, eval }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsoVerdict {
    Isomorphic,
    NotIsomorphic,
    Unknown,
}

/// Budgeted search for an invertible element of `Hom(M, N)`.
///
/// Exhaustive (hence decisive) when `p^{dim Hom} <= budget`; otherwise a
/// failed random search reports `Unknown`.
pub fn isomorphism_test<R: Rng>(m: &Module, n: &Module, budget: usize, rng: &mut R) -> IsoVerdict {
    if m.same_algebra(n).is_err() || m.dim() != n.dim() {
        return IsoVerdict::NotIsomorphic;
    }
    if m.dim() == 0 {
        return IsoVerdict::Isomorphic;
    }
    let h = HomSpace::new(m, n).unwrap();
    let hmm = HomSpace::new(m, m).unwrap();
    if h.dim() != hmm.dim() || h.dim() == 0 {
        return IsoVerdict::NotIsomorphic;
    }
    let p = m.p() as usize;
    let k = h.dim();
    let exhaustive = (k as f64) * (p as f64).log2() <= (budget as f64).log2();
    if exhaustive {
        let total = p.pow(k as u32);
        for idx in 1..total {
            let mut c = vec![0u32; k];
            let mut x = idx;
            for slot in c.iter_mut() {
                *slot = (x % p) as u32;
                x /= p;
            }
            if h.to_matrix(&c).rank() == m.dim() {
                return IsoVerdict::Isomorphic;
            }
        }
        return IsoVerdict::NotIsomorphic;
    }
    for _ in 0..budget {
        let c: Vec<u32> = (0..k).map(|_| rng.gen_range(0..p as u32)).collect();
        if h.to_matrix(&c).rank() == m.dim() {
            return IsoVerdict::Isomorphic;
        }
    }
    IsoVerdict::Unknown
}
