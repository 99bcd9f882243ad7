//! Gorenstein dimension, Gorenstein projective modules, complete resolutions
//! and special Gorenstein projective resolutions.
//!
//! Totally acyclic complexes are unbounded in both directions, so they are
//! represented lazily and only ever materialised on finite windows.

use crate::algebra::Algebra;
use crate::complex::{cone_unchecked, hom_complex, solve_homotopy_on, ChainMap, Complex, LazyComplex, SplitSES};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::linsys::{term, LinearProblem};
use crate::module::{bidual, linear_dual, CoverStrategy, Module};
use crate::resolution::{check_exact, horseshoe, lift_through, pd, Pd, Resolution};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

/// Default search bound for [`gorenstein_dimension`].
pub const DEFAULT_BOUND: usize = 8;

/// Self-injective dimensions of `A` on both sides, found as projective
/// dimensions of the linear duals of the regular modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GorensteinCertificate {
    pub algebra: Algebra,
    /// `id(_A A) = pd_{A^op} D(_A A)`.
    pub n_left: usize,
    /// `id(A_A) = pd_A D(A_A)`.
    pub n_right: usize,
    pub n: usize,
}

pub fn gorenstein_dimension(alg: &Algebra, bound: usize) -> Result<GorensteinCertificate> {
    let dual_pd = |m: &Module| -> Result<usize> {
        let res = Resolution::of_module(&linear_dual(m), CoverStrategy::Greedy);
        match pd(&res, None, bound) {
            Pd::Finite(k) => Ok(k.max(0) as usize),
            Pd::NegInfinity => Ok(0),
            _ => Err(Error::NotGorensteinWithin(bound)),
        }
    };
    let n_left = dual_pd(&Module::regular(alg))?;
    let n_right = dual_pd(&Module::regular(&alg.opposite()))?;
    Ok(GorensteinCertificate { algebra: alg.clone(), n_left, n_right, n: n_left.max(n_right) })
}

impl GorensteinCertificate {
    fn check(&self, alg: &Algebra) -> Result<()> {
        if *alg != self.algebra {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }
}

/// Gorenstein projective dimension of a complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gpd {
    /// Exact input.
    NegInfinity,
    Finite(i64),
}

impl fmt::Display for Gpd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gpd::NegInfinity => write!(f, "-inf"),
            Gpd::Finite(g) => write!(f, "{g}"),
        }
    }
}

/// `dim Ext^i(M, A)` for `i` in `[lo, hi]`, read off a resolution of `M`.
fn ext_into_regular(res: &Resolution, lo: i64, hi: i64) -> Vec<usize> {
    let alg = res.target().algebra();
    let a = Complex::concentrated(&Module::regular(alg), 0);
    let h = hom_complex(&res.complex(hi + 1), &a);
    (lo..=hi).map(|i| h.cohomology_dim(i)).collect()
}

/// Over a Gorenstein algebra of dimension `n`, `M` is Gorenstein projective
/// iff `Ext^i(M, A) = 0` for `1 <= i <= n`.
pub fn is_gorenstein_projective(m: &Module, cert: &GorensteinCertificate) -> Result<bool> {
    cert.check(m.algebra())?;
    if cert.n == 0 || m.is_zero() {
        return Ok(true);
    }
    let res = Resolution::of_module(m, CoverStrategy::Greedy);
    Ok(ext_into_regular(&res, 1, cert.n as i64).iter().all(|&d| d == 0))
}

/// Least `g` in `[sup H, sup H + n]` with `C_g(P)` Gorenstein projective.
pub(crate) fn gp_threshold(model: &FreeModel, cert: &GorensteinCertificate) -> Result<Option<i64>> {
    cert.check(model.target.algebra())?;
    let Some(s) = model.target.homology_sup() else { return Ok(None) };
    for g in s..=s + cert.n as i64 {
        let (c, _) = model.complex(g + 1)?.coker_at(g);
        if is_gorenstein_projective(&c, cert)? {
            return Ok(Some(g));
        }
    }
    Err(Error::CertificateViolated(format!("no Gorenstein projective cokernel in [{s}, {}]", s + cert.n as i64)))
}

pub fn gpd_module(m: &Module, cert: &GorensteinCertificate) -> Result<Gpd> {
    cert.check(m.algebra())?;
    if m.is_zero() {
        return Ok(Gpd::NegInfinity);
    }
    let res = Resolution::of_module(m, CoverStrategy::Greedy);
    let g = gp_threshold(&FreeModel::of(&res), cert)?.expect("nonzero module");
    // Independent characterisation: the largest nonvanishing Ext^i(M, A), i <= n.
    let ext = ext_into_regular(&res, 0, cert.n as i64);
    let top = (1..ext.len()).rev().find(|&i| ext[i] != 0).unwrap_or(0) as i64;
    if top != g {
        return Err(Error::CertificateViolated(format!("syzygy test gives {g}, Ext test gives {top}")));
    }
    Ok(Gpd::Finite(g))
}

pub fn gpd_complex(c: &Complex, cert: &GorensteinCertificate) -> Result<Gpd> {
    let res = Resolution::new(c, CoverStrategy::Greedy);
    Ok(gp_threshold(&FreeModel::of(&res), cert)?.map_or(Gpd::NegInfinity, Gpd::Finite))
}

type ModelFn = dyn Fn(i64) -> Result<(Complex, ChainMap)> + Send + Sync;

/// A bounded-below complex of free modules `P` with a quasiisomorphism `π: P -> M`,
/// available on windows `P_{<= hi}`.
#[derive(Clone)]
pub struct FreeModel {
    pub target: Complex,
    pub inf: Option<i64>,
    source: Arc<ModelFn>,
}

impl fmt::Debug for FreeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FreeModel").field("inf", &self.inf).finish_non_exhaustive()
    }
}

impl FreeModel {
    pub fn of(res: &Resolution) -> FreeModel {
        let r = res.clone();
        FreeModel { target: res.target().clone(), inf: res.inf(), source: Arc::new(move |hi| Ok(r.window(hi))) }
    }

    /// A model known only on degrees `<= top`, such as one row of a horseshoe.
    pub fn bounded(p: Complex, pi: ChainMap, top: i64) -> FreeModel {
        let target = pi.tgt.clone();
        let inf = p.inf();
        FreeModel {
            target,
            inf,
            source: Arc::new(move |hi| {
                if hi > top {
                    return Err(Error::WindowTooSmall(format!("model known up to degree {top}, {hi} requested")));
                }
                let c = if hi < p.lo() { Complex::zero(p.algebra()) } else { p.restrict(p.lo(), hi) };
                let pr = ChainMap::from_fn(&c, &pi.tgt, 0, |n| pi.comp(n));
                Ok((c, pr))
            }),
        }
    }

    pub fn window(&self, hi: i64) -> Result<(Complex, ChainMap)> {
        (self.source)(hi)
    }

    pub fn complex(&self, hi: i64) -> Result<Complex> {
        Ok(self.window(hi)?.0)
    }
}

/// A totally acyclic complex of free modules, materialised on demand.
#[derive(Clone)]
pub struct TotallyAcyclic {
    alg: Algebra,
    lazy: Arc<LazyComplex>,
}

impl fmt::Debug for TotallyAcyclic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TotallyAcyclic").field("computed", &self.lazy.computed()).finish()
    }
}

impl TotallyAcyclic {
    fn new(alg: &Algebra, builder: impl Fn(i64, i64) -> Result<Complex> + Send + Sync + 'static) -> Self {
        TotallyAcyclic { alg: alg.clone(), lazy: Arc::new(LazyComplex::new(builder)) }
    }

    pub fn zero(alg: &Algebra) -> Self {
        let a = alg.clone();
        TotallyAcyclic::new(alg, move |lo, hi| Ok(Complex::zero(&a).padded(lo, hi)))
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    /// The brutal truncation to `[lo, hi]`, computing it if needed.
    pub fn window(&self, lo: i64, hi: i64) -> Result<Complex> {
        self.lazy.extend_and_window(lo, hi)
    }

    pub fn computed(&self) -> Option<(i64, i64)> {
        self.lazy.computed()
    }

    /// `Σ^s T`.
    pub fn shifted(&self, s: i64) -> TotallyAcyclic {
        let inner = self.clone();
        TotallyAcyclic::new(&self.alg, move |lo, hi| Ok(inner.window(lo - s, hi - s)?.shift(s)))
    }

    /// Check that `T` and `Hom(T, A)` are exact away from the window ends.
    pub fn verify(&self, lo: i64, hi: i64) -> Result<()> {
        let w = self.window(lo, hi)?;
        if let Some(i) = (lo + 1..hi).find(|&i| w.homology_dim(i) != 0) {
            return Err(Error::CertificateViolated(format!("T has homology in degree {i}")));
        }
        let a = Complex::concentrated(&Module::regular(&self.alg), 0);
        let h = hom_complex(&w, &a);
        if let Some(i) = (lo + 1..hi).find(|&i| h.cohomology_dim(i) != 0) {
            return Err(Error::CertificateViolated(format!("Hom(T, A) is not exact at T_{i}")));
        }
        Ok(())
    }
}

pub(crate) fn right_inverse(q: &Matrix) -> Matrix {
    q.solve(&Matrix::identity(q.p(), q.rows())).expect("surjective map")
}

/// A module map `X: src -> tgt` with `X r = rhs`.
pub(crate) fn solve_right(src: &Module, tgt: &Module, r: &Matrix, rhs: &Matrix) -> Option<Matrix> {
    let p = src.p();
    let zero = Matrix::zeros(p, tgt.dim(), src.dim());
    if src.dim() == 0 || tgt.dim() == 0 || r.cols() == 0 {
        return (zero.mul(r) == *rhs).then_some(zero);
    }
    let mut lp = LinearProblem::new(p);
    let u = lp.unknown(src, tgt).ok()?;
    lp.equation(vec![term(u).right(r.clone())], rhs.clone());
    lp.solve().map(|mut v| v.remove(0))
}

/// Sum of two modules that keeps a summand unchanged when the other is zero.
pub(crate) fn sum2(a: &Module, b: &Module) -> Module {
    if b.dim() == 0 {
        a.clone()
    } else if a.dim() == 0 {
        b.clone()
    } else {
        Module::direct_sum(&[a.clone(), b.clone()]).module
    }
}

/// `[[a, b], [c, d]]`, with `None` for zero blocks of the implied shape.
pub(crate) fn block2(p: u32, rows: (usize, usize), cols: (usize, usize), m: [[Option<&Matrix>; 2]; 2]) -> Matrix {
    let mut out = Matrix::zeros(p, rows.0 + rows.1, cols.0 + cols.1);
    let (ro, co) = ([0, rows.0], [0, cols.0]);
    for (i, row) in m.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            if let Some(b) = b {
                out.paste(ro[i], co[j], b);
            }
        }
    }
    out
}

/// The dual `Hom(Q_j, A^op) -> Hom(Q_{j+1}, A^op)` of a map of free
/// `A^op`-modules, as a map `A^{r_tgt} -> A^{r_src}` of free `A`-modules.
fn dual_map(alg: &Algebra, dmat: &Matrix, r_src: usize, r_tgt: usize) -> Matrix {
    let (p, d) = (alg.p(), alg.dim());
    let gens = Module::free(alg, r_src).free_generators().expect("free");
    let img = dmat.mul(&gens);
    let mut out = Matrix::zeros(p, r_src * d, r_tgt * d);
    for k in 0..r_src {
        for l in 0..r_tgt {
            let c: Vec<u32> = (0..d).map(|s| img.get(l * d + s, k)).collect();
            if c.iter().any(|&x| x != 0) {
                out.paste(k * d, l * d, &alg.right_mult(&c));
            }
        }
    }
    out
}

/// The totally acyclic complex agreeing with `P` in degrees `>= g`, whose
/// left half is the dual of a free resolution of `C_g(P)*`.
fn spliced(model: &FreeModel, g: i64) -> Result<TotallyAcyclic> {
    let alg = model.target.algebra().clone();
    let (p, d) = (alg.p(), alg.dim());
    let pg = model.complex(g + 1)?;
    let (gm, q) = pg.coker_at(g);
    let bid = bidual(&gm);
    if gm.dim() > 0 && bid.eval.inverse().is_none() {
        return Err(Error::BidualityNotIso);
    }
    let gs = bid.star;
    let qres = Resolution::of_module(&gs.module, CoverStrategy::Greedy);
    let (q0, qpi) = qres.window(0);
    let r0 = q0.dim(0) / d;
    let splice = if r0 == 0 {
        Matrix::zeros(p, 0, pg.dim(g))
    } else {
        let gens = q0.module(0).free_generators().expect("free");
        let img = qpi.comp(0).mul(&gens);
        let blocks: Vec<Matrix> = (0..r0).map(|k| gs.hom.to_matrix(&img.col(k)).mul(&q)).collect();
        Matrix::vstack(p, pg.dim(g), &blocks.iter().collect::<Vec<_>>())
    };
    let model = model.clone();
    let a = alg.clone();
    Ok(TotallyAcyclic::new(&alg, move |lo, hi| {
        let pc = if hi >= g { model.complex(hi)? } else { Complex::zero(&a) };
        let qc = qres.complex((g - 1 - lo).max(0));
        let rank = |j: i64| qc.dim(j) / d;
        let t = Complex::from_fn(
            &a,
            lo,
            hi,
            |i| if i >= g { pc.module(i) } else { Module::free(&a, rank(g - 1 - i)) },
            |i| {
                if i > g {
                    pc.d(i)
                } else if i == g {
                    splice.clone()
                } else {
                    dual_map(&a, &qc.d(g - i), rank(g - i), rank(g - 1 - i))
                }
            },
        );
        Ok(t)
    }))
}

/// A totally acyclic complex `T` of free modules with `C_0(T) = G`.
pub fn totally_acyclic_from_gp(gm: &Module, cert: &GorensteinCertificate) -> Result<TotallyAcyclic> {
    if !is_gorenstein_projective(gm, cert)? {
        return Err(Error::CertificateViolated("module is not Gorenstein projective".into()));
    }
    if gm.is_zero() {
        return Ok(TotallyAcyclic::zero(gm.algebra()));
    }
    spliced(&FreeModel::of(&Resolution::of_module(gm, CoverStrategy::Greedy)), 0)
}

/// Extend a degree-zero map, a morphism in degrees `>= n`, to a morphism on
/// the whole window by solving `X_i d^T_{i+1} = d^Q_{i+1} X_{i+1}` downwards.
///
/// Solvable when `T` is totally acyclic and `Q` is a complex of projectives.
pub fn extend_chain_map_down(partial: &ChainMap, n: i64) -> Result<ChainMap> {
    let (t, q) = (&partial.src, &partial.tgt);
    if partial.deg != 0 {
        return Err(Error::NotAMorphism("degree-zero map expected".into()));
    }
    for i in n + 1..=t.hi() {
        if q.d(i).mul(&partial.comp(i)) != partial.comp(i - 1).mul(&t.d(i)) {
            return Err(Error::NotAMorphism(format!("given part does not commute in degree {i}")));
        }
    }
    let mut comps = BTreeMap::new();
    for i in (t.lo()..n.min(t.hi() + 1)).rev() {
        let above = comps.get(&(i + 1)).cloned().unwrap_or_else(|| partial.comp(i + 1));
        let rhs = q.d(i + 1).mul(&above);
        let x = solve_right(&t.module(i), &q.module(i), &t.d(i + 1), &rhs)
            .ok_or_else(|| Error::SystemInfeasible(format!("no extension in degree {i}")))?;
        comps.insert(i, x);
    }
    Ok(ChainMap::from_fn(t, q, 0, |i| comps.get(&i).cloned().unwrap_or_else(|| partial.comp(i))))
}

/// A totally acyclic `T`, a free model `P -> M` and `τ: T -> P`, with `τ_i`
/// the identity for `i >= g`.
#[derive(Clone)]
pub struct CompleteResolution {
    pub target: Complex,
    pub gpd: Gpd,
    pub g: i64,
    pub p: FreeModel,
    pub t: TotallyAcyclic,
    tau_low: Arc<BTreeMap<i64, Matrix>>,
}

impl fmt::Debug for CompleteResolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompleteResolution").field("gpd", &self.gpd).field("g", &self.g).field("t", &self.t).finish()
    }
}

impl CompleteResolution {
    fn exact(model: &FreeModel) -> CompleteResolution {
        let alg = model.target.algebra();
        // A nonzero free model of an exact target is contractible, so it serves as its own T.
        let (g, t) = match model.inf {
            None => (0, TotallyAcyclic::zero(alg)),
            Some(inf) => {
                let m = model.clone();
                let a = alg.clone();
                let t = TotallyAcyclic::new(alg, move |lo, hi| {
                    let c = m.complex(hi)?;
                    if c.inf().is_none() || hi < c.lo() || lo > c.hi() {
                        return Ok(Complex::zero(&a).padded(lo, hi));
                    }
                    Ok(c.restrict(lo, hi).padded(lo, hi))
                });
                (inf, t)
            }
        };
        CompleteResolution {
            target: model.target.clone(),
            gpd: Gpd::NegInfinity,
            g,
            p: model.clone(),
            t,
            tau_low: Arc::new(BTreeMap::new()),
        }
    }

    pub fn algebra(&self) -> &Algebra {
        self.target.algebra()
    }

    pub fn t_window(&self, lo: i64, hi: i64) -> Result<Complex> {
        self.t.window(lo, hi)
    }

    /// `P` brutally truncated to `[lo, hi]`, with the components of `π`.
    pub fn p_window(&self, lo: i64, hi: i64) -> Result<(Complex, ChainMap)> {
        let (pc, pi) = self.p.window(hi)?;
        let w = pc.restrict(lo, hi).padded(lo, hi);
        let pw = ChainMap::from_fn(&w, &self.target, 0, |n| pi.comp(n));
        Ok((w, pw))
    }

    /// The finitely many components of `τ` below `g`.
    pub fn tau_low(&self) -> &BTreeMap<i64, Matrix> {
        &self.tau_low
    }

    fn tau_comp(&self, i: i64, tdim: usize, pdim: usize) -> Matrix {
        let p = self.target.p();
        if i >= self.g {
            assert_eq!(tdim, pdim, "T and P differ in degree {i} >= g");
            Matrix::identity(p, tdim)
        } else {
            self.tau_low.get(&i).cloned().unwrap_or_else(|| Matrix::zeros(p, pdim, tdim))
        }
    }

    pub fn tau_window(&self, lo: i64, hi: i64) -> Result<ChainMap> {
        let tw = self.t_window(lo, hi)?;
        let (pw, _) = self.p_window(lo, hi)?;
        Ok(ChainMap::from_fn(&tw, &pw, 0, |i| self.tau_comp(i, tw.dim(i), pw.dim(i))))
    }

    /// Check the defining properties on the window `[lo, hi]`.
    pub fn verify(&self, lo: i64, hi: i64) -> Result<()> {
        self.t.verify(lo, hi)?;
        let tw = self.t_window(lo, hi)?;
        let (pw, _) = self.p_window(lo, hi)?;
        for i in self.g.max(lo)..=hi {
            if tw.module(i) != pw.module(i) {
                return Err(Error::CertificateViolated(format!("T_{i} differs from P_{i}")));
            }
            if i > self.g.max(lo) && tw.d(i) != pw.d(i) {
                return Err(Error::CertificateViolated(format!("T and P differentials differ in degree {i}")));
            }
        }
        if !self.tau_window(lo, hi)?.is_morphism() {
            return Err(Error::CertificateViolated("τ is not a morphism".into()));
        }
        Ok(())
    }
}

/// Complete resolution of `M` built on a given free model, with `g` the least
/// Gorenstein projective cokernel.
pub fn complete_resolution_on(model: &FreeModel, cert: &GorensteinCertificate) -> Result<CompleteResolution> {
    let Some(g) = gp_threshold(model, cert)? else { return Ok(CompleteResolution::exact(model)) };
    let t = spliced(model, g)?;
    let lo = model.inf.expect("nonexact target");
    let tw = t.window(lo, g)?;
    let pw = model.complex(g)?.padded(lo, g);
    let p = tw.p();
    let partial = ChainMap::from_fn(&tw, &pw, 0, |i| {
        if i == g {
            Matrix::identity(p, tw.dim(g))
        } else {
            Matrix::zeros(p, pw.dim(i), tw.dim(i))
        }
    });
    let tau = extend_chain_map_down(&partial, g)?;
    let tau_low = (lo..g).map(|i| (i, tau.comp(i))).collect();
    Ok(CompleteResolution { target: model.target.clone(), gpd: Gpd::Finite(g), g, p: model.clone(), t, tau_low: Arc::new(tau_low) })
}

pub fn complete_resolution(m: &Complex, cert: &GorensteinCertificate, strategy: CoverStrategy) -> Result<CompleteResolution> {
    cert.check(m.algebra())?;
    complete_resolution_on(&FreeModel::of(&Resolution::new(m, strategy)), cert)
}

/// A complete resolution with `τ` degreewise surjective, obtained by adding
/// the contractible `C = Cone(id)` on `X = P_{[t, g-1]}`; `C_n = X_n ⊕ X_{n+1}`.
#[derive(Clone, Debug)]
pub struct Surjectified {
    pub cr: CompleteResolution,
    pub base: CompleteResolution,
    pub x: Complex,
    pub cone: Complex,
}

pub fn surjectify(cr: &CompleteResolution) -> Result<Surjectified> {
    let alg = cr.algebra().clone();
    let Some(t0) = cr.p.inf.filter(|_| cr.gpd != Gpd::NegInfinity) else {
        let z = Complex::zero(&alg);
        return Ok(Surjectified { cr: cr.clone(), base: cr.clone(), x: z.clone(), cone: z });
    };
    let g = cr.g;
    let x = if g > t0 { cr.p.complex(g - 1)? } else { Complex::zero(&alg) };
    let cone = if x.total_dim() == 0 { Complex::zero(&alg) } else { cone_unchecked(&ChainMap::identity(&x.shift(-1))).cx };
    let base = cr.clone();
    let c2 = cone.clone();
    let t = TotallyAcyclic::new(&alg, move |lo, hi| {
        let tw = base.t.window(lo, hi)?;
        let cw = c2.restrict(lo, hi).padded(lo, hi);
        Ok(Complex::direct_sum(&[tw, cw]).0)
    });
    let p = alg.p();
    let tb = cr.t_window(t0, g)?;
    let (pw, _) = cr.p_window(t0, g)?;
    let tau_low = (t0..g)
        .map(|i| {
            let (a, b, c) = (tb.dim(i), x.dim(i), x.dim(i + 1));
            let mut m = Matrix::zeros(p, pw.dim(i), a + b + c);
            m.paste(0, 0, &cr.tau_comp(i, a, pw.dim(i)));
            m.paste(0, a, &Matrix::identity(p, b));
            (i, m)
        })
        .collect();
    let new = CompleteResolution { t, tau_low: Arc::new(tau_low), ..cr.clone() };
    let s = Surjectified { cr: new, base: cr.clone(), x, cone };
    s.check(t0 - 2, g + 1)?;
    Ok(s)
}

/// The witnesses `α: T -> T'`, `ρ: T' -> T` and degree-one `κ` on a window.
#[derive(Clone, Debug)]
pub struct SurjectionWitness {
    pub alpha: ChainMap,
    pub rho: ChainMap,
    pub kappa: ChainMap,
}

impl Surjectified {
    pub fn witnesses(&self, lo: i64, hi: i64) -> Result<SurjectionWitness> {
        let tw = self.base.t_window(lo, hi)?;
        let tw2 = self.cr.t_window(lo, hi)?;
        let p = tw.p();
        let inc = |i: i64| {
            let mut m = Matrix::zeros(p, tw2.dim(i), tw.dim(i));
            m.paste(0, 0, &Matrix::identity(p, tw.dim(i)));
            m
        };
        let alpha = ChainMap::from_fn(&tw, &tw2, 0, inc);
        let rho = ChainMap::from_fn(&tw2, &tw, 0, |i| inc(i).transpose());
        let kappa = ChainMap::from_fn(&tw2, &tw2, 1, |i| {
            let mut m = Matrix::zeros(p, tw2.dim(i + 1), tw2.dim(i));
            let n = self.x.dim(i + 1);
            if n > 0 && i + 1 <= hi {
                m.paste(tw.dim(i + 1), tw.dim(i) + self.x.dim(i), &Matrix::identity(p, n));
            }
            m
        });
        Ok(SurjectionWitness { alpha, rho, kappa })
    }

    /// `ρα = id`, `d(κ) = αρ - id`, `τ = τ'α` and `τ'` surjective, on `[lo, hi]`.
    pub fn check(&self, lo: i64, hi: i64) -> Result<()> {
        let w = self.witnesses(lo, hi)?;
        let bad = |s: &str| Err(Error::CertificateViolated(format!("surjectified resolution: {s}")));
        if !w.alpha.is_morphism() || !w.rho.is_morphism() {
            return bad("α or ρ is not a morphism");
        }
        if w.rho.compose(&w.alpha) != ChainMap::identity(&w.alpha.src) {
            return bad("ρα != id");
        }
        let dk = w.kappa.boundary();
        let want = w.alpha.compose(&w.rho).sub(&ChainMap::identity(&w.rho.src));
        if (lo + 1..hi).any(|i| dk.comp(i) != want.comp(i)) {
            return bad("d(κ) != αρ - id");
        }
        let tau = self.base.tau_window(lo, hi)?;
        let tau2 = self.cr.tau_window(lo, hi)?;
        if tau2.compose(&w.alpha) != tau {
            return bad("τ != τ'α");
        }
        if !tau2.is_degreewise_surjective() {
            return bad("τ' is not surjective");
        }
        self.cr.verify(lo, hi)
    }
}

/// `0 -> L -> G --γ--> P`-style data: `G` is a bounded complex with `G_t`
/// Gorenstein projective and free `G_i` for `i > t`, `γ: P -> G` a
/// quasiisomorphism and `ι: G -> ΣL` with `ιγ = λ`.
#[derive(Clone, Debug)]
pub struct SpecialGPResolution {
    pub target: Complex,
    pub gpd: Gpd,
    pub t: i64,
    pub g: i64,
    pub g_cx: Complex,
    pub p: FreeModel,
    /// `P_{<= g+1} -> G`.
    pub gamma: ChainMap,
    /// `ΣL` on `[t, g]`.
    pub l_shift: Complex,
    pub iota: ChainMap,
    pub lambda: ChainMap,
    /// `ε: G -> M` with `εγ = π` when the target is a module in degree 0.
    pub eps: Option<ChainMap>,
    pub surj: Surjectified,
}

pub(crate) fn is_module_target(m: &Complex) -> bool {
    m.inf().is_none_or(|a| a == 0) && m.sup().is_none_or(|b| b == 0)
}

pub fn special_gp_resolution(m: &Complex, cert: &GorensteinCertificate) -> Result<SpecialGPResolution> {
    cert.check(m.algebra())?;
    let alg = m.algebra().clone();
    let p = alg.p();
    let res = Resolution::new(m, CoverStrategy::Greedy);
    let model = FreeModel::of(&res);
    let cr = complete_resolution_on(&model, cert)?;
    let su = surjectify(&cr)?;
    if cr.gpd == Gpd::NegInfinity {
        let z = Complex::zero(&alg);
        let zm = ChainMap::zero(&z, &z, 0);
        let eps = is_module_target(m).then(|| ChainMap::zero(&z, m, 0));
        return Ok(SpecialGPResolution {
            target: m.clone(),
            gpd: Gpd::NegInfinity,
            t: 0,
            g: 0,
            g_cx: z.clone(),
            p: model,
            gamma: zm.clone(),
            l_shift: z,
            iota: zm.clone(),
            lambda: zm,
            eps,
            surj: su,
        });
    }
    let t = model.inf.expect("nonexact");
    let g = cr.g;
    let tp = su.cr.t_window(t - 1, g + 1)?;
    let tb = su.base.t_window(t - 1, g + 1)?;
    let (pc, pi) = model.window(g + 1)?;
    let x = &su.x;
    let tau = |n: i64| su.base.tau_comp(n, tb.dim(n), pc.dim(n));
    let l_mod = |n: i64| sum2(&tb.module(n), &x.module(n + 1));
    let kappa = |n: i64| {
        let (a, b, c) = (tb.dim(n), x.dim(n), x.dim(n + 1));
        let mut m = Matrix::zeros(p, a + b + c, a + c);
        m.paste(0, 0, &Matrix::identity(p, a));
        if b > 0 {
            m.paste(a, 0, &tau(n).neg());
        }
        m.paste(a + b, a, &Matrix::identity(p, c));
        m
    };
    // ν' keeps the first and last blocks of T'_n = T_n ⊕ X_n ⊕ X_{n+1}
    let nu1 = |n: i64| {
        let (a, b, c) = (tb.dim(n), x.dim(n), x.dim(n + 1));
        let mut m = Matrix::zeros(p, a + c, a + b + c);
        m.paste(0, 0, &Matrix::identity(p, a));
        m.paste(a, a + b, &Matrix::identity(p, c));
        m
    };
    let nu2 = |n: i64| {
        if n >= g {
            Matrix::identity(p, pc.dim(n))
        } else {
            let mut m = Matrix::zeros(p, tp.dim(n), pc.dim(n));
            if x.dim(n) > 0 {
                m.paste(tb.dim(n), 0, &Matrix::identity(p, x.dim(n)));
            }
            m
        }
    };
    let d_l = |n: i64| nu1(n - 1).mul(&tp.d(n)).mul(&kappa(n));
    let lam = |n: i64| nu1(n - 1).mul(&tp.d(n)).mul(&nu2(n));
    let (gt, qt) = tp.coker_at(t);
    let g_cx = Complex::new(
        &alg,
        t,
        (t..=g).map(|i| if i == t { gt.clone() } else { l_mod(i - 1) }).collect(),
        (t + 1..=g).map(|i| if i == t + 1 { qt.mul(&kappa(t)).neg() } else { d_l(i - 1).neg() }).collect(),
    )?;
    let l_shift = Complex::new(&alg, t, (t..=g).map(|i| l_mod(i - 1)).collect(), (t + 1..=g).map(|i| d_l(i - 1).neg()).collect())?;
    let iota_t = nu1(t - 1).mul(&tp.d(t)).mul(&right_inverse(&qt));
    let iota = ChainMap::from_fn(&g_cx, &l_shift, 0, |i| if i == t { iota_t.clone() } else { Matrix::identity(p, g_cx.dim(i)) });
    let lambda = ChainMap::from_fn(&pc, &l_shift, 0, |i| if (t..=g).contains(&i) { lam(i) } else { Matrix::zeros(p, l_shift.dim(i), pc.dim(i)) });
    let gamma_t = iota_t.solve(&lam(t)).ok_or_else(|| Error::CertificateViolated("λ_t does not factor through ι_t".into()))?;
    let gamma = ChainMap::from_fn(&pc, &g_cx, 0, |i| {
        if i == t {
            gamma_t.clone()
        } else if (t + 1..=g).contains(&i) {
            lam(i)
        } else {
            Matrix::zeros(p, g_cx.dim(i), pc.dim(i))
        }
    });
    let bad = |s: &str| Err(Error::CertificateViolated(format!("special resolution: {s}")));
    if !gamma.is_morphism() || !iota.is_morphism() || !lambda.is_morphism() {
        return bad("γ, ι or λ is not a morphism");
    }
    if iota.compose(&gamma) != lambda {
        return bad("ιγ != λ");
    }
    if !gamma.is_quasiiso_on(t, g) {
        return bad("γ is not a quasiisomorphism");
    }
    let eps = if is_module_target(m) {
        let e0 = pi.comp(0).mul(&su.cr.tau_comp(0, tp.dim(0), pc.dim(0))).mul(&right_inverse(&qt));
        let e = ChainMap::from_fn(&g_cx, m, 0, |i| if i == 0 { e0.clone() } else { Matrix::zeros(p, m.dim(i), g_cx.dim(i)) });
        if !e.is_morphism() || e.compose(&gamma) != pi {
            return bad("εγ != π");
        }
        Some(e)
    } else {
        None
    };
    Ok(SpecialGPResolution { target: m.clone(), gpd: cr.gpd, t, g, g_cx, p: model, gamma, l_shift, iota, lambda, eps, surj: su })
}

/// A complete resolution from a special Gorenstein projective resolution,
/// optionally over another free resolution of the same module.
pub fn complete_from_special(
    sp: &SpecialGPResolution,
    res: Option<&Resolution>,
    cert: &GorensteinCertificate,
) -> Result<CompleteResolution> {
    cert.check(sp.target.algebra())?;
    let alg = sp.target.algebra().clone();
    let p = alg.p();
    let (model, gamma) = match res {
        None => (sp.p.clone(), sp.gamma.clone()),
        Some(r) => {
            if *r.target() != sp.target {
                return Err(Error::ValidationError("resolution of a different complex".into()));
            }
            let eps = sp.eps.as_ref().ok_or_else(|| Error::ValidationError("another resolution needs a module target".into()))?;
            let (_, pi) = r.window(sp.g + 1);
            (FreeModel::of(r), lift_through(&pi, eps)?.map)
        }
    };
    if sp.gpd == Gpd::NegInfinity {
        return Ok(CompleteResolution::exact(&model));
    }
    let (t, g) = (sp.t, sp.g);
    let gt = sp.g_cx.module(t);
    let s0 = totally_acyclic_from_gp(&gt, cert)?;
    let (_, pi_g) = Resolution::of_module(&gt, CoverStrategy::Greedy).window(0);
    let s = s0.shifted(t + 1);
    let sw = s.window(t, t + 1)?;
    let e_s = sw.d(t + 1).mul(&right_inverse(&pi_g.comp(0)));
    let gcx = sp.g_cx.clone();
    let m2 = model.clone();
    let a = alg.clone();
    let tt = TotallyAcyclic::new(&alg, move |lo, hi| {
        let pw = m2.complex(hi)?.restrict(lo, hi).padded(lo, hi);
        let sw = if lo <= t { s.window(lo, t)? } else { Complex::zero(&a) };
        let kmod = |i: i64| if i <= t { sw.module(i) } else { gcx.module(i) };
        let kd = |i: i64| {
            if i <= t {
                sw.d(i)
            } else if i == t + 1 {
                e_s.mul(&gcx.d(t + 1))
            } else {
                gcx.d(i)
            }
        };
        let kap = |i: i64| {
            if i == t {
                e_s.mul(&gamma.comp(t))
            } else if i > t && i <= g {
                gamma.comp(i)
            } else {
                Matrix::zeros(p, kmod(i).dim(), pw.dim(i))
            }
        };
        Ok(Complex::from_fn(
            &a,
            lo,
            hi,
            |n| sum2(&pw.module(n), &kmod(n + 1)),
            |n| {
                let (dk, kp) = (kd(n + 1).neg(), kap(n));
                block2(p, (pw.dim(n - 1), kmod(n).dim()), (pw.dim(n), kmod(n + 1).dim()), [[Some(&pw.d(n)), None], [Some(&kp), Some(&dk)]])
            },
        ))
    });
    let gdims: Vec<usize> = (t..=g + 1).map(|i| sp.g_cx.dim(i)).collect();
    let pc = model.complex(g)?;
    let tau_low = (t..g)
        .map(|n| {
            let (a, b) = (pc.dim(n), gdims[(n + 1 - t) as usize]);
            let mut m = Matrix::zeros(p, a, a + b);
            m.paste(0, 0, &Matrix::identity(p, a));
            (n, m)
        })
        .collect();
    let cr = CompleteResolution { target: sp.target.clone(), gpd: sp.gpd, g, p: model, t: tt, tau_low: Arc::new(tau_low) };
    cr.verify(t - 2, g + 2)?;
    Ok(cr)
}

struct HorseshoeState {
    t: TotallyAcyclic,
    t2: TotallyAcyclic,
    g: i64,
    /// `θ^P_i: P''_i -> P_{i-1}`, the corner of the block form of `P'`.
    theta_p: BTreeMap<i64, Matrix>,
    p_dims: (Complex, Complex),
    cache: Mutex<BTreeMap<i64, Matrix>>,
}

impl HorseshoeState {
    /// `θ_i: T''_i -> T_{i-1}`, the corner of the differential of `T'`.
    fn theta(&self, i: i64) -> Result<Matrix> {
        let p = self.t.algebra().p();
        if i > self.g {
            let (pc, pc2) = &self.p_dims;
            return Ok(self.theta_p.get(&i).cloned().unwrap_or_else(|| Matrix::zeros(p, pc.dim(i - 1), pc2.dim(i))));
        }
        let mut cache = self.cache.lock().unwrap();
        if let Some(m) = cache.get(&i) {
            return Ok(m.clone());
        }
        let mut j = cache.keys().next().copied().unwrap_or(self.g + 1).min(self.g + 1) - 1;
        while j >= i {
            let above = if j + 1 > self.g {
                let (pc, pc2) = &self.p_dims;
                self.theta_p.get(&(j + 1)).cloned().unwrap_or_else(|| Matrix::zeros(p, pc.dim(j), pc2.dim(j + 1)))
            } else {
                cache[&(j + 1)].clone()
            };
            let tw = self.t.window(j - 1, j)?;
            let tw2 = self.t2.window(j, j + 1)?;
            let rhs = tw.d(j).mul(&above).neg();
            let x = solve_right(&tw2.module(j), &tw.module(j - 1), &tw2.d(j + 1), &rhs)
                .ok_or_else(|| Error::SystemInfeasible(format!("horseshoe corner in degree {j}")))?;
            cache.insert(j, x);
            j -= 1;
        }
        Ok(cache[&i].clone())
    }
}

/// Complete resolutions of `M`, `M'`, `M''` forming degreewise split exact rows
/// `0 -> T -> T' -> T'' -> 0` over the horseshoe `0 -> P -> P' -> P'' -> 0`.
#[derive(Clone)]
pub struct TateHorseshoe {
    pub cr: CompleteResolution,
    pub cr1: CompleteResolution,
    pub cr2: CompleteResolution,
    pub g: i64,
    pub top: i64,
    state: Arc<HorseshoeState>,
}

/// Both rows of a [`TateHorseshoe`] on a window, with the vertical maps.
#[derive(Clone, Debug)]
pub struct HorseshoeRows {
    pub t_row: SplitSES,
    pub p_row: SplitSES,
    pub tau: ChainMap,
    pub tau1: ChainMap,
    pub tau2: ChainMap,
}

pub(crate) fn row_maps(p: u32, a: &Complex, b: &Complex, c: &Complex) -> Result<SplitSES> {
    let top = |i: i64| {
        let mut m = Matrix::zeros(p, b.dim(i), a.dim(i));
        m.paste(0, 0, &Matrix::identity(p, a.dim(i)));
        m
    };
    let bot = |i: i64| {
        let mut m = Matrix::zeros(p, b.dim(i), c.dim(i));
        m.paste(a.dim(i), 0, &Matrix::identity(p, c.dim(i)));
        m
    };
    SplitSES::new(
        ChainMap::from_fn(a, b, 0, top),
        ChainMap::from_fn(b, c, 0, |i| bot(i).transpose()),
        ChainMap::from_fn(b, a, 0, |i| top(i).transpose()),
        ChainMap::from_fn(c, b, 0, bot),
    )
}

/// A horseshoe `0 -> P -> P' -> P'' -> 0` with `P'_n = P_n ⊕ P''_n` and
/// `d' = [[d, θ], [0, d'']]`, on degrees `<= top`.
#[derive(Clone, Debug)]
pub struct BlockHorseshoe {
    pub p: Complex,
    pub p1: Complex,
    pub p2: Complex,
    pub pi: ChainMap,
    pub pi1: ChainMap,
    pub pi2: ChainMap,
    /// `θ_n: P''_n -> P_{n-1}`.
    pub theta: BTreeMap<i64, Matrix>,
    pub top: i64,
}

impl BlockHorseshoe {
    pub fn row(&self) -> Result<SplitSES> {
        row_maps(self.p.p(), &self.p, &self.p1, &self.p2)
    }
}

pub fn block_horseshoe(mu: &ChainMap, mu1: &ChainMap, top: i64) -> Result<BlockHorseshoe> {
    let hs = horseshoe(mu, mu1, CoverStrategy::Greedy, top)?;
    let row = &hs.row;
    let (pc, pc1, pc2) = (&row.m, &row.m1, &row.m2);
    let alg = pc1.algebra().clone();
    let p = alg.p();
    let lo = pc1.lo().min(pc.lo()).min(pc2.lo());
    // change of basis [μ̄ ν''] and its inverse [ν'; μ̄']
    let b = |n: i64| Matrix::hstack(p, pc1.dim(n), &[&row.mu.comp(n), &row.nu2.comp(n)]);
    let binv = |n: i64| Matrix::vstack(p, pc1.dim(n), &[&row.nu1.comp(n), &row.mu1.comp(n)]);
    let pb = Complex::from_fn(&alg, lo, top, |n| sum2(&pc.module(n), &pc2.module(n)), |n| binv(n - 1).mul(&pc1.d(n)).mul(&b(n)));
    let pi1 = ChainMap::from_fn(&pb, &mu.tgt, 0, |n| hs.pi1.comp(n).mul(&b(n)));
    let theta = (lo + 1..=top).map(|n| (n, row.nu1.comp(n - 1).mul(&pc1.d(n)).mul(&row.nu2.comp(n)))).collect();
    let bh = BlockHorseshoe { p: pc.clone(), p1: pb, p2: pc2.clone(), pi: hs.pi.clone(), pi1, pi2: hs.pi2.clone(), theta, top };
    bh.row()?;
    Ok(bh)
}

/// Horseshoe of complete resolutions for `0 -> M -> M' -> M'' -> 0`, with the
/// free models known on degrees `<= top`.
pub fn tate_horseshoe(mu: &ChainMap, mu1: &ChainMap, cert: &GorensteinCertificate, top: i64) -> Result<TateHorseshoe> {
    check_exact(mu, mu1)?;
    cert.check(mu.src.algebra())?;
    let bh = block_horseshoe(mu, mu1, top)?;
    let (pc, pc2, pb) = (&bh.p, &bh.p2, &bh.p1);
    let alg = pb.algebra().clone();
    let p = alg.p();
    let lo = pb.lo();
    let theta_p = bh.theta.clone();
    let model = FreeModel::bounded(pc.clone(), bh.pi.clone(), top);
    let model2 = FreeModel::bounded(pc2.clone(), bh.pi2.clone(), top);
    let model1 = FreeModel::bounded(pb.clone(), bh.pi1.clone(), top);
    let cr = surjectify(&complete_resolution_on(&model, cert)?)?.cr;
    let cr2 = surjectify(&complete_resolution_on(&model2, cert)?)?.cr;
    let g = cr.g.max(cr2.g);
    if g + 2 > top {
        return Err(Error::WindowTooSmall(format!("horseshoe needs degrees up to {}, top is {top}", g + 2)));
    }
    let gpd1 = gp_threshold(&model1, cert)?.map_or(Gpd::NegInfinity, Gpd::Finite);
    let state = Arc::new(HorseshoeState {
        t: cr.t.clone(),
        t2: cr2.t.clone(),
        g,
        theta_p,
        p_dims: (pc.clone(), pc2.clone()),
        cache: Mutex::new(BTreeMap::new()),
    });
    let st = state.clone();
    let a = alg.clone();
    let t1 = TotallyAcyclic::new(&alg, move |lo, hi| {
        let tw = st.t.window(lo, hi)?;
        let tw2 = st.t2.window(lo, hi)?;
        let thetas: BTreeMap<i64, Matrix> = (lo + 1..=hi).map(|i| Ok((i, st.theta(i)?))).collect::<Result<_>>()?;
        Ok(Complex::from_fn(
            &a,
            lo,
            hi,
            |i| sum2(&tw.module(i), &tw2.module(i)),
            |i| {
                let (d, d2) = (tw.d(i), tw2.d(i));
                block2(p, (tw.dim(i - 1), tw2.dim(i - 1)), (tw.dim(i), tw2.dim(i)), [[Some(&d), Some(&thetas[&i])], [None, Some(&d2)]])
            },
        ))
    });
    // τ' = [[τ, Δ], [0, τ'']] with Δ_{j-1} d''_j = θ^P_j τ''_j - τ_{j-1} θ_j + d^P_j Δ_j.
    let lo_t = lo.min(cr.p.inf.unwrap_or(lo)).min(cr2.p.inf.unwrap_or(lo));
    let tw = cr.t_window(lo_t - 1, g + 1)?;
    let tw2 = cr2.t_window(lo_t - 1, g + 1)?;
    let tau = cr.tau_window(lo_t - 1, g + 1)?;
    let tau2 = cr2.tau_window(lo_t - 1, g + 1)?;
    let mut delta: BTreeMap<i64, Matrix> = BTreeMap::new();
    let zero_delta = |i: i64| Matrix::zeros(p, pc.dim(i), tw2.dim(i));
    for j in (lo_t..=g).rev() {
        let dj = delta.get(&j).cloned().unwrap_or_else(|| zero_delta(j));
        let thp = state.theta_p.get(&j).cloned().unwrap_or_else(|| Matrix::zeros(p, pc.dim(j - 1), pc2.dim(j)));
        let rhs = thp.mul(&tau2.comp(j)).sub(&tau.comp(j - 1).mul(&state.theta(j)?)).add(&pc.d(j).mul(&dj));
        let x = solve_right(&tw2.module(j - 1), &pc.module(j - 1), &tw2.d(j), &rhs)
            .ok_or_else(|| Error::SystemInfeasible(format!("horseshoe comparison in degree {}", j - 1)))?;
        delta.insert(j - 1, x);
    }
    let tau_low = (lo_t..g)
        .map(|i| {
            let d = delta.get(&i).cloned().unwrap_or_else(|| zero_delta(i));
            let (t0, t2) = (tau.comp(i), tau2.comp(i));
            (i, block2(p, (pc.dim(i), pc2.dim(i)), (tw.dim(i), tw2.dim(i)), [[Some(&t0), Some(&d)], [None, Some(&t2)]]))
        })
        .collect();
    let cr1 = CompleteResolution { target: mu.tgt.clone(), gpd: gpd1, g, p: model1, t: t1, tau_low: Arc::new(tau_low) };
    let th = TateHorseshoe { cr, cr1, cr2, g, top, state };
    let rows = th.rows(lo_t - 1, g + 1)?;
    for c in [&th.cr, &th.cr1, &th.cr2] {
        c.verify(lo_t - 1, g + 1)?;
    }
    if rows.tau1.compose(&rows.t_row.mu) != rows.p_row.mu.compose(&rows.tau)
        || rows.tau2.compose(&rows.t_row.mu1) != rows.p_row.mu1.compose(&rows.tau1)
    {
        return Err(Error::CertificateViolated("horseshoe squares do not commute".into()));
    }
    Ok(th)
}

impl TateHorseshoe {
    pub fn rows(&self, lo: i64, hi: i64) -> Result<HorseshoeRows> {
        let p = self.cr.target.p();
        let (t, t1, t2) = (self.cr.t_window(lo, hi)?, self.cr1.t_window(lo, hi)?, self.cr2.t_window(lo, hi)?);
        let (q, q1, q2) = (self.cr.p_window(lo, hi)?.0, self.cr1.p_window(lo, hi)?.0, self.cr2.p_window(lo, hi)?.0);
        Ok(HorseshoeRows {
            t_row: row_maps(p, &t, &t1, &t2)?,
            p_row: row_maps(p, &q, &q1, &q2)?,
            tau: self.cr.tau_window(lo, hi)?,
            tau1: self.cr1.tau_window(lo, hi)?,
            tau2: self.cr2.tau_window(lo, hi)?,
        })
    }

    /// The corner `θ_i: T''_i -> T_{i-1}` of the middle differential.
    pub fn theta(&self, i: i64) -> Result<Matrix> {
        self.state.theta(i)
    }
}

/// `μ̄: P -> P'` over `μ: M -> M'`, and `μ̂: T -> T'` agreeing with `μ̄` in
/// high degrees, with `h` a homotopy `τ'μ̂ ~ μ̄τ`.
#[derive(Clone, Debug)]
pub struct CompleteLift {
    pub bar: ChainMap,
    pub hat: ChainMap,
    pub homotopy: ChainMap,
}

pub fn lift_to_complete(mu: &ChainMap, cr: &CompleteResolution, cr1: &CompleteResolution, lo: i64, hi: i64) -> Result<CompleteLift> {
    let h = cr.g.max(cr1.g);
    let hi = hi.max(h);
    let (_, pi) = cr.p.window(hi)?;
    let (_, pi1) = cr1.p.window(hi)?;
    let full = lift_through(&mu.compose(&pi), &pi1)?.map;
    let (pw, _) = cr.p_window(lo, hi)?;
    let (pw1, _) = cr1.p_window(lo, hi)?;
    let bar = ChainMap::from_fn(&pw, &pw1, 0, |i| full.comp(i));
    let tw = cr.t_window(lo, hi)?;
    let tw1 = cr1.t_window(lo, hi)?;
    let p = tw.p();
    let partial = ChainMap::from_fn(&tw, &tw1, 0, |i| if i >= h { bar.comp(i) } else { Matrix::zeros(p, tw1.dim(i), tw.dim(i)) });
    let hat = extend_chain_map_down(&partial, h.max(lo))?;
    let tau = cr.tau_window(lo, hi)?;
    let tau1 = cr1.tau_window(lo, hi)?;
    let homotopy = solve_homotopy_on(&tau1.compose(&hat), &bar.compose(&tau), lo + 1, hi - 1)
        .ok_or_else(|| Error::SystemInfeasible("τ'μ̂ and μ̄τ are not homotopic".into()))?;
    Ok(CompleteLift { bar, hat, homotopy })
}
