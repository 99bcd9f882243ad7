//! Bounded-below free resolutions, syzygies, projective dimension, lifts and
//! the horseshoe construction.

use crate::complex::{cone_unchecked as cone_raw, ChainMap, Complex, SplitSES};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::module::{free_cover_with, free_map, is_projective, CoverStrategy, Module};
use std::sync::{Arc, Mutex};

struct State {
    mods: Vec<Module>,
    /// `diffs[k] = d(t + k)`; `diffs[0]` is empty.
    diffs: Vec<Matrix>,
    pis: Vec<Matrix>,
}

struct Inner {
    target: Complex,
    strategy: CoverStrategy,
    t: Option<i64>,
    state: Mutex<State>,
}

/// A free resolution `π: P -> M`, built upward from `inf H(M)` on demand.
///
/// In degree `n` the new free module covers the pairs `(y, m)` in
/// `P_{n-1} ⊕ M_n` with `dy = 0` and `πy = dm`; the differential and `π` are
/// the two components. Clones share the cache.
#[derive(Clone)]
pub struct Resolution(Arc<Inner>);

impl std::fmt::Debug for Resolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let st = self.0.state.lock().unwrap();
        write!(f, "Resolution(t = {:?}, ranks {:?})", self.0.t, st.mods.iter().map(|m| m.free_rank().unwrap()).collect::<Vec<_>>())
    }
}

impl Resolution {
    pub fn new(target: &Complex, strategy: CoverStrategy) -> Resolution {
        let t = target.homology_inf();
        let st = State { mods: Vec::new(), diffs: Vec::new(), pis: Vec::new() };
        Resolution(Arc::new(Inner { target: target.clone(), strategy, t, state: Mutex::new(st) }))
    }

    pub fn of_module(m: &Module, strategy: CoverStrategy) -> Resolution {
        Resolution::new(&Complex::concentrated(m, 0), strategy)
    }

    pub fn target(&self) -> &Complex {
        &self.0.target
    }

    pub fn strategy(&self) -> CoverStrategy {
        self.0.strategy
    }

    /// `inf P = inf H(M)`, or `None` when `M` is exact.
    pub fn inf(&self) -> Option<i64> {
        self.0.t
    }

    pub fn computed_up_to(&self) -> Option<i64> {
        let st = self.0.state.lock().unwrap();
        self.0.t.map(|t| t + st.mods.len() as i64 - 1)
    }

    /// Compute all degrees up to `hi`. Earlier degrees are never recomputed.
    pub fn extend(&self, hi: i64) {
        let Some(t) = self.0.t else { return };
        let mut st = self.0.state.lock().unwrap();
        while t + (st.mods.len() as i64) <= hi {
            let n = t + st.mods.len() as i64;
            self.step(&mut st, n);
        }
    }

    fn step(&self, st: &mut State, n: i64) {
        let m = &self.0.target;
        let alg = m.algebra();
        let p = alg.p();
        let k = st.mods.len();
        let (prev, d_prev, pi_prev, prev2_dim) = if k == 0 {
            (Module::zero(alg), Matrix::zeros(p, 0, 0), Matrix::zeros(p, m.dim(n - 1), 0), 0)
        } else {
            let d2 = if k >= 2 { st.mods[k - 2].dim() } else { 0 };
            (st.mods[k - 1].clone(), st.diffs[k - 1].clone(), st.pis[k - 1].clone(), d2)
        };
        let mn = m.module(n);
        let sum = Module::direct_sum(&[prev.clone(), mn.clone()]).module;
        let (a, b) = (prev.dim(), mn.dim());
        // (y, m) -> (dy, πy - dm)
        let mut phi = Matrix::zeros(p, prev2_dim + m.dim(n - 1), a + b);
        phi.paste(0, 0, &d_prev);
        phi.paste(prev2_dim, 0, &pi_prev);
        phi.paste(prev2_dim, a, &m.d(n).neg());
        let zbasis = phi.kernel();
        let z = if zbasis.is_identity() { sum } else { sum.submodule(&zbasis) };
        let cover = free_cover_with(&z, self.0.strategy);
        let to_sum = zbasis.mul(&cover.pi);
        let d = to_sum.submatrix(0, a, 0, to_sum.cols());
        let pi = to_sum.submatrix(a, a + b, 0, to_sum.cols());
        st.mods.push(cover.free);
        st.diffs.push(if k == 0 { Matrix::zeros(p, 0, pi.cols()) } else { d });
        st.pis.push(pi);
    }

    /// `P_n` (zero outside the computed range).
    pub fn module(&self, n: i64) -> Module {
        self.extend(n);
        let st = self.0.state.lock().unwrap();
        match self.0.t {
            Some(t) if n >= t => st.mods[(n - t) as usize].clone(),
            _ => Module::zero(self.0.target.algebra()),
        }
    }

    pub fn rank(&self, n: i64) -> usize {
        self.module(n).free_rank().unwrap()
    }

    /// `P` truncated to degrees `<= hi`, with `π` on that window.
    pub fn window(&self, hi: i64) -> (Complex, ChainMap) {
        self.extend(hi);
        let alg = self.0.target.algebra();
        let st = self.0.state.lock().unwrap();
        let cx = match self.0.t {
            Some(t) if hi >= t => {
                let len = (hi - t + 1) as usize;
                Complex::raw(alg, t, st.mods[..len].to_vec(), st.diffs[1..len].to_vec())
            }
            _ => Complex::zero(alg),
        };
        let t = self.0.t.unwrap_or(0);
        let pi = ChainMap::from_fn(&cx, &self.0.target, 0, |n| st.pis[(n - t) as usize].clone());
        (cx, pi)
    }

    pub fn complex(&self, hi: i64) -> Complex {
        self.window(hi).0
    }

    /// `Ω_n(M) = C_n(P)` with the projection from `P_n`.
    pub fn syzygy(&self, n: i64) -> Result<(Module, Matrix)> {
        match self.0.t {
            Some(t) if n < t => Err(Error::WindowTooSmall(format!("syzygy {n} below inf P = {t}"))),
            _ => Ok(self.complex(n + 1).coker_at(n)),
        }
    }
}

/// Outcome of a projective dimension scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Pd {
    /// The input has zero homology.
    NegInfinity,
    Finite(i64),
    Infinite,
    /// No projective cokernel up to this degree and no certificate to conclude.
    UnknownWithin(i64),
}

impl std::fmt::Display for Pd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Pd::NegInfinity => write!(f, "-inf"),
            Pd::Finite(n) => write!(f, "{n}"),
            Pd::Infinite => write!(f, "inf"),
            Pd::UnknownWithin(b) => write!(f, "unknown within {b}"),
        }
    }
}

/// Least `p >= sup H(M)` with `C_p(P)` projective.
///
/// With a Gorenstein dimension `n` the scan stops at `sup H(M) + n` and reports
/// `Infinite`; otherwise it gives up after `bound` further degrees.
pub fn pd(res: &Resolution, gorenstein: Option<usize>, bound: usize) -> Pd {
    let Some(s) = res.target().homology_sup() else { return Pd::NegInfinity };
    let last = s + gorenstein.unwrap_or(bound) as i64;
    for q in s..=last {
        let (c, _) = res.syzygy(q).expect("q >= inf");
        if is_projective(&c).is_some() {
            return Pd::Finite(q);
        }
    }
    if gorenstein.is_some() {
        Pd::Infinite
    } else {
        Pd::UnknownWithin(last)
    }
}

/// A chain map `α: P -> P'` and a degree-one `h: P -> X` with `π'α - φ = d(h)`.
#[derive(Clone, Debug)]
pub struct Lift {
    pub map: ChainMap,
    pub homotopy: ChainMap,
}

/// Lift `φ: P -> X` through a quasiisomorphism `π': P' -> X`, where `P` is a
/// bounded complex of free modules.
///
/// Degrees are solved bottom-up, generator by generator. The homotopy is kept
/// zero in every degree where that is possible, so the lift is strict whenever
/// `π'` allows it.
pub fn lift_through(phi: &ChainMap, pi1: &ChainMap) -> Result<Lift> {
    let (pcx, x) = (&phi.src, &phi.tgt);
    let p1 = &pi1.src;
    let p = pcx.p();
    let mut alphas: Vec<Matrix> = Vec::new();
    let mut hs: Vec<Matrix> = Vec::new();
    let lo = pcx.lo();
    for n in lo..=pcx.hi() {
        let pn = pcx.module(n);
        let gens = pn.free_generators().ok_or_else(|| Error::ValidationError(format!("source degree {n} is not free")))?;
        let r = gens.cols();
        let dg = pcx.d(n).mul(&gens);
        let (a_prev, h_prev) = if n == lo {
            (Matrix::zeros(p, p1.dim(n - 1), pcx.dim(n - 1)), Matrix::zeros(p, x.dim(n), pcx.dim(n - 1)))
        } else {
            (alphas[(n - 1 - lo) as usize].clone(), hs[(n - 1 - lo) as usize].clone())
        };
        let top = a_prev.mul(&dg);
        let bottom = phi.comp(n).mul(&gens).add(&h_prev.mul(&dg));
        let rhs = Matrix::vstack(p, r, &[&top, &bottom]);
        let (d1, pi) = (p1.d(n), pi1.comp(n));
        let strict = Matrix::vstack(p, p1.dim(n), &[&d1, &pi]);
        let (xim, zim) = match strict.solve(&rhs) {
            Some(sol) => (sol, Matrix::zeros(p, x.dim(n + 1), r)),
            None => {
                let xd = x.d(n + 1).neg();
                let zeros = Matrix::zeros(p, p1.dim(n - 1), x.dim(n + 1));
                let full = Matrix::hstack(p, strict.rows(), &[&strict, &Matrix::vstack(p, x.dim(n + 1), &[&zeros, &xd])]);
                let sol = full
                    .solve(&rhs)
                    .ok_or_else(|| Error::SystemInfeasible(format!("lift obstruction in degree {n}; is the target map a quasiisomorphism?")))?;
                let a = p1.dim(n);
                (sol.submatrix(0, a, 0, r), sol.submatrix(a, sol.rows(), 0, r))
            }
        };
        alphas.push(free_map(&pn, &p1.module(n), &xim));
        hs.push(free_map(&pn, &x.module(n + 1), &zim));
    }
    let map = ChainMap::from_fn(pcx, p1, 0, |n| alphas[(n - lo) as usize].clone());
    let homotopy = ChainMap::from_fn(pcx, x, 1, |n| hs[(n - lo) as usize].clone());
    Ok(Lift { map, homotopy })
}

/// Comparison map `P -> P'` over `μ: M -> M'`, on degrees `<= hi`.
pub fn lift_morphism(mu: &ChainMap, res: &Resolution, res1: &Resolution, hi: i64) -> Result<Lift> {
    let (_, pi) = res.window(hi);
    let (_, pi1) = res1.window(hi);
    let phi = mu.compose(&pi);
    lift_through(&phi, &pi1)
}

/// Check that `0 -> M -> M' -> M'' -> 0` is exact in every degree.
pub fn check_exact(mu: &ChainMap, mu1: &ChainMap) -> Result<()> {
    if !mu.is_morphism() || !mu1.is_morphism() {
        return Err(Error::NotAMorphism("sequence maps must be morphisms".into()));
    }
    let (m, m1, m2) = (&mu.src, &mu.tgt, &mu1.tgt);
    let lo = m.lo().min(m1.lo()).min(m2.lo());
    let hi = m.hi().max(m1.hi()).max(m2.hi());
    for i in lo..=hi {
        let (a, b) = (mu.comp(i), mu1.comp(i));
        if !b.mul(&a).is_zero() || a.rank() != m.dim(i) || b.rank() != m2.dim(i) || m.dim(i) + m2.dim(i) != m1.dim(i) {
            return Err(Error::InputNotExact(format!("degree {i}")));
        }
    }
    Ok(())
}

/// The three resolutions and the degreewise split bottom row of a horseshoe.
#[derive(Clone, Debug)]
pub struct Horseshoe {
    pub pi: ChainMap,
    pub pi1: ChainMap,
    pub pi2: ChainMap,
    /// `0 -> P -> P' -> P'' -> 0` with its splittings.
    pub row: SplitSES,
    /// The comparison `α: P -> Q` into the resolution of the middle term.
    pub alpha: Lift,
}

/// Horseshoe resolutions on degrees `<= hi` for an exact sequence of bounded complexes.
///
/// `P' = Cone(id_P) ⊕ Q` where `Q -> M'` is the standard resolution, and
/// `μ̄(p) = (0, p, α p)`. Because `Q -> M'` need not be surjective, `π'` carries
/// the homotopy `h` of the lift: `π'(p', p, q) = κq + h p' + (μπ - κα)p`.
pub fn horseshoe(mu: &ChainMap, mu1: &ChainMap, strategy: CoverStrategy, hi: i64) -> Result<Horseshoe> {
    check_exact(mu, mu1)?;
    let res = Resolution::new(&mu.src, strategy);
    let resq = Resolution::new(&mu.tgt, strategy);
    let (pcx, pi) = res.window(hi);
    let (qcx, kappa) = resq.window(hi);
    let alpha = lift_through(&mu.compose(&pi), &kappa)?;
    let a = &alpha.map;
    let h = &alpha.homotopy;
    let m1 = &mu.tgt;
    let p = m1.p();
    let cp = cone_raw(&ChainMap::identity(&pcx)).cx;
    let (p1full, _, _) = Complex::direct_sum(&[cp, qcx.clone()]);
    let p1 = p1full.truncate_below(hi);
    let (dp, dq) = (|n: i64| pcx.dim(n), |n: i64| qcx.dim(n));
    let mupi = mu.compose(&pi);
    let pi1 = ChainMap::from_fn(&p1, m1, 0, |n| {
        let corr = mupi.comp(n).sub(&kappa.comp(n).mul(&a.comp(n)));
        Matrix::hstack(p, m1.dim(n), &[&h.comp(n - 1), &corr, &kappa.comp(n)])
    });
    let mubar = ChainMap::from_fn(&pcx, &p1, 0, |n| {
        Matrix::vstack(p, dp(n), &[&Matrix::zeros(p, dp(n - 1), dp(n)), &Matrix::identity(p, dp(n)), &a.comp(n)])
    });
    // β(p', p, q) = (p', q - αp) identifies P''_n with P_{n-1} ⊕ Q_n
    let beta = |n: i64| {
        let mut b = Matrix::zeros(p, dp(n - 1) + dq(n), p1.dim(n));
        b.paste(0, 0, &Matrix::identity(p, dp(n - 1)));
        b.paste(dp(n - 1), dp(n - 1), &a.comp(n).neg());
        b.paste(dp(n - 1), dp(n - 1) + dp(n), &Matrix::identity(p, dq(n)));
        b
    };
    let sect = |n: i64| {
        let mut s = Matrix::zeros(p, p1.dim(n), dp(n - 1) + dq(n));
        s.paste(0, 0, &Matrix::identity(p, dp(n - 1)));
        s.paste(dp(n - 1) + dp(n), dp(n - 1), &Matrix::identity(p, dq(n)));
        s
    };
    let alg = m1.algebra();
    let p2 = Complex::from_fn(
        alg,
        p1.lo(),
        p1.hi(),
        |n| Module::direct_sum(&[pcx.module(n - 1), qcx.module(n)]).module,
        |n| beta(n - 1).mul(&p1.d(n)).mul(&sect(n)),
    );
    let pi2 = ChainMap::from_fn(&p2, &mu1.tgt, 0, |n| mu1.comp(n).mul(&pi1.comp(n)).mul(&sect(n)));
    let mubar1 = ChainMap::from_fn(&p1, &p2, 0, beta);
    let nu2 = ChainMap::from_fn(&p2, &p1, 0, sect);
    let nu1 = ChainMap::from_fn(&p1, &pcx, 0, |n| {
        let mut e = Matrix::zeros(p, dp(n), p1.dim(n));
        e.paste(0, dp(n - 1), &Matrix::identity(p, dp(n)));
        e
    });
    let row = SplitSES::new(mubar, mubar1, nu1, nu2)?;
    debug_assert!(pi1.is_morphism() && pi2.is_morphism());
    Ok(Horseshoe { pi, pi1, pi2, row, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::module::{cokernel, ModMap};

    fn simple_k(alg: &Algebra) -> Module {
        let a = Module::regular(alg);
        cokernel(&ModMap::new(&a, &a, alg.left(1).clone()).unwrap()).0
    }

    #[test]
    fn resolution_of_k_has_rank_one() {
        let alg = Algebra::truncated_poly(2, 2);
        let res = Resolution::of_module(&simple_k(&alg), CoverStrategy::Greedy);
        for n in 0..6 {
            assert_eq!(res.rank(n), 1);
        }
        let (cx, pi) = res.window(5);
        assert!(pi.is_morphism());
        assert!(cx.is_exact_on(1, 4));
        assert_eq!(cx.homology_dim(0), 1);
        assert_eq!(res.syzygy(1).unwrap().0.dim(), 1);
    }

    #[test]
    fn free_module_resolves_to_itself() {
        let alg = Algebra::triangular(3, 2);
        let f = Module::free(&alg, 2);
        let res = Resolution::of_module(&f, CoverStrategy::Greedy);
        assert_eq!(res.rank(0), 2);
        assert_eq!(res.rank(1), 0);
        assert_eq!(pd(&res, Some(1), 4), Pd::Finite(0));
    }

    #[test]
    fn pd_of_simples() {
        let alg = Algebra::truncated_poly(2, 2);
        let res = Resolution::of_module(&simple_k(&alg), CoverStrategy::Greedy);
        assert_eq!(pd(&res, Some(0), 5), Pd::Infinite);
        assert_eq!(pd(&res, None, 3), Pd::UnknownWithin(3));
    }

    #[test]
    fn exact_complex_has_zero_resolution() {
        let alg = Algebra::truncated_poly(2, 2);
        let a = Module::regular(&alg);
        let c = Complex::new(&alg, 0, vec![a.clone(), a], vec![Matrix::identity(2, 2)]).unwrap();
        let res = Resolution::new(&c, CoverStrategy::Greedy);
        assert_eq!(res.inf(), None);
        assert_eq!(pd(&res, Some(0), 3), Pd::NegInfinity);
    }

    #[test]
    fn lift_of_identity_is_strict() {
        let alg = Algebra::truncated_poly(2, 2);
        let res = Resolution::of_module(&simple_k(&alg), CoverStrategy::Greedy);
        let res2 = Resolution::of_module(&simple_k(&alg), CoverStrategy::AllBasis);
        let id = ChainMap::identity(res.target());
        let l = lift_morphism(&id, &res, &res2, 4).unwrap();
        assert!(l.map.is_morphism());
        assert!(l.homotopy.is_zero());
    }

    #[test]
    fn horseshoe_on_dual_numbers() {
        let alg = Algebra::truncated_poly(2, 2);
        let a = Module::regular(&alg);
        let k = simple_k(&alg);
        let cm = Complex::concentrated(&k, 0);
        let ca = Complex::concentrated(&a, 0);
        // k -> A sends 1 to x, A -> k is the augmentation
        let inc = ChainMap::new(&cm, &ca, 0, |_| Matrix::from_rows(2, 2, 1, &[vec![0], vec![1]])).unwrap();
        let aug = ChainMap::new(&ca, &cm, 0, |_| Matrix::from_rows(2, 1, 2, &[vec![1, 0]])).unwrap();
        let hs = horseshoe(&inc, &aug, CoverStrategy::Greedy, 4).unwrap();
        for n in 0..=4 {
            let r = |c: &Complex| c.module(n).free_rank().unwrap();
            assert_eq!(r(&hs.row.m1), r(&hs.row.m) + r(&hs.row.m2));
        }
        assert!(hs.pi1.is_quasiiso_on(-1, 3));
        assert!(hs.pi2.is_quasiiso_on(-1, 3));
        assert_eq!(hs.pi1.compose(&hs.row.mu), inc.compose(&hs.pi));
        assert_eq!(hs.pi2.compose(&hs.row.mu1), aug.compose(&hs.pi1));
    }
}
