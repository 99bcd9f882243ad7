//! Randomized verification suites for the structural theorems.
//!
//! Every trial draws an [`Instance`] (an algebra, a few modules and some
//! coordinate vectors) from its own ChaCha stream, so trials are independent
//! of scheduling. A failing instance is shrunk by deleting dimensions and is
//! reported in a form that [`replay`] re-runs exactly.

use crate::algebra::{product_algebra, tensor_algebra, triangular, truncated_poly, Algebra, AlgebraData};
use crate::cohomology::{
    les_relative_first, les_relative_second, les_tate_contravariant, les_tate_covariant, tate_on, LesReport,
};
use crate::complex::{hom_complex, theta, ChainMap, Complex, SplitSES};
use crate::error::{Error, Result};
use crate::gorenstein::{
    complete_from_special, complete_resolution, gorenstein_dimension, gpd_complex, gpd_module, is_gorenstein_projective,
    special_gp_resolution, GorensteinCertificate, Gpd, DEFAULT_BOUND,
};
use crate::io::{module_file, ModuleFile};
use crate::algebra::unit_vector;
use crate::linalg::Matrix;
use crate::module::{CoverStrategy, HomSpace, Module};
use crate::par;
use crate::resolution::{pd, Pd, Resolution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Mutex;

pub const SUITES: &[&str] = &[
    "schanuel",
    "gpd_pd",
    "gpd_ineq",
    "coproducts",
    "tate_shift_sum",
    "independence",
    "les",
    "theta_vs_snake",
    "gpd_bound",
    "old_def",
    "totally_acyclic",
];

/// Raw data of one trial. Vectors are read against whatever module they
/// refer to, truncated or zero-padded to its dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub suite: String,
    pub algebra: AlgebraData,
    pub modules: Vec<ModuleFile>,
    pub vectors: Vec<Vec<u32>>,
    pub shift: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Failure {
    pub trial: usize,
    pub message: String,
    pub instance: Instance,
    pub shrunk: Instance,
    pub shrunk_message: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerdictReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub instances_run: usize,
    pub failures: Vec<Failure>,
}

impl VerdictReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Ctx {
    alg: Algebra,
    cert: GorensteinCertificate,
    mods: Vec<Module>,
    vecs: Vec<Vec<u32>>,
    shift: i64,
}

impl Ctx {
    fn module(&self, k: usize) -> Module {
        self.mods.get(k).cloned().unwrap_or_else(|| Module::zero(&self.alg))
    }

    fn vector(&self, k: usize, n: usize) -> Vec<u32> {
        let p = self.alg.p();
        let v = self.vecs.get(k).map(Vec::as_slice).unwrap_or(&[]);
        (0..n).map(|i| v.get(i).copied().unwrap_or(0) % p).collect()
    }
}

static CERTS: Mutex<BTreeMap<String, GorensteinCertificate>> = Mutex::new(BTreeMap::new());

fn certificate(alg: &Algebra) -> Result<GorensteinCertificate> {
    let key = serde_json::to_string(alg.data()).expect("algebra data serializes");
    if let Some(c) = CERTS.lock().unwrap().get(&key) {
        return Ok(c.clone());
    }
    let c = gorenstein_dimension(alg, DEFAULT_BOUND)?;
    CERTS.lock().unwrap().insert(key, c.clone());
    Ok(c)
}

fn decode(inst: &Instance) -> std::result::Result<Ctx, String> {
    let alg = Algebra::validate(inst.algebra.clone()).map_err(|e| format!("invalid instance: {e}"))?;
    let cert = certificate(&alg).map_err(|e| format!("invalid instance: {e}"))?;
    let mut loader = crate::io::Loader::new(".");
    let mods = inst
        .modules
        .iter()
        .enumerate()
        .map(|(k, f)| loader.module(f, Some(&alg), &format!("modules[{k}]")))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| format!("invalid instance: {e}"))?;
    Ok(Ctx { alg, cert, mods, vecs: inst.vectors.clone(), shift: inst.shift })
}

type Check = std::result::Result<(), String>;

fn fail<T>(e: Error) -> std::result::Result<T, String> {
    Err(e.to_string())
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

// --- instance generation ---

fn algebra_pool(p: u32) -> Vec<Algebra> {
    let (d2, t2) = (truncated_poly(p, 2), triangular(p, 2));
    vec![
        d2.clone(),
        truncated_poly(p, 3),
        t2.clone(),
        triangular(p, 3),
        tensor_algebra(&d2, &d2).expect("same field"),
        product_algebra(&d2, &t2).expect("same field"),
    ]
}

fn random_vec(rng: &mut ChaCha8Rng, p: u32, n: usize) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..p)).collect()
}

/// A quotient or submodule of `A` or `A^2` cut out by one or two random vectors.
fn random_module(rng: &mut ChaCha8Rng, alg: &Algebra, max_dim: usize) -> Module {
    let p = alg.p();
    for _ in 0..24 {
        let f = Module::free(alg, rng.gen_range(1..=2));
        let k = rng.gen_range(1..=2);
        let gens: Vec<Vec<u32>> = (0..k).map(|_| random_vec(rng, p, f.dim())).collect();
        let sub = f.closure(&gens).basis();
        let m = if rng.gen_bool(0.5) { f.quotient(&sub).0 } else { f.submodule(&sub) };
        if (1..=max_dim).contains(&m.dim()) {
            return canonical(&m);
        }
    }
    Module::regular(alg)
}

/// The same action matrices without cached structure, as after a round trip.
fn canonical(m: &Module) -> Module {
    Module::new(m.algebra(), m.dim(), m.actions().to_vec()).expect("valid module")
}

fn generate(suite: &str, rng: &mut ChaCha8Rng, p: u32) -> Instance {
    let pool = algebra_pool(p);
    let alg = pool[rng.gen_range(0..pool.len())].clone();
    let (count, max_dim, nvec, shift) = match suite {
        "schanuel" => (1, 4, 0, 0),
        "gpd_pd" => (1, 6, 0, rng.gen_range(-1..=1)),
        "gpd_ineq" => (1, 6, rng.gen_range(1..=2), rng.gen_range(-1..=1)),
        "coproducts" => (2, 5, 0, rng.gen_range(-1..=1)),
        "tate_shift_sum" => (3, 4, 0, rng.gen_range(-2..=2)),
        "independence" => (2, 4, 0, 0),
        "les" => (2, 4, rng.gen_range(1..=2), 0),
        "theta_vs_snake" => (4, 3, 3, rng.gen_range(-1..=1)),
        "gpd_bound" => (2, 4, 1, rng.gen_range(-1..=1)),
        "old_def" => (1, 6, 0, 0),
        "totally_acyclic" => (1, 5, 0, 0),
        _ => (1, 4, 0, 0),
    };
    let mods: Vec<Module> = (0..count).map(|_| random_module(rng, &alg, max_dim)).collect();
    let width = mods.iter().map(Module::dim).max().unwrap_or(0).max(alg.dim()) * 2;
    let vectors = (0..nvec).map(|_| random_vec(rng, p, width)).collect();
    Instance {
        suite: suite.to_string(),
        algebra: alg.data().clone(),
        modules: mods.iter().map(|m| module_file(m, false)).collect(),
        vectors,
        shift,
    }
}

// --- shared constructions ---

fn cx(m: &Module) -> Complex {
    Complex::concentrated(m, 0)
}

fn sum(a: &Module, b: &Module) -> Module {
    Module::direct_sum(&[a.clone(), b.clone()]).module
}

/// `0 -> L -> M' -> M'/L -> 0` with `L` generated by the instance vectors.
fn sequence(ctx: &Ctx, k: usize) -> (ChainMap, ChainMap) {
    let m1 = ctx.module(k);
    let gens: Vec<Vec<u32>> = (0..ctx.vecs.len()).map(|i| ctx.vector(i, m1.dim())).collect();
    let sub = m1.closure(&gens).basis();
    let l = m1.submodule(&sub);
    let (q, proj) = m1.quotient(&sub);
    let (lc, mc, qc) = (cx(&l), cx(&m1), cx(&q));
    let mu = ChainMap::from_fn(&lc, &mc, 0, |_| sub.clone());
    let mu1 = ChainMap::from_fn(&mc, &qc, 0, |_| proj.clone());
    (mu, mu1)
}

fn split_sequence(mu: &ChainMap, mu1: &ChainMap) -> (ChainMap, ChainMap) {
    let (_, inj, proj) = Complex::direct_sum(&[mu.src.clone(), mu1.tgt.clone()]);
    (inj[0].clone(), proj[1].clone())
}

fn combination(alg: &Algebra, rows: usize, cols: usize, basis: &[Matrix], c: &[u32]) -> Matrix {
    basis.iter().zip(c).fold(Matrix::zeros(alg.p(), rows, cols), |acc, (b, &x)| acc.add(&b.scale(x)))
}

/// `M1 -> M0` in degrees `s + 1, s`, the map picked from `Hom(M1, M0)` by vector `v`.
fn two_term(ctx: &Ctx, m1: &Module, m0: &Module, v: usize, s: i64) -> Result<Complex> {
    let h = HomSpace::new(m1, m0)?;
    let f = combination(&ctx.alg, m0.dim(), m1.dim(), &h.basis_maps(), &ctx.vector(v, h.dim()));
    Complex::new(&ctx.alg, s, vec![m0.clone(), m1.clone()], vec![f])
}

fn gpd_plus(g: Gpd, k: i64) -> Gpd {
    match g {
        Gpd::NegInfinity => Gpd::NegInfinity,
        Gpd::Finite(x) => Gpd::Finite(x + k),
    }
}

fn tate_table(cr: &crate::gorenstein::CompleteResolution, n: &Complex, a: i64, b: i64) -> std::result::Result<Vec<usize>, String> {
    Ok(tate_on(cr, n, a, b).map_err(|e| e.to_string())?.into_iter().map(|r| r.1).collect())
}

fn les_ok(name: &str, r: LesReport) -> Check {
    if let Some(k) = r.exact.iter().position(|e| *e == Some(false)) {
        return Err(format!("{name}: not exact at node {k} ({} in degree {})", r.nodes[k].label, r.nodes[k].degree));
    }
    if let Some((what, _)) = r.compatibility.iter().find(|c| !c.1) {
        return Err(format!("{name}: {what} does not commute"));
    }
    Ok(())
}

/// `Ω_n` as the kernel of `P_{n-1} -> P_{n-2}` (of `P_0 -> M` for `n = 1`).
fn syzygy_kernel(res: &Resolution, n: i64) -> Module {
    let (c, pi) = res.window(n);
    let map = if n == 1 { pi.comp(0) } else { c.d(n - 1) };
    c.module(n - 1).submodule(&map.kernel())
}

// --- suite assertions ---

fn schanuel(ctx: &Ctx) -> Check {
    let m = ctx.module(0);
    let a = Module::regular(&ctx.alg);
    let d = ctx.alg.dim();
    let family = [a.clone(), m.clone()];
    let dimhom = |x: &Module, y: &Module| HomSpace::new(x, y).map(|h| h.dim());
    let res = Resolution::of_module(&m, CoverStrategy::Greedy);
    let mut pairs = vec![(Resolution::of_module(&m, CoverStrategy::Redundant), 3)];
    let all = Resolution::of_module(&m, CoverStrategy::AllBasis);
    pairs.push((all.clone(), if all.rank(1) * d <= 40 { 2 } else { 1 }));
    for (other, top) in pairs {
        for n in 1..=top {
            let (om, om1) = (syzygy_kernel(&res, n), syzygy_kernel(&other, n));
            // Ω ⊕ P'_{n-1} ⊕ P_{n-2} ⊕ ... against Ω' ⊕ P_{n-1} ⊕ P'_{n-2} ⊕ ...
            let (mut r, mut r1) = (0usize, 0usize);
            for i in 0..n {
                let (x, y) = (other.rank(n - 1 - i), res.rank(n - 1 - i));
                if i % 2 == 0 {
                    r += x;
                    r1 += y;
                } else {
                    r += y;
                    r1 += x;
                }
            }
            let strat = other.strategy();
            ensure!(om.dim() + r * d == om1.dim() + r1 * d, "{strat:?}, n = {n}: dimensions differ");
            for t in &family {
                let from = |o: &Module, k: usize| -> Result<usize> { Ok(dimhom(o, t)? + k * t.dim()) };
                let into = |o: &Module, k: usize| -> Result<usize> { Ok(dimhom(t, o)? + k * dimhom(t, &a)?) };
                let (x, y) = (from(&om, r).or_else(fail)?, from(&om1, r1).or_else(fail)?);
                ensure!(x == y, "{strat:?}, n = {n}: Hom(-, T) has dimensions {x} and {y}");
                let (x, y) = (into(&om, r).or_else(fail)?, into(&om1, r1).or_else(fail)?);
                ensure!(x == y, "{strat:?}, n = {n}: Hom(T, -) has dimensions {x} and {y}");
            }
            if om.dim().max(om1.dim()) <= 16 {
                let t = |o: &Module| -> std::result::Result<Vec<usize>, String> {
                    let cr = complete_resolution(&cx(o), &ctx.cert, CoverStrategy::Greedy).or_else(fail)?;
                    tate_table(&cr, &cx(&m), -2, 2)
                };
                ensure!(t(&om)? == t(&om1)?, "{strat:?}, n = {n}: Tate tables of the syzygies differ");
            }
        }
    }
    Ok(())
}

fn gpd_pd(ctx: &Ctx) -> Check {
    let c = cx(&ctx.module(0)).shift(ctx.shift);
    let g = gpd_complex(&c, &ctx.cert).or_else(fail)?;
    let p = pd(&Resolution::new(&c, CoverStrategy::Greedy), Some(ctx.cert.n), DEFAULT_BOUND);
    match (p, g) {
        (Pd::Finite(p), Gpd::Finite(g)) => ensure!(g == p, "pd = {p} but Gpd = {g}"),
        (Pd::NegInfinity, g) => ensure!(g == Gpd::NegInfinity, "pd = -inf but Gpd = {g}"),
        (Pd::Infinite, Gpd::Finite(_)) => {}
        (p, g) => return Err(format!("pd = {p}, Gpd = {g}")),
    }
    Ok(())
}

fn gpd_ineq(ctx: &Ctx) -> Check {
    let (mu, mu1) = sequence(ctx, 0);
    let s = ctx.shift;
    let g = |c: &Complex| gpd_complex(&c.shift(s), &ctx.cert).or_else(fail);
    let (g0, g1, g2) = (g(&mu.src)?, g(&mu.tgt)?, g(&mu1.tgt)?);
    let bound = g0.max(g2);
    ensure!(g1 <= bound, "Gpd M' = {g1} exceeds max(Gpd M, Gpd M'') = {bound}");
    if g2 != gpd_plus(g0, 1) {
        ensure!(g1 == bound, "Gpd M' = {g1} but max(Gpd M, Gpd M'') = {bound} with Gpd M = {g0}, Gpd M'' = {g2}");
    }
    Ok(())
}

fn coproducts(ctx: &Ctx) -> Check {
    let (m1, m2) = (ctx.module(0), ctx.module(1));
    let (g1, g2) = (gpd_module(&m1, &ctx.cert).or_else(fail)?, gpd_module(&m2, &ctx.cert).or_else(fail)?);
    let g = gpd_module(&sum(&m1, &m2), &ctx.cert).or_else(fail)?;
    ensure!(g == g1.max(g2), "Gpd(M1 ⊕ M2) = {g}, summands {g1}, {g2}");
    let s = ctx.shift;
    let (c, _, _) = Complex::direct_sum(&[cx(&m1).shift(s), cx(&m2)]);
    let g = gpd_complex(&c, &ctx.cert).or_else(fail)?;
    let want = gpd_plus(g1, s).max(g2);
    ensure!(g == want, "Gpd(Σ^{s} M1 ⊕ M2) = {g}, expected {want}");
    Ok(())
}

fn tate_shift_sum(ctx: &Ctx) -> Check {
    let (m1, m2, n) = (ctx.module(0), ctx.module(1), ctx.module(2));
    let (a, b) = (-3, 3);
    let cr = |m: &Complex| complete_resolution(m, &ctx.cert, CoverStrategy::Greedy).or_else(fail);
    let (c1, c2) = (cr(&cx(&m1))?, cr(&cx(&m2))?);
    let t11 = tate_table(&c1, &cx(&n), a, b)?;
    let t21 = tate_table(&c2, &cx(&n), a, b)?;
    let t12 = tate_table(&c1, &cx(&m2), a, b)?;
    let first = tate_table(&cr(&cx(&sum(&m1, &m2)))?, &cx(&n), a, b)?;
    let add = |x: &[usize], y: &[usize]| x.iter().zip(y).map(|(u, v)| u + v).collect::<Vec<_>>();
    ensure!(first == add(&t11, &t21), "Êxt(M1 ⊕ M2, N) = {first:?}, summands {t11:?} + {t21:?}");
    let second = tate_table(&c1, &cx(&sum(&n, &m2)), a, b)?;
    ensure!(second == add(&t11, &t12), "Êxt(M1, N ⊕ M2) = {second:?}, summands {t11:?} + {t12:?}");
    let j = ctx.shift;
    let shifted = tate_table(&cr(&cx(&m1).shift(j))?, &cx(&n), a, b)?;
    let plain = tate_table(&c1, &cx(&n), a - j, b - j)?;
    ensure!(shifted == plain, "Êxt(Σ^{j} M, N) = {shifted:?} but Êxt^(i-{j})(M, N) = {plain:?}");
    Ok(())
}

fn independence(ctx: &Ctx) -> Check {
    let (m, n) = (cx(&ctx.module(0)), cx(&ctx.module(1)));
    let (a, b) = (-5, 5);
    let cert = &ctx.cert;
    let greedy = complete_resolution(&m, cert, CoverStrategy::Greedy).or_else(fail)?;
    let redundant = complete_resolution(&m, cert, CoverStrategy::Redundant).or_else(fail)?;
    let sp = special_gp_resolution(&m, cert).or_else(fail)?;
    let special = complete_from_special(&sp, None, cert).or_else(fail)?;
    let other = Resolution::new(&m, CoverStrategy::Redundant);
    let special_other = complete_from_special(&sp, Some(&other), cert).or_else(fail)?;
    let base = tate_table(&greedy, &n, a, b)?;
    for (name, cr) in [("redundant", &redundant), ("special", &special), ("special over redundant", &special_other)] {
        cr.verify(-3, 3).map_err(|e| format!("{name}: {e}"))?;
        let t = tate_table(cr, &n, a, b)?;
        ensure!(t == base, "{name} pipeline gives {t:?}, greedy gives {base:?}");
    }
    Ok(())
}

fn les(ctx: &Ctx) -> Check {
    let x = ctx.module(0);
    let xc = cx(&x);
    let cert = &ctx.cert;
    let (mu, mu1) = sequence(ctx, 1);
    let cr = complete_resolution(&xc, cert, CoverStrategy::Greedy).or_else(fail)?;
    les_ok("Tate, second variable", les_tate_covariant(&cr, &mu, &mu1, -2, 2).or_else(fail)?)?;
    les_ok("Tate, first variable", les_tate_contravariant(&mu, &mu1, &xc, cert, -2, 2).or_else(fail)?)?;
    let sp = special_gp_resolution(&xc, cert).or_else(fail)?;
    // sequences that are not proper are replaced by their split counterparts
    let second = match les_relative_second(&sp, &mu, &mu1, 0, 3) {
        Err(Error::NotProper(_)) => {
            let (s, s1) = split_sequence(&mu, &mu1);
            les_relative_second(&sp, &s, &s1, 0, 3)
        }
        r => r,
    };
    les_ok("relative, second variable", second.or_else(fail)?)?;
    let first = match les_relative_first(&mu, &mu1, &xc, cert, 0, 3) {
        Err(Error::NotProper(_)) => {
            let (s, s1) = split_sequence(&mu, &mu1);
            les_relative_first(&s, &s1, &xc, cert, 0, 3)
        }
        r => r,
    };
    les_ok("relative, first variable", first.or_else(fail)?)
}

/// Connecting maps from `θ` against a direct chase: lift a cycle of `Z`, take
/// its boundary, pull it back to `X`.
fn theta_vs_snake(ctx: &Ctx) -> Check {
    let s = ctx.shift;
    let z = two_term(ctx, &ctx.module(0), &ctx.module(1), 0, s).or_else(fail)?;
    let w = two_term(ctx, &ctx.module(2), &ctx.module(3), 1, s).or_else(fail)?;
    let h = hom_complex(&z, &w);
    let cycles = h.cx.d(0).kernel();
    let v = cycles.mul_vec(&ctx.vector(2, cycles.cols()));
    let lambda = h.element(0, &v);
    ensure!(lambda.is_morphism(), "random cocycle is not a chain map");
    let cone = SplitSES::of_cone(&lambda).or_else(fail)?;
    let ses = SplitSES::from_exact(cone.mu.clone(), cone.mu1.clone()).or_else(fail)?;
    let th = theta(&ses).or_else(fail)?;
    ensure!(th.is_morphism(), "θ is not a morphism");
    let (x, y) = (&ses.m, &ses.m1);
    for n in z.lo() - 1..=z.hi() + 1 {
        let hz = z.homology(n);
        let hx = x.homology(n - 1);
        let mut cols = Vec::new();
        for c in 0..hz.reps.cols() {
            let zc = Matrix::column_vector(z.p(), &hz.reps.col(c));
            let lift = ses.mu1.comp(n).solve(&zc).ok_or("μ' is not onto")?;
            let xb = ses.mu.comp(n - 1).solve(&y.d(n).mul(&lift)).ok_or("boundary of a lift leaves the image of μ")?;
            cols.push(hx.coords(&xb).col(0));
        }
        let snake = Matrix::from_cols(z.p(), hx.dim, &cols);
        let got = th.on_homology(n);
        ensure!(got == snake, "degree {n}: θ gives {got:?}, the chase gives {snake:?}");
    }
    Ok(())
}

fn gpd_bound(ctx: &Ctx) -> Check {
    let c = two_term(ctx, &ctx.module(0), &ctx.module(1), 0, ctx.shift).or_else(fail)?;
    let g = gpd_complex(&c, &ctx.cert).or_else(fail)?;
    match c.homology_sup() {
        None => ensure!(g == Gpd::NegInfinity, "exact complex has Gpd {g}"),
        Some(s) => {
            let top = Gpd::Finite(s + ctx.cert.n as i64);
            ensure!(g != Gpd::NegInfinity && g <= top, "Gpd = {g} exceeds sup H + n = {top}");
        }
    }
    Ok(())
}

fn old_def(ctx: &Ctx) -> Check {
    let m = ctx.module(0);
    let g = gpd_module(&m, &ctx.cert).or_else(fail)?;
    let g1 = gpd_complex(&cx(&m), &ctx.cert).or_else(fail)?;
    let res = Resolution::of_module(&m, CoverStrategy::Redundant);
    let mut h = None;
    for n in 0..=ctx.cert.n as i64 + 1 {
        let (c, _) = res.syzygy(n).or_else(fail)?;
        if is_gorenstein_projective(&c, &ctx.cert).or_else(fail)? {
            h = Some(n);
            break;
        }
    }
    let h = h.ok_or("no Gorenstein projective syzygy within n + 1")?;
    ensure!(g == Gpd::Finite(h) && g1 == g, "module Gpd {g}, complex Gpd {g1}, first GP syzygy {h}");
    Ok(())
}

fn totally_acyclic(ctx: &Ctx) -> Check {
    let m = cx(&ctx.module(0));
    let cert = &ctx.cert;
    let cr = complete_resolution(&m, cert, CoverStrategy::Greedy).or_else(fail)?;
    cr.verify(-4, 4).or_else(fail)?;
    let tw = cr.t_window(-5, 5).or_else(fail)?;
    ensure!(tw.is_exact_on(-4, 4), "T is not exact on [-4, 4]");
    let a = cx(&Module::regular(&ctx.alg));
    let hom = hom_complex(&tw, &a);
    for i in -3..=3 {
        ensure!(hom.cohomology_dim(i) == 0, "H^{i}(Hom(T, A)) != 0");
        let c = tw.coker_at(i).0;
        ensure!(is_gorenstein_projective(&c, cert).or_else(fail)?, "C_{i}(T) is not Gorenstein projective");
    }
    let sp = special_gp_resolution(&m, cert).or_else(fail)?;
    complete_from_special(&sp, None, cert).or_else(fail)?.verify(-4, 4).map_err(|e| format!("special pipeline: {e}"))?;
    Ok(())
}

fn run_check(inst: &Instance) -> Check {
    let ctx = decode(inst)?;
    let f: fn(&Ctx) -> Check = match inst.suite.as_str() {
        "schanuel" => schanuel,
        "gpd_pd" => gpd_pd,
        "gpd_ineq" => gpd_ineq,
        "coproducts" => coproducts,
        "tate_shift_sum" => tate_shift_sum,
        "independence" => independence,
        "les" => les,
        "theta_vs_snake" => theta_vs_snake,
        "gpd_bound" => gpd_bound,
        "old_def" => old_def,
        "totally_acyclic" => totally_acyclic,
        s => return Err(format!("unknown suite {s:?}")),
    };
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(&ctx))) {
        Ok(r) => r,
        Err(e) => {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        }
    }
}

/// Re-run one instance.
pub fn replay(inst: &Instance) -> std::result::Result<(), String> {
    run_check(inst)
}

// --- shrinking ---

fn candidates(inst: &Instance) -> Vec<Instance> {
    let mut out = Vec::new();
    let Ok(alg) = Algebra::validate(inst.algebra.clone()) else { return out };
    let mut loader = crate::io::Loader::new(".");
    for (k, f) in inst.modules.iter().enumerate() {
        let Ok(m) = loader.module(f, Some(&alg), "m") else { continue };
        for b in 0..m.dim() {
            let sub = m.closure(&[unit_vector(m.dim(), b)]);
            if sub.dim() == m.dim() {
                continue;
            }
            for smaller in [m.quotient(&sub.basis()).0, m.submodule(&sub.basis())] {
                let mut c = inst.clone();
                c.modules[k] = module_file(&canonical(&smaller), false);
                out.push(c);
            }
        }
    }
    for k in 0..inst.vectors.len() {
        if inst.vectors.len() > 1 {
            let mut c = inst.clone();
            c.vectors.remove(k);
            out.push(c);
        }
        for i in 0..inst.vectors[k].len() {
            if inst.vectors[k][i] != 0 {
                let mut c = inst.clone();
                c.vectors[k][i] = 0;
                out.push(c);
            }
        }
    }
    if inst.shift != 0 {
        let mut c = inst.clone();
        c.shift = 0;
        out.push(c);
    }
    out
}

/// Greedy: take the first smaller instance that still fails, until none does.
pub fn shrink(inst: &Instance) -> (Instance, String) {
    let mut cur = inst.clone();
    let mut msg = run_check(&cur).err().unwrap_or_default();
    for _ in 0..200 {
        let next = candidates(&cur).into_iter().find_map(|c| run_check(&c).err().map(|m| (c, m)));
        match next {
            Some((c, m)) => {
                cur = c;
                msg = m;
            }
            None => break,
        }
    }
    (cur, msg)
}

// --- driver ---

fn rng_for(seed: u64, suite: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((suite as u64) << 32) | trial as u64);
    rng
}

pub fn instance(suite: &str, seed: u64, trial: usize) -> Result<Instance> {
    let idx = SUITES.iter().position(|s| *s == suite).ok_or_else(|| Error::ValidationError(format!("unknown suite {suite:?}")))?;
    let mut rng = rng_for(seed, idx, trial);
    let p = if rng.gen_bool(0.5) { 2 } else { 3 };
    Ok(generate(suite, &mut rng, p))
}

pub fn verify_suite(suite: &str, seed: u64, trials: usize) -> Result<VerdictReport> {
    instance(suite, seed, 0)?;
    let results = par::map((0..trials).collect(), |t| {
        let inst = instance(suite, seed, t).expect("suite checked");
        run_check(&inst).err().map(|message| {
            let (shrunk, shrunk_message) = shrink(&inst);
            Failure { trial: t, message, instance: inst, shrunk, shrunk_message }
        })
    });
    let failures = results.into_iter().flatten().collect();
    Ok(VerdictReport { suite: suite.to_string(), seed, trials, instances_run: trials, failures })
}

pub fn verify_all(seed: u64, trials: usize) -> Vec<VerdictReport> {
    SUITES.iter().map(|s| verify_suite(s, seed, trials).expect("known suite")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_deterministic() {
        for s in SUITES {
            assert_eq!(instance(s, 7, 3).unwrap(), instance(s, 7, 3).unwrap());
        }
        assert_ne!(instance("les", 7, 3).unwrap(), instance("les", 7, 4).unwrap());
    }

    #[test]
    fn every_suite_runs_a_few_trials() {
        for s in SUITES {
            let r = verify_suite(s, 1, 4).unwrap();
            assert!(r.passed(), "{s}: {:?}", r.failures.first().map(|f| (&f.message, &f.shrunk_message)));
        }
    }

    #[test]
    fn shrinking_keeps_failures_replayable() {
        // a deliberately false claim: every module over the dual numbers is projective
        let alg = truncated_poly(2, 2);
        let k = Module::new(&alg, 1, vec![Matrix::identity(2, 1), Matrix::zeros(2, 1, 1)]).unwrap();
        let big = sum(&Module::regular(&alg), &k);
        let inst = Instance {
            suite: "gpd_pd".into(),
            algebra: alg.data().clone(),
            modules: vec![module_file(&big, false)],
            vectors: vec![],
            shift: 0,
        };
        assert!(replay(&inst).is_ok());
        let bogus = |i: &Instance| -> Check {
            let ctx = decode(i)?;
            let m = ctx.module(0);
            ensure!(crate::module::is_projective(&m).is_some(), "dimension {} is not projective", m.dim());
            Ok(())
        };
        assert!(bogus(&inst).is_err());
        let small = candidates(&inst).into_iter().filter(|c| bogus(c).is_err()).min_by_key(|c| c.modules[0].dim).unwrap();
        assert_eq!(small.modules[0].dim, 1);
        let text = serde_json::to_string(&small).unwrap();
        let back: Instance = serde_json::from_str(&text).unwrap();
        assert_eq!(bogus(&back), bogus(&small));
    }
}
