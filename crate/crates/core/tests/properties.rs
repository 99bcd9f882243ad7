use hga_core::algebra::{triangular, truncated_poly, Algebra};
use hga_core::cohomology::{eps_hat, tate_on};
use hga_core::complex::{cone, hom_complex, is_contractible, ChainMap, Complex};
use hga_core::gorenstein::{complete_resolution, gorenstein_dimension, gpd_module, GorensteinCertificate, Gpd};
use hga_core::linalg::Matrix;
use hga_core::module::{free_cover, hom_space, is_projective, linear_dual, CoverStrategy, Module};
use hga_core::par;
use hga_core::resolution::{pd, Pd, Resolution};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn pool() -> &'static [(Algebra, GorensteinCertificate)] {
    static POOL: OnceLock<Vec<(Algebra, GorensteinCertificate)>> = OnceLock::new();
    POOL.get_or_init(|| {
        [truncated_poly(2, 2), truncated_poly(3, 3), triangular(2, 2), triangular(3, 2)]
            .into_iter()
            .map(|a| {
                let c = gorenstein_dimension(&a, 4).unwrap();
                (a, c)
            })
            .collect()
    })
}

fn random_vec(rng: &mut ChaCha8Rng, p: u32, n: usize) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..p)).collect()
}

/// A quotient or submodule of `A^r` cut out by random vectors.
fn random_module(alg: &Algebra, rng: &mut ChaCha8Rng, max_dim: usize) -> Module {
    loop {
        let free = Module::free(alg, rng.gen_range(1..=2));
        let vecs: Vec<Vec<u32>> = (0..rng.gen_range(1..=2)).map(|_| random_vec(rng, alg.p(), free.dim())).collect();
        let span = free.closure(&vecs).basis();
        let m = if rng.gen_bool(0.5) { free.submodule(&span) } else { free.quotient(&span).0 };
        if !m.is_zero() && m.dim() <= max_dim {
            return m;
        }
    }
}

fn setup(which: usize, seed: u64) -> (Algebra, GorensteinCertificate, ChaCha8Rng) {
    let (a, c) = pool()[which % pool().len()].clone();
    (a, c, ChaCha8Rng::seed_from_u64(seed))
}

fn random_hom(m: &Module, n: &Module, rng: &mut ChaCha8Rng) -> Matrix {
    let p = m.p();
    let mut f = Matrix::zeros(p, n.dim(), m.dim());
    for b in hom_space(m, n).unwrap() {
        f = f.add(&b.matrix.scale(rng.gen_range(0..p)));
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn homs_intertwine_and_ranks_add_up(which in 0usize..4, seed: u64) {
        let (_, _, mut rng) = setup(which, seed);
        let a = pool()[which % 4].0.clone();
        let (m, n) = (random_module(&a, &mut rng, 6), random_module(&a, &mut rng, 6));
        let f = random_hom(&m, &n, &mut rng);
        prop_assert!(m.is_hom_to(&n, &f));
        prop_assert_eq!(f.rank() + f.kernel().cols(), m.dim());
        prop_assert_eq!(n.dim() - f.image().cols(), n.dim() - f.rank());
    }

    #[test]
    fn linear_dual_keeps_sequences_exact(which in 0usize..4, seed: u64) {
        let (a, _, mut rng) = setup(which, seed);
        let m = random_module(&a, &mut rng, 6);
        let v = random_vec(&mut rng, a.p(), m.dim());
        let sub = m.closure(&[v]).basis();
        let (q, qmap) = m.quotient(&sub);
        // 0 -> L -> M -> M/L -> 0 and its dual 0 -> D(M/L) -> D(M) -> D(L) -> 0
        let (f, g) = (sub.transpose(), qmap.transpose());
        prop_assert!(linear_dual(&q).is_hom_to(&linear_dual(&m), &g));
        prop_assert_eq!(f.mul(&g).is_zero(), true);
        prop_assert_eq!(g.rank() + f.rank(), m.dim());
        prop_assert_eq!(g.rank(), q.dim());
    }

    #[test]
    fn covers_are_onto_and_projective_witnesses_split(which in 0usize..4, seed: u64) {
        let (a, _, mut rng) = setup(which, seed);
        let m = random_module(&a, &mut rng, 6);
        let c = free_cover(&m);
        prop_assert_eq!(c.pi.rank(), m.dim());
        prop_assert!(c.free.is_hom_to(&m, &c.pi));
        if let Some(w) = is_projective(&m) {
            prop_assert!(w.cover.pi.mul(&w.section).is_identity());
        }
        // a free module is always projective
        prop_assert!(is_projective(&Module::free(&a, 1)).is_some());
    }

    #[test]
    fn resolutions_are_quasiisomorphisms_and_square_to_zero(which in 0usize..4, seed: u64) {
        let (a, _, mut rng) = setup(which, seed);
        let m = random_module(&a, &mut rng, 5);
        let strategy = [CoverStrategy::Greedy, CoverStrategy::AllBasis, CoverStrategy::Redundant][(seed % 3) as usize];
        let (p, pi) = Resolution::of_module(&m, strategy).window(3);
        prop_assert!(p.is_free());
        prop_assert!(pi.is_morphism());
        prop_assert!(pi.is_quasiiso_on(0, 2));
        let n = Complex::concentrated(&random_module(&a, &mut rng, 4), 1);
        for c in [hom_complex(&p, &n).cx, cone(&pi).unwrap().cx, p.shift(3)] {
            for k in c.lo() + 2..=c.hi() {
                prop_assert!(c.d(k - 1).mul(&c.d(k)).is_zero());
            }
        }
    }

    #[test]
    fn hom_differential_sign(which in 0usize..4, seed: u64, k in -3i64..=1) {
        let (a, _, mut rng) = setup(which, seed);
        let (p, _) = Resolution::of_module(&random_module(&a, &mut rng, 4), CoverStrategy::Greedy).window(2);
        let n = Complex::concentrated(&random_module(&a, &mut rng, 4), 0).shift(-1);
        let n = Complex::direct_sum(&[n.clone(), Complex::concentrated(&n.module(-1), 0)]).0;
        let h = hom_complex(&p, &n);
        let v = random_vec(&mut rng, a.p(), h.dim(k));
        let f = h.element(k, &v);
        // d(f) = d^N f - (-1)^k f d^M, component by component
        let df = ChainMap::from_fn(&p, &n, k - 1, |i| n.d(i + k).mul(&f.comp(i)).sub(&f.comp(i - 1).mul(&p.d(i)).signed(k)));
        prop_assert_eq!(h.coords(&df), h.cx.d(k).mul_vec(&v));
    }

    #[test]
    fn quasiiso_iff_cone_exact(which in 0usize..4, seed: u64) {
        let (a, _, mut rng) = setup(which, seed);
        let m = random_module(&a, &mut rng, 5);
        let (p, pi) = Resolution::of_module(&m, CoverStrategy::Greedy).window(4);
        let mc = Complex::concentrated(&m, 0);
        let p = p.restrict(0, 3);
        let pi = ChainMap::from_fn(&p, &mc, 0, |i| pi.comp(i));
        for f in [pi.clone(), ChainMap::zero(&p, &mc, 0)] {
            let c = cone(&f).unwrap().cx;
            prop_assert_eq!(f.is_quasiiso_on(0, 2), c.is_exact_on(0, 3));
        }
        // the cone of an identity is free, exact and contractible
        let id = cone(&ChainMap::identity(&p)).unwrap().cx;
        prop_assert!(id.is_exact() && is_contractible(&id));
    }

    #[test]
    fn gpd_bounded_by_pd(which in 0usize..4, seed: u64) {
        let (a, cert, mut rng) = setup(which, seed);
        let m = random_module(&a, &mut rng, 5);
        let g = gpd_module(&m, &cert).unwrap();
        match pd(&Resolution::of_module(&m, CoverStrategy::Greedy), Some(cert.n), 4) {
            Pd::Finite(d) => prop_assert_eq!(g, Gpd::Finite(d)),
            Pd::Infinite => prop_assert!(g <= Gpd::Finite(cert.n as i64)),
            other => prop_assert!(false, "unexpected pd {}", other),
        }
    }

    #[test]
    fn tate_tables_shift_and_eps_hat_behaves(which in 0usize..4, seed: u64, j in -2i64..=2) {
        let (a, cert, mut rng) = setup(which, seed);
        let (m, n) = (random_module(&a, &mut rng, 4), random_module(&a, &mut rng, 4));
        let (mc, nc) = (Complex::concentrated(&m, 0), Complex::concentrated(&n, 0));
        let cr = complete_resolution(&mc, &cert, CoverStrategy::Greedy).unwrap();
        let t = tate_on(&cr, &nc, -3, 3).unwrap();
        let crs = complete_resolution(&mc.shift(j), &cert, CoverStrategy::Greedy).unwrap();
        let ts = tate_on(&crs, &nc, -3 + j, 3 + j).unwrap();
        let shifted: Vec<usize> = ts.iter().map(|r| r.1).collect();
        prop_assert_eq!(t.iter().map(|r| r.1).collect::<Vec<_>>(), shifted);
        let g = match cr.gpd { Gpd::Finite(g) => g, Gpd::NegInfinity => 0 };
        for (i, e) in eps_hat(&cr, &nc, -3, 3).unwrap() {
            if i < 0 {
                prop_assert!(e.is_zero());
            } else if i > g {
                prop_assert!(e.rows() == e.cols() && e.rank() == e.rows());
            }
        }
    }

    #[test]
    fn lazy_windows_do_not_depend_on_request_order(which in 0usize..4, seed: u64, a0 in -4i64..0, b0 in 0i64..4) {
        let (a, cert, mut rng) = setup(which, seed);
        let mc = Complex::concentrated(&random_module(&a, &mut rng, 4), 0);
        let one = complete_resolution(&mc, &cert, CoverStrategy::Greedy).unwrap();
        let two = complete_resolution(&mc, &cert, CoverStrategy::Greedy).unwrap();
        one.t_window(a0, 0).unwrap();
        one.t_window(0, b0).unwrap();
        let (x, y) = (one.t_window(a0, b0).unwrap(), two.t_window(a0, b0).unwrap());
        for i in a0..=b0 {
            let (mx, my) = (x.module(i), y.module(i));
            prop_assert_eq!(mx.actions(), my.actions());
            prop_assert_eq!(x.d(i), y.d(i));
        }
    }

    #[test]
    fn parallel_and_sequential_hom_agree(which in 0usize..4, seed: u64) {
        let (a, _, mut rng) = setup(which, seed);
        let (p, _) = Resolution::of_module(&random_module(&a, &mut rng, 5), CoverStrategy::Greedy).window(3);
        let n = Complex::concentrated(&random_module(&a, &mut rng, 5), 0);
        let h1 = hom_complex(&p, &n).cx;
        par::set_enabled(false);
        let h2 = hom_complex(&p, &n).cx;
        par::set_enabled(true);
        prop_assert_eq!((h1.lo(), h1.hi()), (h2.lo(), h2.hi()));
        for k in h1.lo()..=h1.hi() {
            prop_assert_eq!(h1.d(k), h2.d(k));
        }
    }
}
