use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hga_core::algebra::{tensor_algebra, truncated_poly, unit_vector};
use hga_core::complex::{hom_complex, Complex};
use hga_core::module::{CoverStrategy, Module};
use hga_core::par;
use hga_core::resolution::Resolution;
use hga_core::verify::verify_suite;
use std::hint::black_box;

fn hom_matrices(p: &Complex, n: &Complex) -> Vec<hga_core::linalg::Matrix> {
    let h = hom_complex(p, n).cx;
    (h.lo()..=h.hi()).map(|k| h.d(k)).collect()
}

fn bench(c: &mut Criterion) {
    // Hom(P, k) for k over F2[x,y]/(x^2,y^2), where the ranks grow linearly
    let d = truncated_poly(2, 2);
    let a = tensor_algebra(&d, &d).unwrap();
    let reg = Module::regular(&a);
    let rad = reg.closure(&[unit_vector(4, 1), unit_vector(4, 2)]).basis();
    let k = reg.quotient(&rad).0;
    let (p, _) = Resolution::of_module(&k, CoverStrategy::Greedy).window(8);
    let n = Complex::concentrated(&Module::regular(&a), 0);

    par::set_enabled(true);
    let on = hom_matrices(&p, &n);
    let suite_on = serde_json::to_string(&verify_suite("les", 42, 20).unwrap()).unwrap();
    par::set_enabled(false);
    assert_eq!(hom_matrices(&p, &n), on, "hom complex differs between modes");
    let suite_off = serde_json::to_string(&verify_suite("les", 42, 20).unwrap()).unwrap();
    assert_eq!(suite_off, suite_on, "suite report differs between modes");

    let mut g = c.benchmark_group("hom_complex");
    for (name, on) in [("parallel", true), ("sequential", false)] {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::set_enabled(on);
            b.iter(|| black_box(hom_complex(&p, &n)))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("verify_les");
    g.sample_size(10);
    for (name, on) in [("parallel", true), ("sequential", false)] {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::set_enabled(on);
            b.iter(|| black_box(verify_suite("les", 42, 20).unwrap()))
        });
    }
    g.finish();
    par::set_enabled(true);
}

criterion_group!(benches, bench);
criterion_main!(benches);
