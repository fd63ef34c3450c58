use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use grafting_core::complex::{build_complex, BuildParams};
use grafting_core::surface::{validate_configuration, Configuration};

fn enumerate(c: &mut Criterion) {
    let cfg = validate_configuration(&Configuration::standard(&["b1", "b2"])).unwrap();
    let seed = cfg.seed();
    let mut group = c.benchmark_group("build_complex_depth2");
    group.sample_size(20);
    for m in [1u32, 3, 6] {
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| {
            b.iter(|| build_complex(&cfg, &seed, &BuildParams::new(m, 2)).unwrap().edges.len())
        });
    }
    group.finish();
}

criterion_group!(benches, enumerate);
criterion_main!(benches);
