use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use grafting_core::oracle::{draw_pair, oracle_intersection, oracle_resolve};
use grafting_core::torus::{self, Mode, TorusClass};

fn closed_forms(c: &mut Criterion) {
    let a = TorusClass::new(3, -5);
    let b = TorusClass::new(4, 7);
    c.bench_function("resolve_sharp", |bch| {
        bch.iter(|| torus::resolve(black_box(a), black_box(b), Mode::Sharp))
    });
    c.bench_function("dehn_twist_k5", |bch| {
        bch.iter(|| torus::dehn_twist(black_box(b), black_box(a), 5))
    });
}

fn grid_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_resolve");
    for (p, q) in [(1, 1), (2, 3), (4, 5)] {
        let (ga, gb) = draw_pair(TorusClass::new(p, q), 1, TorusClass::new(q, -p), 1).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{p},{q}")),
            &(ga, gb),
            |bch, (ga, gb)| {
                bch.iter(|| {
                    oracle_intersection(ga, gb).unwrap();
                    oracle_resolve(ga, gb, Mode::Flat).unwrap()
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, closed_forms, grid_oracle);
criterion_main!(benches);
