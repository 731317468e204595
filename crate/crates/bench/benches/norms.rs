use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use grd_core::deaconu::{dr_view, LocalSystem};
use grd_core::groupoid::builders;
use grd_core::rng;
use grd_core::section::ReducedOptions;
use grd_core::{ConcreteBundle, EvPeriodicPoint, LengthFn, Point, Section};

fn pair_norms(c: &mut Criterion) {
    let mut g = c.benchmark_group("pair");
    for n in [3u32, 8, 16] {
        let view = Arc::new(builders::pair_groupoid(n).unwrap());
        let b = ConcreteBundle::trivial(view.clone(), 2).unwrap();
        let all: Vec<_> = (0..view.num_arrows()).collect();
        let f = Section::random(&b, &all, &mut rng::stream(0, 0)).unwrap();
        let len = LengthFn::discrete(&view);
        g.bench_with_input(BenchmarkId::new("reduced", n), &f, |bch, f| {
            bch.iter(|| black_box(f.reduced_norm(&ReducedOptions::default()).unwrap().value))
        });
        g.bench_with_input(BenchmarkId::new("sobolev-p2", n), &f, |bch, f| bch.iter(|| black_box(f.sobolev(&len, 2.0).unwrap())));
        g.bench_with_input(BenchmarkId::new("convolve", n), &f, |bch, f| bch.iter(|| black_box(f.convolve(f).unwrap())));
    }
    g.finish();
}

fn shift_truncation(c: &mut Criterion) {
    let mut g = c.benchmark_group("full-shift");
    g.sample_size(20);
    let sys = LocalSystem::full_shift(2).unwrap();
    let x = Point::Seq(EvPeriodicPoint::constant(0));
    for r in [4usize, 6] {
        g.bench_with_input(BenchmarkId::new("dr-fiber", r), &r, |bch, r| bch.iter(|| black_box(sys.dr_fiber(&x, *r).arrows.len())));
        let (view, _, _) = dr_view(&sys, &[x.clone()], r).unwrap();
        let view = Arc::new(view);
        let b = ConcreteBundle::trivial(view.clone(), 1).unwrap();
        let u = view.unit_id(&x).unwrap();
        let ball = view.source_fiber(u).to_vec();
        let f = Section::indicator(&b, ball).unwrap();
        let units = [u];
        let opts = ReducedOptions {
            units: Some(&units),
            ..Default::default()
        };
        g.bench_with_input(BenchmarkId::new("reduced-one-unit", r), &f, |bch, f| bch.iter(|| black_box(f.reduced_norm(&opts).unwrap().value)));
    }
    g.finish();
}

criterion_group!(benches, pair_norms, shift_truncation);
criterion_main!(benches);
