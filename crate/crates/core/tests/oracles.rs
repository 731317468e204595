//! Norm values checked against independent closed-form or linear-algebra
//! oracles.

use std::sync::Arc;

use grd_core::deaconu::LocalSystem;
use grd_core::group::GroupElem;
use grd_core::groupoid::builders;
use grd_core::rd;
use grd_core::rng;
use grd_core::section::ReducedOptions;
use grd_core::{CMat, ConcreteBundle, EvPeriodicPoint, Payload, Point, Section, C64};

#[test]
fn pair_reduced_norm_is_operator_norm() {
    for n in [2u32, 3, 5] {
        let view = Arc::new(builders::pair_groupoid(n).unwrap());
        let b = ConcreteBundle::trivial(view.clone(), 1).unwrap();
        let all: Vec<_> = (0..view.num_arrows()).collect();
        for k in 0..10 {
            let f = Section::random(&b, &all, &mut rng::stream(7, k)).unwrap();
            let m = CMat::from_fn(n as usize, n as usize, |i, j| {
                let a = all
                    .iter()
                    .find(|a| matches!(view.payload(**a), Payload::Pair { range, source } if *range as usize == i && *source as usize == j))
                    .unwrap();
                f.value(*a).blocks[0][(0, 0)]
            });
            let svd = m.clone().svd(false, false);
            let oracle = svd.singular_values.max();
            let r = f.reduced_norm(&ReducedOptions::default()).unwrap();
            assert!(r.exact);
            assert!((r.value - oracle).abs() < 1e-9 * oracle.max(1.0), "n={n}: {} vs {oracle}", r.value);
            // I-norm: max over row and column absolute sums
            let rows = (0..n as usize).map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
            let cols = (0..n as usize).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
            assert!((f.i_norm() - rows.max(cols)).abs() < 1e-12);
        }
    }
}

#[test]
fn cyclic_reduced_norm_is_max_fourier_coefficient() {
    for n in [2u32, 4, 5] {
        let view = Arc::new(builders::cyclic(n).unwrap());
        let b = ConcreteBundle::trivial(view.clone(), 1).unwrap();
        let all: Vec<_> = (0..view.num_arrows()).collect();
        for k in 0..10 {
            let f = Section::random(&b, &all, &mut rng::stream(11, k)).unwrap();
            let oracle = (0..n)
                .map(|j| {
                    all.iter()
                        .map(|a| {
                            let Payload::Group { element: GroupElem::Mod { k, .. }, .. } = view.payload(*a) else { panic!() };
                            let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64);
                            f.value(*a).blocks[0][(0, 0)] * w
                        })
                        .sum::<C64>()
                        .norm()
                })
                .fold(0.0, f64::max);
            let r = f.reduced_norm(&ReducedOptions::default()).unwrap().value;
            assert!((r - oracle).abs() < 1e-9 * oracle.max(1.0), "Z/{n}: {r} vs {oracle}");
        }
    }
}

#[test]
fn kernel_block_ratios_match_closed_form() {
    let sys = LocalSystem::full_shift(2).unwrap();
    let x = Point::Seq(EvPeriodicPoint::constant(0));
    let (_, pts) = rd::obstruction_trend(&sys, &x, &[2, 3, 4, 5], 2.0).unwrap();
    for t in &pts {
        let s: f64 = 1.0 + (1..=t.n).map(|j| 2f64.powi(j as i32 - 1) * (1.0 + 2.0 * j as f64).powi(4)).sum::<f64>();
        let oracle = 2f64.powi(t.n as i32) / s.sqrt();
        assert!((t.ratio - oracle).abs() < 1e-12, "N={}: {} vs {oracle}", t.n, t.ratio);
    }
}

#[test]
fn zeta4_bound_is_sharp() {
    let s = rd::zeta4_bound();
    let z4 = std::f64::consts::PI.powi(4) / 90.0;
    assert!(s >= z4 - 1e-15 && s - z4 < 1e-12, "{s} vs {z4}");
}
