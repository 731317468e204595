//! Algebraic invariants of sections under random inputs.

use std::sync::Arc;

use grd_core::groupoid::builders;
use grd_core::rng;
use grd_core::section::ReducedOptions;
use grd_core::{ConcreteBundle, FiniteGroupoidView, LengthFn, Section};
use proptest::prelude::*;

fn pair3() -> Arc<FiniteGroupoidView> {
    Arc::new(builders::pair_groupoid(3).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn involution_reverses_products(seed in any::<u64>(), dim in 1usize..3) {
        let v = pair3();
        let b = ConcreteBundle::trivial(v.clone(), dim).unwrap();
        let all: Vec<_> = (0..v.num_arrows()).collect();
        let f = Section::random(&b, &all, &mut rng::stream(seed, 0)).unwrap();
        let g = Section::random(&b, &all, &mut rng::stream(seed, 1)).unwrap();
        let lhs = f.convolve(&g).unwrap().involve().unwrap();
        let rhs = g.involve().unwrap().convolve(&f.involve().unwrap()).unwrap();
        prop_assert!(lhs.max_diff(&rhs) < 1e-12);
    }

    #[test]
    fn convolution_is_associative(seed in any::<u64>()) {
        let v = Arc::new(builders::symmetric(3).unwrap());
        let b = ConcreteBundle::trivial(v.clone(), 2).unwrap();
        let all: Vec<_> = (0..v.num_arrows()).collect();
        let s: Vec<_> = (0..3).map(|i| Section::random(&b, &all, &mut rng::stream(seed, i)).unwrap()).collect();
        let l = s[0].convolve(&s[1]).unwrap().convolve(&s[2]).unwrap();
        let r = s[0].convolve(&s[1].convolve(&s[2]).unwrap()).unwrap();
        prop_assert!(l.max_diff(&r) < 1e-11);
    }

    #[test]
    fn c_star_identity(seed in any::<u64>()) {
        let v = pair3();
        let b = ConcreteBundle::trivial(v.clone(), 2).unwrap();
        let all: Vec<_> = (0..v.num_arrows()).collect();
        let f = Section::random(&b, &all, &mut rng::stream(seed, 0)).unwrap();
        let ff = f.involve().unwrap().convolve(&f).unwrap();
        let o = ReducedOptions::default();
        let n = f.reduced_norm(&o).unwrap().value;
        let n2 = ff.reduced_norm(&o).unwrap().value;
        prop_assert!((n2 - n * n).abs() < 1e-9 * n2.max(1.0));
    }

    #[test]
    fn sobolev_norms_grow_with_p(seed in any::<u64>()) {
        let v = Arc::new(builders::integer_ball(5));
        let len = LengthFn::word_length(&v);
        let b = ConcreteBundle::trivial(v.clone(), 1).unwrap();
        let all: Vec<_> = (0..v.num_arrows()).collect();
        let f = Section::random(&b, &all, &mut rng::stream(seed, 0)).unwrap();
        let mut last = 0.0;
        for p in 0..4 {
            let s = f.sobolev(&len, p as f64).unwrap();
            prop_assert!(s >= last - 1e-12);
            last = s;
        }
    }
}
