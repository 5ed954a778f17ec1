use std::collections::BTreeSet;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tridyn::bounds::{
    bezout_cap, escape_frequency_bounds, gap_structure, nullstellensatz_bound, oracle_composition, oracle_growth,
    oracle_product, oracle_rational_composition, oracle_sum, uniform_frequency_bounds,
};
use tridyn::iterate::IterOptions;
use tridyn::polyring::{Exponents, Integers, MultiPoly, RationalFn};
use tridyn::trisys::{random_signs, random_system, GeneratorParams};

fn poly_strategy(nvars: usize) -> impl Strategy<Value = MultiPoly<Integers>> {
    prop::collection::vec((prop::collection::vec(0u32..3, nvars), -20i64..=20), 1..5)
        .prop_map(move |terms| {
            MultiPoly::from_terms(
                Integers,
                nvars,
                terms.into_iter().map(|(e, c)| (Exponents::from_vec(e), BigInt::from(c))),
            )
        })
        .prop_filter("nonzero", |p| !p.is_zero())
}

fn increasing(max_n: u64) -> impl Strategy<Value = (Vec<u64>, u64)> {
    (4u64..max_n).prop_flat_map(|n| {
        let m_max = (n / 2) as usize;
        (prop::collection::btree_set(0..=n, 2..=m_max.max(2)), Just(n))
            .prop_filter("M <= N/2", |(s, n)| 2 * s.len() as u64 <= *n)
            .prop_map(|(s, n): (BTreeSet<u64>, u64)| (s.into_iter().collect(), n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn gap_guarantee((seq, n) in increasing(200)) {
        let g = gap_structure(&seq, n).unwrap();
        let m = seq.len() as u64;
        prop_assert!(g.guarantee_holds);
        prop_assert!(g.r * (m - 1) <= 2 * n);
        prop_assert!(4 * n * g.count >= (m - 1) * (m - 1));
    }

    #[test]
    fn sum_oracle_holds(ks in prop::collection::vec(poly_strategy(2), 1..5)) {
        let c = oracle_sum(&ks).unwrap();
        prop_assert!(c.holds, "{:?}", c);
    }

    #[test]
    fn product_oracle_holds(ks in prop::collection::vec(poly_strategy(2), 1..4)) {
        let c = oracle_product(&ks).unwrap();
        prop_assert!(c.holds(), "{:?}", c);
    }

    #[test]
    fn composition_oracle_holds(l in poly_strategy(2), k1 in poly_strategy(2), k2 in poly_strategy(2)) {
        let c = oracle_composition(&l, &[k1, k2]).unwrap();
        prop_assert!(c.holds(), "{:?}", c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn rational_composition_oracle_holds(
        ln in poly_strategy(2), ld in poly_strategy(2),
        a in poly_strategy(2), b in poly_strategy(2), c in poly_strategy(2), d in poly_strategy(2),
    ) {
        let l = RationalFn::new(ln, ld).unwrap();
        let ks = [RationalFn::new(a, b).unwrap(), RationalFn::new(c, d).unwrap()];
        if let Ok(check) = oracle_rational_composition(&l, &ks) {
            prop_assert!(check.holds(), "{:?}", check);
        }
    }

    #[test]
    fn formulas_are_monotone(n in 1u64..4, d in 2u64..6, h in 0.0f64..10.0, s in 1u64..5, eps in 0.01f64..1.0, l in 1u64..6) {
        let base = nullstellensatz_bound(n, d, h, s).unwrap().value;
        prop_assert!(nullstellensatz_bound(n + 1, d, h, s).unwrap().value > base);
        prop_assert!(nullstellensatz_bound(n, d + 1, h, s).unwrap().value > base);
        prop_assert!(nullstellensatz_bound(n, d, h + 1.0, s).unwrap().value > base);
        prop_assert!(nullstellensatz_bound(n, d, h, s + 1).unwrap().value > base);
        let n2 = n + 1;
        let t = escape_frequency_bounds(n2, s, d, eps).unwrap().ell_threshold;
        prop_assert!(escape_frequency_bounds(n2 + 1, s, d, eps).unwrap().ell_threshold > t);
        prop_assert!(escape_frequency_bounds(n2, s + 1, d, eps).unwrap().ell_threshold > t);
        prop_assert!(escape_frequency_bounds(n2, s, d + 1, eps).unwrap().ell_threshold > t);
        prop_assert!(escape_frequency_bounds(n2, s, d, eps * 0.9).unwrap().ell_threshold > t);
        let u = uniform_frequency_bounds(n2, l, eps).unwrap();
        prop_assert!(uniform_frequency_bounds(n2, l + 1, eps).unwrap().ell_threshold > u.ell_threshold);
        prop_assert!(uniform_frequency_bounds(n2, l, eps * 0.9).unwrap().ell_threshold > u.ell_threshold);
        prop_assert!(u.beta as f64 > 2.0 * l as f64 / eps - 1e-9);
    }

    #[test]
    fn bezout_cap_monotone(degs in prop::collection::vec(1u64..20, 1..5), i in 0usize..5) {
        let i = i % degs.len();
        let mut bigger = degs.clone();
        bigger[i] += 1;
        prop_assert!(bezout_cap(&bigger).unwrap() > bezout_cap(&degs).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn growth_oracles_hold(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let signs = random_signs(&mut rng, n);
        let params = GeneratorParams { coeff_bound: 6, s_max: 2, max_residual_terms: 2 };
        let sys = random_system(&mut rng, &signs, &params);
        let kmax = if n == 2 { 5 } else { 3 };
        for row in oracle_growth(&sys, kmax, &IterOptions::default()).unwrap() {
            if let Some(b) = &row.bound_5t {
                prop_assert!(b.holds, "5t i={} k={}", row.i, row.k);
            }
            match &row.bound_last_corrected {
                Some(c) => prop_assert!(c.holds, "last level i={} k={}", row.i, row.k),
                None => prop_assert!(row.bound_iterate.holds, "iterate bound i={} k={}", row.i, row.k),
            }
        }
    }
}
