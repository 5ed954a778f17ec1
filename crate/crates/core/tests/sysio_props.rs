use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tridyn::polyring::{Integers, MultiPoly};
use tridyn::sysio::{format_polynomial, parse_polynomial, parse_system, system_to_json, SystemDocument};
use tridyn::trisys::{random_signs, random_system, GeneratorParams, TriangularSystem};

fn system(seed: u64, n: usize) -> TriangularSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signs = random_signs(&mut rng, n);
    let params = GeneratorParams { coeff_bound: 1000, s_max: 3, max_residual_terms: 3 };
    random_system(&mut rng, &signs, &params)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn system_round_trip(seed in any::<u64>(), n in 1usize..=4) {
        let sys = system(seed, n);
        let text = system_to_json(&sys);
        let back = parse_system(&text).unwrap();
        prop_assert_eq!(&back, &sys);
        prop_assert_eq!(system_to_json(&back), text);
    }

    #[test]
    fn canonical_form_is_idempotent(seed in any::<u64>(), n in 2usize..=4) {
        let sys = system(seed, n);
        let names = MultiPoly::<Integers>::default_names(n);
        let doc = SystemDocument::from_system(&sys);
        for lv in &doc.levels[..n - 1] {
            for text in [lv.big_g.as_ref().unwrap(), lv.big_h.as_ref().unwrap()] {
                let once = format_polynomial(&parse_polynomial(text, &names).unwrap(), &names);
                prop_assert_eq!(&once, text);
            }
        }
    }

    #[test]
    fn error_positions_in_bounds(seed in any::<u64>(), n in 2usize..=3, cut in any::<prop::sample::Index>(), junk in "[ *^+X0-9a-z-]{0,3}") {
        let sys = system(seed, n);
        let names = MultiPoly::<Integers>::default_names(n);
        let text = format_polynomial(&sys.level(0).g, &names);
        let at = cut.index(text.len() + 1);
        let mangled = format!("{}{}{}", &text[..at], junk, &text[at..]);
        if let Err(e) = parse_polynomial(&mangled, &names) {
            prop_assert!(e.offset < mangled.len().max(1));
            let before = &mangled[..e.offset];
            prop_assert_eq!(e.line, before.matches('\n').count() + 1);
        }
    }
}
