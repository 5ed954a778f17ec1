//! Acceptance criteria 1-10, one PASS/FAIL line each.
//!
//! Criteria 2 and 3 are false as literally stated (see the printed details);
//! they are evaluated faithfully and may print FAIL without failing the run.
//! Any other FAIL exits nonzero.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tridyn::bounds::{
    bezout_cap, escape_frequency_bounds, gap_structure, minus_periodic_bounds, nullstellensatz_bound,
    oracle_composition, oracle_product, oracle_rational_composition, oracle_sum, uniform_frequency_bounds,
};
use tridyn::dynmodp::{
    closure_periodic_count, orbit_frequency_experiment, periodic_equation_degrees, periodic_points_bruteforce,
    periodic_points_triangular, reduce_system, stabilization, ClosureCount, DynError, ExperimentParams, Variety,
    DEFAULT_SCAN_CAP,
};
use tridyn::iterate::{growth_report, iterate_structured, GrowthReport, IterOptions};
use tridyn::polyring::{is_prime, primes_between, Exponents, Integers, MultiPoly, RationalFn};
use tridyn::trisys::{
    leading_ratio, predicted_degree, random_signs, random_system, validate_system, GeneratorParams, Sign,
    TriangularSystem,
};

const MAY_FAIL: [usize; 2] = [2, 3];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn s1() -> TriangularSystem {
    TriangularSystem::from_terms(&[(1, &[(vec![0, 1], 1)], &[(vec![0, 0], 1)]), (1, &[(vec![0, 0], 2)], &[(vec![0, 0], 3)])])
        .unwrap()
}

fn s2() -> TriangularSystem {
    TriangularSystem::from_terms(&[(-1, &[(vec![0, 0], 1)], &[(vec![0, 1], 1)]), (-1, &[(vec![0, 0], 1)], &[(vec![0, 0], 1)])])
        .unwrap()
}

fn fuzz_corpus() -> Vec<TriangularSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let params = GeneratorParams { coeff_bound: 9, s_max: 3, max_residual_terms: 3 };
    (0..200)
        .map(|idx| {
            let signs = random_signs(&mut rng, 2 + idx % 2);
            random_system(&mut rng, &signs, &params)
        })
        .collect()
}

/// Growth reports for the fuzz corpus, shared by criteria 1-3.
struct Sweep {
    reports: Vec<Result<GrowthReport, String>>,
    secs: f64,
}

fn sweep(corpus: &[TriangularSystem]) -> Sweep {
    let t = Instant::now();
    let reports = corpus
        .iter()
        .map(|sys| {
            let lead = validate_system(sys).map_err(|e| e.to_string())?;
            growth_report(sys, &lead, 6, &IterOptions::default()).map_err(|e| e.to_string())
        })
        .collect();
    Sweep { reports, secs: t.elapsed().as_secs_f64() }
}

fn criterion_1(sw: &Sweep) -> Outcome {
    let errors = sw.reports.iter().filter(|r| r.is_err()).count();
    let disagree = sw.reports.iter().flatten().filter(|r| !r.engines_agree).count();
    outcome(
        errors == 0 && disagree == 0 && sw.secs < 300.0,
        format!(
            "{} systems, k <= 6: {disagree} disagreements, {errors} aborted, {:.1}s",
            sw.reports.len(),
            sw.secs
        ),
    )
}

fn s1_class() -> Vec<TriangularSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut v = vec![s1()];
    v.extend((0..5).map(|_| random_system(&mut rng, &[Sign::Plus, Sign::Plus], &GeneratorParams::default())));
    v
}

fn criterion_2(sw: &Sweep) -> Outcome {
    let rows: Vec<_> = sw.reports.iter().flatten().flat_map(|r| &r.rows).collect();
    let off = rows.iter().filter(|r| !r.ok_deg()).count();
    let off_poly = rows.iter().filter(|r| !r.ok_deg() && r.degree_law_class).count();

    let k = 24;
    let mut worst = 0.0f64;
    let mut ratio_off = 0;
    let mut deg_off = 0;
    for sys in s1_class() {
        let lead = validate_system(&sys).unwrap();
        let st = iterate_structured(&sys, k, &IterOptions::default()).unwrap();
        let deg = st.at(k)[0].total_degree().or_zero();
        if deg != predicted_degree(&sys, &lead, 0, k) {
            deg_off += 1;
        }
        let target = lead.chain_product(0);
        let target = f64::from(u32::try_from(&target).unwrap());
        let rel = (leading_ratio(2, 0, k, deg) - target).abs() / target;
        worst = worst.max(rel);
        if rel > 0.1 {
            ratio_off += 1;
        }
    }
    outcome(
        off == 0 && ratio_off == 0 && deg_off == 0,
        format!(
            "k <= 6: {off} of {} rows differ from the recurrence ({off_poly} with every lower level e = +1, \
             where a common factor cancels; the rest sit above a level with e = -1, where degrees outgrow \
             the recurrence). S1-class at k = {k}: \
             {ratio_off} ratios outside 10% (worst {:.2}%), {deg_off} degree mismatches",
            rows.len(),
            100.0 * worst
        ),
    )
}

fn criterion_3(sw: &Sweep) -> Outcome {
    let rows: Vec<_> = sw.reports.iter().flatten().flat_map(|r| &r.rows).collect();
    let b5 = rows.iter().filter(|r| r.bound_5t.as_ref().is_some_and(|b| !b.holds)).count();
    let inner = rows.iter().filter(|r| r.bound_last_corrected.is_none() && !r.bound_l36.holds).count();
    let last_rows = rows.iter().filter(|r| r.bound_last_corrected.is_some()).count();
    let last = rows.iter().filter(|r| r.bound_last_corrected.is_some() && !r.bound_l36.holds).count();
    let corrected = rows.iter().filter(|r| r.bound_last_corrected.as_ref().is_some_and(|b| !b.holds)).count();
    outcome(
        b5 == 0 && inner == 0 && last == 0,
        format!(
            "bound_5t failures {b5}, per-level iterate bound failures {inner}, displayed last-level bound \
             failures {last} of {last_rows} (false whenever |h_n| > |g_n|, e.g. g = 1, h = 9 gives 9k > 3(k+1)); \
             corrected last-level bound failures {corrected}"
        ),
    )
}

/// Systems for criteria 4 and 5: S1, S2 and six random systems for each n <= 3.
fn periodic_matrix() -> Vec<TriangularSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let params = GeneratorParams { coeff_bound: 9, s_max: 3, max_residual_terms: 2 };
    let mut v = vec![s1(), s2()];
    for n in 1..=3 {
        for _ in 0..6 {
            let signs = random_signs(&mut rng, n);
            v.push(random_system(&mut rng, &signs, &params));
        }
    }
    v
}

fn criterion_4(matrix: &[TriangularSystem]) -> Outcome {
    let (mut equal, mut differ, mut degenerate, mut errors) = (0, 0, 0, 0);
    for sys in matrix {
        for p in primes_between(2, 31) {
            let r = reduce_system(sys, p).unwrap();
            for k in 1..=4 {
                let brute = periodic_points_bruteforce(&r.prime_map(), k, DEFAULT_SCAN_CAP);
                match (brute, periodic_points_triangular(&r, k, &r.field())) {
                    (Ok(b), Ok(t)) if b == t => equal += 1,
                    (Ok(_), Ok(_)) => differ += 1,
                    (Ok(_), Err(DynError::Degenerate { .. })) => degenerate += 1,
                    _ => errors += 1,
                }
            }
        }
    }
    let r = reduce_system(&s1(), 7).unwrap();
    let s1_pts: Vec<Vec<u64>> =
        periodic_points_triangular(&r, 1, &r.field()).unwrap().into_iter().map(|p| p.point).collect();
    let s1_ok = s1_pts == vec![vec![2, 4]];
    outcome(
        differ == 0 && errors == 0 && equal >= 500 && s1_ok,
        format!(
            "{equal} instances equal, {differ} differ, {errors} errors, {degenerate} degenerate reductions \
             (triangular solver declines); S1 mod 7, k = 1: {s1_pts:?}"
        ),
    )
}

fn criterion_5(matrix: &[TriangularSystem]) -> Outcome {
    let (mut within, mut over, mut infinite, mut uncomputed) = (0, 0, 0, 0);
    let mut tightest = 0.0f64;
    for sys in matrix {
        for k in 1..=4 {
            let Some(degs) = periodic_equation_degrees(sys, k, &IterOptions::default()).unwrap() else { continue };
            let cap = bezout_cap(&degs).unwrap();
            for p in primes_between(2, 31) {
                let r = reduce_system(sys, p).unwrap();
                if r.is_degenerate() {
                    continue;
                }
                match closure_periodic_count(&r, k) {
                    Ok(ClosureCount::Finite(c)) if BigUint::from(c) <= cap => {
                        within += 1;
                        let cap_f = cap.to_string().parse::<f64>().unwrap();
                        tightest = tightest.max(c as f64 / cap_f);
                    }
                    Ok(ClosureCount::Finite(_)) => over += 1,
                    Ok(ClosureCount::Infinite) => infinite += 1,
                    Err(_) => uncomputed += 1,
                }
            }
        }
    }
    outcome(
        over == 0 && within > 0,
        format!(
            "{within} finite counts within the cap (largest count/cap {tightest:.2}), {over} over; \
             {infinite} positive-dimensional reductions and {uncomputed} needing extensions of degree > 8 not counted"
        ),
    )
}

fn first_good_primes(sys: &TriangularSystem, count: usize) -> Vec<u64> {
    (5..).filter(|&p| is_prime(p)).filter(|&p| !reduce_system(sys, p).unwrap().is_degenerate()).take(count).collect()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let params = GeneratorParams { coeff_bound: 5, s_max: 2, max_residual_terms: 2 };
    let mut systems = vec![s1(), s2()];
    while systems.len() < 20 {
        let signs = random_signs(&mut rng, 2);
        systems.push(random_system(&mut rng, &signs, &params));
    }
    let (mut instances, mut no_majority, mut too_many, mut max_off, mut failed) = (0, 0, 0, 0, 0);
    for sys in &systems {
        let primes = first_good_primes(sys, 25);
        for k in 1..=3 {
            let st = stabilization(sys, k, &primes, &IterOptions::default()).unwrap();
            instances += 1;
            failed += st.failed.len();
            if st.majority.is_none() {
                no_majority += 1;
            }
            max_off = max_off.max(st.off_majority.len());
            if st.off_majority.len() > 5 {
                too_many += 1;
            }
        }
    }
    outcome(
        no_majority == 0 && too_many == 0,
        format!(
            "{instances} instances: {no_majority} without a strict majority, {too_many} with more than 5 \
             off-majority primes (max {max_off}); {failed} prime counts not computable"
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = 0;
    for _ in 0..10_000 {
        let n: u64 = rng.gen_range(4..=400);
        let m = rng.gen_range(2..=(n / 2) as usize);
        let mut seq: Vec<u64> = sample(&mut rng, n as usize + 1, m).into_iter().map(|x| x as u64).collect();
        seq.sort_unstable();
        let g = gap_structure(&seq, n).unwrap();
        let mm = m as u64 - 1;
        if !(g.guarantee_holds && g.r * mm <= 2 * n && 4 * n * g.count >= mm * mm) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("10000 sequences, {failures} failures"))
}

fn random_poly(rng: &mut ChaCha8Rng) -> MultiPoly<Integers> {
    loop {
        let terms: Vec<(Exponents, BigInt)> = (0..rng.gen_range(1..5))
            .map(|_| {
                let e = Exponents::from_vec((0..2).map(|_| rng.gen_range(0..3)).collect());
                (e, BigInt::from(rng.gen_range(-20i64..=20)))
            })
            .collect();
        let p = MultiPoly::from_terms(Integers, 2, terms);
        if !p.is_zero() {
            return p;
        }
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 10_000;
    let mut fails = [0usize; 4];
    for _ in 0..n {
        let ks: Vec<_> = (0..rng.gen_range(1..5)).map(|_| random_poly(&mut rng)).collect();
        fails[0] += usize::from(!oracle_sum(&ks).unwrap().holds);
        let ks: Vec<_> = (0..rng.gen_range(1..4)).map(|_| random_poly(&mut rng)).collect();
        fails[1] += usize::from(!oracle_product(&ks).unwrap().holds());
        let l = random_poly(&mut rng);
        let ks = [random_poly(&mut rng), random_poly(&mut rng)];
        fails[2] += usize::from(!oracle_composition(&l, &ks).unwrap().holds());
    }
    let (mut evaluated, mut undefined) = (0, 0);
    while evaluated < n {
        let rf = |rng: &mut ChaCha8Rng| RationalFn::new(random_poly(rng), random_poly(rng)).unwrap();
        let l = rf(&mut rng);
        let ks = [rf(&mut rng), rf(&mut rng)];
        match oracle_rational_composition(&l, &ks) {
            Ok(c) => {
                evaluated += 1;
                fails[3] += usize::from(!c.holds());
            }
            Err(_) => undefined += 1,
        }
    }
    outcome(
        fails.iter().all(|&f| f == 0),
        format!(
            "{n} instances each; failures: sum {}, product {}, composition {}, rational composition {} \
             ({undefined} undefined compositions redrawn)",
            fails[0], fails[1], fails[2], fails[3]
        ),
    )
}

fn criterion_9() -> Outcome {
    let nb = nullstellensatz_bound(1, 2, 1.0, 1).unwrap();
    let expect = 240.0 + 4928.0 * 7f64.ln();
    let ns_ok = nb.h_coeff == BigUint::from(240u32)
        && nb.log_coeff == BigUint::from(4928u32)
        && nb.log_arg == 7
        && ((nb.value - expect) / expect).abs() < 1e-6;
    let beta = uniform_frequency_bounds(2, 2, 0.5).unwrap().beta;
    let ell = escape_frequency_bounds(2, 1, 1, 0.1).unwrap().ell_min;
    let exp = minus_periodic_bounds(2, 1).unwrap().log_exponent;
    outcome(
        ns_ok && beta == 9 && ell == 2000 && exp == 37,
        format!(
            "arithmetic Nullstellensatz {} + {} log {} = {:.4}; beta = {beta}; ell threshold = {ell}; exponent = {exp}",
            nb.h_coeff, nb.log_coeff, nb.log_arg, nb.value
        ),
    )
}

fn criterion_10() -> Outcome {
    let t = Instant::now();
    let v = Variety::new(vec![MultiPoly::from_i64_terms(2, &[(vec![1, 0], 1), (vec![0, 1], -1)])]).unwrap();
    let (mut rows, mut incomplete, mut exceed) = (0, 0, 0);
    for sys in s1_class() {
        let primes: Vec<u64> = primes_between(2, 101)
            .into_iter()
            .filter(|&p| !reduce_system(&sys, p).unwrap().is_degenerate())
            .collect();
        let params = ExperimentParams { primes, ell: 64, epsilon: 0.25, samples: 32, seed: 10 };
        let exp = orbit_frequency_experiment(&sys, &v, &params).unwrap();
        for r in &exp.rows {
            rows += 1;
            if r.ell != 64 || (r.eps_ell - 16.0).abs() > 1e-12 || r.hits > r.ell {
                incomplete += 1;
            }
        }
        exceed += exp.violations;
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        rows > 0 && incomplete == 0 && secs < 120.0,
        format!(
            "{rows} sampled orbits with S(w) >= 64, each reporting #J_w and eps*ell = 16; \
             {exceed} flagged exceedances; {secs:.1}s"
        ),
    )
}

fn main() -> ExitCode {
    let corpus = fuzz_corpus();
    let sw = sweep(&corpus);
    let matrix = periodic_matrix();
    let criteria: Vec<(usize, &str, Box<dyn Fn() -> Outcome>)> = vec![
        (1, "engine equivalence", Box::new(|| criterion_1(&sw))),
        (2, "degree law", Box::new(|| criterion_2(&sw))),
        (3, "height bounds", Box::new(|| criterion_3(&sw))),
        (4, "periodic-point oracle agreement", Box::new(|| criterion_4(&matrix))),
        (5, "Bezout cap", Box::new(|| criterion_5(&matrix))),
        (6, "cross-prime stabilization", Box::new(criterion_6)),
        (7, "gap structure", Box::new(criterion_7)),
        (8, "inequality oracles", Box::new(criterion_8)),
        (9, "explicit formula values", Box::new(criterion_9)),
        (10, "orbit-frequency experiment", Box::new(criterion_10)),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in &criteria {
        let o = run();
        println!("{} criterion {id} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass && !MAY_FAIL.contains(id) {
            unexpected.push(*id);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
