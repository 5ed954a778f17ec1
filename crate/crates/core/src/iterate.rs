//! Iteration engines for triangular systems.
//!
//! The naive engine substitutes `F^{(k)} = F ∘ F^{(k-1)}` directly. The
//! structured engine builds each level from its substitution sequence
//! `G_i^{(j)}`, `H_i^{(j)}`: products and accumulated sums on `e_i = +1`
//! levels, two-term continuant recurrences on `e_i = -1` levels. Both engines
//! follow the same orientation, so their iterates agree as rational functions.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::polyring::{compose_rational_fn, compose_shared, HeightValue, Integers, MultiPoly, PolyError, RationalFn};
use crate::trisys::{predicted_degrees, LeadingData, Sign, TriangularSystem};

pub const DEFAULT_TERM_CAP: usize = 10_000_000;

#[derive(Clone, Copy, Debug)]
pub struct IterOptions {
    /// Abort once any intermediate polynomial exceeds this many terms.
    pub term_cap: usize,
    /// Reduce naive iterates to coprime form after every step.
    pub normalize_naive: bool,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions {
            term_cap: DEFAULT_TERM_CAP,
            normalize_naive: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IterError {
    #[error("level {level}, iterate {k}: {terms} terms exceed the cap of {cap}")]
    TermGuard { level: usize, k: usize, terms: usize, cap: usize },
    #[error("level {level} has e = {found}, the requested engine needs the other sign")]
    SignMismatch { level: usize, found: i64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn guard(f: &RationalFn<Integers>, level: usize, k: usize, cap: usize) -> Result<(), IterError> {
    let terms = f.num_terms();
    if terms > cap {
        return Err(IterError::TermGuard { level: level + 1, k, terms, cap });
    }
    Ok(())
}

fn identity(n: usize) -> Vec<RationalFn<Integers>> {
    (0..n).map(|v| RationalFn::var(Integers, n, v)).collect()
}

/// `F^{(0)}, ..., F^{(kmax)}` by repeated substitution.
pub fn naive_sequence(
    sys: &TriangularSystem,
    kmax: usize,
    opts: &IterOptions,
) -> Result<Vec<Vec<RationalFn<Integers>>>, IterError> {
    let n = sys.n();
    let comps = sys.components();
    let mut out = vec![identity(n)];
    for k in 1..=kmax {
        let prev = out.last().unwrap();
        let mut cur = Vec::with_capacity(n);
        for (i, f) in comps.iter().enumerate() {
            let mut g = compose_rational_fn(f, prev)?;
            if opts.normalize_naive {
                g = g.normalize()?;
            }
            guard(&g, i, k, opts.term_cap)?;
            cur.push(g);
        }
        out.push(cur);
    }
    Ok(out)
}

/// `F^{(k)}` by repeated substitution.
pub fn iterate_naive(sys: &TriangularSystem, k: usize, opts: &IterOptions) -> Result<Vec<RationalFn<Integers>>, IterError> {
    Ok(naive_sequence(sys, k, opts)?.pop().unwrap())
}

/// `G_i^{(j)} = g / den` and `H_i^{(j)} = h / den` over a shared denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    pub g: MultiPoly<Integers>,
    pub h: MultiPoly<Integers>,
    pub den: MultiPoly<Integers>,
}

impl Substitution {
    pub fn g_fn(&self) -> RationalFn<Integers> {
        RationalFn::new(self.g.clone(), self.den.clone()).expect("nonzero denominator")
    }

    pub fn h_fn(&self) -> RationalFn<Integers> {
        RationalFn::new(self.h.clone(), self.den.clone()).expect("nonzero denominator")
    }
}

/// Building blocks of `F_i^{(k)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Continuants {
    /// `F = (X_i prod + acc) / den`: `prod` is the product of the substituted
    /// `G` numerators, `den` the product of the shared denominators.
    Plus {
        prod: MultiPoly<Integers>,
        acc: MultiPoly<Integers>,
        den: MultiPoly<Integers>,
    },
    /// `F = (X_i a + b) / (X_i c + d)`. With polynomial substitutions
    /// `a, b, c, d` are `R_k, S_k, R_{k-1}, S_{k-1}`.
    Minus {
        a: MultiPoly<Integers>,
        b: MultiPoly<Integers>,
        c: MultiPoly<Integers>,
        d: MultiPoly<Integers>,
    },
}

/// Structured iteration of one level up to `k`.
#[derive(Clone, Debug)]
pub struct IterationState {
    /// Zero-based level.
    pub level: usize,
    pub sign: Sign,
    /// `subs[j - 1]` holds `G_i^{(j)}`, `H_i^{(j)}` for `1 <= j <= k`.
    pub subs: Vec<Substitution>,
    /// `continuants[j]` for `0 <= j <= k`.
    pub continuants: Vec<Continuants>,
    /// Assembled, unreduced `F_i^{(j)}` for `0 <= j <= k`.
    pub iterates: Vec<RationalFn<Integers>>,
}

/// Structured iterates of every level.
#[derive(Clone, Debug)]
pub struct StructuredIterates {
    pub levels: Vec<IterationState>,
}

impl StructuredIterates {
    /// `F^{(k)}` as a vector of unreduced rational functions.
    pub fn at(&self, k: usize) -> Vec<RationalFn<Integers>> {
        self.levels.iter().map(|l| l.iterates[k].clone()).collect()
    }
}

fn substitutions(
    sys: &TriangularSystem,
    i: usize,
    kmax: usize,
    lower: &[IterationState],
) -> Result<Vec<Substitution>, IterError> {
    let n = sys.n();
    let lv = sys.level(i);
    let mut out = Vec::with_capacity(kmax);
    for j in 1..=kmax {
        let mut args = identity(n);
        for st in lower {
            args[st.level] = st.iterates[j - 1].clone();
        }
        let (mut nums, den) = compose_shared(&[&lv.g, &lv.h], &args)?;
        let h = nums.pop().unwrap();
        let g = nums.pop().unwrap();
        out.push(Substitution { g, h, den });
    }
    Ok(out)
}

fn structured_level(
    sys: &TriangularSystem,
    i: usize,
    kmax: usize,
    lower: &[IterationState],
    opts: &IterOptions,
) -> Result<IterationState, IterError> {
    let n = sys.n();
    let lv = sys.level(i);
    let subs = substitutions(sys, i, kmax, lower)?;
    let x = MultiPoly::var(Integers, n, i);
    let zero = MultiPoly::zero(Integers, n);
    let one = MultiPoly::one(Integers, n);
    let mut continuants = Vec::with_capacity(kmax + 1);
    let mut iterates = Vec::with_capacity(kmax + 1);
    match lv.e {
        Sign::Plus => {
            let (mut prod, mut acc, mut den) = (one.clone(), zero.clone(), one.clone());
            for j in 0..=kmax {
                if j > 0 {
                    let s = &subs[j - 1];
                    acc = &(&s.g * &acc) + &(&s.h * &den);
                    prod = &prod * &s.g;
                    den = &den * &s.den;
                }
                let f = RationalFn::new(&(&x * &prod) + &acc, den.clone())?;
                guard(&f, i, j, opts.term_cap)?;
                iterates.push(f);
                continuants.push(Continuants::Plus {
                    prod: prod.clone(),
                    acc: acc.clone(),
                    den: den.clone(),
                });
            }
        }
        Sign::Minus => {
            let (mut a, mut b, mut c, mut d) = (one.clone(), zero.clone(), zero.clone(), one.clone());
            for j in 0..=kmax {
                if j > 0 {
                    let s = &subs[j - 1];
                    let na = &(&s.g * &c) + &(&s.h * &a);
                    let nb = &(&s.g * &d) + &(&s.h * &b);
                    c = &s.den * &a;
                    d = &s.den * &b;
                    a = na;
                    b = nb;
                }
                let f = RationalFn::new(&(&x * &a) + &b, &(&x * &c) + &d)?;
                guard(&f, i, j, opts.term_cap)?;
                iterates.push(f);
                continuants.push(Continuants::Minus {
                    a: a.clone(),
                    b: b.clone(),
                    c: c.clone(),
                    d: d.clone(),
                });
            }
        }
    }
    Ok(IterationState {
        level: i,
        sign: lv.e,
        subs,
        continuants,
        iterates,
    })
}

/// Structured iterates of all levels for `0 <= k <= kmax`, bottom-up.
pub fn iterate_structured(sys: &TriangularSystem, kmax: usize, opts: &IterOptions) -> Result<StructuredIterates, IterError> {
    let n = sys.n();
    let mut levels: Vec<IterationState> = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let st = structured_level(sys, i, kmax, &levels, opts)?;
        levels.push(st);
    }
    levels.reverse();
    Ok(StructuredIterates { levels })
}

fn level_with_sign(
    sys: &TriangularSystem,
    i: usize,
    k: usize,
    want: Sign,
    opts: &IterOptions,
) -> Result<IterationState, IterError> {
    let e = sys.level(i).e;
    if e != want {
        return Err(IterError::SignMismatch {
            level: i + 1,
            found: e.as_i64(),
        });
    }
    let below = iterate_structured_below(sys, i, k, opts)?;
    structured_level(sys, i, k, &below, opts)
}

fn iterate_structured_below(
    sys: &TriangularSystem,
    i: usize,
    k: usize,
    opts: &IterOptions,
) -> Result<Vec<IterationState>, IterError> {
    let mut levels: Vec<IterationState> = Vec::new();
    for m in (i + 1..sys.n()).rev() {
        let st = structured_level(sys, m, k, &levels, opts)?;
        levels.push(st);
    }
    Ok(levels)
}

/// Product-and-sum iteration of an `e_i = +1` level (zero-based `i`).
pub fn iterate_structured_plus(
    sys: &TriangularSystem,
    i: usize,
    k: usize,
    opts: &IterOptions,
) -> Result<IterationState, IterError> {
    level_with_sign(sys, i, k, Sign::Plus, opts)
}

/// Continuant iteration of an `e_i = -1` level (zero-based `i`).
pub fn iterate_structured_minus(
    sys: &TriangularSystem,
    i: usize,
    k: usize,
    opts: &IterOptions,
) -> Result<IterationState, IterError> {
    level_with_sign(sys, i, k, Sign::Minus, opts)
}

/// `A^k` for `A = [[h, g], [1, 0]]`.
pub fn mobius_power(g: &BigInt, h: &BigInt, k: usize) -> [[BigInt; 2]; 2] {
    let mut m = [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]];
    for _ in 0..k {
        m = [
            [h * &m[0][0] + g * &m[1][0], h * &m[0][1] + g * &m[1][1]],
            [m[0][0].clone(), m[0][1].clone()],
        ];
    }
    m
}

/// `F_n^{(k)}` in closed form: `g^k X + (g^{k-1} + ... + 1) h` for `e_n = +1`,
/// the Möbius map of `A^k` for `e_n = -1`.
pub fn closed_form_last(sys: &TriangularSystem, k: usize) -> RationalFn<Integers> {
    let n = sys.n();
    let (g, h) = sys.last_coefficients();
    let x = MultiPoly::var(Integers, n, n - 1);
    let c = |v: BigInt| MultiPoly::constant(Integers, n, v);
    match sys.level(n - 1).e {
        Sign::Plus => {
            let gk = num_traits::pow(g.clone(), k);
            let geom: BigInt = (0..k).map(|j| num_traits::pow(g.clone(), j)).sum();
            RationalFn::from_poly(&(&x * &c(gk)) + &c(geom * h))
        }
        Sign::Minus => {
            let [[a, b], [cc, d]] = mobius_power(&g, &h, k);
            RationalFn::new(&(&x * &c(a)) + &c(b), &(&x * &c(cc)) + &c(d)).expect("A^k is invertible")
        }
    }
}

/// Exact comparison result of one height inequality `lhs <= rhs`, both sides
/// given as the exponentials of the logarithmic forms.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub lhs: BigInt,
    pub rhs: BigInt,
    pub holds: bool,
    /// `log rhs - log lhs`.
    pub slack: f64,
}

impl BoundCheck {
    pub fn new(lhs: BigInt, rhs: BigInt) -> Self {
        let holds = lhs <= rhs;
        let slack = crate::polyring::bigint_ln(&rhs) - crate::polyring::bigint_ln(&lhs);
        BoundCheck { lhs, rhs, holds, slack }
    }

    /// `log rhs`.
    pub fn log_bound(&self) -> f64 {
        crate::polyring::bigint_ln(&self.rhs)
    }
}

/// One row of a growth report, for level `i` (one-based) and iterate `k`.
#[derive(Clone, Debug)]
pub struct GrowthRow {
    pub i: usize,
    pub k: usize,
    pub deg_measured: u64,
    pub deg_predicted: u64,
    /// Degree of the unreduced structured representation.
    pub deg_structured: u64,
    /// Height of the coprime representative.
    pub h_measured: HeightValue,
    /// Height of the unreduced structured representation.
    pub h_structured: HeightValue,
    /// Inequality for `h(P_i^{(k)})` with `P_i` the leading polynomial
    /// (`G_i` or `H_i`); `None` on the last level or for `k < 2`.
    pub bound_5t: Option<BoundCheck>,
    /// Per-level iterate bound; on the last level the closed-form bound.
    pub bound_l36: BoundCheck,
    /// A bound on the last level that holds for every `g_n`, `h_n`.
    pub bound_last_corrected: Option<BoundCheck>,
    /// Degree law applies: every level below has `e = +1`.
    pub degree_law_class: bool,
    pub t_naive_ns: u128,
    pub t_struct_ns: u128,
}

impl GrowthRow {
    pub fn ok_deg(&self) -> bool {
        self.deg_measured == self.deg_predicted
    }

    pub fn ok_h(&self) -> bool {
        self.bound_l36.holds && self.bound_5t.as_ref().map_or(true, |b| b.holds)
    }
}

#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub n: usize,
    pub kmax: usize,
    /// `max deg F_j` and `max h(F_j)` of the system.
    pub d: u64,
    pub h: HeightValue,
    pub rows: Vec<GrowthRow>,
    /// Naive and structured iterates agree as functions at every `k`.
    pub engines_agree: bool,
}

fn max_coeff(f: &RationalFn<Integers>) -> BigInt {
    f.max_abs_coeff()
}

/// Degree, height and bound sweep for `1 <= k <= kmax` on every level.
pub fn growth_report(
    sys: &TriangularSystem,
    lead: &LeadingData,
    kmax: usize,
    opts: &IterOptions,
) -> Result<GrowthReport, IterError> {
    let n = sys.n();
    let metrics = crate::trisys::system_metrics(sys)?;
    let hmax = metrics.h.exact_max.clone();

    let t0 = Instant::now();
    let naive = naive_sequence(sys, kmax, opts)?;
    let t_naive = t0.elapsed().as_nanos();
    let t1 = Instant::now();
    let st = iterate_structured(sys, kmax, opts)?;
    let t_struct = t1.elapsed().as_nanos();

    let predicted = predicted_degrees(sys, lead, kmax);
    let mut engines_agree = true;
    let mut rows = Vec::new();
    let np1 = BigInt::from(n as u64 + 1);
    let (g_n, h_n) = sys.last_coefficients();

    for i in 0..n {
        let level = &st.levels[i];
        // Coprime heights and degrees of the leading substitutions P^{(j)}.
        let mut p_max = Vec::with_capacity(kmax);
        let mut p_deg = Vec::with_capacity(kmax);
        for s in &level.subs {
            let p = match level.sign {
                Sign::Plus => s.g_fn(),
                Sign::Minus => s.h_fn(),
            }
            .normalize()?;
            p_max.push(max_coeff(&p));
            p_deg.push(p.total_degree().or_zero());
        }
        for k in 1..=kmax {
            let reduced;
            let measured = if opts.normalize_naive {
                &naive[k][i]
            } else {
                reduced = naive[k][i].normalize()?;
                &reduced
            };
            let structured = &level.iterates[k];
            if !structured.same_function_as_reduced(measured) {
                engines_agree = false;
            }
            let deg = measured.total_degree().or_zero();
            let h_measured = measured.height()?;
            let h_structured = structured.height()?;
            let lhs = h_measured.exact_max.clone();

            let (bound_5t, bound_l36, corrected) = if i + 1 < n {
                let b5 = (k >= 2).then(|| {
                    let sum_deg: u64 = p_deg[..k - 1].iter().sum();
                    let base = &hmax * BigInt::from((n - 1 - i) as u64) * num_traits::pow(np1.clone(), metrics.d as usize);
                    let rhs = num_traits::pow(base, sum_deg as usize) * &hmax;
                    BoundCheck::new(p_max[k - 1].clone(), rhs)
                });
                let prod: BigInt = p_max[..k].iter().product();
                let twos = match level.sign {
                    Sign::Plus => BigInt::from(2),
                    Sign::Minus => num_traits::pow(BigInt::from(2), k + 1),
                };
                let rhs = num_traits::pow(np1.clone(), (k + 1) * deg as usize) * prod * twos;
                (b5, BoundCheck::new(lhs.clone(), rhs), None)
            } else {
                let (literal, corrected) = last_level_bounds(sys.level(n - 1).e, &g_n, &h_n, n, k);
                (None, BoundCheck::new(lhs.clone(), literal), Some(BoundCheck::new(lhs.clone(), corrected)))
            };
            rows.push(GrowthRow {
                i: i + 1,
                k,
                deg_measured: deg,
                deg_predicted: predicted[i][k],
                deg_structured: structured.total_degree().or_zero(),
                h_measured,
                h_structured,
                bound_5t,
                bound_l36,
                bound_last_corrected: corrected,
                degree_law_class: sys.polynomial_below(i),
                t_naive_ns: t_naive,
                t_struct_ns: t_struct,
            });
        }
    }
    Ok(GrowthReport {
        n,
        kmax,
        d: metrics.d,
        h: metrics.h,
        rows,
        engines_agree,
    })
}

/// Last-level height bounds as exponentials: the displayed closed-form
/// bound `|g_n|^k (n+1)(k+1)` (resp. `|h_n|^k (k+1)(n+1)`), and a bound valid
/// for all parameters, `max(|g_n|, |h_n|, 1)^k (k+1)` (resp.
/// `max(|g_n| + |h_n|, 1)^k`).
pub fn last_level_bounds(e: Sign, g: &BigInt, h: &BigInt, n: usize, k: usize) -> (BigInt, BigInt) {
    let nk = BigInt::from((n as u64 + 1) * (k as u64 + 1));
    match e {
        Sign::Plus => {
            let literal = num_traits::pow(g.abs(), k) * &nk;
            let m = g.abs().max(h.abs()).max(BigInt::one());
            (literal, num_traits::pow(m, k) * BigInt::from(k as u64 + 1))
        }
        Sign::Minus => {
            let literal = num_traits::pow(h.abs(), k) * &nk;
            let m = (g.abs() + h.abs()).max(BigInt::one());
            (literal, num_traits::pow(m, k))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trisys::validate_system;

    fn s1() -> TriangularSystem {
        TriangularSystem::from_terms(&[
            (1, &[(vec![0, 1], 1)], &[(vec![0, 0], 1)]),
            (1, &[(vec![0, 0], 2)], &[(vec![0, 0], 3)]),
        ])
        .unwrap()
    }

    fn s2() -> TriangularSystem {
        TriangularSystem::from_terms(&[
            (-1, &[(vec![0, 0], 1)], &[(vec![0, 1], 1)]),
            (-1, &[(vec![0, 0], 1)], &[(vec![0, 0], 1)]),
        ])
        .unwrap()
    }

    #[test]
    fn naive_s1_second_iterate() {
        let f = iterate_naive(&s1(), 2, &IterOptions::default()).unwrap();
        assert_eq!(f[0].to_string(), "2*X1*X2^2 + 3*X1*X2 + 2*X2 + 4");
        assert_eq!(f[1].to_string(), "4*X2 + 9");
    }

    #[test]
    fn naive_zero_and_one() {
        let s = s1();
        let seq = naive_sequence(&s, 1, &IterOptions::default()).unwrap();
        assert_eq!(seq[0][0].to_string(), "X1");
        assert_eq!(seq[0][1].to_string(), "X2");
        for (a, b) in seq[1].iter().zip(s.components()) {
            assert!(a.same_function(&b));
        }
    }

    #[test]
    fn structured_plus_s1() {
        let st = iterate_structured_plus(&s1(), 0, 2, &IterOptions::default()).unwrap();
        match &st.continuants[2] {
            Continuants::Plus { prod, acc, den } => {
                assert_eq!(prod.to_string(), "2*X2^2 + 3*X2");
                assert_eq!(acc.to_string(), "2*X2 + 4");
                assert!(den.is_constant());
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(st.iterates[2].to_string(), "2*X1*X2^2 + 3*X1*X2 + 2*X2 + 4");
        assert!(matches!(
            iterate_structured_minus(&s1(), 0, 2, &IterOptions::default()),
            Err(IterError::SignMismatch { level: 1, found: 1 })
        ));
    }

    #[test]
    fn structured_minus_s2_matches_naive() {
        let s = s2();
        let opts = IterOptions::default();
        let naive = naive_sequence(&s, 4, &opts).unwrap();
        let st = iterate_structured(&s, 4, &opts).unwrap();
        for k in 0..=4 {
            for i in 0..2 {
                assert!(naive[k][i].same_function(&st.levels[i].iterates[k]), "k={k} i={i}");
            }
        }
        // k = 1 reproduces G/X + H.
        let one = &st.levels[0].iterates[1];
        assert!(one.same_function(&s.component(0)));
    }

    #[test]
    fn closed_form_examples() {
        let s = s1();
        assert_eq!(closed_form_last(&s, 3).to_string(), "8*X2 + 21");
        let fib = TriangularSystem::from_terms(&[(-1, &[(vec![0], 1)], &[(vec![0], 1)])]).unwrap();
        let f3 = closed_form_last(&fib, 3);
        assert_eq!(f3.num().to_string(), "3*X1 + 2");
        assert_eq!(f3.den().to_string(), "2*X1 + 1");
        assert!(closed_form_last(&s, 1).same_function(&s.component(1)));
        for k in 0..6 {
            let naive = iterate_naive(&fib, k, &IterOptions::default()).unwrap();
            assert!(naive[0].same_function(&closed_form_last(&fib, k)));
        }
    }

    #[test]
    fn term_guard_trips() {
        let opts = IterOptions {
            term_cap: 3,
            normalize_naive: true,
        };
        assert!(matches!(
            naive_sequence(&s1(), 3, &opts),
            Err(IterError::TermGuard { level: 1, .. })
        ));
    }

    #[test]
    fn growth_report_s1() {
        let s = s1();
        let ld = validate_system(&s).unwrap();
        let r = growth_report(&s, &ld, 6, &IterOptions::default()).unwrap();
        assert!(r.engines_agree);
        for row in &r.rows {
            assert!(row.ok_deg(), "{row:?}");
            if row.i == 1 {
                assert!(row.ok_h(), "{row:?}");
            }
        }
        let last3 = r.rows.iter().find(|r| r.i == 2 && r.k == 3).unwrap();
        assert_eq!(last3.h_measured.exact_max, BigInt::from(21));
        assert_eq!(last3.bound_l36.rhs, BigInt::from(96));
        assert!(last3.bound_l36.holds);
    }

    #[test]
    fn literal_last_level_bound_fails_for_large_translation() {
        // F_2 = X2 + 9: h(F_2) = log 9 exceeds log(1 * 3 * 2).
        let (lit, fixed) = last_level_bounds(Sign::Plus, &BigInt::from(1), &BigInt::from(9), 2, 1);
        assert_eq!(lit, BigInt::from(6));
        assert!(BigInt::from(9) > lit);
        assert!(BigInt::from(9) <= fixed);
    }
}
