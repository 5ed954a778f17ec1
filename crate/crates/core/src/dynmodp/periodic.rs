use std::collections::HashMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use super::{point_key, DynError, PointMap, PrimeExtension, ReducedSystem};
use crate::ffield::{
    factor_univariate, roots_in_field, squarefree_part, ExtField, FieldError, RootStrategy, UniPoly,
    DEFAULT_FACTOR_SEED, MAX_EXTENSION_DEGREE,
};
use crate::bounds;
use crate::iterate::{iterate_structured, IterOptions};
use crate::polyring::{Field, MultiPoly, Ring};
use crate::trisys::{Sign, TriangularSystem};

/// Default bound on `q^n` for exhaustive scans.
pub const DEFAULT_SCAN_CAP: u64 = 1 << 20;

/// A solution of `F^{(k)}(w) = w` together with its exact period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicPoint<E> {
    pub point: Vec<E>,
    pub period: usize,
}

/// Smallest `r >= 1` with `F^{(r)}(w) = w`, provided `r` divides `k`.
pub(crate) fn exact_period<F: Field>(map: &PointMap<F>, w: &[F::Elem], k: usize) -> Option<usize> {
    let mut cur = w.to_vec();
    for r in 1..=k {
        cur = map.step(&cur)?;
        if cur == w {
            return (k % r == 0).then_some(r);
        }
    }
    None
}

fn point_from_index<F: Field>(field: &F, mut idx: u64, n: usize) -> Vec<F::Elem> {
    let q = field.order();
    (0..n)
        .map(|_| {
            let e = field.element(idx % q);
            idx /= q;
            e
        })
        .collect()
}

fn scan_size(q: u64, n: usize, cap: u64) -> Result<u64, DynError> {
    let size = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(DynError::ScanCap { size, cap });
    }
    Ok(size as u64)
}

/// Every `w` in `F^n` whose orbit is defined for `k` steps and returns to
/// `w`, by exhaustive scan.
pub fn periodic_points_bruteforce<F: Field>(
    map: &PointMap<F>,
    k: usize,
    cap: u64,
) -> Result<Vec<PeriodicPoint<F::Elem>>, DynError> {
    if k == 0 {
        return Err(DynError::ZeroIterate);
    }
    let field = map.field();
    let size = scan_size(field.order(), map.n(), cap)?;
    let mut out: Vec<_> = (0..size)
        .into_par_iter()
        .filter_map(|idx| {
            let w = point_from_index(field, idx, map.n());
            exact_period(map, &w, k).map(|period| (idx, PeriodicPoint { point: w, period }))
        })
        .collect();
    out.sort_by_key(|(idx, pt)| (point_key(field, &pt.point), *idx));
    Ok(out.into_iter().map(|(_, pt)| pt).collect())
}

/// The univariate problem at one level once the later coordinates are fixed.
struct LevelEquation<F: Field> {
    /// `c x^2 + (d - a) x - b` for the Möbius product `[[a, b], [c, d]]`.
    fixed: UniPoly<F>,
    /// `a_j x + b_j`, the numerator of the `j`-th iterate of this coordinate,
    /// for `j < k` on `e_i = -1` levels. A root would hit the pole.
    exclusions: Vec<UniPoly<F>>,
    /// Some exclusion vanishes identically.
    all_excluded: bool,
}

impl<F: Field> LevelEquation<F> {
    fn admits(&self, x: &F::Elem) -> bool {
        let f = self.fixed.field();
        !self.all_excluded && self.exclusions.iter().all(|e| !f.is_zero(&e.eval(x)))
    }
}

/// Along the orbit of the coordinates after `i`, coordinate `i` evolves by
/// Möbius maps `x -> g x + h` (`e_i = +1`) or `x -> h + g / x` (`e_i = -1`)
/// whose coefficients are `G_i`, `H_i` at the orbit points. Tracking
/// `x_j = u_j / v_j` projectively, `x_j = 0` exactly when `u_j = a_j x + b_j`
/// vanishes.
fn level_equation<F: Field>(map: &PointMap<F>, w: &[F::Elem], i: usize, k: usize) -> LevelEquation<F> {
    let f = map.field();
    let lv = map.level(i);
    let (zero, one) = (f.zero(), f.one());
    let mut m = [[one.clone(), zero.clone()], [zero.clone(), one.clone()]];
    let mut exclusions = Vec::new();
    let mut all_excluded = false;
    let mut cur = w.to_vec();
    for j in 0..k {
        if lv.e == Sign::Minus && !lv.g_zero {
            let e = UniPoly::new(f.clone(), vec![m[0][1].clone(), m[0][0].clone()]);
            all_excluded |= e.is_zero();
            if !e.is_constant() {
                exclusions.push(e);
            }
        }
        let g = lv.g.eval(&cur);
        let h = lv.h.eval(&cur);
        let step = match lv.e {
            Sign::Plus => [[g, h], [zero.clone(), one.clone()]],
            Sign::Minus if lv.g_zero => [[zero.clone(), h], [zero.clone(), one.clone()]],
            Sign::Minus => [[h, g], [one.clone(), zero.clone()]],
        };
        m = mat_mul(f, &step, &m);
        if j + 1 < k {
            cur = map.step_from(&cur, i + 1).expect("later coordinates were filtered for poles");
        }
    }
    let [[a, b], [c, d]] = m;
    let fixed = UniPoly::new(f.clone(), vec![f.neg(&b), f.sub(&d, &a), c]);
    LevelEquation { fixed, exclusions, all_excluded }
}

fn mat_mul<F: Field>(f: &F, x: &[[F::Elem; 2]; 2], y: &[[F::Elem; 2]; 2]) -> [[F::Elem; 2]; 2] {
    let e = |r: usize, c: usize| f.add(&f.mul(&x[r][0], &y[0][c]), &f.mul(&x[r][1], &y[1][c]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Solutions of `F^{(k)}(w) = w` in `F^n` found level by level from `X_n`
/// down to `X_1`, each level a univariate root-finding problem. Candidates
/// whose orbit would meet a pole within `k` steps are discarded.
pub fn periodic_points_triangular<F: PrimeExtension>(
    rsys: &ReducedSystem,
    k: usize,
    field: &F,
) -> Result<Vec<PeriodicPoint<F::Elem>>, DynError> {
    if k == 0 {
        return Err(DynError::ZeroIterate);
    }
    rsys.require_nondegenerate()?;
    let map = rsys.map_over(field)?;
    let n = map.n();
    let mut partial = vec![vec![field.zero(); n]];
    for i in (0..n).rev() {
        let mut next = Vec::new();
        for w in &partial {
            let eq = level_equation(&map, w, i, k);
            let candidates = if eq.fixed.is_zero() {
                scan_size(field.order(), 1, DEFAULT_SCAN_CAP)?;
                field.elements().collect()
            } else {
                roots_in_field(&eq.fixed, RootStrategy::Auto)?
            };
            for x in candidates.into_iter().filter(|x| eq.admits(x)) {
                let mut v = w.clone();
                v[i] = x;
                next.push(v);
            }
        }
        partial = next;
    }
    let mut out: Vec<_> = partial
        .into_iter()
        .map(|w| {
            let period = exact_period(&map, &w, k).expect("triangular solutions are k-periodic");
            PeriodicPoint { point: w, period }
        })
        .collect();
    out.sort_by_key(|pt| point_key(field, &pt.point));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ClosureCount {
    Finite(u64),
    Infinite,
}

impl ClosureCount {
    fn add(self, other: ClosureCount) -> ClosureCount {
        match (self, other) {
            (ClosureCount::Finite(a), ClosureCount::Finite(b)) => ClosureCount::Finite(a + b),
            _ => ClosureCount::Infinite,
        }
    }

    fn times(self, m: u64) -> ClosureCount {
        match self {
            ClosureCount::Finite(a) => ClosureCount::Finite(a * m),
            ClosureCount::Infinite => ClosureCount::Infinite,
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ClosureCount::Finite(a) => Some(a),
            ClosureCount::Infinite => None,
        }
    }
}

impl std::fmt::Display for ClosureCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClosureCount::Finite(a) => write!(f, "{a}"),
            ClosureCount::Infinite => f.write_str("inf"),
        }
    }
}

/// The fields `F_{p^m}` met during a closure count, with the system lifted
/// to each.
struct Tower<'a> {
    rsys: &'a ReducedSystem,
    levels: HashMap<usize, (ExtField, PointMap<ExtField>)>,
}

impl<'a> Tower<'a> {
    fn get(&mut self, m: usize) -> Result<(ExtField, PointMap<ExtField>), DynError> {
        if let Some(entry) = self.levels.get(&m) {
            return Ok(entry.clone());
        }
        let field = ExtField::new(self.rsys.p(), m)?;
        let map = self.rsys.map_over(&field)?;
        self.levels.insert(m, (field.clone(), map.clone()));
        Ok((field, map))
    }
}

/// The image of `t` from `F_{p^m}` in `F_{p^{big}}`, for `m | big`.
fn embedding_root(small: &ExtField, big: &ExtField) -> Result<Vec<u64>, DynError> {
    let modulus = small.modulus();
    let lifted = UniPoly::new(big.clone(), modulus.coeffs().iter().map(|&c| big.embed(c)).collect());
    let roots = roots_in_field(&lifted, RootStrategy::Auto)?;
    Ok(roots.into_iter().next().expect("finite fields contain their subfields"))
}

fn embed_elem(small: &ExtField, big: &ExtField, r: &[u64], a: &[u64]) -> Vec<u64> {
    let r = r.to_vec();
    let mut acc = big.zero();
    let mut pw = big.one();
    for (t, &c) in a.iter().enumerate() {
        if t > 0 {
            pw = big.mul(&pw, &r);
        }
        acc = big.add(&acc, &big.mul(&pw, &big.embed(c)));
    }
    debug_assert_eq!(small.degree(), a.len());
    acc
}

fn count_levels(tower: &mut Tower, rem: usize, w: Vec<Vec<u64>>, m: usize, k: usize) -> Result<ClosureCount, DynError> {
    if rem == 0 {
        return Ok(ClosureCount::Finite(1));
    }
    let i = rem - 1;
    let (field, map) = tower.get(m)?;
    let eq = level_equation(&map, &w, i, k);
    if eq.all_excluded {
        return Ok(ClosureCount::Finite(0));
    }
    if eq.fixed.is_zero() {
        return Ok(ClosureCount::Infinite);
    }
    let mut f = squarefree_part(&eq.fixed)?;
    for e in &eq.exclusions {
        let g = f.gcd(e);
        if !g.is_constant() {
            f = f.div_rem(&g).0;
        }
    }
    let mut total = ClosureCount::Finite(0);
    for (g, _) in factor_univariate(&f, DEFAULT_FACTOR_SEED)?.factors {
        let dg = g.degree().unwrap_or(0);
        if dg == 1 {
            let mut v = w.clone();
            v[i] = field.neg(&g.monic().coeffs()[0]);
            total = total.add(count_levels(tower, i, v, m, k)?);
            continue;
        }
        let big_m = m * dg;
        if big_m > MAX_EXTENSION_DEGREE {
            return Err(FieldError::ExtensionTooLarge { m: big_m, cap: MAX_EXTENSION_DEGREE }.into());
        }
        let (big, _) = tower.get(big_m)?;
        let r = embedding_root(&field, &big)?;
        let up = |a: &Vec<u64>| embed_elem(&field, &big, &r, a);
        let g_big = UniPoly::new(big.clone(), g.coeffs().iter().map(up).collect());
        let root = roots_in_field(&g_big, RootStrategy::Auto)?
            .into_iter()
            .next()
            .expect("an irreducible factor splits in the extension of its degree");
        let mut v: Vec<Vec<u64>> = w.iter().map(up).collect();
        v[i] = root;
        total = total.add(count_levels(tower, i, v, big_m, k)?.times(dg as u64));
    }
    Ok(total)
}

/// Number of distinct points of `F^{(k)}(w) = w` over the algebraic closure
/// of `F_p`. Irreducible level factors of degree `m'` contribute `m'` times
/// the count above one of their roots, computed in `F_{p^{m m'}}`. A level
/// equation that vanishes identically yields `Infinite`.
pub fn closure_periodic_count(rsys: &ReducedSystem, k: usize) -> Result<ClosureCount, DynError> {
    if k == 0 {
        return Err(DynError::ZeroIterate);
    }
    rsys.require_nondegenerate()?;
    let n = rsys.n();
    let mut tower = Tower { rsys, levels: HashMap::new() };
    let base = tower.get(1)?.0;
    count_levels(&mut tower, n, vec![base.zero(); n], 1, k)
}

/// `deg(F_i^{(k)} - X_i)` for every level over the integers, where the
/// degree of `N/D - X` is `max(deg(N - X D), deg D)`. `None` when some
/// component of `F^{(k)}` is the identity.
pub fn periodic_equation_degrees(
    sys: &TriangularSystem,
    k: usize,
    opts: &IterOptions,
) -> Result<Option<Vec<u64>>, DynError> {
    if k == 0 {
        return Err(DynError::ZeroIterate);
    }
    let iterates = iterate_structured(sys, k, opts)?.at(k);
    let mut degs = Vec::with_capacity(iterates.len());
    for (i, f) in iterates.iter().enumerate() {
        let x = MultiPoly::var(f.ring().clone(), f.nvars(), i);
        let shifted = f.num().try_sub(&x.try_mul(f.den())?)?;
        if shifted.is_zero() {
            return Ok(None);
        }
        degs.push(shifted.total_degree().or_zero().max(f.den().total_degree().or_zero()));
    }
    Ok(Some(degs))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizationRow {
    pub p: u64,
    pub k: usize,
    /// One-based levels whose dominating coefficient vanished mod `p`.
    pub degenerate_levels: Vec<usize>,
    pub count_fp: Option<usize>,
    pub count_closure: Option<ClosureCount>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stabilization {
    pub k: usize,
    pub rows: Vec<StabilizationRow>,
    #[serde(serialize_with = "crate::decimal::option")]
    pub bezout_cap: Option<BigUint>,
    /// The closure count shared by a strict majority of good primes.
    pub majority: Option<ClosureCount>,
    /// Good primes whose count differs from the majority.
    pub off_majority: Vec<u64>,
    pub degenerate: Vec<u64>,
    /// Primes where the count could not be computed.
    pub failed: Vec<u64>,
}

impl Stabilization {
    /// Primes outside the majority for any reason.
    pub fn bad_primes(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.off_majority.iter().chain(&self.degenerate).chain(&self.failed).copied().collect();
        v.sort_unstable();
        v
    }
}

fn stabilization_row(sys: &TriangularSystem, k: usize, p: u64) -> Result<StabilizationRow, DynError> {
    let rsys = super::reduce_system(sys, p)?;
    let mut row = StabilizationRow {
        p,
        k,
        degenerate_levels: rsys.degenerate_levels(),
        count_fp: None,
        count_closure: None,
        error: None,
    };
    if rsys.is_degenerate() {
        return Ok(row);
    }
    let counts = periodic_points_triangular(&rsys, k, &rsys.field())
        .and_then(|pts| Ok((pts.len(), closure_periodic_count(&rsys, k)?)));
    match counts {
        Ok((fp, closure)) => {
            row.count_fp = Some(fp);
            row.count_closure = Some(closure);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    Ok(row)
}

/// Closure counts of `F^{(k)}(w) = w` across `primes`, with the majority
/// value and the primes that deviate from it.
pub fn stabilization(
    sys: &TriangularSystem,
    k: usize,
    primes: &[u64],
    opts: &IterOptions,
) -> Result<Stabilization, DynError> {
    let degs = periodic_equation_degrees(sys, k, opts)?;
    let bezout = degs.map(|d| bounds::bezout_cap(&d).expect("systems have at least one level"));
    let mut rows = primes
        .par_iter()
        .map(|&p| stabilization_row(sys, k, p))
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by_key(|r| r.p);

    let good: Vec<(u64, ClosureCount)> = rows.iter().filter_map(|r| Some((r.p, r.count_closure?))).collect();
    let mut tally: HashMap<ClosureCount, usize> = HashMap::new();
    for (_, c) in &good {
        *tally.entry(*c).or_default() += 1;
    }
    let majority = tally.iter().find(|(_, &n)| 2 * n > good.len()).map(|(c, _)| *c);
    let off_majority = good.iter().filter(|(_, c)| Some(*c) != majority).map(|(p, _)| *p).collect();
    let degenerate = rows.iter().filter(|r| !r.degenerate_levels.is_empty()).map(|r| r.p).collect();
    let failed = rows
        .iter()
        .filter(|r| r.degenerate_levels.is_empty() && r.count_closure.is_none())
        .map(|r| r.p)
        .collect();
    Ok(Stabilization { k, rows, bezout_cap: bezout, majority, off_majority, degenerate, failed })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::reduce_system;
    use super::*;
    use crate::polyring::{primes_between, PrimeField};

    fn pts(v: &[PeriodicPoint<u64>]) -> Vec<(Vec<u64>, usize)> {
        v.iter().map(|p| (p.point.clone(), p.period)).collect()
    }

    #[test]
    fn s1_fixed_point_mod_7() {
        let r = reduce_system(&s1(), 7).unwrap();
        let f = r.field();
        let brute = periodic_points_bruteforce(&r.prime_map(), 1, DEFAULT_SCAN_CAP).unwrap();
        assert_eq!(pts(&brute), vec![(vec![2, 4], 1)]);
        let tri = periodic_points_triangular(&r, 1, &f).unwrap();
        assert_eq!(tri, brute);
        assert_eq!(closure_periodic_count(&r, 1).unwrap(), ClosureCount::Finite(1));
        // Fixed points stay k-periodic with exact period 1.
        let k3 = periodic_points_triangular(&r, 3, &f).unwrap();
        assert!(k3.iter().any(|p| p.point == vec![2, 4] && p.period == 1));
    }

    #[test]
    fn s1_mod_3_engines_agree() {
        let r = reduce_system(&s1(), 3).unwrap();
        for k in 1..=4 {
            let brute = periodic_points_bruteforce(&r.prime_map(), k, DEFAULT_SCAN_CAP).unwrap();
            let tri = periodic_points_triangular(&r, k, &r.field()).unwrap();
            assert_eq!(tri, brute, "k={k}");
        }
    }

    #[test]
    fn s2_poles_excluded() {
        for p in [5, 7, 11, 13] {
            let r = reduce_system(&s2(), p).unwrap();
            for k in 1..=4 {
                let brute = periodic_points_bruteforce(&r.prime_map(), k, DEFAULT_SCAN_CAP).unwrap();
                let tri = periodic_points_triangular(&r, k, &r.field()).unwrap();
                assert_eq!(tri, brute, "p={p} k={k}");
                for pt in &tri {
                    assert!(!pt.point.contains(&0));
                }
            }
        }
    }

    #[test]
    fn last_level_linear_equation() {
        // g_n^k x + (g_n^{k-1} + ... + 1) h_n = x has one root when g_n^k != 1.
        let r = reduce_system(&s1(), 7).unwrap();
        let f = PrimeField::new(7).unwrap();
        let map = r.prime_map();
        for k in 1..=5 {
            let eq = level_equation(&map, &[0, 0], 1, k);
            if f.pow(&2, k as u64) != 1 {
                let roots = roots_in_field(&eq.fixed, RootStrategy::Scan).unwrap();
                assert_eq!(roots.len(), 1, "k={k}");
            } else {
                // 2^3 = 1 mod 7: F_2^{(3)} is the identity mod 7.
                assert!(eq.fixed.is_zero());
            }
        }
    }

    #[test]
    fn triangular_over_extension_matches_scan() {
        let r = reduce_system(&s2(), 3).unwrap();
        let f9 = ExtField::new(3, 2).unwrap();
        for k in 1..=3 {
            let map = r.map_over(&f9).unwrap();
            let brute = periodic_points_bruteforce(&map, k, DEFAULT_SCAN_CAP).unwrap();
            let tri = periodic_points_triangular(&r, k, &f9).unwrap();
            assert_eq!(tri, brute, "k={k}");
        }
    }

    #[test]
    fn closure_count_bounded_and_covers_fp() {
        let opts = IterOptions::default();
        for sys in [s1(), s2()] {
            for k in 1..=3 {
                let degs = periodic_equation_degrees(&sys, k, &opts).unwrap().unwrap();
                let cap = bounds::bezout_cap(&degs).unwrap();
                for p in [5, 7, 11] {
                    let r = reduce_system(&sys, p).unwrap();
                    let ClosureCount::Finite(c) = closure_periodic_count(&r, k).unwrap() else {
                        continue;
                    };
                    let fp = periodic_points_triangular(&r, k, &r.field()).unwrap().len() as u64;
                    assert!(fp <= c && BigUint::from(c) <= cap, "p={p} k={k} fp={fp} c={c} cap={cap}");
                }
            }
        }
    }

    #[test]
    fn degenerate_reduction_rejected() {
        let r = reduce_system(&s1(), 2).unwrap();
        assert!(matches!(periodic_points_triangular(&r, 1, &r.field()), Err(DynError::Degenerate { .. })));
        assert!(matches!(closure_periodic_count(&r, 1), Err(DynError::Degenerate { .. })));
    }

    #[test]
    fn scan_cap_enforced() {
        let r = reduce_system(&s1(), 1031).unwrap();
        assert!(matches!(
            periodic_points_bruteforce(&r.prime_map(), 1, DEFAULT_SCAN_CAP),
            Err(DynError::ScanCap { .. })
        ));
    }

    #[test]
    fn s1_k2_stabilizes() {
        let primes = primes_between(5, 97);
        let st = stabilization(&s1(), 2, &primes, &IterOptions::default()).unwrap();
        assert!(st.majority.is_some());
        assert!(st.off_majority.len() < primes.len() / 2);
        assert!(st.degenerate.is_empty());
    }
}
