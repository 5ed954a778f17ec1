use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::periodic::DEFAULT_SCAN_CAP;
use super::{lift_integer_poly, orbit, reduce_system, DynError, ReducedSystem};
use crate::polyring::{HeightValue, Integers, MultiPoly, PrimeField};
use crate::trisys::TriangularSystem;

/// The affine variety cut out by `L_1, ..., L_s` over the integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variety {
    polys: Vec<MultiPoly<Integers>>,
}

impl Variety {
    pub fn new(polys: Vec<MultiPoly<Integers>>) -> Result<Self, DynError> {
        let first = polys.first().ok_or(DynError::EmptyVariety)?;
        let nvars = first.nvars();
        if let Some(bad) = polys.iter().find(|q| q.nvars() != nvars) {
            return Err(DynError::VariableCount { expected: nvars, got: bad.nvars() });
        }
        Ok(Variety { polys })
    }

    pub fn polys(&self) -> &[MultiPoly<Integers>] {
        &self.polys
    }

    pub fn nvars(&self) -> usize {
        self.polys[0].nvars()
    }

    /// `s`, the number of defining polynomials.
    pub fn s(&self) -> usize {
        self.polys.len()
    }

    /// `D`, the largest total degree.
    pub fn degree(&self) -> u64 {
        self.polys.iter().map(|q| q.total_degree().or_zero()).max().unwrap_or(0)
    }

    /// `H`, the largest height.
    pub fn height(&self) -> HeightValue {
        let max = self.polys.iter().map(|q| q.max_abs_coeff()).max().unwrap_or_default();
        HeightValue::from_max(max)
    }

    pub fn reduce(&self, field: PrimeField) -> Vec<MultiPoly<PrimeField>> {
        self.polys.iter().map(|q| lift_integer_poly(q, field)).collect()
    }

    fn check_against(&self, n: usize) -> Result<(), DynError> {
        if self.nvars() != n {
            return Err(DynError::VariableCount { expected: n, got: self.nvars() });
        }
        Ok(())
    }
}

fn on_variety(polys: &[MultiPoly<PrimeField>], w: &[u64]) -> bool {
    polys.iter().all(|q| q.eval(w) == 0)
}

/// The iterates `m < ell` of an orbit that lie on the reduced variety.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HitSet {
    pub indices: Vec<usize>,
    pub ell: usize,
    /// `S(w)` when the orbit closed or ended within `ell` points.
    pub orbit_size: Option<usize>,
    /// `S(w) >= ell`.
    pub sufficient: bool,
}

impl HitSet {
    pub fn hits(&self) -> usize {
        self.indices.len()
    }

    /// `eps * ell`.
    pub fn threshold(&self, eps: f64) -> f64 {
        eps * self.ell as f64
    }

    pub fn exceeds(&self, eps: f64) -> bool {
        self.hits() as f64 > self.threshold(eps)
    }
}

/// Indices `m < ell` with `F_p^{(m)}(w)` on `V_p`. The walk stops early if
/// the orbit meets a pole.
pub fn variety_hits(rsys: &ReducedSystem, v: &Variety, w: &[u64], ell: usize) -> Result<HitSet, DynError> {
    v.check_against(rsys.n())?;
    let polys = v.reduce(rsys.field());
    hits_with(rsys, &polys, w, ell)
}

fn hits_with(rsys: &ReducedSystem, polys: &[MultiPoly<PrimeField>], w: &[u64], ell: usize) -> Result<HitSet, DynError> {
    let map = rsys.prime_map();
    let rec = orbit(&map, w, ell)?;
    let indices = (0..ell)
        .map_while(|m| rec.point_at(m).map(|pt| (m, pt)))
        .filter(|(_, pt)| on_variety(polys, pt))
        .map(|(m, _)| m)
        .collect();
    Ok(HitSet { indices, ell, orbit_size: rec.size(), sufficient: rec.size_at_least(ell) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentParams {
    pub primes: Vec<u64>,
    pub ell: usize,
    pub epsilon: f64,
    /// Starting points drawn per prime.
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HitRow {
    pub p: u64,
    pub w: Vec<u64>,
    pub ell: usize,
    pub hits: usize,
    pub eps_ell: f64,
    pub orbit_size: Option<usize>,
    pub exceeds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitExperiment {
    /// One row per sampled point with `S(w) >= ell`, sorted by `(p, w)`.
    pub rows: Vec<HitRow>,
    /// Sampled points whose orbit was shorter than `ell`.
    pub short_orbits: usize,
    pub degenerate_primes: Vec<u64>,
    pub violations: usize,
}

fn prime_seed(seed: u64, p: u64) -> u64 {
    seed ^ p.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Samples starting points per prime and records `#J_w` against `eps * ell`
/// for every orbit of size at least `ell`.
pub fn orbit_frequency_experiment(
    sys: &TriangularSystem,
    v: &Variety,
    params: &ExperimentParams,
) -> Result<OrbitExperiment, DynError> {
    v.check_against(sys.n())?;
    let per_prime = params
        .primes
        .par_iter()
        .map(|&p| -> Result<(u64, bool, Vec<HitRow>, usize), DynError> {
            let rsys = reduce_system(sys, p)?;
            if rsys.is_degenerate() {
                return Ok((p, true, Vec::new(), 0));
            }
            let polys = v.reduce(rsys.field());
            let mut rng = ChaCha8Rng::seed_from_u64(prime_seed(params.seed, p));
            let mut rows = Vec::new();
            let mut short = 0;
            for _ in 0..params.samples {
                let w: Vec<u64> = (0..sys.n()).map(|_| rng.gen_range(0..p)).collect();
                let hs = hits_with(&rsys, &polys, &w, params.ell)?;
                if !hs.sufficient {
                    short += 1;
                    continue;
                }
                rows.push(HitRow {
                    p,
                    w,
                    ell: params.ell,
                    hits: hs.hits(),
                    eps_ell: hs.threshold(params.epsilon),
                    orbit_size: hs.orbit_size,
                    exceeds: hs.exceeds(params.epsilon),
                });
            }
            Ok((p, false, rows, short))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = OrbitExperiment { rows: Vec::new(), short_orbits: 0, degenerate_primes: Vec::new(), violations: 0 };
    for (p, degenerate, rows, short) in per_prime {
        if degenerate {
            out.degenerate_primes.push(p);
        }
        out.rows.extend(rows);
        out.short_orbits += short;
    }
    out.rows.sort_by(|a, b| (a.p, &a.w).cmp(&(b.p, &b.w)));
    out.degenerate_primes.sort_unstable();
    out.violations = out.rows.iter().filter(|r| r.exceeds).count();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EscapeVerdict {
    FiniteConsistent,
    Suspect,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EscapeRow {
    pub p: u64,
    /// Points `w` of `F_p^n` with `w` and `F^{(k)}(w)` both on `V_p`; `None`
    /// for a degenerate reduction.
    pub count: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EscapeReport {
    pub k: usize,
    /// `D^s (D n k^{n-1})^s`.
    #[serde(serialize_with = "crate::decimal::serialize")]
    pub bound: BigUint,
    pub rows: Vec<EscapeRow>,
    pub verdict: EscapeVerdict,
}

/// `D^s (D n k^{n-1})^s`.
pub fn escape_bound(d: u64, s: usize, n: usize, k: usize) -> BigUint {
    let d = BigUint::from(d);
    let inner = &d * BigUint::from(n) * BigUint::from(k).pow(n.saturating_sub(1) as u32);
    d.pow(s as u32) * inner.pow(s as u32)
}

/// Counts, for each prime, the solutions in `F_p^n` of `L_j(w) = 0` and
/// `L_j(F^{(k)}(w)) = 0`. Any count above the Bézout-type bound marks the
/// pair `(F, V)` as suspect.
pub fn escape_check(sys: &TriangularSystem, v: &Variety, k: usize, primes: &[u64]) -> Result<EscapeReport, DynError> {
    if k == 0 {
        return Err(DynError::ZeroIterate);
    }
    let n = sys.n();
    v.check_against(n)?;
    let bound = escape_bound(v.degree(), v.s(), n, k);
    let mut rows = primes
        .par_iter()
        .map(|&p| -> Result<EscapeRow, DynError> {
            let rsys = reduce_system(sys, p)?;
            if rsys.is_degenerate() {
                return Ok(EscapeRow { p, count: None });
            }
            let size = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
            if size > DEFAULT_SCAN_CAP as u128 {
                return Err(DynError::ScanCap { size, cap: DEFAULT_SCAN_CAP });
            }
            let polys = v.reduce(rsys.field());
            let map = rsys.prime_map();
            let mut count = 0;
            for idx in 0..size as u64 {
                let mut rest = idx;
                let w: Vec<u64> = (0..n)
                    .map(|_| {
                        let c = rest % p;
                        rest /= p;
                        c
                    })
                    .collect();
                if on_variety(&polys, &w) && map.iterate(&w, k).is_some_and(|img| on_variety(&polys, &img)) {
                    count += 1;
                }
            }
            Ok(EscapeRow { p, count: Some(count) })
        })
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by_key(|r| r.p);
    let suspect = rows.iter().any(|r| r.count.is_some_and(|c| BigUint::from(c) > bound));
    let verdict = if suspect { EscapeVerdict::Suspect } else { EscapeVerdict::FiniteConsistent };
    Ok(EscapeReport { k, bound, rows, verdict })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::polyring::primes_between;

    fn poly(terms: &[(Vec<u32>, i64)]) -> MultiPoly<Integers> {
        MultiPoly::from_i64_terms(2, terms)
    }

    #[test]
    fn hits_on_constant_orbit() {
        let r = reduce_system(&s1(), 7).unwrap();
        let diag = Variety::new(vec![poly(&[(vec![1, 0], 1), (vec![0, 1], -1)])]).unwrap();
        let hs = variety_hits(&r, &diag, &[2, 4], 5).unwrap();
        assert!(hs.indices.is_empty());
        assert!(!hs.sufficient);
        assert_eq!(hs.orbit_size, Some(1));

        let line = Variety::new(vec![poly(&[(vec![1, 0], 1), (vec![0, 0], -2)])]).unwrap();
        assert_eq!(variety_hits(&r, &line, &[2, 4], 5).unwrap().indices, vec![0, 1, 2, 3, 4]);

        let unit = Variety::new(vec![poly(&[(vec![0, 0], 1)])]).unwrap();
        assert!(variety_hits(&r, &unit, &[2, 4], 5).unwrap().indices.is_empty());
    }

    #[test]
    fn variety_shape() {
        assert_eq!(Variety::new(vec![]), Err(DynError::EmptyVariety));
        let v = Variety::new(vec![poly(&[(vec![2, 1], -7), (vec![0, 0], 3)]), poly(&[(vec![1, 0], 1)])]).unwrap();
        assert_eq!((v.s(), v.degree()), (2, 3));
        assert_eq!(v.height().exact_max, 7.into());
        let r = reduce_system(&s1(), 7).unwrap();
        let three = Variety::new(vec![MultiPoly::from_i64_terms(3, &[(vec![1, 0, 0], 1)])]).unwrap();
        assert!(matches!(variety_hits(&r, &three, &[0, 0], 3), Err(DynError::VariableCount { .. })));
    }

    #[test]
    fn hit_threshold() {
        let hs = HitSet { indices: vec![0, 3], ell: 10, orbit_size: None, sufficient: true };
        assert!(hs.exceeds(0.1));
        assert!(!hs.exceeds(0.2));
    }

    #[test]
    fn experiment_is_deterministic() {
        let diag = Variety::new(vec![poly(&[(vec![1, 0], 1), (vec![0, 1], -1)])]).unwrap();
        let params = ExperimentParams { primes: vec![11, 13, 17], ell: 4, epsilon: 0.5, samples: 20, seed: 9 };
        let a = orbit_frequency_experiment(&s1(), &diag, &params).unwrap();
        let b = orbit_frequency_experiment(&s1(), &diag, &params).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len() + a.short_orbits, 60);
        assert!(a.rows.windows(2).all(|x| (x[0].p, &x[0].w) <= (x[1].p, &x[1].w)));
    }

    #[test]
    fn escape_diagonal_s1() {
        let diag = Variety::new(vec![poly(&[(vec![1, 0], 1), (vec![0, 1], -1)])]).unwrap();
        let primes = primes_between(5, 97);
        for k in 1..=3 {
            let rep = escape_check(&s1(), &diag, k, &primes).unwrap();
            assert_eq!(rep.bound, BigUint::from(2 * k as u64));
            assert_eq!(rep.verdict, EscapeVerdict::FiniteConsistent, "k={k}: {:?}", rep.rows);
        }
    }

    #[test]
    fn escape_suspect_on_invariant_line() {
        // F = (X1 X2 + 1, X2): the line X2 = 1 is pointwise invariant under F_2.
        let sys = TriangularSystem::from_terms(&[
            (1, &[(vec![0, 1], 1)], &[(vec![0, 0], 1)]),
            (1, &[(vec![0, 0], 1)], &[]),
        ])
        .unwrap();
        let line = Variety::new(vec![poly(&[(vec![0, 1], 1), (vec![0, 0], -1)])]).unwrap();
        let rep = escape_check(&sys, &line, 1, &primes_between(11, 97)).unwrap();
        assert_eq!(rep.verdict, EscapeVerdict::Suspect);
        assert!(rep.rows.iter().all(|r| r.count.is_some_and(|c| BigUint::from(c) > rep.bound)));
        assert!(matches!(escape_check(&sys, &line, 0, &[11]), Err(DynError::ZeroIterate)));
    }
}
