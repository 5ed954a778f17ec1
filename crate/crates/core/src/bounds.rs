//! Closed-form bound formulas, exact inequality oracles for heights of sums,
//! products and compositions, and the equal-gap finder for increasing
//! sequences.
//!
//! Heights are natural logarithms of the largest absolute coefficient. An
//! inequality between logarithmic heights is checked on the exponentials, so
//! every comparison is between integers.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::iterate::{growth_report, BoundCheck, IterError, IterOptions};
use crate::polyring::{compose_rational_fn, Integers, MultiPoly, PolyError, RationalFn};
use crate::trisys::{validate_system, TriangularSystem, Violation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("parameter {name} = {value} is out of range ({expected})")]
    Range { name: &'static str, value: f64, expected: &'static str },
    #[error("{0}")]
    Hypothesis(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Iter(#[from] IterError),
    #[error("system is not valid: {0}")]
    Invalid(#[from] Violation),
}

fn check(cond: bool, name: &'static str, value: f64, expected: &'static str) -> Result<(), BoundsError> {
    if cond {
        Ok(())
    } else {
        Err(BoundsError::Range { name, value, expected })
    }
}

fn big_to_f64(v: &BigUint) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

fn upow(base: u64, e: u64) -> BigUint {
    num_traits::pow(BigUint::from(base), e as usize)
}

/// `(11n+4) d^{3n+1} h + (55n+99) log((2n+5)s) d^{3n+2}`, with the integer
/// coefficients kept exact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NullstellensatzBound {
    /// `(11n+4) d^{3n+1}`.
    #[serde(serialize_with = "crate::decimal::serialize")]
    pub h_coeff: BigUint,
    /// `(55n+99) d^{3n+2}`.
    #[serde(serialize_with = "crate::decimal::serialize")]
    pub log_coeff: BigUint,
    /// `(2n+5)s`.
    pub log_arg: u64,
    pub value: f64,
}

pub fn nullstellensatz_bound(n: u64, d: u64, h: f64, s: u64) -> Result<NullstellensatzBound, BoundsError> {
    check(n >= 1, "n", n as f64, "n >= 1")?;
    check(d >= 2, "d", d as f64, "d >= 2")?;
    check(s >= 1, "s", s as f64, "s >= 1")?;
    check(h.is_finite() && h >= 0.0, "h", h, "h >= 0")?;
    let h_coeff = BigUint::from(11 * n + 4) * upow(d, 3 * n + 1);
    let log_coeff = BigUint::from(55 * n + 99) * upow(d, 3 * n + 2);
    let log_arg = (2 * n + 5) * s;
    let value = big_to_f64(&h_coeff) * h + big_to_f64(&log_coeff) * (log_arg as f64).ln();
    Ok(NullstellensatzBound { h_coeff, log_coeff, log_arg, value })
}

/// A quantity known up to an unspecified positive constant `C`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaledByC {
    /// The explicit factor multiplying `C`.
    pub factor: f64,
    pub display: String,
}

impl ScaledByC {
    fn new(factor: f64, expr: String) -> Self {
        ScaledByC { factor, display: format!("C × {expr}") }
    }
}

/// Periodic points of order `k` for all `e_i = +1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlusPeriodicBounds {
    /// `n(3n-1)`: `log B_1 << k^{n(3n-1)}`.
    pub log_exponent: u64,
    /// `n(n-1)/2`: periodic points mod good `p` are `O(k^{n(n-1)/2})`.
    pub count_exponent: u64,
    pub log_bad: ScaledByC,
    pub count: ScaledByC,
}

pub fn plus_periodic_bounds(n: u64, k: u64) -> Result<PlusPeriodicBounds, BoundsError> {
    check(n >= 1, "n", n as f64, "n >= 1")?;
    check(k >= 1, "k", k as f64, "k >= 1")?;
    let log_exponent = n * (3 * n - 1);
    let count_exponent = n * (n - 1) / 2;
    Ok(PlusPeriodicBounds {
        log_exponent,
        count_exponent,
        log_bad: ScaledByC::new(big_to_f64(&upow(k, log_exponent)), format!("{k}^{log_exponent}")),
        count: ScaledByC::new(big_to_f64(&upow(k, count_exponent)), format!("{k}^{count_exponent}")),
    })
}

/// Periodic points of order `k` for all `e_i = -1`. Two count exponents are
/// reported: `2n^2` as stated and `n^2` from the argument via
/// `T_k <= 2 k^{n(n+1)/2} ∏ k^{n-i}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinusPeriodicBounds {
    /// `n(3n^2+8n+9)/2`.
    pub log_exponent: u64,
    pub count_exponent_stated: u64,
    pub count_exponent_derived: u64,
    pub log_bad: ScaledByC,
    pub count_stated: ScaledByC,
    pub count_derived: ScaledByC,
}

pub fn minus_periodic_bounds(n: u64, k: u64) -> Result<MinusPeriodicBounds, BoundsError> {
    check(n >= 2, "n", n as f64, "n >= 2")?;
    check(k >= 1, "k", k as f64, "k >= 1")?;
    let log_exponent = n * (3 * n * n + 8 * n + 9) / 2;
    let stated = 2 * n * n;
    let derived = n * n;
    Ok(MinusPeriodicBounds {
        log_exponent,
        count_exponent_stated: stated,
        count_exponent_derived: derived,
        log_bad: ScaledByC::new(big_to_f64(&upow(k, log_exponent)), format!("{k}^{log_exponent}")),
        count_stated: ScaledByC::new(big_to_f64(&upow(k, stated)), format!("{k}^{stated}")),
        count_derived: ScaledByC::new(big_to_f64(&upow(k, derived)), format!("{k}^{derived}")),
    })
}

/// Smallest integer not below `x`, forgiving rounding error in `x`.
fn ceil_tolerant(x: f64) -> u64 {
    (x * (1.0 - 1e-12)).ceil().max(0.0) as u64
}

fn check_eps(eps: f64) -> Result<(), BoundsError> {
    check(eps > 0.0 && eps <= 1.0, "epsilon", eps, "0 < epsilon <= 1")
}

/// Orbit frequency for varieties the iterates generically escape.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EscapeFrequencyBounds {
    /// `n^s D^{2s} / eps^{(n-1)s+2}`.
    pub ell_threshold: f64,
    /// The least admissible orbit length `ell`.
    pub ell_min: u64,
    /// `n(3n-1)`: `log D <= C / eps^{n(3n-1)}`.
    pub log_exponent: u64,
    pub log_bad: ScaledByC,
}

pub fn escape_frequency_bounds(n: u64, s: u64, d: u64, eps: f64) -> Result<EscapeFrequencyBounds, BoundsError> {
    check(n >= 2, "n", n as f64, "n >= 2")?;
    check(s >= 1, "s", s as f64, "s >= 1")?;
    check(d >= 1, "D", d as f64, "D >= 1")?;
    check_eps(eps)?;
    let num = big_to_f64(&(upow(n, s) * upow(d, 2 * s)));
    let ell_threshold = num / eps.powi(((n - 1) * s + 2) as i32);
    let log_exponent = n * (3 * n - 1);
    Ok(EscapeFrequencyBounds {
        ell_threshold,
        ell_min: ceil_tolerant(ell_threshold),
        log_exponent,
        log_bad: ScaledByC::new(eps.powi(-(log_exponent as i32)), format!("{eps}^-{log_exponent}")),
    })
}

/// Orbit frequency for `L`-uniformly bounded intersections.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformFrequencyBounds {
    /// `floor(2L/eps) + 1`.
    pub beta: u64,
    /// `2L/eps + 1`.
    pub ell_threshold: f64,
    pub ell_min: u64,
    /// `(n-1)(3n+2) + (n+L+2)`: `log c <= C / eps^{...}`.
    pub log_exponent: u64,
    pub log_bad: ScaledByC,
    /// `binom(beta, L+1)`, the number of index subsets absorbed into `C`.
    #[serde(serialize_with = "crate::decimal::serialize")]
    pub binomial: BigUint,
}

pub fn uniform_frequency_bounds(n: u64, l: u64, eps: f64) -> Result<UniformFrequencyBounds, BoundsError> {
    check(n >= 2, "n", n as f64, "n >= 2")?;
    check_eps(eps)?;
    let ratio = 2.0 * l as f64 / eps;
    let beta = (ratio * (1.0 + 1e-12)).floor() as u64 + 1;
    let log_exponent = (n - 1) * (3 * n + 2) + (n + l + 2);
    Ok(UniformFrequencyBounds {
        beta,
        ell_threshold: ratio + 1.0,
        ell_min: ceil_tolerant(ratio + 1.0),
        log_exponent,
        log_bad: ScaledByC::new(eps.powi(-(log_exponent as i32)), format!("{eps}^-{log_exponent}")),
        binomial: binomial(beta, l + 1),
    })
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, j| acc * BigUint::from(n - j) / BigUint::from(j + 1))
}

/// `2 ∏ deg_i`, the cap on periodic points of order `k` given the degrees
/// `deg(F_i^{(k)} - X_i)`.
pub fn bezout_cap(degs: &[u64]) -> Result<BigUint, BoundsError> {
    if degs.is_empty() {
        return Err(BoundsError::Hypothesis("bezout_cap needs at least one degree".into()));
    }
    Ok(degs.iter().fold(BigUint::from(2u32), |acc, &d| acc * BigUint::from(d)))
}

/// Every bound for one parameter set; entries whose hypotheses fail are
/// `None`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: u64,
    pub d: u64,
    pub h: f64,
    pub s: u64,
    pub big_d: u64,
    pub big_h: f64,
    pub k: u64,
    pub epsilon: f64,
    pub ell: Option<u64>,
    pub l: u64,
    pub nullstellensatz: Option<NullstellensatzBound>,
    pub plus_periodic: Option<PlusPeriodicBounds>,
    pub minus_periodic: Option<MinusPeriodicBounds>,
    pub escape_frequency: Option<EscapeFrequencyBounds>,
    pub uniform_frequency: Option<UniformFrequencyBounds>,
    /// `ell` meets the escape-frequency threshold.
    pub ell_sufficient: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundInputs {
    pub n: u64,
    pub d: u64,
    pub h: f64,
    pub s: u64,
    pub big_d: u64,
    pub big_h: f64,
    pub k: u64,
    pub epsilon: f64,
    pub ell: Option<u64>,
    pub l: u64,
}

pub fn bound_report(inp: &BoundInputs) -> BoundReport {
    let escape = escape_frequency_bounds(inp.n, inp.s, inp.big_d, inp.epsilon).ok();
    BoundReport {
        n: inp.n,
        d: inp.d,
        h: inp.h,
        s: inp.s,
        big_d: inp.big_d,
        big_h: inp.big_h,
        k: inp.k,
        epsilon: inp.epsilon,
        ell: inp.ell,
        l: inp.l,
        nullstellensatz: nullstellensatz_bound(inp.n, inp.d, inp.h, inp.s).ok(),
        plus_periodic: plus_periodic_bounds(inp.n, inp.k).ok(),
        minus_periodic: minus_periodic_bounds(inp.n, inp.k).ok(),
        ell_sufficient: inp.ell.zip(escape.as_ref()).map(|(ell, e)| ell >= e.ell_min),
        escape_frequency: escape,
        uniform_frequency: uniform_frequency_bounds(inp.n, inp.l, inp.epsilon).ok(),
    }
}

fn nonzero_inputs<'a>(ks: impl IntoIterator<Item = &'a MultiPoly<Integers>>) -> Result<(), BoundsError> {
    if ks.into_iter().any(|k| k.is_zero()) {
        return Err(BoundsError::Hypothesis("heights are undefined for the zero polynomial".into()));
    }
    Ok(())
}

fn np1_pow(nvars: usize, e: u64) -> BigInt {
    num_traits::pow(BigInt::from(nvars as u64 + 1), e as usize)
}

/// `h(Σ K_i) <= max h(K_i) + log t`.
pub fn oracle_sum(ks: &[MultiPoly<Integers>]) -> Result<BoundCheck, BoundsError> {
    if ks.is_empty() {
        return Err(BoundsError::Hypothesis("empty sum".into()));
    }
    nonzero_inputs(ks)?;
    let sum = ks[1..].iter().fold(Ok(ks[0].clone()), |acc: Result<_, PolyError>, k| acc?.try_add(k))?;
    let max = ks.iter().map(|k| k.max_abs_coeff()).max().unwrap();
    Ok(BoundCheck::new(sum.max_abs_coeff(), max * BigInt::from(ks.len())))
}

/// Both sides of `-2 log(n+1) Σ deg K_i <= h(∏ K_i) - Σ h(K_i) <= log(n+1) Σ deg K_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductCheck {
    pub lower: BoundCheck,
    pub upper: BoundCheck,
}

impl ProductCheck {
    pub fn holds(&self) -> bool {
        self.lower.holds && self.upper.holds
    }
}

pub fn oracle_product(ks: &[MultiPoly<Integers>]) -> Result<ProductCheck, BoundsError> {
    if ks.is_empty() {
        return Err(BoundsError::Hypothesis("empty product".into()));
    }
    nonzero_inputs(ks)?;
    let nvars = ks[0].nvars();
    let prod = ks[1..].iter().fold(Ok(ks[0].clone()), |acc: Result<_, PolyError>, k| acc?.try_mul(k))?;
    let sum_deg: u64 = ks.iter().map(|k| k.total_degree().or_zero()).sum();
    let prod_max: BigInt = ks.iter().map(|k| k.max_abs_coeff()).product();
    let m = prod.max_abs_coeff();
    Ok(ProductCheck {
        lower: BoundCheck::new(prod_max.clone(), &m * np1_pow(nvars, 2 * sum_deg)),
        upper: BoundCheck::new(m, prod_max * np1_pow(nvars, sum_deg)),
    })
}

/// Degree and height of a composition against their bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositionCheck {
    pub degree: u64,
    pub degree_bound: u64,
    pub height: BoundCheck,
}

impl CompositionCheck {
    pub fn holds(&self) -> bool {
        self.degree <= self.degree_bound && self.height.holds
    }
}

/// `L(K_1, ..., K_t)` for polynomials: `deg <= d deg L` and
/// `h <= h(L) + deg L (h + log(t+1) + d log(n+1))`.
pub fn oracle_composition(l: &MultiPoly<Integers>, ks: &[MultiPoly<Integers>]) -> Result<CompositionCheck, BoundsError> {
    if ks.is_empty() || l.nvars() != ks.len() {
        return Err(BoundsError::Hypothesis(format!(
            "outer polynomial has {} variables but {} arguments were given",
            l.nvars(),
            ks.len()
        )));
    }
    nonzero_inputs(std::iter::once(l).chain(ks))?;
    let nvars = ks[0].nvars();
    let comp = l.compose(ks)?;
    let d = ks.iter().map(|k| k.total_degree().or_zero()).max().unwrap();
    let mk = ks.iter().map(|k| k.max_abs_coeff()).max().unwrap();
    let deg_l = l.total_degree().or_zero();
    let inner = mk * BigInt::from(ks.len() as u64 + 1) * np1_pow(nvars, d);
    let rhs = l.max_abs_coeff() * num_traits::pow(inner, deg_l as usize);
    Ok(CompositionCheck {
        degree: comp.total_degree().or_zero(),
        degree_bound: d * deg_l,
        height: BoundCheck::new(comp.max_abs_coeff(), rhs),
    })
}

/// `L(K_1, ..., K_n)` for rational functions in lowest terms:
/// `deg <= d n deg L` and `h <= h(L) + h deg L + (3dn+1) deg L log(n+1)`.
pub fn oracle_rational_composition(
    l: &RationalFn<Integers>,
    ks: &[RationalFn<Integers>],
) -> Result<CompositionCheck, BoundsError> {
    let n = l.nvars();
    if ks.len() != n {
        return Err(BoundsError::Hypothesis(format!("outer function has {n} variables but {} arguments", ks.len())));
    }
    let comp = compose_rational_fn(l, ks)
        .map_err(|e| BoundsError::Hypothesis(format!("composition is undefined: {e}")))?
        .normalize()?;
    let l = l.normalize()?;
    let ks = ks.iter().map(|k| k.normalize()).collect::<Result<Vec<_>, _>>()?;
    let d = ks.iter().map(|k| k.total_degree().or_zero()).max().unwrap_or(0);
    let mk = ks.iter().map(|k| k.max_abs_coeff()).max().unwrap_or_default();
    let deg_l = l.total_degree().or_zero();
    let rhs = l.max_abs_coeff() * num_traits::pow(mk, deg_l as usize) * np1_pow(n, (3 * d * n as u64 + 1) * deg_l);
    Ok(CompositionCheck {
        degree: comp.total_degree().or_zero(),
        degree_bound: d * n as u64 * deg_l,
        height: BoundCheck::new(comp.max_abs_coeff(), rhs),
    })
}

/// Height inequalities along the iterates of one level.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthOracleRow {
    /// One-based level.
    pub i: usize,
    pub k: usize,
    /// Sum-of-degrees bound on the leading polynomial's iterate.
    pub bound_5t: Option<BoundCheck>,
    /// Per-level iterate bound; on the last level the displayed closed-form
    /// bound.
    pub bound_iterate: BoundCheck,
    /// Last level only: a bound valid for every `g_n`, `h_n`.
    pub bound_last_corrected: Option<BoundCheck>,
}

pub fn oracle_growth(sys: &TriangularSystem, kmax: usize, opts: &IterOptions) -> Result<Vec<GrowthOracleRow>, BoundsError> {
    let lead = validate_system(sys)?;
    let report = growth_report(sys, &lead, kmax, opts)?;
    Ok(report
        .rows
        .into_iter()
        .map(|r| GrowthOracleRow {
            i: r.i,
            k: r.k,
            bound_5t: r.bound_5t,
            bound_iterate: r.bound_l36,
            bound_last_corrected: r.bound_last_corrected,
        })
        .collect())
}

/// The most frequent consecutive gap `r <= 2N/(M-1)` of an increasing
/// sequence, with the guaranteed thresholds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapResult {
    pub r: u64,
    pub count: u64,
    /// `2N/(M-1)`.
    pub r_max: f64,
    /// `(M-1)^2/(4N)`.
    pub count_min: f64,
    /// `r <= 2N/(M-1)` and `count >= (M-1)^2/(4N)`, checked in integers.
    pub guarantee_holds: bool,
}

/// Ties go to the smallest `r`.
pub fn gap_structure(seq: &[u64], big_n: u64) -> Result<GapResult, BoundsError> {
    let m = seq.len() as u64;
    if m < 2 || 2 * m > big_n {
        return Err(BoundsError::Hypothesis(format!("need 2 <= M <= N/2, got M = {m}, N = {big_n}")));
    }
    if seq.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BoundsError::Hypothesis("sequence must be strictly increasing".into()));
    }
    if seq[seq.len() - 1] > big_n {
        return Err(BoundsError::Hypothesis(format!("last term exceeds N = {big_n}")));
    }
    let mut tally: BTreeMap<u64, u64> = BTreeMap::new();
    for w in seq.windows(2) {
        let r = w[1] - w[0];
        if r * (m - 1) <= 2 * big_n {
            *tally.entry(r).or_default() += 1;
        }
    }
    let (r, count) = tally
        .iter()
        .fold((0, 0), |(br, bc), (&r, &c)| if c > bc { (r, c) } else { (br, bc) });
    let guarantee_holds = count > 0 && r * (m - 1) <= 2 * big_n && 4 * big_n * count >= (m - 1) * (m - 1);
    Ok(GapResult {
        r,
        count,
        r_max: 2.0 * big_n as f64 / (m - 1) as f64,
        count_min: ((m - 1) * (m - 1)) as f64 / (4 * big_n) as f64,
        guarantee_holds,
    })
}
