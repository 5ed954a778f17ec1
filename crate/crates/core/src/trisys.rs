//! Triangular systems `F_i = G_i X_i^{e_i} + H_i` with `G_i, H_i` in the
//! variables of higher index, the dominance conditions on their leading
//! monomials, and the exact degree recurrence for their iterates.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use thiserror::Error;

use crate::polyring::{Exponents, HeightValue, Integers, MultiPoly, PolyError, RationalFn};

/// The exponent `e_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// One level `F_i = G_i X_i^{e_i} + H_i`. On the last level `g` and `h` are
/// integer constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub e: Sign,
    pub g: MultiPoly<Integers>,
    pub h: MultiPoly<Integers>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("a system needs at least one level")]
    Empty,
    #[error("level {level}: polynomial has {got} variables, expected {expected}")]
    VariableCount { level: usize, expected: usize, got: usize },
    #[error("level {level}: uses X{var}, a variable of index <= level")]
    LowerVariable { level: usize, var: usize },
    #[error("last level: g and h must be integer constants")]
    LastLevelNotConstant,
    #[error("last level: g must be nonzero")]
    ZeroLastCoefficient,
    #[error("expected {expected} variable names, got {got}")]
    NameCount { expected: usize, got: usize },
}

/// A structurally well-formed triangular system. Levels are stored
/// zero-based: `levels()[0]` is `F_1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangularSystem {
    names: Vec<String>,
    levels: Vec<Level>,
}

impl TriangularSystem {
    pub fn new(levels: Vec<Level>) -> Result<Self, SystemError> {
        let n = levels.len();
        Self::with_names(levels, MultiPoly::<Integers>::default_names(n))
    }

    pub fn with_names(levels: Vec<Level>, names: Vec<String>) -> Result<Self, SystemError> {
        let n = levels.len();
        if n == 0 {
            return Err(SystemError::Empty);
        }
        if names.len() != n {
            return Err(SystemError::NameCount { expected: n, got: names.len() });
        }
        for (i, lv) in levels.iter().enumerate() {
            for p in [&lv.g, &lv.h] {
                if p.nvars() != n {
                    return Err(SystemError::VariableCount {
                        level: i + 1,
                        expected: n,
                        got: p.nvars(),
                    });
                }
                if let Some(&v) = p.support_vars().iter().find(|&&v| v <= i) {
                    if i + 1 == n {
                        return Err(SystemError::LastLevelNotConstant);
                    }
                    return Err(SystemError::LowerVariable { level: i + 1, var: v + 1 });
                }
            }
        }
        if levels[n - 1].g.is_zero() {
            return Err(SystemError::ZeroLastCoefficient);
        }
        Ok(TriangularSystem { names, levels })
    }

    /// Convenience constructor from integer term lists, one `(e, G, H)` per level.
    #[allow(clippy::type_complexity)]
    pub fn from_terms(levels_terms: &[(i64, &[(Vec<u32>, i64)], &[(Vec<u32>, i64)])]) -> Result<Self, SystemError> {
        let n = levels_terms.len();
        let levels = levels_terms
            .iter()
            .map(|(e, g, h)| Level {
                e: Sign::from_i64(*e).expect("e must be 1 or -1"),
                g: MultiPoly::from_i64_terms(n, g),
                h: MultiPoly::from_i64_terms(n, h),
            })
            .collect();
        Self::new(levels)
    }

    pub fn n(&self) -> usize {
        self.levels.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> &Level {
        &self.levels[i]
    }

    pub fn signs(&self) -> Vec<Sign> {
        self.levels.iter().map(|l| l.e).collect()
    }

    /// `g_n` and `h_n`.
    pub fn last_coefficients(&self) -> (BigInt, BigInt) {
        let lv = &self.levels[self.n() - 1];
        (lv.g.constant_term(), lv.h.constant_term())
    }

    /// `F_i` as a rational function (zero-based `i`), unreduced:
    /// `X_i G_i + H_i` or `(G_i + X_i H_i) / X_i`.
    pub fn component(&self, i: usize) -> RationalFn<Integers> {
        let n = self.n();
        let lv = &self.levels[i];
        let x = MultiPoly::var(Integers, n, i);
        match lv.e {
            Sign::Plus => RationalFn::from_poly(&(&x * &lv.g) + &lv.h),
            Sign::Minus => RationalFn::new(&lv.g + &(&x * &lv.h), x).expect("nonzero denominator"),
        }
    }

    pub fn components(&self) -> Vec<RationalFn<Integers>> {
        (0..self.n()).map(|i| self.component(i)).collect()
    }

    /// True when every level strictly below `i` (zero-based) has `e = +1`, so
    /// that all substitutions into `G_i`, `H_i` are polynomial.
    pub fn polynomial_below(&self, i: usize) -> bool {
        self.levels[i + 1..].iter().all(|l| l.e == Sign::Plus)
    }
}

/// The polynomial in which a dominance inequality failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Residual {
    /// `G_i` minus its leading term (`e_i = +1`).
    GTilde,
    /// `H_i` (`e_i = +1`).
    H,
    /// `H_i` minus its leading term (`e_i = -1`).
    HTilde,
    /// `G_i` (`e_i = -1`).
    G,
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Residual::GTilde => "G~",
            Residual::H => "H",
            Residual::HTilde => "H~",
            Residual::G => "G",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// The polynomial that must carry the leading monomial is zero.
    ZeroLeadingPolynomial,
    /// No single term attains every per-variable maximum degree.
    NoUniqueLeadingMonomial,
    /// `s_{i,i+1} = 0`.
    ZeroSubdiagonalExponent,
    /// `deg_{X_var} poly` must be below `bound` (a zero bound forbids the
    /// variable entirely).
    ResidualDegree {
        poly: Residual,
        var: usize,
        degree: u32,
        bound: u32,
    },
}

/// The first failed dominance condition, with one-based level and variable
/// indices.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct Violation {
    pub level: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lv = self.level;
        match &self.kind {
            ViolationKind::ZeroLeadingPolynomial => write!(f, "level {lv}: leading polynomial is zero"),
            ViolationKind::NoUniqueLeadingMonomial => {
                write!(f, "level {lv}: no single monomial dominates every variable")
            }
            ViolationKind::ZeroSubdiagonalExponent => {
                write!(f, "level {lv}: s_{{{lv},{}}} = 0", lv + 1)
            }
            ViolationKind::ResidualDegree { poly, var, degree, bound } => write!(
                f,
                "level {lv}: deg_X{var} {poly} = {degree} violates < {bound}"
            ),
        }
    }
}

/// Leading data of one level `i < n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeadingRow {
    /// `g_i` for `e_i = +1`, `h_i` for `e_i = -1`.
    pub coeff: BigInt,
    /// `s_{i,1..n}`; entries with index `<= i` are zero.
    pub s: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeadingData {
    pub rows: Vec<LeadingRow>,
}

impl LeadingData {
    /// `s_{i,j}` with zero-based `i`, `j`.
    pub fn s(&self, i: usize, j: usize) -> u32 {
        self.rows[i].s[j]
    }

    /// `s_{i,i+1} ... s_{n-1,n}` for zero-based `i`.
    pub fn chain_product(&self, i: usize) -> BigInt {
        (i..self.rows.len())
            .map(|r| BigInt::from(self.rows[r].s[r + 1]))
            .product()
    }
}

/// Checks the dominance conditions level by level and extracts `s_{i,j}` and
/// the leading coefficients.
pub fn validate_system(sys: &TriangularSystem) -> Result<LeadingData, Violation> {
    let n = sys.n();
    let mut rows = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n.saturating_sub(1) {
        let lv = sys.level(i);
        let fail = |kind| Violation { level: i + 1, kind };
        let (lead_poly, other, r_lead, r_other, other_factor) = match lv.e {
            Sign::Plus => (&lv.g, &lv.h, Residual::GTilde, Residual::H, 1),
            Sign::Minus => (&lv.h, &lv.g, Residual::HTilde, Residual::G, 2),
        };
        if lead_poly.is_zero() {
            return Err(fail(ViolationKind::ZeroLeadingPolynomial));
        }
        let maxv = lead_poly.max_exponents();
        let key = Exponents::from_vec(maxv.clone());
        let coeff = lead_poly.coeff(&key);
        if coeff.is_zero() {
            return Err(fail(ViolationKind::NoUniqueLeadingMonomial));
        }
        if maxv[i + 1] == 0 {
            return Err(fail(ViolationKind::ZeroSubdiagonalExponent));
        }
        let residual = lead_poly - &MultiPoly::monomial(Integers, key, coeff.clone());
        let res_max = residual.max_exponents();
        let other_max = other.max_exponents();
        for j in i + 1..n {
            let s = maxv[j];
            if let Some(kind) = residual_check(&residual, res_max[j], s, r_lead, j) {
                return Err(fail(kind));
            }
            if let Some(kind) = residual_check(other, other_max[j], other_factor * s, r_other, j) {
                return Err(fail(kind));
            }
        }
        rows.push(LeadingRow { coeff, s: maxv });
    }
    Ok(LeadingData { rows })
}

fn residual_check(p: &MultiPoly<Integers>, deg: u32, bound: u32, poly: Residual, j: usize) -> Option<ViolationKind> {
    let ok = if bound == 0 {
        p.is_zero() || deg == 0
    } else {
        deg < bound
    };
    (!ok).then_some(ViolationKind::ResidualDegree {
        poly,
        var: j + 1,
        degree: deg,
        bound,
    })
}

/// `d = max deg F_i` and `h = max h(F_i)` over coprime representatives.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemMetrics {
    pub n: usize,
    pub d: u64,
    pub h: HeightValue,
}

pub fn system_metrics(sys: &TriangularSystem) -> Result<SystemMetrics, PolyError> {
    let mut d = 0u64;
    let mut h: Option<HeightValue> = None;
    for f in sys.components() {
        let f = f.normalize()?;
        d = d.max(f.total_degree().or_zero());
        let hf = f.height()?;
        h = Some(match h {
            None => hf,
            Some(prev) => prev.max(hf),
        });
    }
    Ok(SystemMetrics {
        n: sys.n(),
        d,
        h: h.expect("at least one level"),
    })
}

/// Degree tables from the dominance recurrence: `table[i][k] = deg F_i^{(k)}`
/// for zero-based levels and `0 <= k <= kmax`.
pub fn predicted_degrees(sys: &TriangularSystem, lead: &LeadingData, kmax: usize) -> Vec<Vec<u64>> {
    let n = sys.n();
    let mut table = vec![vec![1u64; kmax + 1]; n];
    for i in (0..n.saturating_sub(1)).rev() {
        let row = &lead.rows[i];
        let lower = &table[i + 1..];
        // Degree of the leading polynomial after substituting F^{(j-1)}.
        let lead_deg = |j: usize| -> u64 {
            (i + 1..n)
                .map(|m| row.s[m] as u64 * lower[m - i - 1][j - 1])
                .sum()
        };
        // Largest weighted exponent over the terms of `p`.
        let subst_deg = |p: &MultiPoly<Integers>, j: usize| -> Option<u64> {
            p.terms()
                .map(|(e, _)| (i + 1..n).map(|m| e.get(m) as u64 * lower[m - i - 1][j - 1]).sum())
                .max()
        };
        let lv = sys.level(i);
        let mut out = vec![1u64; kmax + 1];
        match lv.e {
            Sign::Plus => {
                let mut acc = 1u64;
                for (j, slot) in out.iter_mut().enumerate().skip(1) {
                    acc += lead_deg(j);
                    *slot = acc;
                }
            }
            Sign::Minus if lv.g.is_zero() => {
                for (j, slot) in out.iter_mut().enumerate().skip(1) {
                    *slot = lead_deg(j);
                }
            }
            Sign::Minus => {
                // R_j = G^{(j)} R_{j-2} + H^{(j)} R_{j-1}, likewise S_j;
                // degrees with None for the zero polynomial.
                let mut r = vec![None, Some(0u64)];
                let mut s = vec![Some(0u64), None];
                for j in 1..=kmax {
                    let gd = subst_deg(&lv.g, j);
                    let hd = Some(lead_deg(j));
                    let step = |v: &Vec<Option<u64>>| {
                        let a = add(gd, v[j - 1]);
                        let b = add(hd, v[j]);
                        a.max(b)
                    };
                    let rj = step(&r);
                    let sj = step(&s);
                    r.push(rj);
                    s.push(sj);
                    let cand = [
                        add(Some(1), r[j + 1]),
                        s[j + 1],
                        add(Some(1), r[j]),
                        s[j],
                    ];
                    out[j] = cand.iter().flatten().copied().max().unwrap_or(0);
                }
            }
        }
        table[i] = out;
    }
    table
}

fn add(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    Some(a? + b?)
}

/// `deg F_i^{(k)}` from the dominance recurrence (zero-based `i`).
pub fn predicted_degree(sys: &TriangularSystem, lead: &LeadingData, i: usize, k: usize) -> u64 {
    predicted_degrees(sys, lead, k)[i][k]
}

/// Leading-order ratio `(n-i)! deg F_i^{(k)} / k^{n-i}` (one-based `n - i`
/// counts levels strictly below), to be compared with
/// `s_{i,i+1} ... s_{n-1,n}`.
pub fn leading_ratio(n: usize, i: usize, k: usize, degree: u64) -> f64 {
    let m = (n - 1 - i) as i32;
    let fact: f64 = (1..=m).map(f64::from).product();
    fact * degree as f64 / (k as f64).powi(m)
}

/// Bounds for [`random_system`].
#[derive(Clone, Copy, Debug)]
pub struct GeneratorParams {
    pub coeff_bound: i64,
    pub s_max: u32,
    /// Upper bound on the number of residual terms per polynomial.
    pub max_residual_terms: usize,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            coeff_bound: 9,
            s_max: 3,
            max_residual_terms: 3,
        }
    }
}

fn nonzero_coeff<R: Rng>(rng: &mut R, bound: i64) -> i64 {
    loop {
        let c = rng.gen_range(-bound..=bound);
        if c != 0 {
            return c;
        }
    }
}

fn random_residual<R: Rng>(rng: &mut R, n: usize, bounds: &[u32], params: &GeneratorParams) -> MultiPoly<Integers> {
    let count = rng.gen_range(0..=params.max_residual_terms);
    let mut terms = Vec::with_capacity(count);
    for _ in 0..count {
        let e: Vec<u32> = (0..n).map(|j| if bounds[j] == 0 { 0 } else { rng.gen_range(0..bounds[j]) }).collect();
        terms.push((Exponents::from_vec(e), BigInt::from(nonzero_coeff(rng, params.coeff_bound))));
    }
    MultiPoly::from_terms(Integers, n, terms)
}

/// A random system satisfying the dominance conditions, with the given signs.
/// Coefficients lie in `[-coeff_bound, coeff_bound]` and every `s_{i,j}`
/// (`j > i`) in `[1, s_max]`.
pub fn random_system<R: Rng>(rng: &mut R, signs: &[Sign], params: &GeneratorParams) -> TriangularSystem {
    let n = signs.len();
    let mut levels = Vec::with_capacity(n);
    for (i, &e) in signs.iter().enumerate() {
        if i + 1 == n {
            let g = nonzero_coeff(rng, params.coeff_bound);
            let h = rng.gen_range(-params.coeff_bound..=params.coeff_bound);
            levels.push(Level {
                e,
                g: MultiPoly::constant(Integers, n, BigInt::from(g)),
                h: MultiPoly::constant(Integers, n, BigInt::from(h)),
            });
            continue;
        }
        let mut s = vec![0u32; n];
        for slot in s.iter_mut().skip(i + 1) {
            *slot = rng.gen_range(1..=params.s_max);
        }
        let lead = MultiPoly::monomial(
            Integers,
            Exponents::from_vec(s.clone()),
            BigInt::from(nonzero_coeff(rng, params.coeff_bound)),
        );
        let tilde = random_residual(rng, n, &s, params);
        let lead_poly = &lead + &tilde;
        let level = match e {
            Sign::Plus => Level {
                e,
                g: lead_poly,
                h: random_residual(rng, n, &s, params),
            },
            Sign::Minus => {
                let twice: Vec<u32> = s.iter().map(|x| 2 * x).collect();
                Level {
                    e,
                    g: random_residual(rng, n, &twice, params),
                    h: lead_poly,
                }
            }
        };
        levels.push(level);
    }
    TriangularSystem::new(levels).expect("generated system is well formed")
}

/// Signs drawn uniformly.
pub fn random_signs<R: Rng>(rng: &mut R, n: usize) -> Vec<Sign> {
    (0..n)
        .map(|_| if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus })
        .collect()
}

/// `|g_n| >= 2` or a Möbius last level: the last-level equation
/// `F_n^{(k)}(x) = x` is then never an identity for `e_n = +1`.
pub fn last_level_nondegenerate(sys: &TriangularSystem) -> bool {
    let (g, _) = sys.last_coefficients();
    sys.level(sys.n() - 1).e == Sign::Minus || g.abs() >= BigInt::from(2)
}
