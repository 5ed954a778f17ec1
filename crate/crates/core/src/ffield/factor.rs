use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::unipoly::UniPoly;
use super::FieldError;
use crate::polyring::Field;

/// Fields at most this large are scanned element by element for roots.
pub const SCAN_LIMIT: u64 = 1 << 16;

/// Seed used when callers do not supply one.
pub const DEFAULT_FACTOR_SEED: u64 = 0x7269_6473_7973;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootStrategy {
    Auto,
    Scan,
    Frobenius,
}

/// `lead * Π factor^mult`, factors monic, irreducible and pairwise distinct,
/// sorted by degree then coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorList<F: Field> {
    pub lead: F::Elem,
    pub factors: Vec<(UniPoly<F>, u32)>,
}

impl<F: Field> FactorList<F> {
    pub fn expand(&self, field: &F) -> UniPoly<F> {
        let mut acc = UniPoly::constant(field.clone(), self.lead.clone());
        for (g, e) in &self.factors {
            for _ in 0..*e {
                acc = acc.mul(g);
            }
        }
        acc
    }

    /// Number of distinct roots over the algebraic closure.
    pub fn closure_root_count(&self) -> usize {
        self.factors.iter().map(|(g, _)| g.degree().unwrap_or(0)).sum()
    }
}

/// `f / gcd(f, f')` iterated to a genuinely squarefree monic polynomial; the
/// product of the distinct monic irreducible factors of `f`.
pub fn squarefree_part<F: Field>(f: &UniPoly<F>) -> Result<UniPoly<F>, FieldError> {
    let fl = squarefree_decomposition(f)?;
    let field = f.field().clone();
    Ok(fl.into_iter().fold(UniPoly::one(field), |acc, (g, _)| acc.mul(&g)))
}

/// Squarefree decomposition `f = lc * Π g_i^i` (entries with `g_i = 1`
/// omitted). Each `g_i` is monic and squarefree.
pub fn squarefree_decomposition<F: Field>(f: &UniPoly<F>) -> Result<Vec<(UniPoly<F>, u32)>, FieldError> {
    if f.is_zero() {
        return Err(FieldError::ZeroPolynomial);
    }
    let mut out = Vec::new();
    sff(&f.monic(), 1, &mut out);
    out.sort_by_key(|(_, e)| *e);
    // Merge equal multiplicities arising from the p-th power recursion.
    let mut merged: Vec<(UniPoly<F>, u32)> = Vec::new();
    for (g, e) in out {
        match merged.last_mut() {
            Some((h, e2)) if *e2 == e => *h = h.mul(&g),
            _ => merged.push((g, e)),
        }
    }
    Ok(merged)
}

fn sff<F: Field>(f: &UniPoly<F>, scale: u32, out: &mut Vec<(UniPoly<F>, u32)>) {
    if f.is_constant() {
        return;
    }
    let field = f.field().clone();
    let p = field.characteristic();
    let df = f.derivative();
    if df.is_zero() {
        sff(&pth_root_poly(f), scale * p as u32, out);
        return;
    }
    let mut c = f.gcd(&df);
    let mut w = f.div_rem(&c).0;
    let mut i = 1u32;
    while !w.is_constant() {
        let y = w.gcd(&c);
        let z = w.div_rem(&y).0;
        if !z.is_constant() {
            out.push((z.monic(), i * scale));
        }
        i += 1;
        w = y;
        c = c.div_rem(&w).0;
    }
    if !c.is_constant() {
        sff(&pth_root_poly(&c), scale * p as u32, out);
    }
}

/// `g` with `g^p = f`, for `f` a polynomial in `x^p`.
fn pth_root_poly<F: Field>(f: &UniPoly<F>) -> UniPoly<F> {
    let field = f.field().clone();
    let p = field.characteristic() as usize;
    let coeffs = f
        .coeffs()
        .iter()
        .step_by(p)
        .map(|c| field.pth_root(c))
        .collect();
    UniPoly::new(field, coeffs)
}

/// `x^(q^d) mod f` built by repeated Frobenius.
fn frobenius_powers<F: Field>(f: &UniPoly<F>, upto: usize) -> Vec<UniPoly<F>> {
    let field = f.field().clone();
    let q = field.order_big();
    let mut out = vec![UniPoly::x(field).rem(f)];
    for _ in 0..upto {
        let next = out.last().unwrap().powmod(&q, f);
        out.push(next);
    }
    out
}

/// Distinct-degree factorization of a monic squarefree `f`: pairs
/// `(product of all irreducible factors of degree d, d)`.
pub fn distinct_degree<F: Field>(f: &UniPoly<F>) -> Vec<(UniPoly<F>, usize)> {
    let field = f.field().clone();
    let q = field.order_big();
    let x = UniPoly::x(field);
    let mut rest = f.monic();
    let mut h = x.rem(&rest);
    let mut out = Vec::new();
    let mut d = 0;
    while let Some(deg) = rest.degree() {
        if deg == 0 {
            break;
        }
        d += 1;
        if 2 * d > deg {
            out.push((rest.clone(), deg));
            break;
        }
        h = h.powmod(&q, &rest);
        let g = h.sub(&x).gcd(&rest);
        if !g.is_one() {
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    out
}

/// Splits a monic squarefree `f` whose irreducible factors all have degree `d`.
pub fn equal_degree<F: Field>(f: &UniPoly<F>, d: usize, rng: &mut ChaCha8Rng) -> Vec<UniPoly<F>> {
    let n = f.degree().unwrap_or(0);
    if n <= d {
        return vec![f.monic()];
    }
    let field = f.field().clone();
    let q = field.order_big();
    let p = field.characteristic();
    loop {
        let a = random_poly(&field, n, rng);
        if a.is_constant() {
            continue;
        }
        let g0 = a.gcd(f);
        if !g0.is_one() {
            return split_pair(f, &g0, d, rng);
        }
        let b = if p == 2 {
            // Trace to F_2: a + a^2 + ... + a^(2^(k d - 1)), where q = 2^k.
            let k = q.bits() as usize - 1;
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..k * d {
                t = t.mulmod(&t, f);
                acc = acc.add(&t);
            }
            acc
        } else {
            let e = (q.pow(d as u32) - BigUint::one()) >> 1;
            a.powmod(&e, f).sub(&UniPoly::one(field.clone()))
        };
        let g = b.gcd(f);
        if !g.is_one() && g.degree() != f.degree() && !g.is_zero() {
            return split_pair(f, &g, d, rng);
        }
    }
}

fn split_pair<F: Field>(f: &UniPoly<F>, g: &UniPoly<F>, d: usize, rng: &mut ChaCha8Rng) -> Vec<UniPoly<F>> {
    let h = f.div_rem(g).0;
    let mut out = equal_degree(g, d, rng);
    out.extend(equal_degree(&h.monic(), d, rng));
    out
}

fn random_poly<F: Field>(field: &F, n: usize, rng: &mut ChaCha8Rng) -> UniPoly<F> {
    let q = field.order();
    let coeffs = (0..n).map(|_| field.element(rng.gen_range(0..q))).collect();
    UniPoly::new(field.clone(), coeffs)
}

/// Complete factorization; the splitting stage draws from a ChaCha stream
/// seeded with `seed`, so results are reproducible.
pub fn factor_univariate<F: Field>(f: &UniPoly<F>, seed: u64) -> Result<FactorList<F>, FieldError> {
    if f.is_zero() {
        return Err(FieldError::ZeroPolynomial);
    }
    let field = f.field().clone();
    let lead = f.leading().unwrap().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Vec::new();
    for (g, e) in squarefree_decomposition(f)? {
        for (block, d) in distinct_degree(&g) {
            for h in equal_degree(&block, d, &mut rng) {
                factors.push((h, e));
            }
        }
    }
    factors.sort_by(|(a, _), (b, _)| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| key(&field, a).cmp(&key(&field, b)))
    });
    Ok(FactorList { lead, factors })
}

fn key<F: Field>(field: &F, g: &UniPoly<F>) -> Vec<u64> {
    g.coeffs().iter().rev().map(|c| field.index_of(c)).collect()
}

/// Roots of `f` in its coefficient field, ascending by enumeration index.
pub fn roots_in_field<F: Field>(f: &UniPoly<F>, strategy: RootStrategy) -> Result<Vec<F::Elem>, FieldError> {
    roots_in_field_seeded(f, strategy, DEFAULT_FACTOR_SEED)
}

pub fn roots_in_field_seeded<F: Field>(
    f: &UniPoly<F>,
    strategy: RootStrategy,
    seed: u64,
) -> Result<Vec<F::Elem>, FieldError> {
    if f.is_zero() {
        return Err(FieldError::ZeroPolynomial);
    }
    let field = f.field().clone();
    let scan = match strategy {
        RootStrategy::Scan => true,
        RootStrategy::Frobenius => false,
        RootStrategy::Auto => field.order_big() <= BigUint::from(SCAN_LIMIT),
    };
    let mut roots = if scan {
        field.elements().filter(|x| field.is_zero(&f.eval(x))).collect::<Vec<_>>()
    } else {
        let fm = f.monic();
        if fm.is_constant() {
            return Ok(Vec::new());
        }
        let xq = frobenius_powers(&fm, 1).pop().unwrap();
        let g = xq.sub(&UniPoly::x(field.clone())).gcd(&fm);
        if g.is_constant() {
            Vec::new()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            equal_degree(&g, 1, &mut rng)
                .into_iter()
                .map(|lin| field.neg(&lin.coeffs()[0]))
                .collect()
        }
    };
    roots.sort_by_key(|r| field.index_of(r));
    Ok(roots)
}

/// Distinct roots of `f` over the algebraic closure: the degree of its
/// squarefree part.
pub fn count_distinct_roots_closure<F: Field>(f: &UniPoly<F>) -> Result<usize, FieldError> {
    Ok(squarefree_part(f)?.degree().unwrap_or(0))
}
