//! Modular multivariate gcd over the integers.
//!
//! Images are computed over word-size prime fields by dense evaluation and
//! Newton interpolation, one variable at a time, and combined by Chinese
//! remaindering. A candidate is accepted only after trial division over the
//! integers, so every returned value is exact.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::{Exponents, MultiPoly};
use super::ring::{is_prime, Field, Integers, PrimeField, Ring};
use crate::ffield::UniPoly;

type Fp = MultiPoly<PrimeField>;
type Key = Vec<u32>;

const PRIME_CEILING: u64 = (1 << 62) - 1;
const MAX_PRIMES: usize = 4096;
/// Extra evaluation points tolerated beyond the degree bound before giving up.
const POINT_SLACK: usize = 24;

fn key_of(e: &Exponents, order: &[usize]) -> Key {
    order.iter().map(|&v| e.get(v)).collect()
}

fn lead_key<R: Ring>(p: &MultiPoly<R>, order: &[usize]) -> Option<Key> {
    p.terms().map(|(e, _)| key_of(e, order)).max()
}

/// Leading coefficient for the lexicographic order given by `order`; the
/// support must lie in `order`.
fn lead_coeff<R: Ring>(p: &MultiPoly<R>, order: &[usize]) -> Option<R::Elem> {
    p.terms()
        .max_by(|(a, _), (b, _)| key_of(a, order).cmp(&key_of(b, order)))
        .map(|(_, c)| c.clone())
}

fn lex_monic(p: &Fp, order: &[usize]) -> Fp {
    match lead_coeff(p, order) {
        Some(c) => {
            let f = *p.ring();
            p.scale(&f.inv(&c).expect("nonzero leading coefficient"))
        }
        None => p.clone(),
    }
}

fn var_support(p: &Fp, vars: &[usize]) -> Vec<usize> {
    let s = p.support_vars();
    vars.iter().copied().filter(|v| s.contains(v)).collect()
}

fn uni_in(f: PrimeField, terms: &[(u32, u64)]) -> UniPoly<PrimeField> {
    let d = terms.iter().map(|t| t.0).max().unwrap_or(0) as usize;
    let mut cs = vec![0u64; d + 1];
    for &(k, c) in terms {
        cs[k as usize] = f.add(&cs[k as usize], &c);
    }
    UniPoly::new(f, cs)
}

fn uni_to_multi(u: &UniPoly<PrimeField>, n: usize, y: usize) -> Fp {
    let f = *u.field();
    let terms = u.coeffs().iter().enumerate().filter(|(_, c)| **c != 0).map(|(k, c)| {
        let mut e = vec![0u32; n];
        e[y] = k as u32;
        (Exponents::from_vec(e), *c)
    });
    MultiPoly::from_terms(f, n, terms)
}

/// Coefficients of `p` in the variables `rest`, each a univariate polynomial
/// in `y`, keyed by their exponents in `rest`.
fn split_y(p: &Fp, rest: &[usize], y: usize) -> BTreeMap<Key, Vec<(u32, u64)>> {
    let mut out: BTreeMap<Key, Vec<(u32, u64)>> = BTreeMap::new();
    for (e, c) in p.terms() {
        out.entry(key_of(e, rest)).or_default().push((e.get(y), *c));
    }
    out
}

fn content_y(p: &Fp, rest: &[usize], y: usize) -> UniPoly<PrimeField> {
    let f = *p.ring();
    let mut g = UniPoly::zero(f);
    for ts in split_y(p, rest, y).values() {
        g = g.gcd(&uni_in(f, ts));
        if g.degree() == Some(0) {
            break;
        }
    }
    g
}

fn lead_y(p: &Fp, rest: &[usize], y: usize) -> UniPoly<PrimeField> {
    let f = *p.ring();
    let parts = split_y(p, rest, y);
    let (_, ts) = parts.iter().next_back().expect("nonzero polynomial");
    uni_in(f, ts)
}

fn eval_y(p: &Fp, y: usize, a: u64) -> Fp {
    let f = *p.ring();
    let terms = p.terms().map(|(e, c)| {
        let mut ev = e.as_slice().to_vec();
        let k = ev[y] as u64;
        ev[y] = 0;
        (Exponents::from_vec(ev), f.mul(c, &f.pow(&a, k)))
    });
    MultiPoly::from_terms(f, p.nvars(), terms)
}

/// Gcd over `F_p` of polynomials supported on `vars`, normalized to be monic
/// for the lexicographic order of `vars`. `None` when interpolation fails to
/// converge.
fn pgcd(a: &Fp, b: &Fp, vars: &[usize]) -> Option<Fp> {
    let f = *a.ring();
    let n = a.nvars();
    if a.is_zero() {
        return Some(lex_monic(b, vars));
    }
    if b.is_zero() {
        return Some(lex_monic(a, vars));
    }
    let mut used = var_support(a, vars);
    for v in var_support(b, vars) {
        if !used.contains(&v) {
            used.push(v);
        }
    }
    let vars: Vec<usize> = vars.iter().copied().filter(|v| used.contains(v)).collect();
    if a.is_constant() || b.is_constant() {
        return Some(MultiPoly::one(f, n));
    }
    if vars.len() == 1 {
        let y = vars[0];
        let ua = uni_in(f, &a.terms().map(|(e, c)| (e.get(y), *c)).collect::<Vec<_>>());
        let ub = uni_in(f, &b.terms().map(|(e, c)| (e.get(y), *c)).collect::<Vec<_>>());
        return Some(uni_to_multi(&ua.gcd(&ub), n, y));
    }
    let y = *vars.last().unwrap();
    let rest = &vars[..vars.len() - 1];

    let ca = content_y(a, rest, y);
    let cb = content_y(b, rest, y);
    let c = uni_to_multi(&ca.gcd(&cb), n, y);
    let a1 = a.div_exact(&uni_to_multi(&ca, n, y))?;
    let b1 = b.div_exact(&uni_to_multi(&cb, n, y))?;
    let la = lead_y(&a1, rest, y);
    let lb = lead_y(&b1, rest, y);
    let gamma = la.gcd(&lb);
    let bound = gamma.degree().unwrap_or(0)
        + (a1.degree_in(y).or_zero().min(b1.degree_in(y).or_zero()) as usize);

    let mut interp = MultiPoly::zero(f, n);
    let mut q = UniPoly::one(f);
    let mut cur: Option<Key> = None;
    let mut points = 0usize;
    let mut tried = 0usize;
    let mut alpha = 0u64;
    while tried <= 2 * bound + 2 * POINT_SLACK {
        alpha += 1;
        if alpha >= f.p() {
            return None;
        }
        if la.eval(&alpha) == 0 || lb.eval(&alpha) == 0 {
            continue;
        }
        tried += 1;
        let g = pgcd(&eval_y(&a1, y, alpha), &eval_y(&b1, y, alpha), rest)?;
        if g.is_constant() {
            return Some(lex_monic(&c, &vars));
        }
        let k = lead_key(&g, rest);
        match (&cur, &k) {
            (Some(c0), Some(k0)) if k0 > c0 => continue,
            (Some(c0), Some(k0)) if k0 < c0 => {
                interp = MultiPoly::zero(f, n);
                q = UniPoly::one(f);
                points = 0;
            }
            _ => {}
        }
        cur = k;
        let v = g.scale(&gamma.eval(&alpha));
        let diff = &v - &eval_y(&interp, y, alpha);
        let scale = f.inv(&q.eval(&alpha)).expect("distinct points");
        interp += &(&diff.scale(&scale) * &uni_to_multi(&q, n, y));
        q = q.mul(&UniPoly::new(f, vec![f.neg(&alpha), 1]));
        points += 1;
        if points > bound {
            let cand = interp.div_exact(&uni_to_multi(&content_y(&interp, rest, y), n, y))?;
            if a1.div_exact(&cand).is_some() && b1.div_exact(&cand).is_some() {
                return Some(lex_monic(&(&cand * &c), &vars));
            }
            if points > bound + POINT_SLACK {
                return None;
            }
        }
    }
    None
}

fn crt_step(r: &BigInt, m: &BigInt, s: u64, p: u64, m_inv: u64) -> BigInt {
    let f = PrimeField::new(p).expect("prime");
    let rp = f.reduce_bigint(r);
    let t = f.mul(&f.sub(&s, &rp), &m_inv);
    r + m * BigInt::from(t)
}

/// Gcd of nonzero integer polynomials by modular images; `None` when the
/// prime budget is exhausted.
pub(crate) fn modular_gcd(a: &MultiPoly<Integers>, b: &MultiPoly<Integers>) -> Option<MultiPoly<Integers>> {
    let n = a.nvars();
    let ca = a.content();
    let cb = b.content();
    let cg = ca.gcd(&cb);
    let a1 = a.div_exact(&MultiPoly::constant(Integers, n, ca))?;
    let b1 = b.div_exact(&MultiPoly::constant(Integers, n, cb))?;
    let mut vars = a1.support_vars();
    for v in b1.support_vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    // Highest degree first: it becomes the univariate main variable.
    vars.sort_by_key(|&v| std::cmp::Reverse(a1.degree_in(v).or_zero().max(b1.degree_in(v).or_zero())));
    let la = lead_coeff(&a1, &vars)?;
    let lb = lead_coeff(&b1, &vars)?;
    let gamma = la.gcd(&lb);

    let mut acc: BTreeMap<Exponents, BigInt> = BTreeMap::new();
    let mut modulus = BigInt::one();
    let mut cur: Option<Key> = None;
    let mut last_lift: Option<MultiPoly<Integers>> = None;
    let mut p = PRIME_CEILING;
    let mut used = 0usize;
    while used < MAX_PRIMES {
        p -= 2;
        if !is_prime(p) {
            continue;
        }
        let f = PrimeField::new(p).expect("prime");
        if f.reduce_bigint(&la) == 0 || f.reduce_bigint(&lb) == 0 {
            continue;
        }
        used += 1;
        let ap = a1.reduce_mod_p(f).value;
        let bp = b1.reduce_mod_p(f).value;
        let g = pgcd(&ap, &bp, &vars)?;
        if g.is_constant() {
            return Some(MultiPoly::constant(Integers, n, cg));
        }
        let k = lead_key(&g, &vars);
        match (&cur, &k) {
            (Some(c0), Some(k0)) if k0 > c0 => continue,
            (Some(c0), Some(k0)) if k0 < c0 => {
                acc.clear();
                modulus = BigInt::one();
                last_lift = None;
            }
            _ => {}
        }
        cur = k;
        let g = g.scale(&f.reduce_bigint(&gamma));
        let m_inv = f.inv(&f.reduce_bigint(&modulus)).expect("coprime moduli");
        let mut next = BTreeMap::new();
        let zero = BigInt::zero();
        let gmap: BTreeMap<&Exponents, u64> = g.terms().map(|(e, c)| (e, *c)).collect();
        for (e, r) in &acc {
            let s = gmap.get(e).copied().unwrap_or(0);
            next.insert(e.clone(), crt_step(r, &modulus, s, p, m_inv));
        }
        for (e, s) in &gmap {
            if !acc.contains_key(*e) {
                next.insert((*e).clone(), crt_step(&zero, &modulus, *s, p, m_inv));
            }
        }
        acc = next;
        modulus *= p;
        let half = &modulus / 2u32;
        let lifted = MultiPoly::from_terms(
            Integers,
            n,
            acc.iter().map(|(e, c)| (e.clone(), if c > &half { c - &modulus } else { c.clone() })),
        );
        if last_lift.as_ref() == Some(&lifted) {
            let content = lifted.content();
            let mut cand = lifted.div_exact(&MultiPoly::constant(Integers, n, content))?;
            if cand.leading_coeff_sign_negative() {
                cand = cand.neg();
            }
            if a1.div_exact(&cand).is_some() && b1.div_exact(&cand).is_some() {
                return Some(cand.scale(&cg));
            }
        }
        last_lift = Some(lifted);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, t: &[(Vec<u32>, i64)]) -> MultiPoly<Integers> {
        MultiPoly::from_i64_terms(n, t)
    }

    #[test]
    fn recovers_common_factor() {
        let g = p(3, &[(vec![1, 0, 1], 2), (vec![0, 2, 0], 1), (vec![0, 0, 0], -7)]);
        let u = p(3, &[(vec![0, 0, 2], 5), (vec![1, 0, 0], 1), (vec![0, 1, 1], 3)]);
        let w = p(3, &[(vec![0, 1, 0], 3), (vec![0, 0, 0], 1)]);
        let a = (&g * &u).scale(&BigInt::from(6));
        let b = (&(&g * &w) * &g).scale(&BigInt::from(4));
        let r = modular_gcd(&a, &b).unwrap();
        assert_eq!(r, g.scale(&BigInt::from(2)));
    }

    #[test]
    fn large_coefficients() {
        let big: BigInt = num_traits::pow(BigInt::from(10), 40) + 7;
        let g = &p(2, &[(vec![1, 1], 1)]) + &MultiPoly::constant(Integers, 2, big.clone());
        let u = &p(2, &[(vec![0, 3], 1)]) + &MultiPoly::constant(Integers, 2, &big * 3);
        let w = p(2, &[(vec![2, 0], 1), (vec![0, 1], -1)]);
        let r = modular_gcd(&(&g * &u), &(&g * &w)).unwrap();
        assert_eq!(r, g);
    }

    #[test]
    fn coprime_inputs() {
        let a = p(2, &[(vec![1, 1], 1), (vec![0, 0], 1)]);
        let b = p(2, &[(vec![1, 0], 1), (vec![0, 1], -1)]);
        assert_eq!(modular_gcd(&a, &b).unwrap(), MultiPoly::one(Integers, 2));
    }
}
