//! Multivariate gcd over the integers.
//!
//! Variables private to one argument are eliminated through coefficient
//! gcds, a cheap modular certificate short-circuits the coprime case, and
//! the modular algorithm handles the rest. Content/primitive-part recursion
//! with a subresultant remainder sequence remains as a fallback.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::modgcd::modular_gcd;
use super::poly::{Exponents, MultiPoly};
use super::ring::{Integers, PrimeField, Ring};
use crate::ffield::UniPoly;

/// `2^61 - 1`.
const CERT_PRIME: u64 = 2_305_843_009_213_693_951;
const CERT_SEED: u64 = 0x6763_6463;

pub fn gcd_many<'a>(it: impl Iterator<Item = &'a BigInt>) -> BigInt {
    let mut g = BigInt::zero();
    for c in it {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Greatest common divisor with positive lex-leading coefficient;
/// `gcd(0, 0) = 0`.
pub fn poly_gcd(a: &MultiPoly<Integers>, b: &MultiPoly<Integers>) -> MultiPoly<Integers> {
    let g = gcd_rec(a, b);
    if g.leading_coeff_sign_negative() {
        g.neg()
    } else {
        g
    }
}

fn int_const(nvars: usize, c: BigInt) -> MultiPoly<Integers> {
    MultiPoly::constant(Integers, nvars, c)
}

fn gcd_rec(a: &MultiPoly<Integers>, b: &MultiPoly<Integers>) -> MultiPoly<Integers> {
    let n = a.nvars();
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return int_const(n, a.content().gcd(&b.content()));
    }
    let sa = a.support_vars();
    let sb = b.support_vars();
    // Variables present in only one argument cannot occur in the gcd.
    let only_a: Vec<usize> = sa.iter().copied().filter(|v| !sb.contains(v)).collect();
    if !only_a.is_empty() {
        return gcd_with_parts(b, a, &only_a);
    }
    let only_b: Vec<usize> = sb.iter().copied().filter(|v| !sa.contains(v)).collect();
    if !only_b.is_empty() {
        return gcd_with_parts(a, b, &only_b);
    }
    if coprime_certificate(a, b, &sa) {
        return int_const(n, a.content().gcd(&b.content()));
    }
    if let Some(g) = modular_gcd(a, b) {
        return g;
    }
    let v = *sa
        .iter()
        .min_by_key(|&&v| a.degree_in(v).or_zero().max(b.degree_in(v).or_zero()))
        .unwrap();
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let cont = gcd_rec(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let prim = subresultant_gcd(&pa, &pb, v);
    &cont * &prim
}

/// `gcd(small, big)` where `vars` occur in `big` only: fold the gcd over the
/// coefficients of `big` viewed as a polynomial in `vars`.
fn gcd_with_parts(small: &MultiPoly<Integers>, big: &MultiPoly<Integers>, vars: &[usize]) -> MultiPoly<Integers> {
    let n = big.nvars();
    let mut parts: std::collections::BTreeMap<Vec<u32>, Vec<(Exponents, BigInt)>> = Default::default();
    for (e, c) in big.terms() {
        let key: Vec<u32> = vars.iter().map(|&v| e.get(v)).collect();
        let mut ev = e.as_slice().to_vec();
        for &v in vars {
            ev[v] = 0;
        }
        parts.entry(key).or_default().push((Exponents::from_vec(ev), c.clone()));
    }
    let mut parts: Vec<MultiPoly<Integers>> = parts
        .into_values()
        .map(|ts| MultiPoly::from_terms(Integers, n, ts))
        .collect();
    parts.sort_by_key(|p| p.num_terms());
    let mut g = small.clone();
    for c in &parts {
        if let Some(k) = g.as_constant() {
            return int_const(n, parts.iter().fold(k.abs(), |acc, c| acc.gcd(&c.content())));
        }
        g = gcd_rec(&g, c);
    }
    g
}

/// Coefficients of `p` as a polynomial in `X_v`, index = power of `X_v`.
pub(crate) fn coeffs_in(p: &MultiPoly<Integers>, v: usize) -> Vec<MultiPoly<Integers>> {
    let n = p.nvars();
    let d = p.degree_in(v).or_zero() as usize;
    let mut parts: Vec<Vec<(Exponents, BigInt)>> = vec![Vec::new(); d + 1];
    for (e, c) in p.terms() {
        let k = e.get(v) as usize;
        let mut ev = e.as_slice().to_vec();
        ev[v] = 0;
        parts[k].push((Exponents::from_vec(ev), c.clone()));
    }
    parts
        .into_iter()
        .map(|ts| MultiPoly::from_terms(Integers, n, ts))
        .collect()
}

fn from_coeffs(cs: &[MultiPoly<Integers>], v: usize, n: usize) -> MultiPoly<Integers> {
    let mut out = MultiPoly::zero(Integers, n);
    for (k, c) in cs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut e = vec![0u32; n];
        e[v] = k as u32;
        out += &c.mul_monomial(&Exponents::from_vec(e), &BigInt::one());
    }
    out
}

/// Gcd of the coefficients of `p` viewed in `X_v`.
pub(crate) fn content_in(p: &MultiPoly<Integers>, v: usize) -> MultiPoly<Integers> {
    let mut g = MultiPoly::zero(Integers, p.nvars());
    for c in coeffs_in(p, v) {
        if c.is_zero() {
            continue;
        }
        g = gcd_rec(&g, &c);
        if g.as_constant().is_some_and(|k| k.abs().is_one()) {
            break;
        }
    }
    g
}

/// Pseudo-remainder `lc(b)^(da - db + 1) a mod b` in `X_v`.
fn prem(a: &[MultiPoly<Integers>], b: &[MultiPoly<Integers>]) -> Vec<MultiPoly<Integers>> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r: Vec<MultiPoly<Integers>> = a.to_vec();
    let mut e = a.len() as i64 - b.len() as i64 + 1;
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for x in r.iter_mut() {
            *x = &*x * lb;
        }
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] = &r[shift + j] - &(&lr * bj);
        }
        trim(&mut r);
        e -= 1;
    }
    if e > 0 {
        let f = lb.pow(e as u32);
        for x in r.iter_mut() {
            *x = &*x * &f;
        }
    }
    r
}

fn trim(v: &mut Vec<MultiPoly<Integers>>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn subresultant_gcd(a: &MultiPoly<Integers>, b: &MultiPoly<Integers>, v: usize) -> MultiPoly<Integers> {
    let n = a.nvars();
    let (mut f, mut g) = {
        let ca = coeffs_in(a, v);
        let cb = coeffs_in(b, v);
        if ca.len() >= cb.len() {
            (ca, cb)
        } else {
            (cb, ca)
        }
    };
    let one = MultiPoly::one(Integers, n);
    let mut gg = one.clone();
    let mut h = one;
    loop {
        let delta = (f.len() - g.len()) as u32;
        let mut r = prem(&f, &g);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            return MultiPoly::one(Integers, n);
        }
        let divisor = &gg * &h.pow(delta);
        for x in r.iter_mut() {
            *x = x.div_exact(&divisor).expect("subresultant division is exact");
        }
        f = std::mem::replace(&mut g, r);
        gg = f.last().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            gg.pow(delta)
                .div_exact(&h.pow(delta - 1))
                .expect("subresultant division is exact")
        };
    }
    let gp = from_coeffs(&g, v, n);
    let c = content_in(&gp, v);
    gp.div_exact(&c).expect("content divides")
}

/// True when specialization modulo a large prime proves that `a` and `b`
/// share no factor of positive degree in any variable.
fn coprime_certificate(a: &MultiPoly<Integers>, b: &MultiPoly<Integers>, vars: &[usize]) -> bool {
    let field = PrimeField::new(CERT_PRIME).unwrap();
    let am = a.reduce_mod_p(field).value;
    let bm = b.reduce_mod_p(field).value;
    let mut rng = ChaCha8Rng::seed_from_u64(CERT_SEED);
    let n = a.nvars();
    for &v in vars {
        let point: Vec<u64> = (0..n).map(|_| rng.gen_range(1..CERT_PRIME)).collect();
        let ua = specialize(&am, v, &point);
        let ub = specialize(&bm, v, &point);
        if ua.degree() != Some(a.degree_in(v).or_zero() as usize)
            || ub.degree() != Some(b.degree_in(v).or_zero() as usize)
        {
            return false;
        }
        if ua.gcd(&ub).degree() != Some(0) {
            return false;
        }
    }
    true
}

fn specialize(p: &MultiPoly<PrimeField>, v: usize, point: &[u64]) -> UniPoly<PrimeField> {
    let f = *p.ring();
    let d = p.degree_in(v).or_zero() as usize;
    let mut cs = vec![0u64; d + 1];
    for (e, c) in p.terms() {
        let mut t = *c;
        for (j, &x) in point.iter().enumerate() {
            if j != v && e.get(j) > 0 {
                t = f.mul(&t, &f.pow(&x, e.get(j) as u64));
            }
        }
        let k = e.get(v) as usize;
        cs[k] = f.add(&cs[k], &t);
    }
    UniPoly::new(f, cs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, t: &[(Vec<u32>, i64)]) -> MultiPoly<Integers> {
        MultiPoly::from_i64_terms(n, t)
    }

    #[test]
    fn univariate_gcd() {
        let a = p(1, &[(vec![2], 1), (vec![0], -1)]);
        let b = p(1, &[(vec![1], 1), (vec![0], -1)]);
        assert_eq!(poly_gcd(&a, &b), b);
        let c = p(1, &[(vec![1], 2), (vec![0], 2)]);
        let d = p(1, &[(vec![0], 4)]);
        assert_eq!(poly_gcd(&c, &d), p(1, &[(vec![0], 2)]));
    }

    #[test]
    fn multivariate_common_factor() {
        // (X1 X2 + 1)(X1 - X2) and (X1 X2 + 1)(X1 + 2)
        let g = p(2, &[(vec![1, 1], 1), (vec![0, 0], 1)]);
        let u = p(2, &[(vec![1, 0], 1), (vec![0, 1], -1)]);
        let w = p(2, &[(vec![1, 0], 1), (vec![0, 0], 2)]);
        let a = &g * &u;
        let b = &g * &w;
        assert_eq!(poly_gcd(&a, &b), g);
        assert_eq!(poly_gcd(&u, &w), p(2, &[(vec![0, 0], 1)]));
        // Negated inputs still give the positive-leading gcd.
        assert_eq!(poly_gcd(&a.neg(), &b.scale(&BigInt::from(3))), g);
    }

    #[test]
    fn gcd_with_content_and_higher_degree() {
        // 6 (X1 + X2)^2 (X2 - 3) and 4 (X1 + X2)^3
        let s = p(2, &[(vec![1, 0], 1), (vec![0, 1], 1)]);
        let t = p(2, &[(vec![0, 1], 1), (vec![0, 0], -3)]);
        let a = (&s.pow(2) * &t).scale(&BigInt::from(6));
        let b = s.pow(3).scale(&BigInt::from(4));
        assert_eq!(poly_gcd(&a, &b), s.pow(2).scale(&BigInt::from(2)));
    }

    #[test]
    fn three_variable_gcd() {
        let g = p(3, &[(vec![1, 0, 1], 2), (vec![0, 2, 0], 1), (vec![0, 0, 0], -1)]);
        let a = &g * &p(3, &[(vec![0, 0, 2], 1), (vec![1, 0, 0], 1)]);
        let b = &g * &p(3, &[(vec![0, 1, 0], 3), (vec![0, 0, 0], 1)]);
        assert_eq!(poly_gcd(&a, &b), g);
    }
}
