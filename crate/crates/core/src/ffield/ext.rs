use num_bigint::{BigInt, BigUint};

use super::unipoly::{big_pow, UniPoly};
use super::FieldError;
use crate::polyring::{Field, PrimeField, Ring};

pub const MAX_EXTENSION_DEGREE: usize = 8;

/// `F_{p^m} = F_p[t] / (modulus)`; elements are residue vectors of length `m`,
/// low degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtField {
    base: PrimeField,
    m: usize,
    /// Monic, low to high, length `m + 1`.
    modulus: Vec<u64>,
}

impl ExtField {
    /// Builds `F_{p^m}` on the canonical (lex-least) irreducible modulus.
    pub fn new(p: u64, m: usize) -> Result<Self, FieldError> {
        let base = PrimeField::new(p).ok_or(FieldError::NotPrime(p))?;
        if m == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if m > MAX_EXTENSION_DEGREE {
            return Err(FieldError::ExtensionTooLarge { m, cap: MAX_EXTENSION_DEGREE });
        }
        let modulus = find_irreducible_dense(base, m);
        Ok(ExtField {
            base,
            m,
            modulus: modulus.coeffs().to_vec(),
        })
    }

    pub fn base(&self) -> PrimeField {
        self.base
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> UniPoly<PrimeField> {
        UniPoly::new(self.base, self.modulus.clone())
    }

    /// Image of a prime-field element.
    pub fn embed(&self, a: u64) -> Vec<u64> {
        let mut v = vec![0; self.m];
        v[0] = a % self.base.p();
        v
    }

    /// The class of `t`, a root of the modulus.
    pub fn generator(&self) -> Vec<u64> {
        let mut v = vec![0; self.m];
        if self.m == 1 {
            v[0] = self.base.neg(&self.modulus[0]);
        } else {
            v[1] = 1;
        }
        v
    }

    /// True when the element lies in the prime subfield.
    pub fn in_base(&self, a: &[u64]) -> bool {
        a[1..].iter().all(|&c| c == 0)
    }

    /// Residue vector of a polynomial in `t`.
    pub fn from_poly(&self, p: &UniPoly<PrimeField>) -> Vec<u64> {
        let r = p.rem(&self.modulus());
        let mut v = r.coeffs().to_vec();
        v.resize(self.m, 0);
        v
    }
}

impl Ring for ExtField {
    type Elem = Vec<u64>;

    fn zero(&self) -> Vec<u64> {
        vec![0; self.m]
    }
    fn one(&self) -> Vec<u64> {
        self.embed(1)
    }
    fn from_i64(&self, v: i64) -> Vec<u64> {
        self.embed(self.base.from_i64(v))
    }
    fn from_bigint(&self, v: &BigInt) -> Vec<u64> {
        self.embed(self.base.reduce_bigint(v))
    }
    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|&c| c == 0)
    }
    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn sub(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }
    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let f = &self.base;
        let m = self.m;
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = f.add(&prod[i + j], &f.mul(x, y));
            }
        }
        for i in (m..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..m {
                prod[i - m + j] = f.sub(&prod[i - m + j], &f.mul(&c, &self.modulus[j]));
            }
            prod[i] = 0;
        }
        prod.truncate(m);
        prod
    }
    fn div_exact(&self, a: &Vec<u64>, b: &Vec<u64>) -> Option<Vec<u64>> {
        self.div(a, b)
    }
    fn fmt_elem(&self, a: &Vec<u64>) -> String {
        if self.in_base(a) {
            return a[0].to_string();
        }
        let parts: Vec<String> = a.iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

impl Field for ExtField {
    fn inv(&self, a: &Vec<u64>) -> Option<Vec<u64>> {
        if self.is_zero(a) {
            return None;
        }
        // a^(q-2) via the residue polynomial so the exponent may exceed u64.
        let e = self.order_big() - 2u32;
        let r = UniPoly::new(self.base, a.clone()).powmod(&e, &self.modulus());
        Some(self.from_poly(&r))
    }
    fn characteristic(&self) -> u64 {
        self.base.p()
    }
    fn order_big(&self) -> BigUint {
        big_pow(self.base.p(), self.m)
    }
    fn order(&self) -> u64 {
        let mut q: u64 = 1;
        for _ in 0..self.m {
            q = q.saturating_mul(self.base.p());
        }
        q
    }
    fn element(&self, mut idx: u64) -> Vec<u64> {
        let p = self.base.p();
        (0..self.m)
            .map(|_| {
                let d = idx % p;
                idx /= p;
                d
            })
            .collect()
    }
    fn index_of(&self, a: &Vec<u64>) -> u64 {
        let p = self.base.p();
        a.iter().rev().fold(0u64, |acc, &d| acc * p + d)
    }
}

/// Rabin's test over `F_p`.
pub fn is_irreducible(f: &UniPoly<PrimeField>) -> bool {
    let Some(m) = f.degree() else {
        return false;
    };
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    let field = *f.field();
    let p = field.p();
    let fm = f.monic();
    let x = UniPoly::x(field);
    // x^(p^j) mod f for j = 1..m
    let mut frob = vec![x.clone()];
    for _ in 0..m {
        let next = frob.last().unwrap().powmod_u64(p, &fm);
        frob.push(next);
    }
    if !frob[m].sub(&x).rem(&fm).is_zero() {
        return false;
    }
    for r in prime_divisors(m) {
        let j = m / r;
        let g = frob[j].sub(&x).gcd(&fm);
        if !g.is_one() {
            return false;
        }
    }
    true
}

fn prime_divisors(mut m: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Lex-least monic irreducible of degree `m`, scanning coefficient vectors
/// with the highest non-leading coefficient most significant.
pub(crate) fn find_irreducible_dense(field: PrimeField, m: usize) -> UniPoly<PrimeField> {
    let p = field.p();
    let mut idx: u64 = 0;
    loop {
        let mut coeffs = vec![0u64; m + 1];
        coeffs[m] = 1;
        let mut rest = idx;
        for slot in coeffs[..m].iter_mut() {
            *slot = rest % p;
            rest /= p;
        }
        let f = UniPoly::new(field, coeffs);
        if is_irreducible(&f) {
            return f;
        }
        idx += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli() {
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(find_irreducible_dense(f2, 2).coeffs(), &[1, 1, 1]);
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(find_irreducible_dense(f3, 2).coeffs(), &[1, 0, 1]);
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(find_irreducible_dense(f5, 1).coeffs(), &[0, 1]);
    }

    #[test]
    fn exhaustive_scan_agrees_with_rabin() {
        // Irreducible monic quadratics over F_3 are exactly the ones with no root.
        let f3 = PrimeField::new(3).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let f = UniPoly::new(f3, vec![b, a, 1]);
                let has_root = (0..3).any(|x| f.eval(&x) == 0);
                assert_eq!(is_irreducible(&f), !has_root, "{a} {b}");
            }
        }
    }

    #[test]
    fn extension_field_axioms() {
        let k = ExtField::new(3, 2).unwrap();
        assert_eq!(k.order(), 9);
        let elems: Vec<_> = k.elements().collect();
        for a in &elems {
            assert_eq!(k.index_of(a), k.index_of(&k.element(k.index_of(a))));
            if !k.is_zero(a) {
                let inv = k.inv(a).unwrap();
                assert_eq!(k.mul(a, &inv), k.one());
            }
            for b in &elems {
                assert_eq!(k.mul(a, b), k.mul(b, a));
            }
        }
        // t^2 = -1 for modulus t^2 + 1
        let t = k.generator();
        assert_eq!(k.mul(&t, &t), k.from_i64(-1));
    }

    #[test]
    fn extension_degree_cap() {
        assert!(matches!(ExtField::new(2, 9), Err(FieldError::ExtensionTooLarge { .. })));
        assert!(matches!(ExtField::new(4, 2), Err(FieldError::NotPrime(4))));
    }
}
