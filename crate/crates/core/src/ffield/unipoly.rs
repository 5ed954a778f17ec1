use std::fmt;

use num_bigint::BigUint;

use crate::polyring::{Exponents, Field, MultiPoly};

/// Dense univariate polynomial over a finite field, coefficients low to high,
/// no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly<F: Field> {
    field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> fmt::Debug for UniPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_multi())
    }
}

impl<F: Field> UniPoly<F> {
    pub fn new(field: F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        UniPoly { field, coeffs }
    }

    pub fn zero(field: F) -> Self {
        UniPoly { field, coeffs: Vec::new() }
    }

    pub fn one(field: F) -> Self {
        let one = field.one();
        UniPoly::new(field, vec![one])
    }

    pub fn x(field: F) -> Self {
        let (z, o) = (field.zero(), field.one());
        UniPoly::new(field, vec![z, o])
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        UniPoly::new(field, vec![c])
    }

    /// `x^e`.
    pub fn monomial(field: F, e: usize, c: F::Elem) -> Self {
        let mut v = vec![field.zero(); e + 1];
        v[e] = c;
        UniPoly::new(field, v)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.field.is_one(&self.coeffs[0])
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F::Elem> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(lc) => {
                let inv = self.field.inv(lc).unwrap();
                self.scale(&inv)
            }
        }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = &self.field;
        UniPoly::new(f.clone(), self.coeffs.iter().map(|a| f.mul(a, c)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = f.zero();
        let v = (0..n)
            .map(|i| f.add(self.coeffs.get(i).unwrap_or(&z), o.coeffs.get(i).unwrap_or(&z)))
            .collect();
        UniPoly::new(f.clone(), v)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = f.zero();
        let v = (0..n)
            .map(|i| f.sub(self.coeffs.get(i).unwrap_or(&z), o.coeffs.get(i).unwrap_or(&z)))
            .collect();
        UniPoly::new(f.clone(), v)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero(self.field.clone());
        }
        let f = &self.field;
        let mut v = vec![f.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = f.add(&v[i + j], &f.mul(a, b));
            }
        }
        UniPoly::new(f.clone(), v)
    }

    /// Euclidean division, panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let f = &self.field;
        let dd = d.degree().expect("division by zero polynomial");
        let inv_lc = f.inv(d.leading().unwrap()).unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UniPoly::zero(f.clone()), self.clone());
        }
        let mut quot = vec![f.zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = f.mul(&rem[i], &inv_lc);
            if f.is_zero(&c) {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = f.sub(&rem[idx], &f.mul(&c, dc));
            }
            quot[i - dd] = c;
        }
        rem.truncate(dd);
        (UniPoly::new(f.clone(), quot), UniPoly::new(f.clone(), rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| f.mul(c, &f.from_i64((i as u64 % f.characteristic()) as i64)))
            .collect();
        UniPoly::new(f.clone(), v)
    }

    pub fn eval(&self, x: &F::Elem) -> F::Elem {
        let f = &self.field;
        self.coeffs.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    pub fn mulmod(&self, o: &Self, m: &Self) -> Self {
        self.mul(o).rem(m)
    }

    pub fn powmod(&self, e: &BigUint, m: &Self) -> Self {
        let mut acc = UniPoly::one(self.field.clone()).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mulmod(&acc, m);
            if e.bit(i) {
                acc = acc.mulmod(&base, m);
            }
        }
        acc
    }

    pub fn powmod_u64(&self, e: u64, m: &Self) -> Self {
        self.powmod(&BigUint::from(e), m)
    }

    /// Converts a polynomial in one variable (any `nvars`, at most one
    /// variable in the support) to dense form.
    pub fn from_multi(p: &MultiPoly<F>) -> Option<Self> {
        let support = p.support_vars();
        if support.len() > 1 {
            return None;
        }
        let var = support.first().copied();
        let mut v = Vec::new();
        for (e, c) in p.terms() {
            let k = var.map(|x| e.get(x) as usize).unwrap_or(0);
            if v.len() <= k {
                v.resize(k + 1, p.ring().zero());
            }
            v[k] = c.clone();
        }
        Some(UniPoly::new(p.ring().clone(), v))
    }

    /// Single-variable `MultiPoly` in `X1`.
    pub fn to_multi(&self) -> MultiPoly<F> {
        MultiPoly::from_terms(
            self.field.clone(),
            1,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (Exponents::from_vec(vec![i as u32]), c.clone())),
        )
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }
}

pub(crate) fn big_pow(base: u64, e: usize) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for _ in 0..e {
        acc *= base;
    }
    acc
}
