use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::ring::{bigint_abs_max, Field, Integers, PrimeField, Ring};
use super::PolyError;

/// Multiplicative hashing for packed exponent words.
#[derive(Clone, Copy, Default)]
struct WordHash;

struct WordHasher(u64);

impl std::hash::BuildHasher for WordHash {
    type Hasher = WordHasher;
    fn build_hasher(&self) -> WordHasher {
        WordHasher(0)
    }
}

impl std::hash::Hasher for WordHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(8) ^ b as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        }
    }

    fn write_u64(&mut self, x: u64) {
        self.0 = (x ^ (x >> 29)).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ self.0;
    }
}

/// Exponents of a monomial `X_1^{a_1} ... X_n^{a_n}`.
///
/// The derived ordering is lexicographic with `X_1` most significant, which
/// is the term order used throughout the crate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponents(Vec<u32>);

impl Exponents {
    pub fn zero(nvars: usize) -> Self {
        Exponents(vec![0; nvars])
    }

    pub fn unit(nvars: usize, var: usize) -> Self {
        let mut v = vec![0; nvars];
        v[var] = 1;
        Exponents(v)
    }

    pub fn from_vec(v: Vec<u32>) -> Self {
        Exponents(v)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn get(&self, var: usize) -> u32 {
        self.0[var]
    }

    pub fn add(&self, other: &Exponents) -> Exponents {
        Exponents(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` if `other` divides `self` componentwise.
    pub fn checked_sub(&self, other: &Exponents) -> Option<Exponents> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Exponents)
    }

    pub fn divides(&self, other: &Exponents) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

/// Degree with the `deg 0 = -inf` convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u64),
}

impl Degree {
    pub fn finite(self) -> Option<u64> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }

    /// The finite value, or 0 for the zero polynomial.
    pub fn or_zero(self) -> u64 {
        self.finite().unwrap_or(0)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub total: Degree,
    pub per_variable: Vec<Degree>,
}

impl DegreeProfile {
    pub fn max(&self, other: &DegreeProfile) -> DegreeProfile {
        DegreeProfile {
            total: self.total.max(other.total),
            per_variable: self
                .per_variable
                .iter()
                .zip(&other.per_variable)
                .map(|(a, b)| *a.max(b))
                .collect(),
        }
    }
}

/// Logarithmic height, kept together with the exact maximal coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightValue {
    pub exact_max: BigInt,
    pub value: f64,
}

impl HeightValue {
    pub fn from_max(exact_max: BigInt) -> Self {
        let value = bigint_ln(&exact_max);
        HeightValue { exact_max, value }
    }

    pub fn max(self, other: HeightValue) -> HeightValue {
        if other.exact_max > self.exact_max {
            other
        } else {
            self
        }
    }
}

/// Natural logarithm of a positive integer, accurate to double precision.
pub fn bigint_ln(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        let f: f64 = num_traits::ToPrimitive::to_f64(&v.abs()).unwrap_or(f64::INFINITY);
        return f.ln();
    }
    let shift = bits - 64;
    let top: BigInt = v.abs() >> shift;
    let f: f64 = num_traits::ToPrimitive::to_f64(&top).unwrap();
    f.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Sparse multivariate polynomial over a coefficient ring.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly<R: Ring> {
    ring: R,
    nvars: usize,
    terms: BTreeMap<Exponents, R::Elem>,
}

impl<R: Ring> fmt::Debug for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({})", self)
    }
}

impl<R: Ring> MultiPoly<R> {
    pub fn zero(ring: R, nvars: usize) -> Self {
        MultiPoly {
            ring,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: R, nvars: usize, c: R::Elem) -> Self {
        let mut p = Self::zero(ring, nvars);
        p.add_term(Exponents::zero(nvars), c);
        p
    }

    pub fn one(ring: R, nvars: usize) -> Self {
        let one = ring.one();
        Self::constant(ring, nvars, one)
    }

    /// The variable `X_{var+1}` (zero-based index).
    pub fn var(ring: R, nvars: usize, var: usize) -> Self {
        assert!(var < nvars, "variable index out of range");
        let one = ring.one();
        Self::monomial(ring, Exponents::unit(nvars, var), one)
    }

    pub fn monomial(ring: R, exps: Exponents, c: R::Elem) -> Self {
        let nvars = exps.len();
        let mut p = Self::zero(ring, nvars);
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(ring: R, nvars: usize, terms: impl IntoIterator<Item = (Exponents, R::Elem)>) -> Self {
        let mut p = Self::zero(ring, nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length mismatch");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exponents, c: R::Elem) {
        if self.ring.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let s = self.ring.add(old, &c);
                if self.ring.is_zero(&s) {
                    self.terms.remove(&e);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &R::Elem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponents) -> R::Elem {
        self.terms.get(e).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn constant_term(&self) -> R::Elem {
        self.coeff(&Exponents::zero(self.nvars))
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<R::Elem> {
        match self.terms.len() {
            0 => Some(self.ring.zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                (e.total() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// Lex-largest term.
    pub fn leading_term(&self) -> Option<(&Exponents, &R::Elem)> {
        self.terms.iter().next_back()
    }

    fn check_compat(&self, other: &Self) -> Result<(), PolyError> {
        if self.ring != other.ring {
            return Err(PolyError::DomainMismatch);
        }
        if self.nvars != other.nvars {
            return Err(PolyError::VariableCountMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), self.ring.neg(c));
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compat(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ring.clone(), self.nvars));
        }
        let (small, big) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        if let Some(out) = self.mul_packed(small, big) {
            return Ok(out);
        }
        let mut acc: HashMap<Exponents, R::Elem> = HashMap::with_capacity(big.terms.len() * 2);
        for (ea, ca) in &small.terms {
            for (eb, cb) in &big.terms {
                let prod = self.ring.mul(ca, cb);
                let e = ea.add(eb);
                match acc.get_mut(&e) {
                    Some(old) => *old = self.ring.add(old, &prod),
                    None => {
                        acc.insert(e, prod);
                    }
                }
            }
        }
        let ring = self.ring.clone();
        let terms = acc.into_iter().filter(|(_, c)| !ring.is_zero(c)).collect();
        Ok(MultiPoly {
            ring,
            nvars: self.nvars,
            terms,
        })
    }

    /// Product with exponent vectors packed into one machine word, when the
    /// result degrees fit.
    fn mul_packed(&self, small: &Self, big: &Self) -> Option<Self> {
        let ms = small.max_exponents();
        let mb = big.max_exponents();
        let widths: Vec<u32> = ms
            .iter()
            .zip(&mb)
            .map(|(&a, &b)| 64 - (a as u64 + b as u64).leading_zeros())
            .collect();
        if widths.iter().sum::<u32>() > 64 {
            return None;
        }
        let mut shifts = Vec::with_capacity(widths.len());
        let mut at = 0u32;
        for w in widths.iter().rev() {
            shifts.push(at);
            at += w;
        }
        shifts.reverse();
        let pack = |e: &Exponents| -> u64 {
            e.as_slice()
                .iter()
                .zip(&shifts)
                .fold(0u64, |k, (&x, &s)| k | ((x as u64) << s))
        };
        let ps: Vec<(u64, &R::Elem)> = small.terms.iter().map(|(e, c)| (pack(e), c)).collect();
        let pb: Vec<(u64, &R::Elem)> = big.terms.iter().map(|(e, c)| (pack(e), c)).collect();
        let mut acc: HashMap<u64, R::Elem, WordHash> =
            HashMap::with_capacity_and_hasher(pb.len() * 2, WordHash);
        for &(ka, ca) in &ps {
            for &(kb, cb) in &pb {
                match acc.entry(ka + kb) {
                    std::collections::hash_map::Entry::Occupied(mut o) => {
                        self.ring.add_mul_assign(o.get_mut(), ca, cb);
                    }
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(self.ring.mul(ca, cb));
                    }
                }
            }
        }
        let ring = self.ring.clone();
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !ring.is_zero(c))
            .map(|(k, c)| {
                let e = widths
                    .iter()
                    .zip(&shifts)
                    .map(|(&w, &s)| if w == 0 { 0 } else { ((k >> s) & ((1u64 << w) - 1)) as u32 })
                    .collect();
                (Exponents(e), c)
            })
            .collect();
        Some(MultiPoly {
            ring,
            nvars: self.nvars,
            terms,
        })
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            ring: self.ring.clone(),
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), self.ring.neg(c)))
                .collect(),
        }
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), self.ring.mul(v, c));
        }
        out
    }

    /// Multiplies by the monomial `c * X^e`.
    pub fn mul_monomial(&self, e: &Exponents, c: &R::Elem) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.nvars);
        for (ee, v) in &self.terms {
            out.add_term(ee.add(e), self.ring.mul(v, c));
        }
        out
    }

    /// Repeated squaring.
    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.ring.clone(), self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn total_degree(&self) -> Degree {
        self.terms
            .keys()
            .map(|e| Degree::Finite(e.total()))
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    pub fn degree_in(&self, var: usize) -> Degree {
        self.terms
            .keys()
            .map(|e| Degree::Finite(e.get(var) as u64))
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        DegreeProfile {
            total: self.total_degree(),
            per_variable: (0..self.nvars).map(|v| self.degree_in(v)).collect(),
        }
    }

    /// Componentwise maximum of exponents over all terms.
    pub fn max_exponents(&self) -> Vec<u32> {
        let mut m = vec![0u32; self.nvars];
        for e in self.terms.keys() {
            for (slot, &x) in m.iter_mut().zip(e.as_slice()) {
                *slot = (*slot).max(x);
            }
        }
        m
    }

    /// Indices of variables that occur with positive exponent.
    pub fn support_vars(&self) -> Vec<usize> {
        let m = self.max_exponents();
        (0..self.nvars).filter(|&v| m[v] > 0).collect()
    }

    pub fn eval(&self, point: &[R::Elem]) -> R::Elem {
        assert_eq!(point.len(), self.nvars, "point arity mismatch");
        let mut pows: Vec<Vec<R::Elem>> = point.iter().map(|x| vec![self.ring.one(), x.clone()]).collect();
        let mut acc = self.ring.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in e.as_slice().iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let table = &mut pows[v];
                while table.len() <= k as usize {
                    let next = self.ring.mul(table.last().unwrap(), &table[1]);
                    table.push(next);
                }
                t = self.ring.mul(&t, &table[k as usize]);
            }
            acc = self.ring.add(&acc, &t);
        }
        acc
    }

    /// Applies a coefficient map into another ring; zero images are dropped.
    pub fn map_coeffs<S: Ring>(&self, target: S, f: impl Fn(&R::Elem) -> S::Elem) -> MultiPoly<S> {
        let mut out = MultiPoly::zero(target, self.nvars);
        for (e, c) in &self.terms {
            let v = f(c);
            out.add_term(e.clone(), v);
        }
        out
    }

    /// Re-embeds into a space with more (or permuted) variables: variable `v`
    /// of `self` becomes variable `map[v]` of the result.
    pub fn remap_vars(&self, nvars: usize, map: &[usize]) -> Self {
        let mut out = Self::zero(self.ring.clone(), nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0u32; nvars];
            for (v, &k) in e.as_slice().iter().enumerate() {
                ne[map[v]] += k;
            }
            out.add_term(Exponents(ne), c.clone());
        }
        out
    }

    /// Substitutes polynomials for every variable.
    pub fn compose(&self, args: &[MultiPoly<R>]) -> Result<MultiPoly<R>, PolyError> {
        if args.len() != self.nvars {
            return Err(PolyError::ArityMismatch {
                expected: self.nvars,
                got: args.len(),
            });
        }
        let target_nvars = args.first().map(|a| a.nvars).unwrap_or(0);
        for a in args {
            if a.ring != self.ring {
                return Err(PolyError::DomainMismatch);
            }
            if a.nvars != target_nvars {
                return Err(PolyError::VariableCountMismatch {
                    left: target_nvars,
                    right: a.nvars,
                });
            }
        }
        let mut cache = PowerCache::new(args);
        let mut out = MultiPoly::zero(self.ring.clone(), target_nvars);
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(self.ring.clone(), target_nvars, c.clone());
            for (v, &k) in e.as_slice().iter().enumerate() {
                if k > 0 {
                    t = &t * cache.get(v, k);
                }
            }
            out += &t;
        }
        Ok(out)
    }

    /// Exact quotient `self / d`, `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() || self.check_compat(d).is_err() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            let mut out = Self::zero(self.ring.clone(), self.nvars);
            for (e, v) in &self.terms {
                out.add_term(e.clone(), self.ring.div_exact(v, &c)?);
            }
            return Some(out);
        }
        let (lde, ldc) = d.leading_term().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.ring.clone(), self.nvars);
        while let Some((re, rc)) = rem.leading_term() {
            let qe = re.checked_sub(&lde)?;
            let qc = self.ring.div_exact(rc, &ldc)?;
            let neg = self.ring.neg(&qc);
            for (e, c) in &d.terms {
                rem.add_term(e.add(&qe), self.ring.mul(c, &neg));
            }
            quot.add_term(qe, qc);
        }
        Some(quot)
    }

    /// Canonical rendering with the given variable names, descending lex order.
    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let cs = self.ring.fmt_elem(c);
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, cs),
            };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = e.total() == 0;
            if mag != "1" || is_const {
                factors.push(mag);
            }
            for (v, &k) in e.as_slice().iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(names[v].clone()),
                    _ => factors.push(format!("{}^{}", names[v], k)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    pub fn default_names(nvars: usize) -> Vec<String> {
        (1..=nvars).map(|i| format!("X{i}")).collect()
    }
}

impl<R: Ring> fmt::Display for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&Self::default_names(self.nvars)))
    }
}

/// Memoized powers of substitution arguments.
struct PowerCache<'a, R: Ring> {
    args: &'a [MultiPoly<R>],
    powers: Vec<Vec<MultiPoly<R>>>,
}

impl<'a, R: Ring> PowerCache<'a, R> {
    fn new(args: &'a [MultiPoly<R>]) -> Self {
        PowerCache {
            args,
            powers: args.iter().map(|a| vec![a.clone()]).collect(),
        }
    }

    fn get(&mut self, v: usize, k: u32) -> &MultiPoly<R> {
        let table = &mut self.powers[v];
        while table.len() < k as usize {
            let next = table.last().unwrap() * &self.args[v];
            table.push(next);
        }
        &table[k as usize - 1]
    }
}

impl<'a, R: Ring> std::ops::Add for &'a MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn add(self, rhs: Self) -> MultiPoly<R> {
        self.try_add(rhs).expect("incompatible polynomials")
    }
}

impl<'a, R: Ring> std::ops::Sub for &'a MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn sub(self, rhs: Self) -> MultiPoly<R> {
        self.try_sub(rhs).expect("incompatible polynomials")
    }
}

impl<'a, R: Ring> std::ops::Mul for &'a MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn mul(self, rhs: Self) -> MultiPoly<R> {
        self.try_mul(rhs).expect("incompatible polynomials")
    }
}

impl<'a, R: Ring> std::ops::AddAssign<&'a MultiPoly<R>> for MultiPoly<R> {
    fn add_assign(&mut self, rhs: &'a MultiPoly<R>) {
        self.check_compat(rhs).expect("incompatible polynomials");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), c.clone());
        }
    }
}

impl<'a, R: Ring> std::ops::SubAssign<&'a MultiPoly<R>> for MultiPoly<R> {
    fn sub_assign(&mut self, rhs: &'a MultiPoly<R>) {
        self.check_compat(rhs).expect("incompatible polynomials");
        for (e, c) in &rhs.terms {
            let n = self.ring.neg(c);
            self.add_term(e.clone(), n);
        }
    }
}

impl<R: Ring> std::ops::Neg for &MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn neg(self) -> MultiPoly<R> {
        MultiPoly::neg(self)
    }
}

/// Result of coefficientwise reduction modulo a prime.
#[derive(Clone, Debug)]
pub struct Reduced<T> {
    pub value: T,
    /// Total degree decreased under reduction.
    pub degree_dropped: bool,
}

impl MultiPoly<Integers> {
    pub fn from_i64_terms(nvars: usize, terms: &[(Vec<u32>, i64)]) -> Self {
        Self::from_terms(
            Integers,
            nvars,
            terms.iter().map(|(e, c)| (Exponents(e.clone()), BigInt::from(*c))),
        )
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        bigint_abs_max(self.terms.values())
    }

    /// `h(f) = log max |coeff|`; the zero polynomial has no height.
    pub fn height(&self) -> Result<HeightValue, PolyError> {
        if self.is_zero() {
            return Err(PolyError::HeightOfZero);
        }
        Ok(HeightValue::from_max(self.max_abs_coeff()))
    }

    pub fn reduce_mod_p(&self, field: PrimeField) -> Reduced<MultiPoly<PrimeField>> {
        let value = self.map_coeffs(field, |c| field.reduce_bigint(c));
        let degree_dropped = value.total_degree() < self.total_degree();
        Reduced {
            value,
            degree_dropped,
        }
    }

    /// Gcd of all coefficients, non-negative.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = num_integer::Integer::gcd(&g, c);
            if g == BigInt::from(1) {
                break;
            }
        }
        g
    }

    pub fn leading_coeff_sign_negative(&self) -> bool {
        self.leading_term().map(|(_, c)| c.is_negative()).unwrap_or(false)
    }
}

impl<F: Field> MultiPoly<F> {
    /// Scales so that the lex-leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = self.ring.inv(c).expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }
}
