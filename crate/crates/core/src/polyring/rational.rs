use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::gcd::{gcd_many, poly_gcd};
use super::poly::{Degree, DegreeProfile, HeightValue, MultiPoly, Reduced};
use super::ring::{Field, Integers, PrimeField, Ring};
use super::PolyError;

/// A quotient `num / den` of polynomials, `den != 0`.
///
/// Arithmetic never reduces by gcd; call [`RationalFn::normalize`] for the
/// coprime representative.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFn<R: Ring> {
    num: MultiPoly<R>,
    den: MultiPoly<R>,
}

impl<R: Ring> fmt::Debug for RationalFn<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

impl<R: Ring> fmt::Display for RationalFn<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.as_constant().is_some_and(|c| self.den.ring().is_one(&c)) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Value of a rational function at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalOutcome<E> {
    Value(E),
    Pole,
}

impl<E> EvalOutcome<E> {
    pub fn value(self) -> Option<E> {
        match self {
            EvalOutcome::Value(v) => Some(v),
            EvalOutcome::Pole => None,
        }
    }
}

impl<R: Ring> RationalFn<R> {
    pub fn new(num: MultiPoly<R>, den: MultiPoly<R>) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        if num.ring() != den.ring() {
            return Err(PolyError::DomainMismatch);
        }
        if num.nvars() != den.nvars() {
            return Err(PolyError::VariableCountMismatch {
                left: num.nvars(),
                right: den.nvars(),
            });
        }
        Ok(RationalFn { num, den })
    }

    pub fn from_poly(p: MultiPoly<R>) -> Self {
        let den = MultiPoly::one(p.ring().clone(), p.nvars());
        RationalFn { num: p, den }
    }

    pub fn var(ring: R, nvars: usize, var: usize) -> Self {
        Self::from_poly(MultiPoly::var(ring, nvars, var))
    }

    pub fn num(&self) -> &MultiPoly<R> {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly<R> {
        &self.den
    }

    pub fn into_parts(self) -> (MultiPoly<R>, MultiPoly<R>) {
        (self.num, self.den)
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn ring(&self) -> &R {
        self.num.ring()
    }

    /// True when the denominator is a nonzero constant.
    pub fn is_polynomial_rep(&self) -> bool {
        self.den.is_constant()
    }

    pub fn num_terms(&self) -> usize {
        self.num.num_terms() + self.den.num_terms()
    }

    /// `deg F = max(deg num, deg den)` of this representation.
    pub fn degree_profile(&self) -> DegreeProfile {
        self.num.degree_profile().max(&self.den.degree_profile())
    }

    pub fn total_degree(&self) -> Degree {
        self.degree_profile().total
    }

    pub fn eval(&self, point: &[R::Elem]) -> EvalOutcome<R::Elem>
    where
        R: Field,
    {
        let d = self.den.eval(point);
        if self.ring().is_zero(&d) {
            return EvalOutcome::Pole;
        }
        let n = self.num.eval(point);
        EvalOutcome::Value(self.ring().div(&n, &d).expect("nonzero denominator"))
    }

    /// Equality as functions: `num_a * den_b == num_b * den_a`.
    pub fn same_function(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    /// Equality as functions when `reduced` is coprime with jointly unit
    /// content: then `other = q * reduced` termwise for an integral `q`,
    /// found by one exact division, and the check avoids the full
    /// cross-multiplication.
    pub fn same_function_as_reduced(&self, reduced: &Self) -> bool {
        match self.den.div_exact(&reduced.den) {
            Some(q) => self.num == &q * &reduced.num,
            None => false,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        RationalFn {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return RationalFn {
                num: &self.num + &other.num,
                den: self.den.clone(),
            };
        }
        RationalFn {
            num: &(&self.num * &other.den) + &(&other.num * &self.den),
            den: &self.den * &other.den,
        }
    }

    pub fn sub_poly(&self, p: &MultiPoly<R>) -> Self {
        RationalFn {
            num: &self.num - &(p * &self.den),
            den: self.den.clone(),
        }
    }

    pub fn map_coeffs<S: Ring>(&self, target: S, f: impl Fn(&R::Elem) -> S::Elem) -> Result<RationalFn<S>, PolyError> {
        let num = self.num.map_coeffs(target.clone(), &f);
        let den = self.den.map_coeffs(target, &f);
        RationalFn::new(num, den).map_err(|_| PolyError::DenominatorVanishes)
    }
}

/// Substitutes rational functions into several polynomials at once, returning
/// numerators over one shared denominator.
///
/// With `args[v] = a_v / b_v` and `D_v` the largest exponent of `X_v` among
/// `polys`, the shared denominator is `prod b_v^{D_v}` and each term
/// `c X^e` contributes `c prod a_v^{e_v} b_v^{D_v - e_v}`.
pub fn compose_shared<R: Ring>(
    polys: &[&MultiPoly<R>],
    args: &[RationalFn<R>],
) -> Result<(Vec<MultiPoly<R>>, MultiPoly<R>), PolyError> {
    let nv = polys.first().map(|p| p.nvars()).unwrap_or(args.len());
    if args.len() != nv {
        return Err(PolyError::ArityMismatch {
            expected: nv,
            got: args.len(),
        });
    }
    let ring = match args.first() {
        Some(a) => a.ring().clone(),
        None => {
            let r = polys.first().map(|p| p.ring().clone()).ok_or(PolyError::ArityMismatch { expected: 1, got: 0 })?;
            let out = polys.iter().map(|p| (*p).clone()).collect();
            return Ok((out, MultiPoly::one(r, 0)));
        }
    };
    let target_nvars = args[0].nvars();
    for a in args {
        if a.nvars() != target_nvars {
            return Err(PolyError::VariableCountMismatch {
                left: target_nvars,
                right: a.nvars(),
            });
        }
        if a.ring() != &ring {
            return Err(PolyError::DomainMismatch);
        }
    }
    for p in polys {
        if p.nvars() != nv {
            return Err(PolyError::ArityMismatch {
                expected: nv,
                got: p.nvars(),
            });
        }
        if p.ring() != &ring {
            return Err(PolyError::DomainMismatch);
        }
    }
    let mut dmax = vec![0u32; nv];
    for p in polys {
        for (slot, x) in dmax.iter_mut().zip(p.max_exponents()) {
            *slot = (*slot).max(x);
        }
    }
    let trivial_den: Vec<bool> = args
        .iter()
        .map(|a| a.den().as_constant().is_some_and(|c| ring.is_one(&c)))
        .collect();
    let mut num_pows: Vec<Vec<MultiPoly<R>>> = args
        .iter()
        .map(|a| vec![MultiPoly::one(ring.clone(), target_nvars), a.num().clone()])
        .collect();
    let mut den_pows: Vec<Vec<MultiPoly<R>>> = args
        .iter()
        .map(|a| vec![MultiPoly::one(ring.clone(), target_nvars), a.den().clone()])
        .collect();
    fn power<R: Ring>(table: &mut Vec<MultiPoly<R>>, k: usize) -> MultiPoly<R> {
        while table.len() <= k {
            let next = table.last().unwrap() * &table[1];
            table.push(next);
        }
        table[k].clone()
    }
    let mut outs = Vec::with_capacity(polys.len());
    for p in polys {
        let mut acc = MultiPoly::zero(ring.clone(), target_nvars);
        for (e, c) in p.terms() {
            let mut t = MultiPoly::constant(ring.clone(), target_nvars, c.clone());
            for v in 0..nv {
                let k = e.get(v) as usize;
                if k > 0 {
                    t = &t * &power(&mut num_pows[v], k);
                }
                if !trivial_den[v] {
                    let rest = dmax[v] as usize - k;
                    if rest > 0 {
                        t = &t * &power(&mut den_pows[v], rest);
                    }
                }
            }
            acc += &t;
        }
        outs.push(acc);
    }
    let mut den = MultiPoly::one(ring.clone(), target_nvars);
    for v in 0..nv {
        if !trivial_den[v] && dmax[v] > 0 {
            den = &den * &power(&mut den_pows[v], dmax[v] as usize);
        }
    }
    Ok((outs, den))
}

/// `outer(K_1, ..., K_n)` for a polynomial `outer` and rational arguments.
pub fn compose_rational<R: Ring>(outer: &MultiPoly<R>, args: &[RationalFn<R>]) -> Result<RationalFn<R>, PolyError> {
    let (mut nums, den) = compose_shared(&[outer], args)?;
    RationalFn::new(nums.pop().unwrap(), den)
}

/// `f(K_1, ..., K_n)` for a rational `f`; numerator and denominator of `f`
/// are composed over a common denominator, which then cancels.
pub fn compose_rational_fn<R: Ring>(f: &RationalFn<R>, args: &[RationalFn<R>]) -> Result<RationalFn<R>, PolyError> {
    if f.den.is_constant() {
        let (mut nums, den) = compose_shared(&[&f.num], args)?;
        let c = f.den.as_constant().unwrap();
        let den = den.scale(&c);
        return RationalFn::new(nums.pop().unwrap(), den);
    }
    let (mut nums, _) = compose_shared(&[&f.num, &f.den], args)?;
    let den = nums.pop().unwrap();
    let num = nums.pop().unwrap();
    RationalFn::new(num, den).map_err(|_| PolyError::ZeroDenominator)
}

impl RationalFn<Integers> {
    /// `h(F) = max(h(num), h(den))` of this representation.
    pub fn height(&self) -> Result<HeightValue, PolyError> {
        let hd = self.den.height()?;
        if self.num.is_zero() {
            return Ok(hd);
        }
        Ok(self.num.height()?.max(hd))
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.num.max_abs_coeff().max(self.den.max_abs_coeff())
    }

    /// Coprime representative with unit content and a positive lex-leading
    /// denominator coefficient.
    pub fn normalize(&self) -> Result<Self, PolyError> {
        if self.den.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        if self.num.is_zero() {
            return Ok(RationalFn::from_poly(MultiPoly::zero(Integers, self.nvars())));
        }
        let g = poly_gcd(&self.num, &self.den);
        let (mut num, mut den) = if g.is_constant() {
            (self.num.clone(), self.den.clone())
        } else {
            (
                self.num.div_exact(&g).ok_or(PolyError::InexactDivision)?,
                self.den.div_exact(&g).ok_or(PolyError::InexactDivision)?,
            )
        };
        let content = gcd_many([num.content(), den.content()].iter());
        if !content.is_one() {
            let c = MultiPoly::constant(Integers, num.nvars(), content);
            num = num.div_exact(&c).ok_or(PolyError::InexactDivision)?;
            den = den.div_exact(&c).ok_or(PolyError::InexactDivision)?;
        }
        if den.leading_term().is_some_and(|(_, c)| c.is_negative()) {
            num = num.neg();
            den = den.neg();
        }
        Ok(RationalFn { num, den })
    }

    pub fn reduce_mod_p(&self, field: PrimeField) -> Result<Reduced<RationalFn<PrimeField>>, PolyError> {
        let value = self.map_coeffs(field, |c| field.reduce_bigint(c))?;
        let degree_dropped = value.total_degree() < self.total_degree();
        Ok(Reduced { value, degree_dropped })
    }
}
