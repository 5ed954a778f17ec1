//! Sparse multivariate polynomials and rational functions over the integers
//! and finite fields, with degree and height functionals.

mod gcd;
mod modgcd;
mod poly;
mod rational;
mod ring;

use thiserror::Error;

pub use gcd::{gcd_many, poly_gcd};
pub use poly::{bigint_ln, Degree, DegreeProfile, Exponents, HeightValue, MultiPoly, Reduced};
pub use rational::{compose_rational, compose_rational_fn, compose_shared, EvalOutcome, RationalFn};
pub use ring::{is_prime, primes_between, Field, Integers, PrimeField, Ring};

use crate::ffield::{self, FieldError, UniPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("coefficient domains differ")]
    DomainMismatch,
    #[error("variable counts differ ({left} vs {right})")]
    VariableCountMismatch { left: usize, right: usize },
    #[error("expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("height of the zero polynomial is undefined")]
    HeightOfZero,
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("denominator vanishes identically after reduction")]
    DenominatorVanishes,
    #[error("exact division failed")]
    InexactDivision,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Product of the distinct monic irreducible factors of a univariate
/// polynomial over a finite field.
pub fn squarefree_part<F: Field>(f: &MultiPoly<F>) -> Result<MultiPoly<F>, PolyError> {
    let u = UniPoly::from_multi(f).ok_or(FieldError::NotUnivariate)?;
    let var = f.support_vars().first().copied().unwrap_or(0);
    let s = ffield::squarefree_part(&u)?;
    let n = f.nvars().max(1);
    Ok(s.to_multi().remap_vars(n, &[var]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(p: u64, c: &[i64]) -> MultiPoly<PrimeField> {
        let f = PrimeField::new(p).unwrap();
        UniPoly::new(f, c.iter().map(|&v| f.from_i64(v)).collect()).to_multi()
    }

    #[test]
    fn squarefree_examples() {
        // (X-1)^2 X over F_5
        let f = up(5, &[0, 1, -2, 1]);
        assert_eq!(squarefree_part(&f).unwrap(), up(5, &[0, 4, 1]));
        let mut c = vec![0i64; 8];
        c[7] = 1;
        c[1] = -1;
        assert_eq!(squarefree_part(&up(7, &c)).unwrap(), up(7, &c));
        assert_eq!(squarefree_part(&up(3, &[0, 0, 1])).unwrap(), up(3, &[0, 1]));
        assert!(squarefree_part(&up(3, &[])).is_err());
    }

    #[test]
    fn squarefree_keeps_variable() {
        let f = PrimeField::new(5).unwrap();
        let x2 = MultiPoly::var(f, 2, 1);
        let sq = &x2 * &x2;
        assert_eq!(squarefree_part(&sq).unwrap(), x2);
    }
}
