//! Finite fields: prime fields, small extensions `F_{p^m}` and a univariate
//! toolkit (roots, squarefree parts, complete factorization).

mod ext;
mod factor;
mod unipoly;

use thiserror::Error;

pub use ext::{is_irreducible, ExtField, MAX_EXTENSION_DEGREE};
pub use factor::{
    count_distinct_roots_closure, distinct_degree, equal_degree, factor_univariate, roots_in_field,
    roots_in_field_seeded, squarefree_decomposition, squarefree_part, FactorList, RootStrategy,
    DEFAULT_FACTOR_SEED, SCAN_LIMIT,
};
pub use unipoly::UniPoly;

use crate::polyring::{MultiPoly, PrimeField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("extension degree {m} exceeds the cap {cap}")]
    ExtensionTooLarge { m: usize, cap: usize },
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial involves more than one variable")]
    NotUnivariate,
}

/// Lexicographically least monic irreducible of degree `m` over `F_p`, as a
/// polynomial in `X1`.
pub fn find_irreducible(p: u64, m: usize) -> Result<MultiPoly<PrimeField>, FieldError> {
    let field = PrimeField::new(p).ok_or(FieldError::NotPrime(p))?;
    if m == 0 {
        return Err(FieldError::ZeroDegree);
    }
    Ok(ext::find_irreducible_dense(field, m).to_multi())
}
