//! Dynamics of triangular systems over finite fields: reduction modulo a
//! prime, pointwise orbits with pole handling, periodic points (brute force,
//! triangular solve, counts over the algebraic closure) and orbit hits on a
//! variety.

mod orbit;
mod periodic;
mod variety;

use thiserror::Error;

use crate::ffield::{ExtField, FieldError};
use crate::iterate::IterError;
use crate::polyring::{Field, Integers, MultiPoly, PolyError, PrimeField};
use crate::trisys::{validate_system, Sign, TriangularSystem, Violation};

pub use orbit::{orbit, orbit_brent, CycleDetection, OrbitRecord, OrbitStatus};
pub use periodic::{
    closure_periodic_count, periodic_equation_degrees, periodic_points_bruteforce, periodic_points_triangular, stabilization,
    ClosureCount, PeriodicPoint, Stabilization, StabilizationRow, DEFAULT_SCAN_CAP,
};
pub use variety::{
    escape_bound, escape_check, orbit_frequency_experiment, variety_hits, EscapeReport, EscapeRow, EscapeVerdict, ExperimentParams,
    HitRow, HitSet, OrbitExperiment, Variety,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("system is not valid: {0}")]
    Invalid(#[from] Violation),
    #[error("reduction is degenerate at level(s) {levels:?}")]
    Degenerate { levels: Vec<usize> },
    #[error("field characteristic {field} differs from the reduction prime {prime}")]
    CharacteristicMismatch { field: u64, prime: u64 },
    #[error("{size} points exceed the scan cap {cap}")]
    ScanCap { size: u128, cap: u64 },
    #[error("a variety needs at least one defining polynomial")]
    EmptyVariety,
    #[error("variety polynomial has {got} variables, the system has {expected}")]
    VariableCount { expected: usize, got: usize },
    #[error("point has {got} coordinates, expected {expected}")]
    PointArity { expected: usize, got: usize },
    #[error("iteration count must be at least 1")]
    ZeroIterate,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Iter(#[from] IterError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// One level of a reduced system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedLevel {
    pub e: Sign,
    pub g: MultiPoly<PrimeField>,
    pub h: MultiPoly<PrimeField>,
}

/// A triangular system with coefficients reduced modulo `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedSystem {
    field: PrimeField,
    levels: Vec<ReducedLevel>,
    /// Per level: the dominating leading coefficient (or `g_n`) vanished.
    flags: Vec<bool>,
}

/// Coefficientwise reduction of a validated system. A level is flagged when
/// its dominating leading coefficient vanishes mod `p`; on the last level the
/// flag tracks `g_n`.
pub fn reduce_system(sys: &TriangularSystem, p: u64) -> Result<ReducedSystem, DynError> {
    let field = PrimeField::new(p).ok_or(DynError::NotPrime(p))?;
    let lead = validate_system(sys)?;
    let n = sys.n();
    let mut levels = Vec::with_capacity(n);
    let mut flags = Vec::with_capacity(n);
    for (i, lv) in sys.levels().iter().enumerate() {
        let coeff = if i + 1 < n { lead.rows[i].coeff.clone() } else { sys.last_coefficients().0 };
        flags.push(field.reduce_bigint(&coeff) == 0);
        levels.push(ReducedLevel {
            e: lv.e,
            g: lv.g.reduce_mod_p(field).value,
            h: lv.h.reduce_mod_p(field).value,
        });
    }
    Ok(ReducedSystem { field, levels, flags })
}

impl ReducedSystem {
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn n(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[ReducedLevel] {
        &self.levels
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn is_degenerate(&self) -> bool {
        self.flags.iter().any(|&f| f)
    }

    /// One-based indices of flagged levels.
    pub fn degenerate_levels(&self) -> Vec<usize> {
        self.flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i + 1).collect()
    }

    pub(crate) fn require_nondegenerate(&self) -> Result<(), DynError> {
        if self.is_degenerate() {
            return Err(DynError::Degenerate { levels: self.degenerate_levels() });
        }
        Ok(())
    }

    /// The pointwise map over a field of characteristic `p`.
    pub fn map_over<F: PrimeExtension>(&self, field: &F) -> Result<PointMap<F>, DynError> {
        if field.characteristic() != self.p() {
            return Err(DynError::CharacteristicMismatch { field: field.characteristic(), prime: self.p() });
        }
        let lift = |q: &MultiPoly<PrimeField>| q.map_coeffs(field.clone(), |c| field.from_base(*c));
        let levels = self
            .levels
            .iter()
            .map(|lv| MapLevel {
                e: lv.e,
                g_zero: lv.g.is_zero(),
                g: lift(&lv.g),
                h: lift(&lv.h),
            })
            .collect();
        Ok(PointMap { field: field.clone(), levels })
    }

    /// The pointwise map over `F_p` itself.
    pub fn prime_map(&self) -> PointMap<PrimeField> {
        self.map_over(&self.field).expect("same characteristic")
    }
}

/// Fields containing `F_p` with a canonical image of its elements.
pub trait PrimeExtension: Field {
    fn from_base(&self, c: u64) -> Self::Elem;
}

impl PrimeExtension for PrimeField {
    fn from_base(&self, c: u64) -> u64 {
        c % self.p()
    }
}

impl PrimeExtension for ExtField {
    fn from_base(&self, c: u64) -> Vec<u64> {
        self.embed(c)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct MapLevel<F: Field> {
    pub(crate) e: Sign,
    pub(crate) g: MultiPoly<F>,
    pub(crate) h: MultiPoly<F>,
    /// `G_i` vanished identically, so `F_i = H_i` has no pole.
    pub(crate) g_zero: bool,
}

/// A reduced system acting on points of `F^n`.
#[derive(Clone, Debug)]
pub struct PointMap<F: Field> {
    field: F,
    levels: Vec<MapLevel<F>>,
}

impl<F: Field> PointMap<F> {
    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.levels.len()
    }

    pub(crate) fn level(&self, i: usize) -> &MapLevel<F> {
        &self.levels[i]
    }

    /// True when `F` is undefined at `w`: some `e_i = -1` level with
    /// `w_i = 0`.
    pub fn is_pole(&self, w: &[F::Elem]) -> bool {
        self.levels
            .iter()
            .enumerate()
            .any(|(i, lv)| lv.e == Sign::Minus && !lv.g_zero && self.field.is_zero(&w[i]))
    }

    /// Image of coordinates `from..n`; earlier coordinates are copied.
    pub(crate) fn step_from(&self, w: &[F::Elem], from: usize) -> Option<Vec<F::Elem>> {
        let f = &self.field;
        let mut out = w.to_vec();
        for i in from..self.n() {
            let lv = &self.levels[i];
            let g = lv.g.eval(w);
            let h = lv.h.eval(w);
            out[i] = match lv.e {
                Sign::Plus => f.add(&f.mul(&w[i], &g), &h),
                Sign::Minus if lv.g_zero => h,
                Sign::Minus => f.add(&h, &f.mul(&g, &f.inv(&w[i])?)),
            };
        }
        Some(out)
    }

    /// `F(w)`, or `None` at a pole.
    pub fn step(&self, w: &[F::Elem]) -> Option<Vec<F::Elem>> {
        self.step_from(w, 0)
    }

    /// `F^{(m)}(w)`, or `None` if the orbit meets a pole first.
    pub fn iterate(&self, w: &[F::Elem], m: usize) -> Option<Vec<F::Elem>> {
        let mut cur = w.to_vec();
        for _ in 0..m {
            cur = self.step(&cur)?;
        }
        Some(cur)
    }
}

/// A field element's enumeration index, for deterministic ordering.
pub(crate) fn point_key<F: Field>(field: &F, w: &[F::Elem]) -> Vec<u64> {
    w.iter().map(|x| field.index_of(x)).collect()
}

pub(crate) fn lift_integer_poly(p: &MultiPoly<Integers>, field: PrimeField) -> MultiPoly<PrimeField> {
    p.reduce_mod_p(field).value
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn reduction_flags() {
        let r2 = reduce_system(&s1(), 2).unwrap();
        assert_eq!(r2.degenerate_levels(), vec![2]);
        let r3 = reduce_system(&s1(), 3).unwrap();
        assert!(!r3.is_degenerate());
        assert!(r3.levels()[1].h.is_zero());
        let r101 = reduce_system(&s1(), 101).unwrap();
        assert!(!r101.is_degenerate());
        assert_eq!(reduce_system(&s1(), 9), Err(DynError::NotPrime(9)));
    }

    #[test]
    fn pointwise_step() {
        let m = reduce_system(&s1(), 7).unwrap().prime_map();
        assert_eq!(m.step(&[2, 4]), Some(vec![2, 4]));
        let m2 = reduce_system(&s2(), 5).unwrap().prime_map();
        assert!(m2.is_pole(&[1, 0]));
        assert_eq!(m2.step(&[1, 0]), None);
        // F1 = 1/X1 + X2, F2 = 1/X2 + 1 at (1, 1): (2, 2).
        assert_eq!(m2.step(&[1, 1]), Some(vec![2, 2]));
    }

    #[test]
    fn map_over_extension() {
        let r = reduce_system(&s1(), 3).unwrap();
        let f9 = ExtField::new(3, 2).unwrap();
        let m = r.map_over(&f9).unwrap();
        let w = vec![f9.generator(), f9.embed(1)];
        // F2(1) = 2, F1(t, 1) = t + 1.
        assert_eq!(m.step(&w), Some(vec![vec![1, 1], vec![2, 0]]));
        let f25 = ExtField::new(5, 2).unwrap();
        assert!(matches!(r.map_over(&f25), Err(DynError::CharacteristicMismatch { .. })));
    }
}
