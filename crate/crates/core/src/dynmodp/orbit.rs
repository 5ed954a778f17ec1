use std::collections::HashMap;
use std::hash::Hash;

use super::{DynError, PointMap};
use crate::polyring::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CycleDetection {
    /// Keep every visited point in a hash map.
    #[default]
    VisitedSet,
    /// Brent's algorithm: constant memory, roughly twice the steps.
    Brent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitStatus {
    /// `F(w_{tail + period - 1}) = w_tail`.
    Cycle { tail: usize, period: usize },
    /// `w_step` is a pole, so the orbit ends there.
    Pole { step: usize },
    /// `maxlen` distinct points were produced without closing the orbit.
    Truncated { maxlen: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord<E> {
    pub start: Vec<E>,
    /// The distinct points `w_0, w_1, ...` in order. Brent detection keeps
    /// only the start.
    pub points: Vec<Vec<E>>,
    pub status: OrbitStatus,
}

impl<E: Clone> OrbitRecord<E> {
    /// `S(w)`, the orbit size, when known.
    pub fn size(&self) -> Option<usize> {
        match self.status {
            OrbitStatus::Cycle { tail, period } => Some(tail + period),
            OrbitStatus::Pole { step } => Some(step + 1),
            OrbitStatus::Truncated { .. } => None,
        }
    }

    /// True when `S(w) >= ell` is certain.
    pub fn size_at_least(&self, ell: usize) -> bool {
        match self.status {
            OrbitStatus::Truncated { maxlen } => maxlen >= ell,
            _ => self.size().is_some_and(|s| s >= ell),
        }
    }

    /// `w_m`, following the cycle past the stored points.
    pub fn point_at(&self, m: usize) -> Option<&[E]> {
        if m < self.points.len() {
            return Some(&self.points[m]);
        }
        match self.status {
            OrbitStatus::Cycle { tail, period } if self.points.len() == tail + period => {
                Some(&self.points[tail + (m - tail) % period])
            }
            _ => None,
        }
    }
}

fn check_arity<F: Field>(map: &PointMap<F>, w: &[F::Elem]) -> Result<(), DynError> {
    if w.len() != map.n() {
        return Err(DynError::PointArity { expected: map.n(), got: w.len() });
    }
    Ok(())
}

/// Pointwise orbit of `w` with a visited set; `maxlen` is clamped to at
/// least 1.
pub fn orbit<F>(map: &PointMap<F>, w: &[F::Elem], maxlen: usize) -> Result<OrbitRecord<F::Elem>, DynError>
where
    F: Field,
    F::Elem: Hash + Eq,
{
    check_arity(map, w)?;
    let maxlen = maxlen.max(1);
    let mut seen: HashMap<Vec<F::Elem>, usize> = HashMap::new();
    let mut points = Vec::new();
    let mut cur = w.to_vec();
    let status = loop {
        seen.insert(cur.clone(), points.len());
        points.push(cur.clone());
        let Some(next) = map.step(&cur) else {
            break OrbitStatus::Pole { step: points.len() - 1 };
        };
        if let Some(&tail) = seen.get(&next) {
            break OrbitStatus::Cycle { tail, period: points.len() - tail };
        }
        if points.len() == maxlen {
            break OrbitStatus::Truncated { maxlen };
        }
        cur = next;
    };
    Ok(OrbitRecord { start: w.to_vec(), points, status })
}

/// Same classification as [`orbit`] using Brent's cycle finder.
pub fn orbit_brent<F: Field>(map: &PointMap<F>, w: &[F::Elem], maxlen: usize) -> Result<OrbitRecord<F::Elem>, DynError> {
    check_arity(map, w)?;
    let maxlen = maxlen.max(1);
    let record = |status| OrbitRecord { start: w.to_vec(), points: vec![w.to_vec()], status };
    let step_limit = 4 * maxlen + 4;

    // The hare visits w_0, w_1, ... in order, so a pole is met at its index.
    let mut power = 1usize;
    let mut lam = 1usize;
    let mut tortoise = w.to_vec();
    let Some(mut hare) = map.step(w) else {
        return Ok(record(OrbitStatus::Pole { step: 0 }));
    };
    let mut hare_index = 1usize;
    while tortoise != hare {
        if hare_index >= step_limit {
            return Ok(record(OrbitStatus::Truncated { maxlen }));
        }
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        match map.step(&hare) {
            Some(next) => hare = next,
            None if hare_index < maxlen => return Ok(record(OrbitStatus::Pole { step: hare_index })),
            None => return Ok(record(OrbitStatus::Truncated { maxlen })),
        }
        hare_index += 1;
        lam += 1;
    }

    let mut tortoise = w.to_vec();
    let mut hare = map.iterate(w, lam).expect("cycle points are not poles");
    let mut mu = 0usize;
    while tortoise != hare {
        tortoise = map.step(&tortoise).expect("tail points are not poles");
        hare = map.step(&hare).expect("cycle points are not poles");
        mu += 1;
    }
    if mu + lam > maxlen {
        return Ok(record(OrbitStatus::Truncated { maxlen }));
    }
    Ok(record(OrbitStatus::Cycle { tail: mu, period: lam }))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::reduce_system;
    use super::*;
    use crate::polyring::PrimeField;

    #[test]
    fn fixed_point_orbit() {
        let m = reduce_system(&s1(), 7).unwrap().prime_map();
        let r = orbit(&m, &[2, 4], 100).unwrap();
        assert_eq!(r.status, OrbitStatus::Cycle { tail: 0, period: 1 });
        assert_eq!(r.size(), Some(1));
        assert_eq!(r.point_at(17), Some(&[2u64, 4][..]));
        assert_eq!(orbit_brent(&m, &[2, 4], 100).unwrap().status, r.status);
    }

    #[test]
    fn pole_at_start() {
        let m = reduce_system(&s2(), 5).unwrap().prime_map();
        let r = orbit(&m, &[3, 0], 10).unwrap();
        assert_eq!(r.status, OrbitStatus::Pole { step: 0 });
        assert_eq!(r.size(), Some(1));
        assert_eq!(orbit_brent(&m, &[3, 0], 10).unwrap().status, r.status);
    }

    #[test]
    fn maxlen_one() {
        let m = reduce_system(&s1(), 7).unwrap().prime_map();
        assert_eq!(orbit(&m, &[0, 0], 1).unwrap().status, OrbitStatus::Truncated { maxlen: 1 });
        assert_eq!(orbit(&m, &[2, 4], 1).unwrap().status, OrbitStatus::Cycle { tail: 0, period: 1 });
        assert_eq!(orbit(&m, &[0, 0], 0).unwrap().status, OrbitStatus::Truncated { maxlen: 1 });
    }

    #[test]
    fn brent_matches_visited_set() {
        let f = PrimeField::new(7).unwrap();
        for (sys, p) in [(s1(), 7), (s2(), 7), (s2(), 5), (s1(), 3)] {
            let m = reduce_system(&sys, p).unwrap().prime_map();
            for a in 0..p {
                for b in 0..p {
                    for maxlen in [1, 2, 3, 5, 60] {
                        let v = orbit(&m, &[a, b], maxlen).unwrap();
                        let br = orbit_brent(&m, &[a, b], maxlen).unwrap();
                        assert_eq!(v.status, br.status, "p={p} w=({a},{b}) maxlen={maxlen}");
                        if let Some(s) = v.size() {
                            assert_eq!(v.points.len(), s);
                        }
                    }
                }
            }
        }
        let m = reduce_system(&s1(), 7).unwrap().prime_map();
        assert!(m.field() == &f);
        assert!(matches!(orbit(&m, &[1], 5), Err(DynError::PointArity { .. })));
    }
}
