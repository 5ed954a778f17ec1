//! Degree and height growth of iterated triangular rational maps over the
//! integers, and their dynamics modulo primes.

pub mod bounds;
pub mod dynmodp;
pub mod ffield;
pub mod iterate;
pub mod polyring;
pub mod sysio;
pub mod trisys;

/// Serializes big integers as decimal strings.
pub(crate) mod decimal {
    use serde::Serializer;

    pub fn serialize<T: ToString, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn option<T: ToString, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_str(&v.to_string()),
            None => s.serialize_none(),
        }
    }
}
