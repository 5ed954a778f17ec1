use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::parse::{format_polynomial, parse_polynomial};
use super::SysIoError;
use crate::dynmodp::{Variety, DEFAULT_SCAN_CAP};
use crate::iterate::DEFAULT_TERM_CAP;
use crate::polyring::{Integers, MultiPoly};
use crate::trisys::{Level, Sign, TriangularSystem};

/// One level of a system document. Levels before the last carry the
/// polynomials `G`, `H`; the last level carries integers `g`, `h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelDocument {
    pub e: i64,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub big_g: Option<String>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub big_h: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Value>,
}

/// `{"n", "vars", "levels"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub n: usize,
    pub vars: Vec<String>,
    pub levels: Vec<LevelDocument>,
}

fn schema(msg: impl Into<String>) -> SysIoError {
    SysIoError::Schema(msg.into())
}

fn integer_value(v: &Value, what: &str) -> Result<BigInt, SysIoError> {
    let parsed = match v {
        Value::Number(num) => num.as_i64().map(BigInt::from),
        Value::String(s) => s.trim().parse::<BigInt>().ok(),
        _ => None,
    };
    parsed.ok_or_else(|| schema(format!("{what} must be an integer, found {v}")))
}

fn integer_json(v: &BigInt) -> Value {
    match i64::try_from(v) {
        Ok(small) => Value::from(small),
        Err(_) => Value::String(v.to_string()),
    }
}

fn valid_name(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl SystemDocument {
    pub fn from_json(text: &str) -> Result<Self, SysIoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn to_system(&self) -> Result<TriangularSystem, SysIoError> {
        let n = self.n;
        if n == 0 {
            return Err(schema("n must be at least 1"));
        }
        if self.vars.len() != n {
            return Err(schema(format!("vars has {} names, n = {n}", self.vars.len())));
        }
        if let Some(bad) = self.vars.iter().find(|v| !valid_name(v)) {
            return Err(schema(format!("invalid variable name {bad:?}")));
        }
        for (i, v) in self.vars.iter().enumerate() {
            if self.vars[..i].contains(v) {
                return Err(schema(format!("duplicate variable name {v:?}")));
            }
        }
        if self.levels.len() != n {
            return Err(schema(format!("levels has {} entries, n = {n}", self.levels.len())));
        }
        let mut levels = Vec::with_capacity(n);
        for (i, lv) in self.levels.iter().enumerate() {
            let e = Sign::from_i64(lv.e).ok_or_else(|| schema(format!("level {}: e must be 1 or -1, found {}", i + 1, lv.e)))?;
            let (g, h) = if i + 1 < n {
                if lv.g.is_some() || lv.h.is_some() {
                    return Err(schema(format!("level {}: use \"G\" and \"H\" before the last level", i + 1)));
                }
                let parse = |field: &'static str, text: &Option<String>| -> Result<MultiPoly<Integers>, SysIoError> {
                    let text = text.as_deref().ok_or_else(|| schema(format!("level {}: missing \"{field}\"", i + 1)))?;
                    parse_polynomial(text, &self.vars)
                        .map_err(|source| SysIoError::Polynomial { location: format!("level {} {field}", i + 1), source })
                };
                (parse("G", &lv.big_g)?, parse("H", &lv.big_h)?)
            } else {
                if lv.big_g.is_some() || lv.big_h.is_some() {
                    return Err(schema("last level: use integer \"g\" and \"h\""));
                }
                let get = |field: &'static str, v: &Option<Value>| -> Result<BigInt, SysIoError> {
                    let v = v.as_ref().ok_or_else(|| schema(format!("last level: missing \"{field}\"")))?;
                    integer_value(v, &format!("last level {field}"))
                };
                let (g, h) = (get("g", &lv.g)?, get("h", &lv.h)?);
                (MultiPoly::constant(Integers, n, g), MultiPoly::constant(Integers, n, h))
            };
            levels.push(Level { e, g, h });
        }
        Ok(TriangularSystem::with_names(levels, self.vars.clone())?)
    }

    pub fn from_system(sys: &TriangularSystem) -> Self {
        let names = sys.names();
        let n = sys.n();
        let levels = sys
            .levels()
            .iter()
            .enumerate()
            .map(|(i, lv)| {
                if i + 1 < n {
                    LevelDocument {
                        e: lv.e.as_i64(),
                        big_g: Some(format_polynomial(&lv.g, names)),
                        big_h: Some(format_polynomial(&lv.h, names)),
                        g: None,
                        h: None,
                    }
                } else {
                    let (g, h) = sys.last_coefficients();
                    LevelDocument {
                        e: lv.e.as_i64(),
                        big_g: None,
                        big_h: None,
                        g: Some(integer_json(&g)),
                        h: Some(integer_json(&h)),
                    }
                }
            })
            .collect();
        SystemDocument { n, vars: names.to_vec(), levels }
    }
}

/// Parses a system document. Dominance conditions are not checked here; run
/// `validate_system` on the result.
pub fn parse_system(text: &str) -> Result<TriangularSystem, SysIoError> {
    SystemDocument::from_json(text)?.to_system()
}

pub fn system_to_json(sys: &TriangularSystem) -> String {
    SystemDocument::from_system(sys).to_json()
}

/// `{"polys": [...]}`, over the variables of a system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarietyDocument {
    pub polys: Vec<String>,
}

pub fn parse_variety(text: &str, names: &[String]) -> Result<Variety, SysIoError> {
    let doc: VarietyDocument = serde_json::from_str(text)?;
    if doc.polys.is_empty() {
        return Err(schema("polys must list at least one polynomial"));
    }
    let polys = doc
        .polys
        .iter()
        .enumerate()
        .map(|(j, t)| {
            parse_polynomial(t, names).map_err(|source| SysIoError::Polynomial { location: format!("polys[{j}]"), source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Variety::new(polys)?)
}

pub fn variety_to_json(v: &Variety, names: &[String]) -> String {
    let doc = VarietyDocument { polys: v.polys().iter().map(|p| format_polynomial(p, names)).collect() };
    serde_json::to_string_pretty(&doc).expect("documents serialize")
}

/// Experiment configuration. Ranges are inclusive `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_primes")]
    pub primes: [u64; 2],
    #[serde(default = "default_k")]
    pub k: [usize; 2],
    #[serde(default = "default_ell")]
    pub ell: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_maxlen")]
    pub maxlen: usize,
    /// Starting points sampled per prime in orbit experiments.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_term_cap")]
    pub term_cap: usize,
    #[serde(default = "default_scan_cap")]
    pub scan_cap: u64,
}

fn default_primes() -> [u64; 2] {
    [5, 97]
}
fn default_k() -> [usize; 2] {
    [1, 4]
}
fn default_ell() -> usize {
    50
}
fn default_epsilon() -> f64 {
    0.5
}
fn default_maxlen() -> usize {
    1 << 16
}
fn default_samples() -> usize {
    64
}
fn default_term_cap() -> usize {
    DEFAULT_TERM_CAP
}
fn default_scan_cap() -> u64 {
    DEFAULT_SCAN_CAP
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, SysIoError> {
    let cfg: ExperimentConfig = serde_json::from_str(text)?;
    if cfg.primes[0] > cfg.primes[1] || cfg.k[0] > cfg.k[1] {
        return Err(schema("ranges must satisfy lo <= hi"));
    }
    if cfg.k[0] == 0 {
        return Err(schema("k must start at 1 or later"));
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0) {
        return Err(schema("epsilon must lie in (0, 1]"));
    }
    if cfg.ell == 0 || cfg.maxlen == 0 {
        return Err(schema("ell and maxlen must be positive"));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trisys::{validate_system, SystemError};

    const S1: &str = r#"{"n": 2, "vars": ["X1", "X2"], "levels": [
        {"e": 1, "G": "X2", "H": "1"},
        {"e": 1, "g": 2, "h": 3}]}"#;

    #[test]
    fn s1_document() {
        let sys = parse_system(S1).unwrap();
        validate_system(&sys).unwrap();
        let again = parse_system(&system_to_json(&sys)).unwrap();
        assert_eq!(again, sys);
        assert_eq!(system_to_json(&again), system_to_json(&sys));
    }

    #[test]
    fn schema_violations() {
        let lower = S1.replace(r#""G": "X2""#, r#""G": "X1*X2""#);
        assert!(matches!(
            parse_system(&lower),
            Err(SysIoError::System(SystemError::LowerVariable { level: 1, var: 1 }))
        ));
        let zero = S1.replace(r#""g": 2"#, r#""g": 0"#);
        assert!(matches!(parse_system(&zero), Err(SysIoError::System(SystemError::ZeroLastCoefficient))));
        let bad_e = S1.replace(r#""e": 1, "G""#, r#""e": 2, "G""#);
        assert!(matches!(parse_system(&bad_e), Err(SysIoError::Schema(m)) if m.contains("e must be")));
        let arity = S1.replace(r#""n": 2"#, r#""n": 3"#);
        assert!(matches!(parse_system(&arity), Err(SysIoError::Schema(_))));
        let unknown = S1.replace(r#""H": "1""#, r#""H": "Z""#);
        match parse_system(&unknown) {
            Err(SysIoError::Polynomial { location, source }) => {
                assert_eq!(location, "level 1 H");
                assert_eq!(source.offset, 0);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_system("{"), Err(SysIoError::Json(_))));
        let extra = S1.replace(r#""n": 2,"#, r#""n": 2, "m": 1,"#);
        assert!(matches!(parse_system(&extra), Err(SysIoError::Json(_))));
    }

    #[test]
    fn big_last_coefficients() {
        let big = S1.replace(r#""h": 3"#, r#""h": "-123456789012345678901234567890""#);
        let sys = parse_system(&big).unwrap();
        assert!(system_to_json(&sys).contains(r#""-123456789012345678901234567890""#));
        assert_eq!(parse_system(&system_to_json(&sys)).unwrap(), sys);
    }

    #[test]
    fn variety_and_config() {
        let names = MultiPoly::<Integers>::default_names(2);
        let v = parse_variety(r#"{"polys": ["X1 - X2", "X1^2 - 2"]}"#, &names).unwrap();
        assert_eq!((v.s(), v.degree()), (2, 2));
        assert_eq!(parse_variety(&variety_to_json(&v, &names), &names).unwrap(), v);
        assert!(matches!(parse_variety(r#"{"polys": []}"#, &names), Err(SysIoError::Schema(_))));

        let cfg = parse_config(r#"{"primes": [5, 31], "k": [1, 3], "ell": 20, "epsilon": 0.25, "seed": 7}"#).unwrap();
        assert_eq!((cfg.primes, cfg.k, cfg.ell, cfg.seed), ([5, 31], [1, 3], 20, 7));
        assert_eq!(cfg.scan_cap, DEFAULT_SCAN_CAP);
        assert_eq!(ExperimentConfig::default().primes, [5, 97]);
        assert!(parse_config(r#"{"epsilon": 0}"#).is_err());
        assert!(parse_config(r#"{"primes": [9, 3]}"#).is_err());
    }
}
