use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::bounds::{BoundReport, GapResult};
use crate::dynmodp::{OrbitRecord, OrbitStatus, Stabilization, HitRow};
use crate::iterate::{BoundCheck, GrowthReport};
use crate::polyring::bigint_ln;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A table cell. Integers are written exactly, reals with 15 significant
/// digits.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(BigInt),
    Real(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn int(v: impl Into<BigInt>) -> Cell {
        Cell::Int(v.into())
    }

    fn opt<T>(v: Option<T>, f: impl FnOnce(T) -> Cell) -> Cell {
        v.map_or(Cell::Empty, f)
    }

    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(x) => format_real(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => match i64::try_from(v) {
                Ok(small) => Value::from(small),
                Err(_) => Value::String(v.to_string()),
            },
            Cell::Real(x) => real_json(*x),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Shortest decimal text of `x` rounded to 15 significant digits.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    round_sig(x).to_string()
}

fn round_sig(x: f64) -> f64 {
    format!("{x:.14e}").parse().expect("formatted float parses")
}

fn real_json(x: f64) -> Value {
    if x.is_finite() {
        Value::from(round_sig(x))
    } else {
        Value::String(format_real(x))
    }
}

/// Rows in a fixed column order.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::text))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

fn log_bound(b: &Option<BoundCheck>) -> Cell {
    Cell::opt(b.as_ref(), |b| Cell::Real(bigint_ln(&b.rhs)))
}

/// Columns `i, k, deg_measured, deg_predicted, h_measured, bound_5t,
/// bound_l36, ok_deg, ok_h, t_naive_ns, t_struct_ns`, then the structured
/// representation's height, the last-level bound valid for all coefficients,
/// and the height semantics used for `h_measured`. Rows by `k`, then `i`.
/// Heights and bounds are natural logarithms.
pub fn growth_table(report: &GrowthReport) -> Table {
    let mut t = Table::new(vec![
        "i",
        "k",
        "deg_measured",
        "deg_predicted",
        "h_measured",
        "bound_5t",
        "bound_l36",
        "ok_deg",
        "ok_h",
        "t_naive_ns",
        "t_struct_ns",
        "h_structured",
        "bound_last_corrected",
        "h_semantics",
    ]);
    let mut rows: Vec<_> = report.rows.iter().collect();
    rows.sort_by_key(|r| (r.k, r.i));
    for r in rows {
        t.push(vec![
            Cell::int(r.i as u64),
            Cell::int(r.k as u64),
            Cell::int(r.deg_measured),
            Cell::int(r.deg_predicted),
            Cell::Real(r.h_measured.value),
            log_bound(&r.bound_5t),
            Cell::Real(bigint_ln(&r.bound_l36.rhs)),
            Cell::Bool(r.ok_deg()),
            Cell::Bool(r.ok_h()),
            Cell::int(r.t_naive_ns),
            Cell::int(r.t_struct_ns),
            Cell::Real(r.h_structured.value),
            log_bound(&r.bound_last_corrected),
            Cell::Text("coprime".into()),
        ]);
    }
    t
}

/// Columns `p, k, count_Fp, count_closure, bezout_cap, flags`, rows by `p`.
/// `flags` lists degenerate levels (`degenerate:1;2`), an off-majority count
/// and computation errors.
pub fn periodic_table(stab: &[Stabilization]) -> Table {
    let mut t = Table::new(vec!["p", "k", "count_Fp", "count_closure", "bezout_cap", "flags"]);
    let mut rows: Vec<_> = stab.iter().flat_map(|s| s.rows.iter().map(move |r| (s, r))).collect();
    rows.sort_by_key(|(_, r)| (r.k, r.p));
    for (s, r) in rows {
        let mut flags = Vec::new();
        if !r.degenerate_levels.is_empty() {
            let lv: Vec<String> = r.degenerate_levels.iter().map(usize::to_string).collect();
            flags.push(format!("degenerate:{}", lv.join(";")));
        }
        if s.off_majority.contains(&r.p) {
            flags.push("off_majority".into());
        }
        if let Some(e) = &r.error {
            flags.push(format!("error:{e}"));
        }
        t.push(vec![
            Cell::int(r.p),
            Cell::int(r.k as u64),
            Cell::opt(r.count_fp, |c| Cell::int(c as u64)),
            Cell::opt(r.count_closure, |c| Cell::Text(c.to_string())),
            Cell::opt(s.bezout_cap.as_ref(), |c| Cell::Int(BigInt::from(c.clone()))),
            Cell::Text(flags.join(" ")),
        ]);
    }
    t
}

fn point_text<E: ToString>(w: &[E]) -> String {
    let parts: Vec<String> = w.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

/// Columns `p, w, ell, hits, eps_ell, orbit_size, exceeds`, rows as given.
pub fn hit_table(rows: &[HitRow]) -> Table {
    let mut t = Table::new(vec!["p", "w", "ell", "hits", "eps_ell", "orbit_size", "exceeds"]);
    for r in rows {
        t.push(vec![
            Cell::int(r.p),
            Cell::Text(point_text(&r.w)),
            Cell::int(r.ell as u64),
            Cell::int(r.hits as u64),
            Cell::Real(r.eps_ell),
            Cell::opt(r.orbit_size, |s| Cell::int(s as u64)),
            Cell::Bool(r.exceeds),
        ]);
    }
    t
}

/// Columns `m, point`: the stored orbit points in order, then one row with
/// `m` empty describing the termination (`cycle tail=.. period=..`,
/// `pole step=..` or `truncated maxlen=..`).
pub fn orbit_table<E: ToString + Clone>(rec: &OrbitRecord<E>) -> Table {
    let mut t = Table::new(vec!["m", "point"]);
    for (m, w) in rec.points.iter().enumerate() {
        t.push(vec![Cell::int(m as u64), Cell::Text(point_text(w))]);
    }
    let status = match rec.status {
        OrbitStatus::Cycle { tail, period } => format!("cycle tail={tail} period={period}"),
        OrbitStatus::Pole { step } => format!("pole step={step}"),
        OrbitStatus::Truncated { maxlen } => format!("truncated maxlen={maxlen}"),
    };
    t.push(vec![Cell::Empty, Cell::Text(status)]);
    t
}

/// Columns `r, count, r_max, count_min, guarantee_holds`.
pub fn gap_table(g: &GapResult) -> Table {
    let mut t = Table::new(vec!["r", "count", "r_max", "count_min", "guarantee_holds"]);
    t.push(vec![
        Cell::int(g.r),
        Cell::int(g.count),
        Cell::Real(g.r_max),
        Cell::Real(g.count_min),
        Cell::Bool(g.guarantee_holds),
    ]);
    t
}

/// Rounds every float in a serialized value to 15 significant digits.
fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => real_json(n.as_f64().expect("f64 number")),
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

/// JSON text of any serializable report with reals at 15 significant digits.
pub fn to_json_text<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("reports serialize");
    serde_json::to_string_pretty(&round_floats(v)).expect("values serialize")
}

/// A report ready for writing.
pub enum Report<'a> {
    Growth(&'a GrowthReport),
    Periodic(&'a [Stabilization]),
    Hits(&'a [HitRow]),
    Gap(&'a GapResult),
    Bounds(&'a BoundReport),
    Table(Table),
}

impl Report<'_> {
    pub fn table(&self) -> Option<Table> {
        Some(match self {
            Report::Growth(r) => growth_table(r),
            Report::Periodic(s) => periodic_table(s),
            Report::Hits(h) => hit_table(h),
            Report::Gap(g) => gap_table(g),
            Report::Table(t) => t.clone(),
            Report::Bounds(_) => return None,
        })
    }

    /// Writes to `out`. A bound report has no tabular form; as CSV it is
    /// written as `field, value` pairs of its flattened JSON.
    pub fn write<W: Write>(&self, format: Format, mut out: W) -> io::Result<()> {
        match (self, format) {
            (Report::Bounds(b), Format::Json) => writeln!(out, "{}", to_json_text(b)),
            (Report::Bounds(b), Format::Csv) => {
                let v = round_floats(serde_json::to_value(b).expect("reports serialize"));
                let mut t = Table::new(vec!["field", "value"]);
                flatten("", &v, &mut t);
                t.write_csv(out).map_err(io::Error::other)
            }
            (_, Format::Csv) => self.table().expect("tabular report").write_csv(out).map_err(io::Error::other),
            (_, Format::Json) => {
                let v = self.table().expect("tabular report").to_json();
                writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("values serialize"))
            }
        }
    }
}

fn flatten(prefix: &str, v: &Value, t: &mut Table) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(o) => o.iter().for_each(|(k, v)| flatten(&key(k), v, t)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, t)),
        Value::Null => t.push(vec![Cell::Text(prefix.to_string()), Cell::Empty]),
        Value::String(s) => t.push(vec![Cell::Text(prefix.to_string()), Cell::Text(s.clone())]),
        other => t.push(vec![Cell::Text(prefix.to_string()), Cell::Text(other.to_string())]),
    }
}

/// Writes a report to a file, or to standard output when `path` is `None`.
pub fn write_report(report: &Report<'_>, format: Format, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write(format, &mut w)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            report.write(format, &mut lock)?;
            lock.flush()
        }
    }
}
