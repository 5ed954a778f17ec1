use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use tridyn::bounds::{bound_report, gap_structure, BoundInputs, BoundsError};
use tridyn::dynmodp::{
    orbit, orbit_brent, orbit_frequency_experiment, periodic_points_bruteforce, periodic_points_triangular,
    reduce_system, stabilization, DynError, ExperimentParams,
};
use tridyn::iterate::{growth_report, iterate_naive, iterate_structured, IterOptions};
use tridyn::polyring::{primes_between, Integers, RationalFn};
use tridyn::sysio::{
    format_polynomial, orbit_table, parse_config, parse_system, parse_variety, periodic_table, Cell, ExperimentConfig,
    Format, Report,
};
use tridyn::trisys::{system_metrics, validate_system, LeadingData, TriangularSystem};

use crate::args::{Cli, Command, Common, IntRange, OutFormat};
use crate::Failure;

/// Flags merged over the configuration file.
struct Settings {
    primes: Vec<u64>,
    ks: Vec<usize>,
    ell: usize,
    ell_given: bool,
    epsilon: f64,
    seed: u64,
    maxlen: usize,
    samples: usize,
    scan_cap: u64,
    opts: IterOptions,
    format: Option<Format>,
    output: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn settings(c: &Common) -> Result<Settings, Failure> {
    let (cfg, from_file) = match &c.config {
        Some(path) => (
            parse_config(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
            true,
        ),
        None => (ExperimentConfig::default(), false),
    };
    let p = c.p.clone().unwrap_or(IntRange { lo: cfg.primes[0], hi: cfg.primes[1] });
    let k = c.k.clone().unwrap_or(IntRange { lo: cfg.k[0] as u64, hi: cfg.k[1] as u64 });
    if k.lo == 0 {
        return Err(Failure::Usage("--k must be at least 1".into()));
    }
    let epsilon = c.epsilon.unwrap_or(cfg.epsilon);
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Failure::Usage(format!("--epsilon must lie in (0, 1], got {epsilon}")));
    }
    let ell = c.ell.unwrap_or(cfg.ell);
    if ell == 0 {
        return Err(Failure::Usage("--ell must be positive".into()));
    }
    if let Some(j) = c.jobs {
        if j == 0 {
            return Err(Failure::Usage("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot start {j} workers: {e}")))?;
    }
    Ok(Settings {
        primes: primes_between(p.lo, p.hi),
        ks: k.iter().map(|k| k as usize).collect(),
        ell,
        ell_given: c.ell.is_some() || from_file,
        epsilon,
        seed: c.seed.unwrap_or(cfg.seed),
        maxlen: cfg.maxlen,
        samples: cfg.samples,
        scan_cap: cfg.scan_cap,
        opts: IterOptions { term_cap: cfg.term_cap, ..IterOptions::default() },
        format: c.format.map(|f| match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }),
        output: c.output.clone(),
    })
}

impl Settings {
    fn kmax(&self) -> usize {
        *self.ks.last().expect("nonempty k range")
    }

    fn require_primes(&self) -> Result<(), Failure> {
        if self.primes.is_empty() {
            return Err(Failure::Usage("the --p range contains no primes".into()));
        }
        Ok(())
    }

    fn sink(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match &self.output {
            Some(path) => Box::new(io::BufWriter::new(
                fs::File::create(path).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?,
            )),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn emit(&self, report: &Report<'_>, default: Format) -> Result<(), Failure> {
        let mut out = self.sink()?;
        report.write(self.format.unwrap_or(default), &mut out).and_then(|_| out.flush()).map_err(write_failed)
    }

    fn emit_text(&self, text: &str) -> Result<(), Failure> {
        let mut out = self.sink()?;
        out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(write_failed)
    }
}

fn write_failed(e: io::Error) -> Failure {
    Failure::Rejected(format!("cannot write output: {e}"))
}

fn load_system(path: &Path) -> Result<TriangularSystem, Failure> {
    parse_system(&read(path)?).map_err(|e| Failure::Rejected(format!("{}: {e}", path.display())))
}

fn validated(path: &Path) -> Result<(TriangularSystem, LeadingData), Failure> {
    let sys = load_system(path)?;
    let lead = validate_system(&sys).map_err(|v| Failure::Rejected(format!("{}: {v}", path.display())))?;
    Ok((sys, lead))
}

fn rejected(e: impl std::fmt::Display) -> Failure {
    Failure::Rejected(e.to_string())
}

pub fn dispatch(cli: Cli) -> Result<(), Failure> {
    let s = settings(&cli.common)?;
    match cli.command {
        Command::Validate { system } => validate(&s, &system),
        Command::Iterate { system } => iterate(&s, &system),
        Command::Growth { system } => growth(&s, &system),
        Command::Periodic { system } => periodic(&s, &system),
        Command::Orbit { system, point, maxlen, brent } => run_orbit(&s, &system, &point, maxlen, brent),
        Command::Variety { system, variety, samples } => run_variety(&s, &system, &variety, samples),
        Command::Bounds(b) => bounds(&s, &b),
        Command::Gap { seq, big_n } => gap(&s, &seq, big_n),
    }
}

fn validate(s: &Settings, path: &Path) -> Result<(), Failure> {
    let sys = load_system(path)?;
    let n = sys.n();
    let lead = match validate_system(&sys) {
        Ok(lead) => lead,
        Err(v) => {
            if s.format == Some(Format::Json) {
                let doc = json!({ "valid": false, "violation": v.to_string() });
                s.emit_text(&format!("{}\n", serde_json::to_string_pretty(&doc).expect("values serialize")))?;
            }
            return Err(Failure::Rejected(format!("{}: {v}", path.display())));
        }
    };
    let levels: Vec<_> = lead
        .rows
        .iter()
        .zip(sys.levels())
        .enumerate()
        .map(|(i, (row, lv))| {
            json!({
                "level": i + 1,
                "e": lv.e.as_i64(),
                "coeff": row.coeff.to_string(),
                "s": row.s,
                "chain_product": lead.chain_product(i).to_string(),
            })
        })
        .collect();
    match s.format {
        Some(Format::Json) => {
            let doc = json!({ "valid": true, "n": n, "vars": sys.names(), "levels": levels });
            s.emit_text(&format!("{}\n", serde_json::to_string_pretty(&doc).expect("values serialize")))
        }
        Some(Format::Csv) => {
            let mut t = tridyn::sysio::Table::new(vec!["level", "e", "coeff", "s", "chain_product"]);
            for (i, (row, lv)) in lead.rows.iter().zip(sys.levels()).enumerate() {
                let svals: Vec<String> = row.s.iter().map(u32::to_string).collect();
                t.push(vec![
                    Cell::Int((i as u64 + 1).into()),
                    Cell::Int(lv.e.as_i64().into()),
                    Cell::Int(row.coeff.clone()),
                    Cell::Text(svals.join(" ")),
                    Cell::Int(lead.chain_product(i)),
                ]);
            }
            s.emit(&Report::Table(t), Format::Csv)
        }
        None => {
            let mut text = format!("valid system, n = {n}\ns-matrix (row i: s_i,1 .. s_i,n):\n");
            for row in &lead.rows {
                let svals: Vec<String> = row.s.iter().map(|v| format!("{v:>3}")).collect();
                text.push_str(&format!("  {}\n", svals.join(" ")));
            }
            text.push_str("leading coefficients:");
            for row in &lead.rows {
                text.push_str(&format!(" {}", row.coeff));
            }
            text.push('\n');
            s.emit_text(&text)
        }
    }
}

fn rational_text(f: &RationalFn<Integers>, names: &[String]) -> (String, String) {
    (format_polynomial(f.num(), names), format_polynomial(f.den(), names))
}

fn iterate(s: &Settings, path: &Path) -> Result<(), Failure> {
    let (sys, _) = validated(path)?;
    let k = s.kmax();
    let names = sys.names();
    let naive = iterate_naive(&sys, k, &s.opts).map_err(rejected)?;
    let structured = iterate_structured(&sys, k, &s.opts).map_err(rejected)?.at(k);
    let agree: Vec<bool> = naive.iter().zip(&structured).map(|(a, b)| a.same_function(b)).collect();
    let all_agree = agree.iter().all(|&a| a);
    match s.format {
        Some(Format::Csv) => {
            let mut t = tridyn::sysio::Table::new(vec!["i", "k", "num", "den", "structured_num", "structured_den", "agree"]);
            for (i, ((a, b), ok)) in naive.iter().zip(&structured).zip(&agree).enumerate() {
                let (an, ad) = rational_text(a, names);
                let (bn, bd) = rational_text(b, names);
                t.push(vec![
                    Cell::Int((i as u64 + 1).into()),
                    Cell::Int((k as u64).into()),
                    Cell::Text(an),
                    Cell::Text(ad),
                    Cell::Text(bn),
                    Cell::Text(bd),
                    Cell::Bool(*ok),
                ]);
            }
            s.emit(&Report::Table(t), Format::Csv)?;
        }
        Some(Format::Json) => {
            let comps = |fs: &[RationalFn<Integers>]| -> Vec<serde_json::Value> {
                fs.iter()
                    .map(|f| {
                        let (num, den) = rational_text(f, names);
                        json!({ "num": num, "den": den })
                    })
                    .collect()
            };
            let doc = json!({
                "k": k,
                "naive": comps(&naive),
                "structured": comps(&structured),
                "engines_agree": all_agree,
            });
            s.emit_text(&format!("{}\n", serde_json::to_string_pretty(&doc).expect("values serialize")))?;
        }
        None => {
            let mut text = String::new();
            for (i, f) in naive.iter().enumerate() {
                let (num, den) = rational_text(f, names);
                if den == "1" {
                    text.push_str(&format!("F_{}^({k}) = {num}\n", i + 1));
                } else {
                    text.push_str(&format!("F_{}^({k}) = ({num}) / ({den})\n", i + 1));
                }
            }
            text.push_str(&format!("engines agree: {all_agree}\n"));
            s.emit_text(&text)?;
        }
    }
    if !all_agree {
        return Err(Failure::Rejected(format!("naive and structured iterates differ at k = {k}")));
    }
    Ok(())
}

fn growth(s: &Settings, path: &Path) -> Result<(), Failure> {
    let (sys, lead) = validated(path)?;
    let rep = growth_report(&sys, &lead, s.kmax(), &s.opts).map_err(rejected)?;
    s.emit(&Report::Growth(&rep), Format::Csv)?;
    let deg_off = rep.rows.iter().filter(|r| !r.ok_deg()).count();
    let h_off = rep.rows.iter().filter(|r| !r.ok_h()).count();
    eprintln!(
        "growth: {} rows, engines agree: {}, degree law off in {deg_off}, height bounds off in {h_off}",
        rep.rows.len(),
        rep.engines_agree
    );
    Ok(())
}

fn periodic(s: &Settings, path: &Path) -> Result<(), Failure> {
    let (sys, _) = validated(path)?;
    s.require_primes()?;
    let mut stabs = Vec::new();
    // Brute force against the triangular solver, keyed by (k, p).
    let mut agreement: BTreeMap<(usize, u64), &'static str> = BTreeMap::new();
    for &k in &s.ks {
        let st = stabilization(&sys, k, &s.primes, &s.opts).map_err(rejected)?;
        let checks: Vec<(u64, &'static str)> = s
            .primes
            .par_iter()
            .map(|&p| -> Result<(u64, &'static str), DynError> {
                let r = reduce_system(&sys, p)?;
                if r.is_degenerate() {
                    return Ok((p, "engines_skipped"));
                }
                let brute = match periodic_points_bruteforce(&r.prime_map(), k, s.scan_cap) {
                    Ok(b) => b,
                    Err(DynError::ScanCap { .. }) => return Ok((p, "bruteforce_skipped")),
                    Err(e) => return Err(e),
                };
                let tri = periodic_points_triangular(&r, k, &r.field())?;
                Ok((p, if tri == brute { "engines_agree" } else { "engines_differ" }))
            })
            .collect::<Result<_, _>>()
            .map_err(rejected)?;
        for (p, flag) in checks {
            agreement.insert((k, p), flag);
        }
        let show = |v: &[u64]| format!("{v:?}");
        eprintln!(
            "k = {k}: majority {}, off-majority primes {}, degenerate {}, failed {}",
            st.majority.map_or("none".to_string(), |m| m.to_string()),
            show(&st.off_majority),
            show(&st.degenerate),
            show(&st.failed)
        );
        stabs.push(st);
    }
    let mut table = periodic_table(&stabs);
    let flags_col = table.columns.iter().position(|c| *c == "flags").expect("flags column");
    for row in &mut table.rows {
        let (Cell::Int(p), Cell::Int(k)) = (&row[0], &row[1]) else { unreachable!("p and k are integers") };
        let key = (usize::try_from(k).expect("small k"), u64::try_from(p).expect("small p"));
        if let (Some(flag), Cell::Text(flags)) = (agreement.get(&key), &mut row[flags_col]) {
            *flags = if flags.is_empty() { flag.to_string() } else { format!("{flag} {flags}") };
        }
    }
    s.emit(&Report::Table(table), Format::Csv)?;
    if agreement.values().any(|f| *f == "engines_differ") {
        return Err(Failure::Rejected("brute force and triangular solver disagree".into()));
    }
    Ok(())
}

fn parse_list(text: &str, what: &str) -> Result<Vec<u64>, Failure> {
    text.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| Failure::Usage(format!("{what}: expected integers, found {t:?}"))))
        .collect()
}

fn run_orbit(s: &Settings, path: &Path, point: &str, maxlen: Option<usize>, brent: bool) -> Result<(), Failure> {
    let (sys, _) = validated(path)?;
    let &[p] = s.primes.as_slice() else {
        return Err(Failure::Usage("orbit needs --p to name a single prime".into()));
    };
    let w = parse_list(point, "--point")?;
    if w.len() != sys.n() {
        return Err(Failure::Usage(format!("--point has {} coordinates, the system has {}", w.len(), sys.n())));
    }
    let w: Vec<u64> = w.into_iter().map(|x| x % p).collect();
    let map = reduce_system(&sys, p).map_err(rejected)?.prime_map();
    let maxlen = maxlen.unwrap_or(s.maxlen).max(1);
    let rec = if brent { orbit_brent(&map, &w, maxlen) } else { orbit(&map, &w, maxlen) }.map_err(rejected)?;
    s.emit(&Report::Table(orbit_table(&rec)), Format::Csv)?;
    match rec.size() {
        Some(size) => eprintln!("S(w) = {size}"),
        None => eprintln!("S(w) > {maxlen} (truncated)"),
    }
    Ok(())
}

fn run_variety(s: &Settings, path: &Path, vpath: &Path, samples: Option<usize>) -> Result<(), Failure> {
    let (sys, _) = validated(path)?;
    s.require_primes()?;
    let v = parse_variety(&read(vpath)?, sys.names()).map_err(|e| Failure::Rejected(format!("{}: {e}", vpath.display())))?;
    let params = ExperimentParams {
        primes: s.primes.clone(),
        ell: s.ell,
        epsilon: s.epsilon,
        samples: samples.unwrap_or(s.samples),
        seed: s.seed,
    };
    let exp = orbit_frequency_experiment(&sys, &v, &params).map_err(rejected)?;
    s.emit(&Report::Hits(&exp.rows), Format::Csv)?;
    eprintln!(
        "variety: {} orbits of size >= {}, {} shorter, degenerate primes {:?}, exceeding eps*ell: {}",
        exp.rows.len(),
        s.ell,
        exp.short_orbits,
        exp.degenerate_primes,
        exp.violations
    );
    Ok(())
}

fn bounds(s: &Settings, b: &crate::args::BoundsArgs) -> Result<(), Failure> {
    let (mut n, mut d, mut h) = (b.n, b.d, b.h);
    if let Some(path) = &b.system {
        let (sys, _) = validated(path)?;
        let m = system_metrics(&sys).map_err(rejected)?;
        n = n.or(Some(m.n as u64));
        d = d.or(Some(m.d));
        h = h.or(Some(m.h.value));
    }
    let (Some(n), Some(d), Some(h)) = (n, d, h) else {
        return Err(Failure::Usage("bounds needs --n, --d and --h, or --system".into()));
    };
    let inputs = BoundInputs {
        n,
        d,
        h,
        s: b.s,
        big_d: b.big_d,
        big_h: b.big_h,
        k: s.kmax() as u64,
        epsilon: s.epsilon,
        ell: s.ell_given.then_some(s.ell as u64),
        l: b.l,
    };
    s.emit(&Report::Bounds(&bound_report(&inputs)), Format::Json)
}

fn gap(s: &Settings, seq: &str, big_n: u64) -> Result<(), Failure> {
    let seq = parse_list(seq, "--seq")?;
    let g = gap_structure(&seq, big_n).map_err(|e| match e {
        BoundsError::Hypothesis(m) => Failure::Rejected(m),
        other => Failure::Usage(other.to_string()),
    })?;
    s.emit(&Report::Gap(&g), Format::Csv)?;
    if !g.guarantee_holds {
        return Err(Failure::Rejected("gap guarantee failed".into()));
    }
    Ok(())
}
