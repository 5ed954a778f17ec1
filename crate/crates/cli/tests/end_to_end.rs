//! Golden-file tests of every subcommand on the systems S1 and S2.
//! Set `UPDATE_GOLDEN=1` to rewrite the expected outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(sub)
}

fn data(name: &str) -> String {
    dir("data").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tridyn"))
        .args(args)
        .env_remove("TRIDYN_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} exited with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

/// Blanks the timing columns, the only fields that vary between runs.
fn mask_timings(csv: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let timed: Vec<usize> = header.iter().enumerate().filter(|(_, h)| h.ends_with("_ns")).map(|(i, _)| i).collect();
    let mut out = header.join(",") + "\n";
    for line in lines {
        let cells: Vec<&str> =
            line.split(',').enumerate().map(|(i, c)| if timed.contains(&i) { "-" } else { c }).collect();
        out += &(cells.join(",") + "\n");
    }
    out
}

fn golden(name: &str, actual: &str) {
    let path = dir("golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

fn each_system(f: impl Fn(&str, &str)) {
    for name in ["s1", "s2"] {
        f(name, &data(&format!("{name}.json")));
    }
}

#[test]
fn validate() {
    each_system(|name, sys| {
        golden(&format!("{name}_validate.txt"), &stdout(&["validate", sys]));
        golden(&format!("{name}_validate.json"), &stdout(&["validate", sys, "--format", "json"]));
    });
    assert!(stdout(&["validate", &data("s1.json")]).contains("s-matrix"));
}

#[test]
fn iterate() {
    each_system(|name, sys| {
        let text = stdout(&["iterate", sys, "--k", "3"]);
        assert!(text.ends_with("engines agree: true\n"));
        golden(&format!("{name}_iterate.txt"), &text);
        golden(&format!("{name}_iterate.json"), &stdout(&["iterate", sys, "--k", "2", "--format", "json"]));
    });
    let s1 = stdout(&["iterate", &data("s1.json"), "--k", "2"]);
    assert!(s1.contains("F_1^(2) = 2*X1*X2^2 + 3*X1*X2 + 2*X2 + 4\n"));
}

#[test]
fn growth() {
    each_system(|name, sys| {
        golden(&format!("{name}_growth.csv"), &mask_timings(&stdout(&["growth", sys, "--k", "4"])));
    });
}

#[test]
fn periodic() {
    let s1 = stdout(&["periodic", &data("s1.json"), "--p", "7", "--k", "1"]);
    assert_eq!(s1, "p,k,count_Fp,count_closure,bezout_cap,flags\n7,1,1,1,4,engines_agree\n");
    each_system(|name, sys| {
        golden(&format!("{name}_periodic.csv"), &stdout(&["periodic", sys, "--p", "5..31", "--k", "1..3"]));
    });
}

#[test]
fn orbit() {
    each_system(|name, sys| {
        golden(&format!("{name}_orbit.csv"), &stdout(&["orbit", sys, "--p", "7", "--point", "1,2"]));
        let brent = stdout(&["orbit", sys, "--p", "7", "--point", "1,2", "--brent"]);
        let full = stdout(&["orbit", sys, "--p", "7", "--point", "1,2"]);
        assert_eq!(brent.lines().last(), full.lines().last());
    });
}

#[test]
fn variety() {
    each_system(|name, sys| {
        let args = ["variety", sys, "--variety", &data("diagonal.json"), "--config", &data("config.json")];
        golden(&format!("{name}_variety.csv"), &stdout(&args));
    });
}

#[test]
fn bounds() {
    each_system(|name, sys| {
        golden(&format!("{name}_bounds.json"), &stdout(&["bounds", "--system", sys, "--k", "2", "--ell", "100"]));
    });
    let out = stdout(&["bounds", "--n", "1", "--d", "2", "--h", "1", "--s", "1"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["nullstellensatz"]["h_coeff"], "240");
    assert_eq!(v["nullstellensatz"]["log_coeff"], "4928");
    let minus = stdout(&["bounds", "--n", "2", "--d", "2", "--h", "1"]);
    assert!(minus.contains("\"C × "));
}

#[test]
fn gap() {
    let out = stdout(&["gap", "--seq", "0,3,5,8,10,13", "--N", "13"]);
    assert_eq!(out, "r,count,r_max,count_min,guarantee_holds\n3,3,5.2,0.480769230769231,true\n");
    golden("gap.json", &stdout(&["gap", "--seq", "0,3,5,8,10,13", "--N", "13", "--format", "json"]));
}

#[test]
fn exit_statuses() {
    assert_eq!(run(&["validate", &data("invalid.json")]).status.code(), Some(1));
    let json = run(&["validate", &data("invalid.json"), "--format", "json"]);
    assert_eq!(json.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&json.stdout).contains("\"valid\": false"));
    assert_eq!(run(&["validate", &data("missing.json")]).status.code(), Some(2));
    assert_eq!(run(&["periodic", &data("s1.json"), "--k", "0"]).status.code(), Some(2));
    assert_eq!(run(&["periodic", &data("s1.json"), "--p", "24..28"]).status.code(), Some(2));
    assert_eq!(run(&["orbit", &data("s1.json"), "--p", "5..7", "--point", "0,0"]).status.code(), Some(2));
    assert_eq!(run(&["orbit", &data("s1.json"), "--p", "5", "--point", "0"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["gap", "--seq", "0,1,2", "--N", "4"]).status.code(), Some(1));
    let usage = run(&["periodic", &data("s1.json"), "--epsilon", "2"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(usage.stdout.is_empty());
}

#[test]
fn deterministic_and_seeded() {
    let args = ["variety", &data("s1.json"), "--variety", &data("diagonal.json"), "--p", "5..31", "--ell", "16"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let mut jobs = args.to_vec();
    jobs.extend(["--jobs", "1"]);
    assert_eq!(a, stdout(&jobs));

    let with_env = |seed: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_tridyn")).args(args).env("TRIDYN_SEED", seed).output().unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let mut flag = args.to_vec();
    flag.extend(["--seed", "99"]);
    assert_eq!(with_env("99"), stdout(&flag));
    assert_ne!(with_env("99"), a);
}

#[test]
fn output_file() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("gap.csv");
    let out = run(&["gap", "--seq", "0,3,5,8,10,13", "--N", "13", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(fs::read_to_string(&path).unwrap().starts_with("r,count"));
}
