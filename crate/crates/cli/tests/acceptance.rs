//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use ecx_core::complexity::{max_coarse_scan, Config};
use ecx_core::selftest;

const BERNOULLI: &str = "bernoulli:p=3/10";
const MARKOV: &str = "markov:flip=1/10";
const MIXTURE: &str = "mixture:1/2*bernoulli:p=1/10|1/2*bernoulli:p=1/2";

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Runs the binary and returns stdout; panics on a non-zero exit.
fn ecx(args: &[&str]) -> String {
    let o = Command::new(env!("CARGO_BIN_EXE_ecx")).args(args).output().expect("binary runs");
    assert!(o.status.success(), "ecx {args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

/// Rows of a CSV table as maps from header to cell.
fn table(csv: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    lines
        .map(|l| header.iter().map(|h| h.to_string()).zip(l.split(',').map(str::to_string)).collect())
        .collect()
}

fn num(row: &std::collections::HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap_or_else(|_| panic!("{key}={:?} is not a number", row[key]))
}

fn suite(s: selftest::SuiteResult) -> Outcome {
    outcome(s.passed(), s.line())
}

fn criterion1() -> Outcome {
    let t = Instant::now();
    let s = selftest::typical_bound_suite(18);
    let secs = t.elapsed().as_secs_f64();
    outcome(s.passed() && secs <= 300.0, format!("{} (limit 300s)", s.line()))
}

fn criterion2() -> Outcome {
    let k = selftest::lz_kraft_suite(16);
    let rt = selftest::lz_round_trip_suite(16, 10_000, 20, 1);
    outcome(k.passed() && rt.passed(), format!("{}; {}", k.line(), rt.line()))
}

fn lz_summary_args(model: &str) -> Vec<String> {
    ["lz", "--model", model, "--n", "1024,16384,262144", "--samples", "50", "--seed", "1", "--summary"]
        .map(String::from)
        .to_vec()
}

fn criterion3(runs: &mut Runs) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for model in [BERNOULLI, MARKOV] {
        let rows = table(&runs.run(lz_summary_args(model)));
        let errs: Vec<f64> = rows.iter().map(|r| num(r, "median_abs_error")).collect();
        let ok = errs.len() == 3 && errs.windows(2).all(|w| w[1] < w[0]) && errs[2] <= 0.25;
        pass &= ok;
        detail.push(format!("{model} median |rate-h| {errs:.4?}"));
    }
    outcome(pass, detail.join("; "))
}

fn criterion4(runs: &mut Runs) -> Outcome {
    let args = ["typical", "--r", "3/4", "--n", "4096,32768,262144", "--model", MARKOV, "--samples", "100", "--seed", "1"];
    let rows = table(&runs.run(args.map(String::from).to_vec()));
    let p: Vec<f64> = rows.iter().map(|r| num(r, "cardinality-or-estimate")).collect();
    let ok = p.len() == 3 && p.windows(2).all(|w| w[1] >= w[0]) && p[2] >= 0.9;
    outcome(ok, format!("empirical probability {p:?}"))
}

fn criterion5(runs: &mut Runs) -> Outcome {
    let rows_path = runs.tmp("sweep_rows.csv");
    let args = [
        "sweep-theorem1", "--model", MARKOV, "--eps", "1/10", "--n-list", "4096,32768,262144", "--samples", "50",
        "--seed", "1",
    ];
    let mut args: Vec<String> = args.map(String::from).to_vec();
    args.extend(["--rows".to_string(), rows_path.to_string_lossy().into_owned()]);
    let rows = table(&runs.run_with_file(args, &rows_path));
    let Some(last) = rows.iter().find(|r| r["n"] == "262144") else {
        return outcome(false, "no row for n=262144");
    };
    let frac = num(last, "fraction_budget_satisfied");
    let median = num(last, "median_ec_upper");
    let bound = num(last, "bound");
    let c = num(last, "c_scheme");
    let n = 262144f64;
    let expect_bound = n.log2() + 2.0 * n.log2().log2() + c;
    let ok = frac >= 0.95 && median <= bound && c <= 32.0 && (bound - expect_bound).abs() < 1e-9;
    outcome(
        ok,
        format!("n=2^18 fraction {frac}, median ec-upper {median} <= bound {bound:.2}, C_scheme {c}"),
    )
}

fn criterion6(runs: &mut Runs) -> Outcome {
    let args = ["lz", "--model", MIXTURE, "--n", "262144", "--samples", "200", "--seed", "1", "--summary"];
    let rows = table(&runs.run(args.map(String::from).to_vec()));
    let acc = num(&rows[0], "classification_accuracy");
    outcome(acc >= 0.9, format!("accuracy {acc} over 200 samples"))
}

fn criterion7(config: &Config) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for n in [8, 10, 12, 14] {
        let s = max_coarse_scan(n, 0.0, config).expect("scan");
        let ok = s.violations == 0 && s.max <= s.bound + 1e-9 && s.c_scheme <= 24.0;
        pass &= ok;
        detail.push(format!("n={n} max {} bound {:.2} c {}", s.max, s.bound, s.c_scheme));
    }
    outcome(pass, detail.join("; "))
}

/// Stochastic runs, each repeated under another thread count for criterion 10.
struct Runs {
    dir: PathBuf,
    mismatches: Vec<String>,
    count: usize,
}

impl Runs {
    fn tmp(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn run(&mut self, args: Vec<String>) -> String {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = ecx(&[&a[..], &["--threads", "4"]].concat());
        let second = ecx(&[&a[..], &["--threads", "1"]].concat());
        self.count += 1;
        if first != second {
            self.mismatches.push(a.join(" "));
        }
        first
    }

    /// Like `run`, also comparing a file the command writes.
    fn run_with_file(&mut self, args: Vec<String>, file: &PathBuf) -> String {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = ecx(&[&a[..], &["--threads", "4"]].concat());
        let first_file = std::fs::read(file).unwrap();
        let second = ecx(&[&a[..], &["--threads", "1"]].concat());
        let second_file = std::fs::read(file).unwrap();
        self.count += 1;
        if first != second || first_file != second_file {
            self.mismatches.push(a.join(" "));
        }
        first
    }
}

fn criterion10(runs: &mut Runs) -> Outcome {
    runs.run(["gen", "--model", MIXTURE, "--n", "4096", "--seed", "9", "--count", "8"].map(String::from).to_vec());
    runs.run(
        ["ec", "--model", MARKOV, "--n", "2048", "--samples", "8", "--seed", "3", "--eps", "1/10", "--mode", "upper"]
            .map(String::from)
            .to_vec(),
    );
    outcome(
        runs.mismatches.is_empty(),
        format!("{} runs compared under --threads 4 and 1, mismatches {:?}", runs.count, runs.mismatches),
    )
}

fn main() {
    let config = Config::default();
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let mut runs = Runs { dir, mismatches: Vec::new(), count: 0 };

    let mut results: Vec<(u32, Outcome)> = Vec::new();
    let mut report = |k: u32, o: Outcome| {
        println!("criterion {k:>2} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((k, o));
    };
    report(1, criterion1());
    report(2, criterion2());
    report(3, criterion3(&mut runs));
    report(4, criterion4(&mut runs));
    report(5, criterion5(&mut runs));
    report(6, criterion6(&mut runs));
    report(7, criterion7(&config));
    report(8, suite(selftest::ec_invariants_suite(10, &config)));
    report(9, suite(selftest::oracle_suite(8, &config)));
    report(10, criterion10(&mut runs));

    let failed: Vec<u32> = results.iter().filter(|(_, o)| !o.pass).map(|(k, _)| *k).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", results.len());
    } else {
        println!("acceptance: failed {failed:?}");
        std::process::exit(1);
    }
}
