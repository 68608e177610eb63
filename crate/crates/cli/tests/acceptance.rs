//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when the set of failing checks differs from the known one.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use baskakov::basis::{basis_weights, OperatorParams, SeriesPolicy};
use baskakov::function::{by_name, catalog};
use baskakov::moments::{closed_form, exact, fourth_moment_bound, oracle_moment, FourthMomentCoefficients, MomentKind, Variant};
use baskakov::smoothness::bounds::required_ratio;
use baskakov::smoothness::moduli::REFINE_TOL;
use baskakov::smoothness::{
    check_algebraic_inequality, check_lip_star_bound, check_modulus_decay, check_scaling_inequality, check_smooth_bound,
    check_weighted_bound, convergence_table, weighted_modulus, Window, WeightedSpaceParams,
};

const NS: [u32; 4] = [1, 5, 10, 100];
const AS: [f64; 3] = [0.0, 1.0, 2.0];
const SHIFTS: [(f64, f64); 2] = [(0.0, 0.0), (1.0, 2.0)];
const XS: [f64; 4] = [0.0, 1.0, 5.0, 10.0];
const SWEEP_TRIPLES: [(f64, f64, f64); 2] = [(0.0, 0.0, 0.0), (1.0, 1.0, 2.0)];
const STABILITY_LIMIT: f64 = 4.0;

/// The one check expected to fail: `Ω(√t; 1e-4) ≈ 0.01` against
/// `0.01·Ω(√t; 1) ≈ 0.0057`, since a Hölder-1/2 modulus decays like `√δ`.
const EXPECTED_FAILURES: [(u8, &str); 1] = [(9, "decay sqrt")];

struct Outcome {
    failures: Vec<String>,
    detail: String,
}

fn grid() -> Vec<(OperatorParams, f64)> {
    let mut out = Vec::new();
    for n in NS {
        for a in AS {
            for (alpha, beta) in SHIFTS {
                let p = OperatorParams::new(n, a, alpha, beta).unwrap();
                out.extend(XS.iter().map(|&x| (p, x)));
            }
        }
    }
    out
}

fn label(p: &OperatorParams, x: f64) -> String {
    format!("n={} a={} alpha={} beta={} x={x}", p.n, p.a, p.alpha, p.beta)
}

fn partition_of_unity() -> Outcome {
    let policy = SeriesPolicy::default();
    let cells = grid();
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    for (p, x) in &cells {
        let mass: f64 = basis_weights(p, *x, &policy).unwrap().weights.iter().sum();
        worst = worst.max((mass - 1.0).abs());
        if (mass - 1.0).abs() > 1e-12 {
            failures.push(label(p, *x));
        }
    }
    Outcome { failures, detail: format!("{} cells, max |sum - 1| = {worst:.2e}", cells.len()) }
}

fn moment_oracle_equivalence() -> Outcome {
    let policy = SeriesPolicy::oracle();
    let mut failures = Vec::new();
    let (mut checked, mut worst) = (0, 0.0_f64);
    for (p, x) in grid() {
        for kind in MomentKind::ALL {
            for &order in kind.orders() {
                let closed = closed_form(Variant::Reconstructed, kind, &p, order, x).unwrap();
                let oracle = oracle_moment(kind, &p, order, x, &policy).unwrap();
                let diff = (closed - oracle).abs();
                let rel = if oracle == 0.0 { f64::INFINITY } else { diff / oracle.abs() };
                checked += 1;
                if diff > 1e-15 {
                    worst = worst.max(rel);
                }
                if rel > 1e-9 && diff > 1e-15 {
                    failures.push(format!("{} {kind} order {order}", label(&p, x)));
                }
            }
        }
    }
    Outcome { failures, detail: format!("{checked} moments, max relative difference {worst:.2e} (absolute floor 1e-15)") }
}

fn classical_literal() -> Outcome {
    let policy = SeriesPolicy::oracle();
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in [5, 10, 100] {
        let p = OperatorParams::new(n, 0.0, 0.0, 0.0).unwrap();
        for x in [0.0, 1.0, 2.0, 5.0] {
            for kind in MomentKind::ALL {
                for &order in kind.orders().iter().filter(|&&m| m <= 2) {
                    let literal = closed_form(Variant::Literal, kind, &p, order, x).unwrap();
                    let oracle = oracle_moment(kind, &p, order, x, &policy).unwrap();
                    checked += 1;
                    if (literal - oracle).abs() > 1e-10 * oracle.abs().max(1.0) {
                        failures.push(format!("{} {kind} order {order}", label(&p, x)));
                    }
                }
            }
        }
    }
    Outcome { failures, detail: format!("{checked} literal moments of order 0 to 2") }
}

fn run_cli(args: &[&str], out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_baskakov"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .expect("spawn baskakov")
        .status
        .code()
        .unwrap_or(-1)
}

fn constant_term_resolution() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let code = run_cli(&["verify-moments", "--a", "1", "--alpha", "1", "--beta", "2"], dir.path());
    let report = fs::read_to_string(dir.path().join("moments_report.txt")).unwrap_or_default();
    let mut failures = Vec::new();
    if code != 0 {
        failures.push(format!("exit code {code}"));
    }
    if !report.contains("resolved: the oracle matches (3 alpha^2 + 3 alpha + 1)/(3 N^2)") {
        failures.push("constant term not resolved".into());
    }
    let gap = report.lines().find(|l| l.contains("low by alpha/N^2")).map(str::trim);
    if gap.is_none() {
        failures.push("gap not quantified".into());
    }
    Outcome { failures, detail: format!("exit {code}; {}", gap.unwrap_or("no gap line")) }
}

fn fourth_moment_dominance() -> Outcome {
    let policy = SeriesPolicy::oracle();
    let mut failures = Vec::new();
    let mut tightest = f64::INFINITY;
    for (p, x) in grid().into_iter().filter(|(p, _)| p.n >= 5) {
        let psi4 = oracle_moment(MomentKind::CentralT, &p, 4, x, &policy).unwrap();
        let (bound, _) = fourth_moment_bound(&p, x);
        tightest = tightest.min(bound - psi4);
        if bound < psi4 {
            failures.push(format!("{} bound", label(&p, x)));
        }
    }
    for n in [10, 100, 1000] {
        for a in AS {
            for (alpha, beta) in SHIFTS {
                let p = OperatorParams::new(n, a, alpha, beta).unwrap();
                let m = FourthMomentCoefficients::new(&p).bound_constant;
                for x in XS {
                    let scaled = exact::central_moment_t(&p, 4, x).unwrap() * p.denom().powi(2);
                    let poly = x.powi(4) + x.powi(3) + x * x + x + 1.0;
                    if scaled > m * poly {
                        failures.push(format!("{} scaled", label(&p, x)));
                    }
                }
            }
        }
    }
    Outcome { failures, detail: format!("smallest margin bound - psi4 = {tightest:.3e}") }
}

fn smooth_sweep() -> Outcome {
    let (policy, window) = (SeriesPolicy::default(), Window::default());
    let mut failures = Vec::new();
    let mut ratios = Vec::new();
    for name in ["exp_neg", "sin", "t2"] {
        let f = by_name(name).unwrap();
        for (a, alpha, beta) in SWEEP_TRIPLES {
            let sweep = check_smooth_bound(&f, a, alpha, beta, &[10, 20, 40, 80, 160], &[0.5, 1.0, 2.0], &window, &policy).unwrap();
            let held = sweep.records.iter().filter(|r| r.holds).count();
            if held != sweep.records.len() || sweep.stability_ratio > STABILITY_LIMIT {
                failures.push(format!("{name} ({a},{alpha},{beta}): {held}/{} hold, ratio {}", sweep.records.len(), sweep.stability_ratio));
            }
            ratios.push(format!("{name}:{:.2}", sweep.stability_ratio));
        }
    }
    Outcome { failures, detail: format!("K max/min {}", ratios.join(" ")) }
}

fn lip_star_sweep() -> Outcome {
    let f = by_name("sqrt").unwrap();
    let sweep = check_lip_star_bound(&f, 0.0, 0.0, 0.0, &[10, 100, 1000], &[0.5, 1.0, 2.0], &SeriesPolicy::default()).unwrap();
    let mut failures = Vec::new();
    let held = sweep.records.iter().filter(|r| r.holds).count();
    if sweep.records.len() != 9 || held != 9 {
        failures.push(format!("{held} of {} cells hold", sweep.records.len()));
    }
    let scaled = sweep.scaled_errors_at(1.0);
    let values: Vec<f64> = scaled.iter().map(|s| s.1).collect();
    let non_increasing = values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let non_decreasing = values.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    let bounded = sweep
        .records
        .iter()
        .filter(|r| r.x == 1.0)
        .all(|r| r.empirical_error * f64::from(r.params.n).sqrt() <= r.theoretical_bound * f64::from(r.params.n).sqrt());
    if !(non_increasing || non_decreasing) || !bounded {
        failures.push("error*sqrt(n) at x=1 not monotone-bounded".into());
    }
    let shown: Vec<String> = scaled.iter().map(|(n, v)| format!("{n}:{v:.4e}")).collect();
    Outcome { failures, detail: format!("{held}/9 hold; error*sqrt(n) at x=1: {}", shown.join(" ")) }
}

fn korovkin_rates() -> Outcome {
    let space = WeightedSpaceParams::new(1000.0, 0.01).unwrap();
    let mut failures = Vec::new();
    let mut shown = Vec::new();
    for (a, alpha, beta) in SWEEP_TRIPLES {
        let rows = convergence_table(a, alpha, beta, &[100, 1000, 10_000], &space).unwrap();
        for row in rows {
            match (row.i, row.slope) {
                (0, None) => shown.push("i=0 zero".to_string()),
                (0, Some(s)) => failures.push(format!("i=0 not identically zero, slope {s}")),
                (i, Some(s)) => {
                    if (s + 1.0).abs() > 0.15 {
                        failures.push(format!("({a},{alpha},{beta}) i={i} slope {s}"));
                    }
                    shown.push(format!("i={i} {s:.3}"));
                }
                (i, None) => failures.push(format!("({a},{alpha},{beta}) i={i} slope undefined")),
            }
        }
    }
    Outcome { failures, detail: format!("slopes {}", shown.join(", ")) }
}

fn modulus_suite() -> Outcome {
    let window = Window::default();
    let deltas = [1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0];
    let mut failures = Vec::new();
    let mut decay = Vec::new();
    for f in catalog().into_iter().filter(|f| f.growth.within_rho()) {
        let profile: Vec<f64> = deltas.iter().map(|&d| weighted_modulus(&f, d, &window).unwrap().value).collect();
        // Independent estimates agree with the true modulus to the refinement tolerance.
        if !profile.windows(2).all(|w| w[1] >= w[0] * (1.0 - REFINE_TOL) - 1e-12) {
            failures.push(format!("monotone {}", f.name()));
        }
        let (lo, hi, ok) = check_modulus_decay(&f, 1e-4, &window).unwrap();
        if !ok {
            failures.push(format!("decay {}", f.name()));
            decay.push(format!("{} {lo:.3e}/{hi:.3e}", f.name()));
        }
        let scaling = check_scaling_inequality(&f, &[0.5, 1.0, 2.0, 5.0], &[0.01, 0.1, 1.0], &window).unwrap();
        if scaling.iter().any(|c| !c.holds) {
            failures.push(format!("scaling {}", f.name()));
        }
    }
    let worst = check_algebraic_inequality(100_000, 0x5eed);
    if worst > 1.0 {
        failures.push(format!("algebraic worst ratio {worst}"));
    }
    let decay = if decay.is_empty() { "none".to_string() } else { decay.join(", ") };
    Outcome { failures, detail: format!("algebraic worst ratio {worst:.4}; decay shortfalls: {decay}") }
}

fn weighted_sweep() -> Outcome {
    let (policy, window) = (SeriesPolicy::default(), Window::default());
    let xs: Vec<f64> = (0..=20).map(|i| 0.5 * f64::from(i)).collect();
    let mut failures = Vec::new();
    let mut shown = Vec::new();
    for name in ["t2", "sin"] {
        let f = by_name(name).unwrap();
        for (a, alpha, beta) in SWEEP_TRIPLES {
            let sweep = check_weighted_bound(&f, a, alpha, beta, &[10, 100, 1000], &xs, &window, &policy).unwrap();
            let held = sweep.records.iter().filter(|r| r.holds).count();
            if held != sweep.records.len() || sweep.stability_ratio > STABILITY_LIMIT {
                failures.push(format!("{name} ({a},{alpha},{beta}): {held}/{} hold, ratio {}", sweep.records.len(), sweep.stability_ratio));
            }
            let required = required_ratio(&sweep.constants);
            shown.push(format!("{name}:{:.2} (required {required:.2})", sweep.stability_ratio));
        }
    }
    Outcome { failures, detail: format!("M max/min {}", shown.join(" ")) }
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 6] = [
        &["eval", "--function", "sin", "--n-list", "10,100", "--a", "0,1", "--alpha", "1", "--beta", "2"],
        &["verify-moments", "--a", "1", "--alpha", "1", "--beta", "2"],
        &["check-bounds", "--theorem", "T3.1", "--function", "exp_neg"],
        &["check-bounds", "--theorem", "T3.2", "--function", "sqrt"],
        &["check-bounds", "--theorem", "T4.3", "--function", "sin"],
        &["converge", "--a", "1", "--alpha", "1", "--beta", "2"],
    ];
    let mut failures = Vec::new();
    let mut files = 0;
    for args in runs {
        let (first, second) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let codes = (run_cli(args, first.path()), run_cli(args, second.path()));
        let (a, b) = (csv_files(first.path()), csv_files(second.path()));
        files += a.len();
        if codes.0 != codes.1 || a.is_empty() || a != b {
            failures.push(format!("{}: runs differ", args.join(" ")));
        }
    }
    Outcome { failures, detail: format!("{files} CSV files compared across {} command pairs", runs.len()) }
}

fn main() {
    type Check = fn() -> Outcome;
    let criteria: [(u8, &str, Check, Option<u64>); 11] = [
        (1, "partition of unity", partition_of_unity, Some(10)),
        (2, "moment oracle equivalence", moment_oracle_equivalence, Some(60)),
        (3, "classical-case literal match", classical_literal, None),
        (4, "constant term resolved by verify-moments", constant_term_resolution, None),
        (5, "fourth moment dominance", fourth_moment_dominance, None),
        (6, "smooth-function bound sweep (T3.1)", smooth_sweep, Some(120)),
        (7, "Lipschitz-type bound sweep (T3.2)", lip_star_sweep, None),
        (8, "weighted convergence rates", korovkin_rates, None),
        (9, "weighted modulus properties", modulus_suite, None),
        (10, "weighted bound sweep (T4.3)", weighted_sweep, None),
        (11, "determinism", determinism, None),
    ];
    let expected: BTreeSet<(u8, String)> = EXPECTED_FAILURES.iter().map(|&(id, s)| (id, s.to_string())).collect();
    let mut observed = BTreeSet::new();
    for (id, title, check, limit) in criteria {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if let Some(secs) = limit {
            if elapsed > Duration::from_secs(secs) {
                outcome.failures.push(format!("runtime {:.1}s over {secs}s", elapsed.as_secs_f64()));
            }
        }
        let verdict = if outcome.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{verdict} [{id:>2}] {title} ({:.2}s): {}", elapsed.as_secs_f64(), outcome.detail);
        for f in &outcome.failures {
            let known = if expected.contains(&(id, f.clone())) { " (known)" } else { "" };
            println!("       failing: {f}{known}");
            observed.insert((id, f.clone()));
        }
    }
    if observed != expected {
        let unexpected: Vec<_> = observed.difference(&expected).collect();
        let missing: Vec<_> = expected.difference(&observed).collect();
        eprintln!("unexpected failures: {unexpected:?}; expected failures that passed: {missing:?}");
        std::process::exit(1);
    }
    println!("acceptance: all criteria as expected ({} known failure)", expected.len());
}
