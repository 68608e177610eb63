//! The four subcommands. Each returns its artifacts, a short summary and
//! whether a verdict failed; nothing is written here.

use std::collections::BTreeMap;
use std::fmt::Write;

use baskakov::basis::OperatorParams;
use baskakov::moments::{
    constant_term_finding, fmt_num, summarize, verify_moments, write_moment_csv, ConstantTermFinding, MomentReport, Variant,
};
use baskakov::operators::{default_quadrature, eval_baseline, eval_t, Baseline};
use baskakov::smoothness::bounds::{required_ratio, LipStarSweep, SmoothSweep, WeightedSweep};
use baskakov::smoothness::{
    check_lip_star_bound, check_smooth_bound, check_weighted_bound, convergence_table, write_bound_csv, BoundCheckRecord,
    BoundTheorem, ConvergenceRow, FittedConstant, ShiftForm, WeightedSpaceParams, Window,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Triple};
use crate::error::CliError;
use crate::output::{csv, Artifact};
use crate::report;
use crate::svg::{render, Plot, Series};

#[derive(Debug)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub summary: String,
    pub failed: bool,
}

fn triple_label(t: &Triple) -> String {
    format!("a={}, alpha={}, beta={}", t.a, t.alpha, t.beta)
}

fn cell_label(n: u32, t: &Triple, x: Option<f64>) -> String {
    match x {
        Some(x) => format!("(n={n}, {}, x={x})", triple_label(t)),
        None => format!("(n={n}, {})", triple_label(t)),
    }
}

/// First error in grid order, so failures are reported deterministically.
fn in_order<T>(results: Vec<Result<T, CliError>>) -> Result<Vec<T>, CliError> {
    results.into_iter().collect()
}

fn params_for(n: u32, t: &Triple) -> Result<OperatorParams, CliError> {
    OperatorParams::new(n, t.a, t.alpha, t.beta).map_err(|e| CliError::from_core(cell_label(n, t, None), e))
}

fn baseline_for(name: &str, t: &Triple) -> Baseline {
    match name {
        "bernstein" => Baseline::Bernstein,
        "kantorovich" => Baseline::Kantorovich,
        "stancu" => Baseline::Stancu { alpha: t.alpha, beta: t.beta },
        "kantorovich_stancu" => Baseline::KantorovichStancu { alpha: t.alpha, beta: t.beta },
        _ => Baseline::BaskakovKantorovich { a: t.a },
    }
}

fn bytes_to_string(buf: Vec<u8>) -> String {
    String::from_utf8(buf).expect("CSV writers emit UTF-8")
}

fn fmt_ratio(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.4}")
    } else {
        "inf".into()
    }
}

pub fn eval(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let f = cfg.function();
    let quad = default_quadrature(f, &cfg.policy);
    let jobs: Vec<(Triple, u32, f64)> =
        cfg.triples.iter().flat_map(|t| cfg.ns.iter().flat_map(move |&n| cfg.xs.iter().map(move |&x| (*t, n, x)))).collect();
    let results: Vec<Result<f64, CliError>> = jobs
        .par_iter()
        .map(|&(t, n, x)| {
            let label = || cell_label(n, &t, Some(x));
            match &cfg.baseline {
                Some(name) => eval_baseline(baseline_for(name, &t), n, f, x, &cfg.policy, &quad)
                    .map_err(|e| CliError::from_core(label(), e)),
                None => {
                    let p = params_for(n, &t)?;
                    eval_t(&p, f, x, &cfg.policy, &quad).map_err(|e| CliError::from_core(label(), e))
                }
            }
        })
        .collect();
    let values = in_order(results)?;
    let operator = cfg.baseline.clone().unwrap_or_else(|| "T".into());

    let mut artifacts = Vec::new();
    if cfg.formats.csv {
        let rows = jobs.iter().zip(&values).map(|(&(t, n, x), &v)| {
            vec![fmt_num(x), n.to_string(), fmt_num(t.a), fmt_num(t.alpha), fmt_num(t.beta), fmt_num(v)]
        });
        artifacts.push(Artifact::new("eval.csv", csv("x,n,a,alpha,beta,value", rows)));
    }
    if cfg.formats.svg {
        let mut series = Vec::new();
        for t in &cfg.triples {
            for &n in &cfg.ns {
                let pts = jobs.iter().zip(&values).filter(|(j, _)| j.0 == *t && j.1 == n).map(|(j, &v)| (j.2, v)).collect();
                series.push(Series::new(format!("n={n} {}", triple_label(t)), pts));
            }
        }
        series.push(Series::new(format!("{} itself", f.name()), cfg.xs.iter().map(|&x| (x, f.eval(x))).collect()).dashed());
        let plot = Plot {
            title: format!("{operator}({}; x)", f.name()),
            x_label: "x".into(),
            y_label: "value".into(),
            log_x: false,
            log_y: false,
            series,
        };
        artifacts.push(Artifact::new("eval.svg", render(&plot)));
    }
    let max_dev = jobs.iter().zip(&values).map(|(j, v)| (v - f.eval(j.2)).abs()).fold(0.0, f64::max);
    let summary = format!(
        "eval: operator {operator}, function {}, {} cells, max |value - f(x)| = {}\n",
        f.name(),
        values.len(),
        fmt_num(max_dev)
    );
    if cfg.formats.report {
        let mut r = report::header("eval", cfg);
        r.push_str(&summary);
        r.push_str(&report::ledger());
        artifacts.push(Artifact::new("eval_report.txt", r));
    }
    Ok(Outcome { artifacts, summary, failed: false })
}

struct MomentRun {
    literal: Vec<MomentReport>,
    reconstructed: Vec<MomentReport>,
    finding: ConstantTermFinding,
}

pub fn verify(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut params = Vec::new();
    for t in &cfg.triples {
        for &n in &cfg.ns {
            params.push((params_for(n, t)?, *t));
        }
    }
    let results: Vec<Result<MomentRun, CliError>> = params
        .par_iter()
        .map(|(p, t)| {
            let wrap = |e| CliError::from_core(cell_label(p.n, t, None), e);
            Ok(MomentRun {
                literal: verify_moments(p, &cfg.xs, Variant::Literal, &cfg.policy).map_err(wrap)?,
                reconstructed: verify_moments(p, &cfg.xs, Variant::Reconstructed, &cfg.policy).map_err(wrap)?,
                finding: constant_term_finding(p, &cfg.policy).map_err(wrap)?,
            })
        })
        .collect();
    let runs = in_order(results)?;
    let literal: Vec<MomentReport> = runs.iter().flat_map(|r| r.literal.iter().cloned()).collect();
    let reconstructed: Vec<MomentReport> = runs.iter().flat_map(|r| r.reconstructed.iter().cloned()).collect();
    let (ls, rs) = (summarize(&literal), summarize(&reconstructed));
    let failed = rs.mismatches > 0;

    let mut summary = String::new();
    let _ = writeln!(summary, "verify-moments: {} parameter sets, {} x values", runs.len(), cfg.xs.len());
    let _ = writeln!(summary, "  literal:       {} match, {} mismatch", ls.matches, ls.mismatches);
    let _ = writeln!(summary, "  reconstructed: {} match, {} mismatch", rs.matches, rs.mismatches);

    let mut artifacts = Vec::new();
    if cfg.formats.csv {
        let mut buf = Vec::new();
        write_moment_csv(&mut buf, &literal)?;
        artifacts.push(Artifact::new("moments_literal.csv", bytes_to_string(buf)));
        let mut buf = Vec::new();
        write_moment_csv(&mut buf, &reconstructed)?;
        artifacts.push(Artifact::new("moments_reconstructed.csv", bytes_to_string(buf)));
    }
    if cfg.formats.svg {
        artifacts.push(Artifact::new("moments_rel_diff.svg", moment_plot(&literal, &reconstructed)));
    }
    if cfg.formats.report {
        let mut r = report::header("verify-moments", cfg);
        r.push_str(&summary);
        r.push('\n');
        r.push_str(&report::literal_findings(&literal));
        r.push('\n');
        r.push_str(&report::constant_term(&runs.iter().map(|r| r.finding).collect::<Vec<_>>()));
        if failed {
            r.push('\n');
            r.push_str(&report::reconstructed_failures(&reconstructed));
        }
        r.push('\n');
        r.push_str(&report::normalizations());
        r.push('\n');
        r.push_str(&report::ledger());
        artifacts.push(Artifact::new("moments_report.txt", r));
    }
    Ok(Outcome { artifacts, summary, failed })
}

/// Largest relative difference per `(variant, kind, order)` against `n`.
fn moment_plot(literal: &[MomentReport], reconstructed: &[MomentReport]) -> String {
    let mut groups: BTreeMap<(String, u32, &str), BTreeMap<u32, f64>> = BTreeMap::new();
    for (variant, reports) in [("literal", literal), ("reconstructed", reconstructed)] {
        for r in reports {
            let slot = groups.entry((r.kind.as_str().to_string(), r.order, variant)).or_default().entry(r.params.n).or_insert(0.0);
            // Exact agreement is drawn at the double-precision floor.
            *slot = slot.max(r.rel_diff.max(1e-17));
        }
    }
    let series = groups
        .into_iter()
        .filter(|((_, order, _), _)| *order > 0)
        .map(|((kind, order, variant), pts)| {
            let s = Series::new(format!("{variant} {kind} {order}"), pts.into_iter().map(|(n, v)| (f64::from(n), v)).collect());
            if variant == "literal" {
                s
            } else {
                s.dashed()
            }
        })
        .collect();
    render(&Plot {
        title: "closed form vs brute force: max relative difference".into(),
        x_label: "n".into(),
        y_label: "relative difference".into(),
        log_x: true,
        log_y: true,
        series,
    })
}

enum Sweep {
    Smooth(SmoothSweep),
    LipStar(LipStarSweep),
    Weighted(WeightedSweep),
}

impl Sweep {
    fn records(&self) -> &[BoundCheckRecord] {
        match self {
            Sweep::Smooth(s) => &s.records,
            Sweep::LipStar(s) => &s.records,
            Sweep::Weighted(s) => &s.records,
        }
    }

    fn constants(&self) -> &[FittedConstant] {
        match self {
            Sweep::Smooth(s) => &s.constants,
            Sweep::LipStar(s) => &s.constants,
            Sweep::Weighted(s) => &s.constants,
        }
    }

    fn stability_ratio(&self) -> f64 {
        match self {
            Sweep::Smooth(s) => s.stability_ratio,
            Sweep::LipStar(s) => s.stability_ratio,
            Sweep::Weighted(s) => s.stability_ratio,
        }
    }
}

pub fn check_bounds(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let f = cfg.function();
    let theorem = cfg.theorem.expect("check-bounds resolves a theorem");
    let window = Window::default();
    let mut sweeps = Vec::with_capacity(cfg.triples.len());
    for t in &cfg.triples {
        let label = format!("({}, {} sweep over n = {:?})", triple_label(t), theorem.label(), cfg.ns);
        let wrap = |e| CliError::from_core(label.clone(), e);
        let sweep = match theorem {
            BoundTheorem::Smooth => {
                Sweep::Smooth(check_smooth_bound(f, t.a, t.alpha, t.beta, &cfg.ns, &cfg.xs, &window, &cfg.policy).map_err(wrap)?)
            }
            BoundTheorem::LipStar => {
                Sweep::LipStar(check_lip_star_bound(f, t.a, t.alpha, t.beta, &cfg.ns, &cfg.xs, &cfg.policy).map_err(wrap)?)
            }
            BoundTheorem::Weighted => {
                Sweep::Weighted(check_weighted_bound(f, t.a, t.alpha, t.beta, &cfg.ns, &cfg.xs, &window, &cfg.policy).map_err(wrap)?)
            }
        };
        sweeps.push((*t, sweep));
    }
    let records: Vec<BoundCheckRecord> = sweeps.iter().flat_map(|(_, s)| s.records().iter().copied()).collect();
    let violations = records.iter().filter(|r| !r.holds).count();

    let mut summary = String::new();
    let _ = writeln!(summary, "check-bounds {} on {}: {} records, {} violations", theorem.label(), f.name(), records.len(), violations);
    for (t, s) in &sweeps {
        let _ = writeln!(
            summary,
            "  {}: fitted constant {} (max/min over n = {})",
            triple_label(t),
            fmt_num(s.constants().last().map_or(f64::NAN, |c| c.fitted)),
            fmt_ratio(s.stability_ratio())
        );
    }

    let mut artifacts = Vec::new();
    if cfg.formats.csv {
        let mut buf = Vec::new();
        write_bound_csv(&mut buf, &records)?;
        artifacts.push(Artifact::new("bounds.csv", bytes_to_string(buf)));
        let rows = sweeps.iter().flat_map(|(t, s)| {
            s.constants().iter().map(move |c| {
                vec![theorem.label().to_string(), c.n.to_string(), fmt_num(t.a), fmt_num(t.alpha), fmt_num(t.beta), fmt_num(c.required), fmt_num(c.fitted)]
            })
        });
        artifacts.push(Artifact::new("bound_constants.csv", csv("theorem,n,a,alpha,beta,required,fitted", rows)));
    }
    if cfg.formats.svg {
        artifacts.push(Artifact::new("bounds.svg", bound_plot(theorem, f.name(), &records, &cfg.xs)));
    }
    if cfg.formats.report {
        let mut r = report::header("check-bounds", cfg);
        r.push_str(&summary);
        for (t, s) in &sweeps {
            r.push('\n');
            let _ = writeln!(r, "parameters {}", triple_label(t));
            r.push_str(&report::constants_table(s.constants(), required_ratio(s.constants())));
            match s {
                Sweep::Smooth(sw) => r.push_str(&smooth_details(sw)),
                Sweep::LipStar(sw) => r.push_str(&lip_star_details(sw, &cfg.xs)),
                Sweep::Weighted(sw) => r.push_str(&weighted_details(sw)),
            }
        }
        let failing: Vec<&BoundCheckRecord> = records.iter().filter(|r| !r.holds).collect();
        if !failing.is_empty() {
            r.push_str("\nviolations\n");
            for rec in failing {
                let _ = writeln!(
                    r,
                    "  n={} x={} error={} bound={}",
                    rec.params.n,
                    rec.x,
                    fmt_num(rec.empirical_error),
                    fmt_num(rec.theoretical_bound)
                );
            }
        }
        r.push('\n');
        r.push_str(&report::ledger());
        artifacts.push(Artifact::new("bounds_report.txt", r));
    }
    Ok(Outcome { artifacts, summary, failed: violations > 0 })
}

fn smooth_details(sw: &SmoothSweep) -> String {
    let mut s = String::from("  second-order scale and shift forms\n");
    let _ = writeln!(s, "  {:>6} {:>8} {:>24} {:>24} {:>24} {:>24}", "n", "x", "gamma published", "gamma psi2+shift^2", "K statement", "K proof");
    for c in &sw.cells {
        let _ = writeln!(
            s,
            "  {:>6} {:>8} {:>24} {:>24} {:>24} {:>24}",
            c.params.n,
            c.x,
            fmt_num(c.gamma_literal),
            fmt_num(c.gamma_reconstructed),
            fmt_num(c.k_with_omega(ShiftForm::Statement)),
            fmt_num(c.k_with_omega(ShiftForm::Proof))
        );
    }
    let mut needed = Vec::new();
    for form in [ShiftForm::Statement, ShiftForm::Proof] {
        let max = sw.cells.iter().map(|c| c.k_with_omega(form)).fold(0.0, f64::max);
        let _ = writeln!(s, "  {} shift: largest K needed after crediting the first-modulus term = {}", form.as_str(), fmt_num(max));
        needed.push((form, max));
    }
    let verdict = match (needed[0].1 == 0.0, needed[1].1 == 0.0) {
        (true, true) => "both shift forms absorb the error through the first-modulus term alone".to_string(),
        (true, false) => "only the statement shift absorbs the error without a second-modulus term".to_string(),
        (false, true) => "only the proof shift absorbs the error without a second-modulus term".to_string(),
        (false, false) => {
            let (form, _) = if needed[0].1 <= needed[1].1 { needed[0] } else { needed[1] };
            format!("the {} shift needs the smaller second-modulus constant", form.as_str())
        }
    };
    let _ = writeln!(s, "  verdict: {verdict}");
    s
}

fn lip_star_details(sw: &LipStarSweep, xs: &[f64]) -> String {
    let mut s = format!(
        "  certificate: M = {}, exponent = {}\n",
        fmt_num(sw.certificate.constant),
        fmt_num(sw.certificate.exponent)
    );
    for &x in xs {
        let scaled: Vec<String> = sw.scaled_errors_at(x).iter().map(|(n, v)| format!("n={n}: {}", fmt_num(*v))).collect();
        let _ = writeln!(s, "  error*sqrt(n) at x={x}: {}", scaled.join(", "));
    }
    s
}

fn weighted_details(sw: &WeightedSweep) -> String {
    let mut s = String::from("  sup_x |T f - f|/(1+x^2)^3 against the weighted modulus at (n+beta)^(-1/2)\n");
    for &(n, lhs, omega) in &sw.sides {
        let _ = writeln!(s, "  n={n}: lhs={} omega={}", fmt_num(lhs), fmt_num(omega));
    }
    s
}

fn bound_plot(theorem: BoundTheorem, name: &str, records: &[BoundCheckRecord], xs: &[f64]) -> String {
    let mut series = Vec::new();
    // At most four x values keep the legend readable.
    let stride = xs.len().div_ceil(4).max(1);
    for &x in xs.iter().step_by(stride) {
        let at_x: Vec<&BoundCheckRecord> = records.iter().filter(|r| r.x == x).collect();
        series.push(Series::new(format!("error x={x}"), at_x.iter().map(|r| (f64::from(r.params.n), r.empirical_error)).collect()));
        series.push(
            Series::new(format!("bound x={x}"), at_x.iter().map(|r| (f64::from(r.params.n), r.theoretical_bound)).collect()).dashed(),
        );
    }
    render(&Plot {
        title: format!("{} bound vs error for {name}", theorem.label()),
        x_label: "n".into(),
        y_label: "|T f - f|".into(),
        log_x: true,
        log_y: true,
        series,
    })
}

/// Required drop of the weighted norm from the first to the last `n`.
const DECAY_FACTOR: f64 = 1e-3;

pub fn converge(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let space = WeightedSpaceParams::new(cfg.x_spec.1, cfg.x_spec.2).map_err(|e| CliError::Config(e.to_string()))?;
    let results: Vec<Result<Vec<ConvergenceRow>, CliError>> = cfg
        .triples
        .par_iter()
        .map(|t| {
            convergence_table(t.a, t.alpha, t.beta, &cfg.ns, &space)
                .map_err(|e| CliError::from_core(format!("({}, n = {:?})", triple_label(t), cfg.ns), e))
        })
        .collect();
    let tables = in_order(results)?;
    let slope_text = |row: &ConvergenceRow| match row.slope {
        Some(v) => fmt_num(v),
        None if row.norms.iter().all(|&(_, v)| v == 0.0) => "exact-zero".to_string(),
        None => "undefined".to_string(),
    };

    let mut summary = String::from("converge: log-log slope of the weighted error per test function\n");
    for (t, rows) in cfg.triples.iter().zip(&tables) {
        for row in rows {
            let d = row.decay(DECAY_FACTOR);
            let _ = writeln!(
                summary,
                "  {} i={}: slope {}, last/first {} ({}, {})",
                triple_label(t),
                row.i,
                slope_text(row),
                fmt_num(d.ratio),
                if d.monotone { "monotone" } else { "not monotone" },
                if d.passes { "decays below 1e-3 of the first norm" } else { "does not reach 1e-3 of the first norm" }
            );
        }
    }

    let mut artifacts = Vec::new();
    if cfg.formats.csv {
        let rows = cfg.triples.iter().zip(&tables).flat_map(|(t, rows)| {
            rows.iter().flat_map(move |row| {
                row.norms.iter().map(move |&(n, v)| {
                    vec![row.i.to_string(), n.to_string(), fmt_num(t.a), fmt_num(t.alpha), fmt_num(t.beta), fmt_num(v)]
                })
            })
        });
        artifacts.push(Artifact::new("converge.csv", csv("i,n,a,alpha,beta,norm", rows)));
        let rows = cfg.triples.iter().zip(&tables).flat_map(|(t, rows)| {
            rows.iter().map(move |row| vec![row.i.to_string(), fmt_num(t.a), fmt_num(t.alpha), fmt_num(t.beta), slope_text(row)])
        });
        artifacts.push(Artifact::new("converge_slopes.csv", csv("i,a,alpha,beta,slope", rows)));
    }
    if cfg.formats.svg {
        let mut series = Vec::new();
        for (t, rows) in cfg.triples.iter().zip(&tables) {
            for row in rows.iter().filter(|r| r.norms.iter().any(|&(_, v)| v > 0.0)) {
                series.push(Series::new(
                    format!("i={} {}", row.i, triple_label(t)),
                    row.norms.iter().map(|&(n, v)| (f64::from(n), v)).collect(),
                ));
            }
        }
        artifacts.push(Artifact::new(
            "converge.svg",
            render(&Plot {
                title: "weighted error of T(t^i) - x^i".into(),
                x_label: "n".into(),
                y_label: "weighted sup norm".into(),
                log_x: true,
                log_y: true,
                series,
            }),
        ));
    }
    if cfg.formats.report {
        let mut r = report::header("converge", cfg);
        r.push_str(&summary);
        r.push_str("\nnorms\n");
        for (t, rows) in cfg.triples.iter().zip(&tables) {
            for row in rows {
                for &(n, v) in &row.norms {
                    let _ = writeln!(r, "  {} i={} n={n}: {}", triple_label(t), row.i, fmt_num(v));
                }
            }
        }
        r.push('\n');
        r.push_str(&report::ledger());
        artifacts.push(Artifact::new("converge_report.txt", r));
    }
    Ok(Outcome { artifacts, summary, failed: false })
}
