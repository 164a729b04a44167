//! `qgroupoid`: verify finite quantum groupoid constructions from JSON
//! inputs.
//!
//! Exit codes: 0 when every check passes, 1 when a residual reaches the
//! tolerance or a construction fails, 2 on unreadable or malformed input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qgroupoid::action::{self, DeltaAction, GroupoidAction};
use qgroupoid::io::{self, IoError};
use qgroupoid::linop::{Vector, C64};
use qgroupoid::mpi::{self, Mpi};
use qgroupoid::wha::{self, WeakHopf};
use qgroupoid::{Groupoid, MatchPair, Report, Side};

#[derive(Parser)]
#[command(name = "qgroupoid", version, about = "Verify finite quantum groupoid constructions")]
struct Cli {
    /// Residual tolerance for every check
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = positive_tol)]
    tol: f64,

    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Largest carrier dimension for which the pentagon relation is checked
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..))]
    max_pentagon_dim: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

#[derive(Subcommand)]
enum Command {
    /// Check the multiplicative partial isometry of a groupoid or match pair
    VerifyMpi {
        groupoid: PathBuf,
        match_pair: Option<PathBuf>,
    },
    /// Extract and verify a weak Hopf structure; the JSON result is its export
    Wha(StructureArgs),
    /// Solve for the Haar measure and its conditional expectations
    Haar(StructureArgs),
    /// Build the crossed product of an action and run its checks
    CrossedProduct { action: PathBuf },
    /// Decide whether an action is outer
    OuterTest { action: PathBuf },
    /// Compare the mpi structure maps of a match pair with the cell formulas
    Matchpair { groupoid: PathBuf, match_pair: PathBuf },
}

#[derive(Args)]
struct StructureArgs {
    /// Groupoid file (omit with --load)
    groupoid: Option<PathBuf>,
    /// Match pair file; the structure then comes from its mpi
    match_pair: Option<PathBuf>,
    /// Leg of the mpi to extract
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    side: SideArg,
    /// Use the closed-form function algebra (left) or group algebra (right)
    /// of the groupoid instead of extracting it
    #[arg(long, conflicts_with = "match_pair")]
    oracle: bool,
    /// Read a weak Hopf export instead of building one
    #[arg(long, conflicts_with_all = ["groupoid", "match_pair", "oracle"])]
    load: Option<PathBuf>,
    /// Write the weak Hopf export to this path
    #[arg(long)]
    export: Option<PathBuf>,
}

fn positive_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(format!("tolerance must be a positive number, got {s}")),
    }
}

/// Failure of a run, split by exit code.
enum Failure {
    Input(String),
    Check(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn check_err(e: impl std::fmt::Display) -> Failure {
    Failure::Check(e.to_string())
}

/// One command's report plus its command-specific result.
struct Outcome {
    report: Report,
    result: Value,
    summary: Vec<String>,
}

struct Ctx {
    tol: f64,
    max_pd: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx { tol: cli.tol, max_pd: cli.max_pentagon_dim as usize };
    let (name, run) = match &cli.command {
        Command::VerifyMpi { groupoid, match_pair } => ("verify-mpi", cmd_verify_mpi(&ctx, groupoid, match_pair.as_deref())),
        Command::Wha(a) => ("wha", cmd_wha(&ctx, a)),
        Command::Haar(a) => ("haar", cmd_haar(&ctx, a)),
        Command::CrossedProduct { action } => ("crossed-product", cmd_crossed(&ctx, action)),
        Command::OuterTest { action } => ("outer-test", cmd_outer(&ctx, action)),
        Command::Matchpair { groupoid, match_pair } => ("matchpair", cmd_matchpair(&ctx, groupoid, match_pair)),
    };
    match run {
        Ok(mut out) => {
            out.report.retol(ctx.tol);
            let report = out.report.sorted();
            let pass = report.passed();
            match cli.format {
                Format::Text => {
                    print!("{}", report.to_text());
                    for line in &out.summary {
                        println!("{line}");
                    }
                }
                Format::Json => {
                    let doc = json!({
                        "command": name,
                        "title": report.title,
                        "tol": report.tol,
                        "pass": pass,
                        "max_residual": finite_or_null(report.max_residual()),
                        "checks": report.checks.iter().map(|c| json!({
                            "axiom": c.axiom,
                            "residual": finite_or_null(c.residual),
                            "pass": c.pass,
                        })).collect::<Vec<_>>(),
                        "observations": report.observations.iter().map(|o| json!({
                            "name": o.name,
                            "value": o.value,
                        })).collect::<Vec<_>>(),
                        "result": out.result,
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
                }
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Check(msg)) => {
            emit_error(cli.format, name, "check", &msg);
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            emit_error(cli.format, name, "input", &msg);
            ExitCode::from(2)
        }
    }
}

fn emit_error(format: Format, name: &str, kind: &str, msg: &str) {
    match format {
        Format::Text => eprintln!("error ({kind}): {msg}"),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({ "command": name, "pass": false, "error": { "kind": kind, "message": msg } }))
                .expect("error serializes")
        ),
    }
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// Rounds away last-digit noise so printed values are stable.
fn fmt_real(x: f64) -> String {
    let r = (x * 1e12).round() / 1e12;
    format!("{}", if r == 0.0 { 0.0 } else { r })
}

fn fmt_scalar(z: C64) -> String {
    if z.im.abs() < 1e-12 {
        fmt_real(z.re)
    } else {
        format!("{}{}{}i", fmt_real(z.re), if z.im < 0.0 { "-" } else { "+" }, fmt_real(z.im.abs()))
    }
}

fn fmt_vector(v: &Vector) -> String {
    format!("[{}]", v.iter().map(|&z| fmt_scalar(z)).collect::<Vec<_>>().join(", "))
}

fn vector_json(v: &Vector) -> Value {
    json!(v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

fn load_groupoid(path: &Path) -> Result<Groupoid, Failure> {
    Ok(io::read_groupoid(path)?)
}

fn load_mpi(groupoid: &Path, match_pair: Option<&Path>) -> Result<(Mpi, Option<MatchPair>), Failure> {
    let g = load_groupoid(groupoid)?;
    match match_pair {
        Some(p) => {
            let mp = io::read_match_pair(&g, p)?;
            Ok((mpi::build_i_hk(&mp), Some(mp)))
        }
        None => Ok((mpi::build_i_g(&g), None)),
    }
}

fn cmd_verify_mpi(ctx: &Ctx, groupoid: &Path, match_pair: Option<&Path>) -> Result<Outcome, Failure> {
    let (i, mp) = load_mpi(groupoid, match_pair)?;
    let mut report = Report::new(format!("multiplicative partial isometry on C^{}", i.n));
    if let Some(mp) = &mp {
        for (name, ok) in mp.lemma_checks() {
            report.assert(format!("match_pair.{name}"), ok);
        }
    }
    report.absorb("axioms", mpi::verify_mpi(&i, ctx.max_pd));
    report.absorb("regularity", mpi::is_regular(&i).1);
    report.absorb("four_corners", mpi::four_corners(&i));
    let result = json!({ "dim_h": i.n, "kind": if mp.is_some() { "match_pair" } else { "groupoid" } });
    Ok(Outcome { report, result, summary: Vec::new() })
}

fn side_of(a: &StructureArgs) -> Side {
    match a.side {
        SideArg::Left => Side::Left,
        SideArg::Right => Side::Right,
    }
}

fn load_structure(a: &StructureArgs) -> Result<WeakHopf, Failure> {
    if let Some(p) = &a.load {
        return Ok(io::read_weak_hopf(p)?);
    }
    let Some(gp) = &a.groupoid else {
        return Err(Failure::Input("a groupoid file or --load is required".into()));
    };
    if a.oracle {
        let g = load_groupoid(gp)?;
        return Ok(match side_of(a) {
            Side::Left => wha::commutative_oracle(&g),
            Side::Right => wha::group_algebra_oracle(&g),
        });
    }
    let (i, _) = load_mpi(gp, a.match_pair.as_deref())?;
    wha::extract_wha(&i, side_of(a)).map_err(check_err)
}

fn write_export(a: &StructureArgs, w: &WeakHopf) -> Result<Value, Failure> {
    let export = serde_json::to_value(io::export_weak_hopf(w)).expect("export serializes");
    if let Some(p) = &a.export {
        let text = serde_json::to_string_pretty(&export).expect("export serializes");
        std::fs::write(p, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(export)
}

fn cmd_wha(_ctx: &Ctx, a: &StructureArgs) -> Result<Outcome, Failure> {
    let w = load_structure(a)?;
    let report = wha::verify_weak_hopf(&w);
    let result = write_export(a, &w)?;
    Ok(Outcome { report, result, summary: Vec::new() })
}

fn cmd_haar(_ctx: &Ctx, a: &StructureArgs) -> Result<Outcome, Failure> {
    let w = load_structure(a)?;
    let mut report = Report::new(format!("Haar measure of a weak Hopf C*-algebra of dimension {}", w.d()));
    report.absorb("structure", wha::verify_weak_hopf(&w));
    let h = wha::haar_solve(&w).map_err(check_err)?;
    report.check("haar.residual", h.residual);
    report.assert("haar.unique", h.rank == w.d());
    report.assert("haar.faithful", h.gram_min > 0.0);
    report.observe("haar.gram_min", format!("{:.6e}", h.gram_min));
    report.observe("haar.invariant_dim", h.invariant_dim);
    let derived = wha::haar_derived(&w, &h.phi).map_err(check_err)?;
    report.absorb("derived", derived.report.clone());
    let with_haar = WeakHopf { haar: Some(h.phi.clone()), ..w.clone() };
    write_export(a, &with_haar)?;
    let summary = vec![
        format!("φ = {}", fmt_vector(&h.phi)),
        format!("basis = [{}]", w.labels.join(", ")),
        format!("g_s = {}", fmt_vector(&derived.g_s)),
        format!("g_t = {}", fmt_vector(&derived.g_t)),
    ];
    let result = json!({
        "labels": w.labels,
        "phi": vector_json(&h.phi),
        "rank": h.rank,
        "g_s": vector_json(&derived.g_s),
        "g_t": vector_json(&derived.g_t),
    });
    Ok(Outcome { report, result, summary })
}

fn load_action(path: &Path) -> Result<GroupoidAction, Failure> {
    Ok(io::read_action(path)?)
}

/// Validation first, so a broken action yields a report instead of an
/// error.
fn validated(act: &GroupoidAction, title: String) -> (Report, bool) {
    let mut report = Report::new(title);
    let valid = action::validate_action(act);
    let ok = valid.passed();
    report.absorb("action", valid);
    (report, ok)
}

fn cmd_crossed(_ctx: &Ctx, path: &Path) -> Result<Outcome, Failure> {
    let act = load_action(path)?;
    let expected: usize = (0..act.n()).map(|h| act.module.fiber_dim(act.tgt_index(h))).sum();
    let (mut report, ok) = validated(&act, format!("crossed product of an action on an algebra of dimension {}", act.module.dim()));
    if !ok {
        return Ok(Outcome { report, result: json!({ "expected_dim": expected }), summary: Vec::new() });
    }
    report.absorb("delta", DeltaAction::new(&act).verify());
    let (_, fixed) = action::fixed_points(&act);
    report.absorb("fixed_points", fixed);
    let (_, t) = action::t_delta(&act).map_err(check_err)?;
    report.absorb("t_delta", t);
    let (_, u) = action::implementing_unitary(&act).map_err(check_err)?;
    report.absorb("implementing_unitary", u);
    let cp = action::crossed_product(&act).map_err(check_err)?;
    report.absorb("crossed", cp.report.clone());
    let dual = action::dual_coaction(&cp).map_err(check_err)?;
    report.absorb("dual_coaction", dual.report.clone());
    let (dc, dc_report) = action::double_crossed(&cp).map_err(check_err)?;
    report.absorb("double_crossed", dc_report);
    let summary = vec![
        format!("crossed product dimension = {} (expected {expected})", cp.dim()),
        format!("double crossed product dimension = {}", dc.dim()),
    ];
    let result = json!({ "dim": cp.dim(), "expected_dim": expected, "double_crossed_dim": dc.dim() });
    Ok(Outcome { report, result, summary })
}

fn cmd_outer(_ctx: &Ctx, path: &Path) -> Result<Outcome, Failure> {
    let act = load_action(path)?;
    let (mut report, ok) = validated(&act, "outerness of an action".to_string());
    if !ok {
        return Ok(Outcome { report, result: Value::Null, summary: Vec::new() });
    }
    let cp = action::crossed_product(&act).map_err(check_err)?;
    let v = action::outer_test(&cp).map_err(check_err)?;
    report.absorb("outer", v.report.clone());
    let verdict = if v.outer { "outer" } else { "not outer" };
    let mut summary = vec![
        format!("verdict: {verdict}"),
        format!("relative commutant dimension = {} (reference {})", v.relative_commutant_dim, v.reference_dim),
    ];
    for (h, x) in &v.witnesses {
        summary.push(format!("witness x^{} = {}", act.groupoid.name(*h), fmt_vector(x)));
    }
    let result = json!({
        "verdict": verdict,
        "outer": v.outer,
        "outer_combinatorial": v.outer_combinatorial,
        "relative_commutant_dim": v.relative_commutant_dim,
        "reference_dim": v.reference_dim,
        "witnesses": v.witnesses.iter().map(|(h, x)| json!({
            "element": act.groupoid.name(*h),
            "x": vector_json(x),
        })).collect::<Vec<_>>(),
    });
    Ok(Outcome { report, result, summary })
}

fn cmd_matchpair(ctx: &Ctx, groupoid: &Path, match_pair: &Path) -> Result<Outcome, Failure> {
    let g = load_groupoid(groupoid)?;
    let mp = io::read_match_pair(&g, match_pair)?;
    let s = action::matchpair_structures(&mp, ctx.max_pd).map_err(check_err)?;
    let mut report = s.report.clone();
    report.retol(ctx.tol);
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    let summary = vec![format!("match pair structure maps: {verdict} (max residual {:.3e})", report.max_residual())];
    let result = json!({ "cells": s.cells.len(), "verdict": verdict });
    Ok(Outcome { report, result, summary })
}
