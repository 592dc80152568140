//! Command-line front end. `run` never exits the process itself, so tests can
//! drive it with captured output.
//!
//! Exit codes: 0 success, 1 validation failure, 2 expected-value mismatch,
//! 3 bad input (unreadable file, malformed JSON, bad flags).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::game::{causal_inequality_check, game_stats, indices, GameStats, InputDistribution};
use crate::info::{info_report, InfoReport};
use crate::instrument::{validate_instrument, Instrument, Party};
use crate::io::{parse_document, parse_grid, Document};
use crate::operator::Operator;
use crate::process::{validate, ProcessMatrix};
use crate::scenarios::{fmt9, run_scenario, sweep_alpha, write_csv, ScenarioId, ScenarioResult};
use crate::search::{bound_search, BoundSearchResult, RefineConfig};
use crate::thermo::{thermo_report, QubitHamiltonian, ThermoReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "causal-work",
    version,
    about = "Process-matrix causal games and work extraction"
)]
pub struct Cli {
    /// Machine-readable output, numbers rounded to 9 decimals
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a process matrix or instrument file
    Validate { file: PathBuf },
    /// Play the game with a process and two instruments
    Game {
        process: PathBuf,
        alice: PathBuf,
        bob: PathBuf,
        /// Include the work-extraction report
        #[arg(long)]
        thermo: bool,
        /// Include the entropy report
        #[arg(long)]
        info: bool,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
    },
    /// Run a named scenario and compare with the bundled expected values
    Scenario {
        /// alpha-family, saturating, definite-order, local-only, interacting
        id: ScenarioId,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
    },
    /// Tabulate the alpha family over a grid `a:b:n`
    Sweep {
        #[arg(long)]
        grid: String,
        /// CSV destination; stdout if omitted
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
    },
    /// Random search for instrument pairs maximizing p_succ - p2
    BoundSearch {
        process: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long)]
        seed: u64,
        /// Hill-climb from the best sample
        #[arg(long)]
        refine: bool,
        #[arg(long, default_value_t = RefineConfig::default().steps)]
        refine_steps: usize,
    },
}

/// Input problem, reported with exit code 3.
#[derive(Debug)]
struct InputError(String);

type CliResult<T> = std::result::Result<T, InputError>;

fn input_err(path: &Path) -> impl Fn(Error) -> InputError + '_ {
    move |e| InputError(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))
}

/// Round every number to 9 decimals and turn `-0` into `0`.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    let r = (f * 1e9).round() / 1e9;
                    let r = if r == 0.0 { 0.0 } else { r };
                    if let Some(num) = serde_json::Number::from_f64(r) {
                        *n = num;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn emit_json(out: &mut dyn Write, value: impl Serialize) -> std::io::Result<()> {
    let mut v = serde_json::to_value(value).expect("reports serialize");
    round_json(&mut v);
    writeln!(out, "{v}")
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult<i32> {
    let io = |e: std::io::Error| InputError(format!("cannot write output: {e}"));
    match &cli.command {
        Command::Validate { file } => cmd_validate(file, cli.json, out),
        Command::Game {
            process,
            alice,
            bob,
            thermo,
            info,
            eps,
        } => cmd_game(process, alice, bob, *thermo, *info, *eps, cli.json, out),
        Command::Scenario { id, alpha, eps } => {
            let r = run_scenario(*id, *alpha, *eps).map_err(|e| InputError(e.to_string()))?;
            if cli.json {
                emit_json(out, &r).map_err(io)?;
            } else {
                print_scenario(&r, out).map_err(io)?;
            }
            Ok(if r.passed() { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::Sweep { grid, out: path, eps } => {
            let grid = parse_grid(grid).map_err(|e| InputError(format!("--grid: {e}")))?;
            let rows = sweep_alpha(&grid, *eps).map_err(|e| InputError(e.to_string()))?;
            match path {
                Some(p) => {
                    let mut buf = Vec::new();
                    write_csv(&rows, &mut buf).map_err(io)?;
                    fs::write(p, buf).map_err(|e| InputError(format!("cannot write {}: {e}", p.display())))?;
                    if cli.json {
                        emit_json(out, json!({ "rows": rows.len(), "out": p.display().to_string() })).map_err(io)?;
                    } else {
                        writeln!(out, "wrote {} rows to {}", rows.len(), p.display()).map_err(io)?;
                    }
                }
                None if cli.json => emit_json(out, &rows).map_err(io)?,
                None => write_csv(&rows, &mut *out).map_err(io)?,
            }
            Ok(EXIT_OK)
        }
        Command::BoundSearch {
            process,
            samples,
            seed,
            refine,
            refine_steps,
        } => {
            let Some(w) = load_process(process, cli.json, out)? else {
                return Ok(EXIT_INVALID);
            };
            let cfg = refine.then(|| RefineConfig {
                steps: *refine_steps,
                ..RefineConfig::default()
            });
            let r = bound_search(&w, *samples as usize, *seed, cfg).map_err(input_err(process))?;
            if cli.json {
                emit_json(out, &r).map_err(io)?;
            } else {
                print_search(&r, out).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn cmd_validate(file: &Path, json: bool, out: &mut dyn Write) -> CliResult<i32> {
    let io = |e: std::io::Error| InputError(format!("cannot write output: {e}"));
    let doc = parse_document(&read(file)?).map_err(input_err(file))?;
    let passed = match doc {
        Document::Operator(op) => {
            let report = validate(&op).map_err(input_err(file))?;
            if json {
                emit_json(
                    out,
                    json!({ "kind": "process", "valid": report.passed(), "report": report }),
                )
                .map_err(io)?;
            } else {
                writeln!(out, "{report}").map_err(io)?;
            }
            report.passed()
        }
        Document::Instrument(inst) => {
            let report = validate_instrument(&inst);
            if json {
                emit_json(
                    out,
                    json!({ "kind": "instrument", "valid": report.passed(), "report": report }),
                )
                .map_err(io)?;
            } else {
                writeln!(out, "instrument for party {:?}", report.party).map_err(io)?;
                writeln!(out, "{report}").map_err(io)?;
            }
            report.passed()
        }
    };
    Ok(if passed { EXIT_OK } else { EXIT_INVALID })
}

/// `None` after printing the report when the process is invalid.
fn load_process(path: &Path, json: bool, out: &mut dyn Write) -> CliResult<Option<ProcessMatrix>> {
    let op = load_operator(path)?;
    let report = validate(&op).map_err(input_err(path))?;
    if !report.passed() {
        report_invalid(out, json, path, &report.failure_summary())?;
        return Ok(None);
    }
    Ok(Some(ProcessMatrix::new(op).map_err(input_err(path))?))
}

fn load_operator(path: &Path) -> CliResult<Operator> {
    match parse_document(&read(path)?).map_err(input_err(path))? {
        Document::Operator(op) => Ok(op),
        Document::Instrument(_) => Err(InputError(format!(
            "{}: expected a process matrix, found an instrument",
            path.display()
        ))),
    }
}

fn load_instrument(path: &Path) -> CliResult<Instrument> {
    match parse_document(&read(path)?).map_err(input_err(path))? {
        Document::Instrument(inst) => Ok(inst),
        Document::Operator(_) => Err(InputError(format!(
            "{}: expected an instrument, found a bare operator",
            path.display()
        ))),
    }
}

fn report_invalid(out: &mut dyn Write, json: bool, path: &Path, why: &str) -> CliResult<()> {
    let res = if json {
        emit_json(
            out,
            json!({ "valid": false, "file": path.display().to_string(), "failures": why }),
        )
    } else {
        writeln!(out, "{}: INVALID: {why}", path.display())
    };
    res.map_err(|e| InputError(format!("cannot write output: {e}")))
}

#[derive(Serialize)]
struct GameOutput<'a> {
    stats: &'a GameStats,
    flags: crate::game::CausalFlags,
    #[serde(skip_serializing_if = "Option::is_none")]
    thermo: Option<&'a ThermoReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    info: Option<&'a InfoReport>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_game(
    process: &Path,
    alice: &Path,
    bob: &Path,
    with_thermo: bool,
    with_info: bool,
    eps: f64,
    json: bool,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let io = |e: std::io::Error| InputError(format!("cannot write output: {e}"));
    let Some(w) = load_process(process, json, out)? else {
        return Ok(EXIT_INVALID);
    };
    let mut insts = Vec::new();
    for (path, party) in [(alice, Party::A), (bob, Party::B)] {
        let inst = load_instrument(path)?;
        if inst.party() != party {
            report_invalid(
                out,
                json,
                path,
                &format!("instrument is for party {:?}, expected {party:?}", inst.party()),
            )?;
            return Ok(EXIT_INVALID);
        }
        let report = validate_instrument(&inst);
        if !report.passed() {
            report_invalid(out, json, path, &report.to_string().replace('\n', "; "))?;
            return Ok(EXIT_INVALID);
        }
        insts.push(inst);
    }
    let ham = QubitHamiltonian::new(eps).map_err(|e| InputError(format!("--eps: {e}")))?;
    let stats =
        game_stats(&w, &insts[0], &insts[1], InputDistribution::uniform()).map_err(|e| InputError(e.to_string()))?;
    let thermo = if with_thermo || with_info {
        Some(thermo_report(&stats, &ham).map_err(|e| InputError(e.to_string()))?)
    } else {
        None
    };
    let info = match (&thermo, with_info) {
        (Some(t), true) => Some(info_report(&stats, &t.rho).map_err(|e| InputError(e.to_string()))?),
        _ => None,
    };
    let thermo = thermo.filter(|_| with_thermo);
    if json {
        emit_json(
            out,
            GameOutput {
                stats: &stats,
                flags: causal_inequality_check(&stats),
                thermo: thermo.as_ref(),
                info: info.as_ref(),
            },
        )
        .map_err(io)?;
    } else {
        print_stats(&stats, out).map_err(io)?;
        if let Some(t) = &thermo {
            print_thermo(t, out).map_err(io)?;
        }
        if let Some(i) = &info {
            print_info(i, out).map_err(io)?;
        }
    }
    Ok(EXIT_OK)
}

fn print_stats(s: &GameStats, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "p(a,b|x,y)")?;
    for (a, b, x, y) in indices() {
        writeln!(out, "  a={a} b={b} | x={x} y={y}  {}", fmt9(s.p(a, b, x, y)))?;
    }
    writeln!(out, "p_succ  {}", fmt9(s.p_succ))?;
    writeln!(out, "p1      {}", fmt9(s.p1))?;
    writeln!(out, "p2      {}", fmt9(s.p2))?;
    writeln!(out, "gap     {}", fmt9(s.gap()))?;
    let flags = causal_inequality_check(s);
    if flags.violates_causal_inequality {
        writeln!(out, "p_succ above 1/2: no definite causal order reproduces this")?;
    }
    if flags.exceeds_gap_bound {
        writeln!(out, "gap above 1/2: exceeds the work bound")?;
    }
    if s.clamped > 0 {
        writeln!(out, "note: {} tiny negative probabilities clamped to zero", s.clamped)?;
    }
    Ok(())
}

fn print_thermo(t: &ThermoReport, out: &mut dyn Write) -> std::io::Result<()> {
    let u = |v: f64| fmt9(v / t.eps);
    writeln!(out, "energies in units of eps = {}", fmt9(t.eps))?;
    writeln!(out, "<E>          {}", u(t.average_energy))?;
    writeln!(out, "<w>          {}", u(t.work))?;
    writeln!(out, "<E> circles  {}", u(t.circle_energy))?;
    writeln!(out, "circle energy pmf")?;
    for l in t.circle_pmf.levels() {
        writeln!(out, "  E={}  p={}", u(l.energy), fmt9(l.probability))?;
    }
    writeln!(out, "<w> with coupling  {}", u(t.interacting.work))?;
    if t.interacting.beats_causal_bound {
        writeln!(out, "coupled work above eps/4: impossible with definite order")?;
    }
    Ok(())
}

fn print_info(i: &InfoReport, out: &mut dyn Write) -> std::io::Result<()> {
    for (name, v) in [
        ("S_red", i.s_red),
        ("S_blue", i.s_blue),
        ("S_red_blue", i.s_red_blue),
        ("H_AB", i.h_ab),
        ("I_IO", i.i_io),
        ("I_redblue", i.i_red_blue),
        ("bound", i.bound_value),
    ] {
        writeln!(out, "{name:<11} {}", fmt9(v))?;
    }
    Ok(())
}

fn print_scenario(r: &ScenarioResult, out: &mut dyn Write) -> std::io::Result<()> {
    match r.alpha {
        Some(a) => writeln!(out, "scenario {} (alpha = {})", r.scenario, fmt9(a))?,
        None => writeln!(out, "scenario {}", r.scenario)?,
    }
    print_stats(&r.stats, out)?;
    print_thermo(&r.thermo, out)?;
    print_info(&r.info, out)?;
    writeln!(out, "expected values")?;
    for c in &r.checks {
        writeln!(
            out,
            "  {:<4} {:<14} expected {}  got {}  tol {:.0e}  ({:?})",
            if c.passed { "ok" } else { "FAIL" },
            c.quantity,
            fmt9(c.expected),
            fmt9(c.actual),
            c.tolerance,
            c.origin
        )?;
    }
    writeln!(
        out,
        "{}",
        if r.passed() {
            "all expected values match"
        } else {
            "MISMATCH"
        }
    )
}

fn print_search(r: &BoundSearchResult, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "samples     {}", r.samples)?;
    writeln!(out, "seed        {}", r.seed)?;
    writeln!(out, "best gap    {}", fmt9(r.best_gap))?;
    writeln!(
        out,
        "best index  {} ({:?} / {:?})",
        r.best_index, r.alice.kind, r.bob.kind
    )?;
    if let Some(refined) = &r.refinement {
        writeln!(
            out,
            "refined     {} ({} moves accepted)",
            fmt9(refined.gap),
            refined.accepted
        )?;
    }
    writeln!(out, "max gap     {}", fmt9(r.max_gap()))?;
    writeln!(
        out,
        "{}",
        if r.exceeds_bound {
            "BOUND EXCEEDED"
        } else {
            "bound holds"
        }
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("causal-work").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn rounding() {
        let mut v = json!({"a": -1e-12, "b": [0.1234567891234, 2], "c": 0.5});
        round_json(&mut v);
        assert_eq!(v.to_string(), r#"{"a":0.0,"b":[0.123456789,2],"c":0.5}"#);
    }

    #[test]
    fn saturating_json() {
        let (code, out, _) = run_args(&["scenario", "saturating", "--json"]);
        assert_eq!(code, 0);
        assert!(out.contains(r#""p_succ":0.5"#) && out.contains(r#""p2":0.0"#), "{out}");
    }

    #[test]
    fn usage_errors() {
        let (code, _, err) = run_args(&["frobnicate"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("unrecognized subcommand"), "{err}");
        let (code, _, err) = run_args(&["scenario", "nope"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("unknown scenario"), "{err}");
        let (code, _, err) = run_args(&["scenario", "saturating", "--alpha", "0.1"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("takes no alpha"), "{err}");
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("bound-search"));
    }

    #[test]
    fn missing_file() {
        let (code, _, err) = run_args(&["validate", "/nonexistent/w.json"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.starts_with("error: cannot read"), "{err}");
    }
}
