//! End-to-end runs: process → instruments → game → thermo → info, checked
//! against the bundled expected-value table.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expected::{Check, ExpectedTable};
use crate::game::{causal_inequality_check, game_stats, CausalFlags, GameStats, InputDistribution};
use crate::info::{info_report, InfoReport};
use crate::instrument::{alpha_family_instruments, classical_instrument, saturating_instruments, Instrument, Party};
use crate::process::{alpha_family, identity_wire, Order, ProcessMatrix, ALPHA_MAX};
use crate::thermo::{thermo_report, QubitHamiltonian, ThermoReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioId {
    /// α-family process with its measure/identity instruments
    AlphaFamily,
    /// α = 1/√2 with the instruments reaching gap 1/2
    Saturating,
    /// identity wire from Alice to Bob; Alice always answers 0 and sends her
    /// bit, Bob reads it and answers with it
    DefiniteOrder,
    /// maximally mixed process: no channel in either direction
    LocalOnly,
    /// α-family statistics with the circle-circle coupling switched on
    Interacting,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 5] = [
        ScenarioId::AlphaFamily,
        ScenarioId::Saturating,
        ScenarioId::DefiniteOrder,
        ScenarioId::LocalOnly,
        ScenarioId::Interacting,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioId::AlphaFamily => "alpha-family",
            ScenarioId::Saturating => "saturating",
            ScenarioId::DefiniteOrder => "definite-order",
            ScenarioId::LocalOnly => "local-only",
            ScenarioId::Interacting => "interacting",
        }
    }

    pub fn takes_alpha(self) -> bool {
        matches!(self, ScenarioId::AlphaFamily | ScenarioId::Interacting)
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|id| id.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|id| id.name()).collect();
            Error::Parse(format!("unknown scenario {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

/// Process and instruments of a scenario.
pub fn setup(id: ScenarioId, alpha: Option<f64>) -> Result<(ProcessMatrix, Instrument, Instrument)> {
    let alpha = resolve_alpha(id, alpha)?;
    match id {
        ScenarioId::AlphaFamily | ScenarioId::Interacting => {
            let (a, b) = alpha_family_instruments();
            Ok((alpha_family(alpha.expect("resolved"))?, a, b))
        }
        ScenarioId::Saturating => {
            let (a, b) = saturating_instruments();
            Ok((alpha_family(ALPHA_MAX)?, a, b))
        }
        ScenarioId::DefiniteOrder => Ok((
            identity_wire(Order::AliceFirst),
            classical_instrument(Party::A, [[0, 0], [0, 0]]),
            classical_instrument(Party::B, [[0, 1], [0, 1]]),
        )),
        ScenarioId::LocalOnly => {
            let (a, b) = alpha_family_instruments();
            Ok((ProcessMatrix::maximally_mixed(), a, b))
        }
    }
}

fn resolve_alpha(id: ScenarioId, alpha: Option<f64>) -> Result<Option<f64>> {
    match (id.takes_alpha(), alpha) {
        (true, a) => Ok(Some(a.unwrap_or(ALPHA_MAX))),
        (false, None) => Ok(None),
        (false, Some(_)) => Err(Error::Parse(format!("scenario {id} takes no alpha"))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioResult {
    pub scenario: ScenarioId,
    pub alpha: Option<f64>,
    pub eps: f64,
    pub stats: GameStats,
    pub flags: CausalFlags,
    pub thermo: ThermoReport,
    pub info: InfoReport,
    pub checks: Vec<Check>,
}

impl ScenarioResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Named scalar used by the expected-value table.
    pub fn quantity(&self, name: &str) -> Option<f64> {
        let v = match name {
            "p_succ" => self.stats.p_succ,
            "p1" => self.stats.p1,
            "p2" => self.stats.p2,
            "gap" => self.stats.gap(),
            "E_avg" => self.thermo.average_energy,
            "E_circle" => self.thermo.circle_energy,
            "w_avg" => self.thermo.work,
            "w_interacting" => self.thermo.interacting.work,
            "S_red" => self.info.s_red,
            "S_blue" => self.info.s_blue,
            "S_red_blue" => self.info.s_red_blue,
            "H_AB" => self.info.h_ab,
            "I_IO" => self.info.i_io,
            "I_redblue" => self.info.i_red_blue,
            "bound" => self.info.bound_value,
            _ => return None,
        };
        Some(v)
    }
}

pub fn run_scenario(id: ScenarioId, alpha: Option<f64>, eps: f64) -> Result<ScenarioResult> {
    run_scenario_with(id, alpha, eps, &ExpectedTable::builtin())
}

pub fn run_scenario_with(
    id: ScenarioId,
    alpha: Option<f64>,
    eps: f64,
    table: &ExpectedTable,
) -> Result<ScenarioResult> {
    let ctx = |e: Error| e.context(format!("scenario {id}"));
    let alpha = resolve_alpha(id, alpha).map_err(ctx)?;
    let ham = QubitHamiltonian::new(eps).map_err(ctx)?;
    let (w, a, b) = setup(id, alpha).map_err(ctx)?;
    let stats = game_stats(&w, &a, &b, InputDistribution::uniform()).map_err(ctx)?;
    let thermo = thermo_report(&stats, &ham).map_err(ctx)?;
    let info = info_report(&stats, &thermo.rho).map_err(ctx)?;
    let mut result = ScenarioResult {
        scenario: id,
        alpha,
        eps,
        flags: causal_inequality_check(&stats),
        stats,
        thermo,
        info,
        checks: Vec::new(),
    };
    let mut checks = Vec::new();
    for entry in table.for_scenario(id.name(), alpha) {
        let actual = result.quantity(&entry.quantity).ok_or_else(|| {
            ctx(Error::Parse(format!(
                "unknown quantity {:?} in expected-value table",
                entry.quantity
            )))
        })?;
        let expected = entry.expected(alpha, eps);
        checks.push(Check {
            quantity: entry.quantity.clone(),
            expected,
            actual,
            tolerance: entry.tolerance,
            origin: entry.origin,
            passed: (actual - expected).abs() <= entry.tolerance,
        });
    }
    result.checks = checks;
    Ok(result)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub p_succ: f64,
    pub p2: f64,
    pub gap: f64,
    pub e_avg: f64,
    pub w_avg: f64,
    pub s_red: f64,
    pub h_ab: f64,
    pub i_io: f64,
    pub i_redblue: f64,
    pub bound: f64,
}

pub const CSV_HEADER: &str = "alpha,p_succ,p2,gap,E_avg,w_avg,S_red,H_AB,I_IO,I_redblue,bound";

impl SweepRow {
    pub fn values(&self) -> [f64; 11] {
        [
            self.alpha,
            self.p_succ,
            self.p2,
            self.gap,
            self.e_avg,
            self.w_avg,
            self.s_red,
            self.h_ab,
            self.i_io,
            self.i_redblue,
            self.bound,
        ]
    }

    pub fn info(&self) -> (f64, f64, f64) {
        (self.h_ab, self.i_io, self.i_redblue)
    }
}

/// Print with 9 decimals, writing negative zero as zero.
pub fn fmt9(v: f64) -> String {
    let s = format!("{v:.9}");
    if s.starts_with('-') && s[1..].bytes().all(|c| c == b'0' || c == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn sweep_point(alpha: f64, ham: &QubitHamiltonian) -> Result<SweepRow> {
    let (w, a, b) = setup(ScenarioId::AlphaFamily, Some(alpha))?;
    let stats = game_stats(&w, &a, &b, InputDistribution::uniform())?;
    let thermo = thermo_report(&stats, ham)?;
    let info = info_report(&stats, &thermo.rho)?;
    Ok(SweepRow {
        alpha,
        p_succ: stats.p_succ,
        p2: stats.p2,
        gap: stats.gap(),
        e_avg: thermo.average_energy,
        w_avg: thermo.work,
        s_red: info.s_red,
        h_ab: info.h_ab,
        i_io: info.i_io,
        i_redblue: info.i_red_blue,
        bound: info.bound_value,
    })
}

/// One row per grid point, in grid order.
pub fn sweep_alpha(grid: &[f64], eps: f64) -> Result<Vec<SweepRow>> {
    let ham = QubitHamiltonian::new(eps)?;
    grid.par_iter()
        .map(|&alpha| sweep_point(alpha, &ham).map_err(|e| e.context(format!("alpha = {alpha}"))))
        .collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        let cells: Vec<String> = row.values().iter().map(|&v| fmt9(v)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
