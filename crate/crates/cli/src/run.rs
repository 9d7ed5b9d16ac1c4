//! Executes the configured checks and writes their outputs.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use drharmonic::checks::{
    besov_check_with, converse_hypotheses, converse_titchmarsh_with, dyadic_shell_equiv_with,
    forward_titchmarsh_with, holder_integrability_with, lipcor_two_sided, Tolerances,
};
use drharmonic::jacobi::{phi_bounds_audit, AuditMode};
use drharmonic::{CheckReport, Error, Hypothesis, Verdict};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::registry::CheckName;

/// Process exit status. Severity runs `Pass < Inconclusive < Fail < Io`;
/// `Config` is reported before any check runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Pass,
    Config,
    Fail,
    Inconclusive,
    Io,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        match self {
            ExitStatus::Pass => 0,
            ExitStatus::Config => 1,
            ExitStatus::Fail => 2,
            ExitStatus::Inconclusive => 3,
            ExitStatus::Io => 4,
        }
    }

    fn severity(self) -> u8 {
        match self {
            ExitStatus::Pass => 0,
            ExitStatus::Inconclusive => 1,
            ExitStatus::Fail => 2,
            ExitStatus::Io => 3,
            ExitStatus::Config => 4,
        }
    }

    /// The more severe of the two.
    pub fn join(self, other: Self) -> Self {
        if other.severity() > self.severity() {
            other
        } else {
            self
        }
    }

    pub fn from_verdict(v: Verdict) -> Self {
        match v {
            Verdict::Pass => ExitStatus::Pass,
            Verdict::Inconclusive => ExitStatus::Inconclusive,
            Verdict::Fail => ExitStatus::Fail,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ExitStatus::Pass => "pass",
            ExitStatus::Config => "config_error",
            ExitStatus::Fail => "fail",
            ExitStatus::Inconclusive => "inconclusive",
            ExitStatus::Io => "io_error",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
    pub tol_scale: f64,
}

/// A check that ran. `error` is set when the check could not produce a
/// report; the report then carries no rows.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: CheckName,
    pub report: CheckReport,
    pub error: Option<String>,
}

impl CheckOutcome {
    pub fn status(&self) -> ExitStatus {
        ExitStatus::from_verdict(self.report.verdict)
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub status: ExitStatus,
    pub checks: Vec<CheckOutcome>,
    pub warnings: Vec<String>,
    pub io_error: Option<String>,
}

pub fn run_checks(cfg: &RunConfig, opts: &RunOptions) -> RunOutcome {
    let mut warnings = Vec::new();
    if cfg.checks.is_empty() {
        warnings.push("no checks requested; nothing to do".to_string());
    }
    let tol = cfg.file.tolerances.scaled(opts.tol_scale);
    let outcomes = schedule(cfg, &tol, opts.jobs);
    let mut status = outcomes
        .iter()
        .fold(ExitStatus::Pass, |s, o| s.join(o.status()));
    let io_error = match write_outputs(cfg, opts, &tol, &outcomes, &warnings, status) {
        Ok(()) => None,
        Err(e) => {
            status = ExitStatus::Io;
            Some(e.to_string())
        }
    };
    RunOutcome {
        status,
        checks: outcomes,
        warnings,
        io_error,
    }
}

fn schedule(cfg: &RunConfig, tol: &Tolerances, jobs: Option<usize>) -> Vec<CheckOutcome> {
    let work = || -> Vec<CheckOutcome> {
        cfg.checks
            .par_iter()
            .map(|&c| run_one(cfg, c, tol))
            .collect()
    };
    match jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        },
        None => work(),
    }
}

pub fn run_one(cfg: &RunConfig, check: CheckName, tol: &Tolerances) -> CheckOutcome {
    let p = &cfg.params;
    let f = &cfg.fhat;
    let w = &cfg.modulus;
    let ts = &cfg.t_grid;
    let res = match check {
        CheckName::PhiBounds => phi_bounds_audit(
            p,
            &cfg.audit_grid(cfg.file.grids.lambda_max),
            &cfg.audit_grid(cfg.file.grids.t_max),
            AuditMode::LemmaBounds,
        ),
        CheckName::Forward => forward_titchmarsh_with(p, f, w, ts, tol),
        CheckName::Dyadic => dyadic_shell_equiv_with(p, f, w, ts, tol),
        CheckName::ConverseHypotheses => converse_hypotheses(p, w),
        CheckName::Converse => converse_titchmarsh_with(p, f, w, ts, tol),
        CheckName::Lipcor => lipcor_two_sided(p, cfg.file.lipcor.alpha, cfg.file.lipcor.gamma, ts),
        CheckName::Besov => besov_check_with(p, f, cfg.file.besov.alpha, cfg.besov_truncations(), tol),
        CheckName::Holder => holder_integrability_with(p, f, &cfg.holder, &cfg.file.holder.betas, tol),
    };
    match res {
        Ok(report) => CheckOutcome {
            name: check,
            report,
            error: None,
        },
        Err(e) => {
            let mut report = CheckReport::new(check.canonical(), p);
            // Out-of-scope inputs cannot be decided either way.
            let verdict = match e {
                Error::Unsupported(_) => Verdict::Inconclusive,
                _ => Verdict::Fail,
            };
            report.finish(|_| verdict);
            CheckOutcome {
                name: check,
                report,
                error: Some(e.to_string()),
            }
        }
    }
}

/// Writes `report` as `grid,lhs,rhs,ratio` CSV.
pub fn emit_plot_data(report: &CheckReport, path: &Path) -> io::Result<()> {
    fs::write(path, report.to_csv())
}

#[derive(Serialize)]
struct SpaceEntry {
    m: u32,
    k: u32,
    q: f64,
    d: u32,
}

#[derive(Serialize)]
struct CheckEntry<'a> {
    name: &'static str,
    verdict: &'static str,
    error: Option<&'a str>,
    rows: usize,
    ratio_sup: f64,
    ratio_inf: f64,
    hypotheses: &'a [Hypothesis],
    summary: &'a std::collections::BTreeMap<String, f64>,
    csv: String,
    table: String,
}

#[derive(Serialize)]
struct Summary<'a> {
    status: u8,
    status_label: &'static str,
    space: SpaceEntry,
    seed: Option<u64>,
    tol_scale: f64,
    tolerances: &'a Tolerances,
    t_grid: &'a [f64],
    modulus: &'a str,
    warnings: &'a [String],
    checks: Vec<CheckEntry<'a>>,
}

fn io_context(path: &Path, e: io::Error) -> io::Error {
    io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}

fn write_outputs(
    cfg: &RunConfig,
    opts: &RunOptions,
    tol: &Tolerances,
    outcomes: &[CheckOutcome],
    warnings: &[String],
    status: ExitStatus,
) -> io::Result<()> {
    let dir = &opts.out_dir;
    fs::create_dir_all(dir).map_err(|e| io_context(dir, e))?;
    let mut entries = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        let name = o.name.canonical();
        let csv = format!("{name}.csv");
        let table = format!("{name}.txt");
        let csv_path = dir.join(&csv);
        emit_plot_data(&o.report, &csv_path).map_err(|e| io_context(&csv_path, e))?;
        let table_path = dir.join(&table);
        let mut text = o.report.to_table();
        if let Some(err) = &o.error {
            text.push_str(&format!("error = {err}\n"));
        }
        fs::write(&table_path, text).map_err(|e| io_context(&table_path, e))?;
        entries.push(CheckEntry {
            name,
            verdict: o.report.verdict.as_str(),
            error: o.error.as_deref(),
            rows: o.report.grid.len(),
            ratio_sup: o.report.ratio_sup,
            ratio_inf: o.report.ratio_inf,
            hypotheses: &o.report.hypotheses,
            summary: &o.report.summary,
            csv,
            table,
        });
    }
    let p = &cfg.params;
    let summary = Summary {
        status: status.code(),
        status_label: status.label(),
        space: SpaceEntry {
            m: p.m(),
            k: p.k(),
            q: p.q(),
            d: p.d(),
        },
        seed: cfg.file.seed,
        tol_scale: opts.tol_scale,
        tolerances: tol,
        t_grid: &cfg.t_grid,
        modulus: cfg.modulus.label(),
        warnings,
        checks: entries,
    };
    let mut json = serde_json::to_string_pretty(&summary)
        .map_err(io::Error::other)?;
    json.push('\n');
    let path = dir.join("summary.json");
    fs::write(&path, json).map_err(|e| io_context(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_is_total() {
        use ExitStatus::*;
        let order = [Pass, Inconclusive, Fail, Io];
        for (i, &a) in order.iter().enumerate() {
            for (j, &b) in order.iter().enumerate() {
                assert_eq!(a.join(b), order[i.max(j)]);
            }
        }
        assert_eq!(Inconclusive.join(Fail).code(), 2);
        assert_eq!(Pass.join(Inconclusive).code(), 3);
    }

    #[test]
    fn empty_report_csv_is_header_only() {
        let p = drharmonic::derive_params(2, 1).unwrap();
        let r = CheckReport::new("empty", &p);
        let dir = std::env::temp_dir().join(format!("drh-empty-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("empty.csv");
        emit_plot_data(&r, &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "grid,lhs,rhs,ratio\n");
        fs::remove_dir_all(&dir).unwrap();
    }
}
