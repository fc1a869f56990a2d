//! Fixed-format CSV tables and snapshots, plus JSON metadata.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use abcd_ldg_core::cases::DtRule;
use abcd_ldg_core::operators::ErrorSplitDiagnostic;
use abcd_ldg_core::study::RateRow;
use abcd_ldg_core::time::Trajectory;
use abcd_ldg_core::{DGField, ErrorReport, ErrorRow};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const ERROR_TABLE_HEADER: &str = "Nx,Nt,err_u_L2,rate,err_eta_L2,rate,err_u_inf,rate,err_eta_inf,rate";

fn sci(v: f64) -> String {
    format!("{v:.3e}")
}

fn rate(r: Option<f64>) -> String {
    match r {
        Some(r) => format!("{r:.4}"),
        None => "NA".into(),
    }
}

pub fn format_error_table(report: &ErrorReport) -> String {
    let mut s = String::from(ERROR_TABLE_HEADER);
    s.push('\n');
    for (row, r) in report.rows.iter().zip(&report.rates) {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            row.nx,
            row.nt,
            sci(row.l2_u),
            rate(r.l2_u),
            sci(row.l2_eta),
            rate(r.l2_eta),
            sci(row.linf_u),
            rate(r.linf_u),
            sci(row.linf_eta),
            rate(r.linf_eta),
        );
    }
    s
}

/// Inverse of [`format_error_table`], up to the printed precision.
pub fn parse_error_table(text: &str) -> Result<ErrorReport, String> {
    let mut lines = text.lines();
    if lines.next() != Some(ERROR_TABLE_HEADER) {
        return Err("unexpected header".into());
    }
    let mut rows = Vec::new();
    let mut rates = Vec::new();
    for (i, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(format!("row {}: expected 10 fields, got {}", i + 1, f.len()));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| format!("row {}: '{s}': {e}", i + 1));
        let int = |s: &str| s.parse::<usize>().map_err(|e| format!("row {}: '{s}': {e}", i + 1));
        let opt = |s: &str| if s == "NA" { Ok(None) } else { num(s).map(Some) };
        rows.push(ErrorRow {
            nx: int(f[0])?,
            nt: int(f[1])?,
            l2_u: num(f[2])?,
            l2_eta: num(f[4])?,
            linf_u: num(f[6])?,
            linf_eta: num(f[8])?,
        });
        rates.push(RateRow {
            l2_u: opt(f[3])?,
            l2_eta: opt(f[5])?,
            linf_u: opt(f[7])?,
            linf_eta: opt(f[9])?,
        });
    }
    Ok(ErrorReport { rows, rates })
}

pub fn write_error_table(report: &ErrorReport, path: &Path) -> CliResult<()> {
    if report.rows.is_empty() {
        return Err(CliError::Config("refusing to write an empty error table".into()));
    }
    write_file(path, &format_error_table(report))
}

/// `snapshot_t0004.4000.csv` for t = 4.4.
pub fn snapshot_file_name(t: f64) -> String {
    format!("snapshot_t{t:09.4}.csv")
}

pub fn format_snapshot(eta: &DGField, u: &DGField) -> String {
    let mut s = String::from("x,eta,u\n");
    for ((x, e), (_, v)) in eta.sample().into_iter().zip(u.sample()) {
        let _ = writeln!(s, "{x:.12e},{e:.12e},{v:.12e}");
    }
    s
}

pub fn format_conserved(tr: &Trajectory, every: usize) -> String {
    let mut s = String::from("t,int_eta,int_u\n");
    let n = tr.conserved.len();
    for (i, c) in tr.conserved.iter().enumerate() {
        if i % every.max(1) == 0 || i + 1 == n {
            let _ = writeln!(s, "{:.12e},{:.15e},{:.15e}", c.t, c.mass_eta, c.mass_u);
        }
    }
    s
}

pub fn format_max_norm(tr: &Trajectory) -> String {
    let mut s = String::from("t,max_abs_eta\n");
    for (t, m) in &tr.max_eta {
        let _ = writeln!(s, "{t:.12e},{m:.6e}");
    }
    s
}

pub fn format_diagnostics(rows: &[(usize, usize, ErrorSplitDiagnostic)]) -> String {
    let opt = |r: Option<f64>| r.map_or_else(|| "NA".to_string(), |v| format!("{v:.4e}"));
    let mut s = String::from("Nx,Nt,xi_v_L2,xi_w_L2,u_deriv_ratio,u_jump_ratio,eta_deriv_ratio,eta_jump_ratio\n");
    for (nx, nt, d) in rows {
        let _ = writeln!(
            s,
            "{nx},{nt},{},{},{},{},{},{}",
            sci(d.xi_v.l2_norm()),
            sci(d.xi_w.l2_norm()),
            opt(d.u_deriv_ratio),
            opt(d.u_jump_ratio),
            opt(d.eta_deriv_ratio),
            opt(d.eta_jump_ratio),
        );
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    fs::write(path, contents).map_err(CliError::io(path))
}

/// Provenance sidecar written next to every table.
#[derive(Debug, Serialize)]
pub struct Metadata {
    pub solver_version: &'static str,
    pub command: &'static str,
    pub case: &'static str,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub lambda: f64,
    pub degree: usize,
    pub alpha_policy: &'static str,
    pub domain: (f64, f64),
    pub t_final: f64,
    pub dt_rule: DtRuleMeta,
    pub rows: Vec<(usize, usize)>,
    pub n_cells: usize,
    pub snapshot_times: Vec<f64>,
    pub headon_sign: &'static str,
    pub source: &'static str,
    pub files: Vec<String>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DtRuleMeta {
    FixedSteps { n_steps: usize },
    PiecewiseFactorOfH { segments: Vec<(f64, f64)> },
    PerRow,
}

impl Metadata {
    pub fn new(cfg: &RunConfig, files: Vec<String>) -> Self {
        let p = &cfg.case.params;
        let dt_rule = match (cfg.command.as_str(), &cfg.dt_rule) {
            ("accuracy" | "diagnose", _) => DtRuleMeta::PerRow,
            (_, DtRule::FixedSteps { n_steps }) => DtRuleMeta::FixedSteps { n_steps: *n_steps },
            (_, DtRule::PiecewiseFactor { segments }) => DtRuleMeta::PiecewiseFactorOfH {
                segments: segments.clone(),
            },
        };
        Metadata {
            solver_version: env!("CARGO_PKG_VERSION"),
            command: cfg.command.as_str(),
            case: cfg.case.id.name(),
            a: p.a,
            b: p.b,
            c: p.c,
            d: p.d,
            lambda: p.lambda,
            degree: cfg.degree,
            alpha_policy: cfg.alpha_policy.as_str(),
            domain: (cfg.case.x_left, cfg.case.x_right),
            t_final: cfg.case.t_final,
            dt_rule,
            rows: cfg.rows.clone(),
            n_cells: cfg.n_cells,
            snapshot_times: cfg.snapshot_times.clone(),
            headon_sign: match cfg.case.headon_sign {
                abcd_ldg_core::HeadonSign::Literal => "literal",
                abcd_ldg_core::HeadonSign::Colocated => "colocated",
            },
            source: if cfg.case.has_source() { "derived" } else { "none" },
            files,
        }
    }
}

/// Wall-clock details kept apart from the data files so those stay
/// byte-identical between runs.
#[derive(Debug, Serialize)]
pub struct RunInfo {
    pub wall_seconds: f64,
    pub unix_time: u64,
    pub threads: usize,
    pub status: String,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("metadata serializes");
    write_file(path, &(text + "\n"))
}
