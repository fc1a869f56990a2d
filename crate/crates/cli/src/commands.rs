//! The five subcommands. Each returns a summary for the terminal and
//! writes its files under `cfg.out_dir`.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use abcd_ldg_core::cases::CaseId;
use abcd_ldg_core::study::{run_accuracy_row, run_diagnostic};
use abcd_ldg_core::time::{run_simulation, RunOptions, RunStatus, Trajectory};
use abcd_ldg_core::{ErrorReport, SimState};
use rayon::prelude::*;

use crate::config::{CommandKind, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{self, Metadata, RunInfo};

/// Threshold used for the `--check` rate test.
pub const RATE_TOLERANCE: f64 = 0.2;
/// η must stay at rest to this L² accuracy in the flat-η cases.
pub const FLAT_ETA_TOLERANCE: f64 = 1e-12;

#[derive(Debug)]
pub struct Outcome {
    pub summary: String,
    pub files: Vec<String>,
}

pub fn run(cfg: &RunConfig) -> CliResult<Outcome> {
    let start = Instant::now();
    let result = match cfg.command {
        CommandKind::Accuracy => accuracy(cfg),
        CommandKind::Simulate | CommandKind::Blowup | CommandKind::Headon => simulate(cfg),
        CommandKind::Diagnose => diagnose(cfg),
    };
    let status = match &result {
        Ok(_) => "ok".to_string(),
        Err(e) => e.to_string(),
    };
    let info = RunInfo {
        wall_seconds: start.elapsed().as_secs_f64(),
        unix_time: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        threads: rayon::current_num_threads(),
        status,
    };
    output::write_json(&cfg.out_dir.join("run.json"), &info)?;
    result
}

pub fn accuracy_report(cfg: &RunConfig) -> CliResult<ErrorReport> {
    let rows = cfg
        .rows
        .par_iter()
        .map(|&(nx, nt)| run_accuracy_row(&cfg.case, cfg.degree, nx, nt, cfg.alpha_policy))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| match e {
            abcd_ldg_core::Error::BlowUp { t } => CliError::BlowUp {
                case: cfg.case.id.name(),
                t,
            },
            e => e.into(),
        })?;
    Ok(ErrorReport::from_rows(rows))
}

/// Finest-row rate check: k+1 ± 0.2 for every L² column, except that in
/// the flat-η cases η must instead stay at rest.
pub fn check_report(cfg: &RunConfig, report: &ErrorReport) -> Vec<String> {
    let mut violations = Vec::new();
    let Some((_, rates)) = report.last() else {
        return vec!["empty report".into()];
    };
    let target = cfg.degree as f64 + 1.0;
    let mut check = |name: &str, r: Option<f64>| match r {
        Some(r) if (r - target).abs() <= RATE_TOLERANCE => {}
        other => violations.push(format!("{name} rate {other:?} outside {target} ± {RATE_TOLERANCE}")),
    };
    check("u L2", rates.l2_u);
    let flat_eta = matches!(cfg.case.id, CaseId::C5 | CaseId::C6);
    if !flat_eta {
        check("eta L2", rates.l2_eta);
    }
    if flat_eta {
        for r in &report.rows {
            if r.l2_eta.is_nan() || r.l2_eta > FLAT_ETA_TOLERANCE {
                violations.push(format!("Nx={}: eta L2 error {:e} above {FLAT_ETA_TOLERANCE:e}", r.nx, r.l2_eta));
            }
        }
    }
    violations
}

fn accuracy(cfg: &RunConfig) -> CliResult<Outcome> {
    let report = accuracy_report(cfg)?;
    let table = output::format_error_table(&report);
    output::write_error_table(&report, &cfg.out_dir.join("errors.csv"))?;
    let files = vec!["errors.csv".to_string()];
    output::write_json(&cfg.out_dir.join("metadata.json"), &Metadata::new(cfg, files.clone()))?;
    let mut summary = format!("{} k={} ({})\n{table}", cfg.case.id.name(), cfg.degree, cfg.out_dir.display());
    if cfg.check {
        let v = check_report(cfg, &report);
        if !v.is_empty() {
            return Err(CliError::Acceptance(v.join("\n")));
        }
        summary.push_str("check: ok\n");
    }
    Ok(Outcome { summary, files })
}

pub fn trajectory(cfg: &RunConfig) -> CliResult<Trajectory> {
    let opts = RunOptions {
        alpha_policy: cfg.alpha_policy,
        snapshot_times: cfg.snapshot_times.clone(),
        norm_log_every: 100,
        ..Default::default()
    };
    Ok(run_simulation(&cfg.case, cfg.n_cells, cfg.degree, &cfg.dt_rule, &opts)?)
}

fn simulate(cfg: &RunConfig) -> CliResult<Outcome> {
    let tr = trajectory(cfg)?;
    let mut files = Vec::new();
    let mut write = |name: String, text: String| -> CliResult<()> {
        output::write_file(&cfg.out_dir.join(&name), &text)?;
        files.push(name);
        Ok(())
    };
    let mut summary = format!(
        "{} k={} N={} steps={} ({})\n",
        cfg.case.id.name(),
        cfg.degree,
        cfg.n_cells,
        tr.steps,
        cfg.out_dir.display()
    );
    let mut emitted: Vec<&SimState> = tr.snapshots.iter().collect();
    if let RunStatus::BlowUp { last_valid_t } = tr.status {
        // Flush the last finite state so the run can be inspected.
        if emitted.last().map(|s| s.t) != Some(last_valid_t) {
            emitted.push(&tr.final_state);
        }
    }
    for s in emitted {
        write(output::snapshot_file_name(s.t), output::format_snapshot(&s.eta, &s.u))?;
        summary.push_str(&format!("  t={:<8} max|eta|={:.4e} max|u|={:.4e}\n", s.t, s.eta.linf_norm(), s.u.linf_norm()));
    }
    write("conserved.csv".into(), output::format_conserved(&tr, 100))?;
    write("max_eta.csv".into(), output::format_max_norm(&tr))?;
    let (de, du) = tr.conservation_drift();
    summary.push_str(&format!("  drift int_eta={de:.3e} int_u={du:.3e}\n"));
    output::write_json(&cfg.out_dir.join("metadata.json"), &Metadata::new(cfg, files.clone()))?;

    if let RunStatus::BlowUp { last_valid_t } = tr.status {
        summary.push_str(&format!("  blow-up after t={last_valid_t}\n"));
        // Blow-up is the expected outcome of the blowup run only.
        if cfg.case.id != CaseId::Blowup {
            eprint!("{summary}");
            return Err(CliError::BlowUp {
                case: cfg.case.id.name(),
                t: last_valid_t,
            });
        }
    }
    Ok(Outcome { summary, files })
}

fn diagnose(cfg: &RunConfig) -> CliResult<Outcome> {
    let rows = cfg
        .rows
        .par_iter()
        .map(|&(nx, nt)| run_diagnostic(&cfg.case, cfg.degree, nx, nt).map(|d| (nx, nt, d)))
        .collect::<Result<Vec<_>, _>>()?;
    let text = output::format_diagnostics(&rows);
    output::write_file(&cfg.out_dir.join("diagnostics.csv"), &text)?;
    let files = vec!["diagnostics.csv".to_string()];
    output::write_json(&cfg.out_dir.join("metadata.json"), &Metadata::new(cfg, files.clone()))?;
    Ok(Outcome {
        summary: format!("{} k={} ({})\n{text}", cfg.case.id.name(), cfg.degree, cfg.out_dir.display()),
        files,
    })
}
