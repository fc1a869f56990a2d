//! Command-line flags, the optional JSON config file, and their merge into
//! a validated [`RunConfig`].

use std::path::{Path, PathBuf};

use abcd_ldg_core::cases::{case_catalog, CaseId, CaseSpec, DtRule, HeadonSign};
use abcd_ldg_core::basis::SUPPORTED_DEGREES;
use abcd_ldg_core::{AbcdParams, AlphaPolicy};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "ABCD_LDG_OUT";
pub const DEFAULT_OUTPUT_ROOT: &str = "output";

#[derive(Debug, Parser)]
#[command(name = "abcd-ldg", version, about = "LDG solver for the abcd Boussinesq system on periodic domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Error and convergence-rate table for an accuracy case.
    Accuracy(RunArgs),
    /// Single run with snapshots and conservation log.
    Simulate(RunArgs),
    /// Coupled-BBM collision driven into blow-up.
    Blowup(RunArgs),
    /// Head-on collision of two solitary waves.
    Headon(RunArgs),
    /// Error-split ratios under refinement.
    Diagnose(RunArgs),
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::Accuracy(_) => CommandKind::Accuracy,
            Command::Simulate(_) => CommandKind::Simulate,
            Command::Blowup(_) => CommandKind::Blowup,
            Command::Headon(_) => CommandKind::Headon,
            Command::Diagnose(_) => CommandKind::Diagnose,
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Accuracy(a) | Command::Simulate(a) | Command::Blowup(a) | Command::Headon(a) | Command::Diagnose(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Accuracy,
    Simulate,
    Blowup,
    Headon,
    Diagnose,
}

impl CommandKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandKind::Accuracy => "accuracy",
            CommandKind::Simulate => "simulate",
            CommandKind::Blowup => "blowup",
            CommandKind::Headon => "headon",
            CommandKind::Diagnose => "diagnose",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaPolicyArg {
    PerStep,
    PerStage,
    Initial,
}

impl From<AlphaPolicyArg> for AlphaPolicy {
    fn from(a: AlphaPolicyArg) -> Self {
        match a {
            AlphaPolicyArg::PerStep => AlphaPolicy::PerStep,
            AlphaPolicyArg::PerStage => AlphaPolicy::PerStage,
            AlphaPolicyArg::Initial => AlphaPolicy::Initial,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Case id: 1..7, blowup or headon.
    #[arg(long)]
    pub case: Option<String>,
    /// Polynomial degree k (1, 2 or 3).
    #[arg(long)]
    pub degree: Option<usize>,
    /// Number of cells; restricts accuracy/diagnose to a single row.
    #[arg(long)]
    pub nx: Option<usize>,
    /// Number of time steps.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Output root directory (defaults to $ABCD_LDG_OUT, then ./output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Penalty λ for the dispersive fluxes.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_enum)]
    pub alpha_policy: Option<AlphaPolicyArg>,
    /// Use the velocity profile exactly as printed for the head-on run.
    #[arg(long)]
    pub headon_literal_sign: bool,
    /// Snapshot times, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub snapshot_times: Option<Vec<f64>>,
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Exit with status 10 if the finest-row rates miss k+1 by more than 0.2.
    #[arg(long)]
    pub check: bool,
}

/// Keys accepted in a JSON config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub case: Option<String>,
    pub degree: Option<usize>,
    pub nx: Option<usize>,
    pub nt: Option<usize>,
    pub refinements: Option<Vec<(usize, usize)>>,
    pub out: Option<PathBuf>,
    pub lambda: Option<f64>,
    pub alpha_policy: Option<AlphaPolicyArg>,
    pub headon_literal_sign: Option<bool>,
    pub snapshot_times: Option<Vec<f64>>,
    pub check: Option<bool>,
}

impl FileConfig {
    pub fn parse(text: &str, origin: &Path) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("{}: {e}", origin.display())))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path)
    }
}

/// Fully resolved run description.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub case: CaseSpec,
    pub degree: usize,
    /// (Nx, Nt) rows for accuracy and diagnose.
    pub rows: Vec<(usize, usize)>,
    /// Cell count and step rule for single runs.
    pub n_cells: usize,
    pub dt_rule: DtRule,
    pub out_dir: PathBuf,
    pub alpha_policy: AlphaPolicy,
    pub snapshot_times: Vec<f64>,
    pub check: bool,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Merges flags over the config file over defaults and validates.
/// `env_root` is the value of [`OUTPUT_ROOT_ENV`], if set.
pub fn resolve(command: CommandKind, args: &RunArgs, env_root: Option<PathBuf>) -> CliResult<RunConfig> {
    let file = match &args.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    resolve_with(command, args, &file, env_root)
}

pub fn resolve_with(command: CommandKind, args: &RunArgs, file: &FileConfig, env_root: Option<PathBuf>) -> CliResult<RunConfig> {
    let case_str = args.case.clone().or_else(|| file.case.clone());
    let id = match (command, case_str.as_deref()) {
        (CommandKind::Blowup, None) => CaseId::Blowup,
        (CommandKind::Headon, None) => CaseId::Headon,
        (_, None) => return Err(config_err(format!("{} needs --case", command.as_str()))),
        (_, Some(s)) => CaseId::parse(s).ok_or_else(|| config_err(format!("unknown case '{s}'")))?,
    };
    match command {
        CommandKind::Blowup if id != CaseId::Blowup => {
            return Err(config_err(format!("blowup conflicts with --case {}", id.name())))
        }
        CommandKind::Headon if id != CaseId::Headon => {
            return Err(config_err(format!("headon conflicts with --case {}", id.name())))
        }
        CommandKind::Accuracy | CommandKind::Diagnose if !id.is_accuracy() => {
            return Err(config_err(format!("{} needs an accuracy case, got {}", command.as_str(), id.name())))
        }
        _ => {}
    }

    let mut case = case_catalog(id);
    let literal = args.headon_literal_sign || file.headon_literal_sign.unwrap_or(false);
    if literal {
        if id != CaseId::Headon {
            return Err(config_err("--headon-literal-sign only applies to the headon case"));
        }
        case.headon_sign = HeadonSign::Literal;
    }
    if let Some(lambda) = args.lambda.or(file.lambda) {
        let p = case.params;
        case.params = AbcdParams::with_lambda(p.a, p.b, p.c, p.d, lambda).map_err(|e| config_err(e.to_string()))?;
    }

    let collision = matches!(id, CaseId::Blowup | CaseId::Headon);
    let default_degree = if collision { 2 } else { 1 };
    let degree = args.degree.or(file.degree).unwrap_or(default_degree);
    if !SUPPORTED_DEGREES.contains(&degree) {
        return Err(config_err(format!("degree {degree} is not supported (use 1, 2 or 3)")));
    }

    let nx = args.nx.or(file.nx);
    let nt = args.nt.or(file.nt);
    if nt.is_some() && nx.is_none() && !collision {
        return Err(config_err("--nt requires --nx"));
    }
    if file.refinements.is_some() && nx.is_some() {
        return Err(config_err("refinements and nx are mutually exclusive"));
    }
    if let Some(0) = nx {
        return Err(config_err("nx must be at least 2"));
    }
    // Steps per cell on the catalog ladder.
    let steps_per_cell = case.refinements.first().map(|&(n, t)| t / n).unwrap_or(1);

    let rows = match (command, &file.refinements, nx) {
        (_, Some(r), _) => r.clone(),
        (_, None, Some(n)) => vec![(n, nt.unwrap_or(n * steps_per_cell))],
        (CommandKind::Diagnose, None, None) => case.refinements.iter().copied().filter(|r| (40..=160).contains(&r.0)).collect(),
        _ => case.refinements.clone(),
    };
    if rows.iter().any(|&(n, t)| n < 2 || t == 0) {
        return Err(config_err("every row needs at least 2 cells and 1 step"));
    }

    let (n_cells, dt_rule) = if collision {
        let n = nx.unwrap_or(case.default_cells);
        let rule = match nt {
            Some(t) => DtRule::FixedSteps { n_steps: t },
            None => case.dt_rule.clone().expect("collision cases carry a step rule"),
        };
        (n, rule)
    } else {
        let n = nx.unwrap_or(80);
        (n, DtRule::FixedSteps {
            n_steps: nt.unwrap_or(n * steps_per_cell),
        })
    };
    if n_cells < 2 {
        return Err(config_err("nx must be at least 2"));
    }
    dt_rule.validate(case.t_final).map_err(|e| config_err(e.to_string()))?;

    let snapshot_times = match args.snapshot_times.clone().or_else(|| file.snapshot_times.clone()) {
        Some(s) => s,
        None if collision => case.snapshot_times.clone(),
        None => vec![0.0, case.t_final],
    };
    if let Some(bad) = snapshot_times.iter().find(|&&s| !(0.0..=case.t_final).contains(&s)) {
        return Err(config_err(format!("snapshot time {bad} lies outside [0, {}]", case.t_final)));
    }

    let root = args
        .out
        .clone()
        .or_else(|| file.out.clone())
        .or(env_root)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT));
    let out_dir = root.join(format!("{}-{}-k{}", command.as_str(), id.name(), degree));

    Ok(RunConfig {
        command,
        case,
        degree,
        rows,
        n_cells,
        dt_rule,
        out_dir,
        alpha_policy: args.alpha_policy.or(file.alpha_policy).map(Into::into).unwrap_or_default(),
        snapshot_times,
        check: args.check || file.check.unwrap_or(false),
    })
}
