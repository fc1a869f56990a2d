//! Convergence studies and the error-split diagnostic.

use alloc::vec::Vec;

use crate::cases::{CaseSpec, DtRule};
use crate::error::{Error, Result};
use crate::field::DgSpace;
use crate::mesh::Mesh1D;
use crate::operators::{compute_aux, xi_diagnostic, ErrorSplitDiagnostic, ExactSnapshot};
use crate::params::AlphaPolicy;
use crate::projection::init_state;
use crate::time::{run_from, RunOptions, RunStatus, SimState};

/// Interior sample count per cell for the max-norm error.
pub const LINF_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub nx: usize,
    pub nt: usize,
    pub l2_u: f64,
    pub l2_eta: f64,
    pub linf_u: f64,
    pub linf_eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateRow {
    pub l2_u: Option<f64>,
    pub l2_eta: Option<f64>,
    pub linf_u: Option<f64>,
    pub linf_eta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub rows: Vec<ErrorRow>,
    /// `rates[0]` is all-`None`; later rows compare against the previous one.
    pub rates: Vec<RateRow>,
}

/// log₂(e_{i−1}/e_i) for consecutive halvings; `None` where either error
/// is not a positive finite number.
pub fn eoc(errors: &[f64]) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(errors.len());
    for i in 0..errors.len() {
        if i == 0 {
            out.push(None);
            continue;
        }
        let (a, b) = (errors[i - 1], errors[i]);
        let ok = |e: f64| e.is_finite() && e > 0.0;
        out.push((ok(a) && ok(b)).then(|| libm::log2(a / b)));
    }
    out
}

impl ErrorReport {
    pub fn from_rows(rows: Vec<ErrorRow>) -> Self {
        let col = |f: fn(&ErrorRow) -> f64| eoc(&rows.iter().map(f).collect::<Vec<_>>());
        let (a, b, c, d) = (
            col(|r| r.l2_u),
            col(|r| r.l2_eta),
            col(|r| r.linf_u),
            col(|r| r.linf_eta),
        );
        let rates = (0..rows.len())
            .map(|i| RateRow {
                l2_u: a[i],
                l2_eta: b[i],
                linf_u: c[i],
                linf_eta: d[i],
            })
            .collect();
        Self { rows, rates }
    }

    pub fn last(&self) -> Option<(&ErrorRow, &RateRow)> {
        self.rows.last().zip(self.rates.last())
    }
}

/// Errors at the final time for one (Nx, Nt) row of an accuracy case.
pub fn run_accuracy_row(case: &CaseSpec, degree: usize, nx: usize, nt: usize, alpha_policy: AlphaPolicy) -> Result<ErrorRow> {
    if !case.has_exact_solution() {
        return Err(Error::NoExactSolution(case.id.name()));
    }
    let space = DgSpace::new(Mesh1D::uniform(case.x_left, case.x_right, nx)?, degree)?;
    let (eta, u) = init_state(case, &space);
    let opts = RunOptions {
        alpha_policy,
        ..Default::default()
    };
    let tr = run_from(case, &space, SimState { t: 0.0, eta, u }, &DtRule::FixedSteps { n_steps: nt }, &opts)?;
    if let RunStatus::BlowUp { last_valid_t } = tr.status {
        return Err(Error::BlowUp { t: last_valid_t });
    }
    let s = &tr.final_state;
    let t = s.t;
    let ex = |x: f64| case.exact(x, t).expect("accuracy case");
    Ok(ErrorRow {
        nx,
        nt,
        l2_u: s.u.l2_error(|x| ex(x).1),
        l2_eta: s.eta.l2_error(|x| ex(x).0),
        linf_u: s.u.linf_error(|x| ex(x).1, LINF_SAMPLES),
        linf_eta: s.eta.linf_error(|x| ex(x).0, LINF_SAMPLES),
    })
}

/// Runs the given (Nx, Nt) rows one after another.
pub fn run_accuracy_study(case: &CaseSpec, degree: usize, rows: &[(usize, usize)], alpha_policy: AlphaPolicy) -> Result<ErrorReport> {
    let rows = rows
        .iter()
        .map(|&(nx, nt)| run_accuracy_row(case, degree, nx, nt, alpha_policy))
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorReport::from_rows(rows))
}

/// Error-split ratios at the final time of an accuracy run.
pub fn run_diagnostic(case: &CaseSpec, degree: usize, nx: usize, nt: usize) -> Result<ErrorSplitDiagnostic> {
    if !case.has_exact_solution() {
        return Err(Error::NoExactSolution(case.id.name()));
    }
    let space = DgSpace::new(Mesh1D::uniform(case.x_left, case.x_right, nx)?, degree)?;
    let (eta, u) = init_state(case, &space);
    let tr = run_from(
        case,
        &space,
        SimState { t: 0.0, eta, u },
        &DtRule::FixedSteps { n_steps: nt },
        &RunOptions::default(),
    )?;
    if let RunStatus::BlowUp { last_valid_t } = tr.status {
        return Err(Error::BlowUp { t: last_valid_t });
    }
    let s = &tr.final_state;
    let t = s.t;
    let aux = compute_aux(&s.eta, &s.u, &case.params);
    let g = |x: f64| case.exact_with_gradient(x, t).expect("accuracy case");
    let (e, u, ex, ux) = (|x| g(x)[0], |x| g(x)[1], |x| g(x)[2], |x| g(x)[3]);
    Ok(xi_diagnostic(
        &s.eta,
        &s.u,
        &aux,
        &ExactSnapshot {
            eta: &e,
            u: &u,
            eta_x: &ex,
            u_x: &ux,
        },
    ))
}
