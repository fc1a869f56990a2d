//! Three-stage SSP Runge–Kutta time stepping and the simulation driver.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::cases::{CaseSpec, DtRule};
use crate::error::{Error, Result};
use crate::field::{DGField, DgSpace};
use crate::mesh::Mesh1D;
use crate::operators::{compute_alpha, conserved_quantities, spatial_residual, EvolutionOperator, SourceFn};
use crate::params::{AbcdParams, AlphaPolicy};
use crate::projection::init_state;

/// Anything that can be linearly combined, `a·self + b·other`.
pub trait RkState: Sized {
    fn combine(&self, a: f64, other: &Self, b: f64) -> Self;
}

impl RkState for f64 {
    fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        a * self + b * other
    }
}

impl RkState for Vec<f64> {
    fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        self.iter().zip(other).map(|(x, y)| a * x + b * y).collect()
    }
}

impl RkState for (DGField, DGField) {
    fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        (
            DGField::lin_comb(a, &self.0, b, &other.0),
            DGField::lin_comb(a, &self.1, b, &other.1),
        )
    }
}

/// One Shu–Osher SSP-RK3 step of y' = L(y, t):
///
/// y¹ = yⁿ + dt L(yⁿ, tⁿ)
/// y² = ¾ yⁿ + ¼ (y¹ + dt L(y¹, tⁿ + dt))
/// yⁿ⁺¹ = ⅓ yⁿ + ⅔ (y² + dt L(y², tⁿ + dt/2))
///
/// `stage` receives the stage index (0, 1, 2) alongside state and time.
pub fn ssp_rk3<S, E>(y: &S, t: f64, dt: f64, mut rhs: impl FnMut(usize, &S, f64) -> core::result::Result<S, E>) -> core::result::Result<S, E>
where
    S: RkState,
{
    let l0 = rhs(0, y, t)?;
    let y1 = y.combine(1.0, &l0, dt);
    let l1 = rhs(1, &y1, t + dt)?;
    let y2 = y.combine(0.75, &y1.combine(1.0, &l1, dt), 0.25);
    let l2 = rhs(2, &y2, t + 0.5 * dt)?;
    Ok(y.combine(1.0 / 3.0, &y2.combine(1.0, &l2, dt), 2.0 / 3.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub eta: DGField,
    pub u: DGField,
}

/// Advances (η_h, u_h) with a fixed operator, parameters and optional source.
pub struct Stepper<'a> {
    pub op: &'a EvolutionOperator,
    pub params: AbcdParams,
    pub source: Option<SourceFn<'a>>,
    pub alpha_policy: AlphaPolicy,
    /// α from the initial data, used by [`AlphaPolicy::Initial`].
    pub alpha_initial: f64,
    /// ‖η_h‖_∞ above this is treated as blow-up.
    pub blowup_threshold: f64,
}

impl Stepper<'_> {
    /// Stage derivative (η_t, u_t) at (η, u, t).
    pub fn derivative(&self, eta: &DGField, u: &DGField, t: f64, alpha: f64) -> Result<(DGField, DGField)> {
        let (r_eta, r_u) = spatial_residual(eta, u, t, &self.params, alpha, self.source)?;
        Ok(self.op.recover_time_derivatives(&r_eta, &r_u))
    }

    /// One SSP-RK3 step; on blow-up the caller keeps the pre-step state.
    pub fn step(&self, state: &SimState, dt: f64) -> Result<SimState> {
        assert!(dt > 0.0, "time step must be positive");
        let step_alpha = match self.alpha_policy {
            AlphaPolicy::PerStep => compute_alpha(&state.eta, &state.u),
            AlphaPolicy::Initial => self.alpha_initial,
            AlphaPolicy::PerStage => f64::NAN,
        };
        let y = (state.eta.clone(), state.u.clone());
        let (eta, u) = ssp_rk3(&y, state.t, dt, |_, s, t| {
            let alpha = match self.alpha_policy {
                AlphaPolicy::PerStage => compute_alpha(&s.0, &s.1),
                _ => step_alpha,
            };
            self.derivative(&s.0, &s.1, t, alpha)
        })?;
        let t = state.t + dt;
        if !(eta.all_finite() && u.all_finite()) || exceeds(&eta, self.blowup_threshold) {
            return Err(Error::BlowUp { t });
        }
        Ok(SimState { t, eta, u })
    }
}

/// Cheap modal bound first, sampled max-norm only when the bound trips.
fn exceeds(f: &DGField, threshold: f64) -> bool {
    let nm = f.space().n_modes();
    let tr = &f.space().basis.trace_right;
    let bound = f
        .coeffs()
        .chunks(nm)
        .map(|c| c.iter().zip(tr).map(|(a, p)| a.abs() * p).sum::<f64>())
        .fold(0.0, f64::max);
    bound > threshold && f.linf_norm() > threshold
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunStatus {
    Completed,
    /// Stopped early; `last_valid_t` is the time of the last finite state.
    BlowUp { last_valid_t: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservedSample {
    pub t: f64,
    pub mass_eta: f64,
    pub mass_u: f64,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub alpha_policy: AlphaPolicy,
    pub snapshot_times: Vec<f64>,
    pub blowup_threshold: f64,
    /// Record ‖η_h‖_∞ every this many steps (0 disables).
    pub norm_log_every: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            alpha_policy: AlphaPolicy::PerStep,
            snapshot_times: Vec::new(),
            blowup_threshold: 1e6,
            norm_log_every: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<SimState>,
    pub conserved: Vec<ConservedSample>,
    /// (t, ‖η_h‖_∞)
    pub max_eta: Vec<(f64, f64)>,
    pub status: RunStatus,
    pub steps: usize,
    pub final_state: SimState,
}

impl Trajectory {
    pub fn snapshot_at(&self, t: f64) -> Option<&SimState> {
        self.snapshots.iter().find(|s| s.t == t)
    }

    /// Largest |I(t) − I(0)| over the log, for η and u.
    pub fn conservation_drift(&self) -> (f64, f64) {
        let Some(first) = self.conserved.first() else {
            return (0.0, 0.0);
        };
        self.conserved.iter().fold((0.0, 0.0), |(de, du), s| {
            (
                f64::max(de, (s.mass_eta - first.mass_eta).abs()),
                f64::max(du, (s.mass_u - first.mass_u).abs()),
            )
        })
    }
}

/// Steps (η_h, u_h) from t = 0 to the case's final time.
///
/// Fixed-count rules take exactly `n_steps` steps unless a snapshot time
/// falls strictly between two grid times, in which case that step is
/// split. Every snapshot and the final time are landed on exactly.
pub fn run_simulation(
    case: &CaseSpec,
    n_cells: usize,
    degree: usize,
    dt_rule: &DtRule,
    options: &RunOptions,
) -> Result<Trajectory> {
    let mesh = Mesh1D::uniform(case.x_left, case.x_right, n_cells)?;
    let space = DgSpace::new(mesh, degree)?;
    let (eta, u) = init_state(case, &space);
    run_from(case, &space, SimState { t: 0.0, eta, u }, dt_rule, options)
}

pub fn run_from(
    case: &CaseSpec,
    space: &Arc<DgSpace>,
    initial: SimState,
    dt_rule: &DtRule,
    options: &RunOptions,
) -> Result<Trajectory> {
    let t_final = case.t_final;
    dt_rule.validate(t_final)?;
    let mut snaps: Vec<f64> = options.snapshot_times.clone();
    for &s in &snaps {
        if !(0.0..=t_final).contains(&s) {
            return Err(Error::SnapshotOutOfRange(s));
        }
    }
    snaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    snaps.dedup();

    let op = EvolutionOperator::build(space, &case.params)?;
    let source_closure = |x: f64, t: f64| case.source_at(x, t).unwrap_or((0.0, 0.0));
    let stepper = Stepper {
        op: &op,
        params: case.params,
        source: case.has_source().then_some(&source_closure as SourceFn<'_>),
        alpha_policy: options.alpha_policy,
        alpha_initial: compute_alpha(&initial.eta, &initial.u),
        blowup_threshold: options.blowup_threshold,
    };

    let mut log = Logger::new(options.norm_log_every);
    let mut snapshots = Vec::new();
    let mut next_snap = 0;
    let mut state = initial;
    log.record(&state, 0);
    while next_snap < snaps.len() && snaps[next_snap] <= state.t {
        snapshots.push(state.clone());
        next_snap += 1;
    }

    let h = space.mesh.h_max;
    let mut steps = 0usize;
    let mut status = RunStatus::Completed;
    // Step index for fixed-count rules; the grid time is n·T/N.
    let mut grid_index = 0usize;
    while state.t < t_final {
        let (target, nominal_dt, on_grid) = match dt_rule {
            DtRule::FixedSteps { n_steps } => {
                let next_grid = if grid_index + 1 >= *n_steps {
                    t_final
                } else {
                    (grid_index + 1) as f64 * t_final / *n_steps as f64
                };
                (next_grid, next_grid - state.t, true)
            }
            DtRule::PiecewiseFactor { segments } => {
                let (seg_end, factor) = segments
                    .iter()
                    .copied()
                    .find(|&(end, _)| end > state.t)
                    .unwrap_or(*segments.last().unwrap());
                (seg_end.min(t_final), factor * h, false)
            }
        };
        let mut land = target;
        if next_snap < snaps.len() && snaps[next_snap] < land {
            land = snaps[next_snap];
        }
        let (dt, t_new) = if state.t + nominal_dt * (1.0 + 1e-9) >= land {
            (land - state.t, land)
        } else {
            (nominal_dt, state.t + nominal_dt)
        };
        match stepper.step(&state, dt) {
            Ok(mut next) => {
                next.t = t_new;
                state = next;
            }
            Err(Error::BlowUp { .. }) => {
                status = RunStatus::BlowUp {
                    last_valid_t: state.t,
                };
                break;
            }
            Err(e) => return Err(e),
        }
        steps += 1;
        if on_grid && t_new == target {
            grid_index += 1;
        }
        log.record(&state, steps);
        while next_snap < snaps.len() && snaps[next_snap] <= state.t {
            snapshots.push(state.clone());
            next_snap += 1;
        }
    }
    if state.t >= t_final && log.max_eta.last().map(|m| m.0) != Some(state.t) {
        log.max_eta.push((state.t, state.eta.linf_norm()));
    }
    Ok(Trajectory {
        snapshots,
        conserved: log.conserved,
        max_eta: log.max_eta,
        status,
        steps,
        final_state: state,
    })
}

struct Logger {
    every: usize,
    conserved: Vec<ConservedSample>,
    max_eta: Vec<(f64, f64)>,
}

impl Logger {
    fn new(every: usize) -> Self {
        Self {
            every,
            conserved: Vec::new(),
            max_eta: Vec::new(),
        }
    }

    fn record(&mut self, s: &SimState, step: usize) {
        let (mass_eta, mass_u) = conserved_quantities(&s.eta, &s.u);
        self.conserved.push(ConservedSample { t: s.t, mass_eta, mass_u });
        if self.every > 0 && step.is_multiple_of(self.every) {
            self.max_eta.push((s.t, s.eta.linf_norm()));
        }
    }
}
