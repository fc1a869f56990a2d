//! LDG operators: auxiliary-variable recovery, the Lax–Friedrichs flux,
//! the spatial residual and the implicit operators that turn
//! d/dt(η − bθ) and d/dt(u − dp) back into η_t and u_t.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{DGField, DgSpace, InterfaceTraces};
use crate::linalg::{mat_mul, CyclicBlockTridiagonal, CyclicFactorization};
use crate::params::AbcdParams;
use crate::projection::{l2_project, radau_project_plus};

/// Interface value used by [`weak_deriv`].
#[derive(Debug, Clone, Copy)]
pub enum FluxRule<'a> {
    /// f̂ = f⁺
    PlusTrace,
    /// f̂ = f⁻
    MinusTrace,
    /// f̂ = f⁺ + sign·λ·[s]/2
    PlusTraceWithJumpPenalty { sign: f64, jump_source: &'a DGField },
    /// f̂ = f⁻ + sign·λ·[s]/2
    MinusTraceWithJumpPenalty { sign: f64, jump_source: &'a DGField },
}

/// Discrete derivative G ∈ V_h^k of `f` defined cell by cell through
///
/// ∫ G φ = −∫ f φ_x + f̂_{j+1/2} φ⁻_{j+1/2} − f̂_{j−1/2} φ⁺_{j−1/2}.
pub fn weak_deriv(f: &DGField, rule: FluxRule<'_>, lambda: f64) -> DGField {
    let traces = f.interface_traces();
    let flux: Vec<f64> = match rule {
        FluxRule::PlusTrace => traces.plus,
        FluxRule::MinusTrace => traces.minus,
        FluxRule::PlusTraceWithJumpPenalty { sign, jump_source } => {
            penalized(traces.plus, sign * lambda, jump_source, f)
        }
        FluxRule::MinusTraceWithJumpPenalty { sign, jump_source } => {
            penalized(traces.minus, sign * lambda, jump_source, f)
        }
    };
    let space = f.space();
    let mut out = DGField::zeros(space);
    let nm = space.n_modes();
    let b = &space.basis;
    let n = space.n_cells();
    let coeffs = out.coeffs_mut();
    for j in 0..n {
        let scale = 2.0 / space.mesh.widths[j];
        let c = f.cell(j);
        let f_right = flux[j];
        let f_left = flux[(j + n - 1) % n];
        for m in 0..nm {
            let vol: f64 = (0..nm).map(|i| b.stiffness[m * nm + i] * c[i]).sum();
            coeffs[j * nm + m] = scale * (-vol + b.trace_right[m] * f_right - b.trace_left[m] * f_left);
        }
    }
    out
}

fn penalized(mut base: Vec<f64>, weight: f64, jump_source: &DGField, f: &DGField) -> Vec<f64> {
    assert!(f.conformable(jump_source), "jump source lives on a different space");
    if weight != 0.0 {
        let t = jump_source.interface_traces();
        for (j, v) in base.iter_mut().enumerate() {
            *v += 0.5 * weight * t.jump(j);
        }
    }
    base
}

/// The six auxiliary variables of the first-order rewrite.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxFields {
    /// ≈ u_x
    pub v: DGField,
    /// ≈ η_x
    pub w: DGField,
    /// ≈ v_x with û = u⁺, v̂ = v⁻
    pub p: DGField,
    /// ≈ v_x with v̌ = v⁺ + sign(c)λ[w]/2
    pub q: DGField,
    /// ≈ w_x with ŵ = w⁻
    pub theta: DGField,
    /// ≈ w_x with w̌ = w⁻ + sign(a)λ[v]/2
    pub zeta: DGField,
}

pub fn compute_aux(eta: &DGField, u: &DGField, params: &AbcdParams) -> AuxFields {
    let lambda = params.lambda;
    let v = weak_deriv(u, FluxRule::PlusTrace, lambda);
    let w = weak_deriv(eta, FluxRule::PlusTrace, lambda);
    let p = weak_deriv(&v, FluxRule::MinusTrace, lambda);
    let theta = weak_deriv(&w, FluxRule::MinusTrace, lambda);
    let (q, zeta) = penalized_second_derivatives(&v, &w, params);
    AuxFields {
        v,
        w,
        p,
        q,
        theta,
        zeta,
    }
}

fn penalized_second_derivatives(v: &DGField, w: &DGField, params: &AbcdParams) -> (DGField, DGField) {
    let q = weak_deriv(
        v,
        FluxRule::PlusTraceWithJumpPenalty {
            sign: params.sign_c(),
            jump_source: w,
        },
        params.lambda,
    );
    let zeta = weak_deriv(
        w,
        FluxRule::MinusTraceWithJumpPenalty {
            sign: params.sign_a(),
            jump_source: v,
        },
        params.lambda,
    );
    (q, zeta)
}

/// α = max(|u_h| + sqrt|1 + η_h|) over all assembly quadrature points and
/// both one-sided traces of every interface.
pub fn compute_alpha(eta: &DGField, u: &DGField) -> f64 {
    assert!(eta.conformable(u));
    let space = eta.space();
    let b = &space.basis;
    let speed = |e: f64, v: f64| v.abs() + libm::sqrt((1.0 + e).abs());
    let mut ev = vec![0.0; b.n_quad()];
    let mut uv = vec![0.0; b.n_quad()];
    let mut alpha = 0.0f64;
    for j in 0..space.n_cells() {
        let (ce, cu) = (eta.cell(j), u.cell(j));
        b.eval_at_quad(ce, &mut ev);
        b.eval_at_quad(cu, &mut uv);
        for (e, v) in ev.iter().zip(&uv) {
            alpha = alpha.max(speed(*e, *v));
        }
        alpha = alpha.max(speed(b.eval_left(ce), b.eval_left(cu)));
        alpha = alpha.max(speed(b.eval_right(ce), b.eval_right(cu)));
    }
    alpha
}

/// Lax–Friedrichs flux (F̂₁, F̂₂) at every interface.
///
/// {ηu} and {u²} average the one-sided products, not the product of averages.
pub fn lf_flux(eta: &InterfaceTraces, u: &InterfaceTraces, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(eta.len(), u.len());
    let n = eta.len();
    let mut f1 = Vec::with_capacity(n);
    let mut f2 = Vec::with_capacity(n);
    for j in 0..n {
        let (em, ep) = (eta.minus[j], eta.plus[j]);
        let (um, up) = (u.minus[j], u.plus[j]);
        let avg_eta_u = 0.5 * (em * um + ep * up);
        let avg_u2 = 0.5 * (um * um + up * up);
        f1.push(u.average(j) + avg_eta_u - 0.5 * alpha * eta.jump(j));
        f2.push(eta.average(j) + 0.5 * avg_u2 - 0.5 * alpha * u.jump(j));
    }
    (f1, f2)
}

/// Right-hand side source pair (s₁, s₂) evaluated at (x, t).
pub type SourceFn<'a> = &'a (dyn Fn(f64, f64) -> (f64, f64) + Sync);

/// Modal coefficients of R_η, R_u such that
/// d/dt(η_h − bθ_h) = R_η and d/dt(u_h − d p_h) = R_u in V_h^k.
pub fn spatial_residual(
    eta: &DGField,
    u: &DGField,
    t: f64,
    params: &AbcdParams,
    alpha: f64,
    source: Option<SourceFn<'_>>,
) -> Result<(DGField, DGField)> {
    assert!(eta.conformable(u), "η_h and u_h live on different spaces");
    let space = eta.space();
    let lambda = params.lambda;
    let need_dispersion = params.a != 0.0 || params.c != 0.0;
    let (q, zeta) = if need_dispersion {
        let v = weak_deriv(u, FluxRule::PlusTrace, lambda);
        let w = weak_deriv(eta, FluxRule::PlusTrace, lambda);
        let (q, zeta) = penalized_second_derivatives(&v, &w, params);
        (Some(q), Some(zeta))
    } else {
        (None, None)
    };

    let eta_tr = eta.interface_traces();
    let u_tr = u.interface_traces();
    let (mut f1, mut f2) = lf_flux(&eta_tr, &u_tr, alpha);
    if let Some(q) = &q {
        let qt = q.interface_traces();
        f1.iter_mut().zip(&qt.minus).for_each(|(f, qm)| *f += params.a * qm);
    }
    if let Some(zeta) = &zeta {
        let zt = zeta.interface_traces();
        f2.iter_mut().zip(&zt.minus).for_each(|(f, zm)| *f += params.c * zm);
    }

    let b = &space.basis;
    let mesh = &space.mesh;
    let nm = space.n_modes();
    let nq = b.n_quad();
    let n = space.n_cells();
    let mut r_eta = DGField::zeros(space);
    let mut r_u = DGField::zeros(space);
    let mut ev = vec![0.0; nq];
    let mut uv = vec![0.0; nq];
    let mut qv = vec![0.0; nq];
    let mut zv = vec![0.0; nq];
    {
        let re = r_eta.coeffs_mut();
        let ru = r_u.coeffs_mut();
        for j in 0..n {
            b.eval_at_quad(eta.cell(j), &mut ev);
            b.eval_at_quad(u.cell(j), &mut uv);
            if let Some(q) = &q {
                b.eval_at_quad(q.cell(j), &mut qv);
            }
            if let Some(zeta) = &zeta {
                b.eval_at_quad(zeta.cell(j), &mut zv);
            }
            let scale = 2.0 / mesh.widths[j];
            let jl = (j + n - 1) % n;
            for m in 0..nm {
                let mut vol1 = 0.0;
                let mut vol2 = 0.0;
                for qp in 0..nq {
                    let wd = b.rule.weights[qp] * b.dphi_at(qp, m);
                    let g1 = uv[qp] + uv[qp] * ev[qp] + params.a * qv[qp];
                    let g2 = ev[qp] + 0.5 * uv[qp] * uv[qp] + params.c * zv[qp];
                    vol1 += wd * g1;
                    vol2 += wd * g2;
                }
                re[j * nm + m] = scale * (vol1 - f1[j] * b.trace_right[m] + f1[jl] * b.trace_left[m]);
                ru[j * nm + m] = scale * (vol2 - f2[j] * b.trace_right[m] + f2[jl] * b.trace_left[m]);
            }
            if let Some(s) = source {
                for (qp, &xi) in b.rule.points.iter().enumerate() {
                    let (s1, s2) = s(mesh.map(j, xi), t);
                    let w = b.rule.weights[qp];
                    for m in 0..nm {
                        re[j * nm + m] += w * s1 * b.phi_at(qp, m);
                        ru[j * nm + m] += w * s2 * b.phi_at(qp, m);
                    }
                }
            }
        }
    }
    if !(r_eta.all_finite() && r_u.all_finite()) {
        return Err(Error::BlowUp { t });
    }
    Ok((r_eta, r_u))
}

/// Block matrix of [`weak_deriv`] for the pure plus- or minus-trace rules.
fn weak_deriv_matrix(space: &DgSpace, plus: bool) -> CyclicBlockTridiagonal {
    let nm = space.n_modes();
    let n = space.n_cells();
    let b = &space.basis;
    let mut mat = CyclicBlockTridiagonal::zeros(nm, n);
    for j in 0..n {
        let s = 2.0 / space.mesh.widths[j];
        for m in 0..nm {
            for i in 0..nm {
                let e = m * nm + i;
                let vol = -b.stiffness[e];
                if plus {
                    mat.diag[j][e] = s * (vol - b.trace_left[m] * b.trace_left[i]);
                    mat.upper[j][e] = s * b.trace_right[m] * b.trace_left[i];
                } else {
                    mat.diag[j][e] = s * (vol + b.trace_right[m] * b.trace_right[i]);
                    mat.lower[j][e] = -s * b.trace_left[m] * b.trace_right[i];
                }
            }
        }
    }
    mat
}

/// K = W⁻ W⁺, the map η ↦ θ (equivalently u ↦ p): a plus-trace derivative
/// followed by a minus-trace derivative.
pub fn second_derivative_matrix(space: &DgSpace) -> CyclicBlockTridiagonal {
    let wp = weak_deriv_matrix(space, true);
    let wm = weak_deriv_matrix(space, false);
    let nm = space.n_modes();
    let n = space.n_cells();
    let mut k = CyclicBlockTridiagonal::zeros(nm, n);
    for j in 0..n {
        let jl = (j + n - 1) % n;
        k.lower[j] = mat_mul(nm, &wm.lower[j], &wp.diag[jl]);
        let mut d = mat_mul(nm, &wm.lower[j], &wp.upper[jl]);
        let dd = mat_mul(nm, &wm.diag[j], &wp.diag[j]);
        d.iter_mut().zip(&dd).for_each(|(x, y)| *x += y);
        k.diag[j] = d;
        k.upper[j] = mat_mul(nm, &wm.diag[j], &wp.upper[j]);
    }
    k
}

/// I − s·K as a block matrix.
fn shifted(k: &CyclicBlockTridiagonal, s: f64) -> CyclicBlockTridiagonal {
    let mut a = CyclicBlockTridiagonal::identity(k.m, k.n);
    for j in 0..k.n {
        for (dst, src) in [
            (&mut a.lower[j], &k.lower[j]),
            (&mut a.diag[j], &k.diag[j]),
            (&mut a.upper[j], &k.upper[j]),
        ] {
            dst.iter_mut().zip(src).for_each(|(x, y)| *x -= s * y);
        }
    }
    a
}

/// Factorized (I − bK) and (I − dK), built once per mesh, degree and parameters.
///
/// Working in mass-normalized coefficients, (Mass − b·Mass·K) η_t = Mass·R_η
/// reduces to (I − bK) η_t = R_η. A zero coefficient leaves the identity.
#[derive(Debug, Clone)]
pub struct EvolutionOperator {
    space: Arc<DgSpace>,
    params: AbcdParams,
    eta_system: Option<(CyclicBlockTridiagonal, CyclicFactorization)>,
    u_system: Option<(CyclicBlockTridiagonal, CyclicFactorization)>,
}

impl EvolutionOperator {
    pub fn build(space: &Arc<DgSpace>, params: &AbcdParams) -> Result<Self> {
        if params.b < 0.0 || params.d < 0.0 {
            return Err(Error::InvalidParams(alloc::format!(
                "b and d must be non-negative, got b={}, d={}",
                params.b,
                params.d
            )));
        }
        let needs_k = params.b > 0.0 || params.d > 0.0;
        let k = needs_k.then(|| second_derivative_matrix(space));
        let singular = |which| Error::SingularOperator {
            which,
            a: params.a,
            b: params.b,
            c: params.c,
            d: params.d,
        };
        let build = |coef: f64, which: &'static str| -> Result<Option<_>> {
            match &k {
                Some(k) if coef > 0.0 => {
                    let a = shifted(k, coef);
                    let f = a.factorize().map_err(|_| singular(which))?;
                    Ok(Some((a, f)))
                }
                _ => Ok(None),
            }
        };
        Ok(Self {
            space: Arc::clone(space),
            params: *params,
            eta_system: build(params.b, "eta")?,
            u_system: build(params.d, "u")?,
        })
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        &self.space
    }

    pub fn params(&self) -> &AbcdParams {
        &self.params
    }

    /// (I − bK) x
    pub fn apply_eta(&self, x: &[f64]) -> Vec<f64> {
        match &self.eta_system {
            Some((a, _)) => a.matvec(x),
            None => x.to_vec(),
        }
    }

    /// (I − dK) x
    pub fn apply_u(&self, x: &[f64]) -> Vec<f64> {
        match &self.u_system {
            Some((a, _)) => a.matvec(x),
            None => x.to_vec(),
        }
    }

    pub fn solve_eta(&self, rhs: &[f64]) -> Vec<f64> {
        match &self.eta_system {
            Some((_, f)) => f.solve(rhs),
            None => rhs.to_vec(),
        }
    }

    pub fn solve_u(&self, rhs: &[f64]) -> Vec<f64> {
        match &self.u_system {
            Some((_, f)) => f.solve(rhs),
            None => rhs.to_vec(),
        }
    }

    /// (η_t, u_t) from the residuals of [`spatial_residual`].
    pub fn recover_time_derivatives(&self, r_eta: &DGField, r_u: &DGField) -> (DGField, DGField) {
        assert!(r_eta.conformable(r_u));
        let space = r_eta.space();
        (
            DGField::from_coeffs(space, self.solve_eta(r_eta.coeffs())),
            DGField::from_coeffs(space, self.solve_u(r_u.coeffs())),
        )
    }
}

/// (∫η_h, ∫u_h); both are invariants of the semi-discrete scheme.
pub fn conserved_quantities(eta: &DGField, u: &DGField) -> (f64, f64) {
    (eta.integral(), u.integral())
}

/// Exact fields at the diagnostic time.
pub struct ExactSnapshot<'a> {
    pub eta: &'a dyn Fn(f64) -> f64,
    pub u: &'a dyn Fn(f64) -> f64,
    pub eta_x: &'a dyn Fn(f64) -> f64,
    pub u_x: &'a dyn Fn(f64) -> f64,
}

/// Projection-based error split ξ = P*g − g_h and the ratios that
/// control ξ^u by ξ^v and ξ^η by ξ^w.
#[derive(Debug, Clone)]
pub struct ErrorSplitDiagnostic {
    pub xi_u: DGField,
    pub xi_v: DGField,
    pub xi_eta: DGField,
    pub xi_w: DGField,
    /// ‖ξ^u_x‖ / ‖ξ^v‖
    pub u_deriv_ratio: Option<f64>,
    /// h^{−1/2} |[ξ^u]| / ‖ξ^v‖
    pub u_jump_ratio: Option<f64>,
    /// ‖ξ^η_x‖ / ‖ξ^w‖
    pub eta_deriv_ratio: Option<f64>,
    /// h^{−1/2} |[ξ^η]| / ‖ξ^w‖
    pub eta_jump_ratio: Option<f64>,
}

const XI_FLOOR: f64 = 1e-14;

pub fn xi_diagnostic(eta: &DGField, u: &DGField, aux: &AuxFields, exact: &ExactSnapshot<'_>) -> ErrorSplitDiagnostic {
    let space = eta.space();
    let xi_u = DGField::lin_comb(1.0, &radau_project_plus(exact.u, space), -1.0, u);
    let xi_eta = DGField::lin_comb(1.0, &radau_project_plus(exact.eta, space), -1.0, eta);
    let xi_v = DGField::lin_comb(1.0, &l2_project(exact.u_x, space), -1.0, &aux.v);
    let xi_w = DGField::lin_comb(1.0, &l2_project(exact.eta_x, space), -1.0, &aux.w);
    let inv_sqrt_h = 1.0 / libm::sqrt(space.mesh.h_max);
    let ratio = |num: f64, den: f64| (den >= XI_FLOOR).then(|| num / den);
    let (nv, nw) = (xi_v.l2_norm(), xi_w.l2_norm());
    ErrorSplitDiagnostic {
        u_deriv_ratio: ratio(xi_u.broken_deriv_l2(), nv),
        u_jump_ratio: ratio(inv_sqrt_h * xi_u.jump_seminorm(), nv),
        eta_deriv_ratio: ratio(xi_eta.broken_deriv_l2(), nw),
        eta_jump_ratio: ratio(inv_sqrt_h * xi_eta.jump_seminorm(), nw),
        xi_u,
        xi_v,
        xi_eta,
        xi_w,
    }
}
