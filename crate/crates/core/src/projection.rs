//! L² and Radau projections into V_h^k.

use alloc::sync::Arc;

use crate::cases::CaseSpec;
use crate::field::{DGField, DgSpace};

/// Cellwise L² projection: ∫_{I_j} (Pg − g) v = 0 for all v ∈ P^k(I_j).
pub fn l2_project(g: impl Fn(f64) -> f64, space: &Arc<DgSpace>) -> DGField {
    let mut f = DGField::zeros(space);
    let nm = space.n_modes();
    let b = &space.basis;
    let mesh = &space.mesh;
    let coeffs = f.coeffs_mut();
    for j in 0..mesh.n_cells() {
        for (q, (&xi, &w)) in b.rule.points.iter().zip(&b.rule.weights).enumerate() {
            let gv = w * g(mesh.map(j, xi));
            for i in 0..nm {
                coeffs[j * nm + i] += gv * b.phi_at(q, i);
            }
        }
    }
    f
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RadauSide {
    Left,
    Right,
}

/// P⁺: orthogonal to P^{k−1} on each cell and exact at the left endpoint.
pub fn radau_project_plus(g: impl Fn(f64) -> f64, space: &Arc<DgSpace>) -> DGField {
    radau_project(g, space, RadauSide::Left)
}

/// P⁻: orthogonal to P^{k−1} on each cell and exact at the right endpoint.
pub fn radau_project_minus(g: impl Fn(f64) -> f64, space: &Arc<DgSpace>) -> DGField {
    radau_project(g, space, RadauSide::Right)
}

fn radau_project(g: impl Fn(f64) -> f64, space: &Arc<DgSpace>, side: RadauSide) -> DGField {
    // With orthonormal modes the local (k+1)×(k+1) system is lower
    // triangular: the k orthogonality rows fix modes 0..k−1 to their L²
    // values and the endpoint row then determines mode k.
    let mut f = l2_project(&g, space);
    let nm = space.n_modes();
    let k = space.degree();
    let b = &space.basis;
    let mesh = &space.mesh;
    let trace = match side {
        RadauSide::Left => &b.trace_left,
        RadauSide::Right => &b.trace_right,
    };
    assert!(trace[k] != 0.0, "singular Radau system");
    let coeffs = f.coeffs_mut();
    for j in 0..mesh.n_cells() {
        let x_end = match side {
            RadauSide::Left => mesh.nodes[j],
            RadauSide::Right => mesh.nodes[j + 1],
        };
        let cell = &mut coeffs[j * nm..(j + 1) * nm];
        let lower: f64 = (0..k).map(|i| cell[i] * trace[i]).sum();
        cell[k] = (g(x_end) - lower) / trace[k];
    }
    f
}

/// Numerical initial data (η_h, u_h) = (P⁺η(·,0), P⁺u(·,0)).
///
/// The auxiliary variables are not stored; `operators::compute_aux` rebuilds
/// them from this pair with exactly the defining equations for v_h, w_h, p_h.
pub fn init_state(case: &CaseSpec, space: &Arc<DgSpace>) -> (DGField, DGField) {
    let eta = radau_project_plus(|x| case.initial_eta(x), space);
    let u = radau_project_plus(|x| case.initial_u(x), space);
    (eta, u)
}
