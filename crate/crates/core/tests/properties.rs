use std::sync::Arc;

use abcd_ldg_core::cases::{case_catalog, CaseId};
use abcd_ldg_core::field::DgSpace;
use abcd_ldg_core::operators::{compute_aux, weak_deriv};
use abcd_ldg_core::projection::{l2_project, radau_project_minus, radau_project_plus};
use abcd_ldg_core::time::{run_simulation, RunOptions};
use abcd_ldg_core::{AbcdParams, DGField, FluxRule, Mesh1D};
use proptest::prelude::*;

fn space(n: usize, k: usize) -> Arc<DgSpace> {
    DgSpace::new(Mesh1D::uniform(-1.0, 2.0, n).unwrap(), k).unwrap()
}

fn poly(c: &[f64]) -> impl Fn(f64) -> f64 + '_ {
    move |x| c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projections_reproduce_polynomials(
        k in 1usize..=3,
        n in 2usize..12,
        c in prop::collection::vec(-2.0f64..2.0, 4),
    ) {
        let sp = space(n, k);
        let g = poly(&c[..=k]);
        let l2 = l2_project(&g, &sp);
        let rp = radau_project_plus(&g, &sp);
        let rm = radau_project_minus(&g, &sp);
        prop_assert!(l2.l2_error(&g) <= 1e-13);
        prop_assert!(max_abs_diff(l2.coeffs(), rp.coeffs()) <= 1e-13);
        prop_assert!(max_abs_diff(l2.coeffs(), rm.coeffs()) <= 1e-13);
    }

    #[test]
    fn l2_projection_residual_is_orthogonal(k in 1usize..=3, n in 2usize..10, shift in -3.0f64..3.0) {
        let sp = space(n, k);
        let g = |x: f64| (x + shift).sin() * (0.5 * x).exp();
        let p = l2_project(g, &sp);
        // Projecting the projection changes nothing.
        let pp = l2_project(|x| {
            let j = sp.mesh.nodes.partition_point(|&v| v <= x).clamp(1, n) - 1;
            let xi = 2.0 * (x - sp.mesh.center(j)) / sp.mesh.widths[j];
            p.eval_cell(j, xi)
        }, &sp);
        prop_assert!(max_abs_diff(p.coeffs(), pp.coeffs()) <= 1e-13);
    }

    #[test]
    fn weak_derivative_is_linear(
        k in 1usize..=3,
        n in 2usize..10,
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        seed in 0u64..1000,
    ) {
        let sp = space(n, k);
        let noise = |s: u64| -> Vec<f64> {
            (0..sp.n_dofs()).map(|i| (((i as u64 + 1) * (s + 7) * 2654435761) % 1000) as f64 / 500.0 - 1.0).collect()
        };
        let f = DGField::from_coeffs(&sp, noise(seed));
        let g = DGField::from_coeffs(&sp, noise(seed + 1));
        let comb = DGField::lin_comb(a, &f, b, &g);
        for rule in [FluxRule::PlusTrace, FluxRule::MinusTrace] {
            let lhs = weak_deriv(&comb, rule, 1.0);
            let rhs = DGField::lin_comb(a, &weak_deriv(&f, rule, 1.0), b, &weak_deriv(&g, rule, 1.0));
            prop_assert!(max_abs_diff(lhs.coeffs(), rhs.coeffs()) <= 1e-12);
        }
    }

    #[test]
    fn aux_of_constants_vanishes(e in -0.9f64..2.0, v in -2.0f64..2.0) {
        let sp = space(6, 2);
        let p = AbcdParams::new(-0.2, 0.3, 0.1, 0.4).unwrap();
        let aux = compute_aux(&l2_project(|_| e, &sp), &l2_project(|_| v, &sp), &p);
        for f in [&aux.v, &aux.w, &aux.p, &aux.q, &aux.theta, &aux.zeta] {
            prop_assert!(f.coeffs().iter().all(|c| c.abs() < 1e-12));
        }
    }
}

#[test]
fn integrals_are_conserved_in_time() {
    for id in [CaseId::C1, CaseId::C3, CaseId::C7] {
        let case = case_catalog(id);
        let tr = run_simulation(&case, 40, 2, &abcd_ldg_core::DtRule::FixedSteps { n_steps: 40 }, &RunOptions::default()).unwrap();
        let (de, du) = tr.conservation_drift();
        assert!(de <= 1e-11 && du <= 1e-11, "{}: {de:e} {du:e}", id.name());
    }
}

#[test]
fn runs_are_deterministic() {
    let case = case_catalog(CaseId::C1);
    let run = || {
        run_simulation(&case, 40, 2, &abcd_ldg_core::DtRule::FixedSteps { n_steps: 40 }, &RunOptions::default())
            .unwrap()
            .final_state
    };
    let (a, b) = (run(), run());
    let bits = |f: &DGField| f.coeffs().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.eta), bits(&b.eta));
    assert_eq!(bits(&a.u), bits(&b.u));
}
