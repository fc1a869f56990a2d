//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails. Criteria run concurrently; each reports its own
//! wall time.

#[path = "../../core/tests/support/jet.rs"]
mod jet;

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use abcd_ldg::commands;
use abcd_ldg::config::{resolve_with, CommandKind, FileConfig, RunArgs};
use abcd_ldg_core::basis::ReferenceBasis;
use abcd_ldg_core::cases::{case_catalog, CaseId};
use abcd_ldg_core::field::DgSpace;
use abcd_ldg_core::operators::{compute_aux, lf_flux, weak_deriv, EvolutionOperator};
use abcd_ldg_core::projection::{l2_project, radau_project_minus, radau_project_plus};
use abcd_ldg_core::quadrature::gauss_legendre_rule;
use abcd_ldg_core::study::{run_accuracy_study, run_diagnostic};
use abcd_ldg_core::time::{run_simulation, ssp_rk3, RunOptions, RunStatus};
use abcd_ldg_core::{AbcdParams, AlphaPolicy, DGField, ErrorReport, FluxRule, InterfaceTraces, Mesh1D};
use rayon::prelude::*;

const RATE_TOL: f64 = 0.2;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new() -> Self {
        Verdict {
            pass: true,
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl AsRef<str>) {
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(what.as_ref());
        if !ok {
            self.detail.push_str(" [miss]");
            self.pass = false;
        }
    }
}

fn study(id: CaseId, k: usize) -> ErrorReport {
    let case = case_catalog(id);
    run_accuracy_study(&case, k, &case.refinements, AlphaPolicy::PerStep).expect("accuracy run")
}

fn within_factor(got: f64, want: f64, f: f64) -> bool {
    got <= want * f && got >= want / f
}

fn final_rates(v: &mut Verdict, label: &str, r: &ErrorReport, want_u: f64, want_eta: f64) {
    let (_, rates) = r.last().unwrap();
    let (ru, re) = (rates.l2_u.unwrap_or(f64::NAN), rates.l2_eta.unwrap_or(f64::NAN));
    let label = if label.is_empty() { String::new() } else { format!("{label} ") };
    v.check((ru - want_u).abs() <= RATE_TOL, format!("{label}rate u {ru:.4} (want {want_u}±{RATE_TOL})"));
    v.check((re - want_eta).abs() <= RATE_TOL, format!("{label}rate eta {re:.4} (want {want_eta}±{RATE_TOL})"));
}

fn c1_k1() -> Verdict {
    let t = Instant::now();
    let r = study(CaseId::C1, 1);
    let secs = t.elapsed().as_secs_f64();
    let mut v = Verdict::new();
    final_rates(&mut v, "", &r, 2.04, 2.02);
    let (row, _) = r.last().unwrap();
    v.check(within_factor(row.l2_u, 1.657e-4, 2.0), format!("err u {:.3e}", row.l2_u));
    v.check(within_factor(row.l2_eta, 1.748e-4, 2.0), format!("err eta {:.3e}", row.l2_eta));
    v.check(r.rows.len() == 5, format!("{} rows", r.rows.len()));
    v.check(secs < 30.0, format!("{secs:.1}s"));
    v
}

fn c1_k2() -> Verdict {
    let t = Instant::now();
    let r = study(CaseId::C1, 2);
    let secs = t.elapsed().as_secs_f64();
    let mut v = Verdict::new();
    final_rates(&mut v, "", &r, 2.96, 2.93);
    let (row, _) = r.last().unwrap();
    v.check(within_factor(row.l2_u, 1.645e-6, 2.0), format!("err u {:.3e}", row.l2_u));
    v.check(within_factor(row.l2_eta, 1.732e-6, 2.0), format!("err eta {:.3e}", row.l2_eta));
    v.check(secs < 60.0, format!("{secs:.1}s"));
    v
}

fn c3_k2() -> Verdict {
    let mut v = Verdict::new();
    final_rates(&mut v, "", &study(CaseId::C3, 2), 2.99, 2.99);
    v
}

fn flat_eta_cases() -> Verdict {
    let mut v = Verdict::new();
    for id in [CaseId::C5, CaseId::C6] {
        for k in [1, 2] {
            let r = study(id, k);
            let worst = r.rows.iter().map(|row| row.l2_eta).fold(0.0, f64::max);
            v.check(worst <= 1e-12, format!("{} k={k} max eta err {worst:.1e}", id.name()));
            let ru = r.last().unwrap().1.l2_u.unwrap_or(f64::NAN);
            let want = k as f64 + 1.0;
            v.check((ru - want).abs() <= RATE_TOL, format!("rate u {ru:.4}"));
        }
    }
    v
}

fn c7_k2() -> Verdict {
    let case = case_catalog(CaseId::C7);
    let mut v = Verdict::new();
    v.check(case.refinements.iter().all(|&(n, t)| t == 10 * n), "Nt = 10 Nx");
    final_rates(&mut v, "", &study(CaseId::C7, 2), 2.95, 2.97);
    v
}

fn manufactured() -> Verdict {
    let mut v = Verdict::new();
    for id in [CaseId::C2, CaseId::C4] {
        let res = jet::worst_residual(id);
        v.check(res <= 1e-10, format!("{} residual {res:.1e}", id.name()));
    }
    let runs: Vec<(CaseId, usize, ErrorReport)> = [(CaseId::C2, 1), (CaseId::C2, 2), (CaseId::C4, 1), (CaseId::C4, 2)]
        .par_iter()
        .map(|&(id, k)| (id, k, study(id, k)))
        .collect();
    for (id, k, r) in runs {
        let want = k as f64 + 1.0;
        final_rates(&mut v, &format!("{} k={k}", id.name()), &r, want, want);
    }
    v
}

fn blowup() -> Verdict {
    let t = Instant::now();
    let case = case_catalog(CaseId::Blowup);
    let opts = RunOptions {
        snapshot_times: case.snapshot_times.clone(),
        norm_log_every: 50,
        ..Default::default()
    };
    let tr = run_simulation(&case, 160, 2, case.dt_rule.as_ref().unwrap(), &opts).expect("blowup run");
    let secs = t.elapsed().as_secs_f64();
    let mut v = Verdict::new();
    v.check(
        (case.x_right - case.x_left) / 160.0 == 0.175,
        "h = 0.175",
    );
    let early = tr
        .max_eta
        .iter()
        .filter(|(t, _)| *t <= 3.24)
        .map(|&(_, m)| m)
        .fold(0.0, f64::max);
    v.check(early < 10.0, format!("max|eta| up to 3.24 = {early:.3}"));
    match tr.snapshot_at(4.4) {
        Some(s) => {
            let m = s.eta.linf_norm();
            v.check((60.0..=250.0).contains(&m), format!("max|eta|(4.4) = {m:.1}"));
        }
        None => v.check(false, format!("stopped early: {:?}", tr.status)),
    }
    v.check(secs < 180.0, format!("{secs:.1}s"));
    v
}

fn headon() -> Verdict {
    let t = Instant::now();
    let case = case_catalog(CaseId::Headon);
    let opts = RunOptions {
        snapshot_times: case.snapshot_times.clone(),
        ..Default::default()
    };
    let tr = run_simulation(&case, 160, 2, case.dt_rule.as_ref().unwrap(), &opts).expect("headon run");
    let secs = t.elapsed().as_secs_f64();
    let mut v = Verdict::new();
    v.check(tr.status == RunStatus::Completed && tr.final_state.t == 12.0, "reached t=12");
    let samples: Vec<(f64, f64)> = tr.final_state.eta.sample();
    let (peaks, valley) = two_pulses(&samples);
    v.check(peaks.len() == 2, format!("{} pulses", peaks.len()));
    if peaks.len() == 2 {
        let peak = peaks[0].1.min(peaks[1].1);
        v.check(valley < 0.25 * peak, format!("valley/peak {:.3}", valley / peak));
    }
    let (de, du) = tr.conservation_drift();
    v.check(de <= 1e-8 && du <= 1e-8, format!("drift {de:.1e}/{du:.1e}"));
    v.check(secs < 180.0, format!("{secs:.1}s"));
    v
}

/// Local maxima rising above a 10%-of-peak floor, and the lowest value
/// between the first two of them along the periodic line.
fn two_pulses(samples: &[(f64, f64)]) -> (Vec<(f64, f64)>, f64) {
    // Cell-boundary duplicates are merged by averaging the two sides.
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for &(x, y) in samples {
        match pts.last_mut() {
            Some(last) if last.0 == x => last.1 = 0.5 * (last.1 + y),
            _ => pts.push((x, y)),
        }
    }
    if pts.len() > 1 && (pts[pts.len() - 1].0 - pts[0].0 - 28.0).abs() < 1e-12 {
        let end = pts.pop().unwrap();
        pts[0].1 = 0.5 * (pts[0].1 + end.1);
    }
    let n = pts.len();
    let top = pts.iter().map(|p| p.1).fold(f64::MIN, f64::max);
    let mut peaks = Vec::new();
    for i in 0..n {
        let (l, c, r) = (pts[(i + n - 1) % n].1, pts[i].1, pts[(i + 1) % n].1);
        if c > l && c >= r && c > 0.1 * top {
            peaks.push(pts[i]);
        }
    }
    let valley = if peaks.len() == 2 {
        let (a, b) = (peaks[0].0, peaks[1].0);
        let inner = pts.iter().filter(|p| p.0 > a && p.0 < b).map(|p| p.1).fold(f64::MAX, f64::min);
        let outer = pts.iter().filter(|p| p.0 < a || p.0 > b).map(|p| p.1).fold(f64::MAX, f64::min);
        inner.max(outer)
    } else {
        f64::NAN
    };
    (peaks, valley)
}

fn noise(n: usize, seed: u64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let h = (i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ seed.wrapping_mul(0xbf58_476d_1ce4_e5b9);
            (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        })
        .collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn properties() -> Verdict {
    let mut v = Verdict::new();

    // Projection reproduction and orthogonality.
    let mut worst = 0.0f64;
    for k in 1..=3 {
        let sp = DgSpace::new(Mesh1D::uniform(-1.0, 2.0, 7).unwrap(), k).unwrap();
        let poly = |x: f64| (0..=k).fold(0.0, |acc, i| acc * x + (i as f64 + 0.5));
        for f in [l2_project(poly, &sp), radau_project_plus(poly, &sp), radau_project_minus(poly, &sp)] {
            worst = worst.max(f.l2_error(poly));
        }
        // Degree k+1, so the k+3-point error rule integrates the residual exactly.
        let g = |x: f64| poly(x) * x - 0.75;
        let p = l2_project(g, &sp);
        let eb = &sp.error_basis;
        for j in 0..7 {
            for m in 0..sp.n_modes() {
                let r: f64 = (0..eb.n_quad())
                    .map(|q| {
                        let x = sp.mesh.map(j, eb.rule.points[q]);
                        let ph: f64 = (0..sp.n_modes()).map(|i| p.cell(j)[i] * eb.phi_at(q, i)).sum();
                        eb.rule.weights[q] * (g(x) - ph) * eb.phi_at(q, m)
                    })
                    .sum();
                worst = worst.max(r.abs());
            }
        }
    }
    v.check(worst <= 1e-13, format!("projection {worst:.1e}"));

    // Hand-computed piecewise-constant stencil.
    let b0 = ReferenceBasis::with_degree_unchecked(0, gauss_legendre_rule(2).unwrap()).unwrap();
    let s0 = DgSpace::with_basis(Mesh1D::uniform(0.0, 1.0, 2).unwrap(), b0).unwrap();
    let g0 = weak_deriv(&DGField::from_cell_values(&s0, &[3.0, 5.0]), FluxRule::MinusTrace, 1.0);
    let vals = [g0.eval_cell(0, 0.0), g0.eval_cell(1, 0.0)];
    v.check(vals == [-4.0, 4.0], format!("k=0 stencil {vals:?}"));

    // Flux consistency on continuous traces.
    let mut exact = true;
    for &(e, u) in &[(0.25, -1.5), (-0.5, 2.0), (3.0, 0.125)] {
        let tr = |x: f64| InterfaceTraces {
            minus: vec![x],
            plus: vec![x],
        };
        let (f1, f2) = lf_flux(&tr(e), &tr(u), 4.0);
        exact &= f1[0] == u + e * u && f2[0] == e + 0.5 * u * u;
    }
    v.check(exact, "flux consistency");

    // Superposition and sign(0).
    let sp = DgSpace::new(Mesh1D::uniform(0.0, 10.0, 12).unwrap(), 2).unwrap();
    let n = sp.n_dofs();
    let f = |s| DGField::from_coeffs(&sp, noise(n, s));
    let p1 = case_catalog(CaseId::C1).params;
    let (e1, u1, e2, u2) = (f(1), f(2), f(3), f(4));
    let a1 = compute_aux(&e1, &u1, &p1);
    let a2 = compute_aux(&e2, &u2, &p1);
    let a12 = compute_aux(&DGField::lin_comb(2.0, &e1, -0.5, &e2), &DGField::lin_comb(2.0, &u1, -0.5, &u2), &p1);
    let mut sup = 0.0f64;
    for (x, y, z) in [
        (&a1.v, &a2.v, &a12.v),
        (&a1.w, &a2.w, &a12.w),
        (&a1.p, &a2.p, &a12.p),
        (&a1.q, &a2.q, &a12.q),
        (&a1.theta, &a2.theta, &a12.theta),
        (&a1.zeta, &a2.zeta, &a12.zeta),
    ] {
        sup = sup.max(max_diff(DGField::lin_comb(2.0, x, -0.5, y).coeffs(), z.coeffs()));
    }
    v.check(sup <= 1e-12, format!("superposition {sup:.1e}"));
    let p0 = AbcdParams::new(0.0, 0.2, 0.0, 0.3).unwrap();
    let a0 = compute_aux(&e1, &u1, &p0);
    let z = max_diff(a0.zeta.coeffs(), weak_deriv(&a0.w, FluxRule::MinusTrace, 1.0).coeffs())
        .max(max_diff(a0.q.coeffs(), weak_deriv(&a0.v, FluxRule::PlusTrace, 1.0).coeffs()));
    v.check(z <= 1e-14, format!("sign(0) {z:.1e}"));

    // Implicit solve round trip.
    let sb = DgSpace::new(Mesh1D::uniform(0.0, 40.0, 40).unwrap(), 1).unwrap();
    let op = EvolutionOperator::build(&sb, &AbcdParams::new(0.0, 1.0 / 6.0, 0.0, 1.0 / 6.0).unwrap()).unwrap();
    let x = noise(sb.n_dofs(), 9);
    let rt = max_diff(&op.apply_eta(&op.solve_eta(&x)), &x).max(max_diff(&op.apply_u(&op.solve_u(&x)), &x));
    v.check(rt <= 1e-10, format!("round trip {rt:.1e}"));

    // SSP-RK3 order on y' = −y + cos t.
    let exact_y = |t: f64| 0.5 * (t.cos() + t.sin()) + 0.5 * (-t).exp();
    let errs: Vec<f64> = [0.1_f64, 0.05, 0.025]
        .iter()
        .map(|&dt| {
            let steps = (1.0 / dt).round() as usize;
            let mut y = 1.0;
            for i in 0..steps {
                y = ssp_rk3(&y, i as f64 * dt, dt, |_, y: &f64, t| Ok::<_, ()>(-y + t.cos())).unwrap();
            }
            (y - exact_y(1.0)).abs()
        })
        .collect();
    let orders = [(errs[0] / errs[1]).log2(), (errs[1] / errs[2]).log2()];
    v.check(
        orders.iter().all(|o| (o - 3.0).abs() <= 0.05),
        format!("RK3 orders {:.3}/{:.3}", orders[0], orders[1]),
    );

    // Error-split ratios stay bounded under refinement.
    for (id, k) in [(CaseId::C1, 1), (CaseId::C3, 2)] {
        let case = case_catalog(id);
        let diags: Vec<_> = [40usize, 80, 160]
            .par_iter()
            .map(|&n| run_diagnostic(&case, k, n, n).expect("diagnostic run"))
            .collect();
        let series = |g: fn(&abcd_ldg_core::operators::ErrorSplitDiagnostic) -> Option<f64>| -> Vec<f64> {
            diags.iter().map(|d| g(d).unwrap_or(f64::NAN)).collect()
        };
        let mut growth = 0.0f64;
        for s in [
            series(|d| d.u_deriv_ratio),
            series(|d| d.u_jump_ratio),
            series(|d| d.eta_deriv_ratio),
            series(|d| d.eta_jump_ratio),
        ] {
            for w in s.windows(2) {
                growth = growth.max(if w[0].is_finite() && w[1].is_finite() { w[1] / w[0] } else { f64::INFINITY });
            }
        }
        v.check(growth < 2.0, format!("{} ratio growth {growth:.2}", id.name()));
    }
    v
}

fn run_cli(args: RunArgs, kind: CommandKind, out: &Path) -> Vec<(String, Vec<u8>)> {
    let args = RunArgs {
        out: Some(out.to_path_buf()),
        ..args
    };
    let cfg = resolve_with(kind, &args, &FileConfig::default(), None).expect("config");
    let outcome = commands::run(&cfg).expect("run");
    let mut files: Vec<_> = outcome
        .files
        .iter()
        .filter(|f| f.ends_with(".csv"))
        .map(|f| (f.clone(), std::fs::read(cfg.out_dir.join(f)).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism() -> Verdict {
    let mut v = Verdict::new();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let runs: Vec<_> = dirs
        .iter()
        .map(|d| {
            let acc = run_cli(
                RunArgs {
                    case: Some("1".into()),
                    degree: Some(2),
                    ..Default::default()
                },
                CommandKind::Accuracy,
                d.path(),
            );
            let sim = run_cli(
                RunArgs {
                    case: Some("headon".into()),
                    nx: Some(40),
                    nt: Some(400),
                    ..Default::default()
                },
                CommandKind::Headon,
                d.path(),
            );
            (acc, sim)
        })
        .collect();
    v.check(runs[0].0 == runs[1].0, format!("accuracy tables ({} files)", runs[0].0.len()));
    v.check(runs[0].1 == runs[1].1, format!("headon snapshots ({} files)", runs[0].1.len()));
    v
}

fn main() {
    // Accept and ignore libtest-style arguments.
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    type Criterion = (usize, &'static str, fn() -> Verdict);
    let criteria: Vec<Criterion> = vec![
        (1, "case 1 k=1 rates and errors", c1_k1),
        (2, "case 1 k=2 rates and errors", c1_k2),
        (3, "case 3 k=2 rates", c3_k2),
        (4, "cases 5/6 flat eta and u rates", flat_eta_cases),
        (5, "case 7 k=2 rates", c7_k2),
        (6, "cases 2/4 manufactured rates", manufactured),
        (7, "blow-up run", blowup),
        (8, "head-on run", headon),
        (9, "property suites", properties),
        (10, "determinism", determinism),
    ];
    let selected: Vec<_> = criteria
        .into_iter()
        .filter(|(i, name, _)| filter.as_deref().is_none_or(|f| name.contains(f) || i.to_string() == f))
        .collect();
    let start = Instant::now();
    let results: Vec<(usize, &str, Verdict, f64)> = selected
        .par_iter()
        .map(|&(i, name, f)| {
            let t = Instant::now();
            let v = f();
            (i, name, v, t.elapsed().as_secs_f64())
        })
        .collect();
    let mut report = String::new();
    let mut failed = 0;
    for (i, name, v, secs) in &results {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!v.pass);
        let _ = writeln!(report, "criterion {i:>2} {tag}  {name} ({secs:.1}s): {}", v.detail);
    }
    print!("{report}");
    println!(
        "acceptance: {} passed, {failed} failed ({:.1}s)",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
