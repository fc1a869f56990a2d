//! The experiment catalog: seven accuracy cases with closed-form or
//! manufactured solutions, and the two solitary-wave collision runs.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::params::AbcdParams;

/// Scalar arithmetic the closed-form solutions are written against, so the
/// same formula can be evaluated on `f64`, on [`Dual`] numbers for exact
/// first derivatives, or on richer jets in tests.
pub trait Real:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn cst(v: f64) -> Self;
    fn exp(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;

    fn cosh(self) -> Self {
        (self.exp() + (-self).exp()) * Self::cst(0.5)
    }

    fn sech2(self) -> Self {
        let c = self.cosh();
        Self::cst(1.0) / (c * c)
    }
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn exp(self) -> Self {
        libm::exp(self)
    }
    fn sin(self) -> Self {
        libm::sin(self)
    }
    fn cos(self) -> Self {
        libm::cos(self)
    }
    fn cosh(self) -> Self {
        libm::cosh(self)
    }
}

/// First-order forward-mode dual number `re + eps·ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub re: f64,
    pub eps: f64,
}

impl Dual {
    pub fn var(re: f64) -> Self {
        Self { re, eps: 1.0 }
    }
}

impl Add for Dual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, eps: self.eps + o.eps }
    }
}

impl Sub for Dual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { re: self.re - o.re, eps: self.eps - o.eps }
    }
}

impl Mul for Dual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            re: self.re * o.re,
            eps: self.re * o.eps + self.eps * o.re,
        }
    }
}

impl Div for Dual {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        Self {
            re: self.re / o.re,
            eps: (self.eps * o.re - self.re * o.eps) / (o.re * o.re),
        }
    }
}

impl Neg for Dual {
    type Output = Self;
    fn neg(self) -> Self {
        Self { re: -self.re, eps: -self.eps }
    }
}

impl Real for Dual {
    fn cst(v: f64) -> Self {
        Self { re: v, eps: 0.0 }
    }
    fn exp(self) -> Self {
        let e = libm::exp(self.re);
        Self { re: e, eps: e * self.eps }
    }
    fn sin(self) -> Self {
        Self {
            re: libm::sin(self.re),
            eps: libm::cos(self.re) * self.eps,
        }
    }
    fn cos(self) -> Self {
        Self {
            re: libm::cos(self.re),
            eps: -libm::sin(self.re) * self.eps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    Blowup,
    Headon,
}

impl CaseId {
    pub const ACCURACY: [CaseId; 7] = [
        CaseId::C1,
        CaseId::C2,
        CaseId::C3,
        CaseId::C4,
        CaseId::C5,
        CaseId::C6,
        CaseId::C7,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CaseId::C1 => "case1",
            CaseId::C2 => "case2",
            CaseId::C3 => "case3",
            CaseId::C4 => "case4",
            CaseId::C5 => "case5",
            CaseId::C6 => "case6",
            CaseId::C7 => "case7",
            CaseId::Blowup => "blowup",
            CaseId::Headon => "headon",
        }
    }

    /// Accepts `1`..`7`, `c1`..`c7`, `case1`..`case7`, `blowup`, `headon`.
    pub fn parse(s: &str) -> Option<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let digits = lower.trim_start_matches("case").trim_start_matches('c');
        match digits {
            "1" => Some(CaseId::C1),
            "2" => Some(CaseId::C2),
            "3" => Some(CaseId::C3),
            "4" => Some(CaseId::C4),
            "5" => Some(CaseId::C5),
            "6" => Some(CaseId::C6),
            "7" => Some(CaseId::C7),
            _ => match lower.as_str() {
                "blowup" => Some(CaseId::Blowup),
                "headon" => Some(CaseId::Headon),
                _ => None,
            },
        }
    }

    pub fn is_accuracy(&self) -> bool {
        !matches!(self, CaseId::Blowup | CaseId::Headon)
    }
}

/// Sign convention for the head-on collision velocity profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeadonSign {
    /// u = 3/8 sech²(κ(x+7)) − 3/8 sech²(κ(x−7)), exactly as printed: the
    /// pulse at −7 moves right and the pulse at +7 moves left.
    Literal,
    /// u = 3/8 sech²(κ(x−7)) − 3/8 sech²(κ(x+7)): each pulse moves away
    /// from the centre and the pair meets across the periodic boundary.
    #[default]
    Colocated,
}

/// How step sizes are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum DtRule {
    /// `n_steps` equal steps over [0, T].
    FixedSteps { n_steps: usize },
    /// dt = factor · h on each segment, segments listed as (t_end, factor).
    PiecewiseFactor { segments: Vec<(f64, f64)> },
}

impl DtRule {
    pub fn validate(&self, t_final: f64) -> Result<()> {
        match self {
            DtRule::FixedSteps { n_steps } => {
                if *n_steps == 0 && t_final > 0.0 {
                    return Err(Error::InvalidDtRule("zero steps for a positive final time".into()));
                }
            }
            DtRule::PiecewiseFactor { segments } => {
                if segments.is_empty() {
                    return Err(Error::InvalidDtRule("no segments".into()));
                }
                let mut prev = 0.0;
                for &(t_end, factor) in segments {
                    if !(factor > 0.0) || !(t_end > prev) {
                        return Err(Error::InvalidDtRule(alloc::format!(
                            "segment ({t_end}, {factor}) is not increasing or has non-positive factor"
                        )));
                    }
                    prev = t_end;
                }
                if prev < t_final {
                    return Err(Error::InvalidDtRule("segments end before the final time".into()));
                }
            }
        }
        Ok(())
    }
}

/// One experiment: parameters, domain, final time and refinement ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub id: CaseId,
    pub params: AbcdParams,
    pub x_left: f64,
    pub x_right: f64,
    pub t_final: f64,
    /// (Nx, Nt) pairs for accuracy cases.
    pub refinements: Vec<(usize, usize)>,
    /// Step rule for collision runs; accuracy runs use `FixedSteps` from `refinements`.
    pub dt_rule: Option<DtRule>,
    /// Cell count for collision runs (h = 0.175 on [−14, 14]).
    pub default_cells: usize,
    pub snapshot_times: Vec<f64>,
    pub headon_sign: HeadonSign,
}

fn ladder(steps_per_cell: usize) -> Vec<(usize, usize)> {
    [20usize, 40, 80, 160, 320]
        .iter()
        .map(|&n| (n, n * steps_per_cell))
        .collect()
}

fn params(a: f64, b: f64, c: f64, d: f64) -> AbcdParams {
    AbcdParams::new(a, b, c, d).expect("catalog parameters are valid")
}

/// Built-in specification for `id`.
pub fn case_catalog(id: CaseId) -> CaseSpec {
    let base = |params, x_left, x_right, t_final, refinements| CaseSpec {
        id,
        params,
        x_left,
        x_right,
        t_final,
        refinements,
        dt_rule: None,
        default_cells: 0,
        snapshot_times: Vec::new(),
        headon_sign: HeadonSign::default(),
    };
    match id {
        CaseId::C1 => base(params(-7.0 / 30.0, 7.0 / 15.0, -2.0 / 5.0, 0.5), 0.0, 40.0, 0.8, ladder(1)),
        CaseId::C2 => base(
            params(1.0 / 12.0, 1.0 / 18.0, 1.0 / 12.0, 1.0 / 9.0),
            0.0,
            2.0 * PI,
            PI / 50.0,
            ladder(1),
        ),
        CaseId::C3 => base(params(0.0, 1.0 / 6.0, 0.0, 1.0 / 6.0), 0.0, 40.0, 0.01, ladder(1)),
        CaseId::C4 => base(params(1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 0.0), 0.0, 8.0 * PI, 0.04, ladder(50)),
        CaseId::C5 => base(params(0.0, 0.0, 0.0, 1.0 / 6.0), 0.0, 40.0, 0.01, ladder(1)),
        CaseId::C6 => base(params(0.0, 1.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0), 0.0, 40.0, 0.01, ladder(1)),
        CaseId::C7 => base(params(1.0 / 6.0, 0.0, 1.0 / 6.0, 0.0), 0.0, 40.0, 0.01, ladder(10)),
        CaseId::Blowup => CaseSpec {
            dt_rule: Some(DtRule::PiecewiseFactor {
                segments: vec![(3.24, 0.00107), (4.4, 0.00052)],
            }),
            default_cells: 160,
            snapshot_times: vec![0.0, 1.5, 3.24, 4.4],
            ..base(params(0.0, 1.0 / 6.0, 0.0, 1.0 / 6.0), -14.0, 14.0, 4.4, Vec::new())
        },
        CaseId::Headon => CaseSpec {
            dt_rule: Some(DtRule::PiecewiseFactor {
                segments: vec![(12.0, 0.00214)],
            }),
            default_cells: 160,
            snapshot_times: vec![0.0, 3.0, 6.0, 9.0, 12.0],
            ..base(params(-7.0 / 30.0, 7.0 / 15.0, -2.0 / 5.0, 0.5), -14.0, 14.0, 12.0, Vec::new())
        },
    }
}

/// Derived right-hand side for the manufactured pair η = cos(x+t), u = sin(x+t):
///
/// s₁ = cos 2θ + (1−a) cos θ − (1+b) sin θ,
/// s₂ = ½ sin 2θ + (1+d) cos θ − (1−c) sin θ,  θ = x + t.
pub fn manufactured_source<T: Real>(p: &AbcdParams, x: T, t: T) -> (T, T) {
    let th = x + t;
    let two = T::cst(2.0);
    let s1 = (two * th).cos() + T::cst(1.0 - p.a) * th.cos() - T::cst(1.0 + p.b) * th.sin();
    let s2 = T::cst(0.5) * (two * th).sin() + T::cst(1.0 + p.d) * th.cos() - T::cst(1.0 - p.c) * th.sin();
    (s1, s2)
}

/// Source terms as printed for the two manufactured cases, kept only for
/// the comparison report against [`manufactured_source`].
pub fn printed_source(id: CaseId, x: f64, t: f64) -> Option<(f64, f64)> {
    let th = x + t;
    let (c1, c2, s2) = (libm::cos(th), libm::cos(2.0 * th), libm::sin(2.0 * th));
    let s = libm::sin(th);
    match id {
        CaseId::C2 => Some((
            c2 + 11.0 / 12.0 * c1 - 19.0 / 18.0 * s,
            0.5 * s2 + 10.0 / 9.0 * c1 - 11.0 / 12.0 * s,
        )),
        CaseId::C4 => Some((c2 + 8.0 / 9.0 * c1 - 10.0 / 9.0 * s, 0.5 * c2 + c1 - 8.0 / 9.0 * s)),
        _ => None,
    }
}

impl CaseSpec {
    pub fn has_exact_solution(&self) -> bool {
        self.id.is_accuracy()
    }

    pub fn has_source(&self) -> bool {
        matches!(self.id, CaseId::C2 | CaseId::C4)
    }

    /// Exact (η, u) at (x, t) for accuracy cases.
    pub fn exact<T: Real>(&self, x: T, t: T) -> Option<(T, T)> {
        let c = T::cst;
        let sol = match self.id {
            CaseId::C1 => {
                let arg = c(0.5 * libm::sqrt(5.0 / 7.0)) * (x - c(20.0) - c(5.0 * libm::sqrt(2.0) / 6.0) * t);
                let s = arg.sech2();
                (c(3.0 / 8.0) * s, c(1.0 / (2.0 * libm::sqrt(2.0))) * s)
            }
            CaseId::C2 | CaseId::C4 => {
                let th = x + t;
                (th.cos(), th.sin())
            }
            CaseId::C3 => {
                let shift = x - c(20.0) - c(2.5) * t;
                let narrow = c(libm::sqrt(9.0 / 10.0)) * shift;
                let wide = c(libm::sqrt(18.0 / 5.0)) * shift;
                let s = narrow.sech2();
                let eta = c(15.0 / 4.0) * (c(-2.0) + wide.cosh()) * s * s;
                (eta, c(7.5) * s)
            }
            CaseId::C5 => {
                let s = (c(1.0 / libm::sqrt(2.0)) * (x - c(20.0) - t)).sech2();
                (c(-1.0), c(2.0 / 3.0) + s)
            }
            CaseId::C6 => {
                let s = (c(1.0 / libm::sqrt(2.0)) * (x - c(20.0) - c(3.0) * t)).sech2();
                (c(-1.0), c(1.0) + c(6.0) * s)
            }
            CaseId::C7 => {
                let s = (c(libm::sqrt(1.5)) * (x - c(20.0) - c(libm::sqrt(2.0)) * t)).sech2();
                (c(-1.0) + c(1.5) * s, c(3.0 / libm::sqrt(2.0)) * s)
            }
            CaseId::Blowup | CaseId::Headon => return None,
        };
        Some(sol)
    }

    /// Initial data (η(x,0), u(x,0)), generic over the scalar type.
    pub fn initial<T: Real>(&self, x: T) -> (T, T) {
        let c = T::cst;
        match self.id {
            CaseId::Blowup => {
                let k = c(3.0 / libm::sqrt(10.0));
                let sp = (k * (x - c(7.0))).sech2();
                let sm = (k * (x + c(7.0))).sech2();
                let bump = |s: T| c(7.5) * s - c(45.0 / 4.0) * s * s;
                (bump(sp) + bump(sm), c(-7.5) * sp + c(7.5) * sm)
            }
            CaseId::Headon => {
                let k = c(libm::sqrt(5.0 / 28.0));
                let sp = (k * (x - c(7.0))).sech2();
                let sm = (k * (x + c(7.0))).sech2();
                let eta = c(1.0 / libm::sqrt(8.0)) * (sp + sm);
                let u = match self.headon_sign {
                    HeadonSign::Literal => c(3.0 / 8.0) * (sm - sp),
                    HeadonSign::Colocated => c(3.0 / 8.0) * (sp - sm),
                };
                (eta, u)
            }
            _ => self.exact(x, c(0.0)).expect("accuracy cases carry exact solutions"),
        }
    }

    pub fn initial_eta(&self, x: f64) -> f64 {
        self.initial(x).0
    }

    pub fn initial_u(&self, x: f64) -> f64 {
        self.initial(x).1
    }

    /// Exact (η, u, η_x, u_x) at (x, t) via dual numbers.
    pub fn exact_with_gradient(&self, x: f64, t: f64) -> Option<[f64; 4]> {
        let (e, u) = self.exact(Dual::var(x), Dual::cst(t))?;
        Some([e.re, u.re, e.eps, u.eps])
    }

    /// Manufactured source at (x, t) for C2 and C4.
    pub fn source_at(&self, x: f64, t: f64) -> Option<(f64, f64)> {
        self.has_source().then(|| manufactured_source(&self.params, x, t))
    }

    /// Accuracy-case step rule for a (Nx, Nt) row.
    pub fn fixed_rule(n_steps: usize) -> DtRule {
        DtRule::FixedSteps { n_steps }
    }
}
