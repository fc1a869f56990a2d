//! Truncated bivariate Taylor jets and the pointwise PDE residual of the
//! catalog's closed-form solutions. Shared by the core and CLI test suites.

use abcd_ldg_core::cases::{case_catalog, manufactured_source, CaseId, Real};
use core::ops::{Add, Div, Mul, Neg, Sub};

const NX: usize = 4; // x-order ≤ 3
const NT: usize = 2; // t-order ≤ 1

/// Truncated bivariate Taylor polynomial: c[i][j] multiplies dxⁱ dtʲ.
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    c: [[f64; NT]; NX],
}

impl Jet {
    pub fn zero() -> Self {
        Self { c: [[0.0; NT]; NX] }
    }

    pub fn var_x(x: f64) -> Self {
        let mut j = Self::cst(x);
        j.c[1][0] = 1.0;
        j
    }

    pub fn var_t(t: f64) -> Self {
        let mut j = Self::cst(t);
        j.c[0][1] = 1.0;
        j
    }

    /// ∂ₓⁱ∂ₜʲ at the expansion point.
    pub fn d(&self, i: usize, j: usize) -> f64 {
        let fact = [1.0, 1.0, 2.0, 6.0];
        self.c[i][j] * fact[i] * fact[j]
    }

    /// Σₙ fₙ δⁿ with δ = self − self(0), fₙ = f⁽ⁿ⁾(a₀)/n!.
    fn compose(self, taylor: [f64; 5]) -> Self {
        let mut delta = self;
        delta.c[0][0] = 0.0;
        let mut out = Jet::cst(taylor[0]);
        let mut pow = Jet::cst(1.0);
        for &f in &taylor[1..] {
            pow = pow * delta;
            out = out + pow * Jet::cst(f);
        }
        out
    }
}

impl Add for Jet {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for i in 0..NX {
            for j in 0..NT {
                self.c[i][j] += o.c[i][j];
            }
        }
        self
    }
}

impl Sub for Jet {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.c.iter_mut().flatten().for_each(|v| *v = -*v);
        self
    }
}

impl Mul for Jet {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut r = Jet::zero();
        for i1 in 0..NX {
            for j1 in 0..NT {
                for i2 in 0..NX - i1 {
                    for j2 in 0..NT - j1 {
                        r.c[i1 + i2][j1 + j2] += self.c[i1][j1] * o.c[i2][j2];
                    }
                }
            }
        }
        r
    }
}

impl Div for Jet {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let a = o.c[0][0];
        let mut t = [0.0; 5];
        let mut p = 1.0 / a;
        for (n, v) in t.iter_mut().enumerate() {
            *v = if n % 2 == 0 { p } else { -p };
            p /= a;
        }
        self * o.compose(t)
    }
}

impl Real for Jet {
    fn cst(v: f64) -> Self {
        let mut j = Jet::zero();
        j.c[0][0] = v;
        j
    }
    fn exp(self) -> Self {
        let e = self.c[0][0].exp();
        self.compose([e, e, e / 2.0, e / 6.0, e / 24.0])
    }
    fn sin(self) -> Self {
        let (s, c) = self.c[0][0].sin_cos();
        self.compose([s, c, -s / 2.0, -c / 6.0, s / 24.0])
    }
    fn cos(self) -> Self {
        let (s, c) = self.c[0][0].sin_cos();
        self.compose([c, -s, -c / 2.0, s / 6.0, c / 24.0])
    }
}

pub fn residuals(id: CaseId, x: f64, t: f64) -> (f64, f64) {
    let case = case_catalog(id);
    let p = case.params;
    let (e, u) = case.exact(Jet::var_x(x), Jet::var_t(t)).unwrap();
    let (s1, s2) = if case.has_source() {
        let (a, b) = manufactured_source(&p, x, t);
        (a, b)
    } else {
        (0.0, 0.0)
    };
    let (e0, ex, et, exxt, exxx) = (e.d(0, 0), e.d(1, 0), e.d(0, 1), e.d(2, 1), e.d(3, 0));
    let (u0, ux, ut, uxxt, uxxx) = (u.d(0, 0), u.d(1, 0), u.d(0, 1), u.d(2, 1), u.d(3, 0));
    let r1 = et + ux + ex * u0 + e0 * ux + p.a * uxxx - p.b * exxt - s1;
    let r2 = ut + ex + u0 * ux + p.c * exxx - p.d * uxxt - s2;
    (r1, r2)
}

pub fn worst_residual(id: CaseId) -> f64 {
    let case = case_catalog(id);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        // Deterministic low-discrepancy sweep of the space-time box.
        let fx = (i as f64 * 0.618_033_988_749_895) % 1.0;
        let ft = (i as f64 * 0.754_877_666_246_693) % 1.0;
        let x = case.x_left + fx * (case.x_right - case.x_left);
        let t = ft * case.t_final;
        let (r1, r2) = residuals(id, x, t);
        worst = worst.max(r1.abs()).max(r2.abs());
    }
    worst
}
