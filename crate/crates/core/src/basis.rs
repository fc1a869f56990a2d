//! Orthonormal Legendre modes on the reference cell [−1, 1].

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quadrature::{legendre_with_derivative, QuadratureRule};

/// Degrees the solver is built and tested for.
pub const SUPPORTED_DEGREES: [usize; 3] = [1, 2, 3];

/// Value of the L²-orthonormal mode `i`, √((2i+1)/2)·P_i(ξ).
pub fn mode_value(i: usize, xi: f64) -> f64 {
    normalization(i) * legendre_with_derivative(i, xi).0
}

/// Reference derivative d/dξ of mode `i`.
pub fn mode_derivative(i: usize, xi: f64) -> f64 {
    normalization(i) * legendre_with_derivative(i, xi).1
}

fn normalization(i: usize) -> f64 {
    libm::sqrt((2 * i + 1) as f64 / 2.0)
}

/// Basis values tabulated at a quadrature rule and at both cell ends.
///
/// Tables are stored row-major by quadrature point: `phi[q * n_modes + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceBasis {
    pub degree: usize,
    pub rule: QuadratureRule,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub trace_left: Vec<f64>,
    pub trace_right: Vec<f64>,
    /// `stiffness[m * n_modes + i] = ∫ φ_i φ_m' dξ`.
    pub stiffness: Vec<f64>,
}

impl ReferenceBasis {
    pub fn new(degree: usize, rule: QuadratureRule) -> Result<Self> {
        if degree == 0 {
            return Err(Error::UnsupportedDegree(degree));
        }
        Self::with_degree_unchecked(degree, rule)
    }

    /// Same as [`ReferenceBasis::new`] but also admits piecewise constants,
    /// which the operator unit tests use as a hand-checkable stencil.
    pub fn with_degree_unchecked(degree: usize, rule: QuadratureRule) -> Result<Self> {
        let n_modes = degree + 1;
        if rule.n_points() < n_modes {
            return Err(Error::InsufficientQuadrature {
                degree,
                needed: n_modes,
                got: rule.n_points(),
            });
        }
        let nq = rule.n_points();
        let mut phi = Vec::with_capacity(nq * n_modes);
        let mut dphi = Vec::with_capacity(nq * n_modes);
        for &xi in &rule.points {
            for i in 0..n_modes {
                phi.push(mode_value(i, xi));
                dphi.push(mode_derivative(i, xi));
            }
        }
        // P_i(1) = 1 and P_i(−1) = (−1)^i.
        let trace_right: Vec<f64> = (0..n_modes).map(normalization).collect();
        let trace_left: Vec<f64> = (0..n_modes)
            .map(|i| if i % 2 == 0 { normalization(i) } else { -normalization(i) })
            .collect();

        let mut stiffness = alloc::vec![0.0; n_modes * n_modes];
        for q in 0..nq {
            let w = rule.weights[q];
            for m in 0..n_modes {
                for i in 0..n_modes {
                    stiffness[m * n_modes + i] += w * phi[q * n_modes + i] * dphi[q * n_modes + m];
                }
            }
        }
        Ok(Self {
            degree,
            rule,
            phi,
            dphi,
            trace_left,
            trace_right,
            stiffness,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.degree + 1
    }

    pub fn n_quad(&self) -> usize {
        self.rule.n_points()
    }

    #[inline]
    pub fn phi_at(&self, q: usize, i: usize) -> f64 {
        self.phi[q * self.n_modes() + i]
    }

    #[inline]
    pub fn dphi_at(&self, q: usize, i: usize) -> f64 {
        self.dphi[q * self.n_modes() + i]
    }

    /// Expands modal coefficients at every quadrature point.
    pub fn eval_at_quad(&self, coeffs: &[f64], out: &mut [f64]) {
        let nm = self.n_modes();
        for (q, o) in out.iter_mut().enumerate() {
            let row = &self.phi[q * nm..(q + 1) * nm];
            *o = row.iter().zip(coeffs).map(|(p, c)| p * c).sum();
        }
    }

    pub fn eval_left(&self, coeffs: &[f64]) -> f64 {
        self.trace_left.iter().zip(coeffs).map(|(p, c)| p * c).sum()
    }

    pub fn eval_right(&self, coeffs: &[f64]) -> f64 {
        self.trace_right.iter().zip(coeffs).map(|(p, c)| p * c).sum()
    }
}

/// Basis of degree `k` with the default assembly rule of 2(k+1) points.
pub fn legendre_basis(degree: usize, rule: QuadratureRule) -> Result<ReferenceBasis> {
    ReferenceBasis::new(degree, rule)
}

pub fn default_basis(degree: usize) -> Result<ReferenceBasis> {
    if !SUPPORTED_DEGREES.contains(&degree) {
        return Err(Error::UnsupportedDegree(degree));
    }
    ReferenceBasis::new(degree, crate::quadrature::gauss_legendre_rule(2 * (degree + 1))?)
}
