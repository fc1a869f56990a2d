//! Piecewise polynomials on a periodic mesh: storage, traces and norms.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::basis::{mode_value, ReferenceBasis};
use crate::error::Result;
use crate::mesh::Mesh1D;
use crate::quadrature::gauss_legendre_rule;

/// The space V_h^k: a mesh plus the reference basis used for assembly and
/// a second, richer basis table used for error norms.
#[derive(Debug, Clone, PartialEq)]
pub struct DgSpace {
    pub mesh: Mesh1D,
    pub basis: ReferenceBasis,
    pub error_basis: ReferenceBasis,
}

impl DgSpace {
    /// Assembly uses 2(k+1) Gauss points, norms use k+3.
    pub fn new(mesh: Mesh1D, degree: usize) -> Result<Arc<Self>> {
        let basis = crate::basis::default_basis(degree)?;
        Self::with_basis(mesh, basis)
    }

    pub fn with_basis(mesh: Mesh1D, basis: ReferenceBasis) -> Result<Arc<Self>> {
        let error_basis =
            ReferenceBasis::with_degree_unchecked(basis.degree, gauss_legendre_rule(basis.degree + 3)?)?;
        Ok(Arc::new(Self {
            mesh,
            basis,
            error_basis,
        }))
    }

    pub fn degree(&self) -> usize {
        self.basis.degree
    }

    pub fn n_modes(&self) -> usize {
        self.basis.degree + 1
    }

    pub fn n_cells(&self) -> usize {
        self.mesh.n_cells()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_cells() * self.n_modes()
    }
}

/// One-sided values at every interface x_{j+1/2}, j = 0..N−1.
///
/// `minus[j]` comes from cell j, `plus[j]` from cell j+1 (mod N).
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceTraces {
    pub minus: Vec<f64>,
    pub plus: Vec<f64>,
}

impl InterfaceTraces {
    pub fn len(&self) -> usize {
        self.minus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.minus.is_empty()
    }

    #[inline]
    pub fn jump(&self, j: usize) -> f64 {
        self.plus[j] - self.minus[j]
    }

    #[inline]
    pub fn average(&self, j: usize) -> f64 {
        0.5 * (self.plus[j] + self.minus[j])
    }

    pub fn jumps(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.jump(j)).collect()
    }
}

/// Modal coefficients of a member of V_h^k, cell-major: `coeffs[j * (k+1) + i]`.
#[derive(Debug, Clone)]
pub struct DGField {
    space: Arc<DgSpace>,
    coeffs: Vec<f64>,
}

impl PartialEq for DGField {
    fn eq(&self, other: &Self) -> bool {
        self.conformable(other) && self.coeffs == other.coeffs
    }
}

impl DGField {
    pub fn zeros(space: &Arc<DgSpace>) -> Self {
        Self {
            space: Arc::clone(space),
            coeffs: alloc::vec![0.0; space.n_dofs()],
        }
    }

    pub fn from_coeffs(space: &Arc<DgSpace>, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), space.n_dofs(), "coefficient count does not match the space");
        Self {
            space: Arc::clone(space),
            coeffs,
        }
    }

    /// Piecewise constants, one value per cell.
    pub fn from_cell_values(space: &Arc<DgSpace>, values: &[f64]) -> Self {
        assert_eq!(values.len(), space.n_cells());
        let nm = space.n_modes();
        let c0 = space.basis.trace_right[0];
        let mut f = Self::zeros(space);
        for (j, v) in values.iter().enumerate() {
            f.coeffs[j * nm] = v / c0;
        }
        f
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        &self.space
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.space.mesh
    }

    pub fn degree(&self) -> usize {
        self.space.degree()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn cell(&self, j: usize) -> &[f64] {
        let nm = self.space.n_modes();
        &self.coeffs[j * nm..(j + 1) * nm]
    }

    pub fn conformable(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.space, &other.space) || self.space == other.space
    }

    fn assert_conformable(&self, other: &Self) {
        assert!(
            self.conformable(other),
            "DG fields live on different meshes or degrees"
        );
    }

    /// `self ← self + alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        self.assert_conformable(other);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= alpha);
    }

    /// `alpha * x + beta * y`.
    pub fn lin_comb(alpha: f64, x: &Self, beta: f64, y: &Self) -> Self {
        x.assert_conformable(y);
        let coeffs = x
            .coeffs
            .iter()
            .zip(&y.coeffs)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Self {
            space: Arc::clone(&x.space),
            coeffs,
        }
    }

    pub fn all_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Value at reference point `xi` of cell `j`.
    pub fn eval_cell(&self, j: usize, xi: f64) -> f64 {
        self.cell(j)
            .iter()
            .enumerate()
            .map(|(i, c)| c * mode_value(i, xi))
            .sum()
    }

    pub fn interface_traces(&self) -> InterfaceTraces {
        let n = self.space.n_cells();
        let b = &self.space.basis;
        let minus: Vec<f64> = (0..n).map(|j| b.eval_right(self.cell(j))).collect();
        let plus: Vec<f64> = (0..n).map(|j| b.eval_left(self.cell((j + 1) % n))).collect();
        InterfaceTraces { minus, plus }
    }

    /// Broken L² norm.
    pub fn l2_norm(&self) -> f64 {
        // Orthonormal modes: ∫_{I_j} f² = (h_j/2) Σ c_i².
        let nm = self.space.n_modes();
        let s: f64 = self
            .coeffs
            .chunks(nm)
            .zip(&self.space.mesh.widths)
            .map(|(c, h)| 0.5 * h * c.iter().map(|x| x * x).sum::<f64>())
            .sum();
        libm::sqrt(s)
    }

    /// Broken L² norm of `self − g`, using k+3 Gauss points per cell.
    pub fn l2_error(&self, g: impl Fn(f64) -> f64) -> f64 {
        let eb = &self.space.error_basis;
        let mesh = &self.space.mesh;
        let mut vals = alloc::vec![0.0; eb.n_quad()];
        let mut s = 0.0;
        for j in 0..mesh.n_cells() {
            eb.eval_at_quad(self.cell(j), &mut vals);
            let cell: f64 = vals
                .iter()
                .zip(&eb.rule.points)
                .zip(&eb.rule.weights)
                .map(|((v, &xi), w)| {
                    let e = v - g(mesh.map(j, xi));
                    w * e * e
                })
                .sum();
            s += 0.5 * mesh.widths[j] * cell;
        }
        libm::sqrt(s)
    }

    /// Maximum of |self − g| over `samples_per_cell` Gauss points plus both
    /// endpoints of every cell.
    pub fn linf_error(&self, g: impl Fn(f64) -> f64, samples_per_cell: usize) -> f64 {
        let points = sample_points(samples_per_cell);
        let mesh = &self.space.mesh;
        let mut worst = 0.0f64;
        for j in 0..mesh.n_cells() {
            for &xi in &points {
                let e = (self.eval_cell(j, xi) - g(mesh.map(j, xi))).abs();
                // NaN must propagate so blown-up fields never look accurate.
                if e.is_nan() {
                    return f64::NAN;
                }
                worst = worst.max(e);
            }
        }
        worst
    }

    /// L∞ norm sampled like [`DGField::linf_error`] with k+3 interior points.
    pub fn linf_norm(&self) -> f64 {
        self.linf_error(|_| 0.0, self.degree() + 3)
    }

    /// |[v]| = sqrt(Σ_j [v]²_{j+1/2}), periodic wrap included.
    pub fn jump_seminorm(&self) -> f64 {
        let t = self.interface_traces();
        libm::sqrt((0..t.len()).map(|j| t.jump(j) * t.jump(j)).sum())
    }

    /// L² norm of the cellwise derivative.
    pub fn broken_deriv_l2(&self) -> f64 {
        let eb = &self.space.error_basis;
        let nm = self.space.n_modes();
        let mesh = &self.space.mesh;
        let mut s = 0.0;
        for j in 0..mesh.n_cells() {
            let c = self.cell(j);
            let cell: f64 = (0..eb.n_quad())
                .map(|q| {
                    let d: f64 = (0..nm).map(|i| c[i] * eb.dphi_at(q, i)).sum();
                    eb.rule.weights[q] * d * d
                })
                .sum();
            s += 2.0 / mesh.widths[j] * cell;
        }
        libm::sqrt(s)
    }

    /// ∫_I f dx by per-cell quadrature.
    pub fn integral(&self) -> f64 {
        let b = &self.space.basis;
        let mesh = &self.space.mesh;
        let mut vals = alloc::vec![0.0; b.n_quad()];
        let mut s = 0.0;
        for j in 0..mesh.n_cells() {
            b.eval_at_quad(self.cell(j), &mut vals);
            let cell: f64 = vals.iter().zip(&b.rule.weights).map(|(v, w)| v * w).sum();
            s += 0.5 * mesh.widths[j] * cell;
        }
        s
    }

    /// `(x, value)` pairs at both endpoints and the assembly quadrature
    /// points of every cell, ordered by x. Shared interfaces appear twice,
    /// once per side.
    pub fn sample(&self) -> Vec<(f64, f64)> {
        let b = &self.space.basis;
        let mesh = &self.space.mesh;
        let mut out = Vec::with_capacity(mesh.n_cells() * (b.n_quad() + 2));
        let mut vals = alloc::vec![0.0; b.n_quad()];
        for j in 0..mesh.n_cells() {
            let c = self.cell(j);
            out.push((mesh.nodes[j], b.eval_left(c)));
            b.eval_at_quad(c, &mut vals);
            for (q, &xi) in b.rule.points.iter().enumerate() {
                out.push((mesh.map(j, xi), vals[q]));
            }
            out.push((mesh.nodes[j + 1], b.eval_right(c)));
        }
        out
    }
}

/// Reference sample locations: Gauss points plus ±1, ascending.
pub fn sample_points(samples_per_cell: usize) -> Vec<f64> {
    let mut pts = Vec::with_capacity(samples_per_cell + 2);
    pts.push(-1.0);
    if let Ok(rule) = gauss_legendre_rule(samples_per_cell.clamp(1, crate::quadrature::MAX_POINTS)) {
        pts.extend_from_slice(&rule.points);
    }
    pts.push(1.0);
    pts
}
