use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Periodic partition of `[x_left, x_right]`; interface `n_cells` wraps onto interface 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    pub x_left: f64,
    pub x_right: f64,
    pub nodes: Vec<f64>,
    pub widths: Vec<f64>,
    pub h_max: f64,
}

impl Mesh1D {
    /// Uniform mesh with `n_cells ≥ 2` cells.
    pub fn uniform(x_left: f64, x_right: f64, n_cells: usize) -> Result<Self> {
        if n_cells < 2 {
            return Err(Error::InvalidMesh(format!("need at least 2 cells, got {n_cells}")));
        }
        if !(x_right > x_left) || !x_left.is_finite() || !x_right.is_finite() {
            return Err(Error::InvalidMesh(format!("empty interval [{x_left}, {x_right}]")));
        }
        let h = (x_right - x_left) / n_cells as f64;
        let mut nodes: Vec<f64> = (0..=n_cells).map(|j| x_left + j as f64 * h).collect();
        nodes[n_cells] = x_right;
        let widths = alloc::vec![h; n_cells];
        Ok(Self {
            x_left,
            x_right,
            nodes,
            widths,
            h_max: h,
        })
    }

    /// Arbitrary mesh from strictly increasing nodes; a single cell is allowed.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidMesh(format!("need at least 2 nodes, got {}", nodes.len())));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMesh("non-finite node".into()));
        }
        let widths: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(j) = widths.iter().position(|&h| h <= 0.0) {
            return Err(Error::InvalidMesh(format!("nodes not increasing at cell {j}")));
        }
        let h_max = widths.iter().cloned().fold(0.0, f64::max);
        Ok(Self {
            x_left: nodes[0],
            x_right: nodes[nodes.len() - 1],
            nodes,
            widths,
            h_max,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.widths.len()
    }

    pub fn center(&self, j: usize) -> f64 {
        0.5 * (self.nodes[j] + self.nodes[j + 1])
    }

    pub fn length(&self) -> f64 {
        self.x_right - self.x_left
    }

    /// Physical coordinate of reference point `xi ∈ [−1, 1]` in cell `j`.
    #[inline]
    pub fn map(&self, j: usize, xi: f64) -> f64 {
        self.center(j) + 0.5 * self.widths[j] * xi
    }

    /// `h_max / h_min`, recorded for diagnostics only.
    pub fn quasi_uniformity(&self) -> f64 {
        let h_min = self.widths.iter().cloned().fold(f64::INFINITY, f64::min);
        self.h_max / h_min
    }
}
