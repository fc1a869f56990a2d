//! Small dense LU and a block-tridiagonal solver with periodic corner blocks.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// LU factorization with partial pivoting of a dense row-major `n × n` matrix.
#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl DenseLu {
    pub fn new(n: usize, mut a: Vec<f64>) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Singular);
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (p, pmax) = (col..n)
                .map(|r| (r, a[r * n + col].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= 1e-14 * scale {
                return Err(Error::Singular);
            }
            if p != col {
                for c in 0..n {
                    a.swap(p * n + c, col * n + c);
                }
                perm.swap(p, col);
            }
            let piv = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / piv;
                a[r * n + col] = f;
                for c in col + 1..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let s: f64 = (0..r).map(|c| self.lu[r * n + c] * x[c]).sum();
            x[r] -= s;
        }
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|c| self.lu[r * n + c] * x[c]).sum();
            x[r] = (x[r] - s) / self.lu[r * n + r];
        }
        x
    }

    pub fn inverse(&self) -> Vec<f64> {
        let n = self.n;
        let mut inv = vec![0.0; n * n];
        let mut e = vec![0.0; n];
        for c in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[c] = 1.0;
            let col = self.solve(&e);
            for r in 0..n {
                inv[r * n + c] = col[r];
            }
        }
        inv
    }
}

pub(crate) fn mat_mul(m: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m * m];
    for r in 0..m {
        for k in 0..m {
            let ark = a[r * m + k];
            if ark == 0.0 {
                continue;
            }
            for c in 0..m {
                out[r * m + c] += ark * b[k * m + c];
            }
        }
    }
    out
}

fn mat_sub_assign(a: &mut [f64], b: &[f64]) {
    a.iter_mut().zip(b).for_each(|(x, y)| *x -= y);
}

fn mat_add_assign(a: &mut [f64], b: &[f64]) {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
}

/// `y -= A x` for an `m × m` block.
fn gemv_sub(m: usize, a: &[f64], x: &[f64], y: &mut [f64]) {
    for r in 0..m {
        y[r] -= (0..m).map(|c| a[r * m + c] * x[c]).sum::<f64>();
    }
}

/// Block-tridiagonal matrix with periodic wrap: block row `j` couples to
/// `j−1`, `j` and `j+1` modulo `n`. Blocks are `m × m`, row-major.
///
/// When `n ≤ 2` neighbours coincide and their blocks add up.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicBlockTridiagonal {
    pub m: usize,
    pub n: usize,
    /// `lower[j] = A[j][j−1 mod n]`
    pub lower: Vec<Vec<f64>>,
    pub diag: Vec<Vec<f64>>,
    /// `upper[j] = A[j][j+1 mod n]`
    pub upper: Vec<Vec<f64>>,
}

impl CyclicBlockTridiagonal {
    pub fn zeros(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            lower: vec![vec![0.0; m * m]; n],
            diag: vec![vec![0.0; m * m]; n],
            upper: vec![vec![0.0; m * m]; n],
        }
    }

    pub fn identity(m: usize, n: usize) -> Self {
        let mut a = Self::zeros(m, n);
        for d in &mut a.diag {
            for i in 0..m {
                d[i * m + i] = 1.0;
            }
        }
        a
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let (m, n) = (self.m, self.n);
        let mut y = vec![0.0; m * n];
        for j in 0..n {
            let jm = (j + n - 1) % n;
            let jp = (j + 1) % n;
            let yj = &mut y[j * m..(j + 1) * m];
            for (r, out) in yj.iter_mut().enumerate() {
                let mut s = 0.0;
                for c in 0..m {
                    s += self.lower[j][r * m + c] * x[jm * m + c]
                        + self.diag[j][r * m + c] * x[j * m + c]
                        + self.upper[j][r * m + c] * x[jp * m + c];
                }
                *out = s;
            }
        }
        y
    }

    /// Dense `(n·m)²` copy, for tests and small problems.
    pub fn to_dense(&self) -> Vec<f64> {
        let (m, n) = (self.m, self.n);
        let dim = m * n;
        let mut a = vec![0.0; dim * dim];
        for j in 0..n {
            for (blk, col) in [
                (&self.lower[j], (j + n - 1) % n),
                (&self.diag[j], j),
                (&self.upper[j], (j + 1) % n),
            ] {
                for r in 0..m {
                    for c in 0..m {
                        a[(j * m + r) * dim + col * m + c] += blk[r * m + c];
                    }
                }
            }
        }
        a
    }

    /// Block Gaussian elimination without inter-block pivoting; fill is
    /// confined to the last block row and column.
    pub fn factorize(&self) -> Result<CyclicFactorization> {
        let (m, n) = (self.m, self.n);
        if n == 1 {
            let mut d = self.diag[0].clone();
            mat_add_assign(&mut d, &self.lower[0]);
            mat_add_assign(&mut d, &self.upper[0]);
            return Ok(CyclicFactorization {
                m,
                n,
                pivots: Vec::new(),
                upper: Vec::new(),
                right: Vec::new(),
                row_mult: Vec::new(),
                bottom_mult: Vec::new(),
                last: DenseLu::new(m, d)?,
            });
        }
        let last_row = n - 1;
        let mut d: Vec<Vec<f64>> = self.diag[..last_row].to_vec();
        let mut right = vec![vec![0.0; m * m]; last_row];
        let mut bottom = vec![vec![0.0; m * m]; last_row];
        mat_add_assign(&mut right[0], &self.lower[0]);
        mat_add_assign(&mut right[n - 2], &self.upper[n - 2]);
        mat_add_assign(&mut bottom[0], &self.upper[last_row]);
        mat_add_assign(&mut bottom[n - 2], &self.lower[last_row]);
        let mut d_last = self.diag[last_row].clone();

        let mut pivots = Vec::with_capacity(last_row);
        let mut row_mult = vec![Vec::new(); last_row];
        let mut bottom_mult = Vec::with_capacity(last_row);
        for i in 0..last_row {
            let lu = DenseLu::new(m, d[i].clone())?;
            let inv = lu.inverse();
            if i + 1 < last_row {
                let mult = mat_mul(m, &self.lower[i + 1], &inv);
                let upd = mat_mul(m, &mult, &self.upper[i]);
                mat_sub_assign(&mut d[i + 1], &upd);
                let upd = mat_mul(m, &mult, &right[i]);
                mat_sub_assign(&mut right[i + 1], &upd);
                row_mult[i + 1] = mult;
            }
            let bmult = mat_mul(m, &bottom[i], &inv);
            if i + 1 < last_row {
                let upd = mat_mul(m, &bmult, &self.upper[i]);
                mat_sub_assign(&mut bottom[i + 1], &upd);
            }
            let upd = mat_mul(m, &bmult, &right[i]);
            mat_sub_assign(&mut d_last, &upd);
            bottom_mult.push(bmult);
            pivots.push(lu);
        }
        let upper = (0..last_row.saturating_sub(1)).map(|i| self.upper[i].clone()).collect();
        Ok(CyclicFactorization {
            m,
            n,
            pivots,
            upper,
            right,
            row_mult,
            bottom_mult,
            last: DenseLu::new(m, d_last)?,
        })
    }
}

/// Factors of a [`CyclicBlockTridiagonal`], reusable for many right-hand sides.
#[derive(Debug, Clone)]
pub struct CyclicFactorization {
    m: usize,
    n: usize,
    pivots: Vec<DenseLu>,
    upper: Vec<Vec<f64>>,
    right: Vec<Vec<f64>>,
    row_mult: Vec<Vec<f64>>,
    bottom_mult: Vec<Vec<f64>>,
    last: DenseLu,
}

impl CyclicFactorization {
    pub fn dim(&self) -> usize {
        self.m * self.n
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (m, n) = (self.m, self.n);
        assert_eq!(rhs.len(), m * n);
        if n == 1 {
            return self.last.solve(rhs);
        }
        let last_row = n - 1;
        let mut b = rhs.to_vec();
        for i in 0..last_row {
            let (head, tail) = b.split_at_mut((i + 1) * m);
            let bi = &head[i * m..];
            if i + 1 < last_row {
                gemv_sub(m, &self.row_mult[i + 1], bi, &mut tail[..m]);
            }
            let off = (last_row - i - 1) * m;
            gemv_sub(m, &self.bottom_mult[i], bi, &mut tail[off..off + m]);
        }
        let mut x = vec![0.0; m * n];
        let x_last = self.last.solve(&b[last_row * m..]);
        x[last_row * m..].copy_from_slice(&x_last);
        for i in (0..last_row).rev() {
            let mut r = b[i * m..(i + 1) * m].to_vec();
            gemv_sub(m, &self.right[i], &x_last, &mut r);
            if i + 1 < last_row {
                let next = x[(i + 1) * m..(i + 2) * m].to_vec();
                gemv_sub(m, &self.upper[i], &next, &mut r);
            }
            let xi = self.pivots[i].solve(&r);
            x[i * m..(i + 1) * m].copy_from_slice(&xi);
        }
        x
    }
}
