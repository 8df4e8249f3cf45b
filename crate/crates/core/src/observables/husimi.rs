//! Husimi phase-space distribution on the discrete torus: position is the
//! computational basis index `x in [0, 2N)`, momentum the Fourier-conjugate
//! index `p in (-N, N]`.
//!
//! `h(x0, p0) = |sum_x K(x - x0) exp(-i pi p0 x / N) psi_x|^2` with a
//! periodic Gaussian kernel of variance `sigma_x^2 = M / (4 pi)`, which gives
//! symmetric resolution in `x` and `p`. The normalization constant is fixed
//! once from the kernel so that a unit-norm state sums to exactly 1 over the
//! full fine grid, independent of the state.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::state::QuantumState;

/// Non-negative phase-space density, row-major over (position row,
/// momentum column). Columns run over `p = -N+1 ..= N` left to right.
#[derive(Debug, Clone)]
pub struct HusimiGrid {
    pub x_cells: usize,
    pub p_cells: usize,
    /// Row-major `[x_cell][p_cell]` densities; sums to 1 for unit-norm input.
    pub data: Vec<f64>,
    /// Fine (uncoarsened) grid dimension `M = 2N`.
    pub m: usize,
    pub sigma_x2: f64,
}

impl HusimiGrid {
    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn at(&self, x_cell: usize, p_cell: usize) -> f64 {
        self.data[x_cell * self.p_cells + p_cell]
    }

    /// Total mass per momentum column.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.p_cells];
        for x in 0..self.x_cells {
            for p in 0..self.p_cells {
                out[p] += self.at(x, p);
            }
        }
        out
    }

    /// Total mass per position row.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.x_cells)
            .map(|x| {
                self.data[x * self.p_cells..(x + 1) * self.p_cells]
                    .iter()
                    .sum()
            })
            .collect()
    }
}

/// Compute the Husimi distribution, coarse-grained by summing fine cells
/// into `coarse = (x_cells, p_cells)`. Cell counts must divide the fine
/// dimension `M`; pass `(M, M)` for the full-resolution grid. The usual
/// output setting is 128 x 128.
pub fn husimi(state: &QuantumState, coarse: (usize, usize)) -> Result<HusimiGrid> {
    let m = state.dim();
    let (x_cells, p_cells) = coarse;
    if x_cells == 0 || p_cells == 0 || m % x_cells != 0 || m % p_cells != 0 {
        return Err(Error::Size(format!(
            "coarse cells {x_cells}x{p_cells} must divide the fine dimension {m}"
        )));
    }
    let n = m / 2;
    let sigma_x2 = m as f64 / (4.0 * std::f64::consts::PI);

    // periodic Gaussian kernel over circular offsets
    let mut kernel = vec![0.0f64; m];
    for (d, k) in kernel.iter_mut().enumerate() {
        let mut acc = 0.0;
        for wrap in -3i64..=3 {
            let dd = d as f64 + wrap as f64 * m as f64;
            acc += (-dd * dd / (2.0 * sigma_x2)).exp();
        }
        *k = acc;
    }
    let kernel_power: f64 = kernel.iter().map(|k| k * k).sum();
    // Parseval over the p-transform gives grid sum = M * kernel_power
    let norm = 1.0 / (m as f64 * kernel_power);

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);

    let x_block = m / x_cells;
    let p_block = m / p_cells;
    let mut data = vec![0.0f64; x_cells * p_cells];
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    let amps = state.amplitudes();
    for x0 in 0..m {
        for (x, b) in buf.iter_mut().enumerate() {
            // kernel indexed by circular offset x - x0
            let d = (x + m - x0) & (m - 1);
            *b = amps[x] * kernel[d];
        }
        fft.process(&mut buf);
        let row = x0 / x_block;
        for (k, b) in buf.iter().enumerate() {
            // forward bin k corresponds to momentum p = k (k <= N) or k - M
            let p = if k <= n {
                k as i64
            } else {
                k as i64 - m as i64
            };
            let col = (p + n as i64 - 1) as usize / p_block;
            data[row * p_cells + col] += b.norm_sqr() * norm;
        }
    }

    Ok(HusimiGrid {
        x_cells,
        p_cells,
        data,
        m,
        sigma_x2,
    })
}
