//! FFT plumbing on the periodic grid: forward/inverse transforms and
//! Fourier-multiplier application for dimensions 1 and 2.

use std::sync::Mutex;

use once_cell::sync::Lazy;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::grid::{Grid, GridFunction};

static PLANNER: Lazy<Mutex<FftPlanner<f64>>> = Lazy::new(|| Mutex::new(FftPlanner::new()));

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = PLANNER.lock().unwrap();
    if inverse {
        planner.plan_fft_inverse(len)
    } else {
        planner.plan_fft_forward(len)
    }
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

fn fft_nd(buf: &mut [Complex64], dim: usize, n: usize, inverse: bool) {
    let fft = plan(n, inverse);
    match dim {
        1 => fft.process(buf),
        _ => {
            for row in buf.chunks_exact_mut(n) {
                fft.process(row);
            }
            transpose(buf, n);
            for row in buf.chunks_exact_mut(n) {
                fft.process(row);
            }
            transpose(buf, n);
        }
    }
}

/// Forward DFT of real grid data.
pub fn forward(grid: &Grid, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&mut buf, grid.dim(), grid.points_per_side(), false);
    buf
}

/// Inverse DFT back to real data (imaginary parts discarded; inputs are
/// expected to be conjugate-symmetric spectra of real data).
pub fn inverse(grid: &Grid, mut spec: Vec<Complex64>) -> Vec<f64> {
    fft_nd(&mut spec, grid.dim(), grid.points_per_side(), true);
    let scale = 1.0 / grid.len() as f64;
    spec.into_iter().map(|c| c.re * scale).collect()
}

/// |xi| at the flattened spectral index: frequencies `2 pi k / L` with `k`
/// the signed lattice index.
pub fn freq_abs(grid: &Grid, idx: usize) -> f64 {
    let n = grid.points_per_side();
    let base = 2.0 * std::f64::consts::PI / grid.side_length();
    let signed = |k: usize| -> f64 {
        let k = k as i64;
        let n = n as i64;
        let s = if k <= n / 2 { k } else { k - n };
        s as f64
    };
    match grid.dim() {
        1 => base * signed(idx).abs(),
        _ => {
            let ki = signed(idx / n);
            let kj = signed(idx % n);
            base * (ki * ki + kj * kj).sqrt()
        }
    }
}

/// Apply a radial Fourier multiplier `sym(|xi|)` to a grid function.
pub fn apply_multiplier(f: &GridFunction, sym: impl Fn(f64) -> f64) -> GridFunction {
    let grid = f.grid();
    let mut spec = forward(grid, f.values());
    for (idx, c) in spec.iter_mut().enumerate() {
        *c *= sym(freq_abs(grid, idx));
    }
    let values = inverse(grid, spec);
    GridFunction::new(grid.clone(), values).expect("multiplier output on same grid")
}

/// Apply the multiplier given by the DFT of a sampled kernel (offset
/// layout: entry `j` holds the kernel at lattice offset `j`, wrapped).
/// This is the exact circular convolution `sum_j k_j f_{i-j} h^n`.
pub fn apply_sampled_kernel(f: &GridFunction, kernel: &[f64]) -> GridFunction {
    let grid = f.grid();
    let hn = grid.cell_measure();
    let ksym = forward(grid, kernel);
    let mut spec = forward(grid, f.values());
    for (c, k) in spec.iter_mut().zip(&ksym) {
        *c *= k * hn;
    }
    let values = inverse(grid, spec);
    GridFunction::new(grid.clone(), values).expect("convolution output on same grid")
}
