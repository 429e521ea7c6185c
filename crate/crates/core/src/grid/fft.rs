//! Centred, unitary 2-D DFT on row-major buffers.
//!
//! The zero frequency sits at index `n/2` on each axis. For even `n` with
//! `n/2` even, centring reduces to a `(-1)^(i+j)` checkerboard before and
//! after an ordinary FFT, so no array rolls are needed.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// Sign of the transform kernel: `Positive` computes
/// `sum_n f[n] exp(+2 pi i m n / N) / sqrt(N)` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelSign {
    Positive,
    Negative,
}

impl KernelSign {
    fn direction(self) -> FftDirection {
        match self {
            KernelSign::Positive => FftDirection::Inverse,
            KernelSign::Negative => FftDirection::Forward,
        }
    }
}

fn checkerboard(data: &mut [Complex64], nx: usize) {
    for (i, row) in data.chunks_exact_mut(nx).enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if (i + j) % 2 == 1 {
                *v = -*v;
            }
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const BLOCK: usize = 32;
    for ib in (0..rows).step_by(BLOCK) {
        for jb in (0..cols).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(rows) {
                for j in jb..(jb + BLOCK).min(cols) {
                    dst[j * rows + i] = src[i * cols + j];
                }
            }
        }
    }
}

/// In-place centred unitary 2-D DFT of an `ny x nx` row-major buffer.
pub fn centered_dft2(data: &mut [Complex64], nx: usize, ny: usize, sign: KernelSign) {
    assert_eq!(data.len(), nx * ny);
    debug_assert!(nx.is_multiple_of(4) && ny.is_multiple_of(4));
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = planner.plan_fft(nx, sign.direction());
    let col_fft = planner.plan_fft(ny, sign.direction());
    let scratch_len = row_fft
        .get_inplace_scratch_len()
        .max(col_fft.get_inplace_scratch_len());
    let mut scratch = vec![Complex64::new(0.0, 0.0); scratch_len];

    checkerboard(data, nx);
    row_fft.process_with_scratch(data, &mut scratch);
    let mut t = vec![Complex64::new(0.0, 0.0); data.len()];
    transpose(data, &mut t, ny, nx);
    col_fft.process_with_scratch(&mut t, &mut scratch);
    transpose(&t, data, nx, ny);
    checkerboard(data, nx);

    let scale = 1.0 / ((nx * ny) as f64).sqrt();
    for v in data.iter_mut() {
        *v *= scale;
    }
}
