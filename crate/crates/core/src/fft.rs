//! Two-dimensional real FFTs with a transposed half-spectrum layout.
//!
//! For a `rows × cols` real array the spectrum holds `cols/2 + 1` columns of
//! `rows` complex values, stored column-major: entry `(r, c)` lives at
//! `c * rows + r`. Column transforms then run on contiguous slices.
//! Both directions are unnormalized.

use std::sync::Arc;

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

pub struct RealFft2 {
    rows: usize,
    cols: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    row_in: Vec<f64>,
    row_out: Vec<Complex64>,
    row_scratch: Vec<Complex64>,
    col_scratch: Vec<Complex64>,
}

impl std::fmt::Debug for RealFft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RealFft2")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .finish()
    }
}

impl RealFft2 {
    pub fn new(rows: usize, cols: usize) -> Self {
        let mut real = RealFftPlanner::<f64>::new();
        let mut cplx = FftPlanner::<f64>::new();
        let r2c = real.plan_fft_forward(cols);
        let c2r = real.plan_fft_inverse(cols);
        let col_fwd = cplx.plan_fft_forward(rows);
        let col_inv = cplx.plan_fft_inverse(rows);
        let row_scratch_len = r2c
            .get_scratch_len()
            .max(c2r.get_scratch_len());
        let col_scratch_len = col_fwd
            .get_inplace_scratch_len()
            .max(col_inv.get_inplace_scratch_len());
        Self {
            rows,
            cols,
            row_in: r2c.make_input_vec(),
            row_out: r2c.make_output_vec(),
            row_scratch: vec![Complex64::default(); row_scratch_len],
            col_scratch: vec![Complex64::default(); col_scratch_len],
            r2c,
            c2r,
            col_fwd,
            col_inv,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn half_cols(&self) -> usize {
        self.cols / 2 + 1
    }

    pub fn spectrum_len(&self) -> usize {
        self.half_cols() * self.rows
    }

    /// Forward transform of a `src_rows × src_cols` block placed in the
    /// top-left corner of an otherwise zero `rows × cols` array.
    pub fn forward_padded(
        &mut self,
        src: &[f64],
        src_rows: usize,
        src_cols: usize,
        spec: &mut [Complex64],
    ) {
        assert!(src_rows <= self.rows && src_cols <= self.cols);
        assert_eq!(src.len(), src_rows * src_cols);
        assert_eq!(spec.len(), self.spectrum_len());
        let rows = self.rows;
        let hc = self.half_cols();
        for r in 0..rows {
            if r < src_rows {
                self.row_in[..src_cols].copy_from_slice(&src[r * src_cols..(r + 1) * src_cols]);
                self.row_in[src_cols..].fill(0.0);
                self.r2c
                    .process_with_scratch(&mut self.row_in, &mut self.row_out, &mut self.row_scratch)
                    .expect("row buffers sized by the planner");
                for c in 0..hc {
                    spec[c * rows + r] = self.row_out[c];
                }
            } else {
                for c in 0..hc {
                    spec[c * rows + r] = Complex64::default();
                }
            }
        }
        for column in spec.chunks_exact_mut(rows) {
            self.col_fwd
                .process_with_scratch(column, &mut self.col_scratch);
        }
    }

    pub fn forward(&mut self, src: &[f64], spec: &mut [Complex64]) {
        self.forward_padded(src, self.rows, self.cols, spec);
    }

    /// Inverse transform; writes the top-left `dst_rows × dst_cols` block.
    /// `spec` is used as workspace and overwritten.
    pub fn inverse_cropped(
        &mut self,
        spec: &mut [Complex64],
        dst: &mut [f64],
        dst_rows: usize,
        dst_cols: usize,
    ) {
        assert!(dst_rows <= self.rows && dst_cols <= self.cols);
        assert_eq!(dst.len(), dst_rows * dst_cols);
        assert_eq!(spec.len(), self.spectrum_len());
        let rows = self.rows;
        let hc = self.half_cols();
        for column in spec.chunks_exact_mut(rows) {
            self.col_inv
                .process_with_scratch(column, &mut self.col_scratch);
        }
        for r in 0..dst_rows {
            for c in 0..hc {
                self.row_out[c] = spec[c * rows + r];
            }
            // c2r requires real DC and Nyquist bins
            self.row_out[0].im = 0.0;
            if self.cols.is_multiple_of(2) {
                self.row_out[hc - 1].im = 0.0;
            }
            self.c2r
                .process_with_scratch(&mut self.row_out, &mut self.row_in, &mut self.row_scratch)
                .expect("row buffers sized by the planner");
            dst[r * dst_cols..(r + 1) * dst_cols].copy_from_slice(&self.row_in[..dst_cols]);
        }
    }

    pub fn inverse(&mut self, spec: &mut [Complex64], dst: &mut [f64]) {
        self.inverse_cropped(spec, dst, self.rows, self.cols);
    }
}
