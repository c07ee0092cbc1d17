//! Inverse of the constant-coefficient operator via FFT, used as a
//! preconditioner for variable coefficients.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::grid::Shape;
use crate::fields::MatrixField;

pub struct FourierPreconditioner {
    shape: Shape,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    inv_symbol: Vec<f64>,
}

impl std::fmt::Debug for FourierPreconditioner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPreconditioner")
            .field("shape", &self.shape)
            .finish_non_exhaustive()
    }
}

/// Symbol of the discrete `ā^{ij}D_iD_j + c̄ − λ` at frequency `m`.
pub fn discrete_symbol(a: &[f64], c: f64, lambda: f64, shape: Shape, m: &[usize]) -> f64 {
    let d = shape.d;
    let h = 1.0 / shape.n as f64;
    let theta: Vec<f64> = m
        .iter()
        .map(|&k| 2.0 * std::f64::consts::PI * k as f64 / shape.n as f64)
        .collect();
    let mut s = c - lambda;
    for i in 0..d {
        s -= a[i * d + i] * 4.0 * (0.5 * theta[i]).sin().powi(2) / (h * h);
        for j in 0..d {
            if j != i {
                s -= a[i * d + j] * theta[i].sin() * theta[j].sin() / (h * h);
            }
        }
    }
    s
}

fn transform(shape: Shape, data: &mut [Complex<f64>], fft: &Arc<dyn Fft<f64>>) {
    let n = shape.n;
    let mut line = vec![Complex::new(0.0, 0.0); n];
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..shape.d {
        let stride = shape.stride(axis);
        for start in 0..data.len() {
            if shape.coord(start, axis) != 0 {
                continue;
            }
            for (k, l) in line.iter_mut().enumerate() {
                *l = data[start + k * stride];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (k, l) in line.iter().enumerate() {
                data[start + k * stride] = *l;
            }
        }
    }
}

impl FourierPreconditioner {
    /// Built from the mean of the coefficients of `field`.
    pub fn from_field(field: &MatrixField, lambda: f64) -> Self {
        let d = field.d();
        let samples = field.sample_count();
        let mut a = vec![0.0; d * d];
        let mut c = 0.0;
        for idx in 0..samples {
            for (m, v) in a.iter_mut().zip(field.matrix(idx)) {
                *m += v;
            }
            c += field.potential(idx).unwrap_or(0.0);
        }
        a.iter_mut().for_each(|v| *v /= samples as f64);
        c /= samples as f64;
        Self::constant(d, field.n(), &a, c, lambda)
    }

    pub fn constant(d: usize, n: usize, a: &[f64], c: f64, lambda: f64) -> Self {
        let shape = Shape { d, n };
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let inv_symbol = (0..shape.len())
            .map(|idx| {
                let m: Vec<usize> = (0..d).map(|k| shape.coord(idx, k)).collect();
                let s = discrete_symbol(a, c, lambda, shape, &m);
                if s.abs() > 1e-300 {
                    1.0 / s
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            shape,
            forward,
            inverse,
            inv_symbol,
        }
    }

    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        let mut buf: Vec<Complex<f64>> = r.iter().map(|&v| Complex::new(v, 0.0)).collect();
        transform(self.shape, &mut buf, &self.forward);
        for (b, s) in buf.iter_mut().zip(&self.inv_symbol) {
            *b *= *s;
        }
        transform(self.shape, &mut buf, &self.inverse);
        let scale = 1.0 / self.shape.len() as f64;
        for (zi, b) in z.iter_mut().zip(&buf) {
            *zi = b.re * scale;
        }
    }
}
