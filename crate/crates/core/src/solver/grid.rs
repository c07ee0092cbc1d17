//! Periodic grid functions on `[0,1)^d` and their difference quotients.

use super::{Result, SolverError};
use crate::exec;

/// Values at cell centres `((i_0 + ½)h, …, (i_{d−1} + ½)h)`, axis 0 fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    d: usize,
    n: usize,
    data: Vec<f64>,
}

/// Flat-index arithmetic for an `n^d` periodic grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub d: usize,
    pub n: usize,
}

impl Shape {
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow(axis as u32)
    }

    pub fn coord(&self, idx: usize, axis: usize) -> usize {
        (idx / self.stride(axis)) % self.n
    }

    /// Index of the neighbour `offset` cells away along `axis`, with wraparound.
    pub fn shift(&self, idx: usize, axis: usize, offset: isize) -> usize {
        let s = self.stride(axis);
        let c = self.coord(idx, axis) as isize;
        let n = self.n as isize;
        let c2 = (c + offset).rem_euclid(n);
        (idx as isize + (c2 - c) * s as isize) as usize
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        let h = 1.0 / self.n as f64;
        (0..self.d)
            .map(|k| (self.coord(idx, k) as f64 + 0.5) * h)
            .collect()
    }
}

impl GridFunction {
    pub fn new(d: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(SolverError::Shape("empty grid".into()));
        }
        if data.len() != n.pow(d as u32) {
            return Err(SolverError::Shape(format!(
                "{} values for an {n}^{d} grid",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite);
        }
        Ok(Self { d, n, data })
    }

    pub fn zeros(d: usize, n: usize) -> Self {
        Self {
            d,
            n,
            data: vec![0.0; n.pow(d as u32)],
        }
    }

    pub fn from_fn(d: usize, n: usize, f: impl Fn(&[f64]) -> f64 + Sync + Send) -> Self {
        let shape = Shape { d, n };
        let mut data = vec![0.0; shape.len()];
        exec::fill_indexed(&mut data, |idx| f(&shape.point(idx)));
        Self { d, n, data }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn shape(&self) -> Shape {
        Shape { d: self.d, n: self.n }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            d: self.d,
            n: self.n,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.shape(), other.shape());
        Self {
            d: self.d,
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(Σ |g|^p h^d)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(SolverError::InvalidExponent(p));
        }
        let cell = self.h().powi(self.d as i32);
        let s = exec::sum_over(self.data.len(), |i| self.data[i].abs().powf(p));
        Ok((s * cell).powf(1.0 / p))
    }

    /// Central first differences, one component per axis.
    pub fn gradient(&self) -> Vec<GridFunction> {
        let shape = self.shape();
        let inv = 0.5 / self.h();
        (0..self.d)
            .map(|k| {
                let mut out = vec![0.0; self.len()];
                exec::fill_indexed(&mut out, |i| {
                    (self.data[shape.shift(i, k, 1)] - self.data[shape.shift(i, k, -1)]) * inv
                });
                GridFunction { d: self.d, n: self.n, data: out }
            })
            .collect()
    }

    /// Second differences, row-major `d × d`: three-point on the diagonal,
    /// the symmetric four-point cross off the diagonal.
    pub fn hessian(&self) -> Vec<GridFunction> {
        let d = self.d;
        let mut out = vec![GridFunction::zeros(d, self.n); d * d];
        for i in 0..d {
            for j in i..d {
                let comp = self.second_difference(i, j);
                if i != j {
                    out[j * d + i] = comp.clone();
                }
                out[i * d + j] = comp;
            }
        }
        out
    }

    /// Second difference along axes `(i, j)`.
    pub fn second_difference(&self, i: usize, j: usize) -> GridFunction {
        let shape = self.shape();
        let h2 = self.h() * self.h();
        let u = &self.data;
        let mut out = vec![0.0; self.len()];
        if i == j {
            exec::fill_indexed(&mut out, |k| {
                (u[shape.shift(k, i, 1)] - 2.0 * u[k] + u[shape.shift(k, i, -1)]) / h2
            });
        } else {
            exec::fill_indexed(&mut out, |k| {
                let p = shape.shift(k, i, 1);
                let m = shape.shift(k, i, -1);
                (u[shape.shift(p, j, 1)] - u[shape.shift(p, j, -1)] - u[shape.shift(m, j, 1)]
                    + u[shape.shift(m, j, -1)])
                    / (4.0 * h2)
            });
        }
        GridFunction { d: self.d, n: self.n, data: out }
    }
}

/// Pointwise Euclidean norm of a family of components.
pub fn pointwise_norm(components: &[GridFunction]) -> GridFunction {
    let first = &components[0];
    let mut out = vec![0.0; first.len()];
    exec::fill_indexed(&mut out, |i| {
        components.iter().map(|c| c.data[i] * c.data[i]).sum::<f64>().sqrt()
    });
    GridFunction { d: first.d, n: first.n, data: out }
}

/// `‖ |∇u| ‖_p` with the Euclidean norm of the gradient.
pub fn gradient_norm(u: &GridFunction, p: f64) -> Result<f64> {
    pointwise_norm(&u.gradient()).lp_norm(p)
}

/// `‖ |D²u| ‖_p` with the Frobenius norm of the Hessian.
pub fn hessian_norm(u: &GridFunction, p: f64) -> Result<f64> {
    pointwise_norm(&u.hessian()).lp_norm(p)
}
