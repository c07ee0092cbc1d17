//! Assembly of `a^{ij}D_iD_j + b^iD_i + c − λ` on a periodic grid.

use super::grid::{GridFunction, Shape};
use super::{Result, SolverError};
use crate::exec;
use crate::fields::MatrixField;

/// CSR matrix of the discrete operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    shape: Shape,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    diag_pos: Vec<usize>,
    lambda: f64,
}

fn row_entries(field: &MatrixField, shape: Shape, row: usize, lambda: f64) -> Vec<(u32, f64)> {
    let d = shape.d;
    let h = 1.0 / shape.n as f64;
    let h2 = h * h;
    let a = field.matrix(row);
    let mut e: Vec<(u32, f64)> = Vec::with_capacity(1 + 2 * d * d);
    let mut centre = field.potential(row).unwrap_or(0.0) - lambda;
    for i in 0..d {
        let aii = a[i * d + i];
        e.push((shape.shift(row, i, 1) as u32, aii / h2));
        e.push((shape.shift(row, i, -1) as u32, aii / h2));
        centre -= 2.0 * aii / h2;
        for j in i + 1..d {
            // a^{ij} + a^{ji} = 2a^{ij}, cross stencil weight 1/(4h²)
            let w = a[i * d + j] / (2.0 * h2);
            let p = shape.shift(row, i, 1);
            let m = shape.shift(row, i, -1);
            e.push((shape.shift(p, j, 1) as u32, w));
            e.push((shape.shift(p, j, -1) as u32, -w));
            e.push((shape.shift(m, j, 1) as u32, -w));
            e.push((shape.shift(m, j, -1) as u32, w));
        }
    }
    if let Some(b) = field.drift(row) {
        for (i, bi) in b.iter().enumerate() {
            e.push((shape.shift(row, i, 1) as u32, bi / (2.0 * h)));
            e.push((shape.shift(row, i, -1) as u32, -bi / (2.0 * h)));
        }
    }
    e.push((row as u32, centre));
    e.sort_by_key(|&(c, _)| c);
    let mut merged: Vec<(u32, f64)> = Vec::with_capacity(e.len());
    for (c, v) in e {
        match merged.last_mut() {
            Some(last) if last.0 == c => last.1 += v,
            _ => merged.push((c, v)),
        }
    }
    merged.retain(|&(c, v)| v != 0.0 || c as usize == row);
    merged
}

/// Assembles the operator for `field` (including its lower-order terms, when
/// present) and `λ ≥ 0`.
pub fn discretize(field: &MatrixField, lambda: f64) -> Result<SparseOperator> {
    if !(lambda >= 0.0) {
        return Err(SolverError::NegativeLambda(lambda));
    }
    let shape = Shape {
        d: field.d(),
        n: field.n(),
    };
    if shape.len() > u32::MAX as usize {
        return Err(SolverError::Shape("grid too large".into()));
    }
    let rows = exec::map_indices(shape.len(), |r| row_entries(field, shape, r, lambda));
    let mut row_ptr = Vec::with_capacity(rows.len() + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut diag_pos = Vec::with_capacity(rows.len());
    row_ptr.push(0);
    for (r, entries) in rows.into_iter().enumerate() {
        for (c, v) in entries {
            if c as usize == r {
                diag_pos.push(cols.len());
            }
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    Ok(SparseOperator {
        shape,
        row_ptr,
        cols,
        vals,
        diag_pos,
        lambda,
    })
}

impl SparseOperator {
    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn rows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(|k| (self.cols[k] as usize, self.vals[k]))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.diag_pos.iter().map(|&k| self.vals[k]).collect()
    }

    /// The same operator with `λ` replaced; only the diagonal moves.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(SolverError::NegativeLambda(lambda));
        }
        let mut out = self.clone();
        let delta = lambda - self.lambda;
        for &k in &out.diag_pos {
            out.vals[k] -= delta;
        }
        out.lambda = lambda;
        Ok(out)
    }

    fn row_dot(&self, r: usize, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for k in self.row_ptr[r]..self.row_ptr[r + 1] {
            s += self.vals[k] * x[self.cols[k] as usize];
        }
        s
    }

    /// `y = A x`, sequential.
    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = self.row_dot(r, x);
        }
    }

    /// `y = A x`, data-parallel over rows.
    pub fn apply_par_into(&self, x: &[f64], y: &mut [f64]) {
        exec::fill_indexed(y, |r| self.row_dot(r, x));
    }

    pub fn apply(&self, u: &GridFunction) -> GridFunction {
        let mut y = vec![0.0; u.len()];
        self.apply_par_into(u.data(), &mut y);
        GridFunction::new(u.d(), u.n(), y).expect("finite input gives finite output")
    }

    /// Smallest `λ ≥ 0` above which every row is strictly diagonally
    /// dominant: `max_r (Σ_{c≠r} |A_rc| + A_rr|_{λ=0})`.
    pub fn gershgorin_lambda(&self) -> f64 {
        let worst = exec::max_over(self.rows(), |r| {
            let mut off = 0.0;
            let mut diag = 0.0;
            for (c, v) in self.row(r) {
                if c == r {
                    diag = v + self.lambda;
                } else {
                    off += v.abs();
                }
            }
            off + diag
        });
        worst.max(0.0)
    }
}
