//! Restarted GMRES with right preconditioning.

use serde::{Deserialize, Serialize};

use super::fourier::FourierPreconditioner;
use super::grid::GridFunction;
use super::operator::SparseOperator;
use super::{Result, SolverError};
use crate::fields::MatrixField;

pub const DEFAULT_RESTART: usize = 50;
pub const ITERATION_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PreconditionerKind {
    Jacobi,
    Fourier,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub restart: usize,
    pub max_iterations: usize,
    pub preconditioner: PreconditionerKind,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            restart: DEFAULT_RESTART,
            max_iterations: ITERATION_CAP,
            preconditioner: PreconditionerKind::Jacobi,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub u: GridFunction,
    pub iterations: usize,
    /// `‖A u − f‖₂ / ‖f‖₂` recomputed from the returned `u`.
    pub residual: f64,
}

pub enum Preconditioner {
    Jacobi(Vec<f64>),
    Fourier(FourierPreconditioner),
}

impl Preconditioner {
    pub fn build(kind: PreconditionerKind, op: &SparseOperator, field: Option<&MatrixField>) -> Self {
        match (kind, field) {
            (PreconditionerKind::Fourier, Some(f)) => {
                Preconditioner::Fourier(FourierPreconditioner::from_field(f, op.lambda()))
            }
            _ => Preconditioner::Jacobi(
                op.diagonal()
                    .into_iter()
                    .map(|v| if v != 0.0 { 1.0 / v } else { 1.0 })
                    .collect(),
            ),
        }
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        match self {
            Preconditioner::Jacobi(inv) => {
                for ((zi, ri), di) in z.iter_mut().zip(r).zip(inv) {
                    *zi = ri * di;
                }
            }
            Preconditioner::Fourier(f) => f.apply(r, z),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `‖A u − f‖₂ / ‖f‖₂` (or `‖A u‖₂` when `f = 0`).
pub fn relative_residual(op: &SparseOperator, u: &[f64], f: &[f64]) -> f64 {
    let mut r = vec![0.0; u.len()];
    op.apply_into(u, &mut r);
    for (ri, fi) in r.iter_mut().zip(f) {
        *ri -= fi;
    }
    let fnorm = norm(f);
    if fnorm > 0.0 {
        norm(&r) / fnorm
    } else {
        norm(&r)
    }
}

/// Solves `A u = f` with the default Jacobi preconditioner.
pub fn solve(op: &SparseOperator, f: &GridFunction, tol: f64) -> Result<SolveReport> {
    let opts = SolveOptions {
        tol,
        ..Default::default()
    };
    let pre = Preconditioner::build(opts.preconditioner, op, None);
    gmres(op, f, &opts, &pre)
}

/// Solves `A u = f`, building the requested preconditioner from `field`.
pub fn solve_with(op: &SparseOperator, field: &MatrixField, f: &GridFunction, opts: &SolveOptions) -> Result<SolveReport> {
    let pre = Preconditioner::build(opts.preconditioner, op, Some(field));
    gmres(op, f, opts, &pre)
}

/// GMRES(m) on `A M⁻¹ y = f`, `u = M⁻¹ y`, starting from zero. Converges when
/// the recomputed relative residual is at most `tol`.
pub fn gmres(op: &SparseOperator, f: &GridFunction, opts: &SolveOptions, pre: &Preconditioner) -> Result<SolveReport> {
    let nrows = op.rows();
    if f.len() != nrows {
        return Err(SolverError::ResolutionMismatch {
            operator: nrows,
            rhs: f.len(),
        });
    }
    let b = f.data();
    let bnorm = norm(b);
    let mut x = vec![0.0; nrows];
    if bnorm == 0.0 {
        return Ok(SolveReport {
            u: GridFunction::zeros(f.d(), f.n()),
            iterations: 0,
            residual: 0.0,
        });
    }
    let m = opts.restart.max(1);
    let mut iterations = 0;
    let mut r = vec![0.0; nrows];
    let mut w = vec![0.0; nrows];
    let mut z = vec![0.0; nrows];
    let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    loop {
        op.apply_into(&x, &mut r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        let beta = norm(&r);
        let rel = beta / bnorm;
        if rel <= opts.tol {
            let u = GridFunction::new(f.d(), f.n(), x).map_err(|_| SolverError::NonFinite)?;
            let residual = relative_residual(op, u.data(), b);
            return Ok(SolveReport {
                u,
                iterations,
                residual,
            });
        }
        if iterations >= opts.max_iterations || !rel.is_finite() {
            return Err(SolverError::NotConverged {
                iterations,
                residual: rel,
            });
        }
        v.clear();
        v.push(r.iter().map(|ri| ri / beta).collect());
        let mut hcols: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut cs: Vec<f64> = Vec::with_capacity(m);
        let mut sn: Vec<f64> = Vec::with_capacity(m);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k = 0;
        while k < m && iterations < opts.max_iterations {
            pre.apply(&v[k], &mut z);
            op.apply_into(&z, &mut w);
            let mut hcol = vec![0.0; k + 2];
            for (i, vi) in v.iter().enumerate() {
                let hij = dot(&w, vi);
                hcol[i] = hij;
                for (wj, vj) in w.iter_mut().zip(vi) {
                    *wj -= hij * vj;
                }
            }
            let hnext = norm(&w);
            hcol[k + 1] = hnext;
            for i in 0..k {
                let t = cs[i] * hcol[i] + sn[i] * hcol[i + 1];
                hcol[i + 1] = -sn[i] * hcol[i] + cs[i] * hcol[i + 1];
                hcol[i] = t;
            }
            let denom = hcol[k].hypot(hcol[k + 1]);
            let (c, s) = if denom > 0.0 {
                (hcol[k] / denom, hcol[k + 1] / denom)
            } else {
                (1.0, 0.0)
            };
            hcol[k] = denom;
            hcol[k + 1] = 0.0;
            g[k + 1] = -s * g[k];
            g[k] *= c;
            cs.push(c);
            sn.push(s);
            hcols.push(hcol);
            iterations += 1;
            k += 1;
            if hnext == 0.0 || g[k].abs() / bnorm <= 0.5 * opts.tol {
                break;
            }
            v.push(w.iter().map(|wi| wi / hnext).collect());
        }
        // back substitution on the k × k triangle
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for (j, yj) in y.iter().enumerate().skip(i + 1) {
                s -= hcols[j][i] * yj;
            }
            y[i] = if hcols[i][i] != 0.0 { s / hcols[i][i] } else { 0.0 };
        }
        let mut comb = vec![0.0; nrows];
        for (yi, vi) in y.iter().zip(&v) {
            for (c, vv) in comb.iter_mut().zip(vi) {
                *c += yi * vv;
            }
        }
        pre.apply(&comb, &mut z);
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi += zi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::constant_field;
    use crate::solver::discretize;
    use std::f64::consts::PI;

    #[test]
    fn zero_rhs_gives_zero() {
        let f = constant_field(2, 16, &[1.0, 0.0, 0.0, 1.0], 0.5).unwrap();
        let op = discretize(&f, 1.0).unwrap();
        let r = solve(&op, &GridFunction::zeros(2, 16), 1e-10).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.u.max_abs(), 0.0);
    }

    #[test]
    fn sine_is_an_eigenfunction() {
        let n = 64;
        let f = constant_field(2, n, &[1.0, 0.0, 0.0, 1.0], 0.5).unwrap();
        let op = discretize(&f, 100.0).unwrap();
        let rhs = GridFunction::from_fn(2, n, |x| (2.0 * PI * x[0]).sin());
        let r = solve(&op, &rhs, 1e-10).unwrap();
        let h = 1.0 / n as f64;
        let s = 4.0 / (h * h) * (PI * h).sin().powi(2);
        let exact = rhs.scaled(-1.0 / (s + 100.0));
        let err = r.u.zip_with(&exact, |a, b| a - b).lp_norm(2.0).unwrap() / exact.lp_norm(2.0).unwrap();
        assert!(err < 1e-8, "{err}");
        assert!(r.residual <= 1e-10);
    }

    #[test]
    fn variable_coefficients_with_both_preconditioners() {
        let n = 32;
        let a: Vec<f64> = (0..n * n)
            .flat_map(|k| {
                let m = if (k % n) < n / 2 { 0.5 } else { 1.8 };
                [m, 0.1, 0.1, 1.0]
            })
            .collect();
        let field = MatrixField::new(2, n, 0.4, a).unwrap();
        let op = discretize(&field, 10.0).unwrap();
        let rhs = GridFunction::from_fn(2, n, |x| (2.0 * PI * x[0]).cos() + (4.0 * PI * x[1]).sin());
        let mut sols = Vec::new();
        for kind in [PreconditionerKind::Jacobi, PreconditionerKind::Fourier] {
            let opts = SolveOptions {
                preconditioner: kind,
                ..Default::default()
            };
            let r = solve_with(&op, &field, &rhs, &opts).unwrap();
            assert!(r.residual <= 1e-10);
            sols.push(r);
        }
        assert!(sols[1].iterations < sols[0].iterations);
        let diff = sols[0].u.zip_with(&sols[1].u, |a, b| a - b).max_abs();
        assert!(diff < 1e-8 * sols[0].u.max_abs());
    }

    #[test]
    fn iteration_cap_is_reported() {
        let f = constant_field(2, 32, &[1.0, 0.0, 0.0, 1.0], 0.5).unwrap();
        let op = discretize(&f, 0.01).unwrap();
        let rhs = GridFunction::from_fn(2, 32, |x| x[0] * (1.0 - x[1]) + (9.0 * x[1]).sin());
        let opts = SolveOptions {
            max_iterations: 3,
            ..Default::default()
        };
        let pre = Preconditioner::build(opts.preconditioner, &op, None);
        assert!(matches!(
            gmres(&op, &rhs, &opts, &pre),
            Err(SolverError::NotConverged { iterations: 3, .. })
        ));
    }
}
