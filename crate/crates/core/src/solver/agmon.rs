//! Lift `ũ(x, y) = u(x) ζ(y) cos(μy)` and the discrete check of
//! `L̃ũ = ζ cos(μy)[Lu − λu] + u[ζ'' cos(μy) − 2μζ' sin(μy)]`, `λ = μ²`.

use serde::Serialize;

use super::grid::GridFunction;
use super::operator::discretize;
use super::{Result, SolverError};
use crate::exec;
use crate::fields::MatrixField;

/// Largest number of points allowed on the lifted grid.
pub const AGMON_POINT_CAP: usize = 1 << 26;

/// `ζ(y) = exp(1 − 1/(1 − t²))`, `t = (y − center)/half_width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cutoff {
    pub center: f64,
    pub half_width: f64,
}

impl Default for Cutoff {
    fn default() -> Self {
        Self {
            center: 0.5,
            half_width: 0.4,
        }
    }
}

impl Cutoff {
    fn t(&self, y: f64) -> f64 {
        (y - self.center) / self.half_width
    }

    pub fn value(&self, y: f64) -> f64 {
        let t = self.t(y);
        if t.abs() >= 1.0 {
            return 0.0;
        }
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }

    pub fn d1(&self, y: f64) -> f64 {
        let t = self.t(y);
        if t.abs() >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - t * t;
        self.value(y) * (-2.0 * t / (q * q)) / self.half_width
    }

    pub fn d2(&self, y: f64) -> f64 {
        let t = self.t(y);
        if t.abs() >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - t * t;
        let z = self.value(y);
        z * (4.0 * t * t / q.powi(4) - 2.0 / (q * q) - 8.0 * t * t / q.powi(3))
            / (self.half_width * self.half_width)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgmonReport {
    pub mu: f64,
    pub ny: usize,
    /// `max |L̃ũ − RHS|` over the lifted grid.
    pub residual: f64,
    /// `max |RHS|`, for scale.
    pub rhs_max: f64,
}

/// Builds `ũ` on the product of the grid of `u` and `ny` cell-centred points
/// in `y ∈ [0,1)`, applies `L̃ = a^{ij}D_iD_j + b^iD_i + c + D_yy` and compares
/// with the right-hand side of the identity evaluated with the discrete `L`
/// and exact derivatives of `ζ`.
pub fn agmon_lift_check(field: &MatrixField, u: &GridFunction, mu: f64, ny: usize, cutoff: &Cutoff) -> Result<AgmonReport> {
    if field.n() != u.n() || field.d() != u.d() {
        return Err(SolverError::ResolutionMismatch {
            operator: field.sample_count(),
            rhs: u.len(),
        });
    }
    let nx = u.len();
    let total = nx.checked_mul(ny).filter(|&t| t <= AGMON_POINT_CAP);
    let Some(total) = total else {
        return Err(SolverError::MemoryCap {
            requested: nx.saturating_mul(ny),
            cap: AGMON_POINT_CAP,
        });
    };
    if ny < 3 {
        return Err(SolverError::Shape("lift needs at least 3 points in y".into()));
    }
    let op = discretize(field, 0.0)?;
    let hy = 1.0 / ny as f64;
    let ys: Vec<f64> = (0..ny).map(|j| (j as f64 + 0.5) * hy).collect();
    let g: Vec<f64> = ys.iter().map(|&y| cutoff.value(y) * (mu * y).cos()).collect();
    let mut lifted = vec![0.0; total];
    exec::for_each_chunk_mut(&mut lifted, nx, |j, slice| {
        for (s, ux) in slice.iter_mut().zip(u.data()) {
            *s = ux * g[j];
        }
    });
    // L̃ũ, one y-slice at a time: x-stencil on the slice plus D_yy across slices.
    let mut applied = vec![0.0; total];
    exec::for_each_chunk_mut(&mut applied, nx, |j, out| {
        op.apply_into(&lifted[j * nx..(j + 1) * nx], out);
        let up = ((j + 1) % ny) * nx;
        let dn = ((j + ny - 1) % ny) * nx;
        let here = j * nx;
        for (k, o) in out.iter_mut().enumerate() {
            *o += (lifted[up + k] - 2.0 * lifted[here + k] + lifted[dn + k]) / (hy * hy);
        }
    });
    let lu = op.apply(u);
    let lambda = mu * mu;
    let residual = exec::max_over(ny, |j| {
        let y = ys[j];
        let (zc, z1, z2) = (cutoff.value(y), cutoff.d1(y), cutoff.d2(y));
        let (s, c) = (mu * y).sin_cos();
        let yterm = z2 * c - 2.0 * mu * z1 * s;
        let mut worst = 0.0f64;
        for k in 0..nx {
            let ux = u.data()[k];
            let rhs = zc * c * (lu.data()[k] - lambda * ux) + ux * yterm;
            worst = worst.max((applied[j * nx + k] - rhs).abs());
        }
        worst
    });
    let rhs_max = exec::max_over(ny, |j| {
        let y = ys[j];
        let (zc, z1, z2) = (cutoff.value(y), cutoff.d1(y), cutoff.d2(y));
        let (s, c) = (mu * y).sin_cos();
        let yterm = z2 * c - 2.0 * mu * z1 * s;
        (0..nx)
            .map(|k| {
                let ux = u.data()[k];
                (zc * c * (lu.data()[k] - lambda * ux) + ux * yterm).abs()
            })
            .fold(0.0, f64::max)
    });
    Ok(AgmonReport {
        mu,
        ny,
        residual,
        rhs_max,
    })
}

/// Residuals at `ny` and `2ny` and their ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgmonConvergence {
    pub coarse: AgmonReport,
    pub fine: AgmonReport,
    pub ratio: f64,
}

pub fn agmon_convergence(field: &MatrixField, u: &GridFunction, mu: f64, ny: usize, cutoff: &Cutoff) -> Result<AgmonConvergence> {
    let coarse = agmon_lift_check(field, u, mu, ny, cutoff)?;
    let fine = agmon_lift_check(field, u, mu, 2 * ny, cutoff)?;
    let ratio = coarse.residual / fine.residual;
    Ok(AgmonConvergence { coarse, fine, ratio })
}

/// `∫ |ζ(y) cos(μy)|^p dy` by the midpoint rule on `points` nodes over the
/// support of `ζ`.
pub fn lift_weight(cutoff: &Cutoff, mu: f64, p: f64, points: usize) -> f64 {
    let a = cutoff.center - cutoff.half_width;
    let w = 2.0 * cutoff.half_width / points as f64;
    (0..points)
        .map(|k| {
            let y = a + (k as f64 + 0.5) * w;
            (cutoff.value(y) * (mu * y).cos()).abs().powf(p)
        })
        .sum::<f64>()
        * w
}

/// Minimum of [`lift_weight`] over `μ = 0, step, 2·step, …, mu_max`, with
/// the minimising `μ`.
pub fn lift_weight_floor(cutoff: &Cutoff, p: f64, mu_max: f64, step: f64, points: usize) -> (f64, f64) {
    let count = (mu_max / step).round() as usize + 1;
    let vals = exec::map_indices(count, |k| {
        let mu = k as f64 * step;
        (lift_weight(cutoff, mu, p, points), mu)
    });
    vals.into_iter()
        .fold((f64::INFINITY, 0.0), |best, v| if v.0 < best.0 { v } else { best })
}
