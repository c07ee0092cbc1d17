//! Numerical probes of the a priori, interpolation, pointwise and local
//! estimates. Every probe fits and reports its constant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::grid::{gradient_norm, hessian_norm, pointwise_norm, GridFunction, Shape};
use super::krylov::{solve_with, SolveOptions};
use super::operator::discretize;
use super::{Result, SolverError};
use crate::exec;
use crate::fields::{constant_field, MatrixField};
use crate::oscillation::DirectionMap;

/// `sin(2π k·x)`.
pub fn fourier_mode(d: usize, n: usize, k: &[i32]) -> GridFunction {
    GridFunction::from_fn(d, n, |x| {
        let t: f64 = x.iter().zip(k).map(|(xi, &ki)| xi * f64::from(ki)).sum();
        (2.0 * std::f64::consts::PI * t).sin()
    })
}

/// Seeded trigonometric polynomial with frequencies `|k_i| ≤ max_mode` and
/// Gaussian amplitudes damped by `1/(1 + |k|²)`.
pub fn smooth_random_rhs(d: usize, n: usize, max_mode: i32, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = (2 * max_mode + 1) as usize;
    let mut terms = Vec::new();
    for flat in 0..side.pow(d as u32) {
        let mut rem = flat;
        let k: Vec<f64> = (0..d)
            .map(|_| {
                let c = (rem % side) as i32 - max_mode;
                rem /= side;
                f64::from(c)
            })
            .collect();
        if k.iter().all(|&v| v == 0.0) {
            continue;
        }
        let damp = 1.0 / (1.0 + k.iter().map(|v| v * v).sum::<f64>());
        let a: f64 = rng.sample::<f64, _>(StandardNormal) * damp;
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        terms.push((k, a, phase));
    }
    GridFunction::from_fn(d, n, |x| {
        terms
            .iter()
            .map(|(k, a, ph)| {
                let t: f64 = x.iter().zip(k).map(|(xi, ki)| xi * ki).sum();
                a * (std::f64::consts::TAU * t + ph).cos()
            })
            .sum()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AprioriReport {
    pub lambda: f64,
    pub p: f64,
    pub rhs_index: usize,
    pub norm_u: f64,
    pub norm_ux: f64,
    pub norm_uxx: f64,
    /// `‖Lu − λu‖_p` of the computed `u`.
    pub norm_rhs: f64,
    /// `(λ‖u‖ + √λ‖u_x‖ + ‖u_xx‖) / ‖Lu − λu‖`.
    pub implied_constant: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AprioriSweep {
    pub lambda_solve: f64,
    pub reports: Vec<AprioriReport>,
}

impl AprioriSweep {
    pub fn max_constant(&self) -> f64 {
        self.reports.iter().map(|r| r.implied_constant).fold(0.0, f64::max)
    }

    pub fn min_constant(&self) -> f64 {
        self.reports
            .iter()
            .map(|r| r.implied_constant)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn all_finite(&self) -> bool {
        self.reports.iter().all(|r| r.implied_constant.is_finite())
    }

    /// `max / min` of the implied constant over the sweep.
    pub fn spread(&self) -> f64 {
        self.max_constant() / self.min_constant()
    }
}

/// Implied constant from computed norms.
pub fn implied_constant(lambda: f64, norm_u: f64, norm_ux: f64, norm_uxx: f64, norm_rhs: f64) -> f64 {
    (lambda * norm_u + lambda.sqrt() * norm_ux + norm_uxx) / norm_rhs
}

/// Solves `(L − λ)u = f` for every `λ` and `f`, in parallel over cases, and
/// reports the norms entering the a priori estimate. Reports are ordered by
/// `λ` then by right-hand side.
pub fn apriori_probe(
    field: &MatrixField,
    lambdas: &[f64],
    p: f64,
    rhs: &[GridFunction],
    opts: &SolveOptions,
) -> Result<AprioriSweep> {
    if !(p >= 1.0) {
        return Err(SolverError::InvalidExponent(p));
    }
    let base = discretize(field, 0.0)?;
    let lambda_solve = base.gershgorin_lambda();
    for &l in lambdas {
        if l < lambda_solve || !(l > 0.0) {
            return Err(SolverError::BelowSolveThreshold {
                lambda: l,
                threshold: lambda_solve,
            });
        }
    }
    for f in rhs {
        if f.len() != base.rows() {
            return Err(SolverError::ResolutionMismatch {
                operator: base.rows(),
                rhs: f.len(),
            });
        }
    }
    let cases: Vec<(usize, usize)> = (0..lambdas.len())
        .flat_map(|li| (0..rhs.len()).map(move |fi| (li, fi)))
        .collect();
    let reports = exec::map_indices(cases.len(), |c| -> Result<AprioriReport> {
        let (li, fi) = cases[c];
        let lambda = lambdas[li];
        let op = base.with_lambda(lambda)?;
        let sol = solve_with(&op, field, &rhs[fi], opts)?;
        let applied = op.apply(&sol.u);
        let norm_u = sol.u.lp_norm(p)?;
        let norm_ux = gradient_norm(&sol.u, p)?;
        let norm_uxx = hessian_norm(&sol.u, p)?;
        let norm_rhs = applied.lp_norm(p)?;
        Ok(AprioriReport {
            lambda,
            p,
            rhs_index: fi,
            norm_u,
            norm_ux,
            norm_uxx,
            norm_rhs,
            implied_constant: implied_constant(lambda, norm_u, norm_ux, norm_uxx, norm_rhs),
            iterations: sol.iterations,
            residual: sol.residual,
        })
    });
    Ok(AprioriSweep {
        lambda_solve,
        reports: reports.into_iter().collect::<Result<_>>()?,
    })
}

/// Seeded corpus of smooth periodic functions.
pub fn random_smooth_corpus(d: usize, n: usize, count: usize, max_mode: i32, seed: u64) -> Vec<GridFunction> {
    exec::map_indices(count, |k| smooth_random_rhs(d, n, max_mode, seed.wrapping_add(k as u64)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationReport {
    pub p: f64,
    /// Smallest `C_u` with `‖u_x‖ ≤ ε‖u_xx‖ + C_u ε⁻¹‖u‖` for all `ε > 0`,
    /// namely `‖u_x‖² / (4‖u‖‖u_xx‖)`.
    pub per_function: Vec<f64>,
    /// Maximum of `per_function`.
    pub fitted: f64,
    /// Fitted constant of each consecutive batch.
    pub batch_fits: Vec<f64>,
    pub epsilons: Vec<f64>,
    /// Whether the inequality holds with `fitted` for every function and `ε`.
    pub admits_all: bool,
}

impl InterpolationReport {
    /// Smallest batch fit relative to the overall fit.
    pub fn min_batch_ratio(&self) -> f64 {
        self.batch_fits
            .iter()
            .map(|b| b / self.fitted)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Relative slack allowed when re-evaluating the interpolation inequality.
pub const INTERPOLATION_ROUNDING: f64 = 1e-12;

pub fn interpolation_probe(corpus: &[GridFunction], p: f64, epsilons: &[f64], batches: usize) -> Result<InterpolationReport> {
    let norms = corpus
        .iter()
        .map(|u| Ok((u.lp_norm(p)?, gradient_norm(u, p)?, hessian_norm(u, p)?)))
        .collect::<Result<Vec<_>>>()?;
    let per_function: Vec<f64> = norms
        .iter()
        .map(|&(u, ux, uxx)| {
            if ux == 0.0 {
                0.0
            } else {
                ux * ux / (4.0 * u * uxx)
            }
        })
        .collect();
    let fitted = per_function.iter().copied().fold(0.0, f64::max);
    let admits_all = norms.iter().all(|&(u, ux, uxx)| {
        epsilons.iter().all(|&e| {
            let rhs = e * uxx + fitted * u / e;
            ux <= rhs * (1.0 + INTERPOLATION_ROUNDING)
        })
    });
    let batches = batches.max(1);
    let size = per_function.len().div_ceil(batches).max(1);
    let batch_fits = per_function
        .chunks(size)
        .map(|c| c.iter().copied().fold(0.0, f64::max))
        .collect();
    Ok(InterpolationReport {
        p,
        per_function,
        fitted,
        batch_fits,
        epsilons: epsilons.to_vec(),
        admits_all,
    })
}

/// Second derivatives in the rotated frame: `R · D²u · Rᵀ` pointwise.
pub fn rotated_hessian(u: &GridFunction, psi: &DirectionMap) -> Result<Vec<GridFunction>> {
    let d = u.d();
    if psi.d() != d {
        return Err(SolverError::Shape("direction map dimension".into()));
    }
    DirectionMap::new(d, psi.rotation().to_vec(), psi.shift().to_vec())
        .map_err(|e| SolverError::NotRigid(e.to_string()))?;
    let h = u.hessian();
    let r = psi.rotation();
    let len = u.len();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut data = vec![0.0; len];
            exec::fill_indexed(&mut data, |idx| {
                let mut s = 0.0;
                for k in 0..d {
                    for l in 0..d {
                        s += r[i * d + k] * h[k * d + l].data()[idx] * r[j * d + l];
                    }
                }
                s
            });
            out.push(GridFunction::new(d, u.n(), data)?);
        }
    }
    Ok(out)
}

/// `L₀u = a^{ij}u_{x^ix^j}` pointwise.
pub fn principal_part(field: &MatrixField, u: &GridFunction) -> Result<GridFunction> {
    if field.n() != u.n() || field.d() != u.d() {
        return Err(SolverError::ResolutionMismatch {
            operator: field.sample_count(),
            rhs: u.len(),
        });
    }
    let d = u.d();
    let h = u.hessian();
    let mut data = vec![0.0; u.len()];
    exec::fill_indexed(&mut data, |idx| {
        let a = field.matrix(idx);
        (0..d * d).map(|k| a[k] * h[k].data()[idx]).sum()
    });
    GridFunction::new(d, u.n(), data)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointwiseBoundReport {
    /// Per-function `max_x |D²u| / (Σ_{(i,j)≠(1,1)}|u_ij| + |u_x| + |L₀u|)`.
    pub per_function: Vec<f64>,
    pub fitted: f64,
    /// `δ⁻² + 1`, which dominates the ratio for any field with ellipticity `δ`.
    pub ellipticity_bound: f64,
}

/// Relative size of `|D²u|` below which a point is skipped.
pub const POINTWISE_FLOOR: f64 = 1e-9;

pub fn pointwise_bound_probe(field: &MatrixField, corpus: &[GridFunction], psi: &DirectionMap) -> Result<PointwiseBoundReport> {
    let d = field.d();
    let per_function = corpus
        .iter()
        .map(|u| {
            let hs = pointwise_norm(&u.hessian());
            let rot = rotated_hessian(u, psi)?;
            let grad = pointwise_norm(&u.gradient());
            let l0 = principal_part(field, u)?;
            let floor = hs.max_abs() * POINTWISE_FLOOR;
            let mut worst = 0.0f64;
            for idx in 0..u.len() {
                let num = hs.data()[idx];
                if num <= floor {
                    continue;
                }
                let others: f64 = (0..d * d).skip(1).map(|k| rot[k].data()[idx].abs()).sum();
                let den = others + grad.data()[idx] + l0.data()[idx].abs();
                worst = worst.max(num / den);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    let fitted = per_function.iter().copied().fold(0.0, f64::max);
    let delta = field.delta();
    Ok(PointwiseBoundReport {
        per_function,
        fitted,
        ellipticity_bound: 1.0 / (delta * delta) + 1.0,
    })
}

/// `exp(1 − 1/(1 − t²))` for `|t| < 1`, else 0.
pub fn smooth_bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// Seeded bump-times-quadratic functions supported in the ball of radius
/// `radius` around `center`.
pub fn bump_polynomial_corpus(d: usize, n: usize, center: &[f64], radius: f64, count: usize, seed: u64) -> Vec<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<Vec<f64>> = (0..count)
        .map(|_| (0..1 + d + d * d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    exec::map_indices(count, |k| {
        let c = &coeffs[k];
        GridFunction::from_fn(d, n, |x| {
            let z: Vec<f64> = x.iter().zip(center).map(|(xi, ci)| (xi - ci) / radius).collect();
            let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut q = c[0];
            for i in 0..d {
                q += c[1 + i] * z[i];
                for j in 0..d {
                    q += c[1 + d + i * d + j] * z[i] * z[j];
                }
            }
            smooth_bump(r) * q
        })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalEstimateReport {
    pub radius: f64,
    pub p: f64,
    pub center: Vec<f64>,
    /// `max ‖u_xx‖ / (‖L₀u‖ + ‖u_x‖)` over the corpus.
    pub fitted: f64,
    /// The same with the coefficients frozen at the centre.
    pub frozen: f64,
    /// `max ‖u_xx‖ / (‖Δu‖ + ‖u_x‖)`.
    pub laplacian: f64,
}

fn local_ratio(field: &MatrixField, u: &GridFunction, p: f64) -> Result<f64> {
    let uxx = hessian_norm(u, p)?;
    if uxx == 0.0 {
        return Ok(0.0);
    }
    let l0 = principal_part(field, u)?.lp_norm(p)?;
    let ux = gradient_norm(u, p)?;
    Ok(uxx / (l0 + ux))
}

/// Fits `N` in `‖u_xx‖ ≤ N(‖L₀u‖ + ‖u_x‖)` over bump-times-polynomial
/// functions supported in `B_R(center)`.
pub fn local_estimate_probe(
    field: &MatrixField,
    radius: f64,
    p: f64,
    center: &[f64],
    count: usize,
    seed: u64,
) -> Result<LocalEstimateReport> {
    let d = field.d();
    let n = field.n();
    if center.len() != d {
        return Err(SolverError::Shape("centre dimension".into()));
    }
    if radius < 4.0 / n as f64 {
        return Err(SolverError::Shape("support radius below four cells".into()));
    }
    let shape = Shape { d, n };
    let corpus = bump_polynomial_corpus(d, n, center, radius, count, seed);
    let centre_idx = (0..d).fold(0usize, |acc, k| {
        let c = ((center[k] * n as f64).floor() as usize).min(n - 1);
        acc + c * shape.stride(k)
    });
    let frozen_field = field.frozen_at(centre_idx);
    let mut identity = vec![0.0; d * d];
    for i in 0..d {
        identity[i * d + i] = 1.0;
    }
    let lap = constant_field(d, n, &identity, 0.5)?;
    let mut fitted = 0.0f64;
    let mut frozen = 0.0f64;
    let mut laplacian = 0.0f64;
    for u in &corpus {
        fitted = fitted.max(local_ratio(field, u, p)?);
        frozen = frozen.max(local_ratio(&frozen_field, u, p)?);
        laplacian = laplacian.max(local_ratio(&lap, u, p)?);
    }
    Ok(LocalEstimateReport {
        radius,
        p,
        center: center.to_vec(),
        fitted,
        frozen,
        laplacian,
    })
}
