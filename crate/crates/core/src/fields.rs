//! Coefficient fields sampled on periodic grids over `[0,1)^d`.
//!
//! Samples sit at cell centres `((i + ½)h, …)`, so the logarithmic
//! singularity of the bump `ζ` at `3/4` is never hit on dyadic grids.
//! Scalar fields are two-dimensional and stored row-major (`y` rows, `x`
//! columns). Matrix fields are `d`-dimensional with axis 0 varying fastest,
//! which coincides with the scalar layout for `d = 2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("kappa must be at least 4, got {0}")]
    KappaTooSmall(f64),
    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("delta must lie in (0,1), got {0}")]
    InvalidDelta(f64),
    #[error("grid resolution must be positive")]
    EmptyGrid,
    #[error("window at ({i0},{j0}) with side {side} is outside the {n}x{n} grid")]
    WindowOutsideGrid { i0: usize, j0: usize, side: usize, n: usize },
    #[error("window with side {0} covers fewer than 4 cells")]
    WindowTooSmall(usize),
    #[error("no windows given")]
    NoWindows,
    #[error("sample {index}: eigenvalues [{min}, {max}] leave [{delta}, 1/{delta}]")]
    NotElliptic { index: usize, min: f64, max: f64, delta: f64 },
    #[error("sample {index} is not symmetric")]
    NotSymmetric { index: usize },
    #[error("lower-order coefficient at sample {index} exceeds K = {k}")]
    LowerOrderBound { index: usize, k: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, FieldError>;

/// `ln(min(|x|, 1))`; `-∞` at `x = 0`.
pub fn logarithm_bmo_seed(x: f64) -> f64 {
    x.abs().min(1.0).ln()
}

/// `ζ(x) = sin(ε ln(min(|4x − 3|, 1)))`, supported in `(1/2, 1)`.
///
/// At the singular point `x = 3/4` the value is set to 0; the grids used in
/// this crate never sample it.
pub fn zeta_bump(x: f64, epsilon: f64) -> f64 {
    let s = (4.0 * x - 3.0).abs();
    if s == 0.0 {
        return 0.0;
    }
    (epsilon * logarithm_bmo_seed(s)).sin()
}

/// Choice of the measurable profile `f` (support in `(1/2,1)`, `|f| ≤ 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileKind {
    Indicator,
    SquareWave { periods: u32 },
    RandomSteps { steps: usize, seed: u64 },
}

/// An evaluated profile `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    kind: ProfileKind,
    steps: Vec<f64>,
}

impl Profile {
    pub fn new(kind: ProfileKind) -> Self {
        let steps = match &kind {
            ProfileKind::RandomSteps { steps, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..(*steps).max(1))
                    .map(|_| rng.random_range(-1.0..=1.0))
                    .collect()
            }
            _ => Vec::new(),
        };
        Self { kind, steps }
    }

    pub fn indicator() -> Self {
        Self::new(ProfileKind::Indicator)
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn eval(&self, t: f64) -> f64 {
        if !(t > 0.5 && t < 1.0) {
            return 0.0;
        }
        match &self.kind {
            ProfileKind::Indicator => 1.0,
            ProfileKind::SquareWave { periods } => {
                let phase = (t - 0.5) * 2.0 * f64::from(*periods);
                if phase.fract() < 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
            ProfileKind::RandomSteps { .. } => {
                let k = ((t - 0.5) * 2.0 * self.steps.len() as f64) as usize;
                self.steps[k.min(self.steps.len() - 1)]
            }
        }
    }
}

/// Parameters of the oscillating example coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleParams {
    pub epsilon: f64,
    pub kappa: f64,
    /// Number of terms `r = 0, 1, …, n_terms − 1` kept.
    pub n_terms: usize,
    pub profile: ProfileKind,
}

impl ExampleParams {
    pub fn new(epsilon: f64, kappa: f64, n_terms: usize) -> Self {
        Self {
            epsilon,
            kappa,
            n_terms,
            profile: ProfileKind::Indicator,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 4.0) {
            return Err(FieldError::KappaTooSmall(self.kappa));
        }
        if !(self.epsilon > 0.0) {
            return Err(FieldError::InvalidEpsilon(self.epsilon));
        }
        Ok(())
    }

    /// Smallest term count that resolves every support square containing a
    /// cell centre of an `n × n` grid.
    pub fn terms_for_resolution(kappa: f64, n: usize) -> usize {
        let h = 1.0 / n as f64;
        let mut r = 0;
        let mut side = 1.0;
        // Q_r = (side/2, side)^2 holds a cell centre only if side > h/2.
        while side > 0.5 * h && r < 200 {
            r += 1;
            side /= kappa;
        }
        r
    }
}

/// Index `r` of the open square `Q_r = (κ^{-r}/2, κ^{-r})²` containing
/// `(x, y)`, if any. The squares are pairwise disjoint for `κ ≥ 4`.
pub fn support_square(x: f64, y: f64, kappa: f64) -> Option<usize> {
    if !(x > 0.0 && y > 0.0) {
        return None;
    }
    let mut side = 1.0;
    let mut r = 0;
    while side > 0.0 {
        if x < side * 0.5 && y < side * 0.5 {
            side /= kappa;
            r += 1;
            continue;
        }
        if x > 0.5 * side && x < side && y > 0.5 * side && y < side {
            return Some(r);
        }
        return None;
    }
    None
}

/// Pointwise evaluator of the example coefficient
/// `Σ_n f(κ^{2n}x)ζ(κ^{2n}y) + Σ_n f(κ^{2n+1}y)ζ(κ^{2n+1}x)`.
#[derive(Debug, Clone)]
pub struct ExampleCoefficient {
    params: ExampleParams,
    profile: Profile,
}

impl ExampleCoefficient {
    pub fn new(params: ExampleParams) -> Result<Self> {
        params.validate()?;
        let profile = Profile::new(params.profile.clone());
        Ok(Self { params, profile })
    }

    pub fn params(&self) -> &ExampleParams {
        &self.params
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// Index `r < n_terms` of the support square holding `(x, y)`, if any.
    pub fn support_index(&self, x: f64, y: f64) -> Option<usize> {
        support_square(x, y, self.params.kappa).filter(|&r| r < self.params.n_terms)
    }

    /// Value of term `r` at `(x, y)` (zero off `Q_r`).
    pub fn term(&self, r: usize, x: f64, y: f64) -> f64 {
        let s = self.params.kappa.powi(r as i32);
        if r % 2 == 0 {
            self.profile.eval(s * x) * zeta_bump(s * y, self.params.epsilon)
        } else {
            self.profile.eval(s * y) * zeta_bump(s * x, self.params.epsilon)
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self.support_index(x, y) {
            Some(r) => self.term(r, x, y),
            None => 0.0,
        }
    }
}

/// Scalar samples on an `n × n` cell-centred grid of `[0,1)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    n: usize,
    values: Vec<f64>,
    params: Option<ExampleParams>,
}

impl ScalarField {
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(FieldError::EmptyGrid);
        }
        if values.len() != n * n {
            return Err(FieldError::Shape(format!(
                "{} values for a {n}x{n} grid",
                values.len()
            )));
        }
        Ok(Self {
            n,
            values,
            params: None,
        })
    }

    /// Samples `f(x, y)` at cell centres.
    pub fn from_fn(n: usize, f: impl Fn(f64, f64) -> f64 + Sync + Send) -> Result<Self> {
        if n == 0 {
            return Err(FieldError::EmptyGrid);
        }
        let h = 1.0 / n as f64;
        let mut values = vec![0.0; n * n];
        exec::for_each_chunk_mut(&mut values, n, |j, row| {
            let y = (j as f64 + 0.5) * h;
            for (i, v) in row.iter_mut().enumerate() {
                *v = f((i as f64 + 0.5) * h, y);
            }
        });
        Self::from_values(n, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn params(&self) -> Option<&ExampleParams> {
        self.params.as_ref()
    }

    /// Value in column `i` (x) and row `j` (y).
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.n + i]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            n: self.n,
            values: self.values.iter().map(|&v| f(v)).collect(),
            params: self.params.clone(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Samples the example coefficient on an `n × n` grid.
pub fn example_field(params: &ExampleParams, n: usize) -> Result<ScalarField> {
    let coefficient = ExampleCoefficient::new(params.clone())?;
    let mut field = ScalarField::from_fn(n, |x, y| coefficient.eval(x, y))?;
    field.params = Some(params.clone());
    Ok(field)
}

/// Axis-aligned square of grid cells: columns `i0..i0+side`, rows
/// `j0..j0+side`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub i0: usize,
    pub j0: usize,
    pub side: usize,
}

/// All dyadic squares of an `n × n` grid (`n` a power of two) with side at
/// least `min_side` cells.
pub fn dyadic_windows(n: usize, min_side: usize) -> Vec<Window> {
    let mut out = Vec::new();
    let mut side = n;
    while side >= min_side.max(1) && side > 0 {
        for j0 in (0..n).step_by(side) {
            for i0 in (0..n).step_by(side) {
                out.push(Window { i0, j0, side });
            }
        }
        side /= 2;
    }
    out
}

fn window_mean_oscillation(field: &ScalarField, w: &Window) -> f64 {
    let n = field.n;
    let cells = (w.side * w.side) as f64;
    let mut sum = 0.0;
    for j in w.j0..w.j0 + w.side {
        sum += field.values[j * n + w.i0..j * n + w.i0 + w.side].iter().sum::<f64>();
    }
    let mean = sum / cells;
    let mut osc = 0.0;
    for j in w.j0..w.j0 + w.side {
        osc += field.values[j * n + w.i0..j * n + w.i0 + w.side]
            .iter()
            .map(|v| (v - mean).abs())
            .sum::<f64>();
    }
    osc / cells
}

/// `sup_Q ⨍_Q |a − a_Q|` over the given windows.
pub fn bmo_seminorm(field: &ScalarField, windows: &[Window]) -> Result<f64> {
    if windows.is_empty() {
        return Err(FieldError::NoWindows);
    }
    for w in windows {
        if w.side * w.side < 4 {
            return Err(FieldError::WindowTooSmall(w.side));
        }
        if w.i0 + w.side > field.n || w.j0 + w.side > field.n {
            return Err(FieldError::WindowOutsideGrid {
                i0: w.i0,
                j0: w.j0,
                side: w.side,
                n: field.n,
            });
        }
    }
    Ok(exec::max_over(windows.len(), |k| {
        window_mean_oscillation(field, &windows[k])
    }))
}

/// Mean oscillation of `samples` over `lo..hi`.
fn interval_mean_oscillation(samples: &[f64], lo: usize, hi: usize) -> f64 {
    let s = &samples[lo..hi];
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    s.iter().map(|v| (v - mean).abs()).sum::<f64>() / s.len() as f64
}

/// Largest mean oscillation of a cell-centred 1-D sample over intervals of
/// `2^k ≥ 4` cells starting at multiples of a quarter of their length.
pub fn bmo_1d(samples: &[f64]) -> f64 {
    let n = samples.len();
    let mut windows = Vec::new();
    let mut len = 4usize;
    while len <= n {
        let step = (len / 4).max(1);
        let mut lo = 0;
        while lo + len <= n {
            windows.push((lo, lo + len));
            lo += step;
        }
        len *= 2;
    }
    exec::max_over(windows.len(), |k| {
        interval_mean_oscillation(samples, windows[k].0, windows[k].1)
    })
}

/// Measured `|ζ|_BMO`: [`bmo_1d`] of `ζ` sampled with spacing `1/n` over
/// `[0, 2)`, which contains the support with room on both sides.
pub fn zeta_bmo(epsilon: f64, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let samples: Vec<f64> = (0..2 * n)
        .map(|j| zeta_bump((j as f64 + 0.5) * h, epsilon))
        .collect();
    bmo_1d(&samples)
}

/// Symmetric matrix samples `a^{ij}(x)` on an `n^d` periodic grid, with
/// optional lower-order terms.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    d: usize,
    n: usize,
    delta: f64,
    a: Vec<f64>,
    b: Option<Vec<f64>>,
    c: Option<Vec<f64>>,
    k_bound: f64,
}

/// Extreme eigenvalues over all samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipticity {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

fn eigen_range(d: usize, m: &[f64]) -> (f64, f64) {
    match d {
        1 => (m[0], m[0]),
        2 => {
            let (a, b, c) = (m[0], m[1], m[3]);
            let mean = 0.5 * (a + c);
            let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
            (mean - r, mean + r)
        }
        _ => {
            let eig = nalgebra::DMatrix::from_row_slice(d, d, m).symmetric_eigenvalues();
            (eig.min(), eig.max())
        }
    }
}

impl MatrixField {
    /// Builds and validates a field from flat samples (`n^d` samples of
    /// `d × d` row-major matrices).
    pub fn new(d: usize, n: usize, delta: f64, a: Vec<f64>) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(FieldError::InvalidDelta(delta));
        }
        if n == 0 || d == 0 {
            return Err(FieldError::EmptyGrid);
        }
        let samples = n.pow(d as u32);
        if a.len() != samples * d * d {
            return Err(FieldError::Shape(format!(
                "{} entries for {samples} samples of {d}x{d} matrices",
                a.len()
            )));
        }
        let field = Self {
            d,
            n,
            delta,
            a,
            b: None,
            c: None,
            k_bound: 0.0,
        };
        field.validate()?;
        Ok(field)
    }

    /// Attaches `b^i` (stride `d`) and `c`, both bounded by `k`.
    pub fn with_lower_order(mut self, b: Vec<f64>, c: Vec<f64>, k: f64) -> Result<Self> {
        let samples = self.sample_count();
        if b.len() != samples * self.d || c.len() != samples {
            return Err(FieldError::Shape("lower-order coefficient length".into()));
        }
        if let Some(index) = b.iter().position(|x| x.abs() > k) {
            return Err(FieldError::LowerOrderBound {
                index: index / self.d,
                k,
            });
        }
        if let Some(index) = c.iter().position(|x| x.abs() > k) {
            return Err(FieldError::LowerOrderBound { index, k });
        }
        self.b = Some(b);
        self.c = Some(c);
        self.k_bound = k;
        Ok(self)
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

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn k_bound(&self) -> f64 {
        self.k_bound
    }

    pub fn sample_count(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn entries(&self) -> &[f64] {
        &self.a
    }

    pub fn matrix(&self, idx: usize) -> &[f64] {
        let s = self.d * self.d;
        &self.a[idx * s..(idx + 1) * s]
    }

    pub fn drift(&self, idx: usize) -> Option<&[f64]> {
        self.b.as_ref().map(|b| &b[idx * self.d..(idx + 1) * self.d])
    }

    pub fn potential(&self, idx: usize) -> Option<f64> {
        self.c.as_ref().map(|c| c[idx])
    }

    /// Symmetry and spectrum within `[δ, δ⁻¹]` for every sample.
    pub fn validate(&self) -> Result<Ellipticity> {
        let d = self.d;
        let tol = 1e-12;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for idx in 0..self.sample_count() {
            let m = self.matrix(idx);
            for i in 0..d {
                for j in 0..i {
                    if (m[i * d + j] - m[j * d + i]).abs() > tol * (1.0 + m[i * d + j].abs()) {
                        return Err(FieldError::NotSymmetric { index: idx });
                    }
                }
            }
            let (min, max) = eigen_range(d, m);
            if min < self.delta * (1.0 - tol) || max > (1.0 + tol) / self.delta {
                return Err(FieldError::NotElliptic {
                    index: idx,
                    min,
                    max,
                    delta: self.delta,
                });
            }
            lo = lo.min(min);
            hi = hi.max(max);
        }
        Ok(Ellipticity {
            min_eigenvalue: lo,
            max_eigenvalue: hi,
        })
    }

    /// Coordinates of the sample with flat index `idx`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let h = self.h();
        let mut rem = idx;
        (0..self.d)
            .map(|_| {
                let c = rem % self.n;
                rem /= self.n;
                (c as f64 + 0.5) * h
            })
            .collect()
    }

    /// The same coefficients frozen at sample `idx`.
    pub fn frozen_at(&self, idx: usize) -> Self {
        let m = self.matrix(idx).to_vec();
        constant_field(self.d, self.n, &m, self.delta).expect("sample already validated")
    }
}

/// Margin kept between the embedded scalar range and the ellipticity bounds,
/// as a fraction of `δ⁻¹ − δ`.
pub const EMBED_MARGIN_FRACTION: f64 = 0.05;

/// Affine slope used by [`embed_as_matrix`] for a given scalar field.
pub fn embed_slope(field: &ScalarField, delta: f64) -> f64 {
    let width = 1.0 / delta - delta;
    let half = 0.5 * width * (1.0 - 2.0 * EMBED_MARGIN_FRACTION);
    let bound = field.max_abs();
    if bound > 0.0 {
        half / bound
    } else {
        0.0
    }
}

/// `a^{ij}(x) = m(x) δ_{ij}` with `m` the affine image of the scalar field
/// taking `[−max|a|, max|a|]` onto `[δ + margin, δ⁻¹ − margin]`.
pub fn embed_as_matrix(field: &ScalarField, delta: f64) -> Result<MatrixField> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(FieldError::InvalidDelta(delta));
    }
    let mid = 0.5 * (delta + 1.0 / delta);
    let slope = embed_slope(field, delta);
    let mut a = vec![0.0; field.values.len() * 4];
    exec::for_each_chunk_mut(&mut a, 4, |k, m| {
        let s = mid + slope * field.values[k];
        m.copy_from_slice(&[s, 0.0, 0.0, s]);
    });
    MatrixField::new(2, field.n, delta, a)
}

/// Constant coefficients.
pub fn constant_field(d: usize, n: usize, matrix: &[f64], delta: f64) -> Result<MatrixField> {
    if matrix.len() != d * d {
        return Err(FieldError::Shape("matrix size".into()));
    }
    let samples = n.pow(d as u32);
    let a = matrix.repeat(samples);
    MatrixField::new(d, n, delta, a)
}

/// Piecewise-constant matrix profile `ā(t)` on uniform bins over `[t0, t1)`.
/// Evaluation clamps `t` into the range.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixProfile {
    d: usize,
    t0: f64,
    t1: f64,
    values: Vec<f64>,
}

impl MatrixProfile {
    pub fn new(d: usize, t0: f64, t1: f64, values: Vec<f64>, delta: f64) -> Result<Self> {
        if values.is_empty() || values.len() % (d * d) != 0 || !(t1 > t0) {
            return Err(FieldError::Shape("matrix profile bins".into()));
        }
        for (index, m) in values.chunks(d * d).enumerate() {
            let (min, max) = eigen_range(d, m);
            if min < delta * (1.0 - 1e-12) || max > (1.0 + 1e-12) / delta {
                return Err(FieldError::NotElliptic {
                    index,
                    min,
                    max,
                    delta,
                });
            }
        }
        Ok(Self { d, t0, t1, values })
    }

    /// Bins alternating between `δI` and `δ⁻¹I`.
    pub fn checkerboard(d: usize, bins: usize, t0: f64, t1: f64, delta: f64) -> Result<Self> {
        let mut values = Vec::with_capacity(bins * d * d);
        for k in 0..bins {
            let s = if k % 2 == 0 { delta } else { 1.0 / delta };
            for i in 0..d {
                for j in 0..d {
                    values.push(if i == j { s } else { 0.0 });
                }
            }
        }
        Self::new(d, t0, t1, values, delta)
    }

    pub fn bins(&self) -> usize {
        self.values.len() / (self.d * self.d)
    }

    pub fn eval(&self, t: f64) -> &[f64] {
        let bins = self.bins();
        let k = ((t - self.t0) / (self.t1 - self.t0) * bins as f64).floor();
        let k = (k.max(0.0) as usize).min(bins - 1);
        let s = self.d * self.d;
        &self.values[k * s..(k + 1) * s]
    }
}

/// Reference coefficient families.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceKind {
    /// `a ≡ matrix`.
    Constant(Vec<f64>),
    /// `a(x) = ā(x¹)`.
    OneDirectional(MatrixProfile),
    /// `a(x) = ā(e·x)` for a unit vector `e`.
    RotatedOneDirectional { direction: Vec<f64>, profile: MatrixProfile },
}

pub fn reference_field(kind: &ReferenceKind, d: usize, n: usize, delta: f64) -> Result<MatrixField> {
    let samples = n.pow(d as u32);
    let s = d * d;
    let h = 1.0 / n as f64;
    let point = |idx: usize| -> Vec<f64> {
        let mut rem = idx;
        (0..d)
            .map(|_| {
                let c = rem % n;
                rem /= n;
                (c as f64 + 0.5) * h
            })
            .collect()
    };
    match kind {
        ReferenceKind::Constant(m) => constant_field(d, n, m, delta),
        ReferenceKind::OneDirectional(profile) => {
            if profile.d != d {
                return Err(FieldError::Shape("profile dimension".into()));
            }
            let mut a = vec![0.0; samples * s];
            exec::for_each_chunk_mut(&mut a, s, |idx, m| {
                m.copy_from_slice(profile.eval(point(idx)[0]));
            });
            MatrixField::new(d, n, delta, a)
        }
        ReferenceKind::RotatedOneDirectional { direction, profile } => {
            if profile.d != d || direction.len() != d {
                return Err(FieldError::Shape("profile or direction dimension".into()));
            }
            let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(FieldError::Shape("direction must be a unit vector".into()));
            }
            let mut a = vec![0.0; samples * s];
            exec::for_each_chunk_mut(&mut a, s, |idx, m| {
                let t: f64 = point(idx).iter().zip(direction).map(|(x, e)| x * e).sum();
                m.copy_from_slice(profile.eval(t));
            });
            MatrixField::new(d, n, delta, a)
        }
    }
}
