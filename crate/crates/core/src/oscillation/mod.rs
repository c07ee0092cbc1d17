//! One-directional oscillation of two-dimensional coefficient fields.
//!
//! For a region `B`, a rigid motion `ψ` and a profile `ā` of one variable the
//! oscillation is `(1/|B|) ∫_B |a(x) − ā(ψ¹(x))| dx`, evaluated on the grid
//! cells whose centres lie in `B`. Matrix differences use the Frobenius norm;
//! the max-entry norm is reported alongside.

pub mod exact;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exec;
use crate::fields::{
    support_square, zeta_bmo, zeta_bump, ExampleCoefficient, ExampleParams, FieldError,
    MatrixField, ScalarField,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OscillationError {
    #[error("region contains no grid cell centres")]
    EmptyRegion,
    #[error("profile does not cover bin {bin}")]
    BinCoverage { bin: i64 },
    #[error("direction map is not a rigid motion: {0}")]
    NotRigid(String),
    #[error("oscillation is only implemented for two-dimensional fields, got d = {0}")]
    Dimension(usize),
    #[error("profile component count {profile} does not match field ({field})")]
    Components { profile: usize, field: usize },
    #[error("empty direction grid")]
    NoDirections,
    #[error("resolution too coarse: Q_{tau} has side {side} below two cells")]
    TooCoarse { tau: usize, side: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Result<T> = std::result::Result<T, OscillationError>;

/// Read-only view of a 2-D field with `comps` values per cell.
#[derive(Debug, Clone, Copy)]
pub struct FieldView<'a> {
    n: usize,
    comps: usize,
    data: &'a [f64],
}

impl<'a> FieldView<'a> {
    pub fn scalar(field: &'a ScalarField) -> Self {
        Self {
            n: field.n(),
            comps: 1,
            data: field.values(),
        }
    }

    pub fn matrix(field: &'a MatrixField) -> Result<Self> {
        if field.d() != 2 {
            return Err(OscillationError::Dimension(field.d()));
        }
        Ok(Self {
            n: field.n(),
            comps: 4,
            data: field.entries(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn comps(&self) -> usize {
        self.comps
    }

    fn sample(&self, idx: usize) -> &[f64] {
        &self.data[idx * self.comps..(idx + 1) * self.comps]
    }
}

impl<'a> From<&'a ScalarField> for FieldView<'a> {
    fn from(f: &'a ScalarField) -> Self {
        Self::scalar(f)
    }
}

/// A square `[x0, x0+side) × [y0, y0+side)` or an open disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Square { x0: f64, y0: f64, side: f64 },
    Ball { cx: f64, cy: f64, r: f64 },
}

impl Region {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Region::Square { x0, y0, side } => x >= x0 && x < x0 + side && y >= y0 && y < y0 + side,
            Region::Ball { cx, cy, r } => (x - cx).powi(2) + (y - cy).powi(2) < r * r,
        }
    }

    fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match *self {
            Region::Square { x0, y0, side } => (x0, x0 + side, y0, y0 + side),
            Region::Ball { cx, cy, r } => (cx - r, cx + r, cy - r, cy + r),
        }
    }

    pub fn center(&self) -> (f64, f64) {
        match *self {
            Region::Square { x0, y0, side } => (x0 + 0.5 * side, y0 + 0.5 * side),
            Region::Ball { cx, cy, .. } => (cx, cy),
        }
    }

    /// Half the side for squares, the radius for balls.
    pub fn radius(&self) -> f64 {
        match *self {
            Region::Square { side, .. } => 0.5 * side,
            Region::Ball { r, .. } => r,
        }
    }

    /// Calls `f(idx, x, y)` for every cell of an `n × n` grid whose centre is
    /// in the region, rows bottom to top.
    pub fn for_each_cell(&self, n: usize, mut f: impl FnMut(usize, f64, f64)) {
        let h = 1.0 / n as f64;
        let (xa, xb, ya, yb) = self.bounding_box();
        let lo = |v: f64| ((v * n as f64 - 0.5).floor().max(0.0) as usize).min(n);
        let hi = |v: f64| ((v * n as f64 - 0.5).ceil().max(-1.0) + 1.0).clamp(0.0, n as f64) as usize;
        for j in lo(ya)..hi(yb) {
            let y = (j as f64 + 0.5) * h;
            for i in lo(xa)..hi(xb) {
                let x = (i as f64 + 0.5) * h;
                if self.contains(x, y) {
                    f(j * n + i, x, y);
                }
            }
        }
    }

    pub fn cell_count(&self, n: usize) -> usize {
        let mut c = 0;
        self.for_each_cell(n, |_, _, _| c += 1);
        c
    }
}

/// Rigid motion `ψ(x) = R x + s` with `R` orthogonal, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionMap {
    d: usize,
    rotation: Vec<f64>,
    shift: Vec<f64>,
}

pub const ORTHONORMAL_TOLERANCE: f64 = 1e-12;

impl DirectionMap {
    pub fn new(d: usize, rotation: Vec<f64>, shift: Vec<f64>) -> Result<Self> {
        if rotation.len() != d * d || shift.len() != d {
            return Err(OscillationError::NotRigid("shape".into()));
        }
        for i in 0..d {
            for j in 0..d {
                let dot: f64 = (0..d).map(|k| rotation[i * d + k] * rotation[j * d + k]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (dot - target).abs() > ORTHONORMAL_TOLERANCE {
                    return Err(OscillationError::NotRigid(format!(
                        "rows {i},{j} have inner product {dot}"
                    )));
                }
            }
        }
        Ok(Self { d, rotation, shift })
    }

    pub fn identity(d: usize) -> Self {
        let mut rotation = vec![0.0; d * d];
        for i in 0..d {
            rotation[i * d + i] = 1.0;
        }
        Self {
            d,
            rotation,
            shift: vec![0.0; d],
        }
    }

    /// Planar rotation whose first row is `(cos θ, sin θ)`.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            d: 2,
            rotation: vec![c, s, -s, c],
            shift: vec![0.0, 0.0],
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rotation(&self) -> &[f64] {
        &self.rotation
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    /// The unit vector `e` with `ψ¹(x) = e·x + s¹`.
    pub fn direction(&self) -> &[f64] {
        &self.rotation[..self.d]
    }

    /// Angle of the first row in `(−π, π]` (planar maps).
    pub fn angle(&self) -> f64 {
        self.rotation[1].atan2(self.rotation[0])
    }

    pub fn psi1(&self, x: f64, y: f64) -> f64 {
        self.rotation[0] * x + self.rotation[1] * y + self.shift[0]
    }

    /// `ψ^{-1}(y) = Rᵀ(y − s)`.
    pub fn inverse_apply(&self, y: &[f64]) -> Vec<f64> {
        let d = self.d;
        (0..d)
            .map(|j| (0..d).map(|i| self.rotation[i * d + j] * (y[i] - self.shift[i])).sum())
            .collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = self.d;
        (0..d)
            .map(|i| (0..d).map(|k| self.rotation[i * d + k] * x[k]).sum::<f64>() + self.shift[i])
            .collect()
    }
}

/// Angles `θ_k = kπ/count`, `k = 0, …, count − 1`.
pub fn direction_grid(count: usize) -> Vec<DirectionMap> {
    (0..count)
        .map(|k| DirectionMap::from_angle(k as f64 * PI / count as f64))
        .collect()
}

/// Piecewise-constant profile on bins of width `width` centred at
/// `t0 + k·width`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneDProfile {
    t0: f64,
    width: f64,
    comps: usize,
    values: Vec<f64>,
    filled: Vec<bool>,
}

impl OneDProfile {
    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn bins(&self) -> usize {
        self.filled.len()
    }

    pub fn comps(&self) -> usize {
        self.comps
    }

    pub fn bin_center(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.width
    }

    pub fn bin_of(&self, t: f64) -> i64 {
        ((t - self.t0) / self.width).round() as i64
    }

    pub fn value(&self, k: usize) -> Option<&[f64]> {
        if self.filled.get(k).copied().unwrap_or(false) {
            Some(&self.values[k * self.comps..(k + 1) * self.comps])
        } else {
            None
        }
    }

    pub fn eval(&self, t: f64) -> Result<&[f64]> {
        let b = self.bin_of(t);
        if b < 0 || b as usize >= self.bins() {
            return Err(OscillationError::BinCoverage { bin: b });
        }
        self.value(b as usize)
            .ok_or(OscillationError::BinCoverage { bin: b })
    }

    /// Same bins with values `f(bin centre)` on every bin.
    pub fn with_values(&self, comps: usize, f: impl Fn(f64) -> Vec<f64>) -> Self {
        let mut values = Vec::with_capacity(self.bins() * comps);
        for k in 0..self.bins() {
            let v = f(self.bin_center(k));
            assert_eq!(v.len(), comps);
            values.extend(v);
        }
        Self {
            t0: self.t0,
            width: self.width,
            comps,
            values,
            filled: vec![true; self.bins()],
        }
    }
}

/// Bin layout for `ψ¹` over the region: width `h·max|e_k|`, first centre at
/// the smallest `ψ¹` value of a cell centre.
fn bin_layout(n: usize, region: &Region, psi: &DirectionMap) -> Result<(f64, f64, usize)> {
    if psi.d() != 2 {
        return Err(OscillationError::Dimension(psi.d()));
    }
    let e = psi.direction();
    let width = e[0].abs().max(e[1].abs()) / n as f64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    region.for_each_cell(n, |_, x, y| {
        let t = psi.psi1(x, y);
        lo = lo.min(t);
        hi = hi.max(t);
    });
    if lo > hi {
        return Err(OscillationError::EmptyRegion);
    }
    let bins = ((hi - lo) / width).round() as usize + 1;
    Ok((lo, width, bins))
}

/// Per-bin slabs of cell indices.
fn slabs(view: &FieldView, region: &Region, psi: &DirectionMap) -> Result<(f64, f64, Vec<Vec<usize>>)> {
    let (t0, width, bins) = bin_layout(view.n, region, psi)?;
    let mut out = vec![Vec::new(); bins];
    region.for_each_cell(view.n, |idx, x, y| {
        let b = ((psi.psi1(x, y) - t0) / width).round() as usize;
        out[b.min(bins - 1)].push(idx);
    });
    Ok((t0, width, out))
}

/// Per-bin average of the field over `{x ∈ B : ψ¹(x) ∈ bin}`.
pub fn slab_average_profile(view: &FieldView, region: &Region, psi: &DirectionMap) -> Result<OneDProfile> {
    let (t0, width, slabs) = slabs(view, region, psi)?;
    let c = view.comps;
    let mut values = vec![0.0; slabs.len() * c];
    let mut filled = vec![false; slabs.len()];
    for (k, cells) in slabs.iter().enumerate() {
        if cells.is_empty() {
            continue;
        }
        filled[k] = true;
        let out = &mut values[k * c..(k + 1) * c];
        for &idx in cells {
            for (o, v) in out.iter_mut().zip(view.sample(idx)) {
                *o += v;
            }
        }
        let m = cells.len() as f64;
        out.iter_mut().for_each(|o| *o /= m);
    }
    Ok(OneDProfile {
        t0,
        width,
        comps: c,
        values,
        filled,
    })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// Componentwise per-bin median, on the same bins as [`slab_average_profile`].
pub fn slab_median_profile(view: &FieldView, region: &Region, psi: &DirectionMap) -> Result<OneDProfile> {
    let (t0, width, slabs) = slabs(view, region, psi)?;
    let c = view.comps;
    let mut values = vec![0.0; slabs.len() * c];
    let mut filled = vec![false; slabs.len()];
    for (k, cells) in slabs.iter().enumerate() {
        if cells.is_empty() {
            continue;
        }
        filled[k] = true;
        for comp in 0..c {
            let mut col: Vec<f64> = cells.iter().map(|&i| view.sample(i)[comp]).collect();
            values[k * c + comp] = median(&mut col);
        }
    }
    Ok(OneDProfile {
        t0,
        width,
        comps: c,
        values,
        filled,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillationReport {
    pub region: Region,
    pub direction: DirectionMap,
    pub profile: OneDProfile,
    /// `(1/|B|) Σ |a − ā(ψ¹)| h²` with the Frobenius norm.
    pub value: f64,
    /// The same with the max-entry norm.
    pub max_entry_value: f64,
    /// Unnormalised `Σ |a − ā(ψ¹)| h²` (Frobenius).
    pub integral: f64,
    /// Discrete measure `|B|` (cell count times `h²`).
    pub measure: f64,
}

impl OscillationReport {
    /// `γ` realised on this region.
    pub fn gamma_bound(&self) -> f64 {
        self.value
    }
}

pub fn oscillation(
    view: &FieldView,
    region: &Region,
    psi: &DirectionMap,
    profile: &OneDProfile,
) -> Result<OscillationReport> {
    if profile.comps != view.comps {
        return Err(OscillationError::Components {
            profile: profile.comps,
            field: view.comps,
        });
    }
    let mut frob = 0.0;
    let mut maxe = 0.0;
    let mut cells = 0usize;
    let mut err = None;
    region.for_each_cell(view.n, |idx, x, y| {
        if err.is_some() {
            return;
        }
        match profile.eval(psi.psi1(x, y)) {
            Ok(p) => {
                let a = view.sample(idx);
                let mut sq = 0.0;
                let mut mx = 0.0f64;
                for (u, v) in a.iter().zip(p) {
                    let d = u - v;
                    sq += d * d;
                    mx = mx.max(d.abs());
                }
                frob += sq.sqrt();
                maxe += mx;
                cells += 1;
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    if cells == 0 {
        return Err(OscillationError::EmptyRegion);
    }
    let h2 = 1.0 / (view.n * view.n) as f64;
    let m = cells as f64;
    Ok(OscillationReport {
        region: *region,
        direction: psi.clone(),
        profile: profile.clone(),
        value: frob / m,
        max_entry_value: maxe / m,
        integral: frob * h2,
        measure: m * h2,
    })
}

/// Oscillation with the slab-average profile.
pub fn slab_oscillation(view: &FieldView, region: &Region, psi: &DirectionMap) -> Result<OscillationReport> {
    let profile = slab_average_profile(view, region, psi)?;
    oscillation(view, region, psi, &profile)
}

/// Values within this distance of the running minimum count as ties.
pub const TIE_TOLERANCE: f64 = 1e-13;

/// Minimises the slab-average oscillation over the grid; ties go to the
/// earliest grid entry.
pub fn best_direction(
    view: &FieldView,
    region: &Region,
    grid: &[DirectionMap],
) -> Result<(DirectionMap, OscillationReport)> {
    let mut best: Option<OscillationReport> = None;
    for psi in grid {
        let r = slab_oscillation(view, region, psi)?;
        let better = match &best {
            None => true,
            Some(b) => r.value < b.value - TIE_TOLERANCE,
        };
        if better {
            best = Some(r);
        }
    }
    let best = best.ok_or(OscillationError::NoDirections)?;
    Ok((best.direction.clone(), best))
}

/// Balls used to estimate `γ`: inscribed discs of all dyadic squares down to
/// a side of 4 cells, plus seeded random discs per radius decade.
#[derive(Debug, Clone, PartialEq)]
pub struct BallSample {
    balls: Vec<Region>,
}

impl BallSample {
    pub fn new(n: usize, random_per_decade: usize, seed: u64) -> Self {
        let h = 1.0 / n as f64;
        let mut balls = Vec::new();
        let mut side = n;
        while side >= 4 {
            let s = side as f64 * h;
            for j in (0..n).step_by(side) {
                for i in (0..n).step_by(side) {
                    balls.push(Region::Ball {
                        cx: (i as f64 + 0.5 * side as f64) * h,
                        cy: (j as f64 + 0.5 * side as f64) * h,
                        r: 0.5 * s,
                    });
                }
            }
            side /= 2;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r_min = 2.0 * h;
        let mut hi = 0.5f64;
        while hi > r_min {
            let lo = (hi / 10.0).max(r_min);
            for _ in 0..random_per_decade {
                let r = rng.random_range(lo..hi);
                let cx = rng.random_range(r..=1.0 - r);
                let cy = rng.random_range(r..=1.0 - r);
                balls.push(Region::Ball { cx, cy, r });
            }
            hi = lo;
        }
        Self { balls }
    }

    pub fn from_regions(balls: Vec<Region>) -> Self {
        Self { balls }
    }

    pub fn all(&self) -> &[Region] {
        &self.balls
    }

    /// Regions of radius below `r0`, in sample order.
    pub fn below(&self, r0: f64) -> Vec<Region> {
        self.balls.iter().copied().filter(|b| b.radius() < r0).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaRow {
    pub region_id: usize,
    pub region: Region,
    pub best_angle: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaEstimate {
    pub gamma: f64,
    pub rows: Vec<GammaRow>,
}

/// Sup over sampled regions of radius below `r0` of the best-direction
/// oscillation. An empirical lower estimate of `γ(R₀)`.
pub fn gamma_profile(
    view: &FieldView,
    r0: f64,
    sample: &BallSample,
    grid: &[DirectionMap],
) -> Result<GammaEstimate> {
    if grid.is_empty() {
        return Err(OscillationError::NoDirections);
    }
    let regions: Vec<(usize, Region)> = sample
        .all()
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, b)| b.radius() < r0 && b.cell_count(view.n) > 0)
        .collect();
    let rows: Vec<Result<GammaRow>> = exec::map_indices(regions.len(), |k| {
        let (id, region) = regions[k];
        let (psi, rep) = best_direction(view, &region, grid)?;
        Ok(GammaRow {
            region_id: id,
            region,
            best_angle: psi.angle(),
            value: rep.value,
        })
    });
    let rows: Vec<GammaRow> = rows.into_iter().collect::<Result<_>>()?;
    let gamma = rows.iter().fold(0.0f64, |m, r| m.max(r.value));
    Ok(GammaEstimate { gamma, rows })
}

/// Least `k ≥ 0` such that the region meets `Q_k = (κ^{-k}/2, κ^{-k})²` in a
/// set of positive measure.
pub fn tau_index(region: &Region, kappa: f64) -> Option<usize> {
    assert!(kappa >= 4.0, "kappa must be at least 4");
    let meets = |lo: f64, hi: f64| -> bool {
        match *region {
            Region::Square { x0, y0, side } => {
                x0 < hi && x0 + side > lo && y0 < hi && y0 + side > lo
            }
            Region::Ball { cx, cy, r } => {
                let dx = cx.clamp(lo, hi) - cx;
                let dy = cy.clamp(lo, hi) - cy;
                dx * dx + dy * dy < r * r
            }
        }
    };
    // Q_k lies in [0, κ^{-k})², so it is out of reach once κ^{-k} drops
    // below the largest lower coordinate of the region.
    let (xa, _, ya, _) = region.bounding_box();
    let reach = xa.max(ya);
    let mut hi = 1.0f64;
    let mut k = 0;
    while hi > 0.0 {
        if reach > 0.0 && hi <= reach {
            return None;
        }
        if meets(0.5 * hi, hi) {
            return Some(k);
        }
        hi /= kappa;
        k += 1;
    }
    None
}

/// Result for one dyadic square.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleBoundRow {
    pub i0: usize,
    pub j0: usize,
    pub side: usize,
    pub tau: Option<usize>,
    /// `∫_Q |a − ā(ψ¹)|` with the prescribed direction and profile.
    pub m: f64,
    /// `∫_I |f(κ^τ x)| dx · ∫_J |ζ(κ^τ y) − ζ̄| dy` (axes swapped for odd `τ`).
    pub first_term: f64,
    /// Measure of the cells of `Q` with centre in some `Q_i`, `i > τ`.
    pub tail_grid: f64,
    /// Exact `Σ_{i>τ}|Q ∩ Q_i|` as a float, for integer `κ`.
    pub tail_exact: Option<f64>,
    /// Exact checks of the tail bound, per-term bound and geometry lemma.
    pub tail_exact_holds: Option<bool>,
    pub measure: f64,
    /// `M ≤ first_term + tail_grid`, up to rounding.
    pub pointwise_pass: bool,
    /// `M/|Q| ≤ (|ζ|_BMO + 4/(κ²−1))(1 + tolerance)`.
    pub normalized_pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleBoundReport {
    pub params: ExampleParams,
    pub n: usize,
    pub zeta_bmo: f64,
    pub tail_constant: f64,
    pub tolerance: f64,
    pub rows: Vec<ExampleBoundRow>,
}

impl ExampleBoundReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| {
            r.pointwise_pass && r.normalized_pass && r.tail_exact_holds.unwrap_or(true)
        })
    }

    /// Largest `(M/|Q|) / (|ζ|_BMO + 4/(κ²−1))`.
    pub fn worst_ratio(&self) -> f64 {
        let b = self.zeta_bmo + self.tail_constant;
        self.rows
            .iter()
            .map(|r| r.m / r.measure / b)
            .fold(0.0, f64::max)
    }
}

/// Relative rounding allowance per summed cell for `M ≤ first_term + tail_grid`;
/// a square of `k` cells is allowed `k · POINTWISE_ROUNDING`.
pub const POINTWISE_ROUNDING: f64 = f64::EPSILON;

/// Smallest square side, in cells, used by [`verify_example_bound`].
pub const MIN_SQUARE_CELLS: usize = 8;

fn integer_kappa(kappa: f64) -> Option<u64> {
    (kappa.fract() == 0.0 && kappa >= 4.0 && kappa < 1e6).then_some(kappa as u64)
}

fn bound_row(
    coeff: &ExampleCoefficient,
    view: &FieldView,
    square: exact::GridSquare,
    bmo: f64,
    tolerance: f64,
) -> Result<ExampleBoundRow> {
    let n = view.n;
    let h = 1.0 / n as f64;
    let kappa = coeff.params().kappa;
    let eps = coeff.params().epsilon;
    let (i0, j0, side) = (square.i0 as usize, square.j0 as usize, square.side as usize);
    let region = Region::Square {
        x0: i0 as f64 * h,
        y0: j0 as f64 * h,
        side: side as f64 * h,
    };
    let measure = (side * side) as f64 * h * h;
    let tail_constant = 4.0 / (kappa * kappa - 1.0);
    let exact = integer_kappa(kappa).map(|k| exact::tail_check(&square, k));
    let tau = tau_index(&region, kappa);
    let Some(tau) = tau else {
        // Disjoint from every Q_k: the prescribed profile is zero.
        let psi = DirectionMap::identity(2);
        let zero = slab_average_profile(view, &region, &psi)?.with_values(1, |_| vec![0.0]);
        let m = oscillation(view, &region, &psi, &zero)?.integral;
        return Ok(ExampleBoundRow {
            i0,
            j0,
            side,
            tau: None,
            m,
            first_term: 0.0,
            tail_grid: 0.0,
            tail_exact: exact.as_ref().map(|_| 0.0),
            tail_exact_holds: exact.as_ref().map(|t| t.is_none()),
            measure,
            pointwise_pass: m == 0.0,
            normalized_pass: m == 0.0,
        });
    };
    let q_side = kappa.powi(-(tau as i32)) * 0.5;
    if q_side < 2.0 * h {
        return Err(OscillationError::TooCoarse { tau, side: q_side });
    }
    let s = kappa.powi(tau as i32);
    let even = tau % 2 == 0;
    // Coordinates along the profile variable (I) and the oscillating one (J).
    let centers = |start: usize| -> Vec<f64> { (start..start + side).map(|k| (k as f64 + 0.5) * h).collect() };
    let (along, across) = if even { (centers(i0), centers(j0)) } else { (centers(j0), centers(i0)) };
    let zeta_vals: Vec<f64> = across.iter().map(|&t| zeta_bump(s * t, eps)).collect();
    let zeta_mean = zeta_vals.iter().sum::<f64>() / side as f64;
    let f_abs: f64 = along.iter().map(|&t| coeff.profile().eval(s * t).abs()).sum::<f64>() * h;
    let z_osc: f64 = zeta_vals.iter().map(|z| (z - zeta_mean).abs()).sum::<f64>() * h;
    let first_term = f_abs * z_osc;

    let psi = if even {
        DirectionMap::identity(2)
    } else {
        DirectionMap::from_angle(0.5 * PI)
    };
    let bins = slab_average_profile(view, &region, &psi)?;
    let prescribed = bins.with_values(1, |t| vec![coeff.profile().eval(s * t) * zeta_mean]);
    let m = oscillation(view, &region, &psi, &prescribed)?.integral;

    let mut tail_cells = 0usize;
    region.for_each_cell(n, |_, x, y| {
        if support_square(x, y, kappa).is_some_and(|r| r > tau) {
            tail_cells += 1;
        }
    });
    let tail_grid = tail_cells as f64 * h * h;
    let rhs = first_term + tail_grid;
    let allowance = (side * side) as f64 * POINTWISE_ROUNDING;
    let pointwise_pass = m <= rhs * (1.0 + allowance) + f64::MIN_POSITIVE;
    let normalized_pass = m / measure <= (bmo + tail_constant) * (1.0 + tolerance);
    let (tail_exact, tail_exact_holds) = match exact {
        Some(Some(t)) => {
            use num_traits::ToPrimitive;
            let ok = t.tau as usize == tau && t.holds && t.per_term_holds && t.geometry_holds;
            (t.tail.to_f64(), Some(ok))
        }
        Some(None) => (None, Some(false)),
        None => (None, None),
    };
    Ok(ExampleBoundRow {
        i0,
        j0,
        side,
        tau: Some(tau),
        m,
        first_term,
        tail_grid,
        tail_exact,
        tail_exact_holds,
        measure,
        pointwise_pass,
        normalized_pass,
    })
}

/// Checks the oscillation bound of the example field on every dyadic square
/// of side at least [`MIN_SQUARE_CELLS`] cells of an `n × n` grid (`n` a power
/// of two).
pub fn verify_example_bound(params: &ExampleParams, n: usize, tolerance: f64) -> Result<ExampleBoundReport> {
    let coeff = ExampleCoefficient::new(params.clone())?;
    let field = crate::fields::example_field(params, n)?;
    let view = FieldView::scalar(&field);
    let bmo = zeta_bmo(params.epsilon, n);
    let mut squares = Vec::new();
    let mut side = n;
    while side >= MIN_SQUARE_CELLS {
        for j0 in (0..n).step_by(side) {
            for i0 in (0..n).step_by(side) {
                squares.push(exact::GridSquare {
                    i0: i0 as u64,
                    j0: j0 as u64,
                    side: side as u64,
                    n: n as u64,
                });
            }
        }
        side /= 2;
    }
    let rows = exec::map_indices(squares.len(), |k| bound_row(&coeff, &view, squares[k], bmo, tolerance));
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ExampleBoundReport {
        params: params.clone(),
        n,
        zeta_bmo: bmo,
        tail_constant: 4.0 / (params.kappa * params.kappa - 1.0),
        tolerance,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_dir(n: usize, f: impl Fn(f64) -> f64 + Sync + Send) -> ScalarField {
        ScalarField::from_fn(n, move |x, _| f(x)).unwrap()
    }

    #[test]
    fn region_cells() {
        let sq = Region::Square { x0: 0.25, y0: 0.5, side: 0.25 };
        assert_eq!(sq.cell_count(16), 16);
        let ball = Region::Ball { cx: 0.5, cy: 0.5, r: 0.2 };
        let c = ball.cell_count(64) as f64 / (64.0 * 64.0);
        assert!((c - PI * 0.04).abs() < 0.01);
        let out = Region::Square { x0: 2.0, y0: 2.0, side: 1.0 };
        assert_eq!(out.cell_count(16), 0);
        let f = ScalarField::from_fn(16, |_, _| 1.0).unwrap();
        let v = FieldView::scalar(&f);
        assert!(matches!(
            slab_oscillation(&v, &out, &DirectionMap::identity(2)),
            Err(OscillationError::EmptyRegion)
        ));
    }

    #[test]
    fn direction_map_validation() {
        assert!(DirectionMap::new(2, vec![1.0, 0.0, 0.0, 1.0], vec![0.3, 0.1]).is_ok());
        assert!(DirectionMap::new(2, vec![1.0, 0.1, 0.0, 1.0], vec![0.0, 0.0]).is_err());
        let m = DirectionMap::from_angle(0.7);
        assert!(DirectionMap::new(2, m.rotation().to_vec(), vec![0.0, 0.0]).is_ok());
        let x = [0.2, -0.4];
        let back = m.inverse_apply(&m.apply(&x));
        assert!((back[0] - x[0]).abs() < 1e-15 && (back[1] - x[1]).abs() < 1e-15);
        assert!((m.angle() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn one_directional_fields_are_recovered() {
        let f = one_dir(64, |x| (13.0 * x).sin().signum() + x * x);
        let v = FieldView::scalar(&f);
        let region = Region::Ball { cx: 0.4, cy: 0.6, r: 0.3 };
        let id = DirectionMap::identity(2);
        let rep = slab_oscillation(&v, &region, &id).unwrap();
        assert!(rep.value < 1e-14);
        let orth = slab_oscillation(&v, &region, &DirectionMap::from_angle(0.5 * PI)).unwrap();
        assert!(orth.value > 0.1);
        let constant = ScalarField::from_fn(64, |_, _| 2.5).unwrap();
        let cv = FieldView::scalar(&constant);
        let grid = direction_grid(8);
        let (best, rep) = best_direction(&cv, &region, &grid).unwrap();
        assert_eq!(best, grid[0]);
        assert!(rep.value < 1e-14);
        let prof = slab_average_profile(&cv, &region, &id).unwrap();
        for k in 0..prof.bins() {
            assert!((prof.value(k).unwrap()[0] - 2.5).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_profile_is_found() {
        let n = 64;
        let f = ScalarField::from_fn(n, |x, y| ((x + y) * 9.0).floor().rem_euclid(2.0)).unwrap();
        let v = FieldView::scalar(&f);
        let region = Region::Square { x0: 0.125, y0: 0.25, side: 0.5 };
        let grid = direction_grid(4);
        let (best, rep) = best_direction(&v, &region, &grid).unwrap();
        assert!((best.angle() - PI / 4.0).abs() < 1e-12);
        assert!(rep.value < 1e-14);
    }

    #[test]
    fn coverage_and_component_errors() {
        let f = ScalarField::from_fn(32, |x, y| x * y).unwrap();
        let v = FieldView::scalar(&f);
        let small = Region::Square { x0: 0.0, y0: 0.0, side: 0.25 };
        let big = Region::Square { x0: 0.0, y0: 0.0, side: 1.0 };
        let id = DirectionMap::identity(2);
        let p = slab_average_profile(&v, &small, &id).unwrap();
        assert!(matches!(
            oscillation(&v, &big, &id, &p),
            Err(OscillationError::BinCoverage { .. })
        ));
        let m = p.with_values(4, |_| vec![0.0; 4]);
        assert!(matches!(
            oscillation(&v, &small, &id, &m),
            Err(OscillationError::Components { .. })
        ));
    }

    #[test]
    fn tau_index_examples() {
        let outside = Region::Square { x0: 2.0, y0: 2.0, side: 1.0 };
        assert_eq!(tau_index(&outside, 8.0), None);
        let q0 = Region::Square { x0: 0.5, y0: 0.5, side: 0.5 };
        assert_eq!(tau_index(&q0, 8.0), Some(0));
        let origin = Region::Square { x0: -0.1, y0: -0.1, side: 0.7 };
        assert_eq!(tau_index(&origin, 4.0), Some(0));
        let tiny = Region::Square { x0: 0.0, y0: 0.0, side: 0.01 };
        assert_eq!(tau_index(&tiny, 4.0), Some(3));
        let ball = Region::Ball { cx: 0.1, cy: 0.1, r: 0.02 };
        assert_eq!(tau_index(&ball, 8.0), Some(1));
        let off = Region::Ball { cx: 0.9, cy: 0.1, r: 0.05 };
        assert_eq!(tau_index(&off, 8.0), None);
    }

    #[test]
    fn tau_matches_exact_on_grid_squares() {
        let n = 64u64;
        for kappa in [4u64, 8] {
            let mut side = n;
            while side >= 1 {
                for j0 in (0..n).step_by(side as usize) {
                    for i0 in (0..n).step_by(side as usize) {
                        let sq = exact::GridSquare { i0, j0, side, n };
                        let h = 1.0 / n as f64;
                        let r = Region::Square {
                            x0: i0 as f64 * h,
                            y0: j0 as f64 * h,
                            side: side as f64 * h,
                        };
                        assert_eq!(
                            tau_index(&r, kappa as f64),
                            sq.tau(kappa).map(|t| t as usize)
                        );
                    }
                }
                side /= 2;
            }
        }
    }

    #[test]
    fn example_bound_small_grid() {
        let params = ExampleParams::new(0.2, 4.0, ExampleParams::terms_for_resolution(4.0, 256));
        let rep = verify_example_bound(&params, 256, 0.05).unwrap();
        assert_eq!(rep.rows.len(), 1 + 4 + 16 + 64 + 256 + 1024);
        assert!(rep.all_pass(), "worst ratio {}", rep.worst_ratio());
        let disjoint = rep.rows.iter().filter(|r| r.tau.is_none()).count();
        assert!(disjoint > 0);
    }

    #[test]
    fn even_tau_prefers_x_axis() {
        let mut params = ExampleParams::new(0.1, 8.0, 4);
        params.profile = crate::fields::ProfileKind::SquareWave { periods: 16 };
        let field = crate::fields::example_field(&params, 512).unwrap();
        let v = FieldView::scalar(&field);
        // meets Q_0 (τ = 0)
        let region = Region::Square { x0: 0.5, y0: 0.5, side: 0.5 };
        assert_eq!(tau_index(&region, 8.0), Some(0));
        let grid = [DirectionMap::from_angle(0.5 * PI), DirectionMap::identity(2)];
        let (best, _) = best_direction(&v, &region, &grid).unwrap();
        assert_eq!(best, grid[1]);
    }

    #[test]
    fn ball_sample_is_nested_in_r0() {
        let s = BallSample::new(64, 20, 3);
        let a = s.below(0.05);
        let b = s.below(0.2);
        assert!(a.iter().all(|r| b.contains(r)));
        assert!(b.len() > a.len());
        assert!(s.all().iter().all(|r| r.radius() >= 2.0 / 64.0 - 1e-15));
    }
}
