//! Partial Fefferman–Stein machinery on a [`PartitionFiltration`].
//!
//! Two premise families are supported:
//!
//! * monotone: `0 ≤ u ≤ v` and `∫_C (u − v_C)_+ ≤ ∫_C g` for every cell `C`;
//! * sharp: `|u| ≤ v`, a majorant `|u| ≤ u^C ≤ v` on every cell, and
//!   `min(∫_C |u − u_C|, ∫_C |u^C − u^C_C|) ≤ ∫_C g`.
//!
//! Under either premise `|{|u| ≥ λ}| ≤ 2λ⁻¹ ∫ g 1{ℳv > αλ}` with
//! `α = 1/(2N₀)`, and `‖u‖_p^p ≤ N ‖g‖_p ‖v‖_p^{p−1}` with
//! `N = 2 q^p α^{1−p}`, `q = p/(p−1)`.
//!
//! On a finite filtration the distribution bound is only guaranteed once no
//! coarsest-level average of `v` exceeds `αλ`; see [`truncation_threshold`].

use rand::Rng;
use thiserror::Error;

use crate::dyadic::{DyadicError, PartitionFiltration, WeightedFunction};

/// Relative slack allowed when comparing integrals that may coincide.
pub const PREMISE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SharpError {
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
    #[error("premise invariant violated at atom {atom}: {what}")]
    Invariant { atom: usize, what: &'static str },
    #[error("majorant family has {got} levels, filtration has {expected}")]
    MajorantShape { expected: usize, got: usize },
    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("p must exceed 1, got {0}")]
    InvalidExponent(f64),
}

pub type Result<T> = std::result::Result<T, SharpError>;

/// The constant `α = (2N₀)⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaConstant(f64);

impl AlphaConstant {
    pub fn from_regularity(n0: f64) -> Self {
        Self(1.0 / (2.0 * n0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `u`, `v` and a nonnegative `g` on a common filtration.
#[derive(Debug, Clone, PartialEq)]
pub struct FsTriple {
    pub u: WeightedFunction,
    pub v: WeightedFunction,
    pub g: WeightedFunction,
}

impl FsTriple {
    pub fn new(
        filtration: &PartitionFiltration,
        u: WeightedFunction,
        v: WeightedFunction,
        g: WeightedFunction,
    ) -> Result<Self> {
        let expected = filtration.atom_count();
        for f in [&u, &v, &g] {
            if f.len() != expected {
                return Err(DyadicError::LengthMismatch {
                    expected,
                    got: f.len(),
                }
                .into());
            }
        }
        if let Some(atom) = g.values().iter().position(|&x| x < 0.0) {
            return Err(SharpError::Invariant {
                atom,
                what: "g must be nonnegative",
            });
        }
        Ok(Self { u, v, g })
    }

    /// `0 ≤ u ≤ v`.
    pub fn check_monotone_invariant(&self) -> Result<()> {
        for (atom, (&u, &v)) in self.u.values().iter().zip(self.v.values()).enumerate() {
            if u < 0.0 {
                return Err(SharpError::Invariant {
                    atom,
                    what: "u must be nonnegative",
                });
            }
            if u > v {
                return Err(SharpError::Invariant {
                    atom,
                    what: "u must not exceed v",
                });
            }
        }
        Ok(())
    }

    /// `|u| ≤ v`.
    pub fn check_sharp_invariant(&self) -> Result<()> {
        for (atom, (&u, &v)) in self.u.values().iter().zip(self.v.values()).enumerate() {
            if u.abs() > v {
                return Err(SharpError::Invariant {
                    atom,
                    what: "|u| must not exceed v",
                });
            }
        }
        Ok(())
    }
}

/// Majorants `u^C`, one per cell of every level. Level `k` (internal index,
/// coarse to fine) is stored as a full vector over atoms: on each cell `C` of
/// that level it holds `u^C`.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorantFamily {
    levels: Vec<Vec<f64>>,
}

impl MajorantFamily {
    pub fn new(filtration: &PartitionFiltration, levels: Vec<Vec<f64>>) -> Result<Self> {
        if levels.len() != filtration.level_count() {
            return Err(SharpError::MajorantShape {
                expected: filtration.level_count(),
                got: levels.len(),
            });
        }
        for l in &levels {
            if l.len() != filtration.atom_count() {
                return Err(DyadicError::LengthMismatch {
                    expected: filtration.atom_count(),
                    got: l.len(),
                }
                .into());
            }
        }
        Ok(Self { levels })
    }

    /// `u^C = |u|` on every cell.
    pub fn trivial(filtration: &PartitionFiltration, u: &WeightedFunction) -> Self {
        let abs: Vec<f64> = u.values().iter().map(|x| x.abs()).collect();
        Self {
            levels: vec![abs; filtration.level_count()],
        }
    }

    pub fn level(&self, li: usize) -> &[f64] {
        &self.levels[li]
    }

    /// `|u| ≤ u^C ≤ v` everywhere.
    pub fn check_bounds(&self, t: &FsTriple) -> Result<()> {
        for l in &self.levels {
            for (atom, ((&m, &u), &v)) in l.iter().zip(t.u.values()).zip(t.v.values()).enumerate() {
                if m < u.abs() || m > v {
                    return Err(SharpError::Invariant {
                        atom,
                        what: "majorant must satisfy |u| <= u^C <= v",
                    });
                }
            }
        }
        Ok(())
    }
}

/// A cell of a filtration, identified by level and index within the level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellRef {
    pub level: i32,
    pub cell: usize,
}

/// Outcome of a premise check.
#[derive(Debug, Clone, PartialEq)]
pub struct PremiseReport {
    pub holds: bool,
    /// Cell with the largest `lhs − rhs`.
    pub worst: Option<CellRef>,
    /// Largest `lhs − rhs` over all cells (≤ 0 when the premise holds
    /// strictly).
    pub worst_excess: f64,
}

fn premise_from_cells(
    filtration: &PartitionFiltration,
    per_level: impl Fn(usize) -> (Vec<f64>, Vec<f64>),
) -> PremiseReport {
    let mut holds = true;
    let mut worst = None;
    let mut worst_excess = f64::NEG_INFINITY;
    for li in 0..filtration.level_count() {
        let (lhs, rhs) = per_level(li);
        for (c, (&l, &r)) in lhs.iter().zip(&rhs).enumerate() {
            let excess = l - r;
            if excess > PREMISE_TOLERANCE * l.abs().max(r.abs()).max(f64::MIN_POSITIVE) {
                holds = false;
            }
            if excess > worst_excess {
                worst_excess = excess;
                worst = Some(CellRef {
                    level: filtration.n_min() + li as i32,
                    cell: c,
                });
            }
        }
    }
    PremiseReport {
        holds,
        worst,
        worst_excess,
    }
}

/// Per-cell `∫_C (u − v_C)_+` at internal level `li`.
pub(crate) fn monotone_lhs_at(filtration: &PartitionFiltration, t: &FsTriple, li: usize) -> Vec<f64> {
    let v_avg = filtration.cell_averages_at(t.v.values(), li);
    let cells = filtration.level_cells_of(li);
    let mut out = vec![0.0; v_avg.len()];
    for (a, &c) in cells.iter().enumerate() {
        let c = c as usize;
        out[c] += (t.u.values()[a] - v_avg[c]).max(0.0) * filtration.weights()[a];
    }
    out
}

/// Per-cell `∫_C |f − f_C|` at internal level `li`.
pub(crate) fn oscillation_integrals_at(
    filtration: &PartitionFiltration,
    values: &[f64],
    li: usize,
) -> Vec<f64> {
    let avg = filtration.cell_averages_at(values, li);
    let cells = filtration.level_cells_of(li);
    let mut out = vec![0.0; avg.len()];
    for (a, &c) in cells.iter().enumerate() {
        let c = c as usize;
        out[c] += (values[a] - avg[c]).abs() * filtration.weights()[a];
    }
    out
}

/// Checks `∫_C (u − v_C)_+ ≤ ∫_C g` on every cell.
pub fn check_premise_monotone(filtration: &PartitionFiltration, t: &FsTriple) -> Result<PremiseReport> {
    FsTriple::new(filtration, t.u.clone(), t.v.clone(), t.g.clone())?;
    t.check_monotone_invariant()?;
    Ok(premise_from_cells(filtration, |li| {
        (
            monotone_lhs_at(filtration, t, li),
            filtration.cell_integrals_at(t.g.values(), li),
        )
    }))
}

/// Checks `min(∫_C |u − u_C|, ∫_C |u^C − u^C_C|) ≤ ∫_C g` on every cell.
pub fn check_premise_sharp(
    filtration: &PartitionFiltration,
    t: &FsTriple,
    majorants: &MajorantFamily,
) -> Result<PremiseReport> {
    FsTriple::new(filtration, t.u.clone(), t.v.clone(), t.g.clone())?;
    t.check_sharp_invariant()?;
    MajorantFamily::new(filtration, majorants.levels.clone())?;
    majorants.check_bounds(t)?;
    Ok(premise_from_cells(filtration, |li| {
        (
            sharp_lhs_at(filtration, t, majorants, li),
            filtration.cell_integrals_at(t.g.values(), li),
        )
    }))
}

pub(crate) fn sharp_lhs_at(
    filtration: &PartitionFiltration,
    t: &FsTriple,
    majorants: &MajorantFamily,
    li: usize,
) -> Vec<f64> {
    let a = oscillation_integrals_at(filtration, t.u.values(), li);
    let b = oscillation_integrals_at(filtration, majorants.level(li), li);
    a.iter().zip(&b).map(|(x, y)| x.min(*y)).collect()
}

/// Dyadic sharp function `u^♯(x) = sup_n ⨍_{C_n(x)} |u − u_{C_n(x)}|`.
pub fn sharp_function(filtration: &PartitionFiltration, u: &WeightedFunction) -> Result<WeightedFunction> {
    if u.len() != filtration.atom_count() {
        return Err(DyadicError::LengthMismatch {
            expected: filtration.atom_count(),
            got: u.len(),
        }
        .into());
    }
    let mut out = vec![0.0f64; u.len()];
    for li in 0..filtration.level_count() {
        let osc = oscillation_integrals_at(filtration, u.values(), li);
        let measures = filtration.level_measures(li);
        for (a, &c) in filtration.level_cells_of(li).iter().enumerate() {
            let c = c as usize;
            out[a] = out[a].max(osc[c] / measures[c]);
        }
    }
    Ok(WeightedFunction::new(out)?)
}

/// Coefficient in front of `λ⁻¹` in the distribution inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundCoefficient {
    /// `2λ⁻¹`, valid under either premise.
    General,
    /// `λ⁻¹`, valid under the sharp premise when `u ≥ 0`.
    Nonnegative,
}

impl BoundCoefficient {
    pub fn factor(self) -> f64 {
        match self {
            Self::General => 2.0,
            Self::Nonnegative => 1.0,
        }
    }
}

/// Both sides of the distribution inequality at one `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionBound {
    pub lambda: f64,
    /// `μ{|u| ≥ λ}`.
    pub lhs: f64,
    /// `c λ⁻¹ ∫ g 1{ℳv > αλ}`.
    pub rhs: f64,
    /// Whether `λ` is at or above [`truncation_threshold`].
    pub in_regime: bool,
}

impl DistributionBound {
    pub fn holds(&self) -> bool {
        self.lhs - self.rhs <= PREMISE_TOLERANCE * self.rhs.max(self.lhs).max(f64::MIN_POSITIVE)
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Smallest `λ` for which no coarsest-level average of `v` exceeds `αλ`.
/// Below it the stopping time may fire on the coarsest level, where the
/// finite filtration has no parent to control the average.
pub fn truncation_threshold(filtration: &PartitionFiltration, v: &WeightedFunction) -> Result<f64> {
    let alpha = AlphaConstant::from_regularity(filtration.regularity()).value();
    Ok(filtration.coarsest_max_average(v)?.max(0.0) / alpha)
}

/// Evaluates both sides of `|{|u| ≥ λ}| ≤ c λ⁻¹ ∫ g 1{ℳv > αλ}`.
pub fn distribution_bound(
    filtration: &PartitionFiltration,
    t: &FsTriple,
    lambda: f64,
    coefficient: BoundCoefficient,
) -> Result<DistributionBound> {
    let maximal_v = filtration.dyadic_maximal(&t.v)?;
    distribution_bound_with_maximal(filtration, t, &maximal_v, lambda, coefficient)
}

/// As [`distribution_bound`], reusing a precomputed `ℳv`.
pub fn distribution_bound_with_maximal(
    filtration: &PartitionFiltration,
    t: &FsTriple,
    maximal_v: &WeightedFunction,
    lambda: f64,
    coefficient: BoundCoefficient,
) -> Result<DistributionBound> {
    if !(lambda > 0.0) {
        return Err(SharpError::NonPositiveLambda(lambda));
    }
    let alpha = AlphaConstant::from_regularity(filtration.regularity()).value();
    let space = filtration.space();
    let lhs = t.u.measure_where(space, |x| x.abs() >= lambda);
    let integral: f64 = t
        .g
        .values()
        .iter()
        .zip(maximal_v.values())
        .zip(space.weights())
        .filter(|((_, &m), _)| m > alpha * lambda)
        .map(|((&g, _), &w)| g * w)
        .sum();
    let threshold = truncation_threshold(filtration, &t.v)?;
    Ok(DistributionBound {
        lambda,
        lhs,
        rhs: coefficient.factor() * integral / lambda,
        in_regime: lambda >= threshold,
    })
}

/// `‖u‖_p^p` computed as the finite layer-cake sum
/// `Σ_k (t_k − t_{k−1}) μ{|u|^p ≥ t_k}` over the sorted distinct values
/// `t_k` of `|u|^p`.
pub fn layer_cake_pth_power(filtration: &PartitionFiltration, u: &WeightedFunction, p: f64) -> f64 {
    let mut pairs: Vec<(f64, f64)> = u
        .values()
        .iter()
        .zip(filtration.weights())
        .map(|(x, &w)| (x.abs().powf(p), w))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // suffix measure: μ{|u|^p ≥ t_k}
    let mut total = 0.0;
    let mut prev = 0.0;
    let mut tail: f64 = pairs.iter().map(|(_, w)| w).sum();
    let mut i = 0;
    while i < pairs.len() {
        let t = pairs[i].0;
        total += (t - prev) * tail;
        let mut j = i;
        while j < pairs.len() && pairs[j].0 == t {
            tail -= pairs[j].1;
            j += 1;
        }
        prev = t;
        i = j;
    }
    total
}

/// Both sides of `‖u‖_p^p ≤ N ‖g‖_p ‖v‖_p^{p−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBound {
    pub p: f64,
    /// `‖u‖_p^p`.
    pub lhs: f64,
    /// `N ‖g‖_p ‖v‖_p^{p−1}`.
    pub rhs: f64,
    /// `N = 2 q^p α^{1−p}`.
    pub constant: f64,
    /// The intermediate `2 q α^{1−p} ∫ g (ℳv)^{p−1}`.
    pub intermediate: f64,
}

impl NormBound {
    pub fn holds(&self) -> bool {
        self.lhs - self.rhs <= PREMISE_TOLERANCE * self.rhs.max(self.lhs).max(f64::MIN_POSITIVE)
    }
}

/// `N(p, N₀) = 2 q^p α^{1−p}` with `q = p/(p−1)` and `α = (2N₀)⁻¹`.
pub fn fs_constant(p: f64, n0: f64) -> f64 {
    let q = p / (p - 1.0);
    let alpha = AlphaConstant::from_regularity(n0).value();
    2.0 * q.powf(p) * alpha.powf(1.0 - p)
}

pub fn fs_norm_bound(filtration: &PartitionFiltration, t: &FsTriple, p: f64) -> Result<NormBound> {
    if !(p > 1.0) {
        return Err(SharpError::InvalidExponent(p));
    }
    FsTriple::new(filtration, t.u.clone(), t.v.clone(), t.g.clone())?;
    let n0 = filtration.regularity();
    let q = p / (p - 1.0);
    let alpha = AlphaConstant::from_regularity(n0).value();
    let space = filtration.space();
    let maximal_v = filtration.dyadic_maximal(&t.v)?;
    let lhs = layer_cake_pth_power(filtration, &t.u, p);
    let weighted: f64 = t
        .g
        .values()
        .iter()
        .zip(maximal_v.values())
        .zip(space.weights())
        .map(|((&g, &m), &w)| g * m.powf(p - 1.0) * w)
        .sum();
    let constant = fs_constant(p, n0);
    Ok(NormBound {
        p,
        lhs,
        rhs: constant * t.g.lp_norm(space, p) * t.v.lp_norm(space, p).powf(p - 1.0),
        constant,
        intermediate: 2.0 * q * alpha.powf(1.0 - p) * weighted,
    })
}

/// Which premise a generated triple satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PremiseMode {
    Monotone,
    Sharp,
}

impl std::fmt::Display for PremiseMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Monotone => "monotone",
            Self::Sharp => "sharp",
        })
    }
}

/// Smallest pointwise `g` of the form `max_{C ∋ x} D(C)/|C|` for given
/// per-level, per-cell demands `D(C)`; it satisfies `∫_C g ≥ D(C)` for every
/// cell because `g ≥ D(C)/|C|` on `C`.
pub fn admissible_g_from_demands(
    filtration: &PartitionFiltration,
    demand: impl Fn(usize) -> Vec<f64>,
) -> Vec<f64> {
    let mut g = vec![0.0f64; filtration.atom_count()];
    for li in 0..filtration.level_count() {
        let d = demand(li);
        let measures = filtration.level_measures(li);
        for (a, &c) in filtration.level_cells_of(li).iter().enumerate() {
            let c = c as usize;
            g[a] = g[a].max(d[c] / measures[c]);
        }
    }
    g
}

/// A random triple (and majorant family for the sharp mode) satisfying the
/// requested premise by construction.
///
/// `v ≥ 0` is drawn on the original atoms and zero on padding atoms; in the
/// monotone mode `u = a·v` with `a ∈ [0,1]`, in the sharp mode `u = s·a·v`
/// with random signs `s` and majorants `u^C = |u| + b_C (v − |u|)`. `g` is the
/// admissible function from [`admissible_g_from_demands`], inflated
/// pointwise by a factor in `[1, 2)`.
pub fn random_triple<R: Rng + ?Sized>(
    filtration: &PartitionFiltration,
    mode: PremiseMode,
    rng: &mut R,
) -> (FsTriple, Option<MajorantFamily>) {
    let atoms = filtration.atom_count();
    let live = atoms - filtration.padded_atoms();
    let mut v = vec![0.0; atoms];
    let mut u = vec![0.0; atoms];
    for a in 0..live {
        // heavy-ish tail so level sets at many heights are populated
        let r: f64 = rng.random();
        v[a] = if rng.random_bool(0.2) { 0.0 } else { r * r * 10.0 };
        let frac: f64 = rng.random();
        u[a] = frac * v[a];
        if mode == PremiseMode::Sharp && rng.random_bool(0.5) {
            u[a] = -u[a];
        }
    }
    let u = WeightedFunction::new(u).expect("finite");
    let v = WeightedFunction::new(v).expect("finite");
    let scratch = FsTriple {
        u: u.clone(),
        v: v.clone(),
        g: WeightedFunction::zeros(atoms),
    };
    let (g, majorants) = match mode {
        PremiseMode::Monotone => (
            admissible_g_from_demands(filtration, |li| monotone_lhs_at(filtration, &scratch, li)),
            None,
        ),
        PremiseMode::Sharp => {
            let levels: Vec<Vec<f64>> = (0..filtration.level_count())
                .map(|li| {
                    let cells = filtration.level_cells_of(li);
                    let cell_count = filtration.level_measures(li).len();
                    let blend: Vec<f64> = (0..cell_count).map(|_| rng.random::<f64>()).collect();
                    cells
                        .iter()
                        .enumerate()
                        .map(|(a, &c)| {
                            let au = u.values()[a].abs();
                            (au + blend[c as usize] * (v.values()[a] - au)).min(v.values()[a])
                        })
                        .collect()
                })
                .collect();
            let majorants = MajorantFamily { levels };
            let g = admissible_g_from_demands(filtration, |li| {
                sharp_lhs_at(filtration, &scratch, &majorants, li)
            });
            (g, Some(majorants))
        }
    };
    let g: Vec<f64> = g
        .into_iter()
        .map(|x| x * (1.0 + rng.random::<f64>()))
        .collect();
    let triple = FsTriple {
        u,
        v,
        g: WeightedFunction::new(g).expect("finite"),
    };
    (triple, majorants)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::AtomSpace;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_atoms() -> PartitionFiltration {
        PartitionFiltration::from_cells(
            AtomSpace::uniform(2, 0.5).unwrap(),
            0,
            &[vec![vec![0, 1]], vec![vec![0], vec![1]]],
        )
        .unwrap()
    }

    #[test]
    fn sharp_function_hand_example() {
        let filt = two_atoms();
        let u = WeightedFunction::new(vec![1.0, -1.0]).unwrap();
        assert_eq!(sharp_function(&filt, &u).unwrap().values(), &[1.0, 1.0]);
        let c = WeightedFunction::constant(2, 5.0);
        assert_eq!(sharp_function(&filt, &c).unwrap().values(), &[0.0, 0.0]);
    }

    #[test]
    fn constant_for_p2_n0_2() {
        assert_eq!(fs_constant(2.0, 2.0), 32.0);
        assert_eq!(AlphaConstant::from_regularity(2.0).value(), 0.25);
    }

    #[test]
    fn monotone_premise_trivial_cases() {
        let filt = PartitionFiltration::dyadic(1, 3).unwrap();
        let c = WeightedFunction::constant(8, 2.0);
        let t = FsTriple::new(&filt, c.clone(), c.clone(), WeightedFunction::zeros(8)).unwrap();
        assert!(check_premise_monotone(&filt, &t).unwrap().holds);
    }

    #[test]
    fn remark_g_half_sharp_with_u_equal_v() {
        let filt = PartitionFiltration::dyadic(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let v = WeightedFunction::new((0..64).map(|_| rng.random::<f64>() * 4.0).collect()).unwrap();
            let g = sharp_function(&filt, &v).unwrap().scale(0.5);
            let t = FsTriple::new(&filt, v.clone(), v, g).unwrap();
            let report = check_premise_monotone(&filt, &t).unwrap();
            assert!(report.holds, "excess {}", report.worst_excess);
        }
    }

    #[test]
    fn premise_failure_reports_worst_cell() {
        let filt = two_atoms();
        let u = WeightedFunction::new(vec![2.0, 0.0]).unwrap();
        let v = WeightedFunction::new(vec![2.0, 0.0]).unwrap();
        let t = FsTriple::new(&filt, u, v, WeightedFunction::zeros(2)).unwrap();
        let report = check_premise_monotone(&filt, &t).unwrap();
        assert!(!report.holds);
        assert_eq!(report.worst, Some(CellRef { level: 0, cell: 0 }));
        assert!((report.worst_excess - 0.5).abs() < 1e-15);
    }

    #[test]
    fn invariants_and_errors() {
        let filt = two_atoms();
        let bad_g = WeightedFunction::new(vec![-1.0, 0.0]).unwrap();
        let z = WeightedFunction::zeros(2);
        assert!(FsTriple::new(&filt, z.clone(), z.clone(), bad_g).is_err());
        assert!(FsTriple::new(&filt, WeightedFunction::zeros(3), z.clone(), z.clone()).is_err());
        let u = WeightedFunction::new(vec![2.0, 0.0]).unwrap();
        let t = FsTriple::new(&filt, u, z.clone(), z.clone()).unwrap();
        assert!(matches!(check_premise_monotone(&filt, &t), Err(SharpError::Invariant { .. })));
        let t = FsTriple::new(&filt, z.clone(), z.clone(), z).unwrap();
        assert!(matches!(
            distribution_bound(&filt, &t, 0.0, BoundCoefficient::General),
            Err(SharpError::NonPositiveLambda(_))
        ));
        assert!(matches!(fs_norm_bound(&filt, &t, 1.0), Err(SharpError::InvalidExponent(_))));
    }

    #[test]
    fn lambda_above_max_gives_empty_level_set() {
        let filt = PartitionFiltration::dyadic(1, 4).unwrap().pad_with_zero_levels(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (t, _) = random_triple(&filt, PremiseMode::Monotone, &mut rng);
        let b = distribution_bound(&filt, &t, t.u.max() * 1.5 + 1.0, BoundCoefficient::General).unwrap();
        assert_eq!(b.lhs, 0.0);
        assert!(b.holds());
    }

    #[test]
    fn zero_u_norm_bound() {
        let filt = PartitionFiltration::dyadic(1, 3).unwrap();
        let z = WeightedFunction::zeros(8);
        let t = FsTriple::new(&filt, z.clone(), WeightedFunction::constant(8, 1.0), z).unwrap();
        let b = fs_norm_bound(&filt, &t, 3.0).unwrap();
        assert_eq!(b.lhs, 0.0);
        assert!(b.holds());
    }

    #[test]
    fn generated_triples_satisfy_their_premise() {
        let filt = PartitionFiltration::dyadic(2, 2).unwrap().pad_with_zero_levels(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (t, _) = random_triple(&filt, PremiseMode::Monotone, &mut rng);
            assert!(check_premise_monotone(&filt, &t).unwrap().holds);
            let (t, m) = random_triple(&filt, PremiseMode::Sharp, &mut rng);
            assert!(check_premise_sharp(&filt, &t, m.as_ref().unwrap()).unwrap().holds);
        }
    }

    #[test]
    fn sharp_premise_trivial_cases() {
        let filt = PartitionFiltration::dyadic(1, 3).unwrap();
        let u = WeightedFunction::constant(8, -2.0);
        let v = WeightedFunction::constant(8, 2.0);
        let t = FsTriple::new(&filt, u.clone(), v, WeightedFunction::zeros(8)).unwrap();
        let m = MajorantFamily::trivial(&filt, &u);
        assert!(check_premise_sharp(&filt, &t, &m).unwrap().holds);
    }

    #[test]
    fn layer_cake_small_case() {
        let filt = two_atoms();
        let u = WeightedFunction::new(vec![2.0, -1.0]).unwrap();
        // (0.5 * 8 + 0.5 * 1) for p = 3
        assert!((layer_cake_pth_power(&filt, &u, 3.0) - 4.5).abs() < 1e-15);
    }
}
