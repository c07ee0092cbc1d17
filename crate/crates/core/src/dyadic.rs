//! Finite measure spaces with filtrations of partitions.
//!
//! An [`AtomSpace`] is a finite set of atoms with positive weights. A
//! [`PartitionFiltration`] is a nested sequence of partitions of the atoms,
//! indexed by consecutive integer levels `n_min..=n_max` from coarse to fine,
//! whose finest level consists of singletons. Functions on the atoms are
//! [`WeightedFunction`]s.
//!
//! Averages over sets of zero measure are taken to be zero.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on the number of atoms a filtration may hold unless the caller
/// asks for a different cap.
pub const DEFAULT_ATOM_CAP: usize = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DyadicError {
    #[error("function has {got} values but the space has {expected} atoms")]
    LengthMismatch { expected: usize, got: usize },
    #[error("level {n} outside the filtration range {n_min}..={n_max}")]
    LevelOutOfRange { n: i32, n_min: i32, n_max: i32 },
    #[error("{requested} atoms exceed the configured cap of {cap}")]
    AtomCap { requested: usize, cap: usize },
    #[error("atom {index} has non-positive or non-finite weight {weight}")]
    InvalidWeight { index: usize, weight: f64 },
    #[error("value at atom {index} is not finite")]
    NonFinite { index: usize },
    #[error("level {level} is not a partition of the atoms: {reason}")]
    NotAPartition { level: usize, reason: String },
    #[error("cell {cell} of level {level} is not contained in a single parent cell")]
    NotNested { level: usize, cell: usize },
    #[error("the finest level must consist of single atoms")]
    FinestNotSingletons,
    #[error("invalid shape: {0}")]
    InvalidShape(String),
}

pub type Result<T> = std::result::Result<T, DyadicError>;

/// Atoms with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpace {
    weights: Vec<f64>,
}

impl AtomSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(DyadicError::InvalidShape("empty atom space".into()));
        }
        for (index, &weight) in weights.iter().enumerate() {
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(DyadicError::InvalidWeight { index, weight });
            }
        }
        Ok(Self { weights })
    }

    pub fn uniform(atoms: usize, weight: f64) -> Result<Self> {
        Self::new(vec![weight; atoms])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Real values on the atoms of a space.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedFunction {
    values: Vec<f64>,
}

impl WeightedFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(DyadicError::NonFinite { index });
        }
        Ok(Self { values })
    }

    pub fn constant(atoms: usize, value: f64) -> Self {
        Self {
            values: vec![value; atoms],
        }
    }

    pub fn zeros(atoms: usize) -> Self {
        Self::constant(atoms, 0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.len(), other.len(), "zip_with on functions of different length");
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Appends `extra` zero values, matching the atoms added by
    /// [`PartitionFiltration::pad_with_zero_levels`].
    pub fn zero_extended(&self, extra: usize) -> Self {
        let mut values = self.values.clone();
        values.resize(values.len() + extra, 0.0);
        Self { values }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn integral(&self, space: &AtomSpace) -> f64 {
        self.values
            .iter()
            .zip(space.weights())
            .map(|(v, w)| v * w)
            .sum()
    }

    /// `(Σ |f|^p w)^{1/p}`.
    pub fn lp_norm(&self, space: &AtomSpace, p: f64) -> f64 {
        self.lp_norm_pow(space, p).powf(1.0 / p)
    }

    /// `Σ |f|^p w`.
    pub fn lp_norm_pow(&self, space: &AtomSpace, p: f64) -> f64 {
        self.values
            .iter()
            .zip(space.weights())
            .map(|(v, w)| v.abs().powf(p) * w)
            .sum()
    }

    /// Measure of `{x : pred(f(x))}`.
    pub fn measure_where(&self, space: &AtomSpace, pred: impl Fn(f64) -> bool) -> f64 {
        self.values
            .iter()
            .zip(space.weights())
            .filter(|(v, _)| pred(**v))
            .map(|(_, w)| w)
            .sum()
    }
}

/// One partition of the atoms together with its link to the coarser level.
#[derive(Debug, Clone, PartialEq)]
struct Level {
    cell_of: Vec<u32>,
    measures: Vec<f64>,
    /// Parent cell index in the previous (coarser) level; empty for the
    /// coarsest level.
    parents: Vec<u32>,
}

impl Level {
    fn cell_count(&self) -> usize {
        self.measures.len()
    }
}

/// Nested partitions `ℂ_{n_min}, …, ℂ_{n_max}` of an [`AtomSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionFiltration {
    space: AtomSpace,
    n_min: i32,
    levels: Vec<Level>,
    regularity: f64,
    /// Number of atoms appended by zero-padding (they sit at the end).
    padded_atoms: usize,
}

/// Per-atom stopping level, `None` standing for `∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct StoppingTimeMap {
    levels: Vec<Option<i32>>,
}

impl StoppingTimeMap {
    pub fn new(levels: Vec<Option<i32>>) -> Self {
        Self { levels }
    }

    pub fn constant(atoms: usize, level: Option<i32>) -> Self {
        Self {
            levels: vec![level; atoms],
        }
    }

    pub fn levels(&self) -> &[Option<i32>] {
        &self.levels
    }

    pub fn get(&self, atom: usize) -> Option<i32> {
        self.levels[atom]
    }

    pub fn is_finite_at(&self, atom: usize) -> bool {
        self.levels[atom].is_some()
    }
}

/// JSON form of a filtration: `{"weights": [...], "levels": [[[atoms]...]...]}`
/// with levels listed from coarse to fine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiltrationJson {
    pub weights: Vec<f64>,
    pub levels: Vec<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_min: Option<i32>,
}

impl PartitionFiltration {
    /// Builds a filtration from explicit cell lists, coarse to fine.
    ///
    /// The regularity constant is the largest parent/child measure ratio.
    pub fn from_cells(space: AtomSpace, n_min: i32, cells: &[Vec<Vec<usize>>]) -> Result<Self> {
        if cells.is_empty() {
            return Err(DyadicError::InvalidShape("no levels".into()));
        }
        let atoms = space.len();
        let mut levels: Vec<Level> = Vec::with_capacity(cells.len());
        for (li, level_cells) in cells.iter().enumerate() {
            let mut cell_of = vec![u32::MAX; atoms];
            let mut measures = Vec::with_capacity(level_cells.len());
            for (ci, cell) in level_cells.iter().enumerate() {
                if cell.is_empty() {
                    return Err(DyadicError::NotAPartition {
                        level: li,
                        reason: format!("cell {ci} is empty"),
                    });
                }
                let mut m = 0.0;
                for &a in cell {
                    if a >= atoms {
                        return Err(DyadicError::NotAPartition {
                            level: li,
                            reason: format!("atom index {a} out of range"),
                        });
                    }
                    if cell_of[a] != u32::MAX {
                        return Err(DyadicError::NotAPartition {
                            level: li,
                            reason: format!("atom {a} appears in two cells"),
                        });
                    }
                    cell_of[a] = ci as u32;
                    m += space.weights()[a];
                }
                measures.push(m);
            }
            if let Some(a) = cell_of.iter().position(|&c| c == u32::MAX) {
                return Err(DyadicError::NotAPartition {
                    level: li,
                    reason: format!("atom {a} is not covered"),
                });
            }
            let parents = match levels.last() {
                None => Vec::new(),
                Some(prev) => {
                    let mut parents = vec![u32::MAX; level_cells.len()];
                    for (a, &c) in cell_of.iter().enumerate() {
                        let p = prev.cell_of[a];
                        let slot = &mut parents[c as usize];
                        if *slot == u32::MAX {
                            *slot = p;
                        } else if *slot != p {
                            return Err(DyadicError::NotNested {
                                level: li,
                                cell: c as usize,
                            });
                        }
                    }
                    parents
                }
            };
            levels.push(Level {
                cell_of,
                measures,
                parents,
            });
        }
        if levels.last().map(|l| l.cell_count()) != Some(atoms) {
            return Err(DyadicError::FinestNotSingletons);
        }
        let mut filtration = Self {
            space,
            n_min,
            levels,
            regularity: 1.0,
            padded_atoms: 0,
        };
        filtration.regularity = filtration.measured_regularity();
        Ok(filtration)
    }

    pub fn from_json(json: &FiltrationJson) -> Result<Self> {
        let space = AtomSpace::new(json.weights.clone())?;
        Self::from_cells(space, json.n_min.unwrap_or(0), &json.levels)
    }

    pub fn to_json(&self) -> FiltrationJson {
        FiltrationJson {
            weights: self.space.weights().to_vec(),
            levels: (0..self.levels.len()).map(|li| self.cells_at_index(li)).collect(),
            n_min: Some(self.n_min),
        }
    }

    /// Dyadic cubes of `[0,1)^d` at levels `0..=depth` with Lebesgue weights.
    ///
    /// Atom `Σ_k i_k 2^{depth·k}` is the finest cube with integer corner
    /// `(i_1, …, i_d)`. The regularity constant is `2^d`.
    pub fn dyadic(d: usize, depth: usize) -> Result<Self> {
        Self::dyadic_with_cap(d, depth, DEFAULT_ATOM_CAP)
    }

    pub fn dyadic_with_cap(d: usize, depth: usize, cap: usize) -> Result<Self> {
        if d == 0 || depth == 0 {
            return Err(DyadicError::InvalidShape(
                "dimension and depth must be at least 1".into(),
            ));
        }
        let bits = d.checked_mul(depth).filter(|&b| b < usize::BITS as usize - 1);
        let atoms = match bits {
            Some(b) => 1usize << b,
            None => {
                return Err(DyadicError::AtomCap {
                    requested: usize::MAX,
                    cap,
                })
            }
        };
        if atoms > cap {
            return Err(DyadicError::AtomCap {
                requested: atoms,
                cap,
            });
        }
        let weight = (0.5f64).powi((d * depth) as i32);
        let space = AtomSpace::uniform(atoms, weight)?;
        let side = 1usize << depth;
        let mut levels = Vec::with_capacity(depth + 1);
        for n in 0..=depth {
            let shift = depth - n;
            let cells_per_axis = 1usize << n;
            let cell_of: Vec<u32> = (0..atoms)
                .map(|a| {
                    let mut rem = a;
                    let mut cell = 0usize;
                    let mut stride = 1usize;
                    for _ in 0..d {
                        let coord = rem % side;
                        rem /= side;
                        cell += (coord >> shift) * stride;
                        stride *= cells_per_axis;
                    }
                    cell as u32
                })
                .collect();
            let cell_count = cells_per_axis.pow(d as u32);
            let measures = vec![(0.5f64).powi((d * n) as i32); cell_count];
            let parents = if n == 0 {
                Vec::new()
            } else {
                (0..cell_count)
                    .map(|c| {
                        let mut rem = c;
                        let mut parent = 0usize;
                        let mut stride = 1usize;
                        for _ in 0..d {
                            let coord = rem % cells_per_axis;
                            rem /= cells_per_axis;
                            parent += (coord >> 1) * stride;
                            stride *= cells_per_axis >> 1;
                        }
                        parent as u32
                    })
                    .collect()
            };
            levels.push(Level {
                cell_of,
                measures,
                parents,
            });
        }
        Ok(Self {
            space,
            n_min: 0,
            levels,
            regularity: (1u64 << d) as f64,
            padded_atoms: 0,
        })
    }

    /// A `branching`-ary tree of the given depth with caller-supplied atom
    /// weights (`branching^depth` of them). Useful for non-uniform
    /// filtrations whose regularity exceeds the branching factor.
    pub fn tree(branching: usize, depth: usize, weights: Vec<f64>) -> Result<Self> {
        if branching < 2 || depth == 0 {
            return Err(DyadicError::InvalidShape(
                "tree needs branching >= 2 and depth >= 1".into(),
            ));
        }
        let atoms = branching.pow(depth as u32);
        if weights.len() != atoms {
            return Err(DyadicError::LengthMismatch {
                expected: atoms,
                got: weights.len(),
            });
        }
        let space = AtomSpace::new(weights)?;
        let cells: Vec<Vec<Vec<usize>>> = (0..=depth)
            .map(|n| {
                let block = branching.pow((depth - n) as u32);
                (0..atoms / block)
                    .map(|c| (c * block..(c + 1) * block).collect())
                    .collect()
            })
            .collect();
        Self::from_cells(space, 0, &cells)
    }

    pub fn space(&self) -> &AtomSpace {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        self.space.weights()
    }

    pub fn atom_count(&self) -> usize {
        self.space.len()
    }

    pub fn n_min(&self) -> i32 {
        self.n_min
    }

    pub fn n_max(&self) -> i32 {
        self.n_min + self.levels.len() as i32 - 1
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Regularity constant `N₀`: every parent cell has measure at most `N₀`
    /// times the measure of each of its children.
    pub fn regularity(&self) -> f64 {
        self.regularity
    }

    /// Atoms appended by zero-padding.
    pub fn padded_atoms(&self) -> usize {
        self.padded_atoms
    }

    /// Largest parent/child measure ratio actually present (1 if there is a
    /// single level).
    pub fn measured_regularity(&self) -> f64 {
        let mut worst: f64 = 1.0;
        for w in self.levels.windows(2) {
            let (coarse, fine) = (&w[0], &w[1]);
            for (c, &p) in fine.parents.iter().enumerate() {
                worst = worst.max(coarse.measures[p as usize] / fine.measures[c]);
            }
        }
        worst
    }

    fn level_index(&self, n: i32) -> Result<usize> {
        if n < self.n_min || n > self.n_max() {
            return Err(DyadicError::LevelOutOfRange {
                n,
                n_min: self.n_min,
                n_max: self.n_max(),
            });
        }
        Ok((n - self.n_min) as usize)
    }

    fn check_len(&self, f: &WeightedFunction) -> Result<()> {
        if f.len() != self.atom_count() {
            return Err(DyadicError::LengthMismatch {
                expected: self.atom_count(),
                got: f.len(),
            });
        }
        Ok(())
    }

    pub fn cell_count(&self, n: i32) -> Result<usize> {
        Ok(self.levels[self.level_index(n)?].cell_count())
    }

    /// Index of `C_n(atom)` within level `n`.
    pub fn cell_of(&self, n: i32, atom: usize) -> Result<usize> {
        Ok(self.levels[self.level_index(n)?].cell_of[atom] as usize)
    }

    pub fn cell_measure(&self, n: i32, cell: usize) -> Result<f64> {
        Ok(self.levels[self.level_index(n)?].measures[cell])
    }

    /// Parent of `cell` (at level `n`) in level `n - 1`; `None` at the
    /// coarsest level.
    pub fn parent(&self, n: i32, cell: usize) -> Result<Option<usize>> {
        let level = &self.levels[self.level_index(n)?];
        Ok(level.parents.get(cell).map(|&p| p as usize))
    }

    /// Atom lists of each cell of level `n`.
    pub fn cells(&self, n: i32) -> Result<Vec<Vec<usize>>> {
        Ok(self.cells_at_index(self.level_index(n)?))
    }

    fn cells_at_index(&self, li: usize) -> Vec<Vec<usize>> {
        let level = &self.levels[li];
        let mut cells = vec![Vec::new(); level.cell_count()];
        for (a, &c) in level.cell_of.iter().enumerate() {
            cells[c as usize].push(a);
        }
        cells
    }

    /// Raw per-level cell assignment; `levels[k]` corresponds to level
    /// `n_min + k`.
    pub(crate) fn level_cells_of(&self, li: usize) -> &[u32] {
        &self.levels[li].cell_of
    }

    pub(crate) fn level_measures(&self, li: usize) -> &[f64] {
        &self.levels[li].measures
    }

    /// Per-cell integrals `∫_C f dμ` at internal level index `li`.
    pub(crate) fn cell_integrals_at(&self, values: &[f64], li: usize) -> Vec<f64> {
        let level = &self.levels[li];
        let mut sums = vec![0.0; level.cell_count()];
        for ((&c, &v), &w) in level.cell_of.iter().zip(values).zip(self.weights()) {
            sums[c as usize] += v * w;
        }
        sums
    }

    /// Per-cell averages `f_C` at internal level index `li`.
    pub(crate) fn cell_averages_at(&self, values: &[f64], li: usize) -> Vec<f64> {
        let mut sums = self.cell_integrals_at(values, li);
        for (s, &m) in sums.iter_mut().zip(&self.levels[li].measures) {
            *s = if m > 0.0 { *s / m } else { 0.0 };
        }
        sums
    }

    /// Per-cell averages of `f` over the cells of level `n`.
    pub fn cell_averages(&self, f: &WeightedFunction, n: i32) -> Result<Vec<f64>> {
        self.check_len(f)?;
        Ok(self.cell_averages_at(f.values(), self.level_index(n)?))
    }

    /// `f_{|n}(x)`: the average of `f` over `C_n(x)`.
    pub fn conditional_average(&self, f: &WeightedFunction, n: i32) -> Result<WeightedFunction> {
        self.check_len(f)?;
        let li = self.level_index(n)?;
        let avg = self.cell_averages_at(f.values(), li);
        Ok(WeightedFunction {
            values: self.levels[li]
                .cell_of
                .iter()
                .map(|&c| avg[c as usize])
                .collect(),
        })
    }

    /// `τ(x) = min{ n : g_{|n}(x) > λ }`, or `∞` when no level exceeds `λ`.
    pub fn stopping_time_first_exceed(
        &self,
        g: &WeightedFunction,
        lambda: f64,
    ) -> Result<StoppingTimeMap> {
        self.check_len(g)?;
        let mut tau: Vec<Option<i32>> = vec![None; self.atom_count()];
        for li in 0..self.levels.len() {
            let avg = self.cell_averages_at(g.values(), li);
            let n = self.n_min + li as i32;
            for (a, &c) in self.levels[li].cell_of.iter().enumerate() {
                if tau[a].is_none() && avg[c as usize] > lambda {
                    tau[a] = Some(n);
                }
            }
        }
        Ok(StoppingTimeMap { levels: tau })
    }

    /// Checks that `{τ = n}` is a union of whole cells of level `n` for every
    /// `n`, and that every finite value lies in the level range.
    pub fn is_stopping_time(&self, tau: &StoppingTimeMap) -> bool {
        if tau.levels.len() != self.atom_count() {
            return false;
        }
        if tau
            .levels
            .iter()
            .flatten()
            .any(|&n| n < self.n_min || n > self.n_max())
        {
            return false;
        }
        for (li, level) in self.levels.iter().enumerate() {
            let n = self.n_min + li as i32;
            // 0 = unseen, 1 = all atoms stop here, 2 = none stop here
            let mut state = vec![0u8; level.cell_count()];
            for (a, &c) in level.cell_of.iter().enumerate() {
                let here = if tau.levels[a] == Some(n) { 1 } else { 2 };
                let s = &mut state[c as usize];
                if *s == 0 {
                    *s = here;
                } else if *s != here {
                    return false;
                }
            }
        }
        true
    }

    /// `f_{|τ}`: `f_{|τ(x)}(x)` where `τ(x) < ∞`, else `f(x)`.
    pub fn evaluate_given_tau(
        &self,
        f: &WeightedFunction,
        tau: &StoppingTimeMap,
    ) -> Result<WeightedFunction> {
        self.check_len(f)?;
        if tau.levels.len() != self.atom_count() {
            return Err(DyadicError::LengthMismatch {
                expected: self.atom_count(),
                got: tau.levels.len(),
            });
        }
        let mut out = f.values.clone();
        for li in 0..self.levels.len() {
            let n = self.n_min + li as i32;
            if !tau.levels.contains(&Some(n)) {
                continue;
            }
            let avg = self.cell_averages_at(f.values(), li);
            for (a, &c) in self.levels[li].cell_of.iter().enumerate() {
                if tau.levels[a] == Some(n) {
                    out[a] = avg[c as usize];
                }
            }
        }
        Ok(WeightedFunction { values: out })
    }

    /// Dyadic maximal function `ℳf = sup_n |f|_{|n}`.
    pub fn dyadic_maximal(&self, f: &WeightedFunction) -> Result<WeightedFunction> {
        self.check_len(f)?;
        let abs: Vec<f64> = f.values.iter().map(|v| v.abs()).collect();
        let mut out = vec![f64::NEG_INFINITY; self.atom_count()];
        for li in 0..self.levels.len() {
            let avg = self.cell_averages_at(&abs, li);
            for (o, &c) in out.iter_mut().zip(&self.levels[li].cell_of) {
                *o = o.max(avg[c as usize]);
            }
        }
        Ok(WeightedFunction { values: out })
    }

    /// Largest average over the coarsest cells.
    pub fn coarsest_max_average(&self, f: &WeightedFunction) -> Result<f64> {
        self.check_len(f)?;
        Ok(self
            .cell_averages_at(f.values(), 0)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Prepends `k` coarser levels. Each new level joins everything present
    /// so far with one fresh atom carrying the same total measure, so the
    /// total measure doubles per level and averages of zero-extended
    /// functions over the new coarse cells halve. The fresh atoms are
    /// appended at the end of the atom list and remain singleton cells on
    /// every finer level.
    pub fn pad_with_zero_levels(&self, k: usize) -> Result<Self> {
        self.pad_with_zero_levels_capped(k, DEFAULT_ATOM_CAP)
    }

    pub fn pad_with_zero_levels_capped(&self, k: usize, cap: usize) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        let old_atoms = self.atom_count();
        let new_atoms = old_atoms + k;
        if new_atoms > cap {
            return Err(DyadicError::AtomCap {
                requested: new_atoms,
                cap,
            });
        }
        let mut weights = self.weights().to_vec();
        let mut total = self.space.total_measure();
        for _ in 0..k {
            weights.push(total);
            total *= 2.0;
        }
        // Pad atom j (0-based) is created by the j-th new level counting
        // outward, i.e. it first appears inside the cell of level n_min - 1 - j.
        let mut levels: Vec<Level> = Vec::with_capacity(self.levels.len() + k);
        for outer in (0..k).rev() {
            // Level n_min - 1 - outer: one cell of all old atoms and pad
            // atoms 0..=outer, plus singletons for the later pad atoms.
            let singles = k - 1 - outer;
            let mut cell_of = vec![0u32; new_atoms];
            let mut measures = vec![0.0];
            for j in (outer + 1)..k {
                cell_of[old_atoms + j] = measures.len() as u32;
                measures.push(weights[old_atoms + j]);
            }
            measures[0] = self.space.total_measure()
                * (0..=outer).fold(1.0, |acc, _| acc * 2.0);
            debug_assert_eq!(measures.len(), singles + 1);
            let parents = if levels.is_empty() {
                Vec::new()
            } else {
                // The big cell's parent is the big cell; singleton j's parent is
                // the big cell if j == outer + 1, otherwise its own singleton.
                let prev = levels.last().expect("non-empty");
                (0..measures.len())
                    .map(|c| {
                        if c == 0 {
                            0
                        } else {
                            let atom = old_atoms + outer + c;
                            prev.cell_of[atom]
                        }
                    })
                    .collect()
            };
            levels.push(Level {
                cell_of,
                measures,
                parents,
            });
        }
        for (li, old) in self.levels.iter().enumerate() {
            let base = old.cell_count();
            let mut cell_of = old.cell_of.clone();
            cell_of.resize(new_atoms, 0);
            let mut measures = old.measures.clone();
            for j in 0..k {
                cell_of[old_atoms + j] = (base + j) as u32;
                measures.push(weights[old_atoms + j]);
            }
            let prev = levels.last().expect("padding adds at least one level");
            let parents: Vec<u32> = (0..measures.len())
                .map(|c| {
                    if c < base {
                        if li == 0 {
                            0
                        } else {
                            old.parents[c]
                        }
                    } else {
                        prev.cell_of[old_atoms + (c - base)]
                    }
                })
                .collect();
            levels.push(Level {
                cell_of,
                measures,
                parents,
            });
        }
        let mut padded = Self {
            space: AtomSpace::new(weights)?,
            n_min: self.n_min - k as i32,
            levels,
            regularity: self.regularity,
            padded_atoms: self.padded_atoms + k,
        };
        padded.regularity = self.regularity.max(padded.measured_regularity());
        Ok(padded)
    }
}
