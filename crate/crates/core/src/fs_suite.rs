//! Seeded randomized sweep over premise-satisfying triples.
//!
//! Each trial draws a dyadic filtration (8 to 64 atoms, `N₀ ∈ {2, 4}`), pads
//! it with zero levels, generates a triple in the monotone or sharp mode and
//! evaluates the distribution inequality at a ladder of `λ` values above the
//! truncation threshold plus the `L_p` bound for every requested `p`.
//! Trials are independent, seeded per trial index, and returned in trial
//! order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::PartitionFiltration;
use crate::exec;
use crate::sharp::{
    check_premise_monotone, check_premise_sharp, distribution_bound_with_maximal,
    fs_norm_bound, random_triple, truncation_threshold, BoundCoefficient, FsTriple, MajorantFamily,
    PremiseMode, SharpError,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FsSuiteConfig {
    pub trials: usize,
    pub ps: Vec<f64>,
    pub seed: u64,
    pub pad_levels: usize,
    pub lambdas_per_trial: usize,
}

impl Default for FsSuiteConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            ps: vec![2.5, 3.0, 4.0],
            seed: 7,
            pad_levels: 10,
            lambdas_per_trial: 20,
        }
    }
}

/// One checked inequality. Distribution rows carry `lambda`, norm rows `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct FsRow {
    pub trial: usize,
    pub mode: PremiseMode,
    pub p: Option<f64>,
    pub n0: f64,
    pub lambda: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub mode: PremiseMode,
    pub atoms: usize,
    pub n0: f64,
    pub premise_holds: bool,
    pub rows: Vec<FsRow>,
}

/// Dyadic shapes with 8..=64 atoms.
const SHAPES: [(usize, usize); 6] = [(1, 3), (1, 4), (1, 5), (1, 6), (2, 2), (2, 3)];

pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// `count` values of `λ` spread geometrically from the truncation threshold
/// (or 5% of `max |u|`, whichever is larger) to just above `max |u|`.
pub fn lambda_ladder(threshold: f64, max_abs_u: f64, count: usize) -> Vec<f64> {
    let hi = (max_abs_u * 1.05).max(threshold * 2.0).max(f64::MIN_POSITIVE);
    let lo = threshold.max(0.05 * max_abs_u).max(hi * 1e-6).min(hi);
    if count <= 1 {
        return vec![hi];
    }
    (0..count)
        .map(|k| lo * (hi / lo).powf(k as f64 / (count - 1) as f64))
        .collect()
}

/// Filtration, triple and majorants drawn for one trial.
#[derive(Debug, Clone)]
pub struct TrialData {
    pub mode: PremiseMode,
    pub filtration: PartitionFiltration,
    pub triple: FsTriple,
    pub majorants: Option<MajorantFamily>,
}

pub fn trial_data(config: &FsSuiteConfig, trial: usize) -> Result<TrialData, SharpError> {
    let mut rng = trial_rng(config.seed, trial);
    let (d, depth) = SHAPES[rng.random_range(0..SHAPES.len())];
    let mode = if trial % 2 == 0 {
        PremiseMode::Monotone
    } else {
        PremiseMode::Sharp
    };
    let filtration = PartitionFiltration::dyadic(d, depth)?.pad_with_zero_levels(config.pad_levels)?;
    let (triple, majorants) = random_triple(&filtration, mode, &mut rng);
    Ok(TrialData {
        mode,
        filtration,
        triple,
        majorants,
    })
}

pub fn run_trial(config: &FsSuiteConfig, trial: usize) -> Result<TrialOutcome, SharpError> {
    let TrialData {
        mode,
        filtration,
        triple,
        majorants,
    } = trial_data(config, trial)?;
    let premise = match &majorants {
        None => check_premise_monotone(&filtration, &triple)?,
        Some(m) => check_premise_sharp(&filtration, &triple, m)?,
    };
    let n0 = filtration.regularity();
    let maximal_v = filtration.dyadic_maximal(&triple.v)?;
    let threshold = truncation_threshold(&filtration, &triple.v)?;
    let max_abs_u = triple.u.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut rows = Vec::with_capacity(config.lambdas_per_trial + config.ps.len());
    for lambda in lambda_ladder(threshold, max_abs_u, config.lambdas_per_trial) {
        let b = distribution_bound_with_maximal(
            &filtration,
            &triple,
            &maximal_v,
            lambda,
            BoundCoefficient::General,
        )?;
        rows.push(FsRow {
            trial,
            mode,
            p: None,
            n0,
            lambda: Some(lambda),
            lhs: b.lhs,
            rhs: b.rhs,
            pass: b.holds() && b.in_regime,
        });
    }
    for &p in &config.ps {
        let b = fs_norm_bound(&filtration, &triple, p)?;
        rows.push(FsRow {
            trial,
            mode,
            p: Some(p),
            n0,
            lambda: None,
            lhs: b.lhs,
            rhs: b.rhs,
            pass: b.holds(),
        });
    }
    Ok(TrialOutcome {
        trial,
        mode,
        atoms: filtration.atom_count() - filtration.padded_atoms(),
        n0,
        premise_holds: premise.holds,
        rows,
    })
}

pub fn run_suite(config: &FsSuiteConfig) -> Result<Vec<TrialOutcome>, SharpError> {
    exec::map_indices(config.trials, |t| run_trial(config, t))
        .into_iter()
        .collect()
}

/// Minimum of `rhs − lhs` over all distribution rows, the "slack" reported
/// by the suite.
pub fn min_distribution_slack(outcomes: &[TrialOutcome]) -> f64 {
    outcomes
        .iter()
        .flat_map(|o| o.rows.iter())
        .filter(|r| r.lambda.is_some())
        .map(|r| r.rhs - r.lhs)
        .fold(f64::INFINITY, f64::min)
}
