use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, ValueEnum};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::Value;

use vmo_lab_core::fields::{embed_as_matrix, example_field, ExampleParams, MatrixField, ProfileKind};
use vmo_lab_core::fs_suite::{run_suite, trial_data, FsSuiteConfig};
use vmo_lab_core::oscillation::{direction_grid, gamma_profile, verify_example_bound, BallSample, FieldView};
use vmo_lab_core::solver::{
    agmon_convergence, apriori_probe, lift_weight, local_estimate_probe, smooth_random_rhs, Cutoff,
    PreconditionerKind, SolveOptions,
};

use crate::config::{digest, merge, List};
use crate::output::{opt, write_atomic, Csv};
use crate::snapshot;

pub const MAX_FIELD_RES: usize = 8192;
pub const MAX_BOUND_RES: usize = 4096;
pub const MAX_SOLVER_RES: usize = 512;
const LIFT_WEIGHT_POINTS: usize = 4000;

pub enum Status {
    Done(String),
    ChecksFailed(String),
}

/// Effective parameters with `out` removed, and their digest.
fn settle<T: Serialize + DeserializeOwned>(
    command: &str,
    flags: &T,
    config: Option<&Path>,
) -> Result<(T, String)> {
    let merged: T = merge(flags, config)?;
    let mut value = serde_json::to_value(&merged)?;
    if let Value::Object(m) = &mut value {
        m.remove("out");
    }
    Ok((merged, digest(command, &value)))
}

fn required<T>(v: Option<T>, name: &str) -> Result<T> {
    v.with_context(|| format!("missing --{name}"))
}

fn check_res(n: usize, cap: usize) -> Result<()> {
    ensure!(
        n.is_power_of_two() && (8..=cap).contains(&n),
        "resolution {n} must be a power of two in [8, {cap}]"
    );
    Ok(())
}

fn check_kappa(kappa: f64) -> Result<()> {
    ensure!(kappa >= 4.0, "kappa = {kappa} rejected: the example needs kappa >= 4");
    Ok(())
}

fn check_estimate_p(p: f64) -> Result<()> {
    ensure!(
        p > 2.0 && p.is_finite(),
        "p = {p} rejected: the W2p estimate is only available for p > 2"
    );
    Ok(())
}

fn example_params(epsilon: f64, kappa: f64, terms: Option<usize>, res: usize) -> Result<ExampleParams> {
    check_kappa(kappa)?;
    let terms = terms.unwrap_or_else(|| ExampleParams::terms_for_resolution(kappa, res));
    let params = ExampleParams::new(epsilon, kappa, terms);
    params.validate()?;
    Ok(params)
}

fn load_matrix(path: &Path, cap: usize) -> Result<MatrixField> {
    let (field, side) = snapshot::load(path)?;
    check_res(field.n(), cap)?;
    Ok(embed_as_matrix(&field, side.delta)?)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FsVerify {
    /// Number of seeded triples
    #[arg(long)]
    pub trials: Option<usize>,
    /// Exponents for the norm bound
    #[arg(long)]
    pub p: Option<List>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Zero levels added on top of each filtration
    #[arg(long)]
    pub pad_levels: Option<usize>,
    /// Distribution checks per triple
    #[arg(long)]
    pub lambdas: Option<usize>,
    /// Also write the filtrations and triples as JSON
    #[arg(long)]
    pub dump: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn fs_verify(flags: &FsVerify, config: Option<&Path>) -> Result<Status> {
    let defaults = FsSuiteConfig::default();
    let mut a = merge(flags, config)?;
    a.trials.get_or_insert(defaults.trials);
    a.p.get_or_insert(List(defaults.ps.clone()));
    a.seed.get_or_insert(defaults.seed);
    a.pad_levels.get_or_insert(defaults.pad_levels);
    a.lambdas.get_or_insert(defaults.lambdas_per_trial);
    let (a, dig) = settle("fs-verify", &a, None)?;
    let out = required(a.out.clone(), "out")?;
    let cfg = FsSuiteConfig {
        trials: a.trials.unwrap(),
        ps: a.p.clone().unwrap().0,
        seed: a.seed.unwrap(),
        pad_levels: a.pad_levels.unwrap(),
        lambdas_per_trial: a.lambdas.unwrap(),
    };
    ensure!(cfg.trials > 0, "trials must be positive");
    for &p in &cfg.ps {
        ensure!(p > 1.0 && p.is_finite(), "p = {p} rejected: the norm bound needs p > 1");
    }
    let outcomes = run_suite(&cfg)?;
    let mut csv = Csv::new(&dig, &["trial", "mode", "p", "N0", "lambda", "lhs", "rhs", "pass"]);
    let (mut rows, mut failed) = (0usize, 0usize);
    for t in &outcomes {
        for r in &t.rows {
            let mode = serde_json::to_value(r.mode)?;
            csv.row(&[
                &r.trial,
                &mode.as_str().unwrap_or_default(),
                &opt(r.p),
                &r.n0,
                &opt(r.lambda),
                &r.lhs,
                &r.rhs,
                &r.pass,
            ]);
            rows += 1;
            failed += usize::from(!r.pass);
        }
    }
    if let Some(dump) = &a.dump {
        let mut trials = Vec::with_capacity(cfg.trials);
        for k in 0..cfg.trials {
            let t = trial_data(&cfg, k)?;
            trials.push(serde_json::json!({
                "trial": k,
                "mode": t.mode,
                "filtration": t.filtration.to_json(),
                "u": t.triple.u.values(),
                "v": t.triple.v.values(),
                "g": t.triple.g.values(),
            }));
        }
        let json = serde_json::json!({ "config_digest": dig, "trials": trials });
        write_atomic(dump, &serde_json::to_vec(&json)?)?;
    }
    csv.write(&out)?;
    let premise_failures = outcomes.iter().filter(|t| !t.premise_holds).count();
    let summary = format!(
        "{rows} rows, {failed} failing, {premise_failures} premise failures -> {}",
        out.display()
    );
    Ok(if failed + premise_failures == 0 {
        Status::Done(summary)
    } else {
        Status::ChecksFailed(summary)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    #[default]
    Example,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileChoice {
    #[default]
    Indicator,
    SquareWave,
    RandomSteps,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FieldGen {
    #[arg(long, value_enum)]
    pub kind: Option<FieldKind>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Number of terms; by default enough to resolve the grid
    #[arg(long)]
    pub terms: Option<usize>,
    #[arg(long)]
    pub res: Option<usize>,
    /// Ellipticity used when the field is embedded as a matrix
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum)]
    pub profile: Option<ProfileChoice>,
    /// Periods of the square-wave profile
    #[arg(long)]
    pub periods: Option<u32>,
    /// Steps of the random-step profile
    #[arg(long)]
    pub steps: Option<usize>,
    /// Seed of the random-step profile
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn field_gen(flags: &FieldGen, config: Option<&Path>) -> Result<Status> {
    let mut a = merge(flags, config)?;
    a.kind.get_or_insert(FieldKind::Example);
    a.epsilon.get_or_insert(0.1);
    a.kappa.get_or_insert(8.0);
    a.res.get_or_insert(256);
    a.delta.get_or_insert(0.25);
    let profile = a.profile.unwrap_or_default();
    a.profile = Some(profile);
    match profile {
        ProfileChoice::Indicator => {}
        ProfileChoice::SquareWave => {
            a.periods.get_or_insert(8);
        }
        ProfileChoice::RandomSteps => {
            a.steps.get_or_insert(16);
            a.seed.get_or_insert(0);
        }
    }
    let res = a.res.unwrap();
    check_res(res, MAX_FIELD_RES)?;
    let delta = a.delta.unwrap();
    ensure!(delta > 0.0 && delta < 1.0, "delta = {delta} must lie in (0, 1)");
    let mut params = example_params(a.epsilon.unwrap(), a.kappa.unwrap(), a.terms, res)?;
    a.terms = Some(params.n_terms);
    params.profile = match profile {
        ProfileChoice::Indicator => ProfileKind::Indicator,
        ProfileChoice::SquareWave => ProfileKind::SquareWave { periods: a.periods.unwrap() },
        ProfileChoice::RandomSteps => ProfileKind::RandomSteps {
            steps: a.steps.unwrap(),
            seed: a.seed.unwrap(),
        },
    };
    let out = required(a.out.clone(), "out")?;
    let field = example_field(&params, res)?;
    snapshot::save(&out, &field, delta)?;
    Ok(Status::Done(format!(
        "{res}x{res} field, {} terms -> {} and {}",
        params.n_terms,
        out.display(),
        snapshot::sidecar_path(&out).display()
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViewChoice {
    #[default]
    Scalar,
    Matrix,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Oscillation {
    /// Field snapshot written by field-gen
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Only balls of radius below r0 are sampled
    #[arg(long)]
    pub r0: Option<f64>,
    /// Directions in [0, pi)
    #[arg(long)]
    pub directions: Option<usize>,
    /// Random balls per dyadic scale
    #[arg(long)]
    pub random_balls: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Scalar samples or their matrix embedding
    #[arg(long, value_enum)]
    pub view: Option<ViewChoice>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn oscillation(flags: &Oscillation, config: Option<&Path>) -> Result<Status> {
    let mut a = merge(flags, config)?;
    a.r0.get_or_insert(0.25);
    a.directions.get_or_insert(16);
    a.random_balls.get_or_insert(4);
    a.seed.get_or_insert(0);
    a.view.get_or_insert(ViewChoice::Scalar);
    let (a, dig) = settle("oscillation", &a, None)?;
    let path = required(a.field.clone(), "field")?;
    let out = required(a.out.clone(), "out")?;
    let (r0, directions) = (a.r0.unwrap(), a.directions.unwrap());
    ensure!(r0 > 0.0, "r0 must be positive");
    ensure!(directions > 0, "directions must be positive");
    let (field, side) = snapshot::load(&path)?;
    check_res(field.n(), MAX_FIELD_RES)?;
    let matrix;
    let view = match a.view.unwrap() {
        ViewChoice::Scalar => FieldView::scalar(&field),
        ViewChoice::Matrix => {
            matrix = embed_as_matrix(&field, side.delta)?;
            FieldView::matrix(&matrix)?
        }
    };
    let sample = BallSample::new(field.n(), a.random_balls.unwrap(), a.seed.unwrap());
    let estimate = gamma_profile(&view, r0, &sample, &direction_grid(directions))?;
    let mut rows = estimate.rows;
    rows.sort_by_key(|r| r.region_id);
    let mut csv = Csv::new(&dig, &["region_id", "cx", "cy", "radius", "best_dir_angle", "osc_value"]);
    for r in &rows {
        let (cx, cy) = r.region.center();
        csv.row(&[&r.region_id, &cx, &cy, &r.region.radius(), &r.best_angle, &r.value]);
    }
    csv.write(&out)?;
    Ok(Status::Done(format!(
        "{} regions, gamma estimate {} -> {}",
        rows.len(),
        estimate.gamma,
        out.display()
    )))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExampleBound {
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub terms: Option<usize>,
    #[arg(long)]
    pub res: Option<usize>,
    /// Relative discretization tolerance of the normalized bound
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn example_bound(flags: &ExampleBound, config: Option<&Path>) -> Result<Status> {
    let mut a = merge(flags, config)?;
    a.epsilon.get_or_insert(0.1);
    a.kappa.get_or_insert(8.0);
    a.res.get_or_insert(1024);
    a.tolerance.get_or_insert(0.05);
    let res = a.res.unwrap();
    let params = example_params(a.epsilon.unwrap(), a.kappa.unwrap(), a.terms, res)?;
    check_res(res, MAX_BOUND_RES)?;
    a.terms = Some(params.n_terms);
    let (a, dig) = settle("example-bound", &a, None)?;
    let out = required(a.out.clone(), "out")?;
    let tolerance = a.tolerance.unwrap();
    ensure!(tolerance >= 0.0, "tolerance must be nonnegative");
    let report = verify_example_bound(&params, res, tolerance)?;
    let bound = report.zeta_bmo + report.tail_constant;
    let mut csv = Csv::new(
        &dig,
        &[
            "i0", "j0", "side", "tau", "m", "measure", "m_over_q", "first_term", "tail_grid",
            "tail_exact", "bound", "pointwise_pass", "normalized_pass", "tail_exact_pass",
        ],
    );
    let mut failed = 0usize;
    for r in &report.rows {
        let tail_ok = r.tail_exact_holds.unwrap_or(true);
        csv.row(&[
            &r.i0,
            &r.j0,
            &r.side,
            &opt(r.tau),
            &r.m,
            &r.measure,
            &(r.m / r.measure),
            &r.first_term,
            &r.tail_grid,
            &opt(r.tail_exact),
            &bound,
            &r.pointwise_pass,
            &r.normalized_pass,
            &opt(r.tail_exact_holds),
        ]);
        failed += usize::from(!(r.pointwise_pass && r.normalized_pass && tail_ok));
    }
    csv.write(&out)?;
    let summary = format!(
        "{} squares, {failed} failing, |zeta|_BMO {:.4}, bound {bound:.4} -> {}",
        report.rows.len(),
        report.zeta_bmo,
        out.display()
    );
    Ok(if failed == 0 {
        Status::Done(summary)
    } else {
        Status::ChecksFailed(summary)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreconditionerChoice {
    #[default]
    Jacobi,
    Fourier,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct AprioriSweep {
    /// Field snapshot written by field-gen
    #[arg(long)]
    pub field: Option<PathBuf>,
    #[arg(long)]
    pub lambdas: Option<List>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub rhs_seed: Option<u64>,
    /// Right-hand sides per lambda
    #[arg(long)]
    pub rhs_count: Option<usize>,
    /// Highest Fourier mode of the right-hand sides
    #[arg(long)]
    pub max_mode: Option<i32>,
    #[arg(long, value_enum)]
    pub preconditioner: Option<PreconditionerChoice>,
    /// Relative residual target of GMRES
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn apriori_sweep(flags: &AprioriSweep, config: Option<&Path>) -> Result<Status> {
    let mut a = merge(flags, config)?;
    a.p.get_or_insert(4.0);
    check_estimate_p(a.p.unwrap())?;
    a.lambdas
        .get_or_insert(List(vec![16.0, 64.0, 256.0, 1024.0, 4096.0]));
    a.rhs_seed.get_or_insert(0);
    a.rhs_count.get_or_insert(5);
    a.max_mode.get_or_insert(8);
    a.preconditioner.get_or_insert(PreconditionerChoice::Jacobi);
    a.tol.get_or_insert(SolveOptions::default().tol);
    let (a, dig) = settle("apriori-sweep", &a, None)?;
    let path = required(a.field.clone(), "field")?;
    let out = required(a.out.clone(), "out")?;
    let lambdas = &a.lambdas.as_ref().unwrap().0;
    ensure!(!lambdas.is_empty(), "no lambdas given");
    ensure!(a.rhs_count.unwrap() > 0, "rhs-count must be positive");
    let field = load_matrix(&path, MAX_SOLVER_RES)?;
    let n = field.n();
    let seed = a.rhs_seed.unwrap();
    let rhs: Vec<_> = (0..a.rhs_count.unwrap() as u64)
        .map(|k| smooth_random_rhs(2, n, a.max_mode.unwrap(), seed.wrapping_add(k)))
        .collect();
    let opts = SolveOptions {
        tol: a.tol.unwrap(),
        preconditioner: match a.preconditioner.unwrap() {
            PreconditionerChoice::Jacobi => PreconditionerKind::Jacobi,
            PreconditionerChoice::Fourier => PreconditionerKind::Fourier,
        },
        ..Default::default()
    };
    let sweep = apriori_probe(&field, lambdas, a.p.unwrap(), &rhs, &opts)?;
    let mut csv = Csv::new(
        &dig,
        &["lambda", "p", "norm_u", "norm_ux", "norm_uxx", "norm_rhs", "implied_N", "solver_iters", "residual"],
    );
    for r in &sweep.reports {
        csv.row(&[
            &r.lambda,
            &r.p,
            &r.norm_u,
            &r.norm_ux,
            &r.norm_uxx,
            &r.norm_rhs,
            &r.implied_constant,
            &r.iterations,
            &r.residual,
        ]);
    }
    csv.write(&out)?;
    Ok(Status::Done(format!(
        "{} solves, implied N in [{:.4}, {:.4}], lambda_solve {:.4} -> {}",
        sweep.reports.len(),
        sweep.min_constant(),
        sweep.max_constant(),
        sweep.lambda_solve,
        out.display()
    )))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct AgmonCheck {
    /// Resolution of the base grid
    #[arg(long)]
    pub res: Option<usize>,
    #[arg(long)]
    pub mu: Option<List>,
    /// Points along the added variable on the coarse lift
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Exponent of the lift weight column
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn agmon_check(flags: &AgmonCheck, config: Option<&Path>) -> Result<Status> {
    let mut a = merge(flags, config)?;
    a.res.get_or_insert(32);
    a.mu.get_or_insert(List(vec![0.0, 5.0, 20.0]));
    a.ny.get_or_insert(256);
    a.epsilon.get_or_insert(0.1);
    a.kappa.get_or_insert(8.0);
    a.delta.get_or_insert(0.25);
    a.p.get_or_insert(4.0);
    a.seed.get_or_insert(9);
    let (a, dig) = settle("agmon-check", &a, None)?;
    let out = required(a.out.clone(), "out")?;
    let res = a.res.unwrap();
    check_res(res, MAX_SOLVER_RES)?;
    ensure!(a.ny.unwrap() >= 8, "ny must be at least 8");
    let params = example_params(a.epsilon.unwrap(), a.kappa.unwrap(), None, res)?;
    let field = embed_as_matrix(&example_field(&params, res)?, a.delta.unwrap())?;
    let u = smooth_random_rhs(2, res, 2, a.seed.unwrap());
    let cutoff = Cutoff::default();
    let mut csv = Csv::new(
        &dig,
        &["mu", "ny_coarse", "ny_fine", "residual_coarse", "residual_fine", "ratio", "lift_weight"],
    );
    let mut worst = f64::INFINITY;
    for &mu in &a.mu.as_ref().unwrap().0 {
        let c = agmon_convergence(&field, &u, mu, a.ny.unwrap(), &cutoff)?;
        let w = lift_weight(&cutoff, mu, a.p.unwrap(), LIFT_WEIGHT_POINTS);
        csv.row(&[&mu, &c.coarse.ny, &c.fine.ny, &c.coarse.residual, &c.fine.residual, &c.ratio, &w]);
        worst = worst.min(c.ratio);
    }
    csv.write(&out)?;
    Ok(Status::Done(format!("smallest residual ratio {worst:.3} -> {}", out.display())))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct LocalProbe {
    /// Field snapshot written by field-gen
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Support radii
    #[arg(long)]
    pub radii: Option<List>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Centre of the supports
    #[arg(long)]
    pub center: Option<List>,
    /// Test functions per radius
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn local_probe(flags: &LocalProbe, config: Option<&Path>) -> Result<Status> {
    let mut a = merge(flags, config)?;
    a.p.get_or_insert(4.0);
    check_estimate_p(a.p.unwrap())?;
    a.radii.get_or_insert(List(vec![0.1, 0.2, 0.3]));
    a.center.get_or_insert(List(vec![0.5, 0.5]));
    a.count.get_or_insert(8);
    a.seed.get_or_insert(0);
    let (a, dig) = settle("local-probe", &a, None)?;
    let path = required(a.field.clone(), "field")?;
    let out = required(a.out.clone(), "out")?;
    let center = &a.center.as_ref().unwrap().0;
    if center.len() != 2 {
        bail!("center needs two coordinates, got {}", center.len());
    }
    let field = load_matrix(&path, MAX_SOLVER_RES)?;
    let mut csv = Csv::new(&dig, &["radius", "p", "cx", "cy", "fitted", "frozen", "laplacian"]);
    for &radius in &a.radii.as_ref().unwrap().0 {
        let r = local_estimate_probe(&field, radius, a.p.unwrap(), center, a.count.unwrap(), a.seed.unwrap())?;
        csv.row(&[&r.radius, &r.p, &r.center[0], &r.center[1], &r.fitted, &r.frozen, &r.laplacian]);
    }
    csv.write(&out)?;
    Ok(Status::Done(format!("local estimate fits -> {}", out.display())))
}
