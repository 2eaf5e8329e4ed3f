//! Experiment runners.
//!
//! Each runner returns its output files as `(name, content)` pairs so the
//! manifest layer can hash exactly what will be written. All text uses
//! comma separators, dot decimals, LF line endings, and a header row.

use std::fmt::Write as _;

use rand_distr::{Distribution, StandardNormal};

use sopkit::channel::{sample_secrecy, LinearDynamics, LinkBudget, NetworkGeometry, SecrecySampleParams};
use sopkit::pencil::{count_eigs_contour, parse_pencil, Contour, MatrixPencil};
use sopkit::policy::{train, EigenEnsemble, MdpSpec, Schedules, TrainingTrace};
use sopkit::possibilistic::{
    simulate_semi_markov, HoldingTime, ModeKind, ModeSpec, PossibilisticKernel, SemiMarkovSpec,
};
use sopkit::projection::{f_margin, jl_tail_grid, proj, ProjectionBounds};
use sopkit::volume::{
    empirical_sop, greedy_threshold_search_traced, sop_convex_bound, EmpiricalDistribution,
    SearchObjective, SearchTrace,
};
use sopkit::C;

use crate::config::{
    ComplexityParams, CountEigsParams, ExperimentConfig, JlTailParams, Params, PossimParams,
    ProjectParams, SopTableParams, TrainParams,
};
use crate::CliError;

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

/// Dispatches to the runner for the config's experiment kind.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<(String, String)>, CliError> {
    match &cfg.params {
        Params::SopTable(p) => sop_table(p, cfg.seed),
        Params::CountEigs(p) => count_eigs(p),
        Params::Project(p) => project(p),
        Params::JlTail(p) => jl_tail(p, cfg.seed),
        Params::Train(p) => train_run(p, cfg.seed),
        Params::Possim(p) => possim(p, cfg.seed),
        Params::ComplexityTable(p) => complexity_table(p, cfg.seed),
    }
}

/// Six-cell outage table: for each intensity the Monte Carlo probability
/// of clearing it, folded through the convex-side bound `e^{-rho^2}/p`
/// at each correlation level.
fn sop_table(p: &SopTableParams, seed: u64) -> Result<Vec<(String, String)>, CliError> {
    let geometry = NetworkGeometry::default_layout(p.eve_offset).map_err(numerical)?;
    let budget = LinkBudget::new(p.power, p.noise, p.noise).map_err(numerical)?;
    let rates = sample_secrecy(&geometry, &budget, &SecrecySampleParams::default(), p.samples, seed)
        .map_err(numerical)?;
    let dist = EmpiricalDistribution::new(rates).map_err(numerical)?;
    let mut csv = String::from("intensity,rho,sop_convex\n");
    for &intensity in &p.intensities {
        let tail = empirical_sop(&dist, intensity);
        for &rho in &p.rhos {
            let bound = sop_convex_bound(rho, tail).map_err(|_| {
                CliError::Numerical(format!(
                    "no sampled rate reaches intensity {intensity}; the convex bound divides by that probability"
                ))
            })?;
            let _ = writeln!(csv, "{intensity},{rho},{bound}");
        }
    }
    Ok(vec![("sop_table.csv".to_string(), csv)])
}

/// Eigenvalue count inside one circle, via the logarithmic-derivative
/// contour quadrature. The built-in pencil is diag(0.5, 2) against the
/// identity, so the default unit circle encloses exactly one eigenvalue.
fn count_eigs(p: &CountEigsParams) -> Result<Vec<(String, String)>, CliError> {
    let pencil = if p.pencil_file.is_empty() {
        let b = ndarray::arr2(&[[0.5, 0.0], [0.0, 2.0]]);
        let a = ndarray::arr2(&[[1.0, 0.0], [0.0, 1.0]]);
        MatrixPencil::from_real(&b, &a).map_err(numerical)?
    } else {
        let text = std::fs::read_to_string(&p.pencil_file)
            .map_err(|e| CliError::Config(format!("cannot read pencil file {}: {e}", p.pencil_file)))?;
        parse_pencil(&text).map_err(|e| CliError::Config(format!("pencil file: {e}")))?
    };
    let contour =
        Contour::circle(C::new(p.center_re, p.center_im), p.radius, p.nodes).map_err(numerical)?;
    let result = count_eigs_contour(&pencil, &contour).map_err(numerical)?;
    let mut csv = String::from("radius,center_re,center_im,count,residual\n");
    let _ = writeln!(
        csv,
        "{},{},{},{},{}",
        p.radius, p.center_re, p.center_im, result.count, result.residual
    );
    Ok(vec![("counts.csv".to_string(), csv)])
}

/// Deterministic table of the margin function and the projected update in
/// both directions over an inclusive parameter grid.
fn project(p: &ProjectParams) -> Result<Vec<(String, String)>, CliError> {
    let bounds = ProjectionBounds::new(p.theta_min, p.theta_max, p.eta)
        .map_err(|e| CliError::Config(format!("project: {e}")))?;
    let mut csv = String::from("theta,f_margin,update_up,update_down\n");
    let span = p.theta_max - p.theta_min;
    for i in 0..p.steps {
        let theta = p.theta_min + span * (i as f64) / ((p.steps - 1) as f64);
        let f = f_margin(theta, &bounds);
        let up = proj(theta, p.update, &bounds);
        let down = proj(theta, -p.update, &bounds);
        let _ = writeln!(csv, "{theta},{f},{up},{down}");
    }
    Ok(vec![("projection.csv".to_string(), csv)])
}

/// Tail frequencies of the random-subspace shrinkage event next to the
/// analytic `exp(-k tau2^2 / 4)` bound over the (k, tau2) grid.
fn jl_tail(p: &JlTailParams, seed: u64) -> Result<Vec<(String, String)>, CliError> {
    let reports = jl_tail_grid(p.n, &p.ks, &p.tau2s, p.trials, seed).map_err(numerical)?;
    let mut csv = String::from("k,tau2,empirical_freq,analytic_bound,holds\n");
    let mut cells = p.ks.iter().flat_map(|&k| p.tau2s.iter().map(move |&t| (k, t)));
    for report in &reports {
        let (k, tau2) = cells.next().expect("grid size matches report count");
        let _ = writeln!(
            csv,
            "{k},{tau2},{},{},{}",
            report.empirical_freq, report.analytic_bound, report.holds
        );
    }
    Ok(vec![("jl_tail.csv".to_string(), csv)])
}

/// Serializes a training trace, one row per recorded iteration (a T-step
/// run yields T+1 rows after the header).
pub fn emit_training_trace(trace: &TrainingTrace<f64>) -> Result<String, CliError> {
    if trace.rows.is_empty() {
        return Err(CliError::Numerical("empty training trace".into()));
    }
    let mut csv = String::from("iteration,avg_reward,q_error,avg_policy\n");
    for row in &trace.rows {
        let _ = writeln!(csv, "{},{},{},{}", row.iteration, row.avg_reward, row.q_error, row.avg_policy);
    }
    Ok(csv)
}

/// Actor-critic training on the eigenvalue-slot environment; emits the
/// per-iteration trace and the output policy in long form.
fn train_run(p: &TrainParams, seed: u64) -> Result<Vec<(String, String)>, CliError> {
    let ensemble = EigenEnsemble::new(p.u0, p.v0, p.ensemble_beta).map_err(numerical)?;
    let spec = MdpSpec::from_ensemble(ensemble, p.discount).map_err(numerical)?;
    let schedules = match p.schedule.as_str() {
        "constant" => Schedules::Constant { alpha: p.alpha, beta: p.beta, epsilon: p.epsilon },
        _ => Schedules::Diminishing,
    };
    let (trace, policy) = train(&spec, p.steps, schedules, seed).map_err(numerical)?;
    let trace_csv = emit_training_trace(&trace)?;
    let mut policy_csv = String::from("state,action,probability\n");
    for s in 0..policy.nrows() {
        for a in 0..policy.ncols() {
            let _ = writeln!(policy_csv, "{s},{a},{}", policy[[s, a]]);
        }
    }
    Ok(vec![("trace.csv".to_string(), trace_csv), ("policy.csv".to_string(), policy_csv)])
}

/// Two-mode switching trajectory; one row per constant-mode segment.
fn possim(p: &PossimParams, seed: u64) -> Result<Vec<(String, String)>, CliError> {
    let noise_vars = (p.noise, 1.0, 1.0);
    let stable = ModeSpec {
        dynamics: LinearDynamics::scalar(p.stable_a, noise_vars).map_err(numerical)?,
        holding: HoldingTime::Exponential { mean: p.hold_mean },
    };
    let unstable = ModeSpec {
        dynamics: LinearDynamics::scalar(p.unstable_a, noise_vars).map_err(numerical)?,
        holding: HoldingTime::Exponential { mean: p.hold_mean },
    };
    let kernel = PossibilisticKernel::new(ndarray::arr2(&[[1.0, p.cross], [p.cross, 1.0]]))
        .map_err(numerical)?;
    let spec = SemiMarkovSpec::new(stable, unstable, kernel, ModeKind::Stable).map_err(numerical)?;
    let trajectory = simulate_semi_markov(&spec, p.jumps, seed).map_err(numerical)?;
    let mut csv = String::from("segment,mode,start_time,holding,path_len,end_norm\n");
    for (i, segment) in trajectory.segments.iter().enumerate() {
        let mode = match segment.mode {
            ModeKind::Stable => "stable",
            ModeKind::Unstable => "unstable",
        };
        let end = segment.path.last().expect("segments record at least the entry state");
        let norm = end.iter().map(|v| v * v).sum::<f64>().sqrt();
        let _ = writeln!(
            csv,
            "{i},{mode},{},{},{},{norm}",
            segment.start_time,
            segment.holding,
            segment.path.len()
        );
    }
    Ok(vec![("segments.csv".to_string(), csv)])
}

fn at_checkpoint<V: Copy>(history: &[V], k: usize) -> V {
    history[k.min(history.len() - 1)]
}

/// Checkpointed ratio tables comparing the tail-entropy objective run
/// (numerator) against the expected-volume objective run (denominator).
///
/// Complexity divides cumulative objective evaluations at the k-th
/// accepted improvement; accuracy divides the fractions of each run's
/// final objective attained by then. Checkpoints past a run's last
/// improvement clamp to its final record, so identical traces give 1.
pub fn emit_complexity_accuracy(
    proxy: &SearchTrace,
    expected: &SearchTrace,
    checkpoints: &[usize],
) -> Result<(String, String), CliError> {
    if proxy.objective_history.is_empty() || expected.objective_history.is_empty() {
        return Err(CliError::Numerical("empty search trace".into()));
    }
    let opt_proxy = *proxy.objective_history.last().expect("non-empty");
    let opt_expected = *expected.objective_history.last().expect("non-empty");
    if opt_proxy == 0.0 || opt_expected == 0.0 {
        return Err(CliError::Numerical("division by zero metric: a final objective is 0".into()));
    }
    let mut complexity_csv = String::from("iterations,complexity\n");
    let mut accuracy_csv = String::from("iterations,accuracy\n");
    for &k in checkpoints {
        let evals_p = at_checkpoint(&proxy.evaluation_history, k) as f64;
        let evals_e = at_checkpoint(&expected.evaluation_history, k) as f64;
        let obj_p = at_checkpoint(&proxy.objective_history, k);
        let obj_e = at_checkpoint(&expected.objective_history, k);
        if evals_e == 0.0 || obj_e == 0.0 {
            return Err(CliError::Numerical(
                "division by zero metric: reference run recorded a zero".into(),
            ));
        }
        let complexity = evals_p / evals_e;
        let accuracy = (obj_p / opt_proxy) / (obj_e / opt_expected);
        if !complexity.is_finite() || !accuracy.is_finite() {
            return Err(CliError::Numerical(format!("non-finite ratio at checkpoint {k}")));
        }
        let _ = writeln!(complexity_csv, "{k},{complexity}");
        let _ = writeln!(accuracy_csv, "{k},{accuracy}");
    }
    Ok((complexity_csv, accuracy_csv))
}

/// Runs the greedy threshold search under both objectives on one seeded
/// Gaussian sample and emits the ratio tables.
fn complexity_table(p: &ComplexityParams, seed: u64) -> Result<Vec<(String, String)>, CliError> {
    let mut rng = sopkit::rng::seeded(seed);
    let samples: Vec<f64> = (0..p.samples)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            p.sigma * z
        })
        .collect();
    let dist = EmpiricalDistribution::new(samples).map_err(numerical)?;
    let (_, proxy) = greedy_threshold_search_traced(&dist, p.thresholds, SearchObjective::SopVolumeProxy)
        .map_err(numerical)?;
    let (_, expected) =
        greedy_threshold_search_traced(&dist, p.thresholds, SearchObjective::ExpectedVolume)
            .map_err(numerical)?;
    let (complexity_csv, accuracy_csv) = emit_complexity_accuracy(&proxy, &expected, &p.checkpoints)?;
    Ok(vec![
        ("accuracy.csv".to_string(), accuracy_csv),
        ("complexity.csv".to_string(), complexity_csv),
    ])
}
