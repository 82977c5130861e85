//! Monte-Carlo recovery experiments.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::Hasher;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{AlgorithmSpec, SuiteConfig};
use super::generate::{gaussian_dictionary, gen_problem, gen_signal};
use super::metrics::{judge, snr_db, support_detected};
use super::rng::{derive_seed, SampleRng};
use crate::cosamp::{alg_l2l1, cosamp_c};
use crate::error::{Error, Result};
use crate::gbp::{alg_gbp_with, GbpOptions};
use crate::greedy::{omp_c, omp_hd, omp_ihd, Recovery};
use crate::lift::{lift, lift_instance, LiftedInstance, LiftedSystem};
use crate::lp::bp_classic;
use crate::model::{Problem, SparseEstimate};

/// Tolerance on `Q ŝ = x` and `ŝ = s*` for converged lifted recoveries.
pub const CERTIFICATE_TOL: f64 = 1e-8;

/// Index of the stream that draws a shared dictionary.
const SHARED_DICTIONARY_STREAM: u64 = u64::MAX;

/// Run one algorithm on one problem. `lifted` must be supplied for the
/// lifted methods.
pub fn run_algorithm(
    spec: &AlgorithmSpec,
    prob: &Problem,
    lifted: Option<(&LiftedSystem, &LiftedInstance)>,
) -> Result<Recovery> {
    let need_lift = || {
        lifted.ok_or_else(|| Error::InvalidProblem(format!("{} needs a lifted system", spec.label())))
    };
    let kappa = prob.kappa();
    match *spec {
        AlgorithmSpec::OmpC => omp_c(prob),
        AlgorithmSpec::BpC => Ok(Recovery {
            estimate: bp_classic(prob)?,
            iterations: 1,
            converged: true,
        }),
        AlgorithmSpec::CosampC => cosamp_c(prob),
        AlgorithmSpec::OmpHd => {
            let (sys, inst) = need_lift()?;
            omp_hd(sys, inst, kappa)
        }
        AlgorithmSpec::OmpIhd => {
            let (sys, inst) = need_lift()?;
            omp_ihd(sys, inst, kappa)
        }
        AlgorithmSpec::AlgGbp { warm_start, encoding } => {
            let (sys, inst) = need_lift()?;
            Ok(alg_gbp_with(sys, inst, kappa, GbpOptions { warm_start, encoding })?.recovery)
        }
        AlgorithmSpec::AlgL2l1 { lambda, n_ite } => {
            let (sys, inst) = need_lift()?;
            alg_l2l1(sys, inst, kappa, lambda, n_ite)
        }
    }
}

/// Stopping-rule soundness for a converged lifted recovery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `max |Q ŝ - x|`.
    pub consistency_error: f64,
    /// `max |ŝ - s*|`, present when the planted support lies in the estimate.
    pub recovery_error: Option<f64>,
    pub violated: bool,
}

impl Certificate {
    fn check(prob: &Problem, s_true: &DVector<f64>, est: &SparseEstimate) -> Result<Self> {
        let s_hat = est.densify(prob.l())?;
        let consistency_error = (prob.q() * &s_hat - prob.x()).amax();
        let covered = s_true
            .iter()
            .enumerate()
            .all(|(i, &v)| v == 0.0 || est.support.contains(&i));
        let recovery_error = covered.then(|| (&s_hat - s_true).amax());
        let violated = consistency_error > CERTIFICATE_TOL
            || recovery_error.is_some_and(|e| e > CERTIFICATE_TOL);
        Ok(Self {
            consistency_error,
            recovery_error,
            violated,
        })
    }
}

/// Outcome of one algorithm on one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub sample: usize,
    pub algorithm: String,
    pub success: bool,
    /// `+∞` when the reconstruction error is negligible.
    #[serde(with = "float_or_inf")]
    pub snr_db: f64,
    pub iterations: usize,
    pub support_detected: bool,
    pub converged: bool,
    /// Seconds spent in the algorithm, excluding generation and lifting.
    pub wall_time: f64,
    /// Error message when the algorithm failed numerically.
    pub failure: Option<String>,
    /// Hash of the sample's `(Q, x)`, identical across algorithms.
    pub sample_hash: u64,
    pub certificate: Option<Certificate>,
}

/// Per-algorithm aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub spec: AlgorithmSpec,
    pub samples: usize,
    pub successes: usize,
    /// `successes / samples`.
    pub rho_ok: f64,
    /// `rho_ok` in percent, rounded to two decimals.
    pub percent: f64,
    pub failures: usize,
    pub mean_iterations: f64,
    pub median_iterations: f64,
    pub mode_iterations: usize,
    pub mean_wall_time: f64,
    pub certificate_checks: usize,
    pub certificate_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub algorithms: Vec<AlgorithmSummary>,
    /// Mean seconds per sample spent lifting `Q`, shared by all lifted methods.
    pub mean_lift_time: f64,
    /// Every algorithm saw the same `(Q, x)` for every sample.
    pub fairness_verified: bool,
}

impl SuiteReport {
    pub fn summary(&self, spec: &AlgorithmSpec) -> Option<&AlgorithmSummary> {
        self.algorithms.iter().find(|a| a.spec == *spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRun {
    pub report: SuiteReport,
    /// Sample-major, algorithms in config order.
    pub records: Vec<TrialRecord>,
}

impl SuiteRun {
    /// Per-trial CSV. Timing is left out so the file is reproducible.
    pub fn trials_csv(&self) -> String {
        let mut out = String::from(
            "sample,algorithm,success,snr_db,iterations,support_detected,converged,failed,sample_hash\n",
        );
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{:016x}",
                r.sample,
                r.algorithm,
                r.success,
                r.snr_db,
                r.iterations,
                r.support_detected,
                r.converged,
                r.failure.is_some(),
                r.sample_hash
            );
        }
        out
    }

    /// Per-algorithm CSV, again without timing.
    pub fn summary_csv(&self) -> String {
        let cfg = &self.report.config;
        let mut out = String::from(
            "algorithm,kappa,n,l,samples,successes,rho_ok_percent,failures,mean_iterations,median_iterations,mode_iterations\n",
        );
        for a in &self.report.algorithms {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.2},{},{},{},{}",
                a.algorithm,
                cfg.kappa,
                cfg.n,
                cfg.l,
                a.samples,
                a.successes,
                a.percent,
                a.failures,
                a.mean_iterations,
                a.median_iterations,
                a.mode_iterations
            );
        }
        out
    }
}

/// Run the suite on the current rayon pool.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteRun> {
    cfg.validate()?;
    let shared = cfg.shared_dictionary.then(|| {
        let mut rng = SampleRng::new(derive_seed(cfg.master_seed, SHARED_DICTIONARY_STREAM));
        gaussian_dictionary(&mut rng, cfg.n, cfg.l)
    });
    let shared_lift = match (&shared, cfg.algorithms.iter().any(AlgorithmSpec::is_lifted)) {
        (Some(q), true) => Some(lift(q)?),
        _ => None,
    };
    let samples: Vec<Result<(Vec<TrialRecord>, f64)>> = (0..cfg.j)
        .into_par_iter()
        .map(|idx| run_sample(cfg, idx, shared.as_ref(), shared_lift.as_ref()))
        .collect();

    let mut records = Vec::with_capacity(cfg.j * cfg.algorithms.len());
    let mut lift_time = 0.0;
    for s in samples {
        let (recs, t) = s?;
        records.extend(recs);
        lift_time += t;
    }
    let report = aggregate(cfg, &records, lift_time / cfg.j as f64);
    Ok(SuiteRun { report, records })
}

/// Run the suite on a dedicated pool of `workers` threads.
pub fn run_suite_with_workers(cfg: &SuiteConfig, workers: usize) -> Result<SuiteRun> {
    with_workers(workers, || run_suite(cfg))?
}

/// Run `f` on a dedicated pool of `workers` threads, so that the parallel
/// experiment functions use exactly that many.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidProblem(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn sample_hash(prob: &Problem) -> u64 {
    let mut h = DefaultHasher::new();
    for v in prob.q().iter().chain(prob.x().iter()) {
        h.write_u64(v.to_bits());
    }
    h.finish()
}

fn run_sample(
    cfg: &SuiteConfig,
    idx: usize,
    shared: Option<&DMatrix<f64>>,
    shared_lift: Option<&LiftedSystem>,
) -> Result<(Vec<TrialRecord>, f64)> {
    let seed = derive_seed(cfg.master_seed, idx as u64);
    let (prob, s_true) = match shared {
        Some(q) => gen_signal(q, cfg.kappa, seed, cfg.coeff_dist)?,
        None => gen_problem(cfg.n, cfg.l, cfg.kappa, seed, cfg.coeff_dist)?,
    };
    let hash = sample_hash(&prob);

    let mut lift_time = 0.0;
    let owned_lift;
    let lifted: std::result::Result<(&LiftedSystem, LiftedInstance), String> =
        if cfg.algorithms.iter().any(AlgorithmSpec::is_lifted) {
            let start = Instant::now();
            let sys = match shared_lift {
                Some(sys) => Ok(sys),
                None => {
                    owned_lift = lift(prob.q());
                    owned_lift.as_ref().map_err(|e| e.to_string())
                }
            };
            let res = sys.and_then(|sys| {
                lift_instance(sys, prob.x())
                    .map(|inst| (sys, inst))
                    .map_err(|e| e.to_string())
            });
            lift_time = start.elapsed().as_secs_f64();
            res
        } else {
            Err("not lifted".into())
        };

    let records = cfg
        .algorithms
        .iter()
        .map(|spec| {
            let start = Instant::now();
            let outcome = if spec.is_lifted() {
                match &lifted {
                    Ok((sys, inst)) => run_algorithm(spec, &prob, Some((sys, inst))),
                    Err(msg) => Err(Error::InvalidProblem(msg.clone())),
                }
            } else {
                run_algorithm(spec, &prob, None)
            };
            let wall_time = start.elapsed().as_secs_f64();
            trial_record(cfg, idx, spec, &prob, &s_true, outcome, wall_time, hash)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((records, lift_time))
}

#[allow(clippy::too_many_arguments)]
fn trial_record(
    cfg: &SuiteConfig,
    sample: usize,
    spec: &AlgorithmSpec,
    prob: &Problem,
    s_true: &DVector<f64>,
    outcome: Result<Recovery>,
    wall_time: f64,
    sample_hash: u64,
) -> Result<TrialRecord> {
    let base = TrialRecord {
        sample,
        algorithm: spec.label(),
        success: false,
        snr_db: 0.0,
        iterations: 0,
        support_detected: false,
        converged: false,
        wall_time,
        failure: None,
        sample_hash,
        certificate: None,
    };
    let rec = match outcome {
        Ok(rec) => rec,
        Err(e) => {
            return Ok(TrialRecord {
                failure: Some(e.to_string()),
                ..base
            })
        }
    };
    let est = &rec.estimate;
    let detected = support_detected(s_true, est)?;
    let snr = if cfg.kappa == 0 {
        f64::INFINITY
    } else {
        snr_db(prob.q(), s_true, &est.densify(prob.l())?)?
    };
    let success = cfg.kappa == 0 || judge(s_true, est, prob.q(), cfg.snr_threshold_db)?;
    let certificate = if spec.is_lifted() && rec.converged && est.len() <= 2 * cfg.kappa {
        Some(Certificate::check(prob, s_true, est)?)
    } else {
        None
    };
    Ok(TrialRecord {
        success,
        snr_db: snr,
        iterations: rec.iterations,
        support_detected: detected,
        converged: rec.converged,
        certificate,
        ..base
    })
}

fn aggregate(cfg: &SuiteConfig, records: &[TrialRecord], mean_lift_time: f64) -> SuiteReport {
    let algorithms = cfg
        .algorithms
        .iter()
        .map(|spec| {
            let label = spec.label();
            let recs: Vec<&TrialRecord> = records.iter().filter(|r| r.algorithm == label).collect();
            let samples = recs.len();
            let successes = recs.iter().filter(|r| r.success).count();
            let rho_ok = successes as f64 / samples as f64;
            let mut iters: Vec<usize> = recs.iter().map(|r| r.iterations).collect();
            iters.sort_unstable();
            let checks: Vec<&Certificate> = recs.iter().filter_map(|r| r.certificate.as_ref()).collect();
            AlgorithmSummary {
                algorithm: label,
                spec: *spec,
                samples,
                successes,
                rho_ok,
                percent: (rho_ok * 10_000.0).round() / 100.0,
                failures: recs.iter().filter(|r| r.failure.is_some()).count(),
                mean_iterations: iters.iter().sum::<usize>() as f64 / samples as f64,
                median_iterations: median(&iters),
                mode_iterations: mode(&iters),
                mean_wall_time: recs.iter().map(|r| r.wall_time).sum::<f64>() / samples as f64,
                certificate_checks: checks.len(),
                certificate_violations: checks.iter().filter(|c| c.violated).count(),
            }
        })
        .collect();

    let mut hashes: HashMap<usize, u64> = HashMap::new();
    let fairness_verified = records
        .iter()
        .all(|r| *hashes.entry(r.sample).or_insert(r.sample_hash) == r.sample_hash);

    SuiteReport {
        config: cfg.clone(),
        algorithms,
        mean_lift_time,
        fairness_verified,
    }
}

/// Median of sorted values; mean of the middle pair for even lengths.
fn median(sorted: &[usize]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
    }
}

/// Most frequent value of sorted values, smallest on ties.
fn mode(sorted: &[usize]) -> usize {
    let mut best = (0, 0);
    let mut i = 0;
    while i < sorted.len() {
        let j = i + sorted[i..].iter().take_while(|&&v| v == sorted[i]).count();
        if j - i > best.1 {
            best = (sorted[i], j - i);
        }
        i = j;
    }
    best.0
}

/// JSON has no infinity; `+∞` is written as the string `"inf"`.
mod float_or_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("invalid number `{s}`"))),
        }
    }
}
