//! `hdsparse`: generate problems, run single recoveries and benchmarks.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use hdsparse::experiment::io::{read_bundle, write_bundle, Bundle, BundleMeta};
use hdsparse::experiment::{
    gen_problem, judge, run_algorithm, run_phase, run_suite, run_sweep, snr_db, support_detected,
    with_workers, AlgorithmSpec, CoeffDist, PhaseSpec, SuiteConfig,
};
use hdsparse::gbp::{alg_gbp_with, GbpOptions, GbpTrace};
use hdsparse::lift::{lift, lift_instance};
use hdsparse::model::{normalize_columns, Problem, SparseEstimate};
use hdsparse::Error;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "hdsparse", version, about = "Sparse recovery on lifted high-dimensional systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random problem bundle to a directory.
    Gen {
        #[arg(long, short = 'n')]
        n: usize,
        #[arg(long, short = 'l')]
        l: usize,
        #[arg(long, short = 'k')]
        kappa: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Dist::Normal)]
        coeffs: Dist,
        #[arg(long, short = 'o')]
        out: PathBuf,
    },
    /// Recover one bundle and print the estimate as JSON.
    Recover {
        /// omp_c, bp_c, omp_hd, omp_ihd, alg_gbp, alg_l2l1 or cosamp_c.
        #[arg(long)]
        alg: String,
        /// Candidates per iteration for alg_l2l1.
        #[arg(long)]
        lambda: Option<usize>,
        /// Iteration limit for alg_l2l1 (defaults to kappa).
        #[arg(long)]
        n_ite: Option<usize>,
        /// Start alg_gbp from the basis pursuit solution.
        #[arg(long)]
        warm_start: bool,
        /// Rescale the columns of Q to unit norm before recovering.
        #[arg(long)]
        normalize: bool,
        /// Override the sparsity level stored in the bundle.
        #[arg(long)]
        kappa: Option<usize>,
        bundle: PathBuf,
    },
    /// Run a Monte-Carlo suite described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        /// Directory for report.json, trials.csv and summary.csv.
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },
    /// Run a suite config over a range of sparsity levels; prints CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated values and inclusive ranges, e.g. `0,4-8`.
        #[arg(long)]
        kappas: String,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },
    /// Phase-transition grid; writes one CSV per algorithm and an SVG.
    Phase {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, short = 'o')]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Dist {
    Normal,
    Uniform,
}

impl From<Dist> for CoeffDist {
    fn from(d: Dist) -> Self {
        match d {
            Dist::Normal => CoeffDist::Normal,
            Dist::Uniform => CoeffDist::Uniform,
        }
    }
}

/// Failure classes with distinct exit codes.
enum Failure {
    Config(anyhow::Error),
    Numerical(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Config(e) | Failure::Numerical(e)) = &f;
            eprintln!("error: {e:#}");
            ExitCode::from(f.code())
        }
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Gen { n, l, kappa, seed, coeffs, out } => {
            let (prob, s_true) = gen_problem(n, l, kappa, seed, coeffs.into()).context("invalid dimensions")?;
            let bundle = Bundle {
                q: prob.q().clone(),
                x: prob.x().clone(),
                s_true: Some(s_true),
                meta: BundleMeta { kappa, n, l, seed: Some(seed) },
            };
            write_bundle(&out, &bundle).with_context(|| format!("writing {}", out.display()))?;
            Ok(())
        }
        Command::Recover { alg, lambda, n_ite, warm_start, normalize, kappa, bundle } => {
            let mut spec = AlgorithmSpec::from_id(&alg, lambda, warm_start).map_err(anyhow::Error::from)?;
            if let AlgorithmSpec::AlgL2l1 { n_ite: ref mut slot, .. } = spec {
                *slot = n_ite;
            }
            spec.validate().map_err(anyhow::Error::from)?;
            let bundle = read_bundle(&bundle).with_context(|| format!("reading {}", bundle.display()))?;
            let report = recover(&spec, bundle, normalize, kappa)?;
            println!("{}", serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?);
            Ok(())
        }
        Command::Bench { config, workers, out } => {
            let cfg: SuiteConfig = read_json(&config)?;
            cfg.validate().map_err(anyhow::Error::from)?;
            let run = in_pool(workers, || run_suite(&cfg))?.map_err(numerical)?;
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                    write(&dir.join("report.json"), &to_json(&run.report)?)?;
                    write(&dir.join("trials.csv"), &run.trials_csv())?;
                    write(&dir.join("summary.csv"), &run.summary_csv())?;
                    print!("{}", run.summary_csv());
                }
                None => println!("{}", to_json(&run.report)?),
            }
            Ok(())
        }
        Command::Sweep { config, kappas, workers, out } => {
            let cfg: SuiteConfig = read_json(&config)?;
            let kappas = parse_list(&kappas)?;
            for &k in &kappas {
                SuiteConfig { kappa: k, ..cfg.clone() }.validate().map_err(anyhow::Error::from)?;
            }
            let table = in_pool(workers, || run_sweep(&cfg, &kappas))?.map_err(numerical)?;
            let csv = table.to_csv();
            match out {
                Some(path) => write(&path, &csv)?,
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Phase { config, workers, out } => {
            let spec: PhaseSpec = read_json(&config)?;
            let grid = in_pool(workers, || run_phase(&spec))?.map_err(|e| match e {
                Error::InvalidProblem(_) => Failure::Config(e.into()),
                other => numerical(other),
            })?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            for (a, label) in grid.labels.iter().enumerate() {
                write(&out.join(format!("{label}.csv")), &grid.to_csv(a))?;
            }
            write(&out.join("phase.svg"), &grid.to_svg())?;
            write(&out.join("phase.json"), &to_json(&grid)?)?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct RecoverReport {
    algorithm: String,
    estimate: SparseEstimate,
    iterations: usize,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<Metrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<GbpTrace>,
}

#[derive(Serialize)]
struct Metrics {
    /// `null` when the reconstruction is exact to rounding.
    snr_db: Option<f64>,
    support_detected: bool,
    success: bool,
}

fn recover(
    spec: &AlgorithmSpec,
    bundle: Bundle,
    normalize: bool,
    kappa: Option<usize>,
) -> Result<RecoverReport, Failure> {
    let kappa = kappa.unwrap_or(bundle.meta.kappa);
    let mut q = bundle.q.clone();
    let norms = if normalize {
        let norms = normalize_columns(&mut q);
        if norms.contains(&0.0) {
            return Err(Failure::Config(anyhow::anyhow!("Q has a zero column")));
        }
        Some(norms)
    } else {
        None
    };
    let prob = Problem::new(q, bundle.x.clone(), kappa).map_err(|e| Failure::Config(e.into()))?;

    let (recovery, trace) = if spec.is_lifted() {
        let sys = lift(prob.q()).map_err(numerical)?;
        let inst = lift_instance(&sys, prob.x()).map_err(numerical)?;
        match *spec {
            AlgorithmSpec::AlgGbp { warm_start, encoding } => {
                let run = alg_gbp_with(&sys, &inst, kappa, GbpOptions { warm_start, encoding }).map_err(numerical)?;
                (run.recovery, Some(run.trace))
            }
            _ => (run_algorithm(spec, &prob, Some((&sys, &inst))).map_err(numerical)?, None),
        }
    } else {
        (run_algorithm(spec, &prob, None).map_err(numerical)?, None)
    };

    // Report coefficients against the columns of the original Q.
    let mut estimate = recovery.estimate;
    if let Some(norms) = &norms {
        for (c, &i) in estimate.coeffs.iter_mut().zip(&estimate.support) {
            *c /= norms[i];
        }
    }
    let metrics = match &bundle.s_true {
        Some(s) if s.iter().any(|&v| v != 0.0) => {
            let s_hat = estimate.densify(s.len()).map_err(numerical)?;
            let snr = snr_db(&bundle.q, s, &s_hat).map_err(numerical)?;
            Some(Metrics {
                snr_db: snr.is_finite().then_some(snr),
                support_detected: support_detected(s, &estimate).map_err(numerical)?,
                success: judge(s, &estimate, &bundle.q, 40.0).map_err(numerical)?,
            })
        }
        _ => None,
    };
    Ok(RecoverReport {
        algorithm: spec.label(),
        estimate,
        iterations: recovery.iterations,
        converged: recovery.converged,
        metrics,
        trace,
    })
}

fn numerical(e: Error) -> Failure {
    Failure::Numerical(e.into())
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match workers {
        Some(w) => with_workers(w, f).map_err(|e| Failure::Config(e.into())),
        None => Ok(f()),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?)
}

fn to_json<T: Serialize>(v: &T) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(v).map_err(anyhow::Error::from)?)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn parse_list(spec: &str) -> anyhow::Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
                if a > b {
                    bail!("empty range `{part}`");
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().with_context(|| format!("bad value `{part}`"))?),
        }
    }
    if out.is_empty() {
        bail!("no sparsity levels given");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_ranges() {
        assert_eq!(parse_list("0,4-6, 9").unwrap(), vec![0, 4, 5, 6, 9]);
        assert!(parse_list("5-3").is_err());
        assert!(parse_list("").is_err());
        assert!(parse_list("a").is_err());
    }
}
