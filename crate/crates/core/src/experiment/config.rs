//! Benchmark configuration.

use serde::{Deserialize, Serialize};

use super::generate::CoeffDist;
use super::metrics::DEFAULT_SNR_THRESHOLD_DB;
use crate::error::{Error, Result};
use crate::gbp::LpEncoding;

/// An algorithm and its parameters, tagged by `id` in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum AlgorithmSpec {
    OmpC,
    BpC,
    OmpHd,
    OmpIhd,
    AlgGbp {
        #[serde(default)]
        warm_start: bool,
        #[serde(default)]
        encoding: LpEncoding,
    },
    AlgL2l1 {
        lambda: usize,
        #[serde(default)]
        n_ite: Option<usize>,
    },
    CosampC,
}

impl AlgorithmSpec {
    /// Default Alg_GBP.
    pub const GBP: Self = Self::AlgGbp {
        warm_start: false,
        encoding: LpEncoding::Reduced,
    };

    pub const fn l2l1(lambda: usize) -> Self {
        Self::AlgL2l1 { lambda, n_ite: None }
    }

    /// Short stable name used in CSV output.
    pub fn label(&self) -> String {
        match *self {
            Self::OmpC => "omp_c".into(),
            Self::BpC => "bp_c".into(),
            Self::OmpHd => "omp_hd".into(),
            Self::OmpIhd => "omp_ihd".into(),
            Self::AlgGbp { warm_start, encoding } => {
                let mut s = String::from("alg_gbp");
                if warm_start {
                    s.push_str("_warm");
                }
                if encoding == LpEncoding::Literal {
                    s.push_str("_literal");
                }
                s
            }
            Self::AlgL2l1 { lambda, n_ite } => match n_ite {
                Some(n) => format!("alg_l2l1_{lambda}_n{n}"),
                None => format!("alg_l2l1_{lambda}"),
            },
            Self::CosampC => "cosamp_c".into(),
        }
    }

    /// Methods that operate on the lifted system.
    pub fn is_lifted(&self) -> bool {
        matches!(
            self,
            Self::OmpHd | Self::OmpIhd | Self::AlgGbp { .. } | Self::AlgL2l1 { .. }
        )
    }

    /// Parse a label as produced by [`label`](Self::label) plus `lambda`
    /// and `warm_start` overrides, for command-line use.
    pub fn from_id(id: &str, lambda: Option<usize>, warm_start: bool) -> Result<Self> {
        let spec = match id {
            "omp_c" => Self::OmpC,
            "bp_c" => Self::BpC,
            "omp_hd" => Self::OmpHd,
            "omp_ihd" => Self::OmpIhd,
            "alg_gbp" => Self::AlgGbp {
                warm_start,
                encoding: LpEncoding::Reduced,
            },
            "alg_l2l1" => Self::l2l1(lambda.unwrap_or(2)),
            "cosamp_c" => Self::CosampC,
            other => return Err(Error::InvalidProblem(format!("unknown algorithm `{other}`"))),
        };
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if let Self::AlgL2l1 { lambda: 0, .. } = self {
            return Err(Error::InvalidProblem("alg_l2l1 needs lambda >= 1".into()));
        }
        Ok(())
    }
}

fn default_threshold() -> f64 {
    DEFAULT_SNR_THRESHOLD_DB
}

/// One Monte-Carlo experiment: `j` samples at fixed `(κ, N, L)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub kappa: usize,
    #[serde(alias = "N")]
    pub n: usize,
    #[serde(alias = "L")]
    pub l: usize,
    #[serde(alias = "J")]
    pub j: usize,
    pub master_seed: u64,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default = "default_threshold")]
    pub snr_threshold_db: f64,
    #[serde(default)]
    pub coeff_dist: CoeffDist,
    /// Draw one dictionary for the whole run instead of one per sample.
    #[serde(default)]
    pub shared_dictionary: bool,
}

impl SuiteConfig {
    pub fn new(kappa: usize, n: usize, l: usize, j: usize, master_seed: u64) -> Self {
        Self {
            kappa,
            n,
            l,
            j,
            master_seed,
            algorithms: Vec::new(),
            snr_threshold_db: DEFAULT_SNR_THRESHOLD_DB,
            coeff_dist: CoeffDist::default(),
            shared_dictionary: false,
        }
    }

    pub fn with_algorithms(mut self, algorithms: impl IntoIterator<Item = AlgorithmSpec>) -> Self {
        self.algorithms = algorithms.into_iter().collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n >= self.l || self.kappa > self.n {
            return Err(Error::InvalidProblem(format!(
                "need kappa <= N < L with N >= 1, got kappa={}, N={}, L={}",
                self.kappa, self.n, self.l
            )));
        }
        if self.j == 0 {
            return Err(Error::InvalidProblem("J must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidProblem("no algorithms requested".into()));
        }
        if !self.snr_threshold_db.is_finite() {
            return Err(Error::InvalidProblem("snr_threshold_db must be finite".into()));
        }
        let mut labels: Vec<String> = self.algorithms.iter().map(AlgorithmSpec::label).collect();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidProblem("duplicate algorithm in config".into()));
        }
        self.algorithms.iter().try_for_each(AlgorithmSpec::validate)
    }
}
