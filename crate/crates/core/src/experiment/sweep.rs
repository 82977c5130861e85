//! Sparsity sweeps and phase-transition grids built from suites.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::{AlgorithmSpec, SuiteConfig};
use super::generate::CoeffDist;
use super::metrics::DEFAULT_SNR_THRESHOLD_DB;
use super::suite::run_suite;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kappa: usize,
    /// `κ / N`.
    pub ratio: f64,
    /// Success rate in percent per algorithm, in table label order.
    pub percent: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub n: usize,
    pub l: usize,
    pub j: usize,
    pub labels: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("kappa,ratio,{}\n", self.labels.join(","));
        for row in &self.rows {
            let _ = write!(out, "{},{:.4}", row.kappa, row.ratio);
            for p in &row.percent {
                let _ = write!(out, ",{p:.2}");
            }
            out.push('\n');
        }
        out
    }

    /// Success percentage of `label` at `kappa`.
    pub fn percent(&self, label: &str, kappa: usize) -> Option<f64> {
        let col = self.labels.iter().position(|l| l == label)?;
        self.rows.iter().find(|r| r.kappa == kappa).map(|r| r.percent[col])
    }
}

/// One suite per sparsity level, all sharing the base seed and dimensions.
pub fn run_sweep(base: &SuiteConfig, kappas: &[usize]) -> Result<SweepTable> {
    let labels: Vec<String> = base.algorithms.iter().map(AlgorithmSpec::label).collect();
    let rows = kappas
        .iter()
        .map(|&kappa| {
            let cfg = SuiteConfig { kappa, ..base.clone() };
            let run = run_suite(&cfg)?;
            Ok(SweepRow {
                kappa,
                ratio: kappa as f64 / base.n as f64,
                percent: run.report.algorithms.iter().map(|a| a.percent).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        n: base.n,
        l: base.l,
        j: base.j,
        labels,
        rows,
    })
}

fn default_l_factor() -> usize {
    2
}

fn default_threshold() -> f64 {
    DEFAULT_SNR_THRESHOLD_DB
}

/// A grid over signal dimension `N` and sparsity ratio `κ/N`, with
/// `L = l_factor · N` and `κ = round(ratio · N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpec {
    pub ns: Vec<usize>,
    pub ratios: Vec<f64>,
    #[serde(default = "default_l_factor")]
    pub l_factor: usize,
    #[serde(alias = "J")]
    pub j: usize,
    pub master_seed: u64,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default = "default_threshold")]
    pub snr_threshold_db: f64,
    #[serde(default)]
    pub coeff_dist: CoeffDist,
}

impl PhaseSpec {
    pub fn kappa(&self, n: usize, ratio: f64) -> usize {
        ((ratio * n as f64).round() as usize).min(n)
    }

    fn validate(&self) -> Result<()> {
        if self.ns.is_empty() || self.ratios.is_empty() {
            return Err(Error::InvalidProblem("phase grid needs at least one N and one ratio".into()));
        }
        if self.l_factor < 2 {
            return Err(Error::InvalidProblem("l_factor must be at least 2".into()));
        }
        if self.ratios.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::InvalidProblem("ratios must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub spec: PhaseSpec,
    pub labels: Vec<String>,
    /// `rho[a][i][k]`: success rate of algorithm `a` at `ns[i]`, `ratios[k]`.
    pub rho: Vec<Vec<Vec<f64>>>,
}

pub fn run_phase(spec: &PhaseSpec) -> Result<PhaseGrid> {
    spec.validate()?;
    let labels: Vec<String> = spec.algorithms.iter().map(AlgorithmSpec::label).collect();
    let mut rho = vec![vec![vec![0.0; spec.ratios.len()]; spec.ns.len()]; labels.len()];
    for (i, &n) in spec.ns.iter().enumerate() {
        for (k, &ratio) in spec.ratios.iter().enumerate() {
            let cfg = SuiteConfig {
                snr_threshold_db: spec.snr_threshold_db,
                coeff_dist: spec.coeff_dist,
                ..SuiteConfig::new(spec.kappa(n, ratio), n, spec.l_factor * n, spec.j, spec.master_seed)
                    .with_algorithms(spec.algorithms.iter().copied())
            };
            let run = run_suite(&cfg)?;
            for (a, summary) in run.report.algorithms.iter().enumerate() {
                rho[a][i][k] = summary.rho_ok;
            }
        }
    }
    Ok(PhaseGrid {
        spec: spec.clone(),
        labels,
        rho,
    })
}

impl PhaseGrid {
    /// Rows are `N`, columns are ratios.
    pub fn to_csv(&self, algorithm: usize) -> String {
        let mut out = String::from("n");
        for r in &self.spec.ratios {
            let _ = write!(out, ",{r}");
        }
        out.push('\n');
        for (i, n) in self.spec.ns.iter().enumerate() {
            let _ = write!(out, "{n}");
            for v in &self.rho[algorithm][i] {
                let _ = write!(out, ",{v:.4}");
            }
            out.push('\n');
        }
        out
    }

    /// One heatmap panel per algorithm, `N` upwards and `κ/N` rightwards.
    pub fn to_svg(&self) -> String {
        const CELL: usize = 28;
        const PAD: usize = 60;
        let cols = self.spec.ratios.len();
        let rows = self.spec.ns.len();
        let panel_w = cols * CELL + PAD + 20;
        let panel_h = rows * CELL + PAD + 30;
        let width = panel_w * self.labels.len().max(1);
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{panel_h}\" \
             font-family=\"sans-serif\" font-size=\"10\">\n"
        );
        for (a, label) in self.labels.iter().enumerate() {
            let x0 = a * panel_w + PAD;
            let y0 = 25;
            let _ = writeln!(svg, "<text x=\"{x0}\" y=\"15\" font-size=\"12\">{label}</text>");
            for i in 0..rows {
                // Largest N at the top.
                let y = y0 + (rows - 1 - i) * CELL;
                let _ = writeln!(
                    svg,
                    "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
                    x0 - 4,
                    y + CELL / 2 + 3,
                    self.spec.ns[i]
                );
                for k in 0..cols {
                    let v = self.rho[a][i][k].clamp(0.0, 1.0);
                    let shade = (255.0 * (1.0 - v)).round() as u8;
                    let _ = writeln!(
                        svg,
                        "<rect x=\"{}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" \
                         fill=\"rgb({shade},{shade},255)\"><title>{:.2}</title></rect>",
                        x0 + k * CELL,
                        v
                    );
                }
            }
            for (k, r) in self.spec.ratios.iter().enumerate() {
                let _ = writeln!(
                    svg,
                    "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{r}</text>",
                    x0 + k * CELL + CELL / 2,
                    y0 + rows * CELL + 12
                );
            }
            let _ = writeln!(
                svg,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">kappa/N</text>",
                x0 + cols * CELL / 2,
                y0 + rows * CELL + 26
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_includes_kappa_zero() {
        let base = SuiteConfig::new(0, 8, 16, 4, 2).with_algorithms([AlgorithmSpec::OmpC, AlgorithmSpec::OmpIhd]);
        let table = run_sweep(&base, &[0, 1, 2]).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert_eq!(table.percent("omp_c", 0), Some(100.0));
        assert_eq!(table.percent("omp_ihd", 1), Some(100.0));
        let csv = table.to_csv();
        assert!(csv.starts_with("kappa,ratio,omp_c,omp_ihd\n0,0.0000,100.00,100.00\n"));
    }

    #[test]
    fn phase_grid_outputs() {
        let spec = PhaseSpec {
            ns: vec![8, 12],
            ratios: vec![0.125, 0.25],
            l_factor: 2,
            j: 3,
            master_seed: 4,
            algorithms: vec![AlgorithmSpec::OmpHd],
            snr_threshold_db: 40.0,
            coeff_dist: CoeffDist::Normal,
        };
        let grid = run_phase(&spec).unwrap();
        assert_eq!(grid.rho[0][0][0], 1.0);
        let csv = grid.to_csv(0);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("n,0.125,0.25\n8,1.0000,"));
        let svg = grid.to_svg();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<rect").count(), 4);
    }
}
