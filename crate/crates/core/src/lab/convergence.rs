use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_stable, Error, Result};
use crate::jsq_reference::jsq_stationary;
use crate::ring_sim::{stationary_estimate, RingConfig, StationaryOptions};
use crate::rng::cell_stream;
use crate::state_space::{rho_distance, total_variation};
use crate::stats::ConfidenceInterval;

use super::config::ExperimentConfig;

/// Header of the convergence CSV.
pub const CONVERGENCE_HEADER: &str = "n,replication,rho_to_P,tv_to_P,stderr,wall_time_s";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub replication: usize,
    pub rho_to_p: f64,
    pub tv_to_p: f64,
    /// Largest batch-means standard error over entries, weighted like rho.
    pub stderr: f64,
    /// Seconds spent on the cell; zero unless timing was requested.
    pub wall_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeSummary {
    pub n: usize,
    pub rho: ConfidenceIntervalReport,
    pub tv: ConfidenceIntervalReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceIntervalReport {
    pub mean: f64,
    pub half_width: f64,
}

impl From<ConfidenceInterval> for ConfidenceIntervalReport {
    fn from(ci: ConfidenceInterval) -> Self {
        ConfidenceIntervalReport { mean: ci.mean, half_width: ci.half_width }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceSummary {
    pub per_n: Vec<NodeSummary>,
    /// Every consecutive pair of mean rho distances is non-increasing up to
    /// the sum of their 95% half-widths.
    pub non_increasing: bool,
    /// Mean rho distance at the largest N over that at the smallest.
    pub last_over_first: f64,
    pub reference_boundary_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub summary: ConvergenceSummary,
}

/// Level of the per-N confidence intervals.
pub const CI_LEVEL: f64 = 0.95;

/// Ring stationary estimates at every N in `n_list` against the truncated
/// JSQ(k+1) law, one independent stream per `(N, replication)` cell.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    check_stable(config.lambda, config.mu)?;
    if config.n_list.is_empty() || config.replications == 0 {
        return Err(Error::config("convergence needs a non-empty n-list and at least one replication"));
    }
    let reference = jsq_stationary(config.k, config.lambda, config.mu, config.cap)?;
    let p = reference.proportion();
    let opts = StationaryOptions {
        burn_in: config.burn_in,
        n_samples: config.samples,
        sample_gap: config.sample_gap,
        batches: 20,
    };
    let cells: Vec<(usize, usize, usize)> = config
        .n_list
        .iter()
        .enumerate()
        .flat_map(|(ci, &n)| (0..config.replications).map(move |rep| (ci, n, rep)))
        .collect();

    let rows = cells
        .par_iter()
        .map(|&(ci, n, rep)| {
            let start = Instant::now();
            let ring = RingConfig {
                n_nodes: n,
                k_neighbors: config.k,
                lambda: config.lambda,
                mu: config.mu,
                seed: config.seed,
                horizon: 1.0,
            };
            let est = stationary_estimate(&ring, &opts, cell_stream(ci, rep))?;
            let stderr = est
                .std_error
                .iter()
                .map(|(u, se)| se / (f64::from(u.last()) + 1.0))
                .fold(0.0, f64::max);
            let row = ConvergenceRow {
                n,
                replication: rep,
                rho_to_p: rho_distance(&est.mean, &p)?,
                tv_to_p: total_variation(&est.mean, &p)?,
                stderr,
                wall_time: if config.timing { start.elapsed().as_secs_f64() } else { 0.0 },
            };
            log::debug!("N={n} rep={rep} rho={:.5}", row.rho_to_p);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;

    let summary = summarize(&config.n_list, &rows, reference.boundary_mass);
    Ok(ConvergenceReport { rows, summary })
}

pub fn summarize(n_list: &[usize], rows: &[ConvergenceRow], reference_boundary_mass: f64) -> ConvergenceSummary {
    let per_n: Vec<NodeSummary> = n_list
        .iter()
        .map(|&n| {
            let rho: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.rho_to_p).collect();
            let tv: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.tv_to_p).collect();
            NodeSummary {
                n,
                rho: ConfidenceInterval::of(&rho, CI_LEVEL).into(),
                tv: ConfidenceInterval::of(&tv, CI_LEVEL).into(),
            }
        })
        .collect();
    let non_increasing = per_n
        .windows(2)
        .all(|w| w[1].rho.mean <= w[0].rho.mean + w[0].rho.half_width + w[1].rho.half_width);
    let last_over_first = match (per_n.first(), per_n.last()) {
        (Some(a), Some(b)) => b.rho.mean / a.rho.mean,
        _ => f64::NAN,
    };
    ConvergenceSummary { per_n, non_increasing, last_over_first, reference_boundary_mass }
}

pub fn write_convergence_csv<W: Write>(mut w: W, rows: &[ConvergenceRow]) -> Result<()> {
    writeln!(w, "{CONVERGENCE_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{:.10},{:.10},{:.10},{:.6}", r.n, r.replication, r.rho_to_p, r.tv_to_p, r.stderr, r.wall_time)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::config::{ConfigLayer, Mode};

    fn small(n_list: Vec<usize>, k: usize) -> ExperimentConfig {
        let flags = ConfigLayer {
            n_list: Some(n_list),
            k: Some(k),
            lambda: Some(0.5),
            reps: Some(3),
            samples: Some(200),
            seed: Some(5),
            ..Default::default()
        };
        ExperimentConfig::resolve(Mode::Converge, flags, ConfigLayer::default(), None).unwrap()
    }

    #[test]
    fn rows_in_cell_order_and_deterministic() {
        let cfg = small(vec![2, 4], 1);
        let a = run_convergence(&cfg).unwrap();
        let b = run_convergence(&cfg).unwrap();
        assert_eq!(a, b);
        let order: Vec<(usize, usize)> = a.rows.iter().map(|r| (r.n, r.replication)).collect();
        assert_eq!(order, vec![(2, 0), (2, 1), (2, 2), (4, 0), (4, 1), (4, 2)]);
        assert!(a.rows.iter().all(|r| r.rho_to_p >= 0.0 && r.wall_time == 0.0));
        let mut first = Vec::new();
        write_convergence_csv(&mut first, &a.rows).unwrap();
        let mut second = Vec::new();
        write_convergence_csv(&mut second, &b.rows).unwrap();
        assert_eq!(first, second);
        assert!(String::from_utf8(first).unwrap().starts_with("n,replication,rho_to_P,tv_to_P,stderr,wall_time_s\n"));
    }

    #[test]
    fn k0_distance_small_at_every_n() {
        // i.i.d. M/M/1 queues: no N-dependence
        let report = run_convergence(&small(vec![4, 32], 0)).unwrap();
        for s in &report.summary.per_n {
            assert!(s.rho.mean < 0.05, "N={} rho={}", s.n, s.rho.mean);
        }
    }

    #[test]
    fn summary_verdict() {
        let row = |n, rep, rho| ConvergenceRow { n, replication: rep, rho_to_p: rho, tv_to_p: rho, stderr: 0.0, wall_time: 0.0 };
        let rows = vec![row(4, 0, 0.10), row(4, 1, 0.12), row(16, 0, 0.05), row(16, 1, 0.07)];
        let s = summarize(&[4, 16], &rows, 0.0);
        assert!(s.non_increasing);
        assert!((s.last_over_first - 0.06 / 0.11).abs() < 1e-12);
        let rows = vec![row(4, 0, 0.01), row(4, 1, 0.01), row(16, 0, 0.05), row(16, 1, 0.05)];
        assert!(!summarize(&[4, 16], &rows, 0.0).non_increasing);
    }
}
