use rayon::prelude::*;
use serde::Serialize;

use crate::density_process::{gillespie_simulate, CountVector, DensityParams, GillespieConfig};
use crate::error::{Error, Result};
use crate::meanfield_ode::{integrate, IntegrateOptions, OdeState, RateConvention};
use crate::ring_sim::{empirical_proportion, simulate, RingConfig, Sampling};
use crate::rng::cell_stream;
use crate::state_space::SuperNodeVector;
use crate::stats::ConfidenceInterval;

use super::config::ExperimentConfig;
use super::convergence::{ConfidenceIntervalReport, CI_LEVEL};

/// Spacing of the comparison grid.
pub const GRID_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftRow {
    pub n: usize,
    /// Per-replication `max_t |Z(t) - z(t)|`, summarized over replications.
    pub max_deviation: ConfidenceIntervalReport,
    /// `max_t` of the replication-averaged path minus the ODE.
    pub mean_path_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingGap {
    pub n: usize,
    /// `max_t |ring average - ODE|` for the tracked coordinate.
    pub ring_vs_ode: f64,
    /// `max_t |density average - ODE|` at the same N.
    pub density_vs_ode: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftReport {
    pub coordinate: SuperNodeVector,
    pub t_max: f64,
    pub grid_step: f64,
    pub rows: Vec<DriftRow>,
    /// Mean per-replication deviation strictly decreases along the n-list.
    pub decreasing: bool,
    pub ring_gap: RingGap,
}

fn grid(t_max: f64) -> Vec<f64> {
    let steps = (t_max / GRID_STEP).round() as usize;
    (0..=steps).map(|j| j as f64 * GRID_STEP).collect()
}

/// Piecewise-constant path of one coordinate of a density-process run,
/// read at the grid points.
fn density_path(n: usize, config: &ExperimentConfig, params: &DensityParams, stream: u64, times: &[f64]) -> Result<Vec<f64>> {
    let zero = SuperNodeVector::zeros(config.k);
    let initial = CountVector::concentrated(zero.clone(), n as u64)?;
    let gc = GillespieConfig { horizon: config.t_max, max_events: None, seed: config.seed, stream };
    let mut path = Vec::with_capacity(times.len());
    let mut current = 1.0;
    gillespie_simulate(initial, params, &gc, |t, m| {
        while path.len() < times.len() && times[path.len()] < t {
            path.push(current);
        }
        current = m.get(&zero) as f64 / n as f64;
    })?;
    path.resize(times.len(), current);
    Ok(path)
}

fn ring_path(n: usize, config: &ExperimentConfig, stream: u64, times: &[f64]) -> Result<Vec<f64>> {
    let zero = SuperNodeVector::zeros(config.k);
    let ring = RingConfig {
        n_nodes: n,
        k_neighbors: config.k,
        lambda: config.lambda,
        mu: config.mu,
        seed: config.seed,
        horizon: config.t_max,
    };
    let mut path = Vec::with_capacity(times.len());
    simulate(&ring, vec![0; n], stream, Sampling::Interval { start: 0.0, gap: GRID_STEP }, |_, s| {
        path.push(empirical_proportion(&s.queues, config.k).get(&zero));
    })?;
    path.resize(times.len(), *path.last().unwrap_or(&1.0));
    Ok(path)
}

fn average(paths: &[Vec<f64>]) -> Vec<f64> {
    let len = paths[0].len();
    (0..len).map(|i| paths.iter().map(|p| p[i]).sum::<f64>() / paths.len() as f64).collect()
}

fn sup_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Density-process paths of the all-empty coordinate against the mean-field
/// trajectory, everything started from empty queues. The ring is run at the
/// largest N as a side-by-side diagnostic.
pub fn run_drift_comparison(config: &ExperimentConfig) -> Result<DriftReport> {
    if config.n_list.is_empty() {
        return Err(Error::config("drift comparison needs a non-empty n-list"));
    }
    let times = grid(config.t_max);
    let every = (GRID_STEP / config.dt).round();
    if every < 1.0 || ((every * config.dt) - GRID_STEP).abs() > 1e-9 {
        return Err(Error::config(format!("dt={} must divide the grid step {GRID_STEP}", config.dt)));
    }
    let opts = IntegrateOptions {
        t_max: times.last().copied().unwrap_or(0.0),
        dt: config.dt,
        sample_interval: Some(GRID_STEP),
        convention: RateConvention::Balanced,
    };
    let traj = integrate(OdeState::empty_system(config.k, config.cap)?, config.lambda, config.mu, &opts)?;
    let ode: Vec<f64> = traj.samples.iter().map(|s| s.z[0]).collect();
    if ode.len() != times.len() {
        return Err(Error::config("ODE samples do not line up with the comparison grid"));
    }
    let params = DensityParams::new(config.k, config.lambda, config.mu).with_cap(config.cap);

    let mut rows = Vec::new();
    let mut last_density = Vec::new();
    for (ci, &n) in config.n_list.iter().enumerate() {
        let paths = (0..config.replications)
            .into_par_iter()
            .map(|rep| density_path(n, config, &params, cell_stream(ci, rep), &times))
            .collect::<Result<Vec<_>>>()?;
        let devs: Vec<f64> = paths.iter().map(|p| sup_gap(p, &ode)).collect();
        let mean_path = average(&paths);
        rows.push(DriftRow {
            n,
            max_deviation: ConfidenceInterval::of(&devs, CI_LEVEL).into(),
            mean_path_deviation: sup_gap(&mean_path, &ode),
        });
        last_density = mean_path;
    }
    let decreasing = rows.windows(2).all(|w| w[1].max_deviation.mean < w[0].max_deviation.mean);

    let n_ring = *config.n_list.last().expect("checked non-empty");
    let ring_cell = config.n_list.len();
    let ring_paths = (0..config.replications)
        .into_par_iter()
        .map(|rep| ring_path(n_ring, config, cell_stream(ring_cell, rep), &times))
        .collect::<Result<Vec<_>>>()?;
    let ring_gap = RingGap {
        n: n_ring,
        ring_vs_ode: sup_gap(&average(&ring_paths), &ode),
        density_vs_ode: sup_gap(&last_density, &ode),
    };

    Ok(DriftReport {
        coordinate: SuperNodeVector::zeros(config.k),
        t_max: config.t_max,
        grid_step: GRID_STEP,
        rows,
        decreasing,
        ring_gap,
    })
}
