use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mflab::density_process::{exact_stationary, gillespie_simulate, CountVector, DensityParams, GillespieConfig};
use mflab::jsq_reference::{jsq_stationary, JsqStationary};
use mflab::lab::config::{env_seed, ConfigLayer, ExperimentConfig, Mode};
use mflab::lab::convergence::write_convergence_csv;
use mflab::lab::report::{open_output, with_suffix, write_json, write_meta};
use mflab::lab::{run_cases, run_convergence, run_drift_comparison};
use mflab::meanfield_ode::{fixed_point_with, integrate, FixedPointOptions, IntegrateOptions, OdeState, RateConvention};
use mflab::ring_sim::{stationary_estimate, Event, RingConfig, RingSimulator, StationaryOptions};
use mflab::rng::cell_stream;
use mflab::{Error, ProportionVector, SuperNodeVector};

#[derive(Parser)]
#[command(name = "mflab", version, about = "Local join-the-shortest-queue rings and their mean-field limit")]
#[command(arg_required_else_help = true, propagate_version = true)]
struct Cli {
    /// Key-value (TOML) file with defaults for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Model {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Truncation cap B on every queue.
    #[arg(long)]
    trunc: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

impl Model {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            k: self.k,
            lambda: self.lambda,
            mu: self.mu,
            trunc: self.trunc,
            seed: self.seed,
            out: self.out.clone(),
            ..Default::default()
        }
    }
}

fn flag(on: bool) -> Option<bool> {
    on.then_some(true)
}

#[derive(Subcommand)]
enum Command {
    /// Truncated stationary law of the JSQ(k+1) reference queue (JSON).
    Jsq {
        #[command(flatten)]
        model: Model,
    },
    /// Mean-field trajectory from empty queues (CSV `t,u,z`), or its fixed point (JSON).
    Ode {
        #[command(flatten)]
        model: Model,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Time between recorded samples.
        #[arg(long, default_value_t = 1.0)]
        sample_every: f64,
        #[arg(long)]
        fixed_point: bool,
        /// Use the kλ rate constant without arrival outflow.
        #[arg(long)]
        remark2_literal: bool,
    },
    /// Stationary estimates of the ring's proportion vector (CSV `replication,u,z,std_error`).
    Ring {
        #[command(flatten)]
        model: Model,
        #[arg(long)]
        nodes: Option<usize>,
        /// Length of the optional trajectory export.
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        burn_in: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        gap: Option<f64>,
        #[arg(long)]
        reps: Option<usize>,
        /// Event-level queue lengths of replication 0 (CSV `time,node,queue_len`).
        #[arg(long, value_name = "PATH")]
        trajectory: Option<PathBuf>,
    },
    /// Proportion-process run (CSV `time,u,count`) or its exact stationary law (JSON).
    Density {
        #[command(flatten)]
        model: Model,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        horizon: Option<f64>,
        /// Time between snapshots.
        #[arg(long)]
        gap: Option<f64>,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        remark2_literal: bool,
    },
    /// Ring-vs-reference distance over a list of ring sizes.
    Converge {
        #[command(flatten)]
        model: Model,
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        burn_in: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        gap: Option<f64>,
        /// Record per-cell wall-clock time (makes the CSV non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Oracle checks; exits 1 if any fails.
    Cases {
        #[arg(long)]
        remark2_literal: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Density-process paths against the mean-field trajectory (JSON).
    Drift {
        #[command(flatten)]
        model: Model,
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
    },
}

enum Failure {
    Usage(String),
    Check(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Unstable { .. } | Error::StateSpaceTooLarge { .. } | Error::Malformed(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn resolve(mode: Mode, flags: ConfigLayer, file: Option<&Path>) -> Result<ExperimentConfig, Failure> {
    let file = match file {
        Some(p) => ConfigLayer::from_file(p)?,
        None => ConfigLayer::default(),
    };
    Ok(ExperimentConfig::resolve(mode, flags, file, env_seed()?)?)
}

/// Sidecar with config, seed and version, for file outputs only.
fn finish(cfg: &ExperimentConfig) -> Result<(), Failure> {
    if let Some(out) = &cfg.output {
        write_meta(out, cfg)?;
    }
    Ok(())
}

fn emit_json<T: Serialize>(cfg: &ExperimentConfig, value: &T) -> Result<(), Failure> {
    let mut w = open_output(cfg.output.as_deref())?;
    serde_json::to_writer_pretty(&mut w, value).map_err(Error::from)?;
    writeln!(w)?;
    w.flush()?;
    finish(cfg)
}

#[derive(Serialize)]
struct WithProportion<'a, T: Serialize> {
    #[serde(flatten)]
    inner: &'a T,
    proportion: ProportionVector,
}

fn cmd_jsq(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let st: JsqStationary = jsq_stationary(cfg.k, cfg.lambda, cfg.mu, cfg.cap)?;
    emit_json(cfg, &WithProportion { inner: &st, proportion: st.proportion() })
}

#[derive(Serialize)]
struct FixedPointReport {
    k: usize,
    lambda: f64,
    mu: f64,
    #[serde(rename = "B")]
    cap: u32,
    residual: f64,
    boundary_mass: f64,
    steps: u64,
    proportion: ProportionVector,
}

fn cmd_ode(cfg: &ExperimentConfig, sample_every: f64) -> Result<(), Failure> {
    let convention = RateConvention::from_literal_flag(cfg.remark2_literal);
    if cfg.fixed_point {
        if convention != RateConvention::Balanced {
            return Err(Failure::Usage("the literal rate form does not conserve mass; no fixed point to search".into()));
        }
        let mut opts = FixedPointOptions::for_rates(cfg.mu, 1e-10);
        opts.dt = cfg.dt;
        let fp = fixed_point_with(cfg.k, cfg.lambda, cfg.mu, cfg.cap, &opts)?;
        let report = FixedPointReport {
            k: cfg.k,
            lambda: cfg.lambda,
            mu: cfg.mu,
            cap: cfg.cap,
            residual: fp.residual,
            boundary_mass: fp.boundary_mass,
            steps: fp.steps,
            proportion: fp.state.proportion(),
        };
        return emit_json(cfg, &report);
    }
    let opts = IntegrateOptions { t_max: cfg.t_max, dt: cfg.dt, sample_interval: Some(sample_every), convention };
    let traj = integrate(OdeState::empty_system(cfg.k, cfg.cap)?, cfg.lambda, cfg.mu, &opts)?;
    let mut w = open_output(cfg.output.as_deref())?;
    writeln!(w, "t,u,z")?;
    for s in &traj.samples {
        for (idx, &z) in s.z.iter().enumerate() {
            if z != 0.0 {
                let u = SuperNodeVector::new(s.lattice.decode(idx))?;
                writeln!(w, "{:.6},\"{u}\",{z:.12e}", s.t)?;
            }
        }
    }
    w.flush()?;
    log::info!("max mass drift {:.3e}, min pre-clip {:.3e}", traj.max_mass_drift, traj.min_pre_clip);
    finish(cfg)
}

fn cmd_ring(cfg: &ExperimentConfig, trajectory: Option<&Path>) -> Result<(), Failure> {
    let ring = RingConfig {
        n_nodes: cfg.nodes,
        k_neighbors: cfg.k,
        lambda: cfg.lambda,
        mu: cfg.mu,
        seed: cfg.seed,
        horizon: cfg.horizon,
    };
    let opts = StationaryOptions { burn_in: cfg.burn_in, n_samples: cfg.samples, sample_gap: cfg.sample_gap, batches: 20 };
    let mut w = open_output(cfg.output.as_deref())?;
    writeln!(w, "replication,u,z,std_error")?;
    for rep in 0..cfg.replications {
        let est = stationary_estimate(&ring, &opts, cell_stream(0, rep))?;
        for (u, z) in est.mean.iter() {
            writeln!(w, "{rep},\"{u}\",{z:.10},{:.10}", est.std_error.get(u))?;
        }
    }
    w.flush()?;
    if let Some(path) = trajectory {
        let mut tw = open_output(Some(path))?;
        writeln!(tw, "time,node,queue_len")?;
        for node in 0..cfg.nodes {
            writeln!(tw, "0,{node},0")?;
        }
        let mut sim = RingSimulator::new(ring, vec![0; cfg.nodes], cell_stream(0, 0))?;
        let mut io = Ok(());
        sim.advance_until(cfg.horizon, |ev, s| {
            let node = match ev {
                Event::Arrival { node, .. } | Event::Departure { node } => node,
            };
            if io.is_ok() {
                io = writeln!(tw, "{:.9},{node},{}", s.clock, s.queues[node]);
            }
        });
        io?;
        tw.flush()?;
    }
    finish(cfg)
}

fn cmd_density(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let convention = RateConvention::from_literal_flag(cfg.remark2_literal);
    if cfg.exact {
        if convention != RateConvention::Balanced {
            return Err(Failure::Usage("the exact solve uses the balanced rate constant only".into()));
        }
        let exact = exact_stationary(cfg.nodes as u64, cfg.k, cfg.lambda, cfg.mu, cfg.cap)?;
        return emit_json(cfg, &exact);
    }
    let params = DensityParams::new(cfg.k, cfg.lambda, cfg.mu).with_cap(cfg.cap).with_convention(convention);
    let initial = CountVector::concentrated(SuperNodeVector::zeros(cfg.k), cfg.nodes as u64)?;
    let gc = GillespieConfig { horizon: cfg.horizon, max_events: None, seed: cfg.seed, stream: 0 };
    let gap = cfg.sample_gap;
    let mut w = open_output(cfg.output.as_deref())?;
    writeln!(w, "time,u,count")?;
    let mut next = 0u64;
    let mut io = Ok(());
    let write_snapshot = |w: &mut dyn Write, t: f64, m: &CountVector| -> std::io::Result<()> {
        for (u, c) in m.iter() {
            writeln!(w, "{t:.6},\"{u}\",{c}")?;
        }
        Ok(())
    };
    let mut current: Option<CountVector> = None;
    let outcome = gillespie_simulate(initial, &params, &gc, |t, m| {
        if let Some(prev) = &current {
            while io.is_ok() && (next as f64) * gap < t {
                io = write_snapshot(&mut *w, next as f64 * gap, prev);
                next += 1;
            }
        }
        current = Some(m.clone());
    })?;
    io?;
    while (next as f64) * gap <= cfg.horizon {
        write_snapshot(&mut *w, next as f64 * gap, &outcome.state)?;
        next += 1;
    }
    w.flush()?;
    log::info!("{} events up to t={}", outcome.events, outcome.time);
    finish(cfg)
}

fn cmd_converge(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let report = run_convergence(cfg)?;
    let mut w = open_output(cfg.output.as_deref())?;
    write_convergence_csv(&mut w, &report.rows)?;
    w.flush()?;
    for s in &report.summary.per_n {
        eprintln!("N={:<7} rho {:.5} ± {:.5}   tv {:.5} ± {:.5}", s.n, s.rho.mean, s.rho.half_width, s.tv.mean, s.tv.half_width);
    }
    eprintln!(
        "non-increasing within 95% CIs: {}; last/first = {:.3}",
        report.summary.non_increasing, report.summary.last_over_first
    );
    if let Some(out) = &cfg.output {
        write_json(&with_suffix(out, ".summary.json"), &report.summary)?;
    }
    finish(cfg)
}

fn cmd_cases(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let report = run_cases(cfg)?;
    for c in &report.checks {
        println!("[{}] {:<32} measured {:.3e} (tolerance {:.1e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.measured, c.tolerance);
    }
    if let Some(out) = &cfg.output {
        write_json(out, &report)?;
        finish(cfg)?;
    }
    match report.checks.iter().find(|c| !c.passed) {
        None => Ok(()),
        Some(c) => Err(Failure::Check(format!("{} failed: measured {:e} > {:e}", c.name, c.measured, c.tolerance))),
    }
}

fn cmd_drift(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let report = run_drift_comparison(cfg)?;
    emit_json(cfg, &report)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = cli.config.as_deref();
    match cli.command {
        Command::Jsq { model } => cmd_jsq(&resolve(Mode::Jsq, model.layer(), file)?),
        Command::Ode { model, t_max, dt, sample_every, fixed_point, remark2_literal } => {
            let flags = ConfigLayer { t_max, dt, fixed_point: flag(fixed_point), remark2_literal: flag(remark2_literal), ..model.layer() };
            if !(sample_every > 0.0) {
                return Err(Failure::Usage("--sample-every must be positive".into()));
            }
            cmd_ode(&resolve(Mode::Ode, flags, file)?, sample_every)
        }
        Command::Ring { model, nodes, horizon, burn_in, samples, gap, reps, trajectory } => {
            let flags = ConfigLayer { nodes, horizon, burn_in, samples, gap, reps, ..model.layer() };
            cmd_ring(&resolve(Mode::SimulateRing, flags, file)?, trajectory.as_deref())
        }
        Command::Density { model, nodes, horizon, gap, exact, remark2_literal } => {
            let flags = ConfigLayer { nodes, horizon, gap, exact: flag(exact), remark2_literal: flag(remark2_literal), ..model.layer() };
            cmd_density(&resolve(Mode::Density, flags, file)?)
        }
        Command::Converge { model, n_list, reps, burn_in, samples, gap, timing } => {
            let flags = ConfigLayer { n_list, reps, burn_in, samples, gap, timing: flag(timing), ..model.layer() };
            cmd_converge(&resolve(Mode::Converge, flags, file)?)
        }
        Command::Cases { remark2_literal, seed, out } => {
            let flags = ConfigLayer { remark2_literal: flag(remark2_literal), seed, out, ..Default::default() };
            cmd_cases(&resolve(Mode::Cases, flags, file)?)
        }
        Command::Drift { model, n_list, reps, t_max, dt } => {
            let flags = ConfigLayer { n_list, reps, t_max, dt, ..model.layer() };
            cmd_drift(&resolve(Mode::Drift, flags, file)?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("mflab: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("mflab: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("mflab: {e}");
            ExitCode::from(1)
        }
    }
}
