use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{check_rates, check_stable, Error, Result};

/// Largest ring the harness will simulate.
pub const MAX_NODES: usize = 1_000_000;

/// Environment variable consulted for the seed when neither a flag nor the
/// config file sets one.
pub const SEED_ENV: &str = "MFLAB_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SimulateRing,
    Density,
    Ode,
    Jsq,
    Converge,
    Cases,
    Drift,
}

/// One layer of optional settings. Command-line flags and the key-value
/// config file both produce a layer; [`ExperimentConfig::resolve`] merges them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigLayer {
    pub k: Option<usize>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub n_list: Option<Vec<usize>>,
    pub nodes: Option<usize>,
    pub horizon: Option<f64>,
    pub burn_in: Option<f64>,
    pub samples: Option<usize>,
    pub gap: Option<f64>,
    pub trunc: Option<u32>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub remark2_literal: Option<bool>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub fixed_point: Option<bool>,
    pub exact: Option<bool>,
    pub timing: Option<bool>,
    pub out: Option<PathBuf>,
}

impl ConfigLayer {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(format!("config file: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Fields set here win; unset fields fall back to `lower`.
    pub fn over(self, lower: ConfigLayer) -> ConfigLayer {
        macro_rules! pick {
            ($($f:ident),*) => { ConfigLayer { $($f: self.$f.or(lower.$f)),* } };
        }
        pick!(
            k, lambda, mu, n_list, nodes, horizon, burn_in, samples, gap, trunc, reps, seed,
            remark2_literal, t_max, dt, fixed_point, exact, timing, out
        )
    }
}

/// Fully resolved settings for one run of the harness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub k: usize,
    pub lambda: f64,
    pub mu: f64,
    pub n_list: Vec<usize>,
    pub nodes: usize,
    pub horizon: f64,
    pub burn_in: f64,
    pub samples: usize,
    pub sample_gap: f64,
    #[serde(rename = "B")]
    pub cap: u32,
    pub replications: usize,
    pub seed: u64,
    pub remark2_literal: bool,
    pub t_max: f64,
    pub dt: f64,
    pub fixed_point: bool,
    pub exact: bool,
    /// Record wall-clock times; off by default so reports are byte-stable.
    pub timing: bool,
    pub output: Option<PathBuf>,
}

/// Default truncation cap for a `(k+1)`-dimensional box.
pub fn default_cap(k: usize) -> u32 {
    match k {
        0 => 60,
        1 => 40,
        2 => 20,
        _ => 8,
    }
}

impl ExperimentConfig {
    /// Merge `flags` over `file`, fill defaults, and validate for `mode`.
    /// The seed falls back to `env_seed` only when neither layer sets it.
    pub fn resolve(mode: Mode, flags: ConfigLayer, file: ConfigLayer, env_seed: Option<u64>) -> Result<Self> {
        let c = flags.over(file);
        let k = c.k.unwrap_or(1);
        let lambda = c.lambda.unwrap_or(0.7);
        let mu = c.mu.unwrap_or(1.0);
        let default_n_list = if mode == Mode::Drift { vec![8, 32, 128] } else { vec![4, 16, 64, 256] };
        let default_t_max = if mode == Mode::Drift { 10.0 } else { 50.0 };
        let burn_in = c.burn_in.unwrap_or_else(|| if mu > lambda { 10.0 / (mu - lambda) } else { 0.0 });
        let cfg = ExperimentConfig {
            mode,
            k,
            lambda,
            mu,
            n_list: c.n_list.unwrap_or(default_n_list),
            nodes: c.nodes.unwrap_or(16),
            horizon: c.horizon.unwrap_or(100.0),
            burn_in,
            samples: c.samples.unwrap_or(2000),
            sample_gap: c.gap.unwrap_or(1.0),
            cap: c.trunc.unwrap_or_else(|| default_cap(k)),
            replications: c.reps.unwrap_or(20),
            seed: c.seed.or(env_seed).unwrap_or(1),
            remark2_literal: c.remark2_literal.unwrap_or(false),
            t_max: c.t_max.unwrap_or(default_t_max),
            dt: c.dt.unwrap_or(0.01),
            fixed_point: c.fixed_point.unwrap_or(false),
            exact: c.exact.unwrap_or(false),
            timing: c.timing.unwrap_or(false),
            output: c.out,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_rates(self.lambda, self.mu)?;
        if self.replications == 0 {
            return Err(Error::config("replications must be at least 1"));
        }
        if self.cap == 0 {
            return Err(Error::config("truncation cap must be at least 1"));
        }
        match self.mode {
            Mode::Converge | Mode::Drift => {
                if self.n_list.is_empty() {
                    return Err(Error::config("n-list is empty"));
                }
                if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::config("n-list must be strictly increasing"));
                }
                for &n in &self.n_list {
                    self.check_nodes(n)?;
                }
            }
            Mode::SimulateRing | Mode::Density => self.check_nodes(self.nodes)?,
            Mode::Ode => {
                if !(self.dt > 0.0 && self.t_max >= 0.0) {
                    return Err(Error::config("ode needs dt > 0 and t-max >= 0"));
                }
            }
            Mode::Jsq | Mode::Cases => {}
        }
        let needs_stability = match self.mode {
            Mode::Jsq | Mode::Converge | Mode::SimulateRing => true,
            Mode::Ode => self.fixed_point,
            Mode::Density => self.exact,
            Mode::Cases | Mode::Drift => false,
        };
        if needs_stability {
            check_stable(self.lambda, self.mu)?;
        }
        if matches!(self.mode, Mode::SimulateRing | Mode::Converge) {
            if self.samples < 20 {
                return Err(Error::config("need at least 20 samples for batch means"));
            }
            if !(self.sample_gap > 0.0 && self.burn_in >= 0.0) {
                return Err(Error::config("sample gap must be positive and burn-in nonnegative"));
            }
        }
        if matches!(self.mode, Mode::Density | Mode::Drift | Mode::SimulateRing) && !(self.horizon > 0.0) {
            return Err(Error::config("horizon must be positive"));
        }
        Ok(())
    }

    fn check_nodes(&self, n: usize) -> Result<()> {
        if n == 0 || n > MAX_NODES {
            return Err(Error::config(format!("N={n} outside 1..={MAX_NODES}")));
        }
        if self.k >= n {
            return Err(Error::config(format!("k={} must be below N={n}", self.k)));
        }
        Ok(())
    }
}

/// Seed from [`SEED_ENV`], if set and parseable.
pub fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::config(format!("{SEED_ENV}={s:?} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}
