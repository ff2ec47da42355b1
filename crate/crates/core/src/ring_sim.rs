//! Event-driven simulation of the N-node ring with local join-the-shortest-
//! queue routing.
//!
//! Node `i` owns a Poisson arrival stream of rate `lambda`; each arrival joins
//! the shortest queue among `i, i+1, ..., i+k (mod N)`, ties broken
//! uniformly, and every busy server completes work at rate `mu`.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::ctmc::{stationary_distribution, SparseGenerator};
use crate::density_process::CountVector;
use crate::error::{check_rates, check_stable, Error, Result};
use crate::rng::stream_rng;
use crate::state_space::{BoxLattice, ProportionVector, SuperNodeVector};
use crate::stats::batch_means_stderr;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RingConfig {
    pub n_nodes: usize,
    pub k_neighbors: usize,
    pub lambda: f64,
    pub mu: f64,
    pub seed: u64,
    pub horizon: f64,
}

impl RingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_nodes == 0 {
            return Err(Error::config("the ring needs at least one node"));
        }
        if self.k_neighbors >= self.n_nodes {
            return Err(Error::config(format!("k={} must be below N={}", self.k_neighbors, self.n_nodes)));
        }
        check_rates(self.lambda, self.mu)?;
        if !(self.horizon > 0.0) {
            return Err(Error::config(format!("horizon must be positive, got {}", self.horizon)));
        }
        Ok(())
    }
}

/// Queue lengths (jobs present, including the one in service) at `clock`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub queues: Vec<u32>,
    pub clock: f64,
}

impl NetworkState {
    pub fn empty(n: usize) -> Self {
        NetworkState { queues: vec![0; n], clock: 0.0 }
    }

    pub fn total_jobs(&self) -> u64 {
        self.queues.iter().map(|&q| u64::from(q)).sum()
    }
}

/// Ring neighbours `i+1, ..., i+k (mod n)`.
pub fn neighbors(i: usize, n: usize, k: usize) -> Result<Vec<usize>> {
    if k >= n {
        return Err(Error::config(format!("k={k} must be below N={n}")));
    }
    if i >= n {
        return Err(Error::config(format!("node {i} outside a ring of {n}")));
    }
    Ok((1..=k).map(|d| (i + d) % n).collect())
}

/// Destination of a job arriving on stream `i`.
pub fn route_arrival<R: Rng + ?Sized>(queues: &[u32], i: usize, k: usize, rng: &mut R) -> usize {
    let n = queues.len();
    let mut shortest = u32::MAX;
    let mut ties = 0u32;
    for d in 0..=k {
        let q = queues[(i + d) % n];
        if q < shortest {
            shortest = q;
            ties = 1;
        } else if q == shortest {
            ties += 1;
        }
    }
    if ties == 1 {
        return (0..=k).map(|d| (i + d) % n).find(|&j| queues[j] == shortest).unwrap();
    }
    let pick = rng.random_range(0..ties);
    (0..=k).map(|d| (i + d) % n).filter(|&j| queues[j] == shortest).nth(pick as usize).unwrap()
}

/// `(q_i, q_{i+1}, ..., q_{i+k})` with indices mod `N`.
pub fn supernode_view(queues: &[u32], i: usize, k: usize) -> SuperNodeVector {
    let n = queues.len();
    SuperNodeVector::new((0..=k).map(|d| queues[(i + d) % n]).collect()).expect("k + 1 >= 1 coordinates")
}

/// Integer supernode counts of a ring state.
pub fn empirical_counts(queues: &[u32], k: usize) -> CountVector {
    CountVector::new(k, (0..queues.len()).map(|i| (supernode_view(queues, i, k), 1))).expect("non-empty ring")
}

/// Fraction of supernodes in each configuration.
pub fn empirical_proportion(queues: &[u32], k: usize) -> ProportionVector {
    empirical_counts(queues, k).proportion()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    Arrival { stream: usize, node: usize },
    Departure { node: usize },
}

/// Stepping simulator. Arrivals and departures are drawn from the aggregate
/// rate `N lambda + mu * busy`; busy servers are tracked in an index so each
/// event costs O(k).
pub struct RingSimulator {
    config: RingConfig,
    state: NetworkState,
    rng: ChaCha8Rng,
    busy: Vec<usize>,
    busy_pos: Vec<usize>,
    events: u64,
}

const IDLE: usize = usize::MAX;

impl RingSimulator {
    pub fn new(config: RingConfig, initial: Vec<u32>, stream: u64) -> Result<Self> {
        config.validate()?;
        if initial.len() != config.n_nodes {
            return Err(Error::config(format!("initial state has {} queues, expected {}", initial.len(), config.n_nodes)));
        }
        let mut busy = Vec::new();
        let mut busy_pos = vec![IDLE; config.n_nodes];
        for (i, &q) in initial.iter().enumerate() {
            if q > 0 {
                busy_pos[i] = busy.len();
                busy.push(i);
            }
        }
        Ok(RingSimulator {
            rng: stream_rng(config.seed, stream),
            state: NetworkState { queues: initial, clock: 0.0 },
            config,
            busy,
            busy_pos,
            events: 0,
        })
    }

    pub fn state(&self) -> &NetworkState {
        &self.state
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    fn total_rate(&self) -> f64 {
        self.config.n_nodes as f64 * self.config.lambda + self.config.mu * self.busy.len() as f64
    }

    fn increment(&mut self, node: usize) {
        if self.state.queues[node] == 0 {
            self.busy_pos[node] = self.busy.len();
            self.busy.push(node);
        }
        self.state.queues[node] += 1;
    }

    fn decrement(&mut self, node: usize) {
        self.state.queues[node] -= 1;
        if self.state.queues[node] == 0 {
            let pos = self.busy_pos[node];
            let last = *self.busy.last().unwrap();
            self.busy.swap_remove(pos);
            if last != node {
                self.busy_pos[last] = pos;
            }
            self.busy_pos[node] = IDLE;
        }
    }

    /// Runs events up to time `until` and parks the clock there. The pending
    /// exponential clock is discarded at the boundary, which is exact by
    /// memorylessness.
    pub fn advance_until(&mut self, until: f64, mut on_event: impl FnMut(Event, &NetworkState)) {
        loop {
            let total = self.total_rate();
            if total <= 0.0 {
                break;
            }
            let wait: f64 = Exp1.sample(&mut self.rng);
            let next = self.state.clock + wait / total;
            if next > until {
                break;
            }
            self.state.clock = next;
            let arrivals = self.config.n_nodes as f64 * self.config.lambda;
            let event = if self.rng.random::<f64>() * total < arrivals {
                let stream = self.rng.random_range(0..self.config.n_nodes);
                let node = route_arrival(&self.state.queues, stream, self.config.k_neighbors, &mut self.rng);
                self.increment(node);
                Event::Arrival { stream, node }
            } else {
                let node = self.busy[self.rng.random_range(0..self.busy.len())];
                self.decrement(node);
                Event::Departure { node }
            };
            self.events += 1;
            on_event(event, &self.state);
        }
        self.state.clock = self.state.clock.max(until);
    }
}

/// When [`simulate`] calls its observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampling {
    EveryEvent,
    /// At `start, start + gap, ...` up to the horizon.
    Interval { start: f64, gap: f64 },
}

pub fn simulate(
    config: &RingConfig,
    initial: Vec<u32>,
    stream: u64,
    sampling: Sampling,
    mut observer: impl FnMut(f64, &NetworkState),
) -> Result<NetworkState> {
    let mut sim = RingSimulator::new(*config, initial, stream)?;
    match sampling {
        Sampling::EveryEvent => sim.advance_until(config.horizon, |_, s| observer(s.clock, s)),
        Sampling::Interval { start, gap } => {
            if !(gap > 0.0) || start < 0.0 {
                return Err(Error::config("sampling needs start >= 0 and gap > 0"));
            }
            let mut j = 0u64;
            loop {
                let t = start + j as f64 * gap;
                if t > config.horizon {
                    break;
                }
                sim.advance_until(t, |_, _| {});
                observer(t, sim.state());
                j += 1;
            }
            sim.advance_until(config.horizon, |_, _| {});
        }
    }
    Ok(sim.state)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryOptions {
    pub burn_in: f64,
    pub n_samples: usize,
    pub sample_gap: f64,
    pub batches: usize,
}

impl StationaryOptions {
    /// Burn-in `10 / (mu - lambda)`, unit sample gap, 20 batches.
    pub fn defaults(lambda: f64, mu: f64, n_samples: usize) -> Self {
        StationaryOptions { burn_in: 10.0 / (mu - lambda), n_samples, sample_gap: 1.0, batches: 20 }
    }
}

#[derive(Debug, Clone)]
pub struct StationaryEstimate {
    pub mean: ProportionVector,
    /// Batch-means standard error of every entry of `mean`.
    pub std_error: ProportionVector,
    pub n_samples: usize,
    pub events: u64,
}

/// Time-sampled average of the empirical proportion vector after burn-in,
/// starting from an empty ring. `config.horizon` is replaced by the end of
/// the sampling window.
pub fn stationary_estimate(config: &RingConfig, opts: &StationaryOptions, stream: u64) -> Result<StationaryEstimate> {
    check_stable(config.lambda, config.mu)?;
    if !(opts.burn_in >= 0.0 && opts.sample_gap > 0.0) {
        return Err(Error::config("burn-in must be >= 0 and the sample gap positive"));
    }
    if opts.batches < 2 || opts.n_samples < opts.batches {
        return Err(Error::config(format!("need at least {} samples for {} batches", opts.batches.max(2), opts.batches)));
    }
    let horizon = opts.burn_in + (opts.n_samples - 1) as f64 * opts.sample_gap;
    let cfg = RingConfig { horizon: horizon.max(f64::MIN_POSITIVE), ..*config };
    let mut sim = RingSimulator::new(cfg, vec![0; cfg.n_nodes], stream)?;

    let k = cfg.k_neighbors;
    let n = cfg.n_nodes;
    let batch_len = opts.n_samples / opts.batches;
    let mut batch_counts: Vec<HashMap<Vec<u32>, u64>> = vec![HashMap::new(); opts.batches];
    let mut view = vec![0u32; k + 1];
    for s in 0..opts.n_samples {
        sim.advance_until(opts.burn_in + s as f64 * opts.sample_gap, |_, _| {});
        // trailing samples that do not fill a batch go into the last one
        let batch = (s / batch_len).min(opts.batches - 1);
        let counts = &mut batch_counts[batch];
        let queues = &sim.state().queues;
        for i in 0..n {
            for (d, slot) in view.iter_mut().enumerate() {
                *slot = queues[(i + d) % n];
            }
            match counts.get_mut(view.as_slice()) {
                Some(c) => *c += 1,
                None => {
                    counts.insert(view.clone(), 1);
                }
            }
        }
    }

    let batch_sizes: Vec<usize> =
        (0..opts.batches).map(|b| if b + 1 == opts.batches { opts.n_samples - b * batch_len } else { batch_len }).collect();
    let mut keys: Vec<&Vec<u32>> = batch_counts.iter().flat_map(|m| m.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut mean = ProportionVector::new(k);
    let mut std_error = ProportionVector::new(k);
    let total_obs = (opts.n_samples * n) as f64;
    for key in keys {
        let u = SuperNodeVector::new(key.clone())?;
        let mut total = 0u64;
        let per_batch: Vec<f64> = batch_counts
            .iter()
            .zip(&batch_sizes)
            .map(|(m, &size)| {
                let c = m.get(key).copied().unwrap_or(0);
                total += c;
                c as f64 / (size * n) as f64
            })
            .collect();
        mean.insert(u.clone(), total as f64 / total_obs)?;
        std_error.insert(u, batch_means_stderr(&per_batch))?;
    }
    Ok(StationaryEstimate { mean, std_error, n_samples: opts.n_samples, events: sim.events() })
}

/// Stationary law of the ring's queue-length chain on `{0..=B}^N`, arrivals
/// to a full queue blocked.
#[derive(Debug, Clone)]
pub struct RingExact {
    pub lattice: BoxLattice,
    pub k: usize,
    pub pi: Vec<f64>,
    pub residual: f64,
    pub boundary_mass: f64,
}

/// Largest ring box the exact solve will enumerate.
pub const RING_EXACT_LIMIT: usize = 2_000_000;

pub fn ring_exact_stationary(n: usize, k: usize, lambda: f64, mu: f64, cap: u32) -> Result<RingExact> {
    check_rates(lambda, mu)?;
    check_stable(lambda, mu)?;
    if n == 0 || k >= n {
        return Err(Error::config(format!("need 0 <= k < N, got k={k}, N={n}")));
    }
    let lattice = BoxLattice::new(n, cap)?;
    if lattice.len() > RING_EXACT_LIMIT {
        return Err(Error::StateSpaceTooLarge { states: lattice.len() as u128, limit: RING_EXACT_LIMIT as u128 });
    }
    let mut q = vec![0u32; n];
    let mut rows = Vec::with_capacity(lattice.len());
    for idx in 0..lattice.len() {
        lattice.decode_into(idx, &mut q);
        let mut row = Vec::new();
        for stream in 0..n {
            let candidates: Vec<usize> = (0..=k).map(|d| (stream + d) % n).collect();
            let shortest = candidates.iter().map(|&j| q[j]).min().unwrap();
            let targets: Vec<usize> = candidates.into_iter().filter(|&j| q[j] == shortest).collect();
            let share = lambda / targets.len() as f64;
            for j in targets {
                if q[j] < cap && share > 0.0 {
                    row.push((idx + lattice.stride(j), share));
                }
            }
        }
        for (j, &qj) in q.iter().enumerate() {
            if qj > 0 && mu > 0.0 {
                row.push((idx - lattice.stride(j), mu));
            }
        }
        rows.push(row);
    }
    let g = SparseGenerator::from_rows(rows)?;
    let solved = stationary_distribution(&g)?;
    let boundary_mass = lattice.boundary_mass(&solved.pi);
    Ok(RingExact { lattice, k, pi: solved.pi, residual: solved.residual, boundary_mass })
}

impl RingExact {
    pub fn prob(&self, queues: &[u32]) -> f64 {
        self.lattice.index_of(queues).map_or(0.0, |i| self.pi[i])
    }

    /// `E[Z]`: mean empirical proportion under the stationary law.
    pub fn mean_proportion(&self) -> ProportionVector {
        let mut acc = ProportionVector::new(self.k);
        let n = self.lattice.dims() as f64;
        let mut q = vec![0u32; self.lattice.dims()];
        for (idx, &p) in self.pi.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            self.lattice.decode_into(idx, &mut q);
            for i in 0..q.len() {
                acc.add(&supernode_view(&q, i, self.k), p / n).expect("same k");
            }
        }
        acc
    }
}
