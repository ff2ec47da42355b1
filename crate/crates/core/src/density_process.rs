//! The proportion-process CTMC built from per-supernode rates.
//!
//! The state is a count vector `m_u = N z_u`. A supernode in configuration
//! `u` receives arrivals at total rate `(k + 1) lambda`, split equally among
//! the coordinates attaining `min(u)`, and each positive coordinate
//! completes service at rate `mu`.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::ctmc::{stationary_distribution, SparseGenerator};
use crate::error::{check_rates, check_stable, Error, Result};
use crate::meanfield_ode::RateConvention;
use crate::rng::stream_rng;
use crate::state_space::{BoxLattice, ProportionVector, SuperNodeVector};

/// Largest number of count vectors [`exact_stationary`] will enumerate.
pub const EXACT_STATE_LIMIT: u128 = 500_000;

/// Number of supernodes in each configuration.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CountVector {
    k: usize,
    n: u64,
    counts: BTreeMap<SuperNodeVector, u64>,
}

impl CountVector {
    pub fn new<I>(k: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SuperNodeVector, u64)>,
    {
        let mut counts = BTreeMap::new();
        let mut n = 0u64;
        for (u, c) in entries {
            if u.k() != k {
                return Err(Error::Dimension { left: k, right: u.k() });
            }
            if c > 0 {
                *counts.entry(u).or_insert(0) += c;
                n += c;
            }
        }
        if n == 0 {
            return Err(Error::config("a count vector needs at least one supernode"));
        }
        Ok(CountVector { k, n, counts })
    }

    /// All `n` supernodes in configuration `u`.
    pub fn concentrated(u: SuperNodeVector, n: u64) -> Result<Self> {
        CountVector::new(u.k(), [(u, n)])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Total number of supernodes `N`.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn get(&self, u: &SuperNodeVector) -> u64 {
        self.counts.get(u).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SuperNodeVector, u64)> + '_ {
        self.counts.iter().map(|(u, &c)| (u, c))
    }

    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn proportion(&self) -> ProportionVector {
        let n = self.n as f64;
        ProportionVector::from_entries(self.k, self.counts.iter().map(|(u, &c)| (u.clone(), c as f64 / n)))
            .expect("dimensions checked on construction")
    }

    /// Moves one supernode from `remove` to `add`.
    pub fn apply(&mut self, t: &Transition) {
        let slot = self.counts.get_mut(&t.remove).expect("transition from an empty configuration");
        *slot -= 1;
        if *slot == 0 {
            self.counts.remove(&t.remove);
        }
        *self.counts.entry(t.add.clone()).or_insert(0) += 1;
    }

    pub fn applied(&self, t: &Transition) -> Self {
        let mut next = self.clone();
        next.apply(t);
        next
    }
}

/// One supernode changes from `remove` to `add`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub remove: SuperNodeVector,
    pub add: SuperNodeVector,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityParams {
    pub k: usize,
    pub lambda: f64,
    pub mu: f64,
    pub convention: RateConvention,
    /// Block arrivals that would push a coordinate above this value.
    pub cap: Option<u32>,
}

impl DensityParams {
    pub fn new(k: usize, lambda: f64, mu: f64) -> Self {
        DensityParams { k, lambda, mu, convention: RateConvention::Balanced, cap: None }
    }

    pub fn with_cap(mut self, cap: u32) -> Self {
        self.cap = Some(cap);
        self
    }

    pub fn with_convention(mut self, convention: RateConvention) -> Self {
        self.convention = convention;
        self
    }
}

/// Calls `emit(coordinate, delta, rate)` for every move of one supernode in
/// configuration `u` when `count` supernodes share it.
fn for_each_move(coords: &[u32], count: u64, params: &DensityParams, mut emit: impl FnMut(usize, i32, f64)) {
    let c = count as f64;
    let total_arrival = params.convention.arrival_constant(params.k, params.lambda) * c;
    let shortest = *coords.iter().min().expect("non-empty");
    let ties = coords.iter().filter(|&&x| x == shortest).count() as f64;
    for (n, &x) in coords.iter().enumerate() {
        if x == shortest && params.cap.map_or(true, |cap| x < cap) {
            let rate = total_arrival / ties;
            if rate > 0.0 {
                emit(n, 1, rate);
            }
        }
        if x > 0 && params.mu > 0.0 {
            emit(n, -1, params.mu * c);
        }
    }
}

pub fn enabled_transitions(m: &CountVector, params: &DensityParams) -> Vec<Transition> {
    let mut out = Vec::with_capacity(m.support_len() * 2 * (params.k + 1));
    for (u, count) in m.iter() {
        for_each_move(u.coords(), count, params, |n, delta, rate| {
            let add = u.shifted(n, delta).expect("moves stay non-negative");
            out.push(Transition { remove: u.clone(), add, rate });
        });
    }
    out
}

pub fn total_rate(m: &CountVector, params: &DensityParams) -> f64 {
    enabled_transitions(m, params).iter().map(|t| t.rate).sum()
}

/// `A_N f(z) = sum_{z'} q(z -> z') (f(z') - f(z))` at `z = m / N`.
pub fn generator_apply(f: &dyn Fn(&ProportionVector) -> f64, m: &CountVector, params: &DensityParams) -> f64 {
    let here = f(&m.proportion());
    enabled_transitions(m, params).iter().map(|t| t.rate * (f(&m.applied(t).proportion()) - here)).sum()
}

/// Drift `A_N z_u` of every coordinate function touched by an enabled
/// transition, evaluated without rebuilding proportion vectors.
pub fn coordinate_drift(m: &CountVector, params: &DensityParams) -> ProportionVector {
    let n = m.n() as f64;
    let mut drift = ProportionVector::new(m.k());
    for t in enabled_transitions(m, params) {
        drift.add(&t.remove, -t.rate / n).expect("same k");
        drift.add(&t.add, t.rate / n).expect("same k");
    }
    drift
}

#[derive(Debug, Clone, Copy)]
pub struct GillespieConfig {
    pub horizon: f64,
    /// Stop after this many jumps even if the horizon is not reached.
    pub max_events: Option<u64>,
    pub seed: u64,
    pub stream: u64,
}

#[derive(Debug, Clone)]
pub struct GillespieOutcome {
    pub state: CountVector,
    /// Time at which the run stopped.
    pub time: f64,
    pub events: u64,
}

/// Exact stochastic simulation. `observer(t, m)` is called with the initial
/// state at `t = 0` and after every jump with the new state.
pub fn gillespie_simulate(
    initial: CountVector,
    params: &DensityParams,
    config: &GillespieConfig,
    mut observer: impl FnMut(f64, &CountVector),
) -> Result<GillespieOutcome> {
    check_rates(params.lambda, params.mu)?;
    if !(config.horizon > 0.0) {
        return Err(Error::config(format!("horizon must be positive, got {}", config.horizon)));
    }
    if config.horizon.is_infinite() && config.max_events.is_none() {
        return Err(Error::config("an infinite horizon needs an event limit"));
    }
    let mut rng = stream_rng(config.seed, config.stream);
    let mut state = initial;
    let mut t = 0.0;
    let mut events = 0u64;
    observer(t, &state);
    loop {
        if config.max_events.is_some_and(|limit| events >= limit) {
            break;
        }
        let transitions = enabled_transitions(&state, params);
        let total: f64 = transitions.iter().map(|tr| tr.rate).sum();
        if total <= 0.0 {
            t = config.horizon;
            break;
        }
        let wait: f64 = Exp1.sample(&mut rng);
        let next = t + wait / total;
        if next > config.horizon {
            t = config.horizon;
            break;
        }
        t = next;
        let mut target = rng.random::<f64>() * total;
        let mut chosen = transitions.len() - 1;
        for (i, tr) in transitions.iter().enumerate() {
            if target < tr.rate {
                chosen = i;
                break;
            }
            target -= tr.rate;
        }
        state.apply(&transitions[chosen]);
        events += 1;
        observer(t, &state);
    }
    Ok(GillespieOutcome { state, time: t, events })
}

/// Stationary law of the capped proportion process over all count vectors.
#[derive(Debug, Clone, Serialize)]
pub struct DensityExact {
    pub n: u64,
    pub k: usize,
    pub lambda: f64,
    pub mu: f64,
    #[serde(rename = "B")]
    pub cap: u32,
    /// Mass on count vectors with some supernode coordinate at the cap.
    pub boundary_mass: f64,
    pub mean_proportion: ProportionVector,
    pub solver_residual: f64,
    #[serde(skip)]
    pub states: Vec<CountVector>,
    #[serde(skip)]
    pub pi: Vec<f64>,
}

impl DensityExact {
    pub fn prob(&self, m: &CountVector) -> f64 {
        self.states.iter().position(|s| s == m).map_or(0.0, |i| self.pi[i])
    }
}

fn binomial(n: u128, r: u128) -> Option<u128> {
    let r = r.min(n - r);
    (0..r).try_fold(1u128, |acc, i| acc.checked_mul(n - i).map(|v| v / (i + 1)))
}

/// Non-decreasing sequences of length `n` over `0..types`, lexicographic.
fn multisets(types: usize, n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    loop {
        out.push(cur.clone());
        // rightmost position that can still grow
        let Some(pos) = (0..n).rev().find(|&p| (cur[p] as usize) < types - 1) else {
            break;
        };
        let v = cur[pos] + 1;
        cur[pos..].iter_mut().for_each(|x| *x = v);
    }
    out
}

fn count_vector_of(k: usize, lattice: &BoxLattice, seq: &[u32]) -> CountVector {
    CountVector::new(k, seq.iter().map(|&ty| (SuperNodeVector::new(lattice.decode(ty as usize)).unwrap(), 1)))
        .expect("valid by construction")
}

/// Every count vector with `n` supernodes whose coordinates lie in
/// `0..=cap`, in the state order used by [`exact_stationary`].
pub fn enumerate_count_vectors(n: u64, k: usize, cap: u32) -> Result<Vec<CountVector>> {
    if n == 0 {
        return Err(Error::config("N must be positive"));
    }
    let lattice = BoxLattice::new(k + 1, cap)?;
    let states = binomial(lattice.len() as u128 + u128::from(n) - 1, u128::from(n)).unwrap_or(u128::MAX);
    if states > EXACT_STATE_LIMIT {
        return Err(Error::StateSpaceTooLarge { states, limit: EXACT_STATE_LIMIT });
    }
    Ok(multisets(lattice.len(), n as usize).iter().map(|seq| count_vector_of(k, &lattice, seq)).collect())
}

pub fn exact_stationary(n: u64, k: usize, lambda: f64, mu: f64, cap: u32) -> Result<DensityExact> {
    exact_stationary_with(n, &DensityParams::new(k, lambda, mu).with_cap(cap))
}

pub fn exact_stationary_with(n: u64, params: &DensityParams) -> Result<DensityExact> {
    let DensityParams { k, lambda, mu, .. } = *params;
    let cap = params.cap.ok_or_else(|| Error::config("an exact solve needs a truncation cap"))?;
    check_rates(lambda, mu)?;
    check_stable(lambda, mu)?;
    if n == 0 {
        return Err(Error::config("N must be positive"));
    }
    let lattice = BoxLattice::new(k + 1, cap)?;
    let types = lattice.len();
    let states = binomial(types as u128 + u128::from(n) - 1, u128::from(n)).unwrap_or(u128::MAX);
    if states > EXACT_STATE_LIMIT {
        return Err(Error::StateSpaceTooLarge { states, limit: EXACT_STATE_LIMIT });
    }

    let seqs = multisets(types, n as usize);
    let index: HashMap<&[u32], usize> = seqs.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let mut coords = vec![0u32; k + 1];
    let mut rows = Vec::with_capacity(seqs.len());
    let mut next = Vec::with_capacity(n as usize);
    for seq in &seqs {
        let mut row = Vec::new();
        let mut start = 0;
        while start < seq.len() {
            let ty = seq[start];
            let end = start + seq[start..].iter().take_while(|&&x| x == ty).count();
            lattice.decode_into(ty as usize, &mut coords);
            for_each_move(&coords, (end - start) as u64, params, |c, delta, rate| {
                let stride = lattice.stride(c) as i64;
                let new_ty = (i64::from(ty) + i64::from(delta) * stride) as u32;
                next.clear();
                next.extend_from_slice(seq);
                next.remove(start);
                let at = next.partition_point(|&x| x < new_ty);
                next.insert(at, new_ty);
                row.push((index[next.as_slice()], rate));
            });
            start = end;
        }
        rows.push(row);
    }
    let generator = SparseGenerator::from_rows(rows)?;
    let solved = stationary_distribution(&generator)?;

    let mut mean = vec![0.0; types];
    let mut boundary_mass = 0.0;
    let inv_n = 1.0 / n as f64;
    for (seq, &p) in seqs.iter().zip(&solved.pi) {
        let mut on_boundary = false;
        for &ty in seq {
            mean[ty as usize] += p * inv_n;
            lattice.decode_into(ty as usize, &mut coords);
            on_boundary |= lattice.on_boundary(&coords);
        }
        if on_boundary {
            boundary_mass += p;
        }
    }
    let count_vectors = seqs.iter().map(|seq| count_vector_of(k, &lattice, seq)).collect();
    Ok(DensityExact {
        n,
        k,
        lambda,
        mu,
        cap,
        boundary_mass,
        mean_proportion: ProportionVector::from_dense(&lattice, &mean),
        solver_residual: solved.residual,
        states: count_vectors,
        pi: solved.pi,
    })
}
