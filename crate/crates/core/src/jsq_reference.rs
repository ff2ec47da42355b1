//! Symmetric join-the-shortest-queue among `k + 1` queues with total arrival
//! rate `(k + 1) lambda` and service rate `mu` per server, truncated to the
//! box `{0..=B}^{k+1}` by blocking arrivals to a queue already at `B`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ctmc::{stationary_distribution, SparseGenerator, Stationary};
use crate::error::{check_rates, check_stable, Error, Result};
use crate::state_space::{BoxLattice, ProportionVector};

/// Largest exchangeability defect tolerated by [`marginal_queue_law`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct JsqGenerator {
    pub k: usize,
    pub lambda: f64,
    pub mu: f64,
    pub lattice: BoxLattice,
    pub generator: SparseGenerator,
}

pub fn jsq_generator(k: usize, lambda: f64, mu: f64, cap: u32) -> Result<JsqGenerator> {
    check_rates(lambda, mu)?;
    if cap < 1 {
        return Err(Error::config("truncation cap must be at least 1"));
    }
    let lattice = BoxLattice::new(k + 1, cap)?;
    let total_arrival = (k + 1) as f64 * lambda;
    let mut u = vec![0u32; k + 1];
    let mut rows = Vec::with_capacity(lattice.len());
    for idx in 0..lattice.len() {
        lattice.decode_into(idx, &mut u);
        let shortest = *u.iter().min().unwrap();
        let ties = u.iter().filter(|&&c| c == shortest).count() as f64;
        let mut row = Vec::with_capacity(2 * (k + 1));
        for (n, &c) in u.iter().enumerate() {
            let stride = lattice.stride(n);
            if c == shortest && c < cap && lambda > 0.0 {
                row.push((idx + stride, total_arrival / ties));
            }
            if c > 0 && mu > 0.0 {
                row.push((idx - stride, mu));
            }
        }
        rows.push(row);
    }
    let generator = SparseGenerator::from_rows(rows)?;
    Ok(JsqGenerator { k, lambda, mu, lattice, generator })
}

#[derive(Debug, Clone, Serialize)]
pub struct JsqStationary {
    pub k: usize,
    pub lambda: f64,
    pub mu: f64,
    #[serde(rename = "B")]
    pub cap: u32,
    pub residual: f64,
    pub boundary_mass: f64,
    #[serde(skip)]
    pub lattice: BoxLattice,
    /// Dense law over the box in lattice order.
    #[serde(skip)]
    pub pi: Vec<f64>,
}

impl JsqStationary {
    pub fn proportion(&self) -> ProportionVector {
        ProportionVector::from_dense(&self.lattice, &self.pi)
    }

    pub fn prob(&self, coords: &[u32]) -> f64 {
        self.lattice.index_of(coords).map_or(0.0, |i| self.pi[i])
    }
}

/// Truncated stationary law `P^k` of the JSQ(k+1) reference queue.
pub fn jsq_stationary(k: usize, lambda: f64, mu: f64, cap: u32) -> Result<JsqStationary> {
    check_stable(lambda, mu)?;
    let jsq = jsq_generator(k, lambda, mu, cap)?;
    let Stationary { pi, residual, .. } = stationary_distribution(&jsq.generator)?;
    let boundary_mass = jsq.lattice.boundary_mass(&pi);
    Ok(JsqStationary { k, lambda, mu, cap, residual, boundary_mass, lattice: jsq.lattice, pi })
}

/// Geometric M/M/1 queue-length probability `(1 - r) r^n`, `r = lambda / mu`.
pub fn mm1_analytic(lambda: f64, mu: f64, n: u32) -> Result<f64> {
    check_rates(lambda, mu)?;
    check_stable(lambda, mu)?;
    let r = lambda / mu;
    Ok((1.0 - r) * r.powi(n as i32))
}

/// Single-queue marginal of an exchangeable law over `(k+1)`-tuples,
/// indexed by queue length `0..=max`.
pub fn marginal_queue_law(p: &ProportionVector) -> Result<Vec<f64>> {
    let dims = p.k() + 1;
    let marginals: Vec<BTreeMap<u32, f64>> = (0..dims).map(|n| p.coordinate_marginal(n)).collect();
    let len = p.max_coordinate() as usize + 1;
    let dense = |m: &BTreeMap<u32, f64>| {
        let mut v = vec![0.0; len];
        for (&q, &w) in m {
            v[q as usize] += w;
        }
        v
    };
    let first = dense(&marginals[0]);
    let mut deviation = 0.0_f64;
    for m in &marginals[1..] {
        for (a, b) in first.iter().zip(dense(m)) {
            deviation = deviation.max((a - b).abs());
        }
    }
    if deviation > SYMMETRY_TOLERANCE {
        return Err(Error::Asymmetric { deviation });
    }
    Ok(first)
}
