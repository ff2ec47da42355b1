//! Mean-field limit ODEs of the proportion process on the truncated box
//! `{0..=B}^{k+1}`.
//!
//! At the box boundary an arrival that would push a coordinate past `B` is
//! blocked, which removes the matching outflow term. The truncated system is
//! then exactly the forward equation of the truncated JSQ(k+1) chain and
//! conserves mass.

use log::debug;
use serde::Serialize;

use crate::error::{check_rates, check_stable, Error, Result};
use crate::state_space::{BoxLattice, ProportionVector};

/// Arrival convention for the general-`k` drift and rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateConvention {
    /// Total arrival rate `(k + 1) lambda` per supernode with the arrival
    /// outflow term; agrees with the `k = 1` equations and the JSQ(k+1) queue.
    #[default]
    Balanced,
    /// Arrival constant `k lambda` and no arrival outflow term, as printed for
    /// general `k` (`--remark2-literal`). Not mass conserving.
    KLambdaLiteral,
}

impl RateConvention {
    pub fn from_literal_flag(literal: bool) -> Self {
        if literal {
            RateConvention::KLambdaLiteral
        } else {
            RateConvention::Balanced
        }
    }

    /// Total arrival rate per supernode.
    pub fn arrival_constant(self, k: usize, lambda: f64) -> f64 {
        match self {
            RateConvention::Balanced => (k + 1) as f64 * lambda,
            RateConvention::KLambdaLiteral => k as f64 * lambda,
        }
    }
}

pub const MASS_TOLERANCE: f64 = 1e-9;
pub const CLIP_THRESHOLD: f64 = -1e-12;
/// Integration aborts when `sum |z|` leaves `1 +- MASS_ABORT` before renormalization.
pub const MASS_ABORT: f64 = 1e-6;

/// `a(i, j)`: share of a pair's arrivals that go to the queue holding `i`
/// when the other holds `j`.
pub fn selection_coefficient(i: i64, j: i64) -> f64 {
    use std::cmp::Ordering::*;
    match i.cmp(&j) {
        Less => 1.0,
        Equal => 0.5,
        Greater => 0.0,
    }
}

/// Share of arrivals routed to a queue holding `value` when the other queues
/// of the supernode hold `others`: `1 / #ties` if `value` is a minimum, else 0.
pub fn selection_coefficient_general(value: u32, others: &[u32]) -> f64 {
    if others.iter().any(|&o| o < value) {
        return 0.0;
    }
    let ties = 1 + others.iter().filter(|&&o| o == value).count();
    1.0 / ties as f64
}

/// Share of arrivals to coordinate `n` of `u`.
#[inline]
fn arrival_share(u: &[u32], n: usize) -> f64 {
    let v = u[n];
    let mut ties = 0usize;
    for &c in u {
        if c < v {
            return 0.0;
        }
        if c == v {
            ties += 1;
        }
    }
    1.0 / ties as f64
}

/// Probability mass over the box at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeState {
    pub lattice: BoxLattice,
    pub z: Vec<f64>,
    pub t: f64,
}

impl OdeState {
    /// Point mass at the all-empty tuple.
    pub fn empty_system(k: usize, cap: u32) -> Result<Self> {
        let lattice = BoxLattice::new(k + 1, cap)?;
        let mut z = vec![0.0; lattice.len()];
        z[0] = 1.0;
        Ok(OdeState { lattice, z, t: 0.0 })
    }

    pub fn from_proportion(p: &ProportionVector, cap: u32) -> Result<Self> {
        let lattice = BoxLattice::new(p.k() + 1, cap)?;
        let z = p.to_dense(&lattice)?;
        Ok(OdeState { lattice, z, t: 0.0 })
    }

    pub fn k(&self) -> usize {
        self.lattice.dims() - 1
    }

    pub fn proportion(&self) -> ProportionVector {
        ProportionVector::from_dense(&self.lattice, &self.z)
    }

    pub fn get(&self, coords: &[u32]) -> f64 {
        self.lattice.index_of(coords).map_or(0.0, |i| self.z[i])
    }

    pub fn mass(&self) -> f64 {
        self.z.iter().sum()
    }

    pub fn is_valid(&self) -> bool {
        self.z.iter().all(|&v| v >= CLIP_THRESHOLD) && (self.mass() - 1.0).abs() <= MASS_TOLERANCE
    }

    pub fn boundary_mass(&self) -> f64 {
        self.lattice.boundary_mass(&self.z)
    }
}

/// Right-hand side of the pair (`k = 1`) equations.
pub fn rhs_k1(z: &[f64], lattice: &BoxLattice, lambda: f64, mu: f64) -> Vec<f64> {
    assert_eq!(lattice.dims(), 2, "rhs_k1 needs a two-dimensional box");
    assert_eq!(z.len(), lattice.len());
    let cap = lattice.cap() as i64;
    let side = lattice.side();
    let at = |i: i64, j: i64| -> f64 {
        if i < 0 || j < 0 || i > cap || j > cap {
            0.0
        } else {
            z[i as usize * side + j as usize]
        }
    };
    let mut dz = vec![0.0; z.len()];
    for i in 0..=cap {
        for j in 0..=cap {
            let here = at(i, j);
            let inflow = at(i - 1, j) * selection_coefficient(i - 1, j) + at(i, j - 1) * selection_coefficient(j - 1, i);
            let mut out_share = 0.0;
            if i < cap {
                out_share += selection_coefficient(i, j);
            }
            if j < cap {
                out_share += selection_coefficient(j, i);
            }
            let arrivals = inflow - here * out_share;
            let first = at(i + 1, j) - if i > 0 { here } else { 0.0 };
            let second = at(i, j + 1) - if j > 0 { here } else { 0.0 };
            dz[i as usize * side + j as usize] = (2.0 * lambda) * arrivals + mu * (first + second);
        }
    }
    dz
}

/// Right-hand side of the general-`k` equations.
pub fn rhs_general(z: &[f64], lattice: &BoxLattice, lambda: f64, mu: f64, convention: RateConvention) -> Vec<f64> {
    let mut dz = vec![0.0; z.len()];
    rhs_general_into(z, lattice, lambda, mu, convention, &mut dz);
    dz
}

fn rhs_general_into(z: &[f64], lattice: &BoxLattice, lambda: f64, mu: f64, convention: RateConvention, dz: &mut [f64]) {
    assert_eq!(z.len(), lattice.len());
    let dims = lattice.dims();
    let cap = lattice.cap();
    let constant = convention.arrival_constant(dims - 1, lambda);
    let strides: Vec<usize> = (0..dims).map(|n| lattice.stride(n)).collect();
    let mut u = vec![0u32; dims];
    for (idx, slot) in dz.iter_mut().enumerate() {
        lattice.decode_into(idx, &mut u);
        let here = z[idx];
        let mut inflow = 0.0;
        let mut out_share = 0.0;
        let mut service = 0.0;
        for n in 0..dims {
            let c = u[n];
            if c > 0 {
                u[n] = c - 1;
                inflow += z[idx - strides[n]] * arrival_share(&u, n);
                u[n] = c;
            }
            if c < cap {
                out_share += arrival_share(&u, n);
            }
            let up = if c < cap { z[idx + strides[n]] } else { 0.0 };
            service += up - if c > 0 { here } else { 0.0 };
        }
        *slot = match convention {
            RateConvention::Balanced => constant * (inflow - here * out_share) + mu * service,
            RateConvention::KLambdaLiteral => constant * inflow + mu * service,
        };
    }
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    pub t_max: f64,
    pub dt: f64,
    /// Spacing of recorded samples; `None` keeps only the start and end.
    pub sample_interval: Option<f64>,
    pub convention: RateConvention,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<OdeState>,
    /// Smallest entry seen before clipping.
    pub min_pre_clip: f64,
    /// Largest `|sum z - 1|` seen before renormalization.
    pub max_mass_drift: f64,
    pub clipped_entries: u64,
    pub steps: u64,
}

impl Trajectory {
    pub fn last(&self) -> &OdeState {
        self.samples.last().expect("a trajectory always holds its start")
    }
}

struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    fn new(n: usize) -> Self {
        Rk4 { k1: vec![0.0; n], k2: vec![0.0; n], k3: vec![0.0; n], k4: vec![0.0; n], tmp: vec![0.0; n] }
    }

    fn step(&mut self, z: &mut [f64], h: f64, f: &impl Fn(&[f64], &mut [f64])) {
        f(z, &mut self.k1);
        for ((t, &x), &d) in self.tmp.iter_mut().zip(z.iter()).zip(&self.k1) {
            *t = x + 0.5 * h * d;
        }
        f(&self.tmp, &mut self.k2);
        for ((t, &x), &d) in self.tmp.iter_mut().zip(z.iter()).zip(&self.k2) {
            *t = x + 0.5 * h * d;
        }
        f(&self.tmp, &mut self.k3);
        for ((t, &x), &d) in self.tmp.iter_mut().zip(z.iter()).zip(&self.k3) {
            *t = x + h * d;
        }
        f(&self.tmp, &mut self.k4);
        for (i, x) in z.iter_mut().enumerate() {
            *x += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

struct Stepper {
    rk: Rk4,
    min_pre_clip: f64,
    max_mass_drift: f64,
    clipped: u64,
}

impl Stepper {
    fn new(n: usize) -> Self {
        Stepper { rk: Rk4::new(n), min_pre_clip: f64::INFINITY, max_mass_drift: 0.0, clipped: 0 }
    }

    /// One RK4 step followed by clip-and-renormalize.
    fn advance(&mut self, state: &mut OdeState, h: f64, f: &impl Fn(&[f64], &mut [f64])) -> Result<()> {
        self.rk.step(&mut state.z, h, f);
        state.t += h;
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        for &v in &state.z {
            sum += v;
            abs_sum += v.abs();
            self.min_pre_clip = self.min_pre_clip.min(v);
        }
        if !((abs_sum - 1.0).abs() <= MASS_ABORT) {
            return Err(Error::IntegrationUnstable { t: state.t, drift: abs_sum - 1.0 });
        }
        self.max_mass_drift = self.max_mass_drift.max((sum - 1.0).abs());
        let mut clipped_now = 0u64;
        for v in state.z.iter_mut() {
            if *v < CLIP_THRESHOLD {
                *v = 0.0;
                clipped_now += 1;
            }
        }
        if clipped_now > 0 {
            debug!("clipped {clipped_now} negative entries at t={}", state.t);
            self.clipped += clipped_now;
            sum = state.z.iter().sum();
        }
        state.z.iter_mut().for_each(|v| *v /= sum);
        Ok(())
    }
}

fn rhs_closure(lattice: BoxLattice, lambda: f64, mu: f64, convention: RateConvention) -> impl Fn(&[f64], &mut [f64]) {
    move |z: &[f64], out: &mut [f64]| rhs_general_into(z, &lattice, lambda, mu, convention, out)
}

/// Fixed-step RK4 from `z0` up to `t_max`.
pub fn integrate(z0: OdeState, lambda: f64, mu: f64, opts: &IntegrateOptions) -> Result<Trajectory> {
    check_rates(lambda, mu)?;
    if !(opts.dt > 0.0 && opts.dt.is_finite()) {
        return Err(Error::config(format!("dt must be positive, got {}", opts.dt)));
    }
    if !(opts.t_max >= 0.0 && opts.t_max.is_finite()) {
        return Err(Error::config(format!("t_max must be finite and >= 0, got {}", opts.t_max)));
    }
    if !z0.is_valid() {
        return Err(Error::config("initial state is not a probability vector on the box"));
    }
    let f = rhs_closure(z0.lattice, lambda, mu, opts.convention);
    let full_steps = (opts.t_max / opts.dt + 1e-9).floor() as u64;
    let remainder = opts.t_max - full_steps as f64 * opts.dt;
    let sample_every = opts.sample_interval.map(|s| ((s / opts.dt).round() as u64).max(1));

    let start_t = z0.t;
    let mut state = z0;
    let mut stepper = Stepper::new(state.z.len());
    let mut samples = vec![state.clone()];
    for step in 1..=full_steps {
        stepper.advance(&mut state, opts.dt, &f)?;
        state.t = start_t + step as f64 * opts.dt;
        if sample_every.is_some_and(|every| step % every == 0) {
            samples.push(state.clone());
        }
    }
    let mut steps = full_steps;
    if remainder > 1e-12 * opts.dt.max(1.0) {
        stepper.advance(&mut state, remainder, &f)?;
        steps += 1;
    }
    state.t = start_t + opts.t_max;
    if samples.last().map_or(true, |s| s.t != state.t) {
        samples.push(state);
    }
    Ok(Trajectory {
        samples,
        min_pre_clip: stepper.min_pre_clip.min(0.0),
        max_mass_drift: stepper.max_mass_drift,
        clipped_entries: stepper.clipped,
        steps,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct FixedPointOptions {
    pub dt: f64,
    pub tolerance: f64,
    pub max_steps: u64,
    /// Residual is evaluated every this many steps.
    pub check_every: u64,
}

impl FixedPointOptions {
    pub fn for_rates(mu: f64, tolerance: f64) -> Self {
        FixedPointOptions { dt: 0.01 / mu, tolerance, max_steps: 5_000_000, check_every: 100 }
    }
}

#[derive(Debug, Clone)]
pub struct FixedPoint {
    pub state: OdeState,
    /// `max |dz/dt|` at the returned state.
    pub residual: f64,
    pub boundary_mass: f64,
    pub steps: u64,
}

pub const DEFAULT_FIXED_POINT_TOLERANCE: f64 = 1e-10;

/// Integrates from the empty system until `max |dz/dt| <= tolerance`.
pub fn fixed_point(k: usize, lambda: f64, mu: f64, cap: u32, tolerance: f64) -> Result<FixedPoint> {
    fixed_point_with(k, lambda, mu, cap, &FixedPointOptions::for_rates(mu, tolerance))
}

pub fn fixed_point_with(k: usize, lambda: f64, mu: f64, cap: u32, opts: &FixedPointOptions) -> Result<FixedPoint> {
    check_rates(lambda, mu)?;
    check_stable(lambda, mu)?;
    if !(opts.dt > 0.0) {
        return Err(Error::config("dt must be positive"));
    }
    let mut state = OdeState::empty_system(k, cap)?;
    let convention = RateConvention::Balanced;
    let f = rhs_closure(state.lattice, lambda, mu, convention);
    let mut stepper = Stepper::new(state.z.len());
    let mut residual = max_abs(&rhs_general(&state.z, &state.lattice, lambda, mu, convention));
    let mut steps = 0;
    while residual > opts.tolerance {
        if steps >= opts.max_steps {
            return Err(Error::NonConvergence { iterations: steps, residual });
        }
        for _ in 0..opts.check_every {
            stepper.advance(&mut state, opts.dt, &f)?;
        }
        steps += opts.check_every;
        residual = max_abs(&rhs_general(&state.z, &state.lattice, lambda, mu, convention));
    }
    let boundary_mass = state.boundary_mass();
    Ok(FixedPoint { state, residual, boundary_mass, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsq_reference::jsq_stationary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(lattice: BoxLattice, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut z: Vec<f64> = (0..lattice.len()).map(|_| rng.random::<f64>()).collect();
        let s: f64 = z.iter().sum();
        z.iter_mut().for_each(|v| *v /= s);
        z
    }

    #[test]
    fn selection_examples() {
        assert_eq!(selection_coefficient(0, 3), 1.0);
        assert_eq!(selection_coefficient(2, 2), 0.5);
        assert_eq!(selection_coefficient(5, 1), 0.0);
        assert_eq!(selection_coefficient_general(1, &[3, 4]), 1.0);
        assert_eq!(selection_coefficient_general(2, &[2, 5]), 0.5);
        assert_eq!(selection_coefficient_general(4, &[1, 2]), 0.0);
        assert_eq!(selection_coefficient_general(7, &[]), 1.0);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(selection_coefficient_general(i, &[j]), selection_coefficient(i.into(), j.into()));
            }
        }
    }

    #[test]
    fn point_mass_derivative() {
        let lat = BoxLattice::new(2, 5).unwrap();
        let mut z = vec![0.0; lat.len()];
        z[0] = 1.0;
        let lambda = 0.3;
        let dz = rhs_k1(&z, &lat, lambda, 1.0);
        assert_eq!(dz[lat.index_of(&[0, 0]).unwrap()], -2.0 * lambda);
        assert_eq!(dz[lat.index_of(&[1, 0]).unwrap()], lambda);
        assert_eq!(dz[lat.index_of(&[0, 1]).unwrap()], lambda);
        let others: f64 = dz.iter().enumerate().filter(|&(i, _)| ![0, 1, 6].contains(&i)).map(|(_, v)| v.abs()).sum();
        assert_eq!(others, 0.0);
        assert!(dz.iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn general_matches_pair_equations_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let lat = BoxLattice::new(2, 9).unwrap();
        for _ in 0..20 {
            let z = random_state(lat, &mut rng);
            let a = rhs_k1(&z, &lat, 0.7, 1.3);
            let b = rhs_general(&z, &lat, 0.7, 1.3, RateConvention::Balanced);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn k0_reduces_to_birth_death_forward_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cap = 12u32;
        let lat = BoxLattice::new(1, cap).unwrap();
        let (lambda, mu) = (0.4, 1.1);
        let z = random_state(lat, &mut rng);
        let dz = rhs_general(&z, &lat, lambda, mu, RateConvention::Balanced);
        for i in 0..=cap as usize {
            let prev = if i > 0 { z[i - 1] } else { 0.0 };
            let next = if i < cap as usize { z[i + 1] } else { 0.0 };
            let births = if i < cap as usize { z[i] } else { 0.0 };
            let deaths = if i > 0 { z[i] } else { 0.0 };
            let expected = lambda * (prev - births) + mu * (next - deaths);
            assert!((dz[i] - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn symmetric_input_gives_symmetric_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let lat = BoxLattice::new(2, 7).unwrap();
        let raw = random_state(lat, &mut rng);
        let mut z = vec![0.0; lat.len()];
        for i in 0..8u32 {
            for j in 0..8u32 {
                let a = raw[lat.index_of(&[i, j]).unwrap()] + raw[lat.index_of(&[j, i]).unwrap()];
                z[lat.index_of(&[i, j]).unwrap()] = a / 2.0;
            }
        }
        let dz = rhs_k1(&z, &lat, 0.6, 1.0);
        for i in 0..8u32 {
            for j in 0..8u32 {
                let d = dz[lat.index_of(&[i, j]).unwrap()] - dz[lat.index_of(&[j, i]).unwrap()];
                assert!(d.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn permutation_equivariance_k2() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let lat = BoxLattice::new(3, 5).unwrap();
        let z = random_state(lat, &mut rng);
        let perm = [2usize, 0, 1];
        let permute = |v: &[f64]| {
            let mut out = vec![0.0; v.len()];
            for idx in 0..lat.len() {
                let u = lat.decode(idx);
                let w: Vec<u32> = perm.iter().map(|&p| u[p]).collect();
                out[lat.index_of(&w).unwrap()] = v[idx];
            }
            out
        };
        let lhs = permute(&rhs_general(&z, &lat, 0.5, 1.0, RateConvention::Balanced));
        let rhs = rhs_general(&permute(&z), &lat, 0.5, 1.0, RateConvention::Balanced);
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn literal_variant_is_not_conservative() {
        let lat = BoxLattice::new(2, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let z = random_state(lat, &mut rng);
        let dz = rhs_general(&z, &lat, 0.5, 1.0, RateConvention::KLambdaLiteral);
        assert!(dz.iter().sum::<f64>().abs() > 1e-3);
    }

    #[test]
    fn zero_arrivals_keep_empty_system() {
        let z0 = OdeState::empty_system(1, 5).unwrap();
        let opts = IntegrateOptions { t_max: 5.0, dt: 0.01, sample_interval: Some(1.0), convention: RateConvention::Balanced };
        let traj = integrate(z0.clone(), 0.0, 1.0, &opts).unwrap();
        assert_eq!(traj.samples.len(), 6);
        for s in &traj.samples {
            assert_eq!(s.z, z0.z);
        }
    }

    #[test]
    fn k0_relaxes_to_geometric() {
        let z0 = OdeState::empty_system(0, 60).unwrap();
        let opts = IntegrateOptions { t_max: 200.0, dt: 0.01, sample_interval: None, convention: RateConvention::Balanced };
        let traj = integrate(z0, 0.5, 1.0, &opts).unwrap();
        let end = traj.last();
        assert!((end.t - 200.0).abs() < 1e-9);
        for n in 0..=60u32 {
            let expected = 0.5 * 0.5f64.powi(n as i32);
            assert!((end.get(&[n]) - expected).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_step() {
        let z0 = OdeState::empty_system(1, 5).unwrap();
        let opts = IntegrateOptions { t_max: 1.0, dt: 0.0, sample_interval: None, convention: RateConvention::Balanced };
        assert!(integrate(z0.clone(), 0.5, 1.0, &opts).is_err());
        // forward Euler-like blow-up: RK4 at this step size is far outside its stability region
        let opts = IntegrateOptions { t_max: 50.0, dt: 5.0, sample_interval: None, convention: RateConvention::Balanced };
        assert!(matches!(integrate(z0, 0.5, 1.0, &opts), Err(Error::IntegrationUnstable { .. })));
    }

    #[test]
    fn fixed_point_k0_is_geometric() {
        let fp = fixed_point(0, 0.5, 1.0, 60, DEFAULT_FIXED_POINT_TOLERANCE).unwrap();
        for n in 0..=40u32 {
            let expected = 0.5 * 0.5f64.powi(n as i32);
            assert!((fp.state.get(&[n]) - expected).abs() < 1e-8);
        }
    }

    #[test]
    fn fixed_point_k1_matches_linear_solve() {
        let fp = fixed_point(1, 0.7, 1.0, 40, DEFAULT_FIXED_POINT_TOLERANCE).unwrap();
        let jsq = jsq_stationary(1, 0.7, 1.0, 40).unwrap();
        let diff = fp.state.z.iter().zip(&jsq.pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-7, "diff={diff}");
        for i in 0..=40u32 {
            for j in 0..=40u32 {
                assert!((fp.state.get(&[i, j]) - fp.state.get(&[j, i])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fixed_point_rejects_unstable() {
        assert!(matches!(fixed_point(1, 1.0, 1.0, 10, 1e-10), Err(Error::Unstable { .. })));
        let opts = FixedPointOptions { dt: 0.01, tolerance: 1e-14, max_steps: 100, check_every: 100 };
        assert!(matches!(fixed_point_with(1, 0.7, 1.0, 20, &opts), Err(Error::NonConvergence { .. })));
    }
}
