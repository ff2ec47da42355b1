//! Sparse CTMC generators and stationary solves.
//!
//! The direct solver is Grassmann-Taksar-Heyman state reduction run inside
//! the band of the generator. It never subtracts, so tiny tail
//! probabilities keep full relative accuracy. Chains whose band is too
//! wide fall back to Gauss-Seidel sweeps on `pi Q = 0`.

use crate::error::{Error, Result};

/// Off-diagonal rates in CSR form plus the diagonal `-sum_j q_ij`.
#[derive(Debug, Clone)]
pub struct SparseGenerator {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    rates: Vec<f64>,
    diagonal: Vec<f64>,
}

impl SparseGenerator {
    /// Builds from per-row `(target, rate)` lists. Self-loops and zero rates
    /// are dropped; repeated targets are summed.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut rates = Vec::new();
        let mut diagonal = Vec::with_capacity(n);
        row_ptr.push(0);
        for (i, mut row) in rows.into_iter().enumerate() {
            row.retain(|&(j, r)| j != i && r != 0.0);
            row.sort_by_key(|&(j, _)| j);
            let start = cols.len();
            let mut exit = 0.0;
            for (j, r) in row {
                if j >= n {
                    return Err(Error::config(format!("transition {i} -> {j} leaves the {n}-state space")));
                }
                if !(r > 0.0 && r.is_finite()) {
                    return Err(Error::config(format!("rate {r} on {i} -> {j} is not positive")));
                }
                if cols.len() > start && *cols.last().unwrap() == j {
                    *rates.last_mut().unwrap() += r;
                } else {
                    cols.push(j);
                    rates.push(r);
                }
                exit += r;
            }
            row_ptr.push(cols.len());
            diagonal.push(-exit);
        }
        Ok(SparseGenerator { row_ptr, cols, rates, diagonal })
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Off-diagonal `(target, rate)` pairs of row `i`, sorted by target.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()].iter().copied().zip(self.rates[range].iter().copied())
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        self.diagonal[i]
    }

    pub fn rate(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diagonal[i];
        }
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, r)| r)
    }

    /// Largest `|row sum|`; zero up to rounding for a conservative generator.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.len())
            .map(|i| (self.row(i).map(|(_, r)| r).sum::<f64>() + self.diagonal[i]).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|i - j|` over nonzero off-diagonal entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.len())
            .flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    /// `||pi Q||_inf`.
    pub fn residual(&self, pi: &[f64]) -> f64 {
        assert_eq!(pi.len(), self.len());
        let mut flow: Vec<f64> = pi.iter().zip(&self.diagonal).map(|(p, d)| p * d).collect();
        for (i, &p) in pi.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (j, r) in self.row(i) {
                flow[j] += p * r;
            }
        }
        flow.into_iter().map(f64::abs).fold(0.0, f64::max)
    }

    /// Incoming `(source, rate)` lists per state.
    fn incoming(&self) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
        let n = self.len();
        let mut counts = vec![0usize; n + 1];
        for &j in &self.cols {
            counts[j + 1] += 1;
        }
        for j in 0..n {
            counts[j + 1] += counts[j];
        }
        let mut fill = counts.clone();
        let mut src = vec![0; self.nnz()];
        let mut rates = vec![0.0; self.nnz()];
        for i in 0..n {
            for (j, r) in self.row(i) {
                src[fill[j]] = i;
                rates[fill[j]] = r;
                fill[j] += 1;
            }
        }
        (counts, src, rates)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    BandedGth,
    GaussSeidel,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Chains with more states than this are solved iteratively.
    pub direct_state_limit: usize,
    /// Largest band storage (in f64 entries) the direct solver may allocate.
    pub band_entry_limit: usize,
    /// Target `||pi Q||_inf` for the iterative solver.
    pub tolerance: f64,
    pub max_sweeps: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { direct_state_limit: 200_000, band_entry_limit: 60_000_000, tolerance: 1e-12, max_sweeps: 200_000 }
    }
}

#[derive(Debug, Clone)]
pub struct Stationary {
    pub pi: Vec<f64>,
    /// `||pi Q||_inf` of the returned vector.
    pub residual: f64,
    pub method: SolveMethod,
}

/// Solves `pi Q = 0`, `sum pi = 1` with default options.
pub fn stationary_distribution(g: &SparseGenerator) -> Result<Stationary> {
    stationary_distribution_with(g, &SolverOptions::default())
}

pub fn stationary_distribution_with(g: &SparseGenerator, opts: &SolverOptions) -> Result<Stationary> {
    let n = g.len();
    if n == 0 {
        return Err(Error::config("empty generator"));
    }
    let bw = g.bandwidth();
    let band_entries = n.saturating_mul(2 * bw + 1);
    let (pi, method) = if n <= opts.direct_state_limit && band_entries <= opts.band_entry_limit {
        (gth_banded(g, bw)?, SolveMethod::BandedGth)
    } else {
        (gauss_seidel(g, opts)?, SolveMethod::GaussSeidel)
    };
    let residual = g.residual(&pi);
    Ok(Stationary { pi, residual, method })
}

fn gth_banded(g: &SparseGenerator, bw: usize) -> Result<Vec<f64>> {
    let n = g.len();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let width = 2 * bw + 1;
    // row i stores columns i-bw ..= i+bw at offsets 0 ..= 2bw
    let mut a = vec![0.0; n * width];
    for i in 0..n {
        for (j, r) in g.row(i) {
            a[i * width + j + bw - i] = r;
        }
    }

    let mut exit_down = vec![0.0; n];
    for m in (1..n).rev() {
        let lo = m.saturating_sub(bw);
        let (head, tail) = a.split_at_mut(m * width);
        let row_m = &tail[lo + bw - m..bw];
        let s: f64 = row_m.iter().sum();
        if !(s > 0.0) {
            return Err(Error::Reducible { state: m });
        }
        exit_down[m] = s;
        for i in lo..m {
            let row_i = &mut head[i * width..(i + 1) * width];
            let a_im = row_i[m + bw - i];
            if a_im == 0.0 {
                continue;
            }
            let f = a_im / s;
            let dst = &mut row_i[lo + bw - i..m + bw - i];
            for (d, &src) in dst.iter_mut().zip(row_m) {
                *d += f * src;
            }
        }
    }

    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for m in 1..n {
        let lo = m.saturating_sub(bw);
        let inflow: f64 = (lo..m).map(|i| pi[i] * a[i * width + m + bw - i]).sum();
        pi[m] = inflow / exit_down[m];
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);
    Ok(pi)
}

fn gauss_seidel(g: &SparseGenerator, opts: &SolverOptions) -> Result<Vec<f64>> {
    let n = g.len();
    let (ptr, src, rates) = g.incoming();
    if let Some(state) = (0..n).find(|&i| g.diagonal(i) == 0.0) {
        return Err(Error::Reducible { state });
    }
    let mut pi = vec![1.0 / n as f64; n];
    let mut residual = f64::INFINITY;
    for sweep in 1..=opts.max_sweeps {
        for j in 0..n {
            let inflow: f64 = (ptr[j]..ptr[j + 1]).map(|e| pi[src[e]] * rates[e]).sum();
            pi[j] = inflow / -g.diagonal(j);
        }
        let total: f64 = pi.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::NonConvergence { iterations: sweep, residual });
        }
        pi.iter_mut().for_each(|p| *p /= total);
        if sweep % 10 == 0 {
            residual = g.residual(&pi);
            if residual <= opts.tolerance {
                return Ok(pi);
            }
        }
    }
    Err(Error::NonConvergence { iterations: opts.max_sweeps, residual })
}
