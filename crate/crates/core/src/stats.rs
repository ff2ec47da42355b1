//! Small estimators for simulation output.

use statrs::distribution::{ContinuousCDF, StudentsT};

/// Sample mean and unbiased variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Two-sided Student-t quantile for a `level` confidence interval.
pub fn t_quantile(level: f64, dof: usize) -> f64 {
    if dof == 0 {
        return f64::INFINITY;
    }
    StudentsT::new(0.0, 1.0, dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.5 + level / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub mean: f64,
    pub half_width: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl ConfidenceInterval {
    /// Student-t interval for the mean of independent observations.
    pub fn of(xs: &[f64], level: f64) -> Self {
        let (mean, var) = mean_var(xs);
        let std_error = (var / xs.len() as f64).sqrt();
        let half_width = if xs.len() < 2 { f64::INFINITY } else { t_quantile(level, xs.len() - 1) * std_error };
        ConfidenceInterval { mean, half_width, std_error, samples: xs.len() }
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }
}

/// Standard error of the overall mean from equal-size batch means.
pub fn batch_means_stderr(batch_means: &[f64]) -> f64 {
    let (_, var) = mean_var(batch_means);
    (var / batch_means.len() as f64).sqrt()
}
