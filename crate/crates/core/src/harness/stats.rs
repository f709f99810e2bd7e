//! Interval estimates, paired comparisons and pseudothreshold arithmetic.

use thiserror::Error;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Wilson score interval for `failures` out of `trials` at quantile `z`.
pub fn wilson_interval(failures: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let k = failures as f64;
    let z2 = z * z;
    let denom = n + z2;
    let center = (k + z2 / 2.0) / denom;
    let half = z / denom * (k * (n - k) / n + z2 / 4.0).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Mean and standard error of the per-trial difference `a_i - b_i` of two
/// failure indicators observed on the same error samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedDifference {
    pub mean: f64,
    pub std_err: f64,
    /// Trials where only `a` failed.
    pub only_a: usize,
    /// Trials where only `b` failed.
    pub only_b: usize,
}

impl PairedDifference {
    pub fn from_indicators(a: &[bool], b: &[bool]) -> Self {
        assert_eq!(a.len(), b.len(), "paired samples must have equal length");
        let n = a.len();
        let only_a = a.iter().zip(b).filter(|(x, y)| **x && !**y).count();
        let only_b = a.iter().zip(b).filter(|(x, y)| !**x && **y).count();
        if n == 0 {
            return Self { mean: 0.0, std_err: 0.0, only_a, only_b };
        }
        let nf = n as f64;
        let mean = (only_a as f64 - only_b as f64) / nf;
        // d_i is in {-1, 0, 1}, so sum d_i^2 counts the discordant pairs
        let second = (only_a + only_b) as f64 / nf;
        let var = if n > 1 { (second - mean * mean) * nf / (nf - 1.0) } else { 0.0 };
        Self { mean, std_err: (var.max(0.0) / nf).sqrt(), only_a, only_b }
    }

    /// Whether `a` is not worse than `b` at the given quantile.
    pub fn not_worse(&self, z: f64) -> bool {
        self.mean <= z * self.std_err
    }

    /// Whether `a` is better than `b` at the given quantile.
    pub fn strictly_better(&self, z: f64) -> bool {
        self.mean < -z * self.std_err
    }
}

/// Block error rate of `k` unprotected qubits, `1 - (1 - p)^k`.
pub fn uncoded_bler(p: f64, k: usize) -> f64 {
    -((k as f64) * (-p).ln_1p()).exp_m1()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThresholdError {
    #[error("need at least two curve points, got {0}")]
    TooFewPoints(usize),
    #[error("the curve does not cross the uncoded reference inside the grid")]
    NotBracketed,
    #[error("invalid curve point (p = {0})")]
    InvalidPoint(f64),
}

/// Physical error rate at which `(p, bler)` crosses `1 - (1 - p)^k`,
/// interpolated linearly in log-log coordinates between the bracketing
/// grid points (linearly in `p` when a bracketing BLER is zero). A point
/// lying exactly on the reference is returned as is.
pub fn pseudothreshold(curve: &[(f64, f64)], k: usize) -> Result<f64, ThresholdError> {
    if curve.len() < 2 {
        return Err(ThresholdError::TooFewPoints(curve.len()));
    }
    let mut pts = curve.to_vec();
    for &(p, b) in &pts {
        if !(p > 0.0 && p < 1.0) || !(0.0..=1.0).contains(&b) {
            return Err(ThresholdError::InvalidPoint(p));
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let gap = |(p, b): (f64, f64)| b - uncoded_bler(p, k);
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ga, gb) = (gap(a), gap(b));
        if ga == 0.0 {
            return Ok(a.0);
        }
        if ga.signum() == gb.signum() && gb != 0.0 {
            continue;
        }
        if gb == 0.0 {
            return Ok(b.0);
        }
        if a.1 > 0.0 && b.1 > 0.0 {
            let (xa, xb) = (a.0.ln(), b.0.ln());
            let la = a.1.ln() - uncoded_bler(a.0, k).ln();
            let lb = b.1.ln() - uncoded_bler(b.0, k).ln();
            return Ok((xa + la / (la - lb) * (xb - xa)).exp());
        }
        return Ok(a.0 + ga / (ga - gb) * (b.0 - a.0));
    }
    Err(ThresholdError::NotBracketed)
}
