//! Log-domain and compensated-summation helpers.

/// `ln Σ e^{x_i}`, or `-inf` for an empty input.
pub fn log_sum_exp(values: impl IntoIterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.into_iter().filter(|v| *v > f64::NEG_INFINITY).collect();
    let Some(max) = values.iter().copied().reduce(f64::max) else {
        return f64::NEG_INFINITY;
    };
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// `ln P(bit differs from its hard decision)` for reliability `|L|`.
#[inline]
pub fn ln_flip_prob(abs_llr: f64) -> f64 {
    -abs_llr - (-abs_llr).exp().ln_1p()
}

/// `ln P(bit agrees with its hard decision)` for reliability `|L|`.
#[inline]
pub fn ln_keep_prob(abs_llr: f64) -> f64 {
    -(-abs_llr).exp().ln_1p()
}
