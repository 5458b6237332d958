use rand::Rng;
use rand_distr::Exp1;

use crate::error::{invalid, Result};
use crate::multiset::BetaMultiset;
use crate::rng::stream_rng;

/// Realizations of `U_1^(1/b_1) ... U_K^(1/b_K)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
}

impl SampleBatch {
    /// Sup-distance between the empirical CDF and `cdf`.
    pub fn ks_distance(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let mut sorted = self.values.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let mut worst: f64 = 0.0;
        for (i, &x) in sorted.iter().enumerate() {
            let f = cdf(x);
            worst = worst.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
        }
        worst
    }
}

/// Draws `n` values as `exp(-sum_i E_i / b_i)` with unit exponentials `E_i`.
/// A product that underflows to zero is reported as `f64::MIN_POSITIVE`.
pub fn sample(
    multiset: &BetaMultiset<f64>,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<SampleBatch> {
    if n == 0 {
        return Err(invalid("sample size must be at least 1"));
    }
    let rates: Vec<f64> = multiset.expanded().iter().map(|b| 1.0 / b).collect();
    let mut rng = stream_rng(seed, stream);
    let values = (0..n)
        .map(|_| {
            let exponent: f64 = rates.iter().map(|r| r * rng.sample::<f64, _>(Exp1)).sum();
            (-exponent).exp().max(f64::MIN_POSITIVE)
        })
        .collect();
    Ok(SampleBatch {
        values,
        seed,
        stream,
    })
}
