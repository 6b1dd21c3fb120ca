//! Statistical verdict helpers.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson statistic for observed counts against expected counts.
pub fn chi_square_statistic(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum()
}

/// Critical value of the chi-square distribution with `dof` degrees of
/// freedom at significance `alpha` (upper tail).
pub fn chi_square_critical(dof: u64, alpha: f64) -> f64 {
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - alpha)
}

/// Outcome of a goodness-of-fit test.
#[derive(Clone, Copy, Debug)]
pub struct ChiSquareOutcome {
    pub statistic: f64,
    pub critical: f64,
    pub dof: u64,
}

impl ChiSquareOutcome {
    /// `true` when uniformity is not rejected.
    pub fn passes(&self) -> bool {
        self.statistic <= self.critical
    }
}

/// Tests samples in `[0, cells)` for uniformity.
pub fn chi_square_uniform(samples: impl IntoIterator<Item = u64>, cells: u64, alpha: f64) -> ChiSquareOutcome {
    let mut counts = vec![0u64; cells as usize];
    let mut n = 0u64;
    for s in samples {
        counts[s as usize] += 1;
        n += 1;
    }
    let expected = vec![n as f64 / cells as f64; cells as usize];
    ChiSquareOutcome {
        statistic: chi_square_statistic(&counts, &expected),
        critical: chi_square_critical(cells - 1, alpha),
        dof: cells - 1,
    }
}

/// Half-width of the three-sigma band around 1/2 for `trials` fair coin flips.
pub fn fair_coin_band(trials: u64) -> f64 {
    3.0 * (1.0 / (4.0 * trials as f64)).sqrt()
}

/// Largest success rate consistent with per-trial probability `q`:
/// `max(3q, q + 3 sigma)` with `sigma = sqrt(q(1-q)/trials)`.
pub fn collision_rate_bound(q: f64, trials: u64) -> f64 {
    let sigma = (q * (1.0 - q) / trials as f64).sqrt();
    (3.0 * q).max(q + 3.0 * sigma)
}
