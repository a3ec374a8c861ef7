//! Estimators and hypothesis checks linking Monte Carlo runs to the oracles.

mod gamma;

use serde::Serialize;

pub use gamma::{chi_square_sf, gamma_q, ln_gamma};

use crate::error::{Error, Result};
use crate::spin::HalfIntegerValue;

/// Acceptance band, in standard errors.
pub const SIGMA_BAND: f64 = 5.0;

/// Significance level for chi-square uniformity checks.
pub const CHI_SQUARE_ALPHA: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_trials: u64,
}

/// Exact running sums for `<alpha beta>`.
///
/// Outcomes are half integers, so `q = 4 alpha beta` is an integer and all
/// sums are kept in integer arithmetic. Merging is therefore associative and
/// commutative bit for bit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CorrelationAccumulator {
    pub count: u64,
    pub sum_q: i128,
    pub sum_q2: i128,
}

impl CorrelationAccumulator {
    pub fn push(&mut self, alpha: HalfIntegerValue, beta: HalfIntegerValue) {
        let q = i128::from(alpha.quarter_product(beta));
        self.count += 1;
        self.sum_q += q;
        self.sum_q2 += q * q;
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.count += other.count;
        self.sum_q += other.sum_q;
        self.sum_q2 += other.sum_q2;
        self
    }

    pub fn estimate(&self) -> Result<CorrelationEstimate> {
        if self.count < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: self.count as usize,
            });
        }
        let n = i128::from(self.count);
        // (n - 1) n var(q) = n sum q^2 - (sum q)^2, exact
        let scaled = n * self.sum_q2 - self.sum_q * self.sum_q;
        let var_q = scaled as f64 / (n as f64 * (n - 1) as f64);
        let mean = self.sum_q as f64 / (4.0 * n as f64);
        let std_error = (var_q.max(0.0) / n as f64).sqrt() / 4.0;
        Ok(CorrelationEstimate {
            mean,
            std_error,
            n_trials: self.count,
        })
    }
}

/// Exact moments of an integer-valued statistic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IntegerMoments {
    pub count: u64,
    pub sum: i128,
    pub sum_sq: i128,
}

impl IntegerMoments {
    pub fn push(&mut self, x: i64) {
        let x = i128::from(x);
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    /// Mean and standard error of the mean, scaled by `1 / scale`.
    pub fn estimate(&self, scale: f64) -> Result<CorrelationEstimate> {
        if self.count < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: self.count as usize,
            });
        }
        let n = i128::from(self.count);
        let scaled = n * self.sum_sq - self.sum * self.sum;
        let var = scaled as f64 / (n as f64 * (n - 1) as f64);
        Ok(CorrelationEstimate {
            mean: self.sum as f64 / (scale * n as f64),
            std_error: (var.max(0.0) / n as f64).sqrt() / scale,
            n_trials: self.count,
        })
    }
}

/// Sample mean of `alpha * beta` and its standard error.
pub fn estimate_correlation(
    samples: &[(HalfIntegerValue, HalfIntegerValue)],
) -> Result<CorrelationEstimate> {
    samples
        .iter()
        .fold(CorrelationAccumulator::default(), |mut acc, &(a, b)| {
            acc.push(a, b);
            acc
        })
        .estimate()
}

/// Pearson test against the uniform law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityReport {
    pub counts: Vec<u64>,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

impl UniformityReport {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

pub fn chi_square_uniform(counts: &[u64]) -> Result<UniformityReport> {
    let total: u64 = counts.iter().sum();
    if counts.len() < 2 || total == 0 {
        return Err(Error::EmptyCounts);
    }
    let expected = total as f64 / counts.len() as f64;
    let chi_square: f64 = counts
        .iter()
        .map(|&c| {
            let diff = c as f64 - expected;
            diff * diff / expected
        })
        .sum();
    let degrees_of_freedom = counts.len() - 1;
    Ok(UniformityReport {
        counts: counts.to_vec(),
        chi_square,
        degrees_of_freedom,
        p_value: chi_square_sf(chi_square, degrees_of_freedom),
    })
}

/// `|mean - target| / std_error`.
pub fn z_test(estimate: &CorrelationEstimate, target: f64) -> Result<f64> {
    let diff = (estimate.mean - target).abs();
    if estimate.std_error == 0.0 {
        if diff == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::DegenerateZTest {
            mean: estimate.mean,
            target,
        });
    }
    Ok(diff / estimate.std_error)
}

/// `|p_hat - p| / sqrt(p(1 - p)/n)` for a binomial proportion.
pub fn proportion_z(successes: u64, n: u64, p: f64) -> f64 {
    let p_hat = successes as f64 / n as f64;
    (p_hat - p).abs() / (p * (1.0 - p) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h(t: i64) -> HalfIntegerValue {
        HalfIntegerValue::from_twice(t)
    }

    #[test]
    fn constant_samples() {
        let e = estimate_correlation(&[(h(1), h(-1)); 10]).unwrap();
        assert_eq!(e.mean, -0.25);
        assert_eq!(e.std_error, 0.0);
        assert_eq!(e.n_trials, 10);
    }

    #[test]
    fn two_samples() {
        let e = estimate_correlation(&[(h(1), h(1)), (h(1), h(-1))]).unwrap();
        assert_eq!(e.mean, 0.0);
        // values 1/4 and -1/4: sample sd sqrt(1/8), se = sqrt(1/8)/sqrt(2) = 1/4
        assert!((e.std_error - 0.25).abs() < 1e-15);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            estimate_correlation(&[(h(1), h(1))]),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn chi_square_examples() {
        let r = chi_square_uniform(&[50, 50, 50]).unwrap();
        assert_eq!(r.chi_square, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.degrees_of_freedom, 2);
        assert_eq!(chi_square_uniform(&[100, 0]).unwrap().chi_square, 100.0);
        assert!(chi_square_uniform(&[]).is_err());
        assert!(chi_square_uniform(&[0, 0]).is_err());
        assert!(chi_square_uniform(&[5]).is_err());
    }

    #[test]
    fn chi_square_reference_table() {
        // chi2.sf(x, k) from an independent high-precision implementation
        let table = [
            (1, 0.5, 0.479_500_122_186_953_37),
            (1, 5.0, 0.025_347_318_677_468_325),
            (1, 20.0, 7.744_216_431_044_088e-6),
            (4, 0.5, 0.973_500_978_839_256_1),
            (4, 5.0, 0.287_297_495_183_645_8),
            (4, 20.0, 4.993_992_273_873_336e-4),
            (6, 0.5, 0.997_838_503_310_237_5),
            (6, 5.0, 0.543_813_115_883_329_7),
            (6, 20.0, 2.769_395_715_511_577_5e-3),
        ];
        for (k, x, expect) in table {
            let p = chi_square_sf(x, k);
            assert!((p - expect).abs() <= 1e-8, "dof {k}, x {x}: {p} vs {expect}");
            // three significant digits
            assert!(((p - expect) / expect).abs() < 5e-4);
        }
    }

    #[test]
    fn z_test_examples() {
        let e = CorrelationEstimate { mean: 1.0, std_error: 0.5, n_trials: 10 };
        assert_eq!(z_test(&e, 1.0).unwrap(), 0.0);
        assert_eq!(z_test(&e, 0.0).unwrap(), 2.0);
        let zero = CorrelationEstimate { mean: 1.0, std_error: 0.0, n_trials: 10 };
        assert!(z_test(&zero, 0.0).is_err());
        assert_eq!(z_test(&zero, 1.0).unwrap(), 0.0);
    }

    fn pairs() -> impl Strategy<Value = Vec<(i64, i64)>> {
        prop::collection::vec((-12i64..=12, -12i64..=12), 2..60)
    }

    proptest! {
        #[test]
        fn estimate_is_permutation_invariant(v in pairs(), seed in any::<u64>()) {
            let samples: Vec<_> = v.iter().map(|&(a, b)| (h(a), h(b))).collect();
            let mut shuffled = samples.clone();
            // deterministic Fisher-Yates driven by `seed`
            let mut s = seed;
            for i in (1..shuffled.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
            prop_assert_eq!(estimate_correlation(&samples).unwrap(), estimate_correlation(&shuffled).unwrap());
        }

        #[test]
        fn merge_order_does_not_matter(v in pairs(), cut in 0usize..60) {
            let samples: Vec<_> = v.iter().map(|&(a, b)| (h(a), h(b))).collect();
            let cut = cut.min(samples.len());
            let acc = |s: &[(HalfIntegerValue, HalfIntegerValue)]| {
                let mut a = CorrelationAccumulator::default();
                for &(x, y) in s { a.push(x, y); }
                a
            };
            let (l, r) = samples.split_at(cut);
            prop_assert_eq!(acc(l).merge(acc(r)), acc(r).merge(acc(l)));
            prop_assert_eq!(acc(l).merge(acc(r)), acc(&samples));
        }
    }
}
