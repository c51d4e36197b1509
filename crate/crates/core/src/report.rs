//! Metric reports, the exact/sampled switch and seeded sampling.

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prefcore::factorial;
use crate::scalar::Scalar;
use crate::Exact;

/// Exact enumeration is used while `(m!)^n * m!` stays below this.
pub const EXACT_BUDGET: u128 = 1_000_000_000;

/// Samples per substream. Fixed so results do not depend on worker count.
pub const SAMPLE_CHUNK: u64 = 1 << 14;

const Z95: f64 = 1.959_963_984_540_054;

/// `(m!)^n * m!`, the elementary evaluation count of the costliest exact
/// metric.
pub fn exact_cost(m: usize, n: usize) -> u128 {
    let f = factorial(m) as u128;
    (0..=n).try_fold(1u128, |acc, _| acc.checked_mul(f)).unwrap_or(u128::MAX)
}

pub fn within_budget(m: usize, n: usize) -> bool {
    exact_cost(m, n) <= EXACT_BUDGET
}

pub(crate) fn require_budget(m: usize, n: usize) -> Result<()> {
    let needed = exact_cost(m, n);
    if needed > EXACT_BUDGET {
        return Err(Error::BudgetExceeded { needed, budget: EXACT_BUDGET });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Exact,
    Sampled { samples: u64, seed: u64 },
}

impl Mode {
    /// Exact when `(m!)^n * m!` is within [`EXACT_BUDGET`], sampled otherwise.
    pub fn auto(m: usize, n: usize, samples: u64, seed: u64) -> Mode {
        if within_budget(m, n) {
            Mode::Exact
        } else {
            Mode::Sampled { samples, seed }
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Mode::Exact)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            Mode::Sampled { samples: 0, .. } => Err(Error::domain("sampled mode needs samples >= 1")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledValue {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ci_half_width: f64,
    pub samples: u64,
    pub seed: u64,
}

impl SampledValue {
    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Exact),
    Sampled(SampledValue),
}

/// A reported probability with the metric it measures.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub metric: String,
    pub indices: Vec<usize>,
    pub value: Value,
}

impl MetricReport {
    pub fn exact(metric: &str, indices: Vec<usize>, num: u128, den: u128) -> Self {
        MetricReport::from_exact(metric, indices, Exact::from_ratio(num, den))
    }

    pub fn from_exact(metric: &str, indices: Vec<usize>, value: Exact) -> Self {
        MetricReport { metric: metric.to_string(), indices, value: Value::Exact(value) }
    }

    /// Wilson 95% interval for `hits / samples`, scaled by `scale`.
    pub fn bernoulli(
        metric: &str,
        indices: Vec<usize>,
        hits: u64,
        samples: u64,
        seed: u64,
        scale: f64,
    ) -> Self {
        let (lo, hi) = wilson(hits, samples);
        let mean = hits as f64 / samples as f64;
        MetricReport {
            metric: metric.to_string(),
            indices,
            value: Value::Sampled(SampledValue {
                mean: mean * scale,
                ci_low: lo * scale,
                ci_high: hi * scale,
                ci_half_width: (hi - lo) / 2.0 * scale,
                samples,
                seed,
            }),
        }
    }

    /// Normal-approximation 95% interval from a sum and sum of squares.
    pub fn mean_estimate(
        metric: &str,
        indices: Vec<usize>,
        sum: f64,
        sum_sq: f64,
        samples: u64,
        seed: u64,
    ) -> Self {
        let n = samples as f64;
        let mean = sum / n;
        let var = if samples > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        let half = Z95 * (var / n).sqrt();
        MetricReport {
            metric: metric.to_string(),
            indices,
            value: Value::Sampled(SampledValue {
                mean,
                ci_low: mean - half,
                ci_high: mean + half,
                ci_half_width: half,
                samples,
                seed,
            }),
        }
    }

    pub fn mean(&self) -> f64 {
        match &self.value {
            Value::Exact(q) => q.as_f64(),
            Value::Sampled(s) => s.mean,
        }
    }

    pub fn exact_value(&self) -> Option<&Exact> {
        match &self.value {
            Value::Exact(q) => Some(q),
            Value::Sampled(_) => None,
        }
    }

    pub fn sampled(&self) -> Option<&SampledValue> {
        match &self.value {
            Value::Sampled(s) => Some(s),
            Value::Exact(_) => None,
        }
    }

    pub fn record(&self) -> MetricRecord {
        match &self.value {
            Value::Exact(q) => MetricRecord {
                metric: self.metric.clone(),
                indices: self.indices.clone(),
                mode: "exact".into(),
                num: Some(q.numer().to_string()),
                den: Some(q.denom().to_string()),
                value: q.as_f64(),
                ci95: None,
                samples: None,
                seed: None,
            },
            Value::Sampled(s) => MetricRecord {
                metric: self.metric.clone(),
                indices: self.indices.clone(),
                mode: "sampled".into(),
                num: None,
                den: None,
                value: s.mean,
                ci95: Some(s.ci_half_width),
                samples: Some(s.samples),
                seed: Some(s.seed.to_string()),
            },
        }
    }
}

/// Flat serialized form of a [`MetricReport`]; exact values carry their
/// reduced numerator and denominator as decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub metric: String,
    pub indices: Vec<usize>,
    pub mode: String,
    pub num: Option<String>,
    pub den: Option<String>,
    pub value: f64,
    pub ci95: Option<f64>,
    pub samples: Option<u64>,
    pub seed: Option<String>,
}

impl MetricRecord {
    pub fn exact_value(&self) -> Option<Exact> {
        let num: BigInt = self.num.as_ref()?.parse().ok()?;
        let den: BigInt = self.den.as_ref()?.parse().ok()?;
        Some(Exact::new(num, den))
    }
}

/// Wilson score interval at 95% for `hits` successes in `samples` trials.
pub fn wilson(hits: u64, samples: u64) -> (f64, f64) {
    assert!(samples > 0);
    let n = samples as f64;
    let p = hits as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if hits == samples { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Generator for substream `chunk` of master seed `seed`.
pub fn substream(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Run `samples` draws split into fixed-size substreams, one generator per
/// substream, and reduce chunk results in chunk order.
pub(crate) fn fold_samples<A, Id, F, R>(
    samples: u64,
    seed: u64,
    identity: Id,
    draw: F,
    reduce: R,
) -> A
where
    A: Send,
    Id: Fn() -> A + Sync,
    F: Fn(&mut A, &mut ChaCha8Rng) + Sync,
    R: Fn(A, A) -> A,
{
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    let parts: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, c);
            let mut acc = identity();
            let len = SAMPLE_CHUNK.min(samples - c * SAMPLE_CHUNK);
            for _ in 0..len {
                draw(&mut acc, &mut rng);
            }
            acc
        })
        .collect();
    parts.into_iter().fold(identity(), reduce)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_is_valid_at_zero() {
        let (lo, hi) = wilson(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson(50, 100);
        assert!(lo < 0.5 && hi > 0.5);
        assert!((0.5 - lo - (hi - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn budget_switch() {
        assert!(within_budget(3, 10));
        assert!(!within_budget(3, 12));
        assert_eq!(Mode::auto(6, 3, 10, 1), Mode::Sampled { samples: 10, seed: 1 });
        assert_eq!(Mode::auto(6, 2, 10, 1), Mode::Exact);
        assert!(require_budget(4, 6).is_err());
    }

    #[test]
    fn sample_folds_are_thread_count_invariant() {
        use rand::Rng;
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    fold_samples(
                        100_000,
                        9,
                        || 0.0f64,
                        |acc, rng| *acc += rng.gen::<f64>(),
                        |a, b| a + b,
                    )
                })
        };
        assert_eq!(run(1).to_bits(), run(8).to_bits());
    }

    #[test]
    fn exact_records_are_reduced() {
        let r = MetricReport::exact("m", vec![0], 72, 216);
        let rec = r.record();
        assert_eq!(rec.num.as_deref(), Some("1"));
        assert_eq!(rec.den.as_deref(), Some("3"));
        assert_eq!(rec.exact_value().unwrap(), Exact::from_ratio(1, 3));
    }
}
