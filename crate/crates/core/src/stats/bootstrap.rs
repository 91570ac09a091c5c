//! Seeded percentile bootstrap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub iterations: usize,
    pub level: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self { iterations: 1000, level: 0.95, seed: 0 }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("bootstrap needs at least one iteration".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidConfig(format!("bootstrap level {} not in (0, 1)", self.level)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub lo: f64,
    pub hi: f64,
    /// Resamples on which the statistic was defined.
    pub resamples: usize,
}

/// Percentile interval of `statistic` over resamples drawn with replacement.
///
/// Resample `b` draws its indices from a ChaCha8 stream selected by `b`, so the
/// result does not depend on `exec`. Resamples where `statistic` returns `None`
/// are skipped; if every one is skipped the interval is undefined.
pub fn bootstrap_ci<T, F>(
    values: &[T],
    statistic: F,
    cfg: BootstrapConfig,
    exec: Execution,
) -> Result<ConfidenceInterval>
where
    T: Clone + Send + Sync,
    F: Fn(&[T]) -> Option<f64> + Sync + Send,
{
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    cfg.validate()?;
    let n = values.len();
    let stats = map_indexed(cfg.iterations, exec, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(b as u64);
        let resample: Vec<T> = (0..n).map(|_| values[rng.random_range(0..n)].clone()).collect();
        statistic(&resample)
    });
    let mut defined: Vec<f64> = stats.into_iter().flatten().filter(|v| v.is_finite()).collect();
    if defined.is_empty() {
        return Err(Error::UndefinedMetric("bootstrap statistic"));
    }
    defined.sort_by(f64::total_cmp);
    let tail = (1.0 - cfg.level) / 2.0;
    Ok(ConfidenceInterval {
        lo: percentile(&defined, tail),
        hi: percentile(&defined, 1.0 - tail),
        resamples: defined.len(),
    })
}

/// Linear-interpolation percentile of sorted data, `q` in `[0, 1]`.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean(v: &[f64]) -> Option<f64> {
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }

    #[test]
    fn constant_data() {
        let ci = bootstrap_ci(&[3.5; 20], mean, BootstrapConfig::default(), Execution::Sequential).unwrap();
        assert_eq!((ci.lo, ci.hi), (3.5, 3.5));
    }

    #[test]
    fn deterministic_and_schedule_independent() {
        let data: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64).collect();
        let cfg = BootstrapConfig { seed: 9, ..Default::default() };
        let a = bootstrap_ci(&data, mean, cfg, Execution::Sequential).unwrap();
        let b = bootstrap_ci(&data, mean, cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.lo <= a.hi);
        let other = bootstrap_ci(&data, mean, BootstrapConfig { seed: 10, ..cfg }, Execution::Sequential).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn empty_and_undefined() {
        let empty: [f64; 0] = [];
        assert_eq!(
            bootstrap_ci(&empty, mean, BootstrapConfig::default(), Execution::Sequential).unwrap_err(),
            Error::EmptySample
        );
        let never = |_: &[f64]| None;
        assert!(matches!(
            bootstrap_ci(&[1.0], never, BootstrapConfig::default(), Execution::Sequential),
            Err(Error::UndefinedMetric(_))
        ));
    }

    #[test]
    fn percentile_interpolates() {
        let v = [0.0, 10.0, 20.0, 30.0];
        assert_eq!(percentile(&v, 0.0), 0.0);
        assert_eq!(percentile(&v, 1.0), 30.0);
        assert!((percentile(&v, 0.5) - 15.0).abs() < 1e-12);
    }
}
