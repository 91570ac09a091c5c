//! Agreement between predicted and reference MLD measurements.

use serde::{Deserialize, Serialize};

use super::bootstrap::{bootstrap_ci, BootstrapConfig, ConfidenceInterval};
use crate::error::{Error, Result};
use crate::par::Execution;

/// Multiplier of the difference SD for the limits of agreement.
pub const LOA_Z: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlandAltmanPoint {
    pub mean: f64,
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlandAltman {
    pub mean_diff: f64,
    /// Sample SD of the differences.
    pub sd: f64,
    pub loa_low: f64,
    pub loa_high: f64,
    /// Mean absolute difference.
    pub mad: f64,
    pub points: Vec<BlandAltmanPoint>,
}

fn check_pairs(pred: &[f64], gt: &[f64]) -> Result<()> {
    if pred.len() != gt.len() {
        return Err(Error::LengthMismatch(pred.len(), gt.len()));
    }
    if pred.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: pred.len() });
    }
    if pred.iter().chain(gt).any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("measurements must be finite".into()));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_sd(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Differences are `pred − gt`.
pub fn bland_altman(pred: &[f64], gt: &[f64]) -> Result<BlandAltman> {
    check_pairs(pred, gt)?;
    let diffs: Vec<f64> = pred.iter().zip(gt).map(|(p, g)| p - g).collect();
    let mean_diff = mean(&diffs);
    let sd = sample_sd(&diffs);
    let mad = diffs.iter().map(|d| d.abs()).sum::<f64>() / diffs.len() as f64;
    let points = pred
        .iter()
        .zip(gt)
        .map(|(p, g)| BlandAltmanPoint { mean: (p + g) / 2.0, diff: p - g })
        .collect();
    Ok(BlandAltman {
        mean_diff,
        sd,
        loa_low: mean_diff - LOA_Z * sd,
        loa_high: mean_diff + LOA_Z * sd,
        mad,
        points,
    })
}

/// A lesion is positive (significant) when its MLD is at most the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgreementThresholds {
    pub gt_px: f64,
    pub pred_px: f64,
}

impl Default for AgreementThresholds {
    fn default() -> Self {
        Self { gt_px: 4.0, pred_px: 6.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn from_pairs(pairs: &[(f64, f64)], t: AgreementThresholds) -> Self {
        let mut c = Confusion::default();
        for &(p, g) in pairs {
            match (p <= t.pred_px, g <= t.gt_px) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        c
    }

    pub fn precision(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn specificity(&self) -> Option<f64> {
        ratio(self.tn, self.tn + self.fp)
    }

    /// Harmonic mean of precision and recall, 0 when both are 0.
    pub fn f1(&self) -> Option<f64> {
        Some(harmonic(self.precision()?, self.recall()?))
    }

    pub fn balanced_accuracy(&self) -> Option<f64> {
        Some((self.recall()? + self.specificity()?) / 2.0)
    }
}

pub(crate) fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub(crate) fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// A point estimate with its bootstrap interval; either may be undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: Option<f64>,
    pub ci: Option<ConfidenceInterval>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    pub n: usize,
    /// Mean absolute difference.
    pub mad: f64,
    /// Sample SD of the absolute differences (the spread reported with `mad`).
    pub sd: f64,
    pub mean_diff: f64,
    /// Sample SD of the signed differences, used for the limits of agreement.
    pub diff_sd: f64,
    pub loa_low: f64,
    pub loa_high: f64,
    pub thresholds: AgreementThresholds,
    pub confusion: Confusion,
    pub prec: Estimate,
    pub rec: Estimate,
    pub f1: Estimate,
    pub bal_acc: Estimate,
}

impl AgreementReport {
    /// Names of the classification metrics whose point estimate is undefined.
    pub fn undefined_metrics(&self) -> Vec<&'static str> {
        [("prec", &self.prec), ("rec", &self.rec), ("f1", &self.f1), ("bal_acc", &self.bal_acc)]
            .into_iter()
            .filter(|(_, e)| e.value.is_none())
            .map(|(n, _)| n)
            .collect()
    }
}

/// Full agreement report. Classification metrics that are undefined on the
/// data are reported as `None` instead of failing.
pub fn agreement_report(
    pred: &[f64],
    gt: &[f64],
    thresholds: AgreementThresholds,
    bootstrap: BootstrapConfig,
    exec: Execution,
) -> Result<AgreementReport> {
    let ba = bland_altman(pred, gt)?;
    let abs: Vec<f64> = ba.points.iter().map(|p| p.diff.abs()).collect();
    let pairs: Vec<(f64, f64)> = pred.iter().copied().zip(gt.iter().copied()).collect();
    let confusion = Confusion::from_pairs(&pairs, thresholds);
    let estimate = |f: fn(&Confusion) -> Option<f64>| -> Result<Estimate> {
        let value = f(&confusion);
        if value.is_none() {
            return Ok(Estimate { value, ci: None });
        }
        let stat = |s: &[(f64, f64)]| f(&Confusion::from_pairs(s, thresholds));
        let ci = match bootstrap_ci(&pairs, stat, bootstrap, exec) {
            Ok(ci) => Some(ci),
            Err(Error::UndefinedMetric(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Estimate { value, ci })
    };
    Ok(AgreementReport {
        n: pred.len(),
        mad: ba.mad,
        sd: sample_sd(&abs),
        mean_diff: ba.mean_diff,
        diff_sd: ba.sd,
        loa_low: ba.loa_low,
        loa_high: ba.loa_high,
        thresholds,
        confusion,
        prec: estimate(Confusion::precision)?,
        rec: estimate(Confusion::recall)?,
        f1: estimate(Confusion::f1)?,
        bal_acc: estimate(Confusion::balanced_accuracy)?,
    })
}

/// [`agreement_report`] with the default thresholds and 1000 bootstrap
/// iterations, failing when the reference labels are all of one class.
pub fn severity_agreement(pred: &[f64], gt: &[f64], exec: Execution) -> Result<AgreementReport> {
    let report =
        agreement_report(pred, gt, AgreementThresholds::default(), BootstrapConfig::default(), exec)?;
    if report.bal_acc.value.is_none() {
        return Err(Error::UndefinedMetric("balanced accuracy (reference labels are all one class)"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_measurements() {
        // nothing in (4, 6], where the two thresholds disagree
        let v = [2.0, 3.0, 7.0, 8.0];
        let ba = bland_altman(&v, &v).unwrap();
        assert_eq!((ba.mean_diff, ba.sd, ba.loa_low, ba.loa_high, ba.mad), (0.0, 0.0, 0.0, 0.0, 0.0));
        let r = severity_agreement(&v, &v, Execution::Sequential).unwrap();
        for e in [r.prec, r.rec, r.f1, r.bal_acc] {
            assert_eq!(e.value, Some(1.0));
        }
    }

    #[test]
    fn constant_offset() {
        let gt = [2.0, 3.0, 5.0, 8.0];
        let pred: Vec<f64> = gt.iter().map(|g| g + 2.0).collect();
        let ba = bland_altman(&pred, &gt).unwrap();
        assert!((ba.mean_diff - 2.0).abs() < 1e-12);
        assert!(ba.sd.abs() < 1e-12);
        assert!((ba.mad - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hand_set() {
        let ba = bland_altman(&[5.0, 7.0, 3.0], &[4.0, 9.0, 3.0]).unwrap();
        assert!((ba.mean_diff + 1.0 / 3.0).abs() < 1e-12);
        assert!((ba.mad - 1.0).abs() < 1e-12);
        assert!(ba.loa_low <= ba.mean_diff && ba.mean_diff <= ba.loa_high);
    }

    #[test]
    fn errors() {
        assert_eq!(bland_altman(&[1.0, 2.0], &[1.0]).unwrap_err(), Error::LengthMismatch(2, 1));
        assert!(matches!(bland_altman(&[1.0], &[1.0]), Err(Error::TooFewSamples { .. })));
        let all_negative = [9.0, 10.0, 11.0];
        assert!(matches!(
            severity_agreement(&all_negative, &all_negative, Execution::Sequential),
            Err(Error::UndefinedMetric(_))
        ));
    }

    #[test]
    fn hand_confusion() {
        // (pred, gt): tp, tp, fp, fn, tn, tn
        let pred = [3.0, 6.0, 5.5, 7.0, 9.0, 12.0];
        let gt = [3.0, 4.0, 4.5, 2.0, 8.0, 10.0];
        let r = agreement_report(
            &pred,
            &gt,
            AgreementThresholds::default(),
            BootstrapConfig { iterations: 200, ..Default::default() },
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(r.confusion, Confusion { tp: 2, fp: 1, fn_: 1, tn: 2 });
        assert!((r.prec.value.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.rec.value.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.bal_acc.value.unwrap() - (2.0 / 3.0 + 2.0 / 3.0) / 2.0).abs() < 1e-12);
        let ci = r.f1.ci.unwrap();
        assert!(ci.lo <= ci.hi);
    }
}
