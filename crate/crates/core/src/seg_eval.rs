//! Segmentation scoring: pixel confusion metrics, clDice and the modified
//! Hausdorff distance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::morphology::{skeletonize, squared_edt_to_sites};
use crate::par::{map_slice, Execution};
use crate::types::BinaryMask;

/// Default side length masks are resized to before scoring.
pub const EVAL_SIZE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PixelMetrics {
    pub acc: f64,
    pub prec: f64,
    pub rec: f64,
    pub dice: f64,
    pub iou: f64,
}

/// Accuracy, precision, recall, Dice and IoU over pixels.
///
/// Empty-set conventions: precision with no predicted pixels is 1 when the
/// ground truth is empty too and 0 otherwise; recall with no ground-truth
/// pixels likewise; Dice and IoU are 1 when both masks are empty.
pub fn pixel_metrics(pred: &BinaryMask, gt: &BinaryMask) -> Result<PixelMetrics> {
    pred.same_dims(gt)?;
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&p, &g) in pred.data().iter().zip(gt.data()) {
        match (p, g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let total = pred.data().len();
    let tn = total - tp - fp - fn_;
    let both_empty = tp + fp + fn_ == 0;
    let frac = |num: usize, den: usize| {
        if den > 0 {
            num as f64 / den as f64
        } else if both_empty {
            1.0
        } else {
            0.0
        }
    };
    Ok(PixelMetrics {
        acc: (tp + tn) as f64 / total as f64,
        prec: frac(tp, tp + fp),
        rec: frac(tp, tp + fn_),
        dice: frac(2 * tp, 2 * tp + fp + fn_),
        iou: frac(tp, tp + fp + fn_),
    })
}

fn covered(skel: &BinaryMask, mask: &BinaryMask) -> f64 {
    let hits = skel.data().iter().zip(mask.data()).filter(|(&s, &m)| s && m).count();
    hits as f64 / skel.count() as f64
}

/// Centerline Dice: harmonic mean of the fraction of the predicted skeleton
/// inside the ground truth and the fraction of the ground-truth skeleton inside
/// the prediction. 1 when both masks are empty, 0 when exactly one is.
pub fn cl_dice(pred: &BinaryMask, gt: &BinaryMask) -> Result<f64> {
    pred.same_dims(gt)?;
    match (pred.is_empty(), gt.is_empty()) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Ok(0.0),
        _ => {}
    }
    let tprec = covered(&skeletonize(pred), gt);
    let tsens = covered(&skeletonize(gt), pred);
    Ok(if tprec + tsens == 0.0 { 0.0 } else { 2.0 * tprec * tsens / (tprec + tsens) })
}

/// Mean over `from`'s foreground of the Euclidean distance to the nearest
/// foreground pixel of `to`.
fn directed_mean_distance(from: &BinaryMask, to: &BinaryMask) -> f64 {
    let d2 = squared_edt_to_sites(to.width(), to.height(), to.data());
    let mut sum = 0.0;
    let mut n = 0usize;
    for (i, &f) in from.data().iter().enumerate() {
        if f {
            sum += d2[i].sqrt();
            n += 1;
        }
    }
    sum / n as f64
}

/// Modified Hausdorff distance: the larger of the two directed mean
/// nearest-foreground distances.
pub fn mhd(pred: &BinaryMask, gt: &BinaryMask) -> Result<f64> {
    pred.same_dims(gt)?;
    if pred.is_empty() || gt.is_empty() {
        return Err(Error::EmptyMask);
    }
    Ok(directed_mean_distance(pred, gt).max(directed_mean_distance(gt, pred)))
}

/// All segmentation metrics of one mask pair. `mhd` is `None` when either mask
/// is empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegScore {
    pub acc: f64,
    pub prec: f64,
    pub rec: f64,
    pub dice: f64,
    pub iou: f64,
    pub cldice: f64,
    pub mhd: Option<f64>,
}

impl SegScore {
    pub const COLUMNS: [&'static str; 7] = ["acc", "prec", "rec", "dice", "iou", "cldice", "mhd"];

    pub fn values(&self) -> [Option<f64>; 7] {
        [
            Some(self.acc),
            Some(self.prec),
            Some(self.rec),
            Some(self.dice),
            Some(self.iou),
            Some(self.cldice),
            self.mhd,
        ]
    }
}

pub fn score_pair(pred: &BinaryMask, gt: &BinaryMask) -> Result<SegScore> {
    let px = pixel_metrics(pred, gt)?;
    let mhd = match mhd(pred, gt) {
        Ok(v) => Some(v),
        Err(Error::EmptyMask) => None,
        Err(e) => return Err(e),
    };
    Ok(SegScore {
        acc: px.acc,
        prec: px.prec,
        rec: px.rec,
        dice: px.dice,
        iou: px.iou,
        cldice: cl_dice(pred, gt)?,
        mhd,
    })
}

/// Scores `(pred, gt)` pairs in order.
pub fn score_batch(pairs: &[(BinaryMask, BinaryMask)], exec: Execution) -> Vec<Result<SegScore>> {
    map_slice(pairs, exec, |(p, g)| score_pair(p, g))
}

/// Column-wise mean and population SD over the pairs where each column is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegSummary {
    pub mean: [Option<f64>; 7],
    pub sd: [Option<f64>; 7],
}

pub fn summarize(scores: &[SegScore]) -> SegSummary {
    let mut mean = [None; 7];
    let mut sd = [None; 7];
    for c in 0..7 {
        let col: Vec<f64> = scores.iter().filter_map(|s| s.values()[c]).collect();
        if col.is_empty() {
            continue;
        }
        let n = col.len() as f64;
        let m = col.iter().sum::<f64>() / n;
        mean[c] = Some(m);
        sd[c] = Some((col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n).sqrt());
    }
    SegSummary { mean, sd }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask_from(rows: &[&str]) -> BinaryMask {
        BinaryMask::from_fn(rows[0].len(), rows.len(), |x, y| rows[y].as_bytes()[x] == b'#')
    }

    #[test]
    fn identical_masks() {
        let m = mask_from(&["......", ".###..", ".####.", "......"]);
        let s = score_pair(&m, &m).unwrap();
        assert_eq!((s.acc, s.prec, s.rec, s.dice, s.iou, s.cldice, s.mhd), (1.0, 1.0, 1.0, 1.0, 1.0, 1.0, Some(0.0)));
    }

    #[test]
    fn empty_conventions() {
        let e = BinaryMask::empty(4, 4);
        let p = pixel_metrics(&e, &e).unwrap();
        assert_eq!((p.prec, p.rec, p.dice, p.iou), (1.0, 1.0, 1.0, 1.0));
        assert_eq!(cl_dice(&e, &e).unwrap(), 1.0);
        let g = mask_from(&["....", ".##.", "....", "...."]);
        let p = pixel_metrics(&e, &g).unwrap();
        assert_eq!((p.prec, p.rec, p.dice, p.iou), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(cl_dice(&e, &g).unwrap(), 0.0);
        assert_eq!(mhd(&e, &g).unwrap_err(), Error::EmptyMask);
        assert_eq!(score_pair(&e, &g).unwrap().mhd, None);
    }

    #[test]
    fn dimension_mismatch() {
        let a = BinaryMask::empty(4, 4);
        let b = BinaryMask::empty(4, 5);
        assert!(matches!(pixel_metrics(&a, &b), Err(Error::DimensionMismatch(..))));
        assert!(matches!(cl_dice(&a, &b), Err(Error::DimensionMismatch(..))));
        assert!(matches!(mhd(&a, &b), Err(Error::DimensionMismatch(..))));
    }

    #[test]
    fn single_pixels_mhd() {
        let mut a = BinaryMask::empty(5, 5);
        let mut b = BinaryMask::empty(5, 5);
        a.set(0, 0, true);
        b.set(3, 4, true);
        assert_eq!(mhd(&a, &b).unwrap(), 5.0);
    }

    #[test]
    fn disjoint_cldice() {
        let a = mask_from(&["###.....", "........", "........"]);
        let b = mask_from(&["........", "........", ".....###"]);
        assert_eq!(cl_dice(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn summary_rows() {
        let s = |dice, mhd| SegScore { acc: 1.0, prec: 1.0, rec: 1.0, dice, iou: dice, cldice: 1.0, mhd };
        let sum = summarize(&[s(0.5, Some(2.0)), s(1.0, None)]);
        assert_eq!(sum.mean[3], Some(0.75));
        assert_eq!(sum.sd[3], Some(0.25));
        assert_eq!(sum.mean[6], Some(2.0));
        assert_eq!(sum.sd[6], Some(0.0));
    }
}
