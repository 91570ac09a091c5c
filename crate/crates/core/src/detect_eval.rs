//! Detection scoring: IoU matching, 101-point AP, image- and lesion-level
//! summaries, MLD-containment metrics and candidate-true-positive analysis.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{map_slice, Execution};
use crate::stats::{harmonic, mann_whitney_u, ratio};
use crate::types::{DatasetManifest, Detection, LesionAnnotation};

/// IoU thresholds 0.50, 0.55, ..., 0.95.
pub fn iou_thresholds() -> [f64; 10] {
    std::array::from_fn(|k| (50 + 5 * k) as f64 / 100.0)
}

/// Significance level of the candidate-true-positive test.
pub const CTP_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Match {
    pub detection: usize,
    pub annotation: usize,
    pub iou: f64,
}

/// Matching of one image's detections against its ground truth. Indices refer
/// to the input slices.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MatchOutcome {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// In matching order (descending confidence).
    pub matches: Vec<Match>,
    /// Ascending.
    pub fp_detections: Vec<usize>,
    /// Ascending.
    pub fn_annotations: Vec<usize>,
}

impl MatchOutcome {
    fn from_assignment(assigned: &[Option<(usize, f64)>], order: &[usize], n_gt: usize) -> Self {
        let mut matches = Vec::new();
        let mut used = vec![false; n_gt];
        for &d in order {
            if let Some((g, iou)) = assigned[d] {
                matches.push(Match { detection: d, annotation: g, iou });
                used[g] = true;
            }
        }
        let fp_detections: Vec<usize> = (0..assigned.len()).filter(|&d| assigned[d].is_none()).collect();
        let fn_annotations: Vec<usize> = (0..n_gt).filter(|&g| !used[g]).collect();
        MatchOutcome {
            tp: matches.len(),
            fp: fp_detections.len(),
            fn_: fn_annotations.len(),
            matches,
            fp_detections,
            fn_annotations,
        }
    }

    /// Appends the outcome of another image whose detections and annotations
    /// start at the given offsets of a pooled list.
    pub fn append(&mut self, other: &MatchOutcome, det_offset: usize, gt_offset: usize) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.matches.extend(other.matches.iter().map(|m| Match {
            detection: m.detection + det_offset,
            annotation: m.annotation + gt_offset,
            iou: m.iou,
        }));
        self.fp_detections.extend(other.fp_detections.iter().map(|d| d + det_offset));
        self.fn_annotations.extend(other.fn_annotations.iter().map(|g| g + gt_offset));
    }

    /// Whether detection `d` was matched.
    pub fn is_tp(&self, d: usize) -> bool {
        self.matches.iter().any(|m| m.detection == d)
    }
}

/// Detection indices by descending confidence, input order on ties.
fn confidence_order(dets: &[Detection]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].confidence.total_cmp(&dets[a].confidence));
    order
}

/// Greedy matching in descending confidence: each detection takes the
/// unmatched ground truth of highest IoU at or above `iou_thresh` (lowest
/// index on ties).
pub fn match_at_iou(dets: &[Detection], gts: &[LesionAnnotation], iou_thresh: f64) -> MatchOutcome {
    let order = confidence_order(dets);
    let mut used = vec![false; gts.len()];
    let mut assigned = vec![None; dets.len()];
    for &d in &order {
        let mut pick: Option<(usize, f64)> = None;
        for (g, gt) in gts.iter().enumerate() {
            if used[g] {
                continue;
            }
            let iou = dets[d].bbox.iou(&gt.bbox);
            if iou >= iou_thresh && pick.is_none_or(|(_, best)| iou > best) {
                pick = Some((g, iou));
            }
        }
        if let Some((g, _)) = pick {
            used[g] = true;
        }
        assigned[d] = pick;
    }
    MatchOutcome::from_assignment(&assigned, &order, gts.len())
}

/// A ranked detection for AP: its confidence and whether it was a true positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scored {
    pub confidence: f64,
    pub tp: bool,
}

/// 101-point interpolated average precision.
///
/// Detections are ranked by descending confidence (stable). The precision
/// envelope is sampled at recall 0.00, 0.01, ..., 1.00; recall levels that are
/// never reached contribute 0.
pub fn average_precision(scored: &[Scored], npos: usize) -> Result<f64> {
    if npos == 0 {
        return Err(Error::NoGroundTruth);
    }
    let mut ranked: Vec<&Scored> = scored.iter().collect();
    ranked.sort_by(|a, b| b.confidence.total_cmp(&a.confidence));
    let mut tps = Vec::with_capacity(ranked.len());
    let mut precision = Vec::with_capacity(ranked.len());
    let mut tp = 0usize;
    for (i, s) in ranked.iter().enumerate() {
        tp += usize::from(s.tp);
        tps.push(tp);
        precision.push(tp as f64 / (i + 1) as f64);
    }
    for i in (0..precision.len().saturating_sub(1)).rev() {
        precision[i] = precision[i].max(precision[i + 1]);
    }
    let mut sum = 0.0;
    let mut cut = 0;
    for k in 0..=100usize {
        // first rank whose recall tp/npos reaches k/100
        while cut < tps.len() && tps[cut] * 100 < k * npos {
            cut += 1;
        }
        if cut == tps.len() {
            break;
        }
        sum += precision[cut];
    }
    Ok(sum / 101.0)
}

/// Mean, population SD and count of the per-image values where a metric is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
    pub count: usize,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Stat> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Some(Stat { mean, sd: var.sqrt(), count: values.len() })
    }
}

/// Per-image metrics averaged over images. Precision averages images with at
/// least one detection; recall and AP average images with at least one lesion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImageLevelSummary {
    pub precision: Option<Stat>,
    pub recall: Option<Stat>,
    pub map50: Option<Stat>,
    pub map5095: Option<Stat>,
}

/// Totals over every detection and lesion in the dataset. Precision and recall
/// are taken at IoU 0.50.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LesionLevelSummary {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub map50: Option<f64>,
    pub map5095: Option<f64>,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl LesionLevelSummary {
    /// [`fitness`] of the lesion-level AP pair, when defined.
    pub fn fitness(&self) -> Option<f64> {
        Some(fitness(self.map50?, self.map5095?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapSummary {
    pub image_level: ImageLevelSummary,
    pub lesion_level: LesionLevelSummary,
}

/// Groups detections by manifest image, keeping input order inside each image.
pub fn group_by_image<'a>(
    dets: &'a [Detection],
    manifest: &DatasetManifest,
) -> Result<Vec<Vec<&'a Detection>>> {
    let index: HashMap<&str, usize> =
        manifest.images.iter().enumerate().map(|(i, im)| (im.id.as_str(), i)).collect();
    let mut grouped = vec![Vec::new(); manifest.images.len()];
    for d in dets {
        d.validate()?;
        let &i = index.get(d.image_id.as_str()).ok_or_else(|| Error::UnknownImage(d.image_id.clone()))?;
        grouped[i].push(d);
    }
    Ok(grouped)
}

struct ImageEval {
    /// Per threshold, per detection (input order) TP flags.
    hits: Vec<Vec<bool>>,
    confidences: Vec<f64>,
    npos: usize,
}

/// mAP@0.50, mAP@0.50-0.95, precision and recall at both aggregation levels.
///
/// The lesion-level AP ranks every detection of the dataset together (manifest
/// order, then input order, on equal confidence).
pub fn map_suite(dets: &[Detection], manifest: &DatasetManifest, exec: Execution) -> Result<MapSummary> {
    let grouped = group_by_image(dets, manifest)?;
    let thresholds = iou_thresholds();
    let per_image: Vec<ImageEval> = map_slice(
        &manifest.images.iter().zip(&grouped).collect::<Vec<_>>(),
        exec,
        |(image, image_dets)| {
            let owned: Vec<Detection> = image_dets.iter().map(|&d| d.clone()).collect();
            let hits = thresholds
                .iter()
                .map(|&t| {
                    let m = match_at_iou(&owned, &image.lesions, t);
                    (0..owned.len()).map(|d| m.is_tp(d)).collect()
                })
                .collect();
            ImageEval {
                hits,
                confidences: owned.iter().map(|d| d.confidence).collect(),
                npos: image.lesions.len(),
            }
        },
    );

    let scored_at = |e: &ImageEval, t: usize| -> Vec<Scored> {
        e.confidences.iter().zip(&e.hits[t]).map(|(&confidence, &tp)| Scored { confidence, tp }).collect()
    };

    let (mut prec, mut rec, mut ap50, mut ap5095) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let (mut tp, mut ndet, mut npos) = (0, 0, 0);
    for e in &per_image {
        let image_tp = e.hits[0].iter().filter(|&&h| h).count();
        let image_det = e.confidences.len();
        tp += image_tp;
        ndet += image_det;
        npos += e.npos;
        if image_det > 0 {
            prec.push(image_tp as f64 / image_det as f64);
        }
        if e.npos > 0 {
            rec.push(image_tp as f64 / e.npos as f64);
            let aps: Vec<f64> = (0..thresholds.len())
                .map(|t| average_precision(&scored_at(e, t), e.npos).expect("image has lesions"))
                .collect();
            ap50.push(aps[0]);
            ap5095.push(aps.iter().sum::<f64>() / aps.len() as f64);
        }
    }

    let lesion_aps: Option<Vec<f64>> = (npos > 0).then(|| {
        (0..thresholds.len())
            .map(|t| {
                let pooled: Vec<Scored> = per_image.iter().flat_map(|e| scored_at(e, t)).collect();
                average_precision(&pooled, npos).expect("dataset has lesions")
            })
            .collect()
    });

    Ok(MapSummary {
        image_level: ImageLevelSummary {
            precision: Stat::of(&prec),
            recall: Stat::of(&rec),
            map50: Stat::of(&ap50),
            map5095: Stat::of(&ap5095),
        },
        lesion_level: LesionLevelSummary {
            precision: ratio(tp, ndet),
            recall: ratio(tp, npos),
            map50: lesion_aps.as_ref().map(|a| a[0]),
            map5095: lesion_aps.as_ref().map(|a| a.iter().sum::<f64>() / a.len() as f64),
            tp,
            fp: ndet - tp,
            fn_: npos - tp,
        },
    })
}

/// Model-selection score: `0.9 · mAP@0.50-0.95 + 0.1 · mAP@0.50`.
pub fn fitness(map50: f64, map5095: f64) -> f64 {
    0.9 * map5095 + 0.1 * map50
}

/// MLD-containment matching: in descending confidence, a detection is a true
/// positive when its box contains the MLD point of a still unmatched ground
/// truth (lowest index first). The reported `iou` is informational.
pub fn mld_match(dets: &[Detection], gts: &[LesionAnnotation]) -> Result<MatchOutcome> {
    let points = gts
        .iter()
        .enumerate()
        .map(|(i, g)| g.mld_point.ok_or_else(|| Error::MissingMldPoint(format!("lesion #{i}"))))
        .collect::<Result<Vec<_>>>()?;
    let order = confidence_order(dets);
    let mut used = vec![false; gts.len()];
    let mut assigned = vec![None; dets.len()];
    for &d in &order {
        let hit = (0..gts.len()).find(|&g| !used[g] && dets[d].bbox.contains(points[g]));
        if let Some(g) = hit {
            used[g] = true;
            assigned[d] = Some((g, dets[d].bbox.iou(&gts[g].bbox)));
        }
    }
    Ok(MatchOutcome::from_assignment(&assigned, &order, gts.len()))
}

/// Whether candidate true positives are counted as false or true positives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CtpMode {
    CtpAsFp,
    CtpAsTp,
}

/// MLD-precision, -recall and -F1. A ratio is `None` when its denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MldEvalResult {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub mld_precision: Option<f64>,
    pub mld_recall: Option<f64>,
    pub mld_f1: Option<f64>,
    pub ctp_count: usize,
    pub mode: CtpMode,
}

impl MldEvalResult {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, ctp_count: usize, mode: CtpMode) -> Self {
        let mld_precision = ratio(tp, tp + fp);
        let mld_recall = ratio(tp, tp + fn_);
        let mld_f1 = match (mld_precision, mld_recall) {
            (Some(p), Some(r)) => Some(harmonic(p, r)),
            _ => None,
        };
        Self { tp, fp, fn_, mld_precision, mld_recall, mld_f1, ctp_count, mode }
    }

    /// Fails with the first undefined ratio.
    pub fn require_defined(self) -> Result<Self> {
        if self.mld_precision.is_none() {
            return Err(Error::UndefinedMetric("mld_precision (no detections)"));
        }
        if self.mld_recall.is_none() {
            return Err(Error::UndefinedMetric("mld_recall (no ground truth)"));
        }
        Ok(self)
    }
}

/// MLD metrics of a matching, with CTPs counted as false positives.
pub fn mld_metrics(m: &MatchOutcome) -> Result<MldEvalResult> {
    MldEvalResult::from_counts(m.tp, m.fp, m.fn_, 0, CtpMode::CtpAsFp).require_defined()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CtpAnalysis {
    /// One flag per false positive, in the order of `fp_mlds`.
    pub flags: Vec<bool>,
    pub p_values: Vec<f64>,
    pub alpha: f64,
    pub as_fp: MldEvalResult,
    pub as_tp: MldEvalResult,
}

/// Flags each false positive whose MLD is consistent with the ground-truth MLD
/// distribution (two-sided Mann-Whitney p above `alpha` for `{fp_mld}` vs
/// `gt_mlds`) and recomputes the metrics with those moved to true positives.
/// False negatives are unchanged by the move.
pub fn ctp_analysis(outcome: &MatchOutcome, fp_mlds: &[f64], gt_mlds: &[f64], alpha: f64) -> Result<CtpAnalysis> {
    if gt_mlds.is_empty() {
        return Err(Error::NoGroundTruth);
    }
    if fp_mlds.len() != outcome.fp {
        return Err(Error::LengthMismatch(fp_mlds.len(), outcome.fp));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha {alpha} not in (0, 1)")));
    }
    let p_values = fp_mlds
        .iter()
        .map(|&v| mann_whitney_u(&[v], gt_mlds).map(|r| r.p_value))
        .collect::<Result<Vec<_>>>()?;
    let flags: Vec<bool> = p_values.iter().map(|&p| p > alpha).collect();
    let k = flags.iter().filter(|&&f| f).count();
    let (tp, fp, fn_) = (outcome.tp, outcome.fp, outcome.fn_);
    Ok(CtpAnalysis {
        flags,
        p_values,
        alpha,
        as_fp: MldEvalResult::from_counts(tp, fp, fn_, k, CtpMode::CtpAsFp),
        as_tp: MldEvalResult::from_counts(tp + k, fp - k, fn_, k, CtpMode::CtpAsTp),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{BoundingBox, ManifestImage, Point};

    fn bx(a: f64, b: f64, c: f64, d: f64) -> BoundingBox {
        BoundingBox::new(a, b, c, d).unwrap()
    }

    fn det(b: BoundingBox, c: f64) -> Detection {
        Detection::new("img", b, c).unwrap()
    }

    #[test]
    fn iou_matching_examples() {
        let g = [LesionAnnotation::new(bx(0.0, 0.0, 10.0, 10.0))];
        let m = match_at_iou(&[det(bx(0.0, 0.0, 10.0, 10.0), 0.9)], &g, 0.5);
        assert_eq!((m.tp, m.fp, m.fn_), (1, 0, 0));
        // IoU 0.4: (0,0,10,10) vs (0,0,4,10) -> 40 / 100
        let m = match_at_iou(&[det(bx(0.0, 0.0, 4.0, 10.0), 0.9)], &g, 0.5);
        assert_eq!((m.tp, m.fp, m.fn_), (0, 1, 1));
    }

    #[test]
    fn appended_outcomes_shift_indices() {
        let g = [LesionAnnotation::new(bx(0.0, 0.0, 10.0, 10.0))];
        let a = match_at_iou(&[det(bx(0.0, 0.0, 10.0, 10.0), 0.9), det(bx(50.0, 50.0, 60.0, 60.0), 0.5)], &g, 0.5);
        let mut pooled = MatchOutcome::default();
        pooled.append(&a, 0, 0);
        pooled.append(&a, 2, 1);
        assert_eq!((pooled.tp, pooled.fp, pooled.fn_), (2, 2, 0));
        assert_eq!(pooled.fp_detections, vec![1, 3]);
        assert!(pooled.is_tp(2));
        assert_eq!(pooled.matches[1].annotation, 1);
    }

    #[test]
    fn higher_confidence_matches_first() {
        let g = [LesionAnnotation::new(bx(0.0, 0.0, 10.0, 10.0))];
        let d = [det(bx(0.0, 0.0, 10.0, 10.0), 0.3), det(bx(0.0, 0.0, 9.0, 10.0), 0.8)];
        let m = match_at_iou(&d, &g, 0.5);
        assert_eq!(m.matches[0].detection, 1);
        assert_eq!(m.fp_detections, vec![0]);
    }

    #[test]
    fn ap_examples() {
        let s = |confidence, tp| Scored { confidence, tp };
        assert_eq!(average_precision(&[s(0.9, true)], 1).unwrap(), 1.0);
        assert_eq!(average_precision(&[s(0.9, true), s(0.8, false)], 1).unwrap(), 1.0);
        assert_eq!(average_precision(&[s(0.9, false), s(0.8, false)], 2).unwrap(), 0.0);
        assert_eq!(average_precision(&[], 3).unwrap(), 0.0);
        assert_eq!(average_precision(&[s(0.9, true)], 0).unwrap_err(), Error::NoGroundTruth);
        // half the lesions found at precision 1: recall levels 0..=50 score 1
        assert!((average_precision(&[s(0.5, true)], 2).unwrap() - 51.0 / 101.0).abs() < 1e-15);
    }

    #[test]
    fn fitness_weights() {
        assert_eq!(fitness(1.0, 1.0), 1.0);
        assert_eq!(fitness(0.0, 0.0), 0.0);
        assert!((fitness(0.4, 0.2) - 0.22).abs() < 1e-15);
    }

    fn manifest(lesions: Vec<Vec<BoundingBox>>) -> DatasetManifest {
        DatasetManifest {
            images: lesions
                .into_iter()
                .enumerate()
                .map(|(i, boxes)| ManifestImage {
                    id: format!("im{i}"),
                    path: format!("im{i}.png"),
                    width: 100,
                    height: 100,
                    lesions: boxes.into_iter().map(LesionAnnotation::new).collect(),
                    provenance: None,
                })
                .collect(),
        }
    }

    #[test]
    fn perfect_and_empty_suites() {
        let boxes = vec![vec![bx(1.0, 1.0, 20.0, 20.0)], vec![bx(5.0, 5.0, 9.0, 30.0), bx(50.0, 50.0, 70.0, 60.0)]];
        let man = manifest(boxes.clone());
        let dets: Vec<Detection> = boxes
            .iter()
            .enumerate()
            .flat_map(|(i, bs)| bs.iter().map(move |&b| Detection::new(format!("im{i}"), b, 0.9).unwrap()))
            .collect();
        let s = map_suite(&dets, &man, Execution::Sequential).unwrap();
        let l = s.lesion_level;
        assert_eq!((l.precision, l.recall, l.map50, l.map5095), (Some(1.0), Some(1.0), Some(1.0), Some(1.0)));
        for st in [s.image_level.precision, s.image_level.recall, s.image_level.map50, s.image_level.map5095] {
            assert_eq!(st.unwrap().mean, 1.0);
        }
        let e = map_suite(&[], &man, Execution::Sequential).unwrap();
        assert_eq!(e.lesion_level.recall, Some(0.0));
        assert_eq!(e.lesion_level.map50, Some(0.0));
        assert_eq!(e.lesion_level.precision, None);
        assert_eq!(e.image_level.precision, None);
        assert_eq!(e.image_level.recall.unwrap().mean, 0.0);
    }

    #[test]
    fn unknown_image_is_an_error() {
        let man = manifest(vec![vec![]]);
        let d = Detection::new("nope", bx(0.0, 0.0, 1.0, 1.0), 0.5).unwrap();
        assert_eq!(map_suite(&[d], &man, Execution::Sequential).unwrap_err(), Error::UnknownImage("nope".into()));
    }

    fn with_mld(b: BoundingBox, x: f64, y: f64) -> LesionAnnotation {
        LesionAnnotation::with_mld(b, Point { x, y }, 2.0).unwrap()
    }

    #[test]
    fn mld_containment() {
        let b = bx(0.0, 0.0, 10.0, 10.0);
        let m = mld_match(&[det(b, 0.5)], &[with_mld(bx(2.0, 2.0, 8.0, 8.0), 5.0, 5.0)]).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_), (1, 0, 0));
        let m = mld_match(&[det(b, 0.5)], &[with_mld(bx(15.0, 15.0, 25.0, 25.0), 20.0, 20.0)]).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_), (0, 1, 1));
        let m = mld_match(&[det(b, 0.5), det(b, 0.7)], &[with_mld(bx(2.0, 2.0, 8.0, 8.0), 5.0, 5.0)]).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_), (1, 1, 0));
        assert!(matches!(
            mld_match(&[det(b, 0.5)], &[LesionAnnotation::new(b)]),
            Err(Error::MissingMldPoint(_))
        ));
    }

    #[test]
    fn mld_metric_examples() {
        let r = MldEvalResult::from_counts(3, 1, 2, 0, CtpMode::CtpAsFp).require_defined().unwrap();
        assert_eq!(r.mld_precision, Some(0.75));
        assert_eq!(r.mld_recall, Some(0.6));
        assert!((r.mld_f1.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        let r = MldEvalResult::from_counts(4, 0, 0, 0, CtpMode::CtpAsFp);
        assert_eq!((r.mld_precision, r.mld_recall, r.mld_f1), (Some(1.0), Some(1.0), Some(1.0)));
        let r = MldEvalResult::from_counts(0, 2, 3, 0, CtpMode::CtpAsFp);
        assert_eq!((r.mld_precision, r.mld_recall, r.mld_f1), (Some(0.0), Some(0.0), Some(0.0)));
        assert!(MldEvalResult::from_counts(0, 0, 3, 0, CtpMode::CtpAsFp).require_defined().is_err());
    }

    #[test]
    fn ctp_flags() {
        let gt: Vec<f64> = (0..41).map(|i| 2.0 + i as f64 * 0.1).collect();
        let outcome = MatchOutcome {
            tp: 1,
            fp: 2,
            fn_: 1,
            matches: vec![],
            fp_detections: vec![1, 2],
            fn_annotations: vec![0],
        };
        let a = ctp_analysis(&outcome, &[4.0, 50.0], &gt, CTP_ALPHA).unwrap();
        assert_eq!(a.flags, vec![true, false]);
        assert_eq!((a.as_tp.tp, a.as_tp.fp, a.as_tp.fn_), (2, 1, 1));
        let all = ctp_analysis(&outcome, &[4.0, 4.1], &gt, CTP_ALPHA).unwrap();
        assert_eq!(all.as_tp.mld_precision, Some(1.0));
        assert_eq!(ctp_analysis(&outcome, &[1.0, 2.0], &[], CTP_ALPHA).unwrap_err(), Error::NoGroundTruth);
    }
}
