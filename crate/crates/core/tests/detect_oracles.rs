use angio_core::detect_eval::{
    average_precision, ctp_analysis, map_suite, match_at_iou, mld_match, mld_metrics, MldEvalResult, Scored, CTP_ALPHA,
};
use angio_core::{Detection, Execution, LesionAnnotation, Point};
use angio_oracles::fixtures::{boxed, detection_set, rng, DETECTION_IMAGE_SIDE};
use angio_oracles::{brute_force_ap, greedy_match, reference_evaluator, RefStat};
use proptest::prelude::*;
use rand::Rng;

const W: f64 = DETECTION_IMAGE_SIDE;

fn close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => (a - b).abs() < 1e-9,
        (None, None) => true,
        _ => false,
    }
}

fn close_stat(a: Option<angio_core::detect_eval::Stat>, b: RefStat) -> bool {
    match (a, b) {
        (Some(s), Some((m, sd, n))) => (s.mean - m).abs() < 1e-9 && (s.sd - sd).abs() < 1e-9 && s.count == n,
        (None, None) => true,
        _ => false,
    }
}

#[test]
fn map_suite_matches_reference_evaluator() {
    for seed in 0..25 {
        let s = detection_set(seed, 20);
        let ours = map_suite(&s.dets, &s.manifest, Execution::Parallel).unwrap();
        assert_eq!(ours, map_suite(&s.dets, &s.manifest, Execution::Sequential).unwrap());
        let want = reference_evaluator(&s.reference);
        let l = &ours.lesion_level;
        assert!(close(l.precision, want.lesion_precision), "seed {seed}");
        assert!(close(l.recall, want.lesion_recall), "seed {seed}");
        assert!(close(l.map50, want.lesion_map50), "seed {seed}");
        assert!(close(l.map5095, want.lesion_map5095), "seed {seed}");
        let im = &ours.image_level;
        assert!(close_stat(im.precision, want.image_precision), "seed {seed}");
        assert!(close_stat(im.recall, want.image_recall), "seed {seed}");
        assert!(close_stat(im.map50, want.image_map50), "seed {seed}");
        assert!(close_stat(im.map5095, want.image_map5095), "seed {seed}");
    }
}

#[test]
fn matching_matches_reference() {
    let mut r = rng(7);
    for _ in 0..300 {
        let s = detection_set(r.random(), 1);
        let img = &s.reference[0];
        let thr = [0.5, 0.65, 0.8, 0.95][r.random_range(0..4)];
        let ours = match_at_iou(&s.dets, &s.manifest.images[0].lesions, thr);
        let want = greedy_match(&img.dets, &img.gts, thr);
        for (d, g) in want.iter().enumerate() {
            let got = ours.matches.iter().find(|m| m.detection == d).map(|m| m.annotation);
            assert_eq!(got, *g);
        }
        assert_eq!(ours.tp + ours.fp, img.dets.len());
        assert_eq!(ours.tp + ours.fn_, img.gts.len());
    }
}

#[test]
fn mld_reclassification_never_lowers_metrics() {
    let mut r = rng(8);
    for _ in 0..100 {
        let tp = r.random_range(0..20);
        let fp = r.random_range(0..20);
        let fn_ = r.random_range(0..20);
        let k = r.random_range(0..=fp);
        let as_fp = MldEvalResult::from_counts(tp, fp, fn_, k, angio_core::detect_eval::CtpMode::CtpAsFp);
        let as_tp = MldEvalResult::from_counts(tp + k, fp - k, fn_, k, angio_core::detect_eval::CtpMode::CtpAsTp);
        let ge = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => a >= b - 1e-12,
            (a, b) => a.is_some() || b.is_none(),
        };
        assert!(ge(as_tp.mld_precision, as_fp.mld_precision));
        assert!(ge(as_tp.mld_recall, as_fp.mld_recall));
    }
}

#[test]
fn ctp_analysis_on_random_outcomes() {
    let mut r = rng(9);
    for _ in 0..100 {
        let gts: Vec<LesionAnnotation> = (0..r.random_range(1..6))
            .map(|_| {
                let b = boxed(&mut r, W, W);
                let p = Point::new(r.random_range(b.x_min()..=b.x_max()), r.random_range(b.y_min()..=b.y_max()));
                LesionAnnotation::with_mld(b, p, r.random_range(1.0..8.0)).unwrap()
            })
            .collect();
        let dets: Vec<Detection> = (0..r.random_range(1..10))
            .map(|_| Detection::new("x", boxed(&mut r, W, W), r.random()).unwrap())
            .collect();
        let outcome = mld_match(&dets, &gts).unwrap();
        let base = mld_metrics(&outcome).unwrap();
        let gt_mlds: Vec<f64> = gts.iter().map(|g| g.mld_px.unwrap()).collect();
        let fp_mlds: Vec<f64> = (0..outcome.fp).map(|_| r.random_range(0.5..10.0)).collect();
        let a = ctp_analysis(&outcome, &fp_mlds, &gt_mlds, CTP_ALPHA).unwrap();
        assert_eq!(a.as_fp.mld_precision, base.mld_precision);
        assert_eq!(a.as_tp.fn_, a.as_fp.fn_);
        if let (Some(p), Some(q)) = (a.as_tp.mld_precision, a.as_fp.mld_precision) {
            assert!(p >= q);
        }
        assert!(a.as_tp.mld_recall >= a.as_fp.mld_recall);
    }
}

proptest! {
    #[test]
    fn ap_matches_brute_force(
        hits in prop::collection::vec((0u8..6, any::<bool>()), 0..25),
        extra in 0usize..5,
    ) {
        let scored: Vec<(f64, bool)> = hits.iter().map(|&(c, t)| (f64::from(c) / 5.0, t)).collect();
        let npos = scored.iter().filter(|s| s.1).count() + extra;
        prop_assume!(npos > 0);
        let ours: Vec<Scored> = scored.iter().map(|&(confidence, tp)| Scored { confidence, tp }).collect();
        let got = average_precision(&ours, npos).unwrap();
        prop_assert!((got - brute_force_ap(&scored, npos)).abs() < 1e-12);
    }

    #[test]
    fn strict_map_never_exceeds_map50(seed in any::<u64>()) {
        let s = detection_set(seed, 4);
        let m = map_suite(&s.dets, &s.manifest, Execution::Sequential).unwrap();
        if let (Some(a), Some(b)) = (m.lesion_level.map5095, m.lesion_level.map50) {
            prop_assert!(a <= b + 1e-12);
            prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        }
        if let (Some(a), Some(b)) = (m.image_level.map5095, m.image_level.map50) {
            prop_assert!(a.mean <= b.mean + 1e-12);
        }
    }

    #[test]
    fn mld_metrics_ignore_monotone_rescaling(seed in any::<u64>(), gain in 0.01f64..1.0) {
        let mut r = rng(seed);
        let gts: Vec<LesionAnnotation> = (0..3)
            .map(|_| {
                let b = boxed(&mut r, W, W);
                LesionAnnotation::with_mld(b, Point::new(b.x_min(), b.y_max()), 2.0).unwrap()
            })
            .collect();
        let dets: Vec<Detection> =
            (0..6).map(|_| Detection::new("x", boxed(&mut r, W, W), r.random()).unwrap()).collect();
        let scaled: Vec<Detection> = dets
            .iter()
            .map(|d| Detection { confidence: d.confidence * gain, ..d.clone() })
            .collect();
        let a = mld_metrics(&mld_match(&dets, &gts).unwrap()).unwrap();
        let b = mld_metrics(&mld_match(&scaled, &gts).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}
