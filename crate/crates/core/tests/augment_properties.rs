use angio_core::augment::config::ShuffleConfig;
use angio_core::augment::geometry::{remap_annotation, Affine};
use angio_core::augment::ops::{draw_window, flip_horizontal, invert, local_pixel_shuffle, multiplicative_noise, shuffle_window};
use angio_core::augment::seed::transform_rng;
use angio_core::augment::{
    build_training_stream, hflip_sample, static_expand, AugmentConfig, AugmentedSample, SourceImage, Span,
    StreamOptions, Tiers, STATIC_TRANSFORMS,
};
use angio_core::par::with_jobs;
use angio_core::{BoundingBox, Execution, GrayImage, LesionAnnotation};
use angio_oracles::fixtures::{augment_sources, gray_image, rng};
use proptest::prelude::*;
use rand::Rng;

fn sources(seed: u64, n: usize) -> Vec<SourceImage> {
    augment_sources(seed, n, 64, 48)
}

fn window_values(img: &GrayImage, x: usize, y: usize, side: usize) -> Vec<u8> {
    let mut v: Vec<u8> = (y..y + side).flat_map(|yy| (x..x + side).map(move |xx| (xx, yy))).map(|(a, b)| img.get(a, b)).collect();
    v.sort_unstable();
    v
}

#[test]
fn stream_identical_at_one_and_eight_workers() {
    let src = sources(41, 6);
    let cfg = AugmentConfig { master_seed: 99, ..Default::default() };
    let opts = StreamOptions { epochs: 2, final_epochs: false };
    let run = |jobs| with_jobs(Some(jobs), || build_training_stream(&src, &cfg, Tiers::ALL, opts, Execution::Parallel).unwrap());
    let one = run(1);
    let eight = run(8);
    assert_eq!(one, eight);
    assert_eq!(one, build_training_stream(&src, &cfg, Tiers::ALL, opts, Execution::Sequential).unwrap());
    let other_seed = AugmentConfig { master_seed: 100, ..Default::default() };
    assert_ne!(one, build_training_stream(&src, &other_seed, Tiers::ALL, opts, Execution::Sequential).unwrap());
}

#[test]
fn static_tier_expands_eightfold_with_unchanged_annotations() {
    for s in sources(42, 10) {
        let original = AugmentedSample::original(&s.id, s.image.clone(), s.lesions.clone());
        let out = static_expand(&original, &AugmentConfig::default().static_tier, 7);
        assert_eq!(out.len(), 8);
        for (sample, tag) in out.iter().zip(STATIC_TRANSFORMS) {
            assert_eq!(sample.annotations, s.lesions);
            assert_eq!(serde_json::to_vec(&sample.annotations).unwrap(), serde_json::to_vec(&s.lesions).unwrap());
            assert_eq!(sample.id, format!("{}__{tag}", s.id));
            assert_eq!((sample.image.width(), sample.image.height()), (64, 48));
        }
        assert_eq!(out[0].image, s.image);
    }
}

#[test]
fn inversion_and_flip_are_involutions() {
    let mut r = rng(43);
    for _ in 0..50 {
        let (w, h) = (r.random_range(1..80), r.random_range(1..80));
        let img = gray_image(&mut r, w, h);
        assert_eq!(invert(&invert(&img)).data(), img.data());
        assert_eq!(flip_horizontal(&flip_horizontal(&img)).data(), img.data());
    }
    for s in sources(44, 5) {
        let a = AugmentedSample::original(&s.id, s.image, s.lesions);
        let back = hflip_sample(&hflip_sample(&a));
        assert_eq!(back.image.data(), a.image.data());
        for (x, y) in back.annotations.iter().zip(&a.annotations) {
            for (u, v) in x.bbox.corners().iter().zip(y.bbox.corners()) {
                assert!((u - v).abs() < 1e-9, "{:?} vs {:?}", x, y);
            }
        }
    }
}

#[test]
fn local_shuffle_preserves_window_multisets() {
    let mut r = rng(45);
    let cfg = ShuffleConfig { windows: 40, min_side: 2, max_side: 12 };
    for i in 0..50 {
        let (w, h) = (r.random_range(12..64), r.random_range(12..64));
        let img = gray_image(&mut r, w, h);
        // replay the shuffle window by window
        let mut replay = transform_rng(i, "pixel_shuffle");
        let mut cur = img.clone();
        for _ in 0..cfg.windows {
            let win = draw_window(w, h, cfg, &mut replay);
            let before = cur.clone();
            shuffle_window(&mut cur, win, &mut replay);
            assert_eq!(window_values(&before, win.x, win.y, win.side), window_values(&cur, win.x, win.y, win.side));
            for y in 0..h {
                for x in 0..w {
                    let inside = (win.x..win.x + win.side).contains(&x) && (win.y..win.y + win.side).contains(&y);
                    if !inside {
                        assert_eq!(before.get(x, y), cur.get(x, y));
                    }
                }
            }
        }
        let whole = local_pixel_shuffle(&img, cfg, &mut transform_rng(i, "pixel_shuffle"));
        assert_eq!(whole, cur);
    }
}

#[test]
fn multiplicative_noise_stays_in_range() {
    let mut r = rng(46);
    for seed in 0..20 {
        let img = gray_image(&mut r, 40, 30);
        let out = multiplicative_noise(&img, Span(0.9, 1.1), &mut transform_rng(seed, "noise"));
        for (&a, &b) in img.data().iter().zip(out.data()) {
            let lo = (f64::from(a) * 0.9).floor();
            let hi = (f64::from(a) * 1.1).ceil().min(255.0);
            assert!((lo..=hi).contains(&f64::from(b)), "{a} -> {b}");
        }
    }
}

#[test]
fn composite_only_after_dynamic() {
    let t: Result<Tiers, _> = "static,composite".parse();
    let bad = match t {
        Ok(t) => t.validate().is_err(),
        Err(_) => true,
    };
    assert!(bad);
}

proptest! {
    #[test]
    fn inverse_map_restores_boxes(
        x0 in 0.0f64..200.0, y0 in 0.0f64..200.0, w in 4.0f64..50.0, h in 4.0f64..50.0,
        kind in 0u8..3, s in 0.8f64..1.2, tx in -20.0f64..20.0, ty in -20.0f64..20.0,
    ) {
        let (cw, ch) = (512.0, 512.0);
        let map = match kind {
            0 => Affine::translation(tx, ty),
            1 => Affine::scale_about_center(s, cw, ch),
            _ => Affine::hflip(cw),
        };
        let c = [x0, y0, x0 + w, y0 + h];
        let back = map.inverse().map_corners(map.map_corners(c));
        for (a, b) in back.iter().zip(&c) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        let ann = LesionAnnotation::new(BoundingBox::new(c[0], c[1], c[2], c[3]).unwrap());
        if let Some(m) = remap_annotation(&ann, &map, cw, ch) {
            prop_assert!(m.bbox.within(cw, ch));
        }
    }
}
