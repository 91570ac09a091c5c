use rand::Rng;

use super::config::{DynamicConfig, Span};
use super::geometry::{remap_all, Affine};
use super::ops;
use super::seed::transform_rng;
use super::{AugmentedSample, Tier};
use crate::types::to_u8;

/// Transform tags of the dynamic tier, in application order.
pub const DYNAMIC_TRANSFORMS: [&str; 5] = ["scale", "erase", "translate", "jiggle", "hflip"];

fn uniform(rng: &mut impl Rng, s: Span) -> f64 {
    if s.low() < s.high() {
        rng.random_range(s.low()..=s.high())
    } else {
        s.low()
    }
}

fn dims(s: &AugmentedSample) -> (f64, f64) {
    (s.image.width() as f64, s.image.height() as f64)
}

/// Zoom by `factor` about the image centre.
pub fn scale_sample(s: &AugmentedSample, factor: f64) -> AugmentedSample {
    let (w, h) = dims(s);
    let map = Affine::scale_about_center(factor, w, h);
    AugmentedSample {
        image: ops::scale_about_center(&s.image, factor),
        annotations: remap_all(&s.annotations, &map, w, h),
        ..s.clone()
    }
}

/// Integer shift by `(dx, dy)` pixels.
pub fn translate_sample(s: &AugmentedSample, dx: isize, dy: isize) -> AugmentedSample {
    let (w, h) = dims(s);
    let map = Affine::translation(dx as f64, dy as f64);
    AugmentedSample {
        image: ops::translate(&s.image, dx, dy),
        annotations: remap_all(&s.annotations, &map, w, h),
        ..s.clone()
    }
}

pub fn hflip_sample(s: &AugmentedSample) -> AugmentedSample {
    let (w, h) = dims(s);
    AugmentedSample {
        image: ops::flip_horizontal(&s.image),
        annotations: remap_all(&s.annotations, &Affine::hflip(w), w, h),
        ..s.clone()
    }
}

/// Runs the dynamic transforms in their fixed order, each with its own
/// probability and its own random stream derived from `seed`. The id is kept;
/// provenance records the dynamic tier and the transforms that fired.
pub fn apply_dynamic(sample: &AugmentedSample, cfg: &DynamicConfig, seed: u64) -> AugmentedSample {
    let mut s = sample.clone();
    let mut fired = Vec::new();
    let (w, h) = (s.image.width(), s.image.height());

    let mut rng = transform_rng(seed, "scale");
    if rng.random_bool(cfg.scale.p) {
        s = scale_sample(&s, uniform(&mut rng, cfg.scale.factor));
        fired.push("scale");
    }

    let mut rng = transform_rng(seed, "erase");
    if rng.random_bool(cfg.erase.p) {
        let area = uniform(&mut rng, cfg.erase.area) * (w * h) as f64;
        let aspect = uniform(&mut rng, cfg.erase.aspect);
        let eh = ((area * aspect).sqrt().round() as usize).clamp(1, h);
        let ew = ((area / aspect).sqrt().round() as usize).clamp(1, w);
        let x = rng.random_range(0..=w - ew);
        let y = rng.random_range(0..=h - eh);
        let fill = to_u8(s.image.mean());
        ops::fill_rect(&mut s.image, x, y, ew, eh, fill);
        fired.push("erase");
    }

    let mut rng = transform_rng(seed, "translate");
    if rng.random_bool(cfg.translate.p) {
        let f = cfg.translate.fraction;
        let dx = (rng.random_range(-f..=f) * w as f64).round() as isize;
        let dy = (rng.random_range(-f..=f) * h as f64).round() as isize;
        s = translate_sample(&s, dx, dy);
        fired.push("translate");
    }

    let mut rng = transform_rng(seed, "jiggle");
    if rng.random_bool(cfg.jiggle.p) {
        let b = uniform(&mut rng, cfg.jiggle.brightness);
        let c = uniform(&mut rng, cfg.jiggle.contrast);
        s.image = ops::color_jiggle(&s.image, b, c);
        fired.push("jiggle");
    }

    let mut rng = transform_rng(seed, "hflip");
    if rng.random_bool(cfg.hflip.p) {
        s = hflip_sample(&s);
        fired.push("hflip");
    }

    s.provenance.sources = vec![sample.id.clone()];
    s.provenance.tiers.push(Tier::Dynamic);
    s.provenance.transforms.extend(fired.into_iter().map(str::to_owned));
    s.provenance.seed = seed;
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{BoundingBox, GrayImage, LesionAnnotation};

    fn sample() -> AugmentedSample {
        let img = GrayImage::from_fn(64, 48, |x, y| ((x * 3 + y * 5) % 256) as u8);
        let ann = LesionAnnotation::new(BoundingBox::new(10.0, 8.0, 30.0, 20.0).unwrap());
        AugmentedSample::original("a", img, vec![ann])
    }

    #[test]
    fn all_disabled_is_identity() {
        let s = sample();
        let out = apply_dynamic(&s, &DynamicConfig::disabled(), 42);
        assert_eq!(out.image, s.image);
        assert_eq!(out.annotations, s.annotations);
        assert_eq!(out.provenance.tiers, vec![Tier::Dynamic]);
    }

    #[test]
    fn forced_flip_is_an_involution() {
        let mut cfg = DynamicConfig::disabled();
        cfg.hflip.p = 1.0;
        let s = sample();
        let once = apply_dynamic(&s, &cfg, 1);
        assert_eq!(once.annotations[0].bbox.corners(), [34.0, 8.0, 54.0, 20.0]);
        let twice = apply_dynamic(&once, &cfg, 2);
        assert_eq!(twice.image, s.image);
        assert_eq!(twice.annotations, s.annotations);
    }

    #[test]
    fn translation_shifts_corners() {
        let s = sample();
        let t = translate_sample(&s, 10, 5);
        assert_eq!(t.annotations[0].bbox.corners(), [20.0, 13.0, 40.0, 25.0]);
        assert_eq!(t.image.get(10, 5), s.image.get(0, 0));
        assert_eq!(t.image.get(0, 0), 0);
    }

    #[test]
    fn same_seed_same_output() {
        let s = sample();
        let cfg = DynamicConfig::default();
        assert_eq!(apply_dynamic(&s, &cfg, 7), apply_dynamic(&s, &cfg, 7));
    }
}
