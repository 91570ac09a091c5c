use rand::Rng;

use super::config::StaticConfig;
use super::ops;
use super::seed::transform_rng;
use super::{AugmentedSample, Provenance, Tier};
use crate::types::GrayImage;

/// Transform tags of the static tier, in output order.
pub const STATIC_TRANSFORMS: [&str; 8] = [
    "original",
    "clahe",
    "invert",
    "multiplicative_noise",
    "median_blur",
    "motion_blur",
    "defocus_blur",
    "pixel_shuffle",
];

fn apply(tag: &str, img: &GrayImage, cfg: &StaticConfig, seed: u64) -> GrayImage {
    let mut rng = transform_rng(seed, tag);
    match tag {
        "original" => img.clone(),
        "clahe" => ops::clahe(img, cfg.clahe),
        "invert" => ops::invert(img),
        "multiplicative_noise" => ops::multiplicative_noise(img, cfg.noise, &mut rng),
        "median_blur" => ops::median_blur(img, cfg.median_kernel),
        "motion_blur" => {
            let angle = rng.random_range(0.0..std::f64::consts::PI);
            ops::convolve(img, &ops::motion_kernel(cfg.motion_kernel, angle))
        }
        "defocus_blur" => ops::convolve(img, &ops::disc_kernel(cfg.defocus_radius)),
        "pixel_shuffle" => ops::local_pixel_shuffle(img, cfg.shuffle, &mut rng),
        other => unreachable!("unknown static transform {other}"),
    }
}

/// The source plus one sample per static transform (8 in total). Annotations
/// are copied unchanged. Sample ids are `<source id>__<transform>`.
pub fn static_expand(source: &AugmentedSample, cfg: &StaticConfig, seed: u64) -> Vec<AugmentedSample> {
    STATIC_TRANSFORMS
        .iter()
        .map(|&tag| {
            let mut provenance = Provenance {
                sources: vec![source.id.clone()],
                tiers: source.provenance.tiers.clone(),
                transforms: source.provenance.transforms.clone(),
                seed,
                epoch: None,
            };
            provenance.tiers.push(Tier::Static);
            provenance.transforms.push(tag.to_owned());
            AugmentedSample {
                id: format!("{}__{tag}", source.id),
                image: apply(tag, &source.image, cfg, seed),
                annotations: source.annotations.clone(),
                provenance,
            }
        })
        .collect()
}
