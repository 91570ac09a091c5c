use rand::Rng;

use super::config::CompositeConfig;
use super::geometry::{remap_all, Affine};
use super::ops::resize_centers;
use super::seed::transform_rng;
use super::{AugmentedSample, Provenance, Tier};
use crate::error::{Error, Result};
use crate::types::GrayImage;

/// Composes four samples into a 2x2 mosaic.
///
/// The split point is drawn from the central `cfg.jitter` fraction of each
/// canvas axis; samples fill the top-left, top-right, bottom-left and
/// bottom-right cells in order, each resized to its cell. Boxes are remapped
/// with their image and then filtered like every other remap.
pub fn mosaic(samples: &[AugmentedSample], cfg: &CompositeConfig, seed: u64) -> Result<AugmentedSample> {
    if samples.len() != 4 {
        return Err(Error::InvalidConfig(format!("a mosaic needs 4 samples, got {}", samples.len())));
    }
    cfg.validate()?;
    let [w, h] = cfg.canvas.unwrap_or([samples[0].image.width(), samples[0].image.height()]);
    let mut rng = transform_rng(seed, "mosaic");
    let mut split = |len: usize| -> usize {
        let u: f64 = rng.random();
        let c = (len as f64 * (0.5 + (u - 0.5) * cfg.jitter)).round() as usize;
        c.clamp(1, len - 1)
    };
    let cx = split(w);
    let cy = split(h);

    let mut canvas = GrayImage::filled(w, h, 0);
    let mut annotations = Vec::new();
    let cells = [(0, 0, cx, cy), (cx, 0, w - cx, cy), (0, cy, cx, h - cy), (cx, cy, w - cx, h - cy)];
    for (s, &(ox, oy, cw, ch)) in samples.iter().zip(&cells) {
        let tile = resize_centers(&s.image, cw, ch);
        for y in 0..ch {
            for x in 0..cw {
                canvas.set(ox + x, oy + y, tile.get(x, y));
            }
        }
        let map = Affine {
            sx: cw as f64 / s.image.width() as f64,
            sy: ch as f64 / s.image.height() as f64,
            tx: ox as f64,
            ty: oy as f64,
        };
        annotations.extend(remap_all(&s.annotations, &map, w as f64, h as f64));
    }

    let mut tiers: Vec<Tier> = samples.iter().flat_map(|s| s.provenance.tiers.iter().copied()).collect();
    tiers.push(Tier::Composite);
    tiers.sort();
    tiers.dedup();
    Ok(AugmentedSample {
        id: format!("{}__mosaic", samples[0].id),
        image: canvas,
        annotations,
        provenance: Provenance {
            sources: samples.iter().map(|s| s.id.clone()).collect(),
            tiers,
            transforms: vec!["mosaic".to_owned()],
            seed,
            epoch: samples[0].provenance.epoch,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{BoundingBox, LesionAnnotation};

    fn sample(id: &str, v: u8) -> AugmentedSample {
        let img = GrayImage::from_fn(40, 30, |x, y| v.wrapping_add((x + y) as u8));
        let ann = LesionAnnotation::new(BoundingBox::new(4.0, 4.0, 20.0, 16.0).unwrap());
        AugmentedSample::original(id, img, vec![ann])
    }

    #[test]
    fn zero_jitter_quadrants() {
        let s = sample("a", 10);
        let four = vec![s.clone(), s.clone(), s.clone(), s.clone()];
        let cfg = CompositeConfig { jitter: 0.0, ..Default::default() };
        let m = mosaic(&four, &cfg, 3).unwrap();
        assert_eq!((m.image.width(), m.image.height()), (40, 30));
        let quarter = resize_centers(&s.image, 20, 15);
        for (ox, oy) in [(0, 0), (20, 0), (0, 15), (20, 15)] {
            for y in 0..15 {
                for x in 0..20 {
                    assert_eq!(m.image.get(ox + x, oy + y), quarter.get(x, y));
                }
            }
        }
        assert_eq!(m.annotations.len(), 4);
        assert_eq!(m.annotations[3].bbox.corners(), [22.0, 17.0, 30.0, 23.0]);
    }

    #[test]
    fn boxes_stay_on_canvas() {
        let four: Vec<_> = (0..4).map(|i| sample(&format!("s{i}"), i as u8 * 40)).collect();
        for seed in 0..20 {
            let cfg = CompositeConfig { jitter: 1.0, canvas: Some([64, 48]), ..Default::default() };
            let m = mosaic(&four, &cfg, seed).unwrap();
            assert!(m.annotations.len() <= 4);
            for a in &m.annotations {
                assert!(a.bbox.within(64.0, 48.0));
            }
            assert!(m.provenance.tiers.contains(&Tier::Composite));
        }
    }

    #[test]
    fn needs_four() {
        let s = sample("a", 0);
        assert!(mosaic(&[s.clone(), s.clone(), s], &CompositeConfig::default(), 0).is_err());
    }
}
