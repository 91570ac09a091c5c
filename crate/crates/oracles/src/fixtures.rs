//! Seeded random inputs for the oracle comparisons.

use angio_core::augment::SourceImage;
use angio_core::{BinaryMask, BoundingBox, DatasetManifest, Detection, GrayImage, LesionAnnotation, ManifestImage, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::RefImage;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent pixels with the given foreground probability.
pub fn noise_mask(rng: &mut impl Rng, w: usize, h: usize, density: f64) -> BinaryMask {
    BinaryMask::from_fn(w, h, |_, _| rng.random_bool(density))
}

/// Union of 1 to 5 discs (radius 2 to 6) and thick segments.
pub fn blob_mask(rng: &mut impl Rng, w: usize, h: usize) -> BinaryMask {
    let mut shapes: Vec<(f64, f64, f64, f64, f64)> = Vec::new();
    for _ in 0..rng.random_range(1..=5) {
        let x0 = rng.random_range(0.0..w as f64);
        let y0 = rng.random_range(0.0..h as f64);
        let (x1, y1) = if rng.random_bool(0.5) {
            (rng.random_range(0.0..w as f64), rng.random_range(0.0..h as f64))
        } else {
            (x0, y0)
        };
        shapes.push((x0, y0, x1, y1, rng.random_range(2.0..6.0)));
    }
    BinaryMask::from_fn(w, h, |x, y| {
        let (px, py) = (x as f64, y as f64);
        shapes.iter().any(|&(x0, y0, x1, y1, r)| segment_distance(px, py, x0, y0, x1, y1) <= r)
    })
}

fn segment_distance(px: f64, py: f64, x0: f64, y0: f64, x1: f64, y1: f64) -> f64 {
    let (dx, dy) = (x1 - x0, y1 - y0);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((px - x0) * dx + (py - y0) * dy) / len2).clamp(0.0, 1.0) };
    let (cx, cy) = (x0 + t * dx, y0 + t * dy);
    ((px - cx).powi(2) + (py - cy).powi(2)).sqrt()
}

/// A pixel set whose 8-adjacency graph is a tree with at most `max_px` nodes,
/// grown by attaching leaves that touch exactly one existing pixel.
pub fn tree_skeleton(rng: &mut impl Rng, w: usize, h: usize, max_px: usize) -> BinaryMask {
    let mut m = BinaryMask::empty(w, h);
    let mut pixels = vec![(w / 2, h / 2)];
    m.set(w / 2, h / 2, true);
    let target = rng.random_range(1..=max_px);
    let mut attempts = 0;
    while pixels.len() < target && attempts < 50 * max_px {
        attempts += 1;
        let (x, y) = pixels[rng.random_range(0..pixels.len())];
        let dx = rng.random_range(-1..=1i64) as isize;
        let dy = rng.random_range(-1..=1i64) as isize;
        let (nx, ny) = (x as isize + dx, y as isize + dy);
        if (dx, dy) == (0, 0) || nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
            continue;
        }
        if m.get(nx as usize, ny as usize) {
            continue;
        }
        let mut touching = 0;
        for ey in -1..=1 {
            for ex in -1..=1 {
                if (ex, ey) != (0, 0) && m.get_or_bg(nx + ex, ny + ey) {
                    touching += 1;
                }
            }
        }
        if touching == 1 {
            m.set(nx as usize, ny as usize, true);
            pixels.push((nx as usize, ny as usize));
        }
    }
    m
}

pub fn gray_image(rng: &mut impl Rng, w: usize, h: usize) -> GrayImage {
    GrayImage::from_fn(w, h, |_, _| rng.random())
}

/// A valid box inside `[0, w] x [0, h]` with sides of at least 1.
pub fn boxed(rng: &mut impl Rng, w: f64, h: f64) -> BoundingBox {
    let x0 = rng.random_range(0.0..w - 1.0);
    let y0 = rng.random_range(0.0..h - 1.0);
    let x1 = rng.random_range(x0 + 1.0..=w);
    let y1 = rng.random_range(y0 + 1.0..=h);
    BoundingBox::new(x0, y0, x1, y1).expect("ordered corners")
}

/// A box near `b`: each corner moved by up to `jitter` times the box size.
pub fn perturbed(rng: &mut impl Rng, b: &BoundingBox, jitter: f64, w: f64, h: f64) -> BoundingBox {
    loop {
        let [x0, y0, x1, y1] = b.corners();
        let jx = jitter * (x1 - x0);
        let jy = jitter * (y1 - y0);
        let mut d = |v: f64, j: f64| v + if j > 0.0 { rng.random_range(-j..=j) } else { 0.0 };
        let c = [d(x0, jx).max(0.0), d(y0, jy).max(0.0), d(x1, jx).min(w), d(y1, jy).min(h)];
        if let Ok(nb) = BoundingBox::new(c[0], c[1], c[2], c[3]) {
            return nb;
        }
    }
}

/// Masks up to 32x32: sparse and dense noise plus blobs.
pub fn small_masks(count: usize, seed: u64) -> Vec<BinaryMask> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let w = r.random_range(1..=32);
            let h = r.random_range(1..=32);
            match i % 3 {
                0 => {
                    let density = r.random_range(0.05..0.95);
                    noise_mask(&mut r, w, h, density)
                }
                1 => blob_mask(&mut r, w, h),
                _ => noise_mask(&mut r, w, h, 0.98),
            }
        })
        .collect()
}

/// Side of the square images in [`detection_set`].
pub const DETECTION_IMAGE_SIDE: f64 = 128.0;

/// A synthetic detection benchmark and its oracle view.
pub struct DetectionSet {
    pub manifest: DatasetManifest,
    pub dets: Vec<Detection>,
    pub reference: Vec<RefImage>,
}

/// `images` images with 0 to 4 lesions and 0 to 10 detections each, most of
/// them jittered copies of a lesion box. Confidences are multiples of 0.1 so
/// ties occur. Lesions carry their box centre as MLD point, and lesions and
/// detections carry an MLD derived from their box.
pub fn detection_set(seed: u64, images: usize) -> DetectionSet {
    const W: f64 = DETECTION_IMAGE_SIDE;
    let mut r = rng(seed);
    let mut manifest = DatasetManifest::default();
    let mut dets = Vec::new();
    let mut reference = Vec::new();
    let mld_of = |b: &BoundingBox| (b.width().min(b.height()) / 4.0).max(0.5);
    for i in 0..images {
        let id = format!("im{i:02}");
        let gts: Vec<BoundingBox> = (0..r.random_range(0..=4)).map(|_| boxed(&mut r, W, W)).collect();
        let mut image_dets = Vec::new();
        for _ in 0..r.random_range(0..=10) {
            let b = if !gts.is_empty() && r.random_bool(0.7) {
                let g = gts[r.random_range(0..gts.len())];
                perturbed(&mut r, &g, 0.3, W, W)
            } else {
                boxed(&mut r, W, W)
            };
            let c = f64::from(r.random_range(0..=10u8)) / 10.0;
            image_dets.push((c, b));
        }
        dets.extend(image_dets.iter().map(|&(c, b)| {
            let mut d = Detection::new(&id, b, c).expect("valid detection");
            d.mld_px = Some(mld_of(&b));
            d
        }));
        let lesions = gts
            .iter()
            .map(|b| {
                let centre = Point::new((b.x_min() + b.x_max()) / 2.0, (b.y_min() + b.y_max()) / 2.0);
                LesionAnnotation::with_mld(*b, centre, mld_of(b)).expect("centre lies in its box")
            })
            .collect();
        manifest.images.push(ManifestImage {
            path: format!("{id}.png"),
            id,
            width: W as usize,
            height: W as usize,
            lesions,
            provenance: None,
        });
        reference.push(RefImage { dets: image_dets, gts });
    }
    DetectionSet { manifest, dets, reference }
}

/// Random `w` x `h` source images with 1 to 3 lesions whose sides are at least 4.
pub fn augment_sources(seed: u64, n: usize, w: usize, h: usize) -> Vec<SourceImage> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let lesions = (0..r.random_range(1..4))
                .map(|_| {
                    let b = loop {
                        let b = boxed(&mut r, w as f64, h as f64);
                        if b.width() >= 4.0 && b.height() >= 4.0 {
                            break b;
                        }
                    };
                    let p = Point::new((b.x_min() + b.x_max()) / 2.0, (b.y_min() + b.y_max()) / 2.0);
                    LesionAnnotation::with_mld(b, p, 3.0).expect("centre lies in its box")
                })
                .collect();
            SourceImage { id: format!("src{i}"), image: gray_image(&mut r, w, h), lesions }
        })
        .collect()
}
