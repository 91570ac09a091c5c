//! Pixel-level image operations used by the augmentation tiers.

use rand::seq::SliceRandom;
use rand::Rng;

use super::config::{ClaheConfig, ShuffleConfig, Span};
use crate::types::{to_u8, GrayImage};

/// `255 − p` for every pixel.
pub fn invert(img: &GrayImage) -> GrayImage {
    let mut out = img.clone();
    out.data_mut().iter_mut().for_each(|p| *p = 255 - *p);
    out
}

/// Mirrors columns: pixel `x` moves to `W − 1 − x`.
pub fn flip_horizontal(img: &GrayImage) -> GrayImage {
    let w = img.width();
    GrayImage::from_fn(w, img.height(), |x, y| img.get(w - 1 - x, y))
}

/// Multiplies every pixel by its own factor drawn uniformly from `range`.
pub fn multiplicative_noise(img: &GrayImage, range: Span, rng: &mut impl Rng) -> GrayImage {
    let mut out = img.clone();
    for p in out.data_mut() {
        let f = if range.low() < range.high() { rng.random_range(range.low()..=range.high()) } else { range.low() };
        *p = to_u8(*p as f64 * f);
    }
    out
}

/// Median over a `k x k` window with replicated borders.
pub fn median_blur(img: &GrayImage, k: usize) -> GrayImage {
    let r = (k / 2) as isize;
    let mut window = Vec::with_capacity(k * k);
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        window.clear();
        for dy in -r..=r {
            for dx in -r..=r {
                window.push(img.get_clamped(x as isize + dx, y as isize + dy));
            }
        }
        window.sort_unstable();
        window[window.len() / 2]
    })
}

/// Normalised square kernel, row-major, odd side.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    pub side: usize,
    pub weights: Vec<f64>,
}

impl Kernel {
    fn normalized(side: usize, mask: Vec<bool>) -> Kernel {
        let n = mask.iter().filter(|&&m| m).count() as f64;
        Kernel { side, weights: mask.into_iter().map(|m| if m { 1.0 / n } else { 0.0 }).collect() }
    }
}

/// A line of `length` pixels through the kernel centre at `angle` radians.
pub fn motion_kernel(length: usize, angle: f64) -> Kernel {
    let c = (length / 2) as f64;
    let mut mask = vec![false; length * length];
    let (cos, sin) = (angle.cos(), angle.sin());
    // four sub-steps per pixel so steep lines leave no gaps
    let steps = 4 * (length / 2) as isize;
    for s in -steps..=steps {
        let t = s as f64 / 4.0;
        let x = (c + t * cos).round();
        let y = (c + t * sin).round();
        if (0.0..length as f64).contains(&x) && (0.0..length as f64).contains(&y) {
            mask[y as usize * length + x as usize] = true;
        }
    }
    Kernel::normalized(length, mask)
}

/// Uniform disc of the given radius.
pub fn disc_kernel(radius: usize) -> Kernel {
    let side = 2 * radius + 1;
    let r = radius as isize;
    let mask = (0..side * side)
        .map(|i| {
            let dx = (i % side) as isize - r;
            let dy = (i / side) as isize - r;
            dx * dx + dy * dy <= r * r
        })
        .collect();
    Kernel::normalized(side, mask)
}

/// Correlation with replicated borders, rounded back to `u8`.
pub fn convolve(img: &GrayImage, k: &Kernel) -> GrayImage {
    let r = (k.side / 2) as isize;
    let taps: Vec<(isize, isize, f64)> = k
        .weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != 0.0)
        .map(|(i, &w)| ((i % k.side) as isize - r, (i / k.side) as isize - r, w))
        .collect();
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let v: f64 = taps
            .iter()
            .map(|&(dx, dy, w)| w * img.get_clamped(x as isize + dx, y as isize + dy) as f64)
            .sum();
        to_u8(v)
    })
}

fn reflect101(i: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - m }) as usize
}

/// Contrast-limited adaptive histogram equalisation.
///
/// The image is padded by reflection to a multiple of the tile grid, each tile
/// gets a clipped and redistributed histogram, and pixels interpolate
/// bilinearly between the lookup tables of the four nearest tile centres.
pub fn clahe(img: &GrayImage, cfg: ClaheConfig) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let tx = cfg.tiles_x.min(w).max(1);
    let ty = cfg.tiles_y.min(h).max(1);
    let tile_w = w.div_ceil(tx);
    let tile_h = h.div_ceil(ty);
    let area = tile_w * tile_h;
    let clip = if cfg.clip_limit > 0.0 {
        ((cfg.clip_limit * area as f64 / 256.0) as usize).max(1)
    } else {
        usize::MAX
    };
    let scale = 255.0 / area as f64;
    let mut luts = vec![[0u8; 256]; tx * ty];
    for j in 0..ty {
        for i in 0..tx {
            let mut hist = [0usize; 256];
            for y in j * tile_h..(j + 1) * tile_h {
                for x in i * tile_w..(i + 1) * tile_w {
                    let v = img.get(reflect101(x as isize, w), reflect101(y as isize, h));
                    hist[v as usize] += 1;
                }
            }
            if clip != usize::MAX {
                let mut excess = 0;
                for b in hist.iter_mut() {
                    if *b > clip {
                        excess += *b - clip;
                        *b = clip;
                    }
                }
                let batch = excess / 256;
                let mut residual = excess - batch * 256;
                for b in hist.iter_mut() {
                    *b += batch;
                }
                if let Some(step) = 256usize.checked_div(residual) {
                    let step = step.max(1);
                    let mut k = 0;
                    while k < 256 && residual > 0 {
                        hist[k] += 1;
                        residual -= 1;
                        k += step;
                    }
                }
            }
            let lut = &mut luts[j * tx + i];
            let mut sum = 0;
            for v in 0..256 {
                sum += hist[v];
                lut[v] = to_u8(sum as f64 * scale);
            }
        }
    }
    let (inv_w, inv_h) = (1.0 / tile_w as f64, 1.0 / tile_h as f64);
    GrayImage::from_fn(w, h, |x, y| {
        let v = img.get(x, y) as usize;
        let fy = y as f64 * inv_h - 0.5;
        let fx = x as f64 * inv_w - 0.5;
        let (ty1, tx1) = (fy.floor() as isize, fx.floor() as isize);
        let (ya, xa) = (fy - ty1 as f64, fx - tx1 as f64);
        let cy = |t: isize| t.clamp(0, ty as isize - 1) as usize;
        let cx = |t: isize| t.clamp(0, tx as isize - 1) as usize;
        let lut = |j: usize, i: usize| luts[j * tx + i][v] as f64;
        let top = lut(cy(ty1), cx(tx1)) * (1.0 - xa) + lut(cy(ty1), cx(tx1 + 1)) * xa;
        let bottom = lut(cy(ty1 + 1), cx(tx1)) * (1.0 - xa) + lut(cy(ty1 + 1), cx(tx1 + 1)) * xa;
        to_u8(top * (1.0 - ya) + bottom * ya)
    })
}

/// A square window of the local pixel shuffle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub x: usize,
    pub y: usize,
    pub side: usize,
}

/// Draws one shuffle window fully inside a `width x height` image.
pub fn draw_window(width: usize, height: usize, cfg: ShuffleConfig, rng: &mut impl Rng) -> Window {
    let side = rng.random_range(cfg.min_side..=cfg.max_side).min(width).min(height);
    let x = rng.random_range(0..=width - side);
    let y = rng.random_range(0..=height - side);
    Window { x, y, side }
}

/// Permutes the pixels inside `win` in place.
pub fn shuffle_window(img: &mut GrayImage, win: Window, rng: &mut impl Rng) {
    let mut values: Vec<u8> = Vec::with_capacity(win.side * win.side);
    for y in win.y..win.y + win.side {
        for x in win.x..win.x + win.side {
            values.push(img.get(x, y));
        }
    }
    values.shuffle(rng);
    let mut it = values.into_iter();
    for y in win.y..win.y + win.side {
        for x in win.x..win.x + win.side {
            img.set(x, y, it.next().expect("window size"));
        }
    }
}

/// Shuffles pixels inside `cfg.windows` random windows, one after another.
pub fn local_pixel_shuffle(img: &GrayImage, cfg: ShuffleConfig, rng: &mut impl Rng) -> GrayImage {
    let mut out = img.clone();
    for _ in 0..cfg.windows {
        let win = draw_window(img.width(), img.height(), cfg, rng);
        shuffle_window(&mut out, win, rng);
    }
    out
}

/// Resamples `img` into a `out_w x out_h` raster with pixel-centre alignment,
/// so that a box coordinate `x` maps to `x · out_w / W`.
pub fn resize_centers(img: &GrayImage, out_w: usize, out_h: usize) -> GrayImage {
    let sx = img.width() as f64 / out_w as f64;
    let sy = img.height() as f64 / out_h as f64;
    GrayImage::from_fn(out_w, out_h, |u, v| {
        to_u8(img.sample_bilinear((u as f64 + 0.5) * sx - 0.5, (v as f64 + 0.5) * sy - 0.5))
    })
}

/// Zooms by `s` about the image centre, keeping the canvas size; uncovered
/// pixels become 0.
pub fn scale_about_center(img: &GrayImage, s: f64) -> GrayImage {
    let (w, h) = (img.width() as f64, img.height() as f64);
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let sx = (x as f64 + 0.5 - w / 2.0) / s + w / 2.0;
        let sy = (y as f64 + 0.5 - h / 2.0) / s + h / 2.0;
        if sx < 0.0 || sy < 0.0 || sx > w || sy > h {
            0
        } else {
            to_u8(img.sample_bilinear(sx - 0.5, sy - 0.5))
        }
    })
}

/// Integer shift; uncovered pixels become 0.
pub fn translate(img: &GrayImage, dx: isize, dy: isize) -> GrayImage {
    let (w, h) = (img.width() as isize, img.height() as isize);
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let (sx, sy) = (x as isize - dx, y as isize - dy);
        if sx < 0 || sy < 0 || sx >= w || sy >= h {
            0
        } else {
            img.get(sx as usize, sy as usize)
        }
    })
}

/// Fills an axis-aligned pixel rectangle with `value`.
pub fn fill_rect(img: &mut GrayImage, x: usize, y: usize, w: usize, h: usize, value: u8) {
    for yy in y..(y + h).min(img.height()) {
        for xx in x..(x + w).min(img.width()) {
            img.set(xx, yy, value);
        }
    }
}

/// Contrast about the image mean, then brightness: `((p − μ)·c + μ)·b`.
pub fn color_jiggle(img: &GrayImage, brightness: f64, contrast: f64) -> GrayImage {
    let mu = img.mean();
    let mut out = img.clone();
    for p in out.data_mut() {
        *p = to_u8(((*p as f64 - mu) * contrast + mu) * brightness);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ramp() -> GrayImage {
        GrayImage::from_fn(37, 23, |x, y| ((x * 7 + y * 11) % 256) as u8)
    }

    #[test]
    fn involutions() {
        let img = ramp();
        assert_eq!(invert(&invert(&img)), img);
        assert_eq!(flip_horizontal(&flip_horizontal(&img)), img);
    }

    #[test]
    fn constant_images_stay_constant() {
        let img = GrayImage::filled(40, 30, 77);
        for out in [
            clahe(&img, ClaheConfig::default()),
            median_blur(&img, 5),
            convolve(&img, &motion_kernel(9, 0.7)),
            convolve(&img, &disc_kernel(3)),
        ] {
            let v = out.data()[0];
            assert!(out.data().iter().all(|&p| p == v));
        }
        assert_eq!(median_blur(&img, 5), img);
        assert_eq!(convolve(&img, &disc_kernel(3)), img);
    }

    #[test]
    fn kernels_are_normalised() {
        for k in [motion_kernel(9, 0.0), motion_kernel(9, 1.1), disc_kernel(3)] {
            assert!((k.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        // horizontal line covers the whole middle row
        let k = motion_kernel(9, 0.0);
        assert_eq!(k.weights.iter().filter(|&&w| w > 0.0).count(), 9);
        assert_eq!(disc_kernel(3).weights.iter().filter(|&&w| w > 0.0).count(), 29);
    }

    #[test]
    fn shuffle_keeps_histogram() {
        let img = ramp();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = local_pixel_shuffle(&img, ShuffleConfig::default(), &mut rng);
        let mut a = img.data().to_vec();
        let mut b = out.data().to_vec();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
        assert_ne!(img, out);
    }

    #[test]
    fn noise_bounds() {
        let img = ramp();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let out = multiplicative_noise(&img, Span(0.9, 1.1), &mut rng);
        for (&p, &q) in img.data().iter().zip(out.data()) {
            let lo = (0.9 * p as f64).floor();
            let hi = (1.1 * p as f64).ceil().min(255.0);
            assert!(lo <= q as f64 && q as f64 <= hi);
        }
    }

    #[test]
    fn clahe_spreads_a_low_contrast_image() {
        let img = GrayImage::from_fn(256, 256, |x, y| 100 + ((x + y) % 4) as u8);
        let out = clahe(&img, ClaheConfig::default());
        let (lo, hi) = out.data().iter().fold((255u8, 0u8), |(a, b), &p| (a.min(p), b.max(p)));
        assert!(hi - lo > 9, "range {lo}..{hi}");
    }

    #[test]
    fn identity_geometry() {
        let img = ramp();
        assert_eq!(scale_about_center(&img, 1.0), img);
        assert_eq!(translate(&img, 0, 0), img);
        assert_eq!(resize_centers(&img, 37, 23), img);
        assert_eq!(color_jiggle(&img, 1.0, 1.0), img);
    }
}
