//! Synthetic vessel masks with known lumen geometry.
//!
//! Shapes are rasterized by testing integer pixel positions against a
//! continuous outline with strict inclusion. With integer centres and integer
//! half-widths the distance transform on the axis equals the half-width
//! exactly (the first excluded pixel sits at distance `r`), so the expected MLD
//! and reference diameter are known.

use crate::types::BinaryMask;

/// A rasterized phantom plus its ground-truth geometry.
#[derive(Debug, Clone)]
pub struct Phantom {
    pub mask: BinaryMask,
    /// Half-width of the narrowest section.
    pub neck_half_width: f64,
    /// Half-width of the widest healthy section.
    pub reference_half_width: f64,
}

impl Phantom {
    pub fn expected_mld(&self) -> f64 {
        2.0 * self.neck_half_width
    }

    pub fn expected_reference_diameter(&self) -> f64 {
        2.0 * self.reference_half_width
    }

    pub fn expected_ds(&self) -> f64 {
        (1.0 - self.neck_half_width / self.reference_half_width) * 100.0
    }
}

/// Geometry of a dumbbell: two discs joined by a straight bar.
#[derive(Debug, Clone, Copy)]
pub struct Dumbbell {
    /// Left disc centre (x) and shared axis (y); integers give exact radii.
    pub center_x: f64,
    pub center_y: f64,
    pub bulb_radius: f64,
    pub bar_half_width: f64,
    /// Distance between the facing disc edges.
    pub bar_length: f64,
}

impl Dumbbell {
    pub fn render(&self, width: usize, height: usize) -> Phantom {
        let r2 = self.bulb_radius * self.bulb_radius;
        let left = self.center_x;
        let right = self.center_x + 2.0 * self.bulb_radius + self.bar_length;
        let mask = BinaryMask::from_fn(width, height, |x, y| {
            let (x, y) = (x as f64, y as f64);
            let dy = y - self.center_y;
            let in_disc = |cx: f64| (x - cx).powi(2) + dy * dy < r2;
            let in_bar = x >= left && x <= right && dy.abs() < self.bar_half_width;
            in_disc(left) || in_disc(right) || in_bar
        });
        Phantom {
            mask,
            neck_half_width: self.bar_half_width,
            reference_half_width: self.bulb_radius,
        }
    }
}

/// A horizontal vessel with healthy ends and a raised-cosine narrowing.
#[derive(Debug, Clone, Copy)]
pub struct TaperedVessel {
    pub x_start: f64,
    pub center_y: f64,
    /// Half-width of the proximal healthy segment.
    pub proximal_half_width: f64,
    /// Half-width of the distal healthy segment.
    pub distal_half_width: f64,
    pub neck_half_width: f64,
    pub healthy_length: f64,
    /// Length of each taper (healthy to neck and back).
    pub taper_length: f64,
    /// Length of the constant-width neck.
    pub neck_length: f64,
}

impl TaperedVessel {
    pub fn half_width_at(&self, x: f64) -> Option<f64> {
        let t = x - self.x_start;
        let blend = |from: f64, to: f64, s: f64| {
            let w = 0.5 - 0.5 * (std::f64::consts::PI * s.clamp(0.0, 1.0)).cos();
            from + (to - from) * w
        };
        let segments = [
            self.healthy_length,
            self.taper_length,
            self.neck_length,
            self.taper_length,
            self.healthy_length,
        ];
        if t < 0.0 {
            return None;
        }
        let mut edge = 0.0;
        for (i, len) in segments.iter().enumerate() {
            if t <= edge + len {
                let s = (t - edge) / len.max(f64::MIN_POSITIVE);
                return Some(match i {
                    0 => self.proximal_half_width,
                    1 => blend(self.proximal_half_width, self.neck_half_width, s),
                    2 => self.neck_half_width,
                    3 => blend(self.neck_half_width, self.distal_half_width, s),
                    _ => self.distal_half_width,
                });
            }
            edge += len;
        }
        None
    }

    pub fn render(&self, width: usize, height: usize) -> Phantom {
        let mask = BinaryMask::from_fn(width, height, |x, y| {
            self.half_width_at(x as f64)
                .is_some_and(|hw| (y as f64 - self.center_y).abs() < hw)
        });
        Phantom {
            mask,
            neck_half_width: self.neck_half_width,
            reference_half_width: self.proximal_half_width.max(self.distal_half_width),
        }
    }
}

/// Horizontal bar of constant half-width.
pub fn bar(width: usize, height: usize, x0: usize, x1: usize, center_y: f64, half_width: f64) -> BinaryMask {
    BinaryMask::from_fn(width, height, |x, y| {
        x >= x0 && x <= x1 && (y as f64 - center_y).abs() < half_width
    })
}

/// Small deterministic generator for phantom parameters (SplitMix64).
#[derive(Debug, Clone)]
pub struct PhantomRng(u64);

impl PhantomRng {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Integer in `lo..=hi`.
    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as i64
    }
}

/// The `i`-th phantom of a reproducible 512x512 suite: even indices are
/// dumbbells, odd indices tapered vessels.
pub fn phantom_suite(count: usize, seed: u64) -> Vec<Phantom> {
    let mut rng = PhantomRng::new(seed);
    (0..count)
        .map(|i| {
            let cy = rng.int(150, 360) as f64;
            if i % 2 == 0 {
                let bulb = rng.int(9, 20) as f64;
                let neck = rng.int(1, 6) as f64;
                Dumbbell {
                    center_x: rng.int(40, 80) as f64,
                    center_y: cy,
                    bulb_radius: bulb,
                    bar_half_width: neck,
                    bar_length: rng.int(40, 160) as f64,
                }
                .render(512, 512)
            } else {
                let proximal = rng.int(6, 14) as f64;
                let distal = rng.int(6, 14) as f64;
                let neck = rng.int(1, proximal.min(distal) as i64 - 2) as f64;
                TaperedVessel {
                    x_start: rng.int(20, 60) as f64,
                    center_y: cy,
                    proximal_half_width: proximal,
                    distal_half_width: distal,
                    neck_half_width: neck,
                    healthy_length: rng.int(50, 90) as f64,
                    taper_length: rng.int(20, 50) as f64,
                    neck_length: rng.int(4, 30) as f64,
                }
                .render(512, 512)
            }
        })
        .collect()
}
