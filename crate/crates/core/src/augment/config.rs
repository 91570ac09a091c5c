use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed real interval `[low, high]`, serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span(pub f64, pub f64);

impl Span {
    pub fn low(&self) -> f64 {
        self.0
    }

    pub fn high(&self) -> f64 {
        self.1
    }

    fn check(&self, what: &str, min: f64, max: f64) -> Result<()> {
        let ok = self.0.is_finite() && self.1.is_finite() && min <= self.0 && self.0 <= self.1 && self.1 <= max;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("{what} range [{}, {}] must be ordered within [{min}, {max}]", self.0, self.1)))
        }
    }
}

fn check_probability(what: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{what} probability {p} not in [0, 1]")))
    }
}

fn check_odd_kernel(what: &str, k: usize) -> Result<()> {
    if k >= 3 && k % 2 == 1 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{what} kernel size {k} must be odd and at least 3")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClaheConfig {
    pub clip_limit: f64,
    pub tiles_x: usize,
    pub tiles_y: usize,
}

impl Default for ClaheConfig {
    fn default() -> Self {
        Self { clip_limit: 4.0, tiles_x: 8, tiles_y: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShuffleConfig {
    pub windows: usize,
    pub min_side: usize,
    pub max_side: usize,
}

impl Default for ShuffleConfig {
    fn default() -> Self {
        Self { windows: 1000, min_side: 4, max_side: 16 }
    }
}

/// Parameters of the static tier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StaticConfig {
    pub clahe: ClaheConfig,
    /// Per-pixel multiplicative factor range.
    pub noise: Span,
    pub median_kernel: usize,
    pub motion_kernel: usize,
    pub defocus_radius: usize,
    pub shuffle: ShuffleConfig,
}

impl Default for StaticConfig {
    fn default() -> Self {
        Self {
            clahe: ClaheConfig::default(),
            noise: Span(0.9, 1.1),
            median_kernel: 5,
            motion_kernel: 9,
            defocus_radius: 3,
            shuffle: ShuffleConfig::default(),
        }
    }
}

impl StaticConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.clahe.clip_limit.is_finite() && self.clahe.clip_limit >= 0.0) {
            return Err(Error::InvalidConfig(format!("CLAHE clip limit {}", self.clahe.clip_limit)));
        }
        if self.clahe.tiles_x == 0 || self.clahe.tiles_y == 0 {
            return Err(Error::InvalidConfig("CLAHE needs at least one tile per axis".into()));
        }
        self.noise.check("noise", 0.0, f64::MAX)?;
        check_odd_kernel("median", self.median_kernel)?;
        check_odd_kernel("motion blur", self.motion_kernel)?;
        if self.defocus_radius == 0 {
            return Err(Error::InvalidConfig("defocus radius must be at least 1".into()));
        }
        let s = self.shuffle;
        if s.min_side < 1 || s.min_side > s.max_side {
            return Err(Error::InvalidConfig(format!("shuffle sides [{}, {}]", s.min_side, s.max_side)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaleConfig {
    pub p: f64,
    pub factor: Span,
}

impl Default for ScaleConfig {
    fn default() -> Self {
        Self { p: 0.5, factor: Span(0.8, 1.2) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EraseConfig {
    pub p: f64,
    /// Erased area as a fraction of the image area.
    pub area: Span,
    /// Height / width ratio of the erased rectangle.
    pub aspect: Span,
}

impl Default for EraseConfig {
    fn default() -> Self {
        Self { p: 0.5, area: Span(0.02, 0.1), aspect: Span(0.5, 2.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TranslateConfig {
    pub p: f64,
    /// Largest shift per axis as a fraction of that axis.
    pub fraction: f64,
}

impl Default for TranslateConfig {
    fn default() -> Self {
        Self { p: 0.5, fraction: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JiggleConfig {
    pub p: f64,
    pub brightness: Span,
    pub contrast: Span,
}

impl Default for JiggleConfig {
    fn default() -> Self {
        Self { p: 0.5, brightness: Span(0.8, 1.2), contrast: Span(0.8, 1.2) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlipConfig {
    pub p: f64,
}

impl Default for FlipConfig {
    fn default() -> Self {
        Self { p: 0.5 }
    }
}

/// Parameters of the dynamic tier, applied in field order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicConfig {
    pub scale: ScaleConfig,
    pub erase: EraseConfig,
    pub translate: TranslateConfig,
    pub jiggle: JiggleConfig,
    pub hflip: FlipConfig,
}

impl DynamicConfig {
    /// Every probability set to zero.
    pub fn disabled() -> Self {
        let mut c = Self::default();
        c.scale.p = 0.0;
        c.erase.p = 0.0;
        c.translate.p = 0.0;
        c.jiggle.p = 0.0;
        c.hflip.p = 0.0;
        c
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("scale", self.scale.p)?;
        check_probability("erase", self.erase.p)?;
        check_probability("translate", self.translate.p)?;
        check_probability("jiggle", self.jiggle.p)?;
        check_probability("hflip", self.hflip.p)?;
        self.scale.factor.check("scale factor", f64::MIN_POSITIVE, 100.0)?;
        self.erase.area.check("erase area", 0.0, 1.0)?;
        self.erase.aspect.check("erase aspect", f64::MIN_POSITIVE, f64::MAX)?;
        if !(0.0..=1.0).contains(&self.translate.fraction) {
            return Err(Error::InvalidConfig(format!("translate fraction {}", self.translate.fraction)));
        }
        self.jiggle.brightness.check("brightness", 0.0, f64::MAX)?;
        self.jiggle.contrast.check("contrast", 0.0, f64::MAX)?;
        Ok(())
    }
}

/// Parameters of the composite (mosaic) tier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompositeConfig {
    pub mosaic: bool,
    /// The mosaic centre is drawn from the central `jitter` fraction of each axis.
    pub jitter: f64,
    /// Output `[width, height]`; defaults to the size of the first input.
    pub canvas: Option<[usize; 2]>,
}

impl Default for CompositeConfig {
    fn default() -> Self {
        Self { mosaic: true, jitter: 0.5, canvas: None }
    }
}

impl CompositeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.jitter) {
            return Err(Error::InvalidConfig(format!("mosaic jitter {} not in [0, 1]", self.jitter)));
        }
        if let Some([w, h]) = self.canvas {
            if w < 2 || h < 2 {
                return Err(Error::InvalidConfig(format!("mosaic canvas {w}x{h} is too small")));
            }
        }
        Ok(())
    }
}

/// All augmentation parameters plus the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    #[serde(rename = "static")]
    pub static_tier: StaticConfig,
    pub dynamic: DynamicConfig,
    pub composite: CompositeConfig,
    pub master_seed: u64,
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        self.static_tier.validate()?;
        self.dynamic.validate()?;
        self.composite.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        AugmentConfig::default().validate().unwrap();
    }

    #[test]
    fn invalid_values() {
        let mut c = AugmentConfig::default();
        c.static_tier.median_kernel = 4;
        assert!(c.validate().is_err());
        let mut c = AugmentConfig::default();
        c.dynamic.hflip.p = 1.5;
        assert!(c.validate().is_err());
        let mut c = AugmentConfig::default();
        c.dynamic.scale.factor = Span(1.2, 0.8);
        assert!(c.validate().is_err());
    }
}
