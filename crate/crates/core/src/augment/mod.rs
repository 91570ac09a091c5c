//! Three-tier training augmentation.
//!
//! * static: every source image expands into itself plus seven appearance
//!   transforms (CLAHE, inversion, multiplicative noise, median, motion and
//!   defocus blur, local pixel shuffling); annotations are copied unchanged.
//! * dynamic: per epoch, scaling, erasing, translation, colour jiggle and
//!   horizontal flip are each applied with their own probability, in that
//!   order, with exact box remapping.
//! * composite: 2x2 mosaics of dynamic outputs, switched off for the final
//!   epochs.
//!
//! All randomness is derived from the master seed and the sample's identity
//! (see [`seed`]), so the output is independent of scheduling.

pub mod config;
mod dynamic;
pub mod geometry;
mod mosaic;
pub mod ops;
pub mod seed;
mod static_tier;
mod stream;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{GrayImage, LesionAnnotation};

pub use config::{AugmentConfig, CompositeConfig, DynamicConfig, Span, StaticConfig};
pub use dynamic::{apply_dynamic, hflip_sample, scale_sample, translate_sample, DYNAMIC_TRANSFORMS};
pub use mosaic::mosaic;
pub use static_tier::{static_expand, STATIC_TRANSFORMS};
pub use stream::{build_training_stream, SourceImage, StreamOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Static,
    Dynamic,
    Composite,
}

impl Tier {
    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Static => "static",
            Tier::Dynamic => "dynamic",
            Tier::Composite => "composite",
        }
    }
}

/// Enabled tiers. Composite mixes dynamic outputs, so it requires dynamic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tiers {
    pub static_tier: bool,
    pub dynamic: bool,
    pub composite: bool,
}

impl Tiers {
    pub const ALL: Tiers = Tiers { static_tier: true, dynamic: true, composite: true };

    pub fn validate(&self) -> Result<()> {
        if self.composite && !self.dynamic {
            return Err(Error::InvalidTiers("composite requires the dynamic tier".into()));
        }
        Ok(())
    }
}

impl FromStr for Tiers {
    type Err = Error;

    /// Comma-separated tier names, e.g. `static,dynamic`.
    fn from_str(s: &str) -> Result<Self> {
        let mut t = Tiers::default();
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name {
                "static" => t.static_tier = true,
                "dynamic" => t.dynamic = true,
                "composite" => t.composite = true,
                other => return Err(Error::InvalidTiers(format!("unknown tier `{other}`"))),
            }
        }
        t.validate()?;
        Ok(t)
    }
}

impl fmt::Display for Tiers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [(self.static_tier, "static"), (self.dynamic, "dynamic"), (self.composite, "composite")]
            .into_iter()
            .filter(|(on, _)| *on)
            .map(|(_, n)| n)
            .collect();
        f.write_str(&names.join(","))
    }
}

/// How a sample was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    /// Ids of the samples (or source images) this one was made from.
    pub sources: Vec<String>,
    /// Tiers applied, in pyramid order.
    pub tiers: Vec<Tier>,
    /// Transforms applied, in order.
    pub transforms: Vec<String>,
    /// Seed of the last tier applied.
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epoch: Option<usize>,
}

impl Provenance {
    pub fn original(id: &str) -> Self {
        Provenance { sources: vec![id.to_owned()], tiers: Vec::new(), transforms: Vec::new(), seed: 0, epoch: None }
    }
}

/// An augmented image with its remapped annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedSample {
    pub id: String,
    pub image: GrayImage,
    pub annotations: Vec<LesionAnnotation>,
    pub provenance: Provenance,
}

impl AugmentedSample {
    /// An unmodified source image.
    pub fn original(id: &str, image: GrayImage, annotations: Vec<LesionAnnotation>) -> Self {
        AugmentedSample { id: id.to_owned(), image, annotations, provenance: Provenance::original(id) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tier_parsing() {
        let t: Tiers = "static, dynamic".parse().unwrap();
        assert_eq!(t, Tiers { static_tier: true, dynamic: true, composite: false });
        assert_eq!(t.to_string(), "static,dynamic");
        assert!(matches!("static,composite".parse::<Tiers>(), Err(Error::InvalidTiers(_))));
        assert!(matches!("static,bogus".parse::<Tiers>(), Err(Error::InvalidTiers(_))));
        assert_eq!("".parse::<Tiers>().unwrap(), Tiers::default());
    }
}
