use rand::seq::index;
use rand::Rng;

use super::config::AugmentConfig;
use super::seed::{sample_seed, transform_rng};
use super::{apply_dynamic, mosaic, static_expand, AugmentedSample, Tier, Tiers};
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};
use crate::types::{GrayImage, LesionAnnotation};

/// A decoded source image with its annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceImage {
    pub id: String,
    pub image: GrayImage,
    pub lesions: Vec<LesionAnnotation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamOptions {
    /// Dynamic draws per base sample.
    pub epochs: usize,
    /// Models the last training epochs, where mosaics are switched off.
    pub final_epochs: bool,
}

impl Default for StreamOptions {
    fn default() -> Self {
        Self { epochs: 1, final_epochs: false }
    }
}

/// Builds the augmented sample sequence.
///
/// The base set is the static expansion of every source (or the sources
/// themselves without the static tier). With the dynamic tier, each epoch
/// yields one dynamic draw per base sample, and with the composite tier (and
/// not `final_epochs`) each draw is replaced by a mosaic of itself and three
/// other draws of the same epoch. Output order is epoch-major, then base order.
pub fn build_training_stream(
    sources: &[SourceImage],
    cfg: &AugmentConfig,
    tiers: Tiers,
    opts: StreamOptions,
    exec: Execution,
) -> Result<Vec<AugmentedSample>> {
    tiers.validate()?;
    cfg.validate()?;
    let master = cfg.master_seed;
    let originals: Vec<AugmentedSample> = sources
        .iter()
        .map(|s| AugmentedSample::original(&s.id, s.image.clone(), s.lesions.clone()))
        .collect();
    let base: Vec<AugmentedSample> = if tiers.static_tier {
        map_indexed(originals.len(), exec, |i| {
            let o = &originals[i];
            static_expand(o, &cfg.static_tier, sample_seed(master, &o.id, Tier::Static, 0))
        })
        .into_iter()
        .flatten()
        .collect()
    } else {
        originals
    };
    if !tiers.dynamic {
        return Ok(base);
    }
    if opts.epochs == 0 {
        return Err(Error::InvalidConfig("the dynamic tier needs at least one epoch".into()));
    }

    let n = base.len();
    let mixing = tiers.composite && cfg.composite.mosaic && !opts.final_epochs;
    let mut stream = Vec::with_capacity(n * opts.epochs);
    for epoch in 0..opts.epochs {
        let draws = map_indexed(n, exec, |i| {
            let b = &base[i];
            let mut d = apply_dynamic(b, &cfg.dynamic, sample_seed(master, &b.id, Tier::Dynamic, epoch));
            d.id = format!("{}__e{epoch}", b.id);
            d.provenance.epoch = Some(epoch);
            d
        });
        if !mixing {
            stream.extend(draws);
            continue;
        }
        let mosaics = map_indexed(n, exec, |i| {
            let seed = sample_seed(master, &base[i].id, Tier::Composite, epoch);
            let group: Vec<AugmentedSample> =
                partners(n, i, seed).into_iter().map(|j| draws[j].clone()).collect();
            mosaic(&group, &cfg.composite, seed)
        });
        for m in mosaics {
            stream.push(m?);
        }
    }
    Ok(stream)
}

/// `i` followed by three other indices below `n`; distinct when `n ≥ 4`,
/// drawn with replacement otherwise.
fn partners(n: usize, i: usize, seed: u64) -> [usize; 4] {
    let mut rng = transform_rng(seed, "partners");
    let mut out = [i; 4];
    if n >= 4 {
        for (k, j) in index::sample(&mut rng, n - 1, 3).into_iter().enumerate() {
            out[k + 1] = if j >= i { j + 1 } else { j };
        }
    } else {
        for slot in out.iter_mut().skip(1) {
            *slot = rng.random_range(0..n);
        }
    }
    out
}
