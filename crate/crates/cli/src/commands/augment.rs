use std::collections::HashSet;
use std::path::{Path, PathBuf};

use angio_core::augment::{build_training_stream, AugmentConfig, SourceImage, StreamOptions, Tiers};
use angio_core::{DatasetManifest, Execution, ManifestImage};

use super::{read_input, write_output};
use crate::error::CliError;
use crate::io;
use crate::json;
use crate::report::RunReport;

/// Expand a dataset with the augmentation tiers and write the images plus a
/// manifest with provenance.
#[derive(Debug, clap::Args)]
pub struct Args {
    /// Source manifest JSON; image paths are relative to its directory.
    #[arg(long)]
    manifest: PathBuf,
    /// Augmentation config JSON (default: built-in parameters).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated tiers: static, dynamic, composite.
    #[arg(long, default_value = "static,dynamic,composite")]
    tiers: String,
    /// Master seed, overriding the config's.
    #[arg(long)]
    seed: Option<u64>,
    /// Dynamic draws per base sample.
    #[arg(long, default_value_t = 1)]
    epochs: usize,
    /// Leave mosaics out, as in the last training epochs.
    #[arg(long)]
    final_epochs: bool,
    /// Output directory; receives images/*.png and manifest.json.
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: &Args, report: &mut RunReport) -> Result<(), CliError> {
    let tiers: Tiers = args.tiers.parse()?;
    let mut cfg = match &args.config {
        Some(p) => {
            let bytes = io::read_bytes(p)?;
            report.input(p, &bytes);
            report.config(&bytes);
            serde_json::from_slice::<AugmentConfig>(&bytes)
                .map_err(|e| CliError::at(p, format!("schema violation: {e}")))?
        }
        None => AugmentConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    cfg.validate().map_err(|e| CliError::Input(format!("config: {e}")))?;

    let manifest: DatasetManifest = read_input(report, &args.manifest)?;
    manifest.validate().map_err(|e| CliError::at(&args.manifest, e))?;
    let root = args.manifest.parent().unwrap_or(Path::new(""));
    let mut sources = Vec::with_capacity(manifest.images.len());
    for entry in &manifest.images {
        check_id(&entry.id, &args.manifest)?;
        let path = root.join(&entry.path);
        let bytes = io::read_bytes(&path)?;
        report.input(&path, &bytes);
        let image = io::decode_gray(&bytes, &path)?;
        if (image.width(), image.height()) != (entry.width, entry.height) {
            return Err(CliError::at(
                &path,
                format!(
                    "image is {}x{} but the manifest says {}x{}",
                    image.width(),
                    image.height(),
                    entry.width,
                    entry.height
                ),
            ));
        }
        sources.push(SourceImage { id: entry.id.clone(), image, lesions: entry.lesions.clone() });
    }

    let opts = StreamOptions { epochs: args.epochs, final_epochs: args.final_epochs };
    let samples = build_training_stream(&sources, &cfg, tiers, opts, Execution::Parallel)?;

    let mut seen = HashSet::new();
    let mut images = Vec::with_capacity(samples.len());
    for s in samples {
        if !seen.insert(s.id.clone()) {
            return Err(CliError::Input(format!("duplicate output sample id `{}`", s.id)));
        }
        let rel = format!("images/{}.png", s.id);
        let png = io::encode_png(&s.image)?;
        let path = args.out.join(&rel);
        io::write_file(&path, &png)?;
        report.output(&path, &png);
        images.push(ManifestImage {
            id: s.id,
            path: rel,
            width: s.image.width(),
            height: s.image.height(),
            lesions: s.annotations,
            provenance: Some(s.provenance),
        });
    }
    let text = json::to_string(&DatasetManifest { images })?;
    write_output(report, Some(&args.out.join("manifest.json")), &text)
}

/// Ids become file names, so they must be plain names.
fn check_id(id: &str, manifest: &Path) -> Result<(), CliError> {
    let bad = id.is_empty() || id == "." || id == ".." || id.contains(['/', '\\']) || id.contains('\0');
    if bad {
        return Err(CliError::at(manifest, format!("image id `{id}` is not usable as a file name")));
    }
    Ok(())
}
