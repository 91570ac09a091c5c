use std::collections::BTreeMap;
use std::path::PathBuf;

use angio_core::severity::{radius_profile, severity_from_profile, SeverityParams, SeverityReport};
use angio_core::{uncrop_point, CropContext};

use super::{read_input, write_json, write_output};
use crate::error::CliError;
use crate::io::{self, MASK_THRESHOLD};
use crate::report::RunReport;

/// Estimate MLD, MAD and diameter stenosis from lesion mask PNGs.
#[derive(Debug, clap::Args)]
pub struct Args {
    /// Mask PNGs (8-bit grayscale; foreground is >= 128). Several masks give
    /// an object keyed by file name.
    #[arg(required = true)]
    masks: Vec<PathBuf>,
    /// Crop context JSON ({offset_x, offset_y, scale_x, scale_y}) mapping the
    /// MLD point back to the source image.
    #[arg(long)]
    crop: Option<PathBuf>,
    /// Output JSON (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Radius profile CSV (index,x,y,radius); single mask only.
    #[arg(long)]
    profile: Option<PathBuf>,
}

pub fn run(args: &Args, report: &mut RunReport) -> Result<(), CliError> {
    if args.profile.is_some() && args.masks.len() > 1 {
        return Err(CliError::Input("--profile needs exactly one mask".into()));
    }
    let ctx = match &args.crop {
        Some(p) => {
            let ctx: CropContext = read_input(report, p)?;
            ctx.validate().map_err(|e| CliError::at(p, e))?;
            ctx
        }
        None => CropContext::IDENTITY,
    };
    let mut masks = Vec::with_capacity(args.masks.len());
    for path in &args.masks {
        let bytes = io::read_bytes(path)?;
        report.input(path, &bytes);
        masks.push(io::decode_mask(&bytes, path)?);
    }
    let results = angio_core::par::map_slice(&masks, angio_core::Execution::Parallel, |m| {
        let profile = radius_profile(m)?;
        let sev = severity_from_profile(&profile, SeverityParams::default())?;
        Ok::<_, angio_core::Error>((profile, sev))
    });
    let mut reports: Vec<(String, SeverityReport)> = Vec::new();
    let mut profile_csv = None;
    for (path, res) in args.masks.iter().zip(results) {
        let (profile, mut sev) = res.map_err(|e| {
            CliError::at(path, format!("{e} (foreground is pixels >= {MASK_THRESHOLD})"))
        })?;
        sev.mld_point = uncrop_point(sev.mld_point, &ctx);
        profile_csv = Some(profile.to_csv());
        reports.push((io::file_name(path), sev));
    }
    if let (Some(path), Some(csv)) = (&args.profile, profile_csv) {
        write_output(report, Some(path), &csv)?;
    }
    if reports.len() == 1 {
        return write_json(report, args.out.as_deref(), &reports[0].1);
    }
    let mut by_name = BTreeMap::new();
    for (name, r) in reports {
        if by_name.contains_key(&name) {
            return Err(CliError::Input(format!("duplicate mask file name `{name}`")));
        }
        by_name.insert(name, r);
    }
    write_json(report, args.out.as_deref(), &by_name)
}
