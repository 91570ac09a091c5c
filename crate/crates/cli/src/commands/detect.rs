use std::collections::HashMap;
use std::path::PathBuf;

use angio_core::detect_eval::{
    ctp_analysis, group_by_image, map_suite, mld_match, CtpMode, ImageLevelSummary, LesionLevelSummary,
    MatchOutcome, MldEvalResult,
};
use angio_core::{DatasetManifest, Detection, Execution};
use serde::{Deserialize, Serialize};

use super::{read_input, write_json};
use crate::error::CliError;
use crate::report::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// IoU matching: mAP, precision and recall at image and lesion level.
    Overlap,
    /// MLD-containment matching: MLD-precision, -recall and -F1.
    Mld,
}

/// Evaluate detections against a ground-truth manifest.
#[derive(Debug, clap::Args)]
pub struct Args {
    /// Ground-truth manifest JSON.
    #[arg(long)]
    gt: PathBuf,
    /// Detections JSON ({"detections": [...]}).
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, value_enum, default_value = "overlap")]
    mode: Mode,
    /// Flag candidate true positives among MLD-mode false positives (needs
    /// `mld_px` on those detections and on every ground truth).
    #[arg(long)]
    ctp: bool,
    /// Report the metrics with candidate true positives counted as true positives.
    #[arg(long)]
    ctp_as_tp: bool,
    /// Significance level of the candidate test.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Output JSON (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectionsFile {
    detections: Vec<Detection>,
}

#[derive(Serialize)]
struct LesionLevel {
    #[serde(flatten)]
    summary: LesionLevelSummary,
    fitness: Option<f64>,
}

#[derive(Serialize)]
struct OverlapOutput {
    mode: &'static str,
    image_level: ImageLevelSummary,
    lesion_level: LesionLevel,
}

#[derive(Serialize)]
struct Candidate {
    image_id: String,
    /// Index into the detections file.
    detection: usize,
    mld_px: f64,
    p_value: f64,
    ctp: bool,
}

#[derive(Serialize)]
struct CtpOutput {
    alpha: f64,
    candidates: Vec<Candidate>,
    as_fp: MldEvalResult,
    as_tp: MldEvalResult,
}

#[derive(Serialize)]
struct MldOutput {
    mode: &'static str,
    mld: MldEvalResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    ctp: Option<CtpOutput>,
}

pub fn run(args: &Args, report: &mut RunReport) -> Result<(), CliError> {
    let manifest: DatasetManifest = read_input(report, &args.gt)?;
    manifest.validate().map_err(|e| CliError::at(&args.gt, e))?;
    let dets = read_input::<DetectionsFile>(report, &args.pred)?.detections;
    let wants_ctp = args.ctp || args.ctp_as_tp;
    if wants_ctp && args.mode != Mode::Mld {
        return Err(CliError::Input("--ctp needs --mode mld".into()));
    }
    let out = args.out.as_deref();
    match args.mode {
        Mode::Overlap => {
            let s = map_suite(&dets, &manifest, Execution::Parallel).map_err(|e| CliError::at(&args.pred, e))?;
            let output = OverlapOutput {
                mode: "overlap",
                image_level: s.image_level,
                lesion_level: LesionLevel { summary: s.lesion_level, fitness: s.lesion_level.fitness() },
            };
            write_json(report, out, &output)
        }
        Mode::Mld => {
            let (pooled, det_index) = pool_mld_matches(&dets, &manifest, args)?;
            let ctp = if wants_ctp { Some(candidates(&pooled, &det_index, &dets, &manifest, args)?) } else { None };
            let mld = match &ctp {
                Some(c) if args.ctp_as_tp => c.as_tp,
                Some(c) => c.as_fp,
                None => MldEvalResult::from_counts(pooled.tp, pooled.fp, pooled.fn_, 0, CtpMode::CtpAsFp),
            };
            write_json(report, out, &MldOutput { mode: "mld", mld, ctp })
        }
    }
}

/// MLD-containment matching per image, pooled in manifest order. The second
/// value maps pooled detection indices back to the detections file.
fn pool_mld_matches(
    dets: &[Detection],
    manifest: &DatasetManifest,
    args: &Args,
) -> Result<(MatchOutcome, Vec<usize>), CliError> {
    group_by_image(dets, manifest).map_err(|e| CliError::at(&args.pred, e))?;
    let position: HashMap<&str, usize> =
        manifest.images.iter().enumerate().map(|(i, im)| (im.id.as_str(), i)).collect();
    let mut per_image = vec![Vec::new(); manifest.images.len()];
    for (d, det) in dets.iter().enumerate() {
        per_image[position[det.image_id.as_str()]].push(d);
    }
    let mut pooled = MatchOutcome::default();
    let mut det_index = Vec::with_capacity(dets.len());
    let mut gt_offset = 0;
    for (image, indices) in manifest.images.iter().zip(per_image) {
        let owned: Vec<Detection> = indices.iter().map(|&d| dets[d].clone()).collect();
        let m = mld_match(&owned, &image.lesions)
            .map_err(|e| CliError::at(&args.gt, format!("image `{}`: {e}", image.id)))?;
        pooled.append(&m, det_index.len(), gt_offset);
        det_index.extend(indices);
        gt_offset += image.lesions.len();
    }
    Ok((pooled, det_index))
}

fn candidates(
    pooled: &MatchOutcome,
    det_index: &[usize],
    dets: &[Detection],
    manifest: &DatasetManifest,
    args: &Args,
) -> Result<CtpOutput, CliError> {
    let mut gt_mlds = Vec::new();
    for image in &manifest.images {
        for (i, lesion) in image.lesions.iter().enumerate() {
            let v = lesion.mld_px.ok_or_else(|| {
                CliError::at(&args.gt, format!("image `{}` lesion #{i} has no mld_px", image.id))
            })?;
            gt_mlds.push(v);
        }
    }
    let fp: Vec<usize> = pooled.fp_detections.iter().map(|&d| det_index[d]).collect();
    let fp_mlds = fp
        .iter()
        .map(|&d| {
            dets[d].mld_px.ok_or_else(|| CliError::at(&args.pred, format!("false positive detection #{d} has no mld_px")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let analysis = ctp_analysis(pooled, &fp_mlds, &gt_mlds, args.alpha).map_err(|e| CliError::at(&args.gt, e))?;
    let candidates = fp
        .iter()
        .zip(&fp_mlds)
        .zip(analysis.p_values.iter().zip(&analysis.flags))
        .map(|((&d, &mld_px), (&p_value, &ctp))| Candidate {
            image_id: dets[d].image_id.clone(),
            detection: d,
            mld_px,
            p_value,
            ctp,
        })
        .collect();
    Ok(CtpOutput { alpha: analysis.alpha, candidates, as_fp: analysis.as_fp, as_tp: analysis.as_tp })
}
