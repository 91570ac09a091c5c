use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use angio_core::seg_eval::{score_batch, summarize, SegScore};
use angio_core::{BinaryMask, Execution};

use super::write_output;
use crate::error::{check_defined, CliError};
use crate::io;
use crate::json::format_float;
use crate::report::RunReport;

/// Score predicted vessel masks against ground truth, pairing PNGs by file name.
#[derive(Debug, clap::Args)]
pub struct Args {
    /// Directory of ground-truth mask PNGs.
    #[arg(long)]
    gt: PathBuf,
    /// Directory of predicted mask PNGs.
    #[arg(long)]
    pred: PathBuf,
    /// Output CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Resize both masks of every pair to SIZE x SIZE (nearest neighbour) before scoring.
    #[arg(long)]
    size: Option<usize>,
}

pub fn run(args: &Args, report: &mut RunReport) -> Result<(), CliError> {
    let gt_files = io::png_files(&args.gt)?;
    let pred_files = io::png_files(&args.pred)?;
    let gt_names: BTreeSet<String> = gt_files.iter().map(|p| io::file_name(p)).collect();
    let pred_names: BTreeSet<String> = pred_files.iter().map(|p| io::file_name(p)).collect();
    if let Some(name) = gt_names.symmetric_difference(&pred_names).next() {
        let dir = if gt_names.contains(name) { &args.pred } else { &args.gt };
        return Err(CliError::Input(format!("unpaired mask `{name}`: no counterpart in {}", dir.display())));
    }
    if gt_names.is_empty() {
        return Err(CliError::at(&args.gt, "no PNG masks"));
    }
    if args.size == Some(0) {
        return Err(CliError::Input("--size must be positive".into()));
    }

    let mut pairs = Vec::with_capacity(gt_names.len());
    for name in &gt_names {
        let gt = load(report, &args.gt.join(name))?;
        let pred = load(report, &args.pred.join(name))?;
        let pair = match args.size {
            Some(s) => (pred.resize_nearest(s, s), gt.resize_nearest(s, s)),
            None => (pred, gt),
        };
        pair.0.same_dims(&pair.1).map_err(|e| CliError::Input(format!("`{name}`: {e}")))?;
        pairs.push(pair);
    }
    let mut scores = Vec::with_capacity(pairs.len());
    for (name, res) in gt_names.iter().zip(score_batch(&pairs, Execution::Parallel)) {
        scores.push(res.map_err(|e| CliError::Input(format!("`{name}`: {e}")))?);
    }

    let mut undefined = Vec::new();
    let mut rows: Vec<(String, [Option<f64>; 7])> =
        gt_names.iter().cloned().zip(scores.iter().map(SegScore::values)).collect();
    let summary = summarize(&scores);
    rows.push(("mean".into(), summary.mean));
    rows.push(("sd".into(), summary.sd));
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = std::iter::once("name").chain(SegScore::COLUMNS).collect();
    w.write_record(&header).map_err(csv_error)?;
    for (name, values) in &rows {
        let mut record = vec![name.clone()];
        for (col, v) in SegScore::COLUMNS.iter().zip(values) {
            match v {
                Some(v) => record.push(format_float(*v)),
                None => {
                    undefined.push(format!("{name}.{col}"));
                    record.push(String::new());
                }
            }
        }
        w.write_record(&record).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(format!("csv: {e}")))?;
    let text = String::from_utf8(bytes).expect("csv output is UTF-8");
    write_output(report, args.out.as_deref(), &text)?;
    check_defined(undefined)
}

fn load(report: &mut RunReport, path: &Path) -> Result<BinaryMask, CliError> {
    let bytes = io::read_bytes(path)?;
    report.input(path, &bytes);
    io::decode_mask(&bytes, path)
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Input(format!("csv: {e}"))
}
