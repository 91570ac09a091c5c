use std::path::{Path, PathBuf};

use angio_core::stats::{agreement_report, bland_altman, AgreementThresholds, BootstrapConfig};
use angio_core::Execution;

use super::{write_json, write_output};
use crate::error::CliError;
use crate::io;
use crate::json::format_float;
use crate::report::RunReport;

/// Agreement between predicted and reference MLD: absolute error, Bland-Altman
/// limits and thresholded classification metrics with bootstrap intervals.
#[derive(Debug, clap::Args)]
pub struct Args {
    /// CSV with columns pred_mld,gt_mld (a header row is optional).
    pairs: PathBuf,
    /// A reference MLD at or below this is a significant lesion.
    #[arg(long, default_value_t = 4.0)]
    gt_threshold: f64,
    /// A predicted MLD at or below this is called significant.
    #[arg(long, default_value_t = 6.0)]
    pred_threshold: f64,
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    /// Confidence level of the bootstrap intervals.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output JSON (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Bland-Altman points CSV (mean,diff).
    #[arg(long)]
    points: Option<PathBuf>,
}

pub fn run(args: &Args, report: &mut RunReport) -> Result<(), CliError> {
    let bytes = io::read_bytes(&args.pairs)?;
    report.input(&args.pairs, &bytes);
    let (pred, gt) = parse_pairs(&bytes, &args.pairs)?;
    if pred.len() < 2 {
        return Err(CliError::at(&args.pairs, format!("need at least 2 rows, found {}", pred.len())));
    }
    for (name, v) in [("--gt-threshold", args.gt_threshold), ("--pred-threshold", args.pred_threshold)] {
        if !v.is_finite() {
            return Err(CliError::Input(format!("{name} must be finite")));
        }
    }
    let thresholds = AgreementThresholds { gt_px: args.gt_threshold, pred_px: args.pred_threshold };
    let boot = BootstrapConfig { iterations: args.iterations, level: args.level, seed: args.seed };
    boot.validate()?;
    let agreement = agreement_report(&pred, &gt, thresholds, boot, Execution::Parallel)?;
    if let Some(path) = &args.points {
        let ba = bland_altman(&pred, &gt)?;
        let mut text = String::from("mean,diff\n");
        for p in &ba.points {
            text.push_str(&format!("{},{}\n", format_float(p.mean), format_float(p.diff)));
        }
        write_output(report, Some(path), &text)?;
    }
    write_json(report, args.out.as_deref(), &agreement)
}

/// Reads `pred,gt` rows. A first row that is not numeric is taken as a header.
fn parse_pairs(bytes: &[u8], path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(bytes);
    let (mut pred, mut gt) = (Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| CliError::at(path, format!("line {line}: {e}")))?;
        if record.len() != 2 {
            return Err(CliError::at(path, format!("line {line}: expected 2 columns, found {}", record.len())));
        }
        let parsed: Vec<Option<f64>> =
            record.iter().map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite())).collect();
        match (parsed[0], parsed[1]) {
            (Some(p), Some(g)) => {
                pred.push(p);
                gt.push(g);
            }
            (None, None) if i == 0 => {}
            _ => return Err(CliError::at(path, format!("line {line}: expected two finite numbers"))),
        }
    }
    Ok((pred, gt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_optional() {
        let p = Path::new("x.csv");
        assert_eq!(parse_pairs(b"pred_mld,gt_mld\n1,2\n3.5, 4\n", p).unwrap(), (vec![1.0, 3.5], vec![2.0, 4.0]));
        assert_eq!(parse_pairs(b"1,2\n3,4\n", p).unwrap(), (vec![1.0, 3.0], vec![2.0, 4.0]));
    }

    #[test]
    fn malformed_rows() {
        let p = Path::new("x.csv");
        assert!(parse_pairs(b"1,2\nfoo,4\n", p).is_err());
        assert!(parse_pairs(b"1,2,3\n", p).is_err());
        assert!(parse_pairs(b"1,nan\n", p).is_err());
        assert!(parse_pairs(b"1,2\npred,gt\n", p).is_err());
    }
}
