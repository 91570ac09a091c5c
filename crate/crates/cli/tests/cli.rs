use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use angio_core::phantom::bar;
use serde_json::Value;

fn angio(args: &[&Path]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_angio")).args(args).env_remove("ANGIO_JOBS").output().unwrap()
}

fn bar_png(path: &Path) {
    let m = bar(60, 30, 5, 54, 15.0, 4.0);
    let img = image::GrayImage::from_fn(60, 30, |x, y| image::Luma([if m.get(x as usize, y as usize) { 255 } else { 0 }]));
    img.save(path).unwrap();
}

#[test]
fn report_lists_inputs_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = |s: &str| dir.path().join(s);
    bar_png(&d("bar.png"));
    let out = angio(&[
        Path::new("--report"),
        &d("report.json"),
        Path::new("severity"),
        &d("bar.png"),
        Path::new("--out"),
        &d("sev.json"),
        Path::new("--profile"),
        &d("profile.csv"),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&fs::read(d("report.json")).unwrap()).unwrap();
    assert_eq!(report["command"], "severity");
    assert_eq!(report["inputs"].as_array().unwrap().len(), 1);
    let outputs: Vec<&str> = report["outputs"].as_array().unwrap().iter().map(|o| o["path"].as_str().unwrap()).collect();
    assert_eq!(outputs.len(), 2);
    for o in outputs {
        assert!(Path::new(o).is_file());
    }

    let csv = fs::read_to_string(d("profile.csv")).unwrap();
    assert!(csv.starts_with("index,x,y,radius\n"));
    assert!(csv.lines().count() > 40);
    let sev: Value = serde_json::from_slice(&fs::read(d("sev.json")).unwrap()).unwrap();
    assert_eq!(sev["ds_percent"], 0.0);
}

#[test]
fn profile_needs_a_single_mask() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bar.png");
    bar_png(&p);
    let out = angio(&[Path::new("severity"), &p, &p, Path::new("--profile"), &dir.path().join("x.csv")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_grayscale_png_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("rgb.png");
    image::RgbImage::from_pixel(8, 8, image::Rgb([255, 255, 255])).save(&p).unwrap();
    let out = angio(&[Path::new("severity"), &p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grayscale"));
}

#[test]
fn missing_file_exits_two() {
    let out = angio(&[Path::new("agree"), Path::new("/nonexistent/pairs.csv")]);
    assert_eq!(out.status.code(), Some(2));
}
