//! File access: PNG masks and images, JSON documents, digests.

use std::fs;
use std::path::{Path, PathBuf};

use angio_core::{BinaryMask, GrayImage};
use image::{ColorType, ImageFormat};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Foreground is every pixel at or above this value.
pub const MASK_THRESHOLD: u8 = 128;

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::at(path, e))
}

/// Decodes an 8-bit grayscale PNG; `path` only labels errors.
pub fn decode_gray(bytes: &[u8], path: &Path) -> Result<GrayImage, CliError> {
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png).map_err(|e| CliError::at(path, e))?;
    if img.color() != ColorType::L8 {
        return Err(CliError::at(path, format!("expected 8-bit grayscale PNG, found {:?}", img.color())));
    }
    let luma = img.into_luma8();
    let (w, h) = (luma.width() as usize, luma.height() as usize);
    GrayImage::new(w, h, luma.into_raw()).map_err(|e| CliError::at(path, e))
}

pub fn decode_mask(bytes: &[u8], path: &Path) -> Result<BinaryMask, CliError> {
    Ok(BinaryMask::from_gray(&decode_gray(bytes, path)?, MASK_THRESHOLD))
}

pub fn encode_png(img: &GrayImage) -> Result<Vec<u8>, CliError> {
    let buf = image::GrayImage::from_raw(img.width() as u32, img.height() as u32, img.data().to_vec())
        .ok_or_else(|| CliError::Input("image buffer size".into()))?;
    let mut out = std::io::Cursor::new(Vec::new());
    buf.write_to(&mut out, ImageFormat::Png).map_err(|e| CliError::Input(format!("png encoding: {e}")))?;
    Ok(out.into_inner())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::at(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::at(path, e))
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// PNG files directly inside `dir`, sorted by name.
pub fn png_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::at(dir, e))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::at(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png")) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

pub fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}
