//! Rasters, boxes, annotations and the crop/resize glue between the
//! detection and segmentation stages.
//!
//! Coordinates are in pixels with the origin at the top-left corner. Pixel
//! `(i, j)` is sampled at the integer coordinate `(i, j)`; boxes are real-valued
//! corner pairs and containment is closed on every edge.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::augment::Provenance;
use crate::error::{Error, Result};

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!("{width}x{height} image")));
        }
        if data.len() != width * height {
            return Err(Error::InvalidRaster(format!(
                "{} samples for a {width}x{height} image",
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    /// Constant image. Panics on a zero dimension.
    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        Self { width, height, data: vec![value; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.data[y * self.width + x] = v;
    }

    /// Edge-clamped read.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> u8 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.get(x, y)
    }

    /// Bilinear sample at a real-valued position, clamping to the edge pixels.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> f64 {
        let max_x = (self.width - 1) as f64;
        let max_y = (self.height - 1) as f64;
        let x = x.clamp(0.0, max_x);
        let y = y.clamp(0.0, max_y);
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let (x0, y0) = (x0 as usize, y0 as usize);
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let p00 = self.get(x0, y0) as f64;
        let p10 = self.get(x1, y0) as f64;
        let p01 = self.get(x0, y1) as f64;
        let p11 = self.get(x1, y1) as f64;
        let top = p00 + (p10 - p00) * fx;
        let bottom = p01 + (p11 - p01) * fx;
        top + (bottom - top) * fy
    }

    /// Bilinear resize with the same sampling convention as [`crop_resize`].
    pub fn resize_bilinear(&self, out_w: usize, out_h: usize) -> GrayImage {
        let sx = self.width as f64 / out_w as f64;
        let sy = self.height as f64 / out_h as f64;
        GrayImage::from_fn(out_w, out_h, |u, v| {
            to_u8(self.sample_bilinear(u as f64 * sx, v as f64 * sy))
        })
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().map(|&p| p as f64).sum::<f64>() / self.data.len() as f64
    }
}

/// Rounds and saturates a real intensity to `u8`.
#[inline]
pub fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Boolean raster, `true` marks lesion foreground.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidRaster(format!(
                "{} samples for a {width}x{height} mask",
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self { width, height, data: vec![false; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    /// Foreground where `pixel >= threshold`.
    pub fn from_gray(img: &GrayImage, threshold: u8) -> Self {
        Self {
            width: img.width,
            height: img.height,
            data: img.data.iter().map(|&p| p >= threshold).collect(),
        }
    }

    /// 255 for foreground, 0 for background.
    pub fn to_gray(&self) -> Result<GrayImage> {
        GrayImage::new(
            self.width,
            self.height,
            self.data.iter().map(|&b| if b { 255 } else { 0 }).collect(),
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    /// Read with everything outside the raster treated as background.
    #[inline]
    pub fn get_or_bg(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.data[y as usize * self.width + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.data[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    pub fn same_dims(&self, other: &BinaryMask) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }

    /// Foreground pixel coordinates in row-major order.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % self.width, i / self.width))
    }

    /// Tight bounds `(x0, y0, x1, y1)` of the foreground, inclusive.
    pub fn foreground_bounds(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bounds: Option<(usize, usize, usize, usize)> = None;
        for (x, y) in self.foreground() {
            bounds = Some(match bounds {
                None => (x, y, x, y),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
            });
        }
        bounds
    }

    pub fn flip_horizontal(&self) -> BinaryMask {
        BinaryMask::from_fn(self.width, self.height, |x, y| self.get(self.width - 1 - x, y))
    }

    pub fn flip_vertical(&self) -> BinaryMask {
        BinaryMask::from_fn(self.width, self.height, |x, y| self.get(x, self.height - 1 - y))
    }

    /// Nearest-neighbour resize.
    pub fn resize_nearest(&self, out_w: usize, out_h: usize) -> BinaryMask {
        BinaryMask::from_fn(out_w, out_h, |u, v| {
            let x = (u * self.width / out_w).min(self.width - 1);
            let y = (v * self.height / out_h).min(self.height - 1);
            self.get(x, y)
        })
    }
}

/// Real-valued pixel position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl TryFrom<[f64; 2]> for Point {
    type Error = Error;

    fn try_from([x, y]: [f64; 2]) -> Result<Self> {
        let p = Point { x, y };
        if !p.is_finite() {
            return Err(Error::InvalidAnnotation(format!("non-finite point ({x}, {y})")));
        }
        Ok(p)
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Axis-aligned box stored as a corner pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct BoundingBox {
    x_min: f64,
    y_min: f64,
    x_max: f64,
    y_max: f64,
}

impl BoundingBox {
    /// Requires finite coordinates, `x_min < x_max`, `y_min < y_max` and non-negative corners.
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        let ok = [x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite())
            && x_min >= 0.0
            && y_min >= 0.0
            && x_min < x_max
            && y_min < y_max;
        if !ok {
            return Err(Error::InvalidBox { x_min, y_min, x_max, y_max });
        }
        Ok(Self { x_min, y_min, x_max, y_max })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn corners(&self) -> [f64; 4] {
        [self.x_min, self.y_min, self.x_max, self.y_max]
    }

    pub fn iou(&self, other: &BoundingBox) -> f64 {
        bbox_iou(self, other)
    }

    pub fn contains(&self, p: Point) -> bool {
        bbox_contains(self, p)
    }

    /// Intersection with `[0, width] x [0, height]`, `None` when nothing is left.
    pub fn clip(&self, width: f64, height: f64) -> Option<BoundingBox> {
        let x_min = self.x_min.max(0.0);
        let y_min = self.y_min.max(0.0);
        let x_max = self.x_max.min(width);
        let y_max = self.y_max.min(height);
        BoundingBox::new(x_min, y_min, x_max, y_max).ok()
    }

    pub fn within(&self, width: f64, height: f64) -> bool {
        self.x_max <= width && self.y_max <= height
    }
}

impl TryFrom<[f64; 4]> for BoundingBox {
    type Error = Error;

    fn try_from([a, b, c, d]: [f64; 4]) -> Result<Self> {
        BoundingBox::new(a, b, c, d)
    }
}

impl From<BoundingBox> for [f64; 4] {
    fn from(b: BoundingBox) -> Self {
        b.corners()
    }
}

/// Intersection over union of two boxes, 0 when disjoint.
pub fn bbox_iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let iw = (a.x_max.min(b.x_max) - a.x_min.max(b.x_min)).max(0.0);
    let ih = (a.y_max.min(b.y_max) - a.y_min.max(b.y_min)).max(0.0);
    let inter = iw * ih;
    if inter <= 0.0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// Closed containment: points on the box edge are inside.
pub fn bbox_contains(b: &BoundingBox, p: Point) -> bool {
    b.x_min <= p.x && p.x <= b.x_max && b.y_min <= p.y && p.y <= b.y_max
}

/// Ground-truth lesion: a box plus the optional annotated MLD location and value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LesionAnnotation {
    pub bbox: BoundingBox,
    #[serde(default)]
    pub mld_point: Option<Point>,
    #[serde(default)]
    pub mld_px: Option<f64>,
}

impl LesionAnnotation {
    pub fn new(bbox: BoundingBox) -> Self {
        Self { bbox, mld_point: None, mld_px: None }
    }

    pub fn with_mld(bbox: BoundingBox, point: Point, mld_px: f64) -> Result<Self> {
        let ann = Self { bbox, mld_point: Some(point), mld_px: Some(mld_px) };
        ann.validate()?;
        Ok(ann)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.mld_point {
            if !self.bbox.contains(p) {
                return Err(Error::InvalidAnnotation(format!(
                    "MLD point ({}, {}) outside its box",
                    p.x, p.y
                )));
            }
        }
        if let Some(v) = self.mld_px {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidAnnotation(format!("MLD {v} must be positive")));
            }
        }
        Ok(())
    }
}

/// A predicted lesion box for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Detection {
    pub image_id: String,
    pub bbox: BoundingBox,
    pub confidence: f64,
    /// MLD measured on this detection's segmented crop; only consumed by the
    /// candidate-true-positive analysis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mld_px: Option<f64>,
}

impl Detection {
    pub fn new(image_id: impl Into<String>, bbox: BoundingBox, confidence: f64) -> Result<Self> {
        let det = Self { image_id: image_id.into(), bbox, confidence, mld_px: None };
        det.validate()?;
        Ok(det)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(Error::InvalidAnnotation(format!(
                "confidence {} outside [0, 1]",
                self.confidence
            )));
        }
        if let Some(v) = self.mld_px {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidAnnotation(format!("detection MLD {v} must be positive")));
            }
        }
        Ok(())
    }
}

/// One image entry of a [`DatasetManifest`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestImage {
    pub id: String,
    pub path: String,
    pub width: usize,
    pub height: usize,
    #[serde(default)]
    pub lesions: Vec<LesionAnnotation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub images: Vec<ManifestImage>,
}

impl DatasetManifest {
    /// Checks id uniqueness, annotation invariants and that every box lies inside its image.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for img in &self.images {
            if !seen.insert(img.id.as_str()) {
                return Err(Error::InvalidManifest(format!("duplicate image id `{}`", img.id)));
            }
            if img.width == 0 || img.height == 0 {
                return Err(Error::InvalidManifest(format!("image `{}` has a zero dimension", img.id)));
            }
            for lesion in &img.lesions {
                lesion.validate()?;
                if !lesion.bbox.within(img.width as f64, img.height as f64) {
                    return Err(Error::InvalidManifest(format!(
                        "lesion box {:?} outside image `{}`",
                        lesion.bbox.corners(),
                        img.id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn image(&self, id: &str) -> Option<&ManifestImage> {
        self.images.iter().find(|i| i.id == id)
    }
}

/// Affine map from source-image coordinates into a crop: `p' = (p - offset) * scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CropContext {
    pub offset_x: f64,
    pub offset_y: f64,
    pub scale_x: f64,
    pub scale_y: f64,
}

impl CropContext {
    pub const IDENTITY: CropContext =
        CropContext { offset_x: 0.0, offset_y: 0.0, scale_x: 1.0, scale_y: 1.0 };

    pub fn map_forward(&self, p: Point) -> Point {
        Point::new((p.x - self.offset_x) * self.scale_x, (p.y - self.offset_y) * self.scale_y)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.offset_x, self.offset_y, self.scale_x, self.scale_y]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.scale_x <= 0.0 || self.scale_y <= 0.0 {
            return Err(Error::InvalidConfig(format!("invalid crop context {self:?}")));
        }
        Ok(())
    }
}

impl Default for CropContext {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// Crops `b` (clipped to the image) and resamples it bilinearly to `out_w x out_h`.
pub fn crop_resize(
    img: &GrayImage,
    b: &BoundingBox,
    out_w: usize,
    out_h: usize,
) -> Result<(GrayImage, CropContext)> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::InvalidRaster(format!("{out_w}x{out_h} output")));
    }
    let clipped =
        b.clip(img.width() as f64, img.height() as f64).ok_or(Error::DegenerateCrop)?;
    let ctx = CropContext {
        offset_x: clipped.x_min,
        offset_y: clipped.y_min,
        scale_x: out_w as f64 / clipped.width(),
        scale_y: out_h as f64 / clipped.height(),
    };
    let out = GrayImage::from_fn(out_w, out_h, |u, v| {
        let src = uncrop_point(Point::new(u as f64, v as f64), &ctx);
        to_u8(img.sample_bilinear(src.x, src.y))
    });
    Ok((out, ctx))
}

/// Maps a crop-space point back into the source image.
pub fn uncrop_point(p: Point, ctx: &CropContext) -> Point {
    Point::new(p.x / ctx.scale_x + ctx.offset_x, p.y / ctx.scale_y + ctx.offset_y)
}
