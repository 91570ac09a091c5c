//! Annotation remapping under axis-aligned affine transforms.
//!
//! Box coordinates are continuous extents: pixel column `i` covers `[i, i+1)`,
//! so mirroring a `W`-wide image maps `x` to `W − x` while the pixel itself
//! moves to column `W − 1 − i`.

use crate::types::{BoundingBox, LesionAnnotation, Point};

/// Smallest side a remapped box may keep, in pixels.
pub const MIN_BOX_SIDE: f64 = 2.0;
/// Smallest fraction of the remapped area that must survive clipping.
pub const MIN_VISIBLE_FRACTION: f64 = 0.25;

/// `x' = sx·x + tx`, `y' = sy·y + ty`. Negative scales mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub sx: f64,
    pub sy: f64,
    pub tx: f64,
    pub ty: f64,
}

impl Affine {
    pub const IDENTITY: Affine = Affine { sx: 1.0, sy: 1.0, tx: 0.0, ty: 0.0 };

    pub fn translation(tx: f64, ty: f64) -> Affine {
        Affine { tx, ty, ..Self::IDENTITY }
    }

    /// Zoom by `s` about the centre of a `width x height` canvas.
    pub fn scale_about_center(s: f64, width: f64, height: f64) -> Affine {
        Affine { sx: s, sy: s, tx: width / 2.0 * (1.0 - s), ty: height / 2.0 * (1.0 - s) }
    }

    pub fn hflip(width: f64) -> Affine {
        Affine { sx: -1.0, sy: 1.0, tx: width, ty: 0.0 }
    }

    pub fn inverse(&self) -> Affine {
        Affine { sx: 1.0 / self.sx, sy: 1.0 / self.sy, tx: -self.tx / self.sx, ty: -self.ty / self.sy }
    }

    /// `self` after `first`.
    pub fn after(&self, first: &Affine) -> Affine {
        Affine {
            sx: self.sx * first.sx,
            sy: self.sy * first.sy,
            tx: self.sx * first.tx + self.tx,
            ty: self.sy * first.ty + self.ty,
        }
    }

    pub fn is_isotropic(&self) -> bool {
        self.sx.abs() == self.sy.abs()
    }

    pub fn apply(&self, p: Point) -> Point {
        Point { x: self.sx * p.x + self.tx, y: self.sy * p.y + self.ty }
    }

    /// Mapped corners `[x_min, y_min, x_max, y_max]`, unclipped.
    pub fn map_corners(&self, c: [f64; 4]) -> [f64; 4] {
        let (xa, xb) = (self.sx * c[0] + self.tx, self.sx * c[2] + self.tx);
        let (ya, yb) = (self.sy * c[1] + self.ty, self.sy * c[3] + self.ty);
        [xa.min(xb), ya.min(yb), xa.max(xb), ya.max(yb)]
    }
}

/// Maps an annotation and clips it to the canvas.
///
/// The box is dropped when a clipped side is shorter than [`MIN_BOX_SIDE`] or
/// less than [`MIN_VISIBLE_FRACTION`] of the mapped area stays on the canvas.
/// The MLD point is dropped (with its value) when it leaves the clipped box;
/// the MLD value scales with isotropic maps and is dropped otherwise.
pub fn remap_annotation(ann: &LesionAnnotation, map: &Affine, width: f64, height: f64) -> Option<LesionAnnotation> {
    let [x0, y0, x1, y1] = map.map_corners(ann.bbox.corners());
    let area = (x1 - x0) * (y1 - y0);
    let (cx0, cy0, cx1, cy1) = (x0.max(0.0), y0.max(0.0), x1.min(width), y1.min(height));
    let (cw, ch) = (cx1 - cx0, cy1 - cy0);
    if cw < MIN_BOX_SIDE || ch < MIN_BOX_SIDE || cw * ch < MIN_VISIBLE_FRACTION * area {
        return None;
    }
    let bbox = BoundingBox::new(cx0, cy0, cx1, cy1).ok()?;
    let mut out = LesionAnnotation::new(bbox);
    match ann.mld_point.map(|p| map.apply(p)) {
        Some(p) if !bbox.contains(p) => return Some(out),
        point => out.mld_point = point,
    }
    if map.is_isotropic() {
        out.mld_px = ann.mld_px.map(|v| v * map.sx.abs());
    }
    Some(out)
}

pub fn remap_all(anns: &[LesionAnnotation], map: &Affine, width: f64, height: f64) -> Vec<LesionAnnotation> {
    anns.iter().filter_map(|a| remap_annotation(a, map, width, height)).collect()
}
