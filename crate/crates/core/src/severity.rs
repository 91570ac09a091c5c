//! Lesion severity from a segmentation mask.
//!
//! The mask is thinned to a centerline, the longest centerline path is sampled
//! on the exact distance transform to get a radius profile, and the profile is
//! reduced to:
//!
//! * MLD (minimum lumen diameter): twice the smallest radius found between the
//!   first and the last radius peak,
//! * MAD (maximal healthy arterial diameter): twice the highest peak radius,
//! * DS (diameter stenosis): `(1 - MLD / MAD) * 100`.
//!
//! With fewer than two peaks the profile ends are trimmed (tapering at crop
//! edges is not a stenosis) and the global extremes of the remainder are used.
//!
//! All lengths are in pixels of the mask that was analysed.

use std::collections::HashSet;
use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::morphology::{distance_transform, longest_path, skeletonize};
use crate::par::{map_slice, Execution};
use crate::types::{uncrop_point, BinaryMask, CropContext, Point};

/// Radii along the main centerline path, in path order.
///
/// Thinning stops roughly one radius short of a blunt vessel end, so the path
/// is continued straight out of each end until it leaves the mask. `core` is
/// the index range of the samples that lie on the skeleton itself.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusProfile {
    pub points: Vec<(usize, usize)>,
    pub radii: Vec<f64>,
    pub core: Range<usize>,
}

impl RadiusProfile {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// `index,x,y,radius` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,x,y,radius\n");
        for (i, (&(x, y), r)) in self.points.iter().zip(&self.radii).enumerate() {
            out.push_str(&format!("{i},{x},{y},{r}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakParams {
    pub min_prominence: f64,
    pub min_separation: usize,
}

impl Default for PeakParams {
    fn default() -> Self {
        Self { min_prominence: 0.5, min_separation: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeverityParams {
    pub peaks: PeakParams,
    /// Fraction of samples dropped at each profile end when fewer than two peaks exist.
    pub end_trim_fraction: f64,
}

impl Default for SeverityParams {
    fn default() -> Self {
        Self { peaks: PeakParams::default(), end_trim_fraction: 0.05 }
    }
}

/// Which rule produced the MLD.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeverityMethod {
    BetweenPeaks,
    TrimmedExtremes,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeverityReport {
    pub mld_px: f64,
    pub mad_px: f64,
    pub ds_percent: f64,
    pub mld_point: Point,
    pub peak_indices: Vec<usize>,
    #[serde(skip)]
    pub method: SeverityMethod,
}

/// Which of the four axis flips maps the mask bounds onto the canonical view.
#[derive(Debug, Clone, Copy)]
struct Canonical {
    x0: usize,
    y0: usize,
    x1: usize,
    y1: usize,
    flip_x: bool,
    flip_y: bool,
}

impl Canonical {
    fn width(&self) -> usize {
        self.x1 - self.x0 + 1
    }

    fn height(&self) -> usize {
        self.y1 - self.y0 + 1
    }

    fn to_source(self, cx: usize, cy: usize) -> (usize, usize) {
        let x = if self.flip_x { self.x1 - cx } else { self.x0 + cx };
        let y = if self.flip_y { self.y1 - cy } else { self.y0 + cy };
        (x, y)
    }

    fn extract(&self, m: &BinaryMask) -> BinaryMask {
        BinaryMask::from_fn(self.width(), self.height(), |cx, cy| {
            let (x, y) = self.to_source(cx, cy);
            m.get(x, y)
        })
    }
}

/// Picks the lexicographically smallest of the four flipped views of the
/// foreground bounds. Thinning scans in a fixed order, so analysing this view
/// makes the result independent of mask orientation and position.
fn canonical_view(m: &BinaryMask) -> Option<(Canonical, BinaryMask)> {
    let (x0, y0, x1, y1) = m.foreground_bounds()?;
    let mut best: Option<(Canonical, BinaryMask)> = None;
    for (flip_x, flip_y) in [(false, false), (true, false), (false, true), (true, true)] {
        let c = Canonical { x0, y0, x1, y1, flip_x, flip_y };
        let view = c.extract(m);
        if best.as_ref().is_none_or(|(_, b)| view.data() < b.data()) {
            best = Some((c, view));
        }
    }
    best
}

/// Distance-transform radii along the longest path of the mask's skeleton.
///
/// Points are reported in the coordinates of `m`.
pub fn radius_profile(m: &BinaryMask) -> Result<RadiusProfile> {
    let (canon, view) = canonical_view(m).ok_or(Error::EmptyMask)?;
    // The tight crop keeps the image frame wherever the mask touches it, and
    // everything else around the bounds is background, so thinning and the
    // distance transform give the same values as on the full raster.
    let skel = skeletonize(&view);
    let path = longest_path(&skel)?.points;
    let head = extend_end(path.iter().rev(), &view, &path);
    let tail = extend_end(path.iter(), &view, &path);
    let core = head.len()..head.len() + path.len();
    let ordered: Vec<(usize, usize)> =
        head.into_iter().rev().chain(path).chain(tail).collect();
    let dist = distance_transform(&view);
    let radii = ordered.iter().map(|&(x, y)| dist.get(x, y)).collect();
    let points = ordered.iter().map(|&(x, y)| canon.to_source(x, y)).collect();
    Ok(RadiusProfile { points, radii, core })
}

/// Samples taken to estimate the direction of a path end.
const END_DIRECTION_LOOKBACK: usize = 5;

/// Continues the path past its last point (as yielded by `toward_end`) in unit
/// steps along the end direction while the mask stays foreground.
fn extend_end<'a>(
    toward_end: impl DoubleEndedIterator<Item = &'a (usize, usize)>,
    mask: &BinaryMask,
    path: &[(usize, usize)],
) -> Vec<(usize, usize)> {
    let tail: Vec<(usize, usize)> =
        toward_end.rev().take(END_DIRECTION_LOOKBACK + 1).copied().collect();
    if tail.len() < 2 {
        return Vec::new();
    }
    let (ex, ey) = (tail[0].0 as f64, tail[0].1 as f64);
    let (bx, by) = (tail[tail.len() - 1].0 as f64, tail[tail.len() - 1].1 as f64);
    let (dx, dy) = (ex - bx, ey - by);
    let norm = dx.hypot(dy);
    if norm == 0.0 {
        return Vec::new();
    }
    let (dx, dy) = (dx / norm, dy / norm);
    let on_path: HashSet<(usize, usize)> = path.iter().copied().collect();
    let mut out = Vec::new();
    let mut last = tail[0];
    for step in 1.. {
        let px = (ex + dx * step as f64).round();
        let py = (ey + dy * step as f64).round();
        if px < 0.0 || py < 0.0 {
            break;
        }
        let p = (px as usize, py as usize);
        if p == last {
            continue;
        }
        if p.0 >= mask.width() || p.1 >= mask.height() || !mask.get(p.0, p.1) || on_path.contains(&p) {
            break;
        }
        out.push(p);
        last = p;
    }
    out
}

/// Strict local maxima of `values` with plateaus collapsed to their centre,
/// filtered by topographic prominence and then by minimum index separation
/// (higher peaks win; on equal height the earlier index wins). Ascending order.
pub fn detect_peaks(values: &[f64], params: PeakParams) -> Vec<usize> {
    let candidates = local_maxima(values);
    let prominent: Vec<usize> = candidates
        .into_iter()
        .filter(|&p| prominence(values, p) >= params.min_prominence)
        .collect();
    enforce_separation(values, prominent, params.min_separation)
}

fn local_maxima(x: &[f64]) -> Vec<usize> {
    let mut peaks = Vec::new();
    let n = x.len();
    if n < 3 {
        return peaks;
    }
    let mut i = 1;
    while i < n - 1 {
        if x[i - 1] < x[i] {
            let mut ahead = i + 1;
            while ahead < n - 1 && x[ahead] == x[i] {
                ahead += 1;
            }
            if x[ahead] < x[i] {
                peaks.push((i + ahead - 1) / 2);
                i = ahead;
                continue;
            }
        }
        i += 1;
    }
    peaks
}

/// Height above the higher of the two bases, where each base is the lowest
/// value between the peak and the nearest strictly higher sample on that side
/// (or the profile end).
pub fn prominence(x: &[f64], peak: usize) -> f64 {
    let h = x[peak];
    let mut left_min = h;
    for &v in x[..peak].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &x[peak + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

fn enforce_separation(x: &[f64], peaks: Vec<usize>, min_separation: usize) -> Vec<usize> {
    if min_separation <= 1 || peaks.len() < 2 {
        return peaks;
    }
    let mut priority: Vec<usize> = (0..peaks.len()).collect();
    priority.sort_by(|&a, &b| x[peaks[b]].total_cmp(&x[peaks[a]]).then(a.cmp(&b)));
    let mut keep = vec![true; peaks.len()];
    for &i in &priority {
        if !keep[i] {
            continue;
        }
        for j in 0..peaks.len() {
            if j != i && keep[j] && peaks[i].abs_diff(peaks[j]) < min_separation {
                keep[j] = false;
            }
        }
    }
    peaks.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect()
}

/// MLD, MAD and DS of a profile.
///
/// Peaks are searched on the whole (extended) profile. The trimmed fallback
/// only looks at the skeleton samples.
pub fn severity_from_profile(profile: &RadiusProfile, params: SeverityParams) -> Result<SeverityReport> {
    let n = profile.len();
    if n < 3 {
        return Err(Error::DegenerateMask(n));
    }
    let r = &profile.radii;
    let peaks = detect_peaks(r, params.peaks);
    let (mld_idx, mad_radius, method) = if peaks.len() >= 2 {
        let first = peaks[0];
        let last = *peaks.last().expect("two peaks");
        let idx = argmin(r, first + 1, last);
        let top = peaks.iter().map(|&p| r[p]).fold(f64::NEG_INFINITY, f64::max);
        (idx, top, SeverityMethod::BetweenPeaks)
    } else {
        let core = profile.core.clone();
        let len = core.len();
        let trim = ((len as f64) * params.end_trim_fraction).floor() as usize;
        let trim = trim.min(len.saturating_sub(1) / 2);
        let (lo, hi) = (core.start + trim, core.end - trim);
        let idx = argmin(r, lo, hi);
        let top = r[lo..hi].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (idx, top, SeverityMethod::TrimmedExtremes)
    };
    let mld_px = 2.0 * r[mld_idx];
    let mad_px = 2.0 * mad_radius;
    let (x, y) = profile.points[mld_idx];
    Ok(SeverityReport {
        mld_px,
        mad_px,
        ds_percent: (1.0 - mld_px / mad_px) * 100.0,
        mld_point: Point::new(x as f64, y as f64),
        peak_indices: peaks,
        method,
    })
}

/// First index of the minimum in `r[lo..hi]`.
fn argmin(r: &[f64], lo: usize, hi: usize) -> usize {
    let mut best = lo;
    for i in lo..hi {
        if r[i] < r[best] {
            best = i;
        }
    }
    best
}

/// Severity of a lesion mask with default parameters.
pub fn estimate_severity(m: &BinaryMask) -> Result<SeverityReport> {
    estimate_severity_with(m, SeverityParams::default())
}

pub fn estimate_severity_with(m: &BinaryMask, params: SeverityParams) -> Result<SeverityReport> {
    let profile = radius_profile(m)?;
    severity_from_profile(&profile, params)
}

/// Severity of a mask predicted on a crop. The MLD location is mapped back into
/// the source image; diameters stay in crop pixels.
pub fn severity_from_crop(mask: &BinaryMask, ctx: &CropContext) -> Result<SeverityReport> {
    let mut report = estimate_severity(mask)?;
    report.mld_point = uncrop_point(report.mld_point, ctx);
    Ok(report)
}

/// Runs [`estimate_severity`] over many masks, results in input order.
pub fn estimate_batch(masks: &[BinaryMask], exec: Execution) -> Vec<Result<SeverityReport>> {
    map_slice(masks, exec, estimate_severity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::{bar, Dumbbell};

    fn dumbbell(neck: f64) -> BinaryMask {
        Dumbbell {
            center_x: 30.0,
            center_y: 40.0,
            bulb_radius: 12.0,
            bar_half_width: neck,
            bar_length: 60.0,
        }
        .render(150, 80)
        .mask
    }

    #[test]
    fn peaks_on_simple_profiles() {
        let p = PeakParams { min_prominence: 1.0, min_separation: 1 };
        assert_eq!(detect_peaks(&[1.0, 3.0, 1.0, 4.0, 1.0], p), vec![1, 3]);
        assert!(detect_peaks(&[1.0, 2.0, 3.0, 4.0, 5.0], p).is_empty());
        assert!(detect_peaks(&[5.0, 4.0, 3.0], p).is_empty());
        assert_eq!(detect_peaks(&[0.0, 2.0, 2.0, 2.0, 0.0], p), vec![2]);
        assert_eq!(detect_peaks(&[0.0, 2.0, 2.0, 0.0], p), vec![1]);
        // separation keeps the higher of two close peaks
        let sep = PeakParams { min_prominence: 1.0, min_separation: 3 };
        assert_eq!(detect_peaks(&[1.0, 3.0, 1.0, 4.0, 1.0], sep), vec![3]);
    }

    #[test]
    fn ribbon_profile_is_flat() {
        let m = bar(60, 20, 10, 49, 9.0, 2.5);
        let prof = radius_profile(&m).unwrap();
        let core = &prof.radii[prof.core.clone()];
        let n = core.len();
        assert!(n > 20);
        for &r in &core[5..n - 5] {
            assert!((r - 2.5).abs() <= 0.5, "radius {r}");
        }
    }

    #[test]
    fn single_pixel_profile() {
        let m = BinaryMask::from_fn(3, 3, |x, y| x == 1 && y == 1);
        let prof = radius_profile(&m).unwrap();
        assert_eq!(prof.radii, vec![1.0]);
        assert_eq!(estimate_severity(&m).unwrap_err(), Error::DegenerateMask(1));
    }

    #[test]
    fn empty_mask_is_an_error() {
        assert_eq!(radius_profile(&BinaryMask::empty(4, 4)).unwrap_err(), Error::EmptyMask);
    }

    #[test]
    fn constant_bar_has_no_stenosis() {
        let m = bar(120, 30, 10, 109, 14.0, 4.0);
        let rep = estimate_severity(&m).unwrap();
        assert_eq!(rep.method, SeverityMethod::TrimmedExtremes);
        assert_eq!(rep.mld_px, rep.mad_px);
        assert_eq!(rep.ds_percent, 0.0);
    }

    #[test]
    fn dumbbell_profile_has_two_maxima_and_a_valley() {
        let prof = radius_profile(&dumbbell(3.0)).unwrap();
        let peaks = detect_peaks(&prof.radii, PeakParams::default());
        assert!(peaks.len() >= 2, "peaks {peaks:?} in {:?}", prof.radii);
        let valley = prof.radii[peaks[0]..=*peaks.last().unwrap()]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        assert_eq!(valley, 3.0);
    }

    #[test]
    fn dumbbell_severity() {
        let rep = estimate_severity(&dumbbell(3.0)).unwrap();
        assert_eq!(rep.method, SeverityMethod::BetweenPeaks);
        assert!((rep.mld_px - 6.0).abs() <= 1.0, "{rep:?}");
        assert!((rep.mad_px - 24.0).abs() <= 1.0, "{rep:?}");
        assert!((rep.ds_percent - 75.0).abs() <= 3.0, "{rep:?}");
    }

    #[test]
    fn near_occlusion() {
        let rep = estimate_severity(&dumbbell(1.0)).unwrap();
        assert!(rep.ds_percent >= 90.0, "{rep:?}");
    }

    #[test]
    fn crop_context_shifts_the_mld_point() {
        let m = dumbbell(3.0);
        let base = estimate_severity(&m).unwrap();
        assert_eq!(severity_from_crop(&m, &CropContext::IDENTITY).unwrap(), base);
        let ctx = CropContext { offset_x: 10.0, offset_y: 20.0, ..CropContext::IDENTITY };
        let moved = severity_from_crop(&m, &ctx).unwrap();
        assert_eq!(moved.mld_px, base.mld_px);
        assert_eq!(moved.mld_point, Point::new(base.mld_point.x + 10.0, base.mld_point.y + 20.0));
    }

    #[test]
    fn profile_csv_layout() {
        let prof = RadiusProfile { points: vec![(1, 2), (2, 2)], radii: vec![1.0, 1.5], core: 0..2 };
        assert_eq!(prof.to_csv(), "index,x,y,radius\n0,1,2,1\n1,2,2,1.5\n");
    }
}
