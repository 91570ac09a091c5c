//! Rule-based coronary lesion analysis on segmentation masks.
//!
//! The crate covers four areas:
//!
//! * [`severity`]: minimum lumen diameter (MLD), maximal healthy arterial diameter
//!   and diameter stenosis from a binary lesion mask, built on the thinning and
//!   exact distance transform in [`morphology`].
//! * [`augment`]: the three-tier (static, dynamic, composite) training augmentation
//!   pyramid with deterministic per-sample seeding.
//! * [`detect_eval`] and [`seg_eval`]: overlap-based and MLD-containment detection
//!   metrics, pixel metrics, clDice and the modified Hausdorff distance.
//! * [`stats`]: Mann-Whitney U, percentile bootstrap, Bland-Altman and thresholded
//!   severity agreement.
//!
//! Batch entry points take an [`Execution`] mode. With the default `parallel`
//! feature they fan out over rayon; results are identical to the sequential path.

pub mod augment;
pub mod detect_eval;
mod error;
pub mod morphology;
pub mod par;
pub mod phantom;
pub mod seg_eval;
pub mod severity;
pub mod stats;
pub mod types;

pub use error::{Error, Result};
pub use par::Execution;
pub use types::{
    bbox_contains, bbox_iou, crop_resize, uncrop_point, BinaryMask, BoundingBox, CropContext,
    DatasetManifest, Detection, GrayImage, LesionAnnotation, ManifestImage, Point,
};
