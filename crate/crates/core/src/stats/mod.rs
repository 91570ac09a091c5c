//! Mann-Whitney U, percentile bootstrap, Bland-Altman and thresholded MLD agreement.

mod agreement;
mod bootstrap;
mod mann_whitney;

pub use agreement::{
    agreement_report, bland_altman, severity_agreement, AgreementReport, AgreementThresholds,
    BlandAltman, BlandAltmanPoint, Confusion, Estimate, LOA_Z,
};
pub(crate) use agreement::{harmonic, ratio};
pub use bootstrap::{bootstrap_ci, percentile, BootstrapConfig, ConfidenceInterval};
pub use mann_whitney::{mann_whitney_u, mann_whitney_u_with, MannWhitneyResult, TieRule, EXACT_LIMIT};
