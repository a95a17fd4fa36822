//! The JSON run report.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::output::ManifestEntry;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub job: String,
    pub config: BTreeMap<String, String>,
    pub results: JobResults,
    /// Every data file written, with its SHA-256.
    pub files: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JobResults {
    Absorb { spectra: Vec<AbsorbResult> },
    Twodir { surfaces: Vec<TwodirResult> },
    Validate { passed: bool, suites: Vec<SuiteResult> },
    Stability { baths: Vec<StabilityResult> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BathInfo {
    pub label: String,
    pub parameters: BTreeMap<String, f64>,
    pub reorganization_energy_cm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsorbResult {
    pub bath: BathInfo,
    pub peak_cm: f64,
    pub peak_shift_cm: f64,
    pub peak_shift_estimate_cm: f64,
    pub fwhm_cm: f64,
    pub bin_width_cm: f64,
    pub normalization: f64,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LobeReport {
    pub omega1_cm: f64,
    pub omega3_cm: f64,
    pub width_omega1_cm: f64,
    pub width_omega3_cm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwodirResult {
    pub bath: BathInfo,
    pub t2_ps: f64,
    pub center_line_slope: f64,
    pub nonrephasing_peak_magnitude: f64,
    pub rephasing_peak_magnitude: f64,
    pub negative_lobe: LobeReport,
    pub positive_lobe: LobeReport,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    /// Largest error (for error suites) or smallest fitted order (for convergence suites).
    pub worst: f64,
    pub tolerance: f64,
    pub metric: String,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityResult {
    pub bath: BathInfo,
    pub verdict: String,
    /// Long-time limit of h; absent when h grows without bound.
    pub h_infinity: Option<f64>,
    pub horizon_ps: f64,
    pub linear_peak: f64,
    pub linear_final_over_peak: f64,
    pub nonrephasing_peak: f64,
    pub nonrephasing_final_over_peak: f64,
    pub file: String,
}
