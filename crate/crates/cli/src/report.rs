//! Machine-readable run reports.
//!
//! Everything except `timings` is a pure function of the inputs and the
//! config, so [`deterministic_json`] is byte-identical across runs.

use boltid_core::identify::MatchResult;
use boltid_core::imagecore::AxisRect;
use boltid_core::pipeline::BoltFeatures;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// Canonical key=value config used for the run.
    pub config: String,
    pub table: Option<String>,
    pub images: Vec<ImageRecord>,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<ImageTimings>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub path: String,
    /// Set when the image could not be read; `components` is then empty.
    pub error: Option<String>,
    pub components: Vec<ComponentRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub index: usize,
    pub rect: AxisRect,
    pub area_px: usize,
    pub features: Option<BoltFeatures>,
    pub features_mm: Option<FeaturesMm>,
    /// Pipeline failure, as `<kind> at <stage>: ...`.
    pub error: Option<String>,
    #[serde(rename = "match")]
    pub match_result: Option<MatchResult>,
    /// Ground-truth name, when a truth manifest labels this component.
    pub truth: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeaturesMm {
    pub major: f64,
    pub minor: f64,
    pub pitch: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub images: usize,
    pub unreadable_images: usize,
    pub components: usize,
    pub measured: usize,
    pub failed: usize,
    pub known: usize,
    pub unknown: usize,
    pub truth: Option<TruthSummary>,
}

/// Counts against a ground-truth manifest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TruthSummary {
    pub labeled: usize,
    /// Known match with the labeled name.
    pub true_positives: usize,
    /// Known match with another name.
    pub false_positives: usize,
    /// Matched entry has the labeled entry's dimensions.
    pub dims_true_positives: usize,
    /// Measured threading equals the labeled entry's.
    pub threading_correct: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageTimings {
    pub path: String,
    pub read_ms: f64,
    pub threshold_ms: f64,
    pub components_ms: f64,
    /// Per component, `(stage, ms)` in pipeline order.
    pub stages: Vec<Vec<(String, f64)>>,
}

pub fn to_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<RunReport, serde_json::Error> {
    serde_json::from_str(text)
}

/// The report without its timing section.
pub fn deterministic_json(report: &RunReport) -> String {
    to_json(&RunReport {
        timings: None,
        ..report.clone()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub stage: String,
    pub mean_ms: f64,
    pub p95_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: String,
    pub images: Vec<String>,
    pub repetitions: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        self.rows
            .iter()
            .map(|r| format!("{},{:.3},{:.3}\n", r.stage, r.mean_ms, r.p95_ms))
            .collect()
    }

    pub fn row(&self, stage: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.stage == stage)
    }
}
