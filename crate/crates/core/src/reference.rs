//! Published reference figures, bundled as versioned data.
//!
//! These are shown next to computed values for comparison. The gate and
//! transistor figures use different, unstated counting conventions and are
//! not derived from the netlists in [`crate::cells`].

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

const DATA: &str = include_str!("../data/reference.json");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PublishedMetrics {
    pub mse: f64,
    pub nmed: f64,
    pub mred: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceData {
    pub schema_version: u32,
    pub label: String,
    pub note: String,
    /// Keyed by case-study name; values in percent.
    pub error_metrics_percent: BTreeMap<String, PublishedMetrics>,
    pub transistors: BTreeMap<String, u32>,
    pub gate_counts: BTreeMap<String, u32>,
    pub logic_gates: BTreeMap<String, u32>,
}

pub fn reference() -> &'static ReferenceData {
    static DATA_CELL: OnceLock<ReferenceData> = OnceLock::new();
    DATA_CELL.get_or_init(|| serde_json::from_str(DATA).expect("bundled reference data parses"))
}
