//! JSON result document written per (year, flow).

use serde::{Deserialize, Serialize};

use crate::nestedness::OptimizerBudget;
use crate::rankings::RankEntry;

/// Schema version of [`AnalysisDocument`].
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shape {
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentRankings {
    pub countries_ecolo: Vec<RankEntry>,
    pub products_ecolo: Vec<RankEntry>,
    pub countries_volume: Vec<RankEntry>,
    pub products_volume: Vec<RankEntry>,
}

/// Result of one nestedness analysis. Field order is the serialized key
/// order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDocument {
    pub v: u32,
    pub year: i32,
    pub flow: String,
    pub mu: f64,
    /// Fill of the full (untrimmed) matrix.
    pub phi: f64,
    pub temperature: f64,
    pub eta: f64,
    pub row_order: Vec<String>,
    pub col_order: Vec<String>,
    pub dropped_rows: Vec<String>,
    pub dropped_cols: Vec<String>,
    pub seed: u64,
    pub budget: OptimizerBudget,
    /// Fill of the trimmed matrix, which sets the isocline.
    pub trimmed_fill: f64,
    pub isocline_p: Option<f64>,
    pub clamped: bool,
    pub exhaustive: bool,
    pub generations: usize,
    /// Countries x products before trimming.
    pub shape: Shape,
    /// USD value that maps to 1 after normalization.
    pub normalizer: f64,
    /// Packed matrix rows as `0`/`1` strings, top row first.
    pub packed_matrix: Vec<String>,
    pub rankings: DocumentRankings,
}

impl AnalysisDocument {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
