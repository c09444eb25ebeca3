//! Rankings of countries and products: by position in the packed matrix
//! ("ecolo") and by monetary volume, plus label-joined multi-year series.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::DenseMatrix;
use crate::mutualistic::Flow;
use crate::nestedness::Analysis;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum RankError {
    #[error("cannot join rank tables of different kinds: {0}")]
    MixedTables(String),
    #[error("no rank tables to join")]
    NoTables,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ecolo,
    Volume,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Ecolo => "ecolo",
            Scheme::Volume => "volume",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Countries,
    Products,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Countries => "countries",
            Axis::Products => "products",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub rank: usize,
    pub label: String,
    /// Packed position (ecolo) or USD total (volume).
    pub score: f64,
}

/// Ranks 1..N over unique labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub year: i32,
    pub flow: Flow,
    pub scheme: Scheme,
    pub axis: Axis,
    pub entries: Vec<RankEntry>,
}

impl RankTable {
    fn from_scored(
        year: i32,
        flow: Flow,
        scheme: Scheme,
        axis: Axis,
        scored: impl IntoIterator<Item = (String, f64)>,
    ) -> Self {
        let entries = scored
            .into_iter()
            .enumerate()
            .map(|(i, (label, score))| RankEntry {
                rank: i + 1,
                label,
                score,
            })
            .collect();
        Self {
            year,
            flow,
            scheme,
            axis,
            entries,
        }
    }

    pub fn rank_of(&self, label: &str) -> Option<usize> {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .map(|e| e.rank)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.label.as_str()).collect()
    }

    pub fn top(&self, k: usize) -> &[RankEntry] {
        &self.entries[..k.min(self.entries.len())]
    }

    /// `rank,label,score` CSV with header.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["rank", "label", "score"])
            .expect("in-memory write");
        for e in &self.entries {
            w.write_record([e.rank.to_string(), e.label.clone(), e.score.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

/// Labels sorted by descending volume, ties by label.
fn by_volume<'a>(labels: impl IntoIterator<Item = (&'a str, f64)>) -> Vec<(String, f64)> {
    let mut v: Vec<(String, f64)> = labels
        .into_iter()
        .map(|(l, s)| (l.to_string(), s))
        .collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v
}

/// Country and product rankings from a packed analysis: top row and leftmost
/// column rank first. Lines removed as empty follow, by descending volume.
pub fn ecolo_rank(
    analysis: &Analysis,
    year: i32,
    flow: Flow,
    row_volumes: &HashMap<String, f64>,
    col_volumes: &HashMap<String, f64>,
) -> (RankTable, RankTable) {
    let table = |axis, packed: Vec<String>, dropped: &[String], volumes: &HashMap<String, f64>| {
        let tail = by_volume(
            dropped
                .iter()
                .map(|l| (l.as_str(), volumes.get(l).copied().unwrap_or(0.0))),
        );
        let scored = packed
            .into_iter()
            .chain(tail.into_iter().map(|(l, _)| l))
            .enumerate()
            .map(|(pos, l)| (l, pos as f64));
        RankTable::from_scored(year, flow, Scheme::Ecolo, axis, scored)
    };
    (
        table(
            Axis::Countries,
            analysis.row_order(),
            &analysis.dropped_rows,
            row_volumes,
        ),
        table(
            Axis::Products,
            analysis.col_order(),
            &analysis.dropped_cols,
            col_volumes,
        ),
    )
}

/// Per-label totals of a products × countries USD matrix along `axis`.
pub fn axis_totals(
    usd: &DenseMatrix,
    products: &[String],
    countries: &[String],
    axis: Axis,
) -> HashMap<String, f64> {
    let (labels, sums) = match axis {
        Axis::Countries => (countries, usd.col_sums()),
        Axis::Products => (products, usd.row_sums()),
    };
    labels.iter().cloned().zip(sums).collect()
}

/// Ranks labels along `axis` by total USD, largest first, ties by label.
pub fn volume_rank(
    usd: &DenseMatrix,
    products: &[String],
    countries: &[String],
    axis: Axis,
    year: i32,
    flow: Flow,
) -> RankTable {
    let totals = axis_totals(usd, products, countries, axis);
    let scored = by_volume(totals.iter().map(|(l, &v)| (l.as_str(), v)));
    RankTable::from_scored(year, flow, Scheme::Volume, axis, scored)
}

/// One line of the long-format series output; `rank` is `None` when the
/// label is missing from that year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub year: i32,
    pub rank: Option<usize>,
    pub label: String,
    pub scheme: Scheme,
}

/// Rank tables of one kind across years, joined on label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSeries {
    pub scheme: Scheme,
    pub flow: Flow,
    pub axis: Axis,
    pub years: Vec<i32>,
    pub tables: Vec<RankTable>,
    /// Rank of each label per year, aligned with `years`.
    pub index: BTreeMap<String, Vec<Option<usize>>>,
}

/// Joins tables that share scheme, flow and axis into a year-ordered series.
pub fn rank_series(mut tables: Vec<RankTable>) -> Result<RankSeries, RankError> {
    let first = tables.first().ok_or(RankError::NoTables)?;
    let (scheme, flow, axis) = (first.scheme, first.flow, first.axis);
    if let Some(odd) = tables
        .iter()
        .find(|t| (t.scheme, t.flow, t.axis) != (scheme, flow, axis))
    {
        return Err(RankError::MixedTables(format!(
            "{}/{}/{} vs {}/{}/{}",
            scheme.as_str(),
            flow,
            axis.as_str(),
            odd.scheme.as_str(),
            odd.flow,
            odd.axis.as_str()
        )));
    }
    tables.sort_by_key(|t| t.year);
    let years: Vec<i32> = tables.iter().map(|t| t.year).collect();

    let mut index: BTreeMap<String, Vec<Option<usize>>> = BTreeMap::new();
    for (y, table) in tables.iter().enumerate() {
        for e in &table.entries {
            index
                .entry(e.label.clone())
                .or_insert_with(|| vec![None; tables.len()])[y] = Some(e.rank);
        }
    }

    Ok(RankSeries {
        scheme,
        flow,
        axis,
        years,
        tables,
        index,
    })
}

impl RankSeries {
    /// Top-`k` rows per year, followed in each year by empty-rank rows for
    /// labels that reach the top `k` in some year but are absent from this one.
    pub fn top_k_rows(&self, k: usize) -> Vec<SeriesRow> {
        let tracked: BTreeSet<&str> = self
            .tables
            .iter()
            .flat_map(|t| t.top(k).iter().map(|e| e.label.as_str()))
            .collect();
        let mut rows = Vec::new();
        for (y, table) in self.tables.iter().enumerate() {
            rows.extend(table.top(k).iter().map(|e| SeriesRow {
                year: table.year,
                rank: Some(e.rank),
                label: e.label.clone(),
                scheme: self.scheme,
            }));
            rows.extend(
                tracked
                    .iter()
                    .filter(|l| self.index[**l][y].is_none())
                    .map(|l| SeriesRow {
                        year: table.year,
                        rank: None,
                        label: l.to_string(),
                        scheme: self.scheme,
                    }),
            );
        }
        rows
    }
}

/// Long-format `year,rank,label,scheme` CSV; missing ranks are empty fields.
pub fn series_csv(rows: &[SeriesRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["year", "rank", "label", "scheme"])
        .expect("in-memory write");
    for r in rows {
        w.write_record([
            r.year.to_string(),
            r.rank.map(|k| k.to_string()).unwrap_or_default(),
            r.label.clone(),
            r.scheme.as_str().to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}
