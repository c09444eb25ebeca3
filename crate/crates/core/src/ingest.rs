//! Transaction ingestion: CSV parsing, per-year flow tensors, import/export
//! aggregation and normalization by the shared yearly maximum.
//!
//! Input schema (one record per line, header required):
//!
//! ```text
//! year,product,exporter,importer,value_usd
//! 2008,331,SAU,USA,1000.0
//! ```

use std::collections::{BTreeMap, HashSet};
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::DenseMatrix;

/// Exact header line of the input CSV.
pub const CSV_HEADER: &str = "year,product,exporter,importer,value_usd";

#[derive(Error, Debug)]
pub enum IngestError {
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error("bad header {found:?}, expected {CSV_HEADER:?}")]
    Header { found: String },
    #[error("empty year {0}")]
    EmptyYear(i32),
    #[error("degenerate year {0}: all trade values are zero")]
    DegenerateYear(i32),
    #[error("reading input: {0}")]
    Csv(#[from] csv::Error),
}

/// One trade transaction: `value` USD of `product` shipped from `exporter`
/// to `importer` in `year`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub year: i32,
    pub product: String,
    pub exporter: String,
    pub importer: String,
    pub value: f64,
}

/// Parses the input CSV. Fields are whitespace-trimmed; a header with no data
/// lines yields an empty list.
pub fn parse_records<R: Read>(reader: R) -> Result<Vec<TradeRecord>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(IngestError::Header { found: header });
    }

    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let malformed = |reason: String| IngestError::Malformed { line, reason };

        if row.len() != 5 {
            return Err(malformed(format!(
                "expected 5 columns, found {}",
                row.len()
            )));
        }
        let year: i32 = row[0]
            .parse()
            .map_err(|_| malformed(format!("non-integer year {:?}", &row[0])))?;
        let value: f64 = row[4]
            .parse()
            .map_err(|_| malformed(format!("non-numeric value {:?}", &row[4])))?;
        if !value.is_finite() || value < 0.0 {
            return Err(malformed(format!(
                "value must be finite and nonnegative, got {value}"
            )));
        }
        if row[1].is_empty() {
            return Err(malformed("empty product code".into()));
        }
        if row[2].is_empty() || row[3].is_empty() {
            return Err(malformed("empty country code".into()));
        }
        records.push(TradeRecord {
            year,
            product: row[1].to_string(),
            exporter: row[2].to_string(),
            importer: row[3].to_string(),
            value,
        });
    }
    Ok(records)
}

/// Key of a flow: (product, exporter, importer).
pub type FlowKey = (String, String, String);

/// Sparse per-year transaction tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTensor {
    pub year: i32,
    /// Product codes in first-appearance order.
    pub products: Vec<String>,
    /// Country codes (exporters and importers) in first-appearance order.
    pub countries: Vec<String>,
    pub flows: BTreeMap<FlowKey, f64>,
}

/// Filters `records` to `year` and sums duplicate flows.
///
/// Duplicate values are summed in ascending value order so the total does not
/// depend on record order.
pub fn build_flow_tensor(records: &[TradeRecord], year: i32) -> Result<FlowTensor, IngestError> {
    let mut products = Vec::new();
    let mut countries = Vec::new();
    let mut seen_products = HashSet::new();
    let mut seen_countries = HashSet::new();
    let mut parts: BTreeMap<FlowKey, Vec<f64>> = BTreeMap::new();

    for rec in records.iter().filter(|r| r.year == year) {
        if seen_products.insert(rec.product.as_str()) {
            products.push(rec.product.clone());
        }
        for country in [&rec.exporter, &rec.importer] {
            if seen_countries.insert(country.as_str()) {
                countries.push(country.clone());
            }
        }
        parts
            .entry((
                rec.product.clone(),
                rec.exporter.clone(),
                rec.importer.clone(),
            ))
            .or_default()
            .push(rec.value);
    }

    if parts.is_empty() {
        return Err(IngestError::EmptyYear(year));
    }

    let flows = parts
        .into_iter()
        .map(|(key, mut values)| {
            values.sort_by(f64::total_cmp);
            (key, values.iter().sum())
        })
        .collect();

    Ok(FlowTensor {
        year,
        products,
        countries,
        flows,
    })
}

/// Import and export totals in USD, products × countries.
#[derive(Debug, Clone, PartialEq)]
pub struct UsdMatrices {
    pub year: i32,
    pub products: Vec<String>,
    pub countries: Vec<String>,
    /// `import[p, c]`: everything country `c` bought of product `p`.
    pub import: DenseMatrix,
    /// `export[p, c]`: everything country `c` sold of product `p`.
    pub export: DenseMatrix,
}

/// Sums the tensor over partner countries. Flows are visited in sorted key
/// order so every cell is accumulated in a fixed order.
pub fn aggregate(tensor: &FlowTensor) -> UsdMatrices {
    let product_index = index_of(&tensor.products);
    let country_index = index_of(&tensor.countries);
    let (np, nc) = (tensor.products.len(), tensor.countries.len());
    let mut import = DenseMatrix::zeros(np, nc);
    let mut export = DenseMatrix::zeros(np, nc);

    for ((product, exporter, importer), &value) in &tensor.flows {
        let p = product_index[product.as_str()];
        import.add(p, country_index[importer.as_str()], value);
        export.add(p, country_index[exporter.as_str()], value);
    }

    UsdMatrices {
        year: tensor.year,
        products: tensor.products.clone(),
        countries: tensor.countries.clone(),
        import,
        export,
    }
}

fn index_of(labels: &[String]) -> std::collections::HashMap<&str, usize> {
    labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect()
}

/// Normalized import/export matrices for one year sharing one normalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeMatrixPair {
    pub year: i32,
    pub products: Vec<String>,
    pub countries: Vec<String>,
    pub import_matrix: DenseMatrix,
    pub export_matrix: DenseMatrix,
    /// Largest USD entry over both matrices.
    pub normalizer: f64,
}

/// Divides both matrices by their joint maximum.
pub fn normalize(usd: &UsdMatrices) -> Result<TradeMatrixPair, IngestError> {
    let max = usd
        .import
        .max()
        .into_iter()
        .chain(usd.export.max())
        .fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(IngestError::DegenerateYear(usd.year));
    }
    Ok(TradeMatrixPair {
        year: usd.year,
        products: usd.products.clone(),
        countries: usd.countries.clone(),
        import_matrix: usd.import.map(|v| v / max),
        export_matrix: usd.export.map(|v| v / max),
        normalizer: max,
    })
}

/// Distinct years present in `records`, ascending.
pub fn years_present(records: &[TradeRecord]) -> Vec<i32> {
    let mut years: Vec<i32> = records.iter().map(|r| r.year).collect();
    years.sort_unstable();
    years.dedup();
    years
}
