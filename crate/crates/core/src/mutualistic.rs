//! Binary mutualistic matrices: thresholding of normalized trade values,
//! fill fraction and removal of empty lines.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::TradeMatrixPair;
use crate::matrix::DenseMatrix;

/// Workhorse trade threshold.
pub const DEFAULT_MU: f64 = 1e-3;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum MatrixError {
    #[error("threshold mu must lie in (0, 1), got {0}")]
    BadThreshold(f64),
    #[error("zero-size matrix")]
    Empty,
    #[error("nothing to analyze: matrix has no nonzero elements")]
    NothingToAnalyze,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Direction of trade a matrix describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flow {
    Import,
    Export,
}

impl Flow {
    pub fn as_str(self) -> &'static str {
        match self {
            Flow::Import => "import",
            Flow::Export => "export",
        }
    }
}

impl fmt::Display for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Presence/absence matrix with labelled rows (countries) and columns
/// (products).
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMatrix {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    cells: Vec<bool>,
    /// Threshold that produced the matrix, if it came from trade data.
    pub mu: Option<f64>,
    pub flow: Option<Flow>,
}

impl BinaryMatrix {
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        cells: Vec<bool>,
    ) -> Result<Self, MatrixError> {
        if cells.len() != row_labels.len() * col_labels.len() {
            return Err(MatrixError::Shape(format!(
                "{} cells for {}x{} labels",
                cells.len(),
                row_labels.len(),
                col_labels.len()
            )));
        }
        Ok(Self {
            row_labels,
            col_labels,
            cells,
            mu: None,
            flow: None,
        })
    }

    /// Unlabelled matrix; rows are named `r0, r1, ...` and columns `c0, ...`.
    ///
    /// Labels are zero-padded so that lexicographic order equals index order.
    pub fn from_bits(rows: usize, cols: usize, cells: Vec<bool>) -> Result<Self, MatrixError> {
        Self::new(numbered("r", rows), numbered("c", cols), cells)
    }

    /// Parses rows of `0`/`1` characters, e.g. `["110", "100"]`.
    pub fn from_strings(rows: &[&str]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MatrixError::Shape("ragged rows".into()));
        }
        let cells = rows
            .iter()
            .flat_map(|r| r.bytes())
            .map(|b| match b {
                b'1' => Ok(true),
                b'0' => Ok(false),
                _ => Err(MatrixError::Shape(format!("bad cell {:?}", b as char))),
            })
            .collect::<Result<_, _>>()?;
        Self::from_bits(rows.len(), cols, cells)
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.cols() + col]
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn ones(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    pub fn row_degrees(&self) -> Vec<usize> {
        (0..self.rows())
            .map(|r| (0..self.cols()).filter(|&c| self.get(r, c)).count())
            .collect()
    }

    pub fn col_degrees(&self) -> Vec<usize> {
        (0..self.cols())
            .map(|c| (0..self.rows()).filter(|&r| self.get(r, c)).count())
            .collect()
    }

    /// Reorders rows and columns: new row `i` is old row `row_perm[i]`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        let cells = row_perm
            .iter()
            .flat_map(|&r| col_perm.iter().map(move |&c| (r, c)))
            .map(|(r, c)| self.get(r, c))
            .collect();
        Self {
            row_labels: row_perm
                .iter()
                .map(|&r| self.row_labels[r].clone())
                .collect(),
            col_labels: col_perm
                .iter()
                .map(|&c| self.col_labels[c].clone())
                .collect(),
            cells,
            mu: self.mu,
            flow: self.flow,
        }
    }

    /// Rows rendered as `0`/`1` strings.
    pub fn to_strings(&self) -> Vec<String> {
        (0..self.rows())
            .map(|r| {
                (0..self.cols())
                    .map(|c| if self.get(r, c) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("{prefix}{i:0width$}")).collect()
}

/// Binarizes a products × countries matrix at `mu` and transposes it so rows
/// are countries and columns are products. Cells equal to `mu` become 1.
pub fn threshold(
    values: &DenseMatrix,
    products: &[String],
    countries: &[String],
    mu: f64,
    flow: Flow,
) -> Result<BinaryMatrix, MatrixError> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(MatrixError::BadThreshold(mu));
    }
    if values.rows() != products.len() || values.cols() != countries.len() {
        return Err(MatrixError::Shape(format!(
            "{}x{} values for {} products, {} countries",
            values.rows(),
            values.cols(),
            products.len(),
            countries.len()
        )));
    }
    let cells = (0..countries.len())
        .flat_map(|c| (0..products.len()).map(move |p| (p, c)))
        .map(|(p, c)| values.get(p, c) >= mu)
        .collect();
    let mut q = BinaryMatrix::new(countries.to_vec(), products.to_vec(), cells)?;
    q.mu = Some(mu);
    q.flow = Some(flow);
    Ok(q)
}

/// Thresholds the import or export half of a normalized pair.
pub fn threshold_pair(
    pair: &TradeMatrixPair,
    flow: Flow,
    mu: f64,
) -> Result<BinaryMatrix, MatrixError> {
    let values = match flow {
        Flow::Import => &pair.import_matrix,
        Flow::Export => &pair.export_matrix,
    };
    threshold(values, &pair.products, &pair.countries, mu, flow)
}

/// Share of ones in the (untrimmed) matrix.
pub fn fill_fraction(q: &BinaryMatrix) -> Result<f64, MatrixError> {
    let size = q.rows() * q.cols();
    if size == 0 {
        return Err(MatrixError::Empty);
    }
    Ok(q.ones() as f64 / size as f64)
}

/// Result of [`trim_empty`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trimmed {
    pub matrix: BinaryMatrix,
    pub dropped_rows: Vec<String>,
    pub dropped_cols: Vec<String>,
}

/// Removes all-zero rows and columns, keeping the order of the survivors.
pub fn trim_empty(q: &BinaryMatrix) -> Result<Trimmed, MatrixError> {
    if q.ones() == 0 {
        return Err(MatrixError::NothingToAnalyze);
    }
    let (keep_rows, drop_rows): (Vec<usize>, Vec<usize>) =
        (0..q.rows()).partition(|&r| (0..q.cols()).any(|c| q.get(r, c)));
    let (keep_cols, drop_cols): (Vec<usize>, Vec<usize>) =
        (0..q.cols()).partition(|&c| (0..q.rows()).any(|r| q.get(r, c)));
    Ok(Trimmed {
        matrix: q.permuted(&keep_rows, &keep_cols),
        dropped_rows: drop_rows.iter().map(|&r| q.row_labels[r].clone()).collect(),
        dropped_cols: drop_cols.iter().map(|&c| q.col_labels[c].clone()).collect(),
    })
}
