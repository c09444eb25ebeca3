//! Nestedness temperature and the packing search that minimizes it.
//!
//! Temperature follows the isocline convention: each cell of an ordered
//! matrix is placed on the unit square, cells on the wrong side of the curve
//! `y = 1 - x^p` (with `p = fill / (1 - fill)`) contribute their squared
//! relative diagonal distance to it, and the mean contribution is scaled so
//! that [`temperature::U_MAX`] maps to 100.

mod assignment;
pub mod isocline;
mod optimizer;
pub mod temperature;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::DenseMatrix;
use crate::mutualistic::{trim_empty, BinaryMatrix, MatrixError, Trimmed};

pub use isocline::{cell_unexpectedness, isocline_param, UnexpectednessGrid};
pub use temperature::{temperature, Scorer, TemperatureEval, U_MAX};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum NestednessError {
    #[error("isocline undefined for fill {0}")]
    IsoclineUndefined(f64),
    #[error("zero-size matrix")]
    EmptyMatrix,
    #[error("matrix has no presences")]
    NoPresences,
    #[error("invalid ordering: {0}")]
    BadOrdering(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Row and column arrangement: packed row `i` is original row `row_perm[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ordering {
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
}

impl Ordering {
    pub fn identity(rows: usize, cols: usize) -> Self {
        Self {
            row_perm: (0..rows).collect(),
            col_perm: (0..cols).collect(),
        }
    }

    pub fn check(&self, rows: usize, cols: usize) -> Result<(), NestednessError> {
        if !is_bijection(&self.row_perm, rows) {
            return Err(NestednessError::BadOrdering(format!(
                "row_perm is not a permutation of 0..{rows}"
            )));
        }
        if !is_bijection(&self.col_perm, cols) {
            return Err(NestednessError::BadOrdering(format!(
                "col_perm is not a permutation of 0..{cols}"
            )));
        }
        Ok(())
    }
}

fn is_bijection(perm: &[usize], n: usize) -> bool {
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    perm.iter()
        .all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

/// Stopping rules and sizes for the packing search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimizerBudget {
    pub population: usize,
    pub elitism: usize,
    pub generations: usize,
    /// Stop after this many generations without improvement.
    pub stagnation: usize,
}

impl Default for OptimizerBudget {
    fn default() -> Self {
        Self {
            population: 30,
            elitism: 3,
            generations: 200,
            stagnation: 50,
        }
    }
}

impl OptimizerBudget {
    /// Reduced budget for null ensembles.
    pub fn fast() -> Self {
        Self {
            generations: 50,
            ..Self::default()
        }
    }

    /// Orderings the GA would evaluate at most; smaller spaces are enumerated.
    pub fn evaluations(&self) -> usize {
        self.population.saturating_mul(self.generations.max(1))
    }
}

/// Outcome of packing one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct NestednessResult {
    pub ordering: Ordering,
    pub temperature: f64,
    /// `1 - temperature / 100`.
    pub eta: f64,
    /// Fill of the packed matrix, which sets the isocline.
    pub fill: f64,
    /// Per-cell unexpectedness in packed coordinates; empty when fill is 1.
    pub unexpectedness: DenseMatrix,
    /// `None` when the matrix is completely filled.
    pub isocline_p: Option<f64>,
    pub clamped: bool,
    pub generations: usize,
    /// Whether the optimum came from full enumeration.
    pub exhaustive: bool,
}

impl NestednessResult {
    /// `q` rearranged into packed order.
    pub fn packed(&self, q: &BinaryMatrix) -> BinaryMatrix {
        q.permuted(&self.ordering.row_perm, &self.ordering.col_perm)
    }
}

/// Searches row/column orderings of `q` that minimize temperature.
///
/// The search runs on the matrix sorted by label, so the packed label sequence
/// does not depend on the order rows and columns arrive in. Deterministic for
/// fixed `(q, budget, seed)`.
pub fn pack(
    q: &BinaryMatrix,
    budget: &OptimizerBudget,
    seed: u64,
) -> Result<NestednessResult, NestednessError> {
    pack_traced(q, budget, seed).map(|(result, _)| result)
}

/// [`pack`], also returning the best-so-far temperature per generation.
pub fn pack_traced(
    q: &BinaryMatrix,
    budget: &OptimizerBudget,
    seed: u64,
) -> Result<(NestednessResult, Vec<f64>), NestednessError> {
    let canon_rows = argsort(&q.row_labels);
    let canon_cols = argsort(&q.col_labels);
    let canonical = q.permuted(&canon_rows, &canon_cols);
    let scorer = Scorer::new(&canonical)?;

    let found = if scorer.isocline_p().is_none() {
        None
    } else {
        Some(optimizer::search(&scorer, budget, seed))
    };

    let best_score = found.as_ref().map_or(0.0, |s| s.score);
    let (ordering, generations, exhaustive, history) = match found {
        // Completely filled: nothing to order.
        None => (Ordering::identity(q.rows(), q.cols()), 0, false, vec![0.0]),
        Some(s) => (
            Ordering {
                row_perm: s.ordering.row_perm.iter().map(|&i| canon_rows[i]).collect(),
                col_perm: s.ordering.col_perm.iter().map(|&j| canon_cols[j]).collect(),
            },
            s.generations,
            s.exhaustive,
            s.history,
        ),
    };

    let eval = Scorer::new(q)?.evaluate(&ordering);
    debug_assert_eq!(eval.temperature, best_score);
    Ok((
        NestednessResult {
            ordering,
            temperature: eval.temperature,
            eta: 1.0 - eval.temperature / 100.0,
            fill: eval.fill,
            unexpectedness: eval.unexpectedness,
            isocline_p: eval.isocline_p,
            clamped: eval.clamped,
            generations,
            exhaustive,
        },
        history,
    ))
}

fn argsort(labels: &[String]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..labels.len()).collect();
    idx.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
    idx
}

/// Trimmed-and-packed analysis of a mutualistic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub result: NestednessResult,
    /// Matrix after removing empty lines; `result.ordering` indexes into it.
    pub trimmed: BinaryMatrix,
    pub dropped_rows: Vec<String>,
    pub dropped_cols: Vec<String>,
}

impl Analysis {
    pub fn packed(&self) -> BinaryMatrix {
        self.result.packed(&self.trimmed)
    }

    /// Row labels top to bottom in packed order.
    pub fn row_order(&self) -> Vec<String> {
        self.result
            .ordering
            .row_perm
            .iter()
            .map(|&r| self.trimmed.row_labels[r].clone())
            .collect()
    }

    /// Column labels left to right in packed order.
    pub fn col_order(&self) -> Vec<String> {
        self.result
            .ordering
            .col_perm
            .iter()
            .map(|&c| self.trimmed.col_labels[c].clone())
            .collect()
    }
}

/// Removes empty lines, then packs.
pub fn analyze(
    q: &BinaryMatrix,
    budget: &OptimizerBudget,
    seed: u64,
) -> Result<Analysis, NestednessError> {
    let Trimmed {
        matrix,
        dropped_rows,
        dropped_cols,
    } = trim_empty(q)?;
    let result = pack(&matrix, budget, seed)?;
    Ok(Analysis {
        result,
        trimmed: matrix,
        dropped_rows,
        dropped_cols,
    })
}
