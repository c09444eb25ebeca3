//! Matrix temperature for a fixed row/column ordering.

use super::isocline::{isocline_param, UnexpectednessGrid};
use super::{NestednessError, Ordering};
use crate::matrix::DenseMatrix;
use crate::mutualistic::BinaryMatrix;

/// Mean unexpectedness of a maximally disordered matrix; maps to T = 100.
pub const U_MAX: f64 = 0.04145;

/// Temperature of one ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureEval {
    pub temperature: f64,
    /// Set when the raw value exceeded 100 and was clamped.
    pub clamped: bool,
    /// Isocline shape, `None` for a completely filled matrix.
    pub isocline_p: Option<f64>,
    pub fill: f64,
    /// Per-cell unexpectedness in packed coordinates; empty when fill is 1.
    pub unexpectedness: DenseMatrix,
}

/// Evaluates orderings of one matrix against a precomputed grid.
#[derive(Debug, Clone)]
pub struct Scorer<'a> {
    matrix: &'a BinaryMatrix,
    grid: Option<UnexpectednessGrid>,
    fill: f64,
}

impl<'a> Scorer<'a> {
    pub fn new(matrix: &'a BinaryMatrix) -> Result<Self, NestednessError> {
        let size = matrix.rows() * matrix.cols();
        if size == 0 {
            return Err(NestednessError::EmptyMatrix);
        }
        let ones = matrix.ones();
        if ones == 0 {
            return Err(NestednessError::NoPresences);
        }
        let fill = ones as f64 / size as f64;
        let grid = if ones == size {
            None
        } else {
            Some(UnexpectednessGrid::new(
                matrix.rows(),
                matrix.cols(),
                isocline_param(fill)?,
            ))
        };
        Ok(Self { matrix, grid, fill })
    }

    pub fn fill(&self) -> f64 {
        self.fill
    }

    pub fn isocline_p(&self) -> Option<f64> {
        self.grid.as_ref().map(UnexpectednessGrid::p)
    }

    pub fn matrix(&self) -> &BinaryMatrix {
        self.matrix
    }

    pub(crate) fn grid(&self) -> Option<&UnexpectednessGrid> {
        self.grid.as_ref()
    }

    /// Sum of cell unexpectedness, visited row-major in packed order.
    pub fn u_sum(&self, rows: &[usize], cols: &[usize]) -> f64 {
        let Some(grid) = &self.grid else {
            return 0.0;
        };
        let mut total = 0.0;
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                total += grid.get(i, j, self.matrix.get(r, c));
            }
        }
        total
    }

    /// Unclamped temperature.
    pub fn raw_temperature(&self, rows: &[usize], cols: &[usize]) -> f64 {
        let size = (self.matrix.rows() * self.matrix.cols()) as f64;
        100.0 / U_MAX * self.u_sum(rows, cols) / size
    }

    /// Temperature clamped to `[0, 100]`.
    pub fn score(&self, rows: &[usize], cols: &[usize]) -> f64 {
        self.raw_temperature(rows, cols).min(100.0)
    }

    pub fn evaluate(&self, ordering: &Ordering) -> TemperatureEval {
        let raw = self.raw_temperature(&ordering.row_perm, &ordering.col_perm);
        let unexpectedness = match &self.grid {
            None => DenseMatrix::zeros(0, 0),
            Some(grid) => {
                let mut u = DenseMatrix::zeros(self.matrix.rows(), self.matrix.cols());
                for (i, &r) in ordering.row_perm.iter().enumerate() {
                    for (j, &c) in ordering.col_perm.iter().enumerate() {
                        u.set(i, j, grid.get(i, j, self.matrix.get(r, c)));
                    }
                }
                u
            }
        };
        TemperatureEval {
            temperature: raw.min(100.0),
            clamped: raw > 100.0,
            isocline_p: self.isocline_p(),
            fill: self.fill,
            unexpectedness,
        }
    }
}

/// Temperature of `q` under `ordering`.
pub fn temperature(
    q: &BinaryMatrix,
    ordering: &Ordering,
) -> Result<TemperatureEval, NestednessError> {
    ordering.check(q.rows(), q.cols())?;
    Ok(Scorer::new(q)?.evaluate(ordering))
}
