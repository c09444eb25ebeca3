//! Geometry of the perfect-nestedness isocline `y = 1 - x^p` on the unit
//! square and the per-cell unexpectedness measured against it.
//!
//! Cell `(row, col)` of an `R x C` matrix sits at `x = (col + 0.5) / C`,
//! `y = (row + 0.5) / R`, with `y` growing downwards, so the presence region
//! `y <= 1 - x^p` hugs the top-left corner.

use super::NestednessError;

/// Shape parameter whose presence region has area `fill`.
pub fn isocline_param(fill: f64) -> Result<f64, NestednessError> {
    if !(fill > 0.0 && fill < 1.0) {
        return Err(NestednessError::IsoclineUndefined(fill));
    }
    Ok(fill / (1.0 - fill))
}

/// Height of the isocline at `x`.
#[inline]
pub fn isocline_y(x: f64, p: f64) -> f64 {
    1.0 - x.powf(p)
}

/// Whether the point lies in the region where presences are expected.
#[inline]
pub fn in_presence_region(x: f64, y: f64, p: f64) -> bool {
    y <= isocline_y(x, p)
}

/// Unexpectedness of one cell: zero on the correct side of the isocline,
/// otherwise `(d / D)^2` where `d` is the distance to the isocline along the
/// slope-+1 line through the cell centre and `D` is that line's chord in the
/// unit square.
pub fn cell_unexpectedness(
    row: usize,
    col: usize,
    rows: usize,
    cols: usize,
    present: bool,
    p: f64,
) -> f64 {
    let x = (col as f64 + 0.5) / cols as f64;
    let y = (row as f64 + 0.5) / rows as f64;
    if present == in_presence_region(x, y, p) {
        return 0.0;
    }
    let offset = y - x;
    let chord = 1.0 - offset.abs();
    let cross = diagonal_crossing(offset, p);
    // Both distances scale by sqrt(2) along the diagonal; the ratio drops it.
    let ratio = (x - cross) / chord;
    ratio * ratio
}

/// x-coordinate where `y = x + offset` meets the isocline, for
/// `offset` in `(-1, 1)`.
///
/// `x + offset - (1 - x^p)` is strictly increasing, negative at the chord's
/// left end and nonnegative at its right end, so bisection converges.
pub fn diagonal_crossing(offset: f64, p: f64) -> f64 {
    let g = |x: f64| x + offset - isocline_y(x, p);
    let mut lo = (-offset).max(0.0);
    let mut hi = (1.0 - offset).min(1.0);
    if g(lo) >= 0.0 {
        return lo;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Unexpectedness of every cell position of an `R x C` grid, for both a
/// present and an absent cell.
#[derive(Debug, Clone)]
pub struct UnexpectednessGrid {
    rows: usize,
    cols: usize,
    p: f64,
    present: Vec<f64>,
    absent: Vec<f64>,
}

impl UnexpectednessGrid {
    pub fn new(rows: usize, cols: usize, p: f64) -> Self {
        let mut present = Vec::with_capacity(rows * cols);
        let mut absent = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                present.push(cell_unexpectedness(r, c, rows, cols, true, p));
                absent.push(cell_unexpectedness(r, c, rows, cols, false, p));
            }
        }
        Self {
            rows,
            cols,
            p,
            present,
            absent,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, present: bool) -> f64 {
        let i = row * self.cols + col;
        if present {
            self.present[i]
        } else {
            self.absent[i]
        }
    }
}
