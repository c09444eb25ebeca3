//! Helpers shared by the integration tests, including a reference
//! temperature implementation written independently of the library.

#![allow(dead_code)]

use std::path::PathBuf;

use ecotrade::BinaryMatrix;

/// Normalizing constant of the temperature scale.
pub const U_MAX: f64 = 0.04145;

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/synthetic_wtn.csv")
}

/// Perfectly nested `n x n` matrix: a cell is present iff its centre lies
/// on or above the isocline for `target_fill`.
pub fn staircase(n: usize, target_fill: f64) -> BinaryMatrix {
    let p = target_fill / (1.0 - target_fill);
    let cells = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .map(|(r, c)| {
            let x = (c as f64 + 0.5) / n as f64;
            let y = (r as f64 + 0.5) / n as f64;
            y <= 1.0 - x.powf(p)
        })
        .collect();
    BinaryMatrix::from_bits(n, n, cells).unwrap()
}

/// Root of `g(t) = (y0 + t) - 1 + (x0 + t)^p` on the part of the diagonal
/// through `(x0, y0)` that lies in the unit square, by the Illinois variant
/// of regula falsi.
pub fn oracle_crossing_t(x0: f64, y0: f64, p: f64) -> f64 {
    let g = |t: f64| (y0 + t) - 1.0 + (x0 + t).max(0.0).powf(p);
    // Clip the line to the square: x0 + t and y0 + t both in [0, 1].
    let mut a = -(x0.min(y0));
    let mut b = 1.0 - x0.max(y0);
    let (mut ga, mut gb) = (g(a), g(b));
    assert!(ga <= 0.0 && gb >= 0.0, "no sign change on the chord");
    let mut side = 0;
    for _ in 0..500 {
        let t = (a * gb - b * ga) / (gb - ga);
        let gt = g(t);
        if gt == 0.0 || (b - a).abs() < 1e-15 {
            return t;
        }
        if (gt > 0.0) == (gb > 0.0) {
            b = t;
            gb = gt;
            if side == 1 {
                ga /= 2.0;
            }
            side = 1;
        } else {
            a = t;
            ga = gt;
            if side == -1 {
                gb /= 2.0;
            }
            side = -1;
        }
    }
    (a + b) / 2.0
}

/// Length of the diagonal through `(x0, y0)` inside the unit square,
/// measured along x.
pub fn oracle_chord(x0: f64, y0: f64) -> f64 {
    let enter = -(x0.min(y0));
    let exit = 1.0 - x0.max(y0);
    exit - enter
}

pub fn oracle_cell_u(
    row: usize,
    col: usize,
    rows: usize,
    cols: usize,
    present: bool,
    p: f64,
) -> f64 {
    let x0 = (col as f64 + 0.5) / cols as f64;
    let y0 = (row as f64 + 0.5) / rows as f64;
    let inside = y0 + x0.powf(p) <= 1.0;
    if inside == present {
        return 0.0;
    }
    let t = oracle_crossing_t(x0, y0, p);
    (t / oracle_chord(x0, y0)).powi(2)
}

/// Reference temperature of `q` as laid out (clamped to `[0, 100]`).
pub fn oracle_temperature(q: &BinaryMatrix) -> f64 {
    let (r, c) = (q.rows(), q.cols());
    let fill = q.ones() as f64 / (r * c) as f64;
    if fill >= 1.0 {
        return 0.0;
    }
    let p = fill / (1.0 - fill);
    let mut sum = 0.0;
    for i in 0..r {
        for j in 0..c {
            sum += oracle_cell_u(i, j, r, c, q.get(i, j), p);
        }
    }
    (100.0 / U_MAX * sum / (r * c) as f64).min(100.0)
}

/// Per-cell oracle unexpectedness for presences and absences, indexed
/// `[row * cols + col]`.
pub fn oracle_grid(rows: usize, cols: usize, p: f64) -> (Vec<f64>, Vec<f64>) {
    let mut present = Vec::with_capacity(rows * cols);
    let mut absent = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            present.push(oracle_cell_u(i, j, rows, cols, true, p));
            absent.push(oracle_cell_u(i, j, rows, cols, false, p));
        }
    }
    (present, absent)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Smallest temperature over every row and column ordering of a small
/// matrix, from the oracle grid.
pub fn brute_force_min(q: &BinaryMatrix) -> f64 {
    let (r, c) = (q.rows(), q.cols());
    let fill = q.ones() as f64 / (r * c) as f64;
    if fill >= 1.0 {
        return 0.0;
    }
    let (present, absent) = oracle_grid(r, c, fill / (1.0 - fill));
    brute_force_min_with(q, &present, &absent, &permutations(r), &permutations(c))
}

pub fn brute_force_min_with(
    q: &BinaryMatrix,
    present: &[f64],
    absent: &[f64],
    row_perms: &[Vec<usize>],
    col_perms: &[Vec<usize>],
) -> f64 {
    let (r, c) = (q.rows(), q.cols());
    let mut best = f64::INFINITY;
    for rp in row_perms {
        for cp in col_perms {
            let mut sum = 0.0;
            for (i, &ri) in rp.iter().enumerate() {
                for (j, &cj) in cp.iter().enumerate() {
                    let k = i * c + j;
                    sum += if q.get(ri, cj) { present[k] } else { absent[k] };
                }
            }
            best = best.min(sum);
        }
    }
    (100.0 / U_MAX * best / (r * c) as f64).min(100.0)
}
