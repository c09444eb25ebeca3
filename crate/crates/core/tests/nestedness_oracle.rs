mod common;

use common::*;
use ecotrade::nestedness::isocline::{
    cell_unexpectedness, diagonal_crossing, isocline_param, isocline_y,
};
use ecotrade::nestedness::temperature::temperature;
use ecotrade::nestedness::{pack_traced, Ordering};
use ecotrade::null_models::random_matrix;
use ecotrade::{analyze, pack, BinaryMatrix, OptimizerBudget};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn isocline_area_equals_fill() {
    // Substituting x = s^7 makes the integrand a polynomial, so Simpson's
    // rule is accurate far below the tolerance.
    let fill = 0.3;
    let p = isocline_param(fill).unwrap();
    let k = 7.0;
    let f = |s: f64| isocline_y(s.powf(k), p) * k * s.powf(k - 1.0);
    let n = 2000;
    let h = 1.0 / n as f64;
    let mut sum = f(0.0) + f(1.0);
    for i in 1..n {
        sum += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let area = sum * h / 3.0;
    assert!((area - fill).abs() <= 1e-9, "area {area}");
}

#[test]
fn centre_cell_crossing_matches_oracle() {
    for fill in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let p = isocline_param(fill).unwrap();
        let x = diagonal_crossing(0.0, p);
        let t = oracle_crossing_t(0.5, 0.5, p);
        assert!(
            (x - (0.5 + t)).abs() < 1e-9,
            "fill {fill}: {x} vs {}",
            0.5 + t
        );
        // on the curve
        assert!((x - isocline_y(x, p)).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn cell_unexpectedness_matches_oracle(
        rows in 1usize..30,
        cols in 1usize..30,
        fill in 0.02f64..0.98,
        rf in 0.0f64..1.0,
        cf in 0.0f64..1.0,
        present: bool,
    ) {
        let row = ((rf * rows as f64) as usize).min(rows - 1);
        let col = ((cf * cols as f64) as usize).min(cols - 1);
        let p = fill / (1.0 - fill);
        let lib = cell_unexpectedness(row, col, rows, cols, present, p);
        let oracle = oracle_cell_u(row, col, rows, cols, present, p);
        prop_assert!((lib - oracle).abs() < 1e-9, "{lib} vs {oracle}");
    }

    #[test]
    fn temperature_matches_oracle(seed: u64, rows in 2usize..12, cols in 2usize..12, fill in 0.1f64..0.9) {
        let q = random_matrix(rows, cols, fill, seed).unwrap();
        prop_assume!(q.ones() < rows * cols);
        let t = temperature(&q, &Ordering::identity(rows, cols)).unwrap().temperature;
        prop_assert!((t - oracle_temperature(&q)).abs() < 1e-9);
    }
}

#[test]
fn checkerboard_4x4() {
    let q = BinaryMatrix::from_strings(&["1010", "0101", "1010", "0101"]).unwrap();
    let eval = temperature(&q, &Ordering::identity(4, 4)).unwrap();
    assert!((eval.temperature - oracle_temperature(&q)).abs() < 1e-9);
    assert!(eval.temperature > 10.0);
    let packed = pack(&q, &OptimizerBudget::default(), 0).unwrap();
    assert!((packed.temperature - brute_force_min(&q)).abs() < 1e-9);
    assert!(packed.temperature < eval.temperature);
}

#[test]
fn staircase_10x10_is_cold() {
    let q = staircase(10, 0.4);
    let r = pack(&q, &OptimizerBudget::default(), 0).unwrap();
    assert!(r.temperature <= 1.0, "T = {}", r.temperature);
}

#[test]
fn full_matrix_is_zero_temperature() {
    let q = BinaryMatrix::from_strings(&["111", "111"]).unwrap();
    let r = pack(&q, &OptimizerBudget::default(), 0).unwrap();
    assert_eq!(r.temperature, 0.0);
    assert_eq!(r.eta, 1.0);
    assert_eq!(r.isocline_p, None);
}

#[test]
fn small_random_matrices_reach_brute_force_minimum() {
    for seed in 0..40u64 {
        let rows = 3 + (seed % 3) as usize;
        let cols = 3 + (seed / 3 % 3) as usize;
        let q = random_matrix(rows, cols, 0.3 + 0.1 * (seed % 5) as f64, seed).unwrap();
        if q.ones() == rows * cols {
            continue;
        }
        let r = pack(&q, &OptimizerBudget::default(), seed).unwrap();
        let best = brute_force_min(&q);
        assert!(
            (r.temperature - best).abs() < 1e-9,
            "seed {seed}: {} vs {best}",
            r.temperature
        );
    }
}

#[test]
fn label_permutation_invariance() {
    let q = random_matrix(14, 11, 0.35, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut rp: Vec<usize> = (0..q.rows()).collect();
    let mut cp: Vec<usize> = (0..q.cols()).collect();
    rp.shuffle(&mut rng);
    cp.shuffle(&mut rng);
    let shuffled = q.permuted(&rp, &cp);

    let budget = OptimizerBudget::default();
    let a = analyze(&q, &budget, 3).unwrap();
    let b = analyze(&shuffled, &budget, 3).unwrap();
    assert_eq!(a.result.temperature, b.result.temperature);
    assert_eq!(a.row_order(), b.row_order());
    assert_eq!(a.col_order(), b.col_order());
    assert_eq!(a.packed(), b.packed());
}

#[test]
fn genetic_history_is_monotone() {
    let q = random_matrix(30, 25, 0.3, 11).unwrap();
    let (result, history) = pack_traced(&q, &OptimizerBudget::default(), 1).unwrap();
    assert!(!result.exhaustive);
    assert!(history.len() >= 2);
    for w in history.windows(2) {
        assert!(w[1] <= w[0], "history increased: {} -> {}", w[0], w[1]);
    }
    assert!(result.temperature <= *history.last().unwrap() + 1e-12);
}

#[test]
fn same_seed_same_result() {
    let q = random_matrix(25, 20, 0.4, 2).unwrap();
    let budget = OptimizerBudget::default();
    let a = pack(&q, &budget, 9).unwrap();
    let b = pack(&q, &budget, 9).unwrap();
    assert_eq!(a, b);
}

#[test]
fn eta_complements_temperature() {
    for seed in 0..10u64 {
        let q = random_matrix(12, 9, 0.2 + 0.06 * seed as f64, seed).unwrap();
        let r = pack(&q, &OptimizerBudget::fast(), seed).unwrap();
        assert!((r.eta + r.temperature / 100.0 - 1.0).abs() < 1e-12);
        assert!((0.0..=100.0).contains(&r.temperature));
    }
}

#[test]
fn packed_result_reports_its_own_temperature() {
    let q = random_matrix(16, 13, 0.3, 4).unwrap();
    let r = pack(&q, &OptimizerBudget::default(), 0).unwrap();
    let again = temperature(&q, &r.ordering).unwrap();
    assert_eq!(again.temperature, r.temperature);
    assert!((oracle_temperature(&r.packed(&q)) - r.temperature).abs() < 1e-9);
}
