//! Random binary matrices with fixed shape and number of presences, and the
//! temperature distribution of an ensemble of them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mutualistic::BinaryMatrix;
use crate::nestedness::{analyze, NestednessError, OptimizerBudget};

/// Histogram bin width in temperature units.
pub const BIN_WIDTH: f64 = 1.0;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum NullModelError {
    #[error("empty null matrix: fill {fill} of {rows}x{cols} rounds to zero presences")]
    EmptyNullMatrix { rows: usize, cols: usize, fill: f64 },
    #[error("invalid null-model parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Nestedness(#[from] NestednessError),
}

/// Seed of realization `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Places exactly `round(fill * rows * cols)` presences uniformly at random.
pub fn random_matrix(
    rows: usize,
    cols: usize,
    fill: f64,
    seed: u64,
) -> Result<BinaryMatrix, NullModelError> {
    if rows == 0 || cols == 0 {
        return Err(NullModelError::BadParams(format!("shape {rows}x{cols}")));
    }
    if !(fill > 0.0 && fill <= 1.0) {
        return Err(NullModelError::BadParams(format!(
            "fill {fill} outside (0, 1]"
        )));
    }
    let size = rows * cols;
    let ones = ((fill * size as f64).round() as usize).min(size);
    if ones == 0 {
        return Err(NullModelError::EmptyNullMatrix { rows, cols, fill });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = vec![false; size];
    for i in rand::seq::index::sample(&mut rng, size, ones) {
        cells[i] = true;
    }
    Ok(BinaryMatrix::from_bits(rows, cols, cells).expect("cell count matches shape"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub count: usize,
}

/// Temperature statistics of a null ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullEnsembleSummary {
    pub realizations: usize,
    /// Temperatures in realization order.
    pub temperatures: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single realization.
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub bin_width: f64,
    pub histogram: Vec<HistogramBin>,
    pub matched_shape: (usize, usize),
    pub matched_fill: f64,
    pub master_seed: u64,
}

impl NullEnsembleSummary {
    /// Summarizes temperatures; statistics are taken over the sorted values so
    /// they do not depend on evaluation order.
    pub fn from_temperatures(
        temperatures: Vec<f64>,
        shape: (usize, usize),
        fill: f64,
        master_seed: u64,
    ) -> Self {
        let mut sorted = temperatures.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let std_dev = if n > 1 {
            (sorted.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let (min, max) = (sorted[0], sorted[n - 1]);
        // Rounding can push the mean a hair outside the range for equal values.
        let mean = mean.clamp(min, max);

        let bins = (max / BIN_WIDTH).floor() as usize + 1;
        let mut histogram: Vec<HistogramBin> = (0..bins)
            .map(|i| HistogramBin {
                lower: i as f64 * BIN_WIDTH,
                count: 0,
            })
            .collect();
        for t in &sorted {
            let i = ((t / BIN_WIDTH).floor() as usize).min(bins - 1);
            histogram[i].count += 1;
        }

        Self {
            realizations: n,
            temperatures,
            mean,
            std_dev,
            min,
            max,
            bin_width: BIN_WIDTH,
            histogram,
            matched_shape: shape,
            matched_fill: fill,
            master_seed,
        }
    }
}

/// Packs `realizations` random matrices of the given shape and fill.
/// Realization `k` uses `derive_seed(master_seed, k)` for both the matrix and
/// the optimizer, so results do not depend on thread scheduling.
pub fn null_ensemble(
    rows: usize,
    cols: usize,
    fill: f64,
    realizations: usize,
    budget: &OptimizerBudget,
    master_seed: u64,
) -> Result<NullEnsembleSummary, NullModelError> {
    if realizations == 0 {
        return Err(NullModelError::BadParams(
            "realizations must be at least 1".into(),
        ));
    }
    let temperatures = (0..realizations as u64)
        .into_par_iter()
        .map(|k| {
            let seed = derive_seed(master_seed, k);
            let q = random_matrix(rows, cols, fill, seed)?;
            Ok(analyze(&q, budget, seed)?.result.temperature)
        })
        .collect::<Result<Vec<f64>, NullModelError>>()?;
    Ok(NullEnsembleSummary::from_temperatures(
        temperatures,
        (rows, cols),
        fill,
        master_seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturated_matrix() {
        let q = random_matrix(2, 2, 1.0, 7).unwrap();
        assert_eq!(q.ones(), 4);
    }

    #[test]
    fn exact_count() {
        for seed in 0..20 {
            assert_eq!(random_matrix(4, 4, 0.25, seed).unwrap().ones(), 4);
        }
    }

    #[test]
    fn seeded_determinism() {
        let a = random_matrix(10, 12, 0.3, 42).unwrap();
        let b = random_matrix(10, 12, 0.3, 42).unwrap();
        let c = random_matrix(10, 12, 0.3, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_presences_is_error() {
        assert!(matches!(
            random_matrix(3, 3, 0.01, 0),
            Err(NullModelError::EmptyNullMatrix { .. })
        ));
        assert!(random_matrix(0, 3, 0.5, 0).is_err());
        assert!(random_matrix(3, 3, 0.0, 0).is_err());
    }

    #[test]
    fn single_realization_summary() {
        let s = null_ensemble(6, 6, 0.3, 1, &OptimizerBudget::fast(), 5).unwrap();
        assert_eq!(s.realizations, 1);
        assert_eq!(s.mean, s.min);
        assert_eq!(s.mean, s.max);
        assert_eq!(s.std_dev, 0.0);
        assert_eq!(s.histogram.iter().map(|b| b.count).sum::<usize>(), 1);
    }

    #[test]
    fn zero_realizations_rejected() {
        assert!(null_ensemble(4, 4, 0.5, 0, &OptimizerBudget::fast(), 0).is_err());
    }

    #[test]
    fn histogram_bins() {
        let s = NullEnsembleSummary::from_temperatures(vec![0.2, 2.5, 2.9, 0.0], (2, 2), 0.5, 0);
        let counts: Vec<usize> = s.histogram.iter().map(|b| b.count).collect();
        assert_eq!(counts, vec![2, 0, 2]);
        assert_eq!(s.histogram[2].lower, 2.0);
        assert_eq!(s.temperatures, vec![0.2, 2.5, 2.9, 0.0]);
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|k| derive_seed(0, k)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
