//! Synthetic trade data in the input CSV schema.
//!
//! Countries and products get Zipf-like sizes. A flow's value is
//! `size_exporter * size_importer * size_product * noise` with log-normal
//! noise, and flows between small partners are often missing altogether.
//! Thresholding such data gives strongly nested matrices.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use crate::ingest::CSV_HEADER;

const BASE_USD: f64 = 1000.0;
const SIZE_EXPONENT: f64 = 2.0;
/// A flow between sizes multiplying to this value exists with probability 1/2.
const HALF_PRESENCE: f64 = 20.0;
const NOISE_SIGMA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub countries: usize,
    pub products: usize,
    pub years: Vec<i32>,
    pub seed: u64,
}

/// Three-letter code for country `i`: `AAA`, `AAB`, ...
pub fn country_code(i: usize) -> String {
    let letter = |k: usize| (b'A' + (k % 26) as u8) as char;
    [letter(i / 676), letter(i / 26), letter(i)]
        .iter()
        .collect()
}

/// Three-digit product code for product `i`.
pub fn product_code(i: usize) -> String {
    format!("{:03}", (i + 1) % 1000)
}

/// Size of the k-th largest of `n` entities: `(n / (k + 1))^a`.
fn zipf_sizes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (n as f64 / (k + 1) as f64).powf(SIZE_EXPONENT))
        .collect()
}

/// Renders the dataset as CSV text. Each year redraws the noise and the set
/// of flows present.
pub fn synth_csv(spec: &SynthSpec) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = LogNormal::new(0.0, NOISE_SIGMA).expect("valid log-normal parameters");

    let country_size = zipf_sizes(spec.countries);
    let product_size = zipf_sizes(spec.products);

    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for &year in &spec.years {
        for (p, sp) in product_size.iter().enumerate() {
            for (e, se) in country_size.iter().enumerate() {
                for (i, si) in country_size.iter().enumerate() {
                    if e == i {
                        continue;
                    }
                    let mass = se * si * sp;
                    let keep = rng.random::<f64>() < mass / (mass + HALF_PRESENCE);
                    let value = BASE_USD * se * si * sp * noise.sample(&mut rng);
                    if keep {
                        writeln!(
                            out,
                            "{year},{},{},{},{value:.2}",
                            product_code(p),
                            country_code(e),
                            country_code(i)
                        )
                        .expect("writing to a String");
                    }
                }
            }
        }
    }
    out
}
