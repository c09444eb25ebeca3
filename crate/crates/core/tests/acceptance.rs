//! Acceptance suite: one PASS/FAIL/SKIP line per criterion, non-zero exit if
//! any criterion fails.
//!
//! Optional real-data checks read their inputs from the environment:
//! - `ECOTRADE_ARR1`, `ECOTRADE_WES`: ecological incidence matrices, one row
//!   per line, cells separated by whitespace or commas (nonzero = present).
//! - `ECOTRADE_COMTRADE`: a trade CSV in the input schema containing 2008.

mod common;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use common::{brute_force_min_with, fixture_path, oracle_grid, permutations, staircase};
use ecotrade::ingest::{aggregate, build_flow_tensor, normalize, parse_records};
use ecotrade::mutualistic::{fill_fraction, threshold_pair};
use ecotrade::null_models::null_ensemble;
use ecotrade::rankings::ecolo_rank;
use ecotrade::report::{cmd_analyze, cmd_sweep_mu, RunConfig};
use ecotrade::{analyze, pack, BinaryMatrix, Flow, OptimizerBudget, TradeRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Criterion = (&'static str, fn() -> Verdict);

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn oracle_4x4() -> Verdict {
    let rows = permutations(4);
    let grids: Vec<(Vec<f64>, Vec<f64>)> = (0..=16)
        .map(|ones| {
            let fill = ones as f64 / 16.0;
            if ones == 0 || ones == 16 {
                (Vec::new(), Vec::new())
            } else {
                oracle_grid(4, 4, fill / (1.0 - fill))
            }
        })
        .collect();
    let budget = OptimizerBudget::default();
    let mut worst: f64 = 0.0;
    let mut mismatches = 0usize;
    let mut checked = 0usize;
    for bits in 1u32..(1 << 16) - 1 {
        let cells = (0..16).map(|k| bits >> k & 1 == 1).collect();
        let q = BinaryMatrix::from_bits(4, 4, cells).unwrap();
        let (present, absent) = &grids[q.ones()];
        let best = brute_force_min_with(&q, present, absent, &rows, &rows);
        let got = pack(&q, &budget, 0).unwrap().temperature;
        let diff = (got - best).abs();
        worst = worst.max(diff);
        if diff > 1e-9 {
            mismatches += 1;
        }
        checked += 1;
    }
    check(
        mismatches == 0,
        format!("{checked} matrices, {mismatches} mismatches, max |dT| = {worst:.2e}"),
    )
}

fn staircases() -> Verdict {
    let mut details = Vec::new();
    let mut ok = true;
    for fill in [0.2, 0.5] {
        let t = pack(&staircase(20, fill), &OptimizerBudget::default(), 0)
            .unwrap()
            .temperature;
        ok &= t <= 1.0;
        details.push(format!("fill {fill}: T = {t:.4}"));
    }
    check(ok, details.join(", "))
}

fn null_separation() -> Verdict {
    let t = pack(&staircase(20, 0.2), &OptimizerBudget::default(), 0)
        .unwrap()
        .temperature;
    let s = null_ensemble(20, 20, 0.2, 100, &OptimizerBudget::fast(), 0).unwrap();
    check(
        s.mean >= 3.0 * t,
        format!(
            "null mean {:.2} (sd {:.2}) vs staircase T {t:.4}",
            s.mean, s.std_dev
        ),
    )
}

fn determinism() -> Verdict {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        cmd_analyze(&RunConfig::new(fixture_path(), dir.path())).unwrap();
    }
    let mut names: Vec<PathBuf> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    let differing: Vec<String> = names
        .iter()
        .filter(|p| {
            let other = b.path().join(p.file_name().unwrap());
            std::fs::read(p).unwrap() != std::fs::read(other).unwrap_or_default()
        })
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    check(
        !names.is_empty() && differing.is_empty(),
        format!(
            "{} JSON files compared, differing: {differing:?}",
            names.len()
        ),
    )
}

fn monotone_phi() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::new(fixture_path(), dir.path());
    config.budget = OptimizerBudget::fast();
    let (_, rows) = cmd_sweep_mu(&config, &[1e-6, 1e-5, 1e-4, 1e-3, 1e-2]).unwrap();
    let mut ok = rows.len() == 20;
    let mut series = Vec::new();
    for chunk in rows.chunks(5) {
        ok &= chunk
            .windows(2)
            .all(|w| w[0].mu < w[1].mu && w[1].phi <= w[0].phi);
        series.push(format!(
            "{} {}: {}",
            chunk[0].year,
            chunk[0].flow,
            chunk
                .iter()
                .map(|r| format!("{:.3}", r.phi))
                .collect::<Vec<_>>()
                .join(" ")
        ));
    }
    check(ok, series.join("; "))
}

fn conservation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let records: Vec<TradeRecord> = (0..1000)
        .map(|_| TradeRecord {
            year: 2008,
            product: format!("{:03}", rng.random_range(0..40)),
            exporter: format!("C{}", rng.random_range(0..30)),
            importer: format!("C{}", rng.random_range(0..30)),
            value: rng.random_range(0.0..1e9),
        })
        .collect();
    let usd = aggregate(&build_flow_tensor(&records, 2008).unwrap());
    let worst = usd
        .import
        .row_sums()
        .iter()
        .zip(usd.export.row_sums())
        .map(|(i, e)| (i - e).abs() / i.abs().max(e.abs()).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    check(
        worst <= 1e-9,
        format!(
            "{} products, max relative gap {worst:.2e}",
            usd.products.len()
        ),
    )
}

fn load_incidence(path: &Path) -> Result<BinaryMatrix, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let rows: Vec<Vec<bool>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().map(|v| v != 0.0))
                .collect::<Result<Vec<bool>, _>>()
                .map_err(|e| format!("{}: {e}", path.display()))
        })
        .collect::<Result<_, _>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(format!("{}: ragged rows", path.display()));
    }
    BinaryMatrix::from_bits(rows.len(), cols, rows.concat()).map_err(|e| e.to_string())
}

fn ecological() -> Verdict {
    let (Some(arr1), Some(wes)) = (
        std::env::var_os("ECOTRADE_ARR1"),
        std::env::var_os("ECOTRADE_WES"),
    ) else {
        return Verdict::Skip("set ECOTRADE_ARR1 and ECOTRADE_WES to run".into());
    };
    let load = |p| load_incidence(Path::new(p));
    let (arr1, wes) = match (load(&arr1), load(&wes)) {
        (Ok(a), Ok(w)) => (a, w),
        (Err(e), _) | (_, Err(e)) => return Verdict::Fail(e),
    };
    let budget = OptimizerBudget::default();
    let t_arr1 = analyze(&arr1, &budget, 0).unwrap().result.temperature;
    let t_wes = analyze(&wes, &budget, 0).unwrap().result.temperature;
    let fill = fill_fraction(&wes).unwrap();
    let null = null_ensemble(
        wes.rows(),
        wes.cols(),
        fill,
        20,
        &OptimizerBudget::fast(),
        0,
    )
    .unwrap();
    check(
        (t_arr1 - 2.4).abs() <= 2.0
            && (t_wes - 3.2).abs() <= 2.0
            && t_arr1 < t_wes
            && t_wes < null.mean,
        format!(
            "ARR1 {}x{} T = {t_arr1:.2}; WES {}x{} T = {t_wes:.2}; WES null mean {:.2}",
            arr1.rows(),
            arr1.cols(),
            wes.rows(),
            wes.cols(),
            null.mean
        ),
    )
}

fn comtrade_2008() -> Verdict {
    let Some(path) = std::env::var_os("ECOTRADE_COMTRADE") else {
        return Verdict::Skip("set ECOTRADE_COMTRADE to run".into());
    };
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let records = match parse_records(text.as_bytes()) {
        Ok(r) => r,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let usd = aggregate(&build_flow_tensor(&records, 2008).unwrap());
    let pair = normalize(&usd).unwrap();
    let budget = OptimizerBudget::default();
    let run = |flow| {
        let q = threshold_pair(&pair, flow, 1e-3).unwrap();
        analyze(&q, &budget, 0).unwrap()
    };
    let import = run(Flow::Import);
    let export = run(Flow::Export);
    let volumes =
        |axis| ecotrade::rankings::axis_totals(&usd.import, &usd.products, &usd.countries, axis);
    let (countries, _) = ecolo_rank(
        &import,
        2008,
        Flow::Import,
        &volumes(ecotrade::rankings::Axis::Countries),
        &volumes(ecotrade::rankings::Axis::Products),
    );
    let top3: Vec<&str> = countries.labels().into_iter().take(3).collect();
    let has = |aliases: &[&str]| top3.iter().any(|l| aliases.contains(l));
    let usa = has(&[
        "USA",
        "US",
        "842",
        "United States",
        "United States of America",
    ]);
    let germany = has(&["DEU", "DE", "276", "Germany"]);
    let (ti, te) = (import.result.temperature, export.result.temperature);
    check(
        usa && germany && ti < te,
        format!("import top 3 {top3:?}; T import {ti:.2}, export {te:.2}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence, all 4x4 matrices", oracle_4x4),
        ("perfect nestedness, 20x20 staircases", staircases),
        ("null separation at 20x20, fill 0.2", null_separation),
        ("deterministic analyze on fixture", determinism),
        ("fill non-increasing in mu", monotone_phi),
        ("import/export conservation", conservation),
        ("ecological matrices ARR1 and WES (optional)", ecological),
        ("trade data 2008 (optional)", comtrade_2008),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match verdict {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Verdict::Skip(d) => ("SKIP", d),
        };
        println!("{tag} [{}] {name} ({secs:.1}s): {detail}", i + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
