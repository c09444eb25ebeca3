//! Command implementations behind the CLI: per-year analyses, threshold
//! sweeps, null ensembles, ranking series and synthetic data.
//!
//! Every command is a pure function of (input bytes, configuration, seed);
//! per-unit work runs in parallel and each unit writes its own files.

pub mod document;
pub mod svg;
pub mod synth;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::warn;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ingest::{
    aggregate, build_flow_tensor, normalize, parse_records, years_present, IngestError,
    TradeMatrixPair, TradeRecord, UsdMatrices,
};
use crate::mutualistic::{fill_fraction, threshold_pair, BinaryMatrix, Flow, DEFAULT_MU};
use crate::nestedness::{analyze, Analysis, NestednessError, OptimizerBudget};
use crate::null_models::{null_ensemble, NullEnsembleSummary};
use crate::rankings::{
    axis_totals, ecolo_rank, rank_series, series_csv, volume_rank, Axis, RankTable, Scheme,
};

use document::{AnalysisDocument, DocumentRankings, Shape, SCHEMA_VERSION};
use synth::{synth_csv, SynthSpec};

/// Default realizations per null ensemble.
pub const DEFAULT_REALIZATIONS: usize = 500;
/// Default series depth for countries.
pub const DEFAULT_TOP_COUNTRIES: usize = 20;
/// Default series depth for products.
pub const DEFAULT_TOP_PRODUCTS: usize = 10;

#[derive(Error, Debug)]
pub enum ReportError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: IngestError },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no unit of work succeeded: {0}")]
    NothingSucceeded(String),
    #[error(transparent)]
    Nestedness(#[from] NestednessError),
    #[error(transparent)]
    NullModel(#[from] crate::null_models::NullModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowSelector {
    Import,
    Export,
    Both,
}

impl FlowSelector {
    pub fn flows(self) -> Vec<Flow> {
        match self {
            FlowSelector::Import => vec![Flow::Import],
            FlowSelector::Export => vec![Flow::Export],
            FlowSelector::Both => vec![Flow::Import, Flow::Export],
        }
    }
}

impl FromStr for FlowSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "import" => Ok(FlowSelector::Import),
            "export" => Ok(FlowSelector::Export),
            "both" => Ok(FlowSelector::Both),
            other => Err(format!("unknown flow {other:?} (import, export, both)")),
        }
    }
}

/// Which years to process.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum YearSelector {
    /// Every year present in the input.
    #[default]
    All,
    Listed(Vec<i32>),
}

impl FromStr for YearSelector {
    type Err = String;

    /// Accepts `all` or a comma list of years and inclusive ranges, e.g.
    /// `1962-1970,2008`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "all" {
            return Ok(YearSelector::All);
        }
        let mut years = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let parse = |t: &str| {
                t.trim()
                    .parse::<i32>()
                    .map_err(|_| format!("bad year {t:?}"))
            };
            match part.split_once('-') {
                Some((a, b)) => {
                    let (a, b) = (parse(a)?, parse(b)?);
                    if a > b {
                        return Err(format!("empty year range {part:?}"));
                    }
                    years.extend(a..=b);
                }
                None => years.push(parse(part)?),
            }
        }
        if years.is_empty() {
            return Err("no years given".into());
        }
        years.sort_unstable();
        years.dedup();
        Ok(YearSelector::Listed(years))
    }
}

/// Settings shared by all commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub years: YearSelector,
    pub flow: FlowSelector,
    pub mu: f64,
    pub seed: u64,
    pub budget: OptimizerBudget,
    pub realizations: usize,
    pub fast_null: bool,
    pub top_k: Option<usize>,
    pub out_dir: PathBuf,
    pub svg: bool,
    /// Heatmaps in volume order instead of packed order.
    pub volume_order: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            years: YearSelector::All,
            flow: FlowSelector::Both,
            mu: DEFAULT_MU,
            seed: 0,
            budget: OptimizerBudget::default(),
            realizations: DEFAULT_REALIZATIONS,
            fast_null: false,
            top_k: None,
            out_dir: out_dir.into(),
            svg: false,
            volume_order: false,
        }
    }

    pub fn validate(&self) -> Result<(), ReportError> {
        check_mu(self.mu)?;
        if self.realizations == 0 {
            return Err(ReportError::Config(
                "realizations must be at least 1".into(),
            ));
        }
        if self.budget.population < 2 {
            return Err(ReportError::Config("population must be at least 2".into()));
        }
        Ok(())
    }

    fn null_budget(&self) -> OptimizerBudget {
        if self.fast_null {
            OptimizerBudget {
                generations: OptimizerBudget::fast().generations,
                ..self.budget
            }
        } else {
            self.budget
        }
    }
}

fn check_mu(mu: f64) -> Result<(), ReportError> {
    if mu > 0.0 && mu < 1.0 {
        Ok(())
    } else {
        Err(ReportError::Config(format!(
            "mu must lie in (0, 1), got {mu}"
        )))
    }
}

/// What a command produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub succeeded: usize,
}

impl Outcome {
    fn warn(&mut self, message: String) {
        warn!("{message}");
        self.warnings.push(message);
    }
}

/// One analysable year.
#[derive(Debug, Clone)]
pub struct YearData {
    pub usd: UsdMatrices,
    pub pair: TradeMatrixPair,
}

impl YearData {
    pub fn year(&self) -> i32 {
        self.pair.year
    }

    pub fn usd_for(&self, flow: Flow) -> &crate::matrix::DenseMatrix {
        match flow {
            Flow::Import => &self.usd.import,
            Flow::Export => &self.usd.export,
        }
    }
}

pub fn read_records(path: &Path) -> Result<Vec<TradeRecord>, ReportError> {
    let file = fs::File::open(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_records(std::io::BufReader::new(file)).map_err(|source| ReportError::Input {
        path: path.to_path_buf(),
        source,
    })
}

/// Builds normalized matrices for every selected year. Empty or all-zero
/// years are skipped with a warning; it is an error if none remain.
pub fn load_years(
    records: &[TradeRecord],
    years: &YearSelector,
    outcome: &mut Outcome,
) -> Result<Vec<YearData>, ReportError> {
    let wanted = match years {
        YearSelector::All => years_present(records),
        YearSelector::Listed(list) => list.clone(),
    };
    let mut data = Vec::new();
    for year in wanted {
        let built = build_flow_tensor(records, year).and_then(|tensor| {
            let usd = aggregate(&tensor);
            let pair = normalize(&usd)?;
            Ok(YearData { usd, pair })
        });
        match built {
            Ok(d) => data.push(d),
            Err(e @ (IngestError::EmptyYear(_) | IngestError::DegenerateYear(_))) => {
                outcome.warn(format!("skipping year: {e}"))
            }
            Err(e) => return Err(ReportError::NothingSucceeded(e.to_string())),
        }
    }
    if data.is_empty() {
        return Err(ReportError::NothingSucceeded(
            "all requested years are empty".into(),
        ));
    }
    Ok(data)
}

/// Thresholded matrix, its analysis and rank tables for one (year, flow).
#[derive(Debug, Clone)]
pub struct UnitResult {
    pub year: i32,
    pub flow: Flow,
    pub matrix: BinaryMatrix,
    pub phi: f64,
    pub analysis: Analysis,
    pub countries_ecolo: RankTable,
    pub products_ecolo: RankTable,
    pub countries_volume: RankTable,
    pub products_volume: RankTable,
}

pub fn analyze_unit(
    data: &YearData,
    flow: Flow,
    mu: f64,
    budget: &OptimizerBudget,
    seed: u64,
) -> Result<UnitResult, NestednessError> {
    let year = data.year();
    let q = threshold_pair(&data.pair, flow, mu)?;
    let phi = fill_fraction(&q)?;
    let analysis = analyze(&q, budget, seed)?;

    let usd = data.usd_for(flow);
    let (products, countries) = (&data.usd.products, &data.usd.countries);
    let country_volumes = axis_totals(usd, products, countries, Axis::Countries);
    let product_volumes = axis_totals(usd, products, countries, Axis::Products);
    let (countries_ecolo, products_ecolo) =
        ecolo_rank(&analysis, year, flow, &country_volumes, &product_volumes);

    Ok(UnitResult {
        year,
        flow,
        phi,
        countries_ecolo,
        products_ecolo,
        countries_volume: volume_rank(usd, products, countries, Axis::Countries, year, flow),
        products_volume: volume_rank(usd, products, countries, Axis::Products, year, flow),
        matrix: q,
        analysis,
    })
}

impl UnitResult {
    pub fn document(
        &self,
        mu: f64,
        seed: u64,
        budget: &OptimizerBudget,
        normalizer: f64,
    ) -> AnalysisDocument {
        let r = &self.analysis.result;
        AnalysisDocument {
            v: SCHEMA_VERSION,
            year: self.year,
            flow: self.flow.as_str().to_string(),
            mu,
            phi: self.phi,
            temperature: r.temperature,
            eta: r.eta,
            row_order: self.analysis.row_order(),
            col_order: self.analysis.col_order(),
            dropped_rows: self.analysis.dropped_rows.clone(),
            dropped_cols: self.analysis.dropped_cols.clone(),
            seed,
            budget: *budget,
            trimmed_fill: r.fill,
            isocline_p: r.isocline_p,
            clamped: r.clamped,
            exhaustive: r.exhaustive,
            generations: r.generations,
            shape: Shape {
                rows: self.matrix.rows(),
                cols: self.matrix.cols(),
            },
            normalizer,
            packed_matrix: self.analysis.packed().to_strings(),
            rankings: DocumentRankings {
                countries_ecolo: self.countries_ecolo.entries.clone(),
                products_ecolo: self.products_ecolo.entries.clone(),
                countries_volume: self.countries_volume.entries.clone(),
                products_volume: self.products_volume.entries.clone(),
            },
        }
    }

    /// Full matrix with rows and columns in descending volume order.
    fn volume_ordered(&self) -> BinaryMatrix {
        let position = |labels: &[String], table: &RankTable| -> Vec<usize> {
            let at: HashMap<&str, usize> = labels
                .iter()
                .enumerate()
                .map(|(i, l)| (l.as_str(), i))
                .collect();
            table.entries.iter().map(|e| at[e.label.as_str()]).collect()
        };
        self.matrix.permuted(
            &position(&self.matrix.row_labels, &self.countries_volume),
            &position(&self.matrix.col_labels, &self.products_volume),
        )
    }
}

fn write_file(path: &Path, contents: &str) -> Result<PathBuf, ReportError> {
    fs::write(path, contents).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(path.to_path_buf())
}

fn ensure_dir(dir: &Path) -> Result<(), ReportError> {
    fs::create_dir_all(dir).map_err(|source| ReportError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn units(data: &[YearData], flow: FlowSelector) -> Vec<(usize, Flow)> {
    (0..data.len())
        .flat_map(|i| flow.flows().into_iter().map(move |f| (i, f)))
        .collect()
}

#[derive(Serialize)]
struct IndexEntry {
    year: i32,
    flow: Flow,
    temperature: f64,
    phi: f64,
    file: String,
}

/// Per (year, flow): JSON document, rank CSVs and optionally an SVG heatmap,
/// plus an `index.json` over all documents.
pub fn cmd_analyze(config: &RunConfig) -> Result<Outcome, ReportError> {
    config.validate()?;
    let mut outcome = Outcome::default();
    let records = read_records(&config.input)?;
    let data = load_years(&records, &config.years, &mut outcome)?;
    ensure_dir(&config.out_dir)?;

    let results: Vec<Result<(IndexEntry, Vec<PathBuf>), String>> = units(&data, config.flow)
        .into_par_iter()
        .map(|(i, flow)| {
            let d = &data[i];
            let unit = analyze_unit(d, flow, config.mu, &config.budget, config.seed)
                .map_err(|e| format!("year {} {flow}: {e}", d.year()))?;
            write_unit(config, &unit, d.pair.normalizer).map_err(|e| e.to_string())
        })
        .collect();

    let mut index = Vec::new();
    for r in results {
        match r {
            Ok((entry, files)) => {
                outcome.succeeded += 1;
                outcome.outputs.extend(files);
                index.push(entry);
            }
            Err(msg) => outcome.warn(msg),
        }
    }
    if outcome.succeeded == 0 {
        return Err(ReportError::NothingSucceeded(outcome.warnings.join("; ")));
    }
    let index_json = serde_json::to_string_pretty(&index).expect("index serializes") + "\n";
    outcome
        .outputs
        .push(write_file(&config.out_dir.join("index.json"), &index_json)?);
    Ok(outcome)
}

fn write_unit(
    config: &RunConfig,
    unit: &UnitResult,
    normalizer: f64,
) -> Result<(IndexEntry, Vec<PathBuf>), ReportError> {
    let stem = format!("{}_{}", unit.year, unit.flow);
    let doc = unit.document(config.mu, config.seed, &config.budget, normalizer);
    let json_name = format!("analysis_{stem}.json");
    let mut files = vec![write_file(
        &config.out_dir.join(&json_name),
        &doc.to_json(),
    )?];

    for table in [
        &unit.countries_ecolo,
        &unit.products_ecolo,
        &unit.countries_volume,
        &unit.products_volume,
    ] {
        let name = format!(
            "ranks_{stem}_{}_{}.csv",
            table.axis.as_str(),
            table.scheme.as_str()
        );
        files.push(write_file(&config.out_dir.join(name), &table.to_csv())?);
    }

    if config.svg {
        let svg = if config.volume_order {
            svg::heatmap_svg(
                &unit.volume_ordered(),
                None,
                &format!("{} {} volume order, mu={}", unit.year, unit.flow, config.mu),
            )
        } else {
            svg::heatmap_svg(
                &unit.analysis.packed(),
                unit.analysis.result.isocline_p,
                &format!(
                    "{} {} mu={} T={:.2}",
                    unit.year, unit.flow, config.mu, unit.analysis.result.temperature
                ),
            )
        };
        files.push(write_file(
            &config.out_dir.join(format!("heatmap_{stem}.svg")),
            &svg,
        )?);
    }

    Ok((
        IndexEntry {
            year: unit.year,
            flow: unit.flow,
            temperature: unit.analysis.result.temperature,
            phi: unit.phi,
            file: json_name,
        },
        files,
    ))
}

/// One row of the threshold sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub year: i32,
    pub flow: Flow,
    pub mu: f64,
    pub phi: f64,
    pub temperature: f64,
    pub eta: f64,
}

/// Fill and temperature for each threshold; writes `sweep_mu.csv` sorted by
/// year, flow and ascending mu.
pub fn cmd_sweep_mu(
    config: &RunConfig,
    mu_list: &[f64],
) -> Result<(Outcome, Vec<SweepRow>), ReportError> {
    config.validate()?;
    if mu_list.is_empty() {
        return Err(ReportError::Config("mu list is empty".into()));
    }
    for &mu in mu_list {
        check_mu(mu)?;
    }
    let mut mus = mu_list.to_vec();
    mus.sort_by(f64::total_cmp);
    mus.dedup();

    let mut outcome = Outcome::default();
    let records = read_records(&config.input)?;
    let data = load_years(&records, &config.years, &mut outcome)?;
    ensure_dir(&config.out_dir)?;

    let work: Vec<(usize, Flow, f64)> = units(&data, config.flow)
        .into_iter()
        .flat_map(|(i, f)| mus.iter().map(move |&mu| (i, f, mu)))
        .collect();
    let results: Vec<Result<SweepRow, String>> = work
        .into_par_iter()
        .map(|(i, flow, mu)| {
            let d = &data[i];
            let unit = analyze_unit(d, flow, mu, &config.budget, config.seed)
                .map_err(|e| format!("year {} {flow} mu={mu}: {e}", d.year()))?;
            Ok(SweepRow {
                year: d.year(),
                flow,
                mu,
                phi: unit.phi,
                temperature: unit.analysis.result.temperature,
                eta: unit.analysis.result.eta,
            })
        })
        .collect();

    let mut rows = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(msg) => outcome.warn(msg),
        }
    }
    if rows.is_empty() {
        return Err(ReportError::NothingSucceeded(outcome.warnings.join("; ")));
    }
    outcome.succeeded = rows.len();

    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row).expect("in-memory write");
    }
    let text = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv");
    outcome
        .outputs
        .push(write_file(&config.out_dir.join("sweep_mu.csv"), &text)?);
    Ok((outcome, rows))
}

/// Shape and fill of a null ensemble given directly instead of from data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullShape {
    pub rows: usize,
    pub cols: usize,
    pub fill: f64,
}

fn histogram_csv(summary: &NullEnsembleSummary) -> String {
    let mut s = String::from("bin_lower,count\n");
    for b in &summary.histogram {
        s.push_str(&format!("{},{}\n", b.lower, b.count));
    }
    s
}

/// Null ensembles matched to each (year, flow) of the input (countries x
/// products and untrimmed fill at `mu`), or to an explicit shape.
pub fn cmd_null(
    config: &RunConfig,
    shape: Option<NullShape>,
) -> Result<(Outcome, Vec<NullEnsembleSummary>), ReportError> {
    config.validate()?;
    let mut outcome = Outcome::default();
    let budget = config.null_budget();
    ensure_dir(&config.out_dir)?;

    let targets: Vec<(String, NullShape)> = match shape {
        Some(s) => vec![("null".to_string(), s)],
        None => {
            let records = read_records(&config.input)?;
            let data = load_years(&records, &config.years, &mut outcome)?;
            let mut targets = Vec::new();
            for (i, flow) in units(&data, config.flow) {
                let d = &data[i];
                let q = threshold_pair(&d.pair, flow, config.mu).map_err(NestednessError::from)?;
                let fill = fill_fraction(&q).map_err(NestednessError::from)?;
                if fill == 0.0 {
                    outcome.warn(format!("year {} {flow}: nothing to analyze", d.year()));
                    continue;
                }
                targets.push((
                    format!("null_{}_{flow}", d.year()),
                    NullShape {
                        rows: q.rows(),
                        cols: q.cols(),
                        fill,
                    },
                ));
            }
            targets
        }
    };

    let mut summaries = Vec::new();
    for (stem, s) in targets {
        match null_ensemble(
            s.rows,
            s.cols,
            s.fill,
            config.realizations,
            &budget,
            config.seed,
        ) {
            Ok(summary) => {
                let json =
                    serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
                outcome.outputs.push(write_file(
                    &config.out_dir.join(format!("{stem}.json")),
                    &json,
                )?);
                outcome.outputs.push(write_file(
                    &config.out_dir.join(format!("{stem}_hist.csv")),
                    &histogram_csv(&summary),
                )?);
                outcome.succeeded += 1;
                summaries.push(summary);
            }
            Err(e) => outcome.warn(format!("{stem}: {e}")),
        }
    }
    if outcome.succeeded == 0 {
        return Err(ReportError::NothingSucceeded(outcome.warnings.join("; ")));
    }
    Ok((outcome, summaries))
}

/// Long-format ranking series per flow and axis, both schemes, written as
/// `rank_series_{flow}_{axis}.csv`.
pub fn cmd_rank_series(config: &RunConfig) -> Result<Outcome, ReportError> {
    config.validate()?;
    let mut outcome = Outcome::default();
    let records = read_records(&config.input)?;
    let data = load_years(&records, &config.years, &mut outcome)?;
    ensure_dir(&config.out_dir)?;

    for flow in config.flow.flows() {
        let results: Vec<Result<UnitResult, String>> = data
            .par_iter()
            .map(|d| {
                analyze_unit(d, flow, config.mu, &config.budget, config.seed)
                    .map_err(|e| format!("year {} {flow}: {e}", d.year()))
            })
            .collect();
        let mut units = Vec::new();
        for r in results {
            match r {
                Ok(u) => units.push(u),
                Err(msg) => outcome.warn(msg),
            }
        }
        if units.is_empty() {
            continue;
        }
        outcome.succeeded += units.len();

        for axis in [Axis::Countries, Axis::Products] {
            let k = config.top_k.unwrap_or(match axis {
                Axis::Countries => DEFAULT_TOP_COUNTRIES,
                Axis::Products => DEFAULT_TOP_PRODUCTS,
            });
            let mut rows = Vec::new();
            for scheme in [Scheme::Ecolo, Scheme::Volume] {
                let tables = units
                    .iter()
                    .map(|u| match (axis, scheme) {
                        (Axis::Countries, Scheme::Ecolo) => u.countries_ecolo.clone(),
                        (Axis::Products, Scheme::Ecolo) => u.products_ecolo.clone(),
                        (Axis::Countries, Scheme::Volume) => u.countries_volume.clone(),
                        (Axis::Products, Scheme::Volume) => u.products_volume.clone(),
                    })
                    .collect();
                let series = rank_series(tables).expect("tables share scheme, flow and axis");
                rows.extend(series.top_k_rows(k));
            }
            let name = format!("rank_series_{flow}_{}.csv", axis.as_str());
            outcome
                .outputs
                .push(write_file(&config.out_dir.join(name), &series_csv(&rows))?);
        }
    }
    if outcome.succeeded == 0 {
        return Err(ReportError::NothingSucceeded(outcome.warnings.join("; ")));
    }
    Ok(outcome)
}

/// File name [`cmd_synth`] writes inside the output directory.
pub const SYNTH_FILE: &str = "synthetic_trade.csv";

pub fn cmd_synth(spec: &SynthSpec, out_dir: &Path) -> Result<Outcome, ReportError> {
    if spec.countries < 2 || spec.products < 2 {
        return Err(ReportError::Config(
            "need at least 2 countries and 2 products".into(),
        ));
    }
    if spec.years.is_empty() {
        return Err(ReportError::Config("no years given".into()));
    }
    ensure_dir(out_dir)?;
    let path = write_file(&out_dir.join(SYNTH_FILE), &synth_csv(spec))?;
    Ok(Outcome {
        outputs: vec![path],
        warnings: Vec::new(),
        succeeded: 1,
    })
}
