use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ecotrade::nestedness::OptimizerBudget;
use ecotrade::report::synth::SynthSpec;
use ecotrade::report::{
    cmd_analyze, cmd_null, cmd_rank_series, cmd_sweep_mu, cmd_synth, FlowSelector, NullShape,
    Outcome, ReportError, RunConfig, YearSelector, DEFAULT_REALIZATIONS,
};

#[derive(Parser, Debug)]
#[command(
    name = "ecotrade",
    version,
    about = "Nestedness analysis of world trade networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pack each (year, flow) matrix and write JSON, rank CSVs and heatmaps.
    Analyze(Common),
    /// Fill and temperature over a list of thresholds.
    SweepMu {
        #[command(flatten)]
        common: Common,
        /// Comma-separated thresholds.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "1e-6,1e-5,1e-4,1e-3,1e-2"
        )]
        mu_list: Vec<f64>,
    },
    /// Temperature distribution of random matrices matched to the data.
    Null {
        #[command(flatten)]
        common: Common,
        /// Rows of an explicit null shape (ignores the input).
        #[arg(long, requires_all = ["cols", "fill"])]
        rows: Option<usize>,
        #[arg(long, requires_all = ["rows", "fill"])]
        cols: Option<usize>,
        #[arg(long, requires_all = ["rows", "cols"])]
        fill: Option<f64>,
    },
    /// Ecological and volume ranking series across years.
    RankSeries(Common),
    /// Write a synthetic dataset in the input format.
    Synth {
        #[arg(long, default_value_t = 20)]
        countries: usize,
        #[arg(long, default_value_t = 12)]
        products: usize,
        #[arg(long, default_value = "2000-2001")]
        years: YearSelector,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Trade CSV with columns year,product,exporter,importer,value_usd.
    #[arg(long, default_value = "")]
    input: PathBuf,
    /// `all`, a year, a range like 1962-2009, or a comma list.
    #[arg(long, default_value = "all")]
    years: YearSelector,
    /// import, export or both.
    #[arg(long, default_value = "both")]
    flow: FlowSelector,
    /// Threshold on normalized trade.
    #[arg(long, default_value_t = ecotrade::mutualistic::DEFAULT_MU)]
    mu: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_REALIZATIONS)]
    realizations: usize,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    stagnation: Option<usize>,
    /// Shorter optimizer runs for null realizations.
    #[arg(long)]
    fast_null: bool,
    /// Labels tracked per ranking series.
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Also write SVG heatmaps.
    #[arg(long)]
    svg: bool,
    /// Draw heatmaps in volume order instead of packed order.
    #[arg(long)]
    volume_order: bool,
}

impl Common {
    fn config(&self, needs_input: bool) -> Result<RunConfig, ReportError> {
        if needs_input && self.input.as_os_str().is_empty() {
            return Err(ReportError::Config("--input is required".into()));
        }
        let mut budget = OptimizerBudget::default();
        if let Some(p) = self.population {
            budget.population = p;
        }
        if let Some(g) = self.generations {
            budget.generations = g;
        }
        if let Some(s) = self.stagnation {
            budget.stagnation = s;
        }
        budget.elitism = budget.elitism.min(budget.population);
        Ok(RunConfig {
            input: self.input.clone(),
            years: self.years.clone(),
            flow: self.flow,
            mu: self.mu,
            seed: self.seed,
            budget,
            realizations: self.realizations,
            fast_null: self.fast_null,
            top_k: self.top_k,
            out_dir: self.out_dir.clone(),
            svg: self.svg,
            volume_order: self.volume_order,
        })
    }
}

fn run(command: Command) -> Result<Outcome, ReportError> {
    match command {
        Command::Analyze(c) => cmd_analyze(&c.config(true)?),
        Command::SweepMu { common, mu_list } => {
            cmd_sweep_mu(&common.config(true)?, &mu_list).map(|(o, _)| o)
        }
        Command::Null {
            common,
            rows,
            cols,
            fill,
        } => {
            let shape = match (rows, cols, fill) {
                (Some(rows), Some(cols), Some(fill)) => Some(NullShape { rows, cols, fill }),
                _ => None,
            };
            cmd_null(&common.config(shape.is_none())?, shape).map(|(o, _)| o)
        }
        Command::RankSeries(c) => cmd_rank_series(&c.config(true)?),
        Command::Synth {
            countries,
            products,
            years,
            seed,
            out_dir,
        } => {
            let years = match years {
                YearSelector::Listed(y) => y,
                YearSelector::All => {
                    return Err(ReportError::Config("synth needs explicit years".into()))
                }
            };
            cmd_synth(
                &SynthSpec {
                    countries,
                    products,
                    years,
                    seed,
                },
                &out_dir,
            )
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => {
            for path in &outcome.outputs {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
