use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mscorr_core::association::build_report;
use mscorr_core::crosscorr::{correlation_matrix, RhoBar, SignificanceMode};
use mscorr_core::format::{read_file, write_file};
use mscorr_core::panel::{compute_returns, load_prices, preprocess, CapitalizationTable, PricePanel, ReturnPanel};
use mscorr_core::pipeline::{
    compare_reports, comparison_csv, parse_q_grid, parse_report_kv, parse_taus, run, PipelineConfig, RunMode, SynthParams,
};
use mscorr_core::scaling::{ScalingConfig, ScalingTable};
use mscorr_core::surrogates::{marginal_gaussianize, synchronous_shuffle, SurrogateKind, SurrogateSpec};
use mscorr_core::synth::generate;
use mscorr_core::{Error, Result};

#[derive(Parser)]
#[command(name = "mscorr", version, about = "Multiscaling proxies versus average cross-correlation of stock returns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fill gaps in raw ticker,date,close records and write the aligned panel.
    Clean {
        /// One or more price files.
        #[arg(long, required = true, num_args = 1..)]
        prices: Vec<PathBuf>,
        /// Keep series at least this fraction of the longest one.
        #[arg(long, default_value_t = 0.90)]
        k: f64,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Demeaned one-day log-returns of a cleaned panel.
    Returns {
        #[arg(long)]
        panel: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-stock scaling exponents and multiscaling proxies.
    Scaling {
        #[arg(long)]
        returns: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Correlation matrix, p-values and average cross-correlation.
    Xcorr {
        #[arg(long)]
        returns: PathBuf,
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Association report from a scaling table and average correlations.
    Associate {
        #[arg(long)]
        scaling: PathBuf,
        #[arg(long)]
        rho_bar: PathBuf,
        /// ticker,date,capitalization records.
        #[arg(long)]
        caps: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Synchronously shuffled or marginally Gaussianized returns.
    Surrogate {
        #[arg(long)]
        returns: PathBuf,
        /// shuffle | gaussianize
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthetic market returns (and capitalizations for factor markets).
    Synth {
        /// Key-value file with synth.* keys.
        #[arg(long)]
        config: Option<PathBuf>,
        /// synth.KEY=VALUE overrides, e.g. --set kind=cascade.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        /// Where to write ticker,date,capitalization records, if any.
        #[arg(long)]
        caps_out: Option<PathBuf>,
    },
    /// Full pipeline from a config file, with KEY=VALUE overrides.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        /// raw | shuffled | gaussianized
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compare two report.kv files statistic by statistic.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GridArgs {
    /// Horizons, `a..b` or a comma list.
    #[arg(long, default_value = "1..19")]
    tau_range: String,
    /// Moment orders, `start:step:end` or a comma list.
    #[arg(long, default_value = "0.1:0.1:1.0")]
    q_grid: String,
}

impl GridArgs {
    fn config(&self) -> Result<ScalingConfig> {
        let c = ScalingConfig {
            q_grid: parse_q_grid(&self.q_grid)?,
            taus: parse_taus(&self.tau_range)?,
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Args)]
struct SigArgs {
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// filtered | all
    #[arg(long, default_value = "filtered")]
    significance_mode: String,
}

fn split_kv(s: &str) -> Result<(&str, &str)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| Error::Config(format!("expected KEY=VALUE, got {:?}", s)))
}

fn read(path: &Path) -> Result<String> {
    read_file(path)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Clean { prices, k, out_dir } => {
            let texts = prices.iter().map(|p| read(p)).collect::<Result<Vec<_>>>()?;
            let panel = preprocess(&load_prices(&texts)?, k)?;
            write_file(&out_dir.join("panel.csv"), &panel.to_csv())?;
            write_file(&out_dir.join("fill_mask.csv"), &panel.fill_mask_csv())?;
            eprintln!(
                "kept {} tickers over {} dates",
                panel.n_tickers(),
                panel.n_dates()
            );
        }
        Command::Returns { panel, out } => {
            let panel = PricePanel::from_csv(&read(&panel)?, None)?;
            let r = compute_returns(&panel)?;
            write_file(&out, &r.to_csv())?;
            write_file(&out.with_extension("means.csv"), &r.means_csv())?;
        }
        Command::Scaling { returns, grid, out } => {
            let panel = ReturnPanel::from_csv(&read(&returns)?)?;
            let table = ScalingTable::compute(&panel, &grid.config()?)?;
            write_file(&out, &table.to_csv())?;
        }
        Command::Xcorr { returns, sig, out_dir } => {
            let panel = ReturnPanel::from_csv(&read(&returns)?)?;
            let mode: SignificanceMode = sig.significance_mode.parse()?;
            let s = correlation_matrix(&panel, sig.alpha, mode)?;
            write_file(&out_dir.join("rho.csv"), &s.rho_csv())?;
            write_file(&out_dir.join("pvalue.csv"), &s.pvalue_csv())?;
            write_file(&out_dir.join("rho_bar.csv"), &s.rho_bar_table().to_csv())?;
        }
        Command::Associate {
            scaling,
            rho_bar,
            caps,
            out_dir,
        } => {
            let table = ScalingTable::from_csv(&read(&scaling)?)?;
            let rb = RhoBar::from_csv(&read(&rho_bar)?)?;
            let caps = match caps {
                Some(p) => CapitalizationTable::from_records_text(&read(&p)?)?,
                None => CapitalizationTable::default(),
            };
            let report = build_report(&table, &rb, &caps)?;
            write_file(&out_dir.join("report.txt"), &report.to_text())?;
            write_file(&out_dir.join("report.kv"), &report.to_kv())?;
            print!("{}", report.to_text());
        }
        Command::Surrogate {
            returns,
            kind,
            seed,
            out,
        } => {
            let panel = ReturnPanel::from_csv(&read(&returns)?)?;
            let (surrogate, spec) = match kind.parse::<SurrogateKind>()? {
                SurrogateKind::SynchronousShuffle => synchronous_shuffle(&panel, seed)?,
                SurrogateKind::MarginalGaussianize => (
                    marginal_gaussianize(&panel, seed)?,
                    SurrogateSpec {
                        kind: SurrogateKind::MarginalGaussianize,
                        seed,
                        permutation: None,
                    },
                ),
            };
            write_file(&out, &surrogate.to_csv())?;
            write_file(&out.with_extension("meta.txt"), &spec.to_metadata())?;
        }
        Command::Synth {
            config,
            sets,
            out,
            caps_out,
        } => {
            let mut params = SynthParams::default();
            if let Some(path) = config {
                for line in read(&path)
                    .map_err(|e| Error::Config(e.to_string()))?
                    .lines()
                {
                    let line = line.split('#').next().unwrap_or("").trim();
                    if line.is_empty() {
                        continue;
                    }
                    let (k, v) = split_kv(line)?;
                    let k = k.strip_prefix("synth.").unwrap_or(k);
                    params.set(k, v)?;
                }
            }
            for s in &sets {
                let (k, v) = split_kv(s)?;
                params.set(k.strip_prefix("synth.").unwrap_or(k), v)?;
            }
            let recipe = params.recipe();
            let panel = generate(&recipe)?;
            write_file(&out, &panel.to_csv())?;
            if let Some(path) = caps_out {
                let caps = recipe.capitalizations().ok_or_else(|| {
                    Error::Config(format!("{} markets carry no capitalization", params.kind))
                })?;
                let date = panel.dates[0];
                let mut text = String::from("ticker,date,capitalization\n");
                for (t, v) in caps.iter() {
                    if let Some(v) = v {
                        text.push_str(&format!("{},{},{}\n", t, date, mscorr_core::format::g17(v)));
                    }
                }
                write_file(&path, &text)?;
            }
        }
        Command::Run {
            config,
            sets,
            mode,
            seed,
            output,
        } => {
            let mut cfg = match config {
                Some(p) => PipelineConfig::from_file(&p)?,
                None => PipelineConfig::default(),
            };
            for s in &sets {
                let (k, v) = split_kv(s)?;
                cfg.set(k, v)?;
            }
            if let Some(m) = mode {
                cfg.mode = m.parse::<RunMode>()?;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(o) = output {
                cfg.output = o;
            }
            let bundle = run(&cfg)?;
            bundle.write_to(&cfg.output)?;
            if let Some(text) = bundle.get("report.txt") {
                print!("{}", text);
            }
            eprintln!("wrote {} files to {}", bundle.files.len(), cfg.output.display());
        }
        Command::Compare { a, b, alpha, out } => {
            let sa = parse_report_kv(&read(&a)?)?;
            let sb = parse_report_kv(&read(&b)?)?;
            let rows = compare_reports(&sa, &sb, alpha)?;
            let csv = comparison_csv(&rows);
            match out {
                Some(p) => write_file(&p, &csv)?,
                None => print!("{}", csv),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
