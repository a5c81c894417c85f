//! End-to-end runs: configuration, stage orchestration and the output
//! bundle (proxy table, correlation files, association report, scatter
//! data and a manifest).

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::association::{build_report, AssociationReport, Statistic};
use crate::crosscorr::{correlation_matrix, SignificanceMode, DEFAULT_ALPHA};
use crate::error::{Error, Result};
use crate::format::{g17, read_file, write_file};
use crate::panel::{compute_returns, load_prices, preprocess, CapitalizationTable, PricePanel, ReturnPanel, DEFAULT_K};
use crate::scaling::{ScalingConfig, ScalingTable};
use crate::surrogates::{marginal_gaussianize, synchronous_shuffle, SurrogateKind, SurrogateSpec};
use crate::synth::{evenly_spaced, family_recipe, generate, MarketKind, MarketRecipe, RecipeFamily, Tail};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RunMode {
    #[default]
    Raw,
    Shuffled,
    Gaussianized,
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunMode::Raw => "raw",
            RunMode::Shuffled => "shuffled",
            RunMode::Gaussianized => "gaussianized",
        })
    }
}

impl FromStr for RunMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "raw" => Ok(RunMode::Raw),
            "shuffled" => Ok(RunMode::Shuffled),
            "gaussianized" => Ok(RunMode::Gaussianized),
            other => Err(Error::Config(format!(
                "mode must be raw, shuffled or gaussianized, got {:?}",
                other
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    GaussianIid,
    StudentT,
    OneFactor,
    Cascade,
    Coupled,
    Uncoupled,
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SynthKind::GaussianIid => "gaussian_iid",
            SynthKind::StudentT => "student_t",
            SynthKind::OneFactor => "one_factor",
            SynthKind::Cascade => "cascade",
            SynthKind::Coupled => "coupled",
            SynthKind::Uncoupled => "uncoupled",
        })
    }
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "gaussian_iid" | "gaussian" => SynthKind::GaussianIid,
            "student_t" => SynthKind::StudentT,
            "one_factor" => SynthKind::OneFactor,
            "cascade" => SynthKind::Cascade,
            "coupled" => SynthKind::Coupled,
            "uncoupled" => SynthKind::Uncoupled,
            other => return Err(Error::Config(format!("unknown synthetic market kind {:?}", other))),
        })
    }
}

/// Flat description of a synthetic market, as written in config files.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub kind: SynthKind,
    pub stocks: usize,
    pub days: usize,
    pub seed: u64,
    pub nu: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub student_tails: bool,
    pub depth: u32,
    pub spread: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            kind: SynthKind::GaussianIid,
            stocks: 20,
            days: 4096,
            seed: 0,
            nu: 3.0,
            beta_min: 0.2,
            beta_max: 1.5,
            student_tails: false,
            depth: 12,
            spread: 0.3,
        }
    }
}

impl SynthParams {
    pub fn recipe(&self) -> MarketRecipe {
        let (n, t, s) = (self.stocks, self.days, self.seed);
        let kind = match self.kind {
            SynthKind::GaussianIid => MarketKind::GaussianIid,
            SynthKind::StudentT => MarketKind::StudentT { nu: self.nu },
            SynthKind::OneFactor => MarketKind::OneFactor {
                betas: evenly_spaced(self.beta_min, self.beta_max, n),
                tail: if self.student_tails {
                    Tail::StudentT(self.nu)
                } else {
                    Tail::Gaussian
                },
            },
            SynthKind::Cascade => MarketKind::Cascade {
                depth: self.depth,
                spread: self.spread,
            },
            SynthKind::Coupled => return family_recipe(RecipeFamily::Coupled, n, t, s),
            SynthKind::Uncoupled => return family_recipe(RecipeFamily::Uncoupled, n, t, s),
        };
        MarketRecipe::new(n, t, s, kind)
    }

    /// Applies one `synth.*` key (without the prefix).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "kind" => self.kind = value.parse()?,
            "stocks" => self.stocks = parse_num(key, value)?,
            "days" => self.days = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "nu" => self.nu = parse_num(key, value)?,
            "beta_min" => self.beta_min = parse_num(key, value)?,
            "beta_max" => self.beta_max = parse_num(key, value)?,
            "tail" => {
                self.student_tails = match value {
                    "gaussian" => false,
                    "student_t" => true,
                    other => return Err(Error::Config(format!("unknown tail {:?}", other))),
                }
            }
            "depth" => self.depth = parse_num(key, value)?,
            "spread" => self.spread = parse_num(key, value)?,
            other => return Err(Error::Config(format!("unknown key synth.{}", other))),
        }
        Ok(())
    }

    fn describe(&self) -> Vec<(String, String)> {
        vec![
            ("synth.kind".into(), self.kind.to_string()),
            ("synth.stocks".into(), self.stocks.to_string()),
            ("synth.days".into(), self.days.to_string()),
            ("synth.seed".into(), self.seed.to_string()),
            ("synth.nu".into(), g17(self.nu)),
            ("synth.beta_min".into(), g17(self.beta_min)),
            ("synth.beta_max".into(), g17(self.beta_max)),
            (
                "synth.tail".into(),
                if self.student_tails { "student_t" } else { "gaussian" }.into(),
            ),
            ("synth.depth".into(), self.depth.to_string()),
            ("synth.spread".into(), g17(self.spread)),
        ]
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {:?} for {}", value, key)))
}

/// `a..b` (inclusive) or a comma-separated list of horizons.
pub fn parse_taus(value: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = value.split_once("..") {
        let a: usize = parse_num("tau_range", a)?;
        let b: usize = parse_num("tau_range", b)?;
        if a > b {
            return Err(Error::Config(format!("empty tau range {}", value)));
        }
        return Ok((a..=b).collect());
    }
    value.split(',').map(|v| parse_num("tau_range", v)).collect()
}

/// `start:step:end` (inclusive) or a comma-separated list of orders.
pub fn parse_q_grid(value: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = value.split(':').collect();
    if parts.len() == 3 {
        let start: f64 = parse_num("q_grid", parts[0])?;
        let step: f64 = parse_num("q_grid", parts[1])?;
        let end: f64 = parse_num("q_grid", parts[2])?;
        if !(step > 0.0) || end < start {
            return Err(Error::Config(format!("invalid q grid {}", value)));
        }
        let n = ((end - start) / step + 1e-9).floor() as usize + 1;
        // snap to 12 decimals so 0.1:0.1:1.0 yields the literals 0.1 … 1.0
        return Ok((0..n)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect());
    }
    value.split(',').map(|v| parse_num("q_grid", v)).collect()
}

fn format_taus(taus: &[usize]) -> String {
    taus.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}

fn format_q(q: &[f64]) -> String {
    q.iter().map(|v| g17(*v)).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub prices: Vec<PathBuf>,
    pub returns: Option<PathBuf>,
    pub caps: Option<PathBuf>,
    pub synth: Option<SynthParams>,
    pub k: f64,
    pub scaling: ScalingConfig,
    pub alpha: f64,
    pub significance_mode: SignificanceMode,
    pub seed: u64,
    pub output: PathBuf,
    pub mode: RunMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            prices: Vec::new(),
            returns: None,
            caps: None,
            synth: None,
            k: DEFAULT_K,
            scaling: ScalingConfig::default(),
            alpha: DEFAULT_ALPHA,
            significance_mode: SignificanceMode::Filtered,
            seed: 0,
            output: PathBuf::from("out"),
            mode: RunMode::Raw,
        }
    }
}

impl PipelineConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", i + 1))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {}", i + 1, e.root())))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = read_file(path).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_text(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if let Some(sub) = key.strip_prefix("synth.") {
            return self.synth.get_or_insert_with(SynthParams::default).set(sub, value);
        }
        match key {
            "prices" => {
                self.prices = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(PathBuf::from)
                    .collect()
            }
            "returns" => self.returns = Some(PathBuf::from(value)),
            "caps" => self.caps = Some(PathBuf::from(value)),
            "k" => self.k = parse_num(key, value)?,
            "tau_range" => self.scaling.taus = parse_taus(value)?,
            "q_grid" => self.scaling.q_grid = parse_q_grid(value)?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "significance_mode" => self.significance_mode = value.parse()?,
            "seed" => self.seed = parse_num(key, value)?,
            "output" => self.output = PathBuf::from(value),
            "mode" => self.mode = value.parse()?,
            other => return Err(Error::Config(format!("unknown key {}", other))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let sources = (!self.prices.is_empty()) as u8 + self.returns.is_some() as u8 + self.synth.is_some() as u8;
        if sources != 1 {
            return Err(Error::Config(
                "exactly one input source (prices, returns or synth.*) is required".into(),
            ));
        }
        if !(self.k > 0.0 && self.k <= 1.0) {
            return Err(Error::Config(format!("k must lie in (0, 1], got {}", self.k)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        self.scaling.validate()?;
        if let Some(s) = &self.synth {
            s.recipe().validate()?;
        }
        Ok(())
    }

    /// Resolved settings in manifest order. The output directory is left
    /// out so that bundles written to different places compare equal.
    fn describe(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("mode".to_string(), self.mode.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("k".into(), g17(self.k)),
            ("tau_range".into(), format_taus(&self.scaling.taus)),
            ("q_grid".into(), format_q(&self.scaling.q_grid)),
            ("alpha".into(), g17(self.alpha)),
            ("significance_mode".into(), self.significance_mode.to_string()),
        ];
        for (i, p) in self.prices.iter().enumerate() {
            out.push((format!("prices[{}]", i), p.display().to_string()));
        }
        if let Some(p) = &self.returns {
            out.push(("returns".into(), p.display().to_string()));
        }
        if let Some(p) = &self.caps {
            out.push(("caps".into(), p.display().to_string()));
        }
        if let Some(s) = &self.synth {
            out.extend(s.describe());
        }
        out
    }
}

/// Output files keyed by file name.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bundle {
    pub files: BTreeMap<String, String>,
}

impl Bundle {
    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.get(name).map(String::as_str)
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        for (name, contents) in &self.files {
            write_file(&dir.join(name), contents)?;
        }
        Ok(())
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Everything a run computes, before serialization.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub price_panel: Option<PricePanel>,
    pub returns: ReturnPanel,
    pub surrogate: Option<SurrogateSpec>,
    pub scaling: ScalingTable,
    pub correlations: crate::crosscorr::CorrelationSummary,
    pub caps: CapitalizationTable,
    pub report: AssociationReport,
}

struct Inputs {
    price_panel: Option<PricePanel>,
    returns: ReturnPanel,
    caps: CapitalizationTable,
    digests: Vec<(String, String)>,
}

fn load_inputs(cfg: &PipelineConfig) -> Result<Inputs> {
    let mut digests = Vec::new();
    let (price_panel, returns, synth_caps) = if !cfg.prices.is_empty() {
        let texts = cfg
            .prices
            .iter()
            .map(|p| read_file(p))
            .collect::<Result<Vec<_>>>()?;
        for (p, t) in cfg.prices.iter().zip(&texts) {
            digests.push((p.display().to_string(), sha256_hex(t.as_bytes())));
        }
        let series = load_prices(&texts)?;
        let panel = preprocess(&series, cfg.k)?;
        let returns = compute_returns(&panel)?;
        (Some(panel), returns, None)
    } else if let Some(path) = &cfg.returns {
        let text = read_file(path)?;
        digests.push((path.display().to_string(), sha256_hex(text.as_bytes())));
        (None, ReturnPanel::from_csv(&text)?, None)
    } else if let Some(s) = &cfg.synth {
        let recipe = s.recipe();
        (None, generate(&recipe)?, recipe.capitalizations())
    } else {
        return Err(Error::Config("no input source".into()));
    };
    let caps = match &cfg.caps {
        Some(path) => {
            let text = read_file(path)?;
            digests.push((path.display().to_string(), sha256_hex(text.as_bytes())));
            CapitalizationTable::from_records_text(&text)?
        }
        None => synth_caps.unwrap_or_default(),
    };
    Ok(Inputs {
        price_panel,
        returns,
        caps,
        digests,
    })
}

/// Runs every stage in memory. Errors carry the stage name.
pub fn execute(cfg: &PipelineConfig) -> Result<(RunResult, Vec<(String, String)>)> {
    cfg.validate()?;
    let inputs = load_inputs(cfg).map_err(|e| e.in_stage("ingest"))?;

    let (returns, surrogate) = match cfg.mode {
        RunMode::Raw => (inputs.returns, None),
        RunMode::Shuffled => {
            let (p, spec) = synchronous_shuffle(&inputs.returns, cfg.seed).map_err(|e| e.in_stage("surrogate"))?;
            (p, Some(spec))
        }
        RunMode::Gaussianized => {
            let p = marginal_gaussianize(&inputs.returns, cfg.seed).map_err(|e| e.in_stage("surrogate"))?;
            (
                p,
                Some(SurrogateSpec {
                    kind: SurrogateKind::MarginalGaussianize,
                    seed: cfg.seed,
                    permutation: None,
                }),
            )
        }
    };

    let scaling = ScalingTable::compute(&returns, &cfg.scaling).map_err(|e| e.in_stage("scaling"))?;
    let correlations = correlation_matrix(&returns, cfg.alpha, cfg.significance_mode).map_err(|e| e.in_stage("xcorr"))?;
    let report = build_report(&scaling, &correlations.rho_bar_table(), &inputs.caps).map_err(|e| e.in_stage("associate"))?;

    Ok((
        RunResult {
            price_panel: inputs.price_panel,
            returns,
            surrogate,
            scaling,
            correlations,
            caps: inputs.caps,
            report,
        },
        inputs.digests,
    ))
}

/// `rho_bar,<proxy>,ln_cap` rows in ticker order; `ln_cap` empty when absent.
pub fn scatter_csv(result: &RunResult, proxy: &str) -> String {
    let mut out = format!("rho_bar,{},ln_cap\n", proxy);
    let rho_bar = result.correlations.rho_bar_table();
    for (i, t) in result.scaling.tickers.iter().enumerate() {
        let Some(rb) = rho_bar.get(t) else {
            continue;
        };
        let r = &result.scaling.results[i];
        let v = if proxy == "A_hat" { r.a_hat } else { r.b_hat };
        let cap = result.caps.ln_cap(t).map(g17).unwrap_or_default();
        out.push_str(&format!("{},{},{}\n", g17(rb), g17(v), cap));
    }
    out
}

/// Runs the pipeline and serializes every output file.
pub fn run(cfg: &PipelineConfig) -> Result<Bundle> {
    let (result, digests) = execute(cfg)?;
    let mut files = BTreeMap::new();
    if let Some(p) = &result.price_panel {
        files.insert("panel.csv".to_string(), p.to_csv());
        files.insert("fill_mask.csv".to_string(), p.fill_mask_csv());
    }
    files.insert("returns.csv".into(), result.returns.to_csv());
    files.insert("scaling.csv".into(), result.scaling.to_csv());
    files.insert("rho.csv".into(), result.correlations.rho_csv());
    files.insert("pvalue.csv".into(), result.correlations.pvalue_csv());
    files.insert("rho_bar.csv".into(), result.correlations.rho_bar_table().to_csv());
    files.insert("report.txt".into(), result.report.to_text());
    files.insert("report.kv".into(), result.report.to_kv());
    files.insert("scatter_B.csv".into(), scatter_csv(&result, "B_hat"));
    files.insert("scatter_A.csv".into(), scatter_csv(&result, "A_hat"));
    if let Some(spec) = &result.surrogate {
        files.insert("surrogate.txt".into(), spec.to_metadata());
    }

    let mut manifest = format!("software=mscorr {}\n", env!("CARGO_PKG_VERSION"));
    for (k, v) in cfg.describe() {
        manifest.push_str(&format!("config.{}={}\n", k, v));
    }
    for (path, digest) in &digests {
        manifest.push_str(&format!("input_sha256.{}={}\n", path, digest));
    }
    if let Some(spec) = &result.surrogate {
        for line in spec.to_metadata().lines() {
            manifest.push_str(&format!("surrogate.{}\n", line));
        }
    }
    for (name, contents) in &files {
        manifest.push_str(&format!("output_sha256.{}={}\n", name, sha256_hex(contents.as_bytes())));
    }
    files.insert("manifest.txt".into(), manifest);
    Ok(Bundle { files })
}

/// Reads the `<name>.value` / `<name>.pvalue` lines of a report file.
pub fn parse_report_kv(text: &str) -> Result<Vec<Statistic>> {
    let mut stats: Vec<Statistic> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { row: i + 1, msg: "expected key=value".into() })?;
        let (name, field) = match key.rsplit_once('.') {
            Some((n, f @ ("value" | "pvalue"))) => (n, f),
            _ => continue,
        };
        let v: f64 = value.trim().parse().map_err(|_| Error::Parse {
            row: i + 1,
            msg: format!("not a number: {:?}", value),
        })?;
        let idx = match stats.iter().position(|s| s.name == name) {
            Some(idx) => idx,
            None => {
                stats.push(Statistic {
                    name: name.to_string(),
                    value: f64::NAN,
                    pvalue: None,
                });
                stats.len() - 1
            }
        };
        if field == "value" {
            stats[idx].value = v;
        } else {
            stats[idx].pvalue = Some(v);
        }
    }
    Ok(stats)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub name: String,
    pub value_a: f64,
    pub value_b: f64,
    pub abs_diff: f64,
    pub pvalue_a: Option<f64>,
    pub pvalue_b: Option<f64>,
    /// Whether both p-values fall below alpha; `None` without p-values.
    pub both_significant: Option<bool>,
}

/// Statistic-by-statistic comparison of two reports with identical
/// statistic sets.
pub fn compare_reports(a: &[Statistic], b: &[Statistic], alpha: f64) -> Result<Vec<ComparisonRow>> {
    fn names(s: &[Statistic]) -> Vec<&str> {
        let mut v: Vec<&str> = s.iter().map(|x| x.name.as_str()).collect();
        v.sort_unstable();
        v
    }
    if a.is_empty() || names(a) != names(b) {
        return Err(Error::Config(format!(
            "reports do not share structure: [{}] vs [{}]",
            names(a).join(", "),
            names(b).join(", ")
        )));
    }
    Ok(a
        .iter()
        .map(|sa| {
            let sb = b.iter().find(|s| s.name == sa.name).expect("same names");
            ComparisonRow {
                name: sa.name.clone(),
                value_a: sa.value,
                value_b: sb.value,
                abs_diff: (sa.value - sb.value).abs(),
                pvalue_a: sa.pvalue,
                pvalue_b: sb.pvalue,
                both_significant: match (sa.pvalue, sb.pvalue) {
                    (Some(pa), Some(pb)) => Some(pa < alpha && pb < alpha),
                    _ => None,
                },
            }
        })
        .collect())
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let opt = |v: Option<f64>| v.map(g17).unwrap_or_default();
    let mut out = String::from("statistic,value_a,value_b,abs_diff,pvalue_a,pvalue_b,both_significant\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.name,
            g17(r.value_a),
            g17(r.value_b),
            g17(r.abs_diff),
            opt(r.pvalue_a),
            opt(r.pvalue_b),
            r.both_significant.map(|b| b.to_string()).unwrap_or_default()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_reference_settings() {
        let c = PipelineConfig::default();
        assert_eq!(c.k, 0.90);
        assert_eq!(c.scaling.taus, (1..=19).collect::<Vec<_>>());
        assert_eq!(c.scaling.q_grid, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]);
        assert_eq!(c.alpha, 0.05);
        assert_eq!(c.significance_mode, SignificanceMode::Filtered);
    }

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_taus("1..19").unwrap(), (1..=19).collect::<Vec<_>>());
        assert_eq!(parse_taus("1,2,4").unwrap(), vec![1, 2, 4]);
        assert!(parse_taus("5..1").is_err());
        assert_eq!(parse_q_grid("0.1:0.1:1.0").unwrap(), crate::scaling::default_q_grid());
        assert_eq!(parse_q_grid("0.5,1").unwrap(), vec![0.5, 1.0]);
        assert!(parse_q_grid("0.1:0:1").is_err());
    }

    #[test]
    fn config_text() {
        let c = PipelineConfig::from_text(
            "# demo\nsynth.kind = coupled\nsynth.stocks = 10\nsynth.days = 512\nalpha = 0.01\nmode = shuffled\n",
        )
        .unwrap();
        assert_eq!(c.alpha, 0.01);
        assert_eq!(c.mode, RunMode::Shuffled);
        assert_eq!(c.synth.as_ref().unwrap().kind, SynthKind::Coupled);
        c.validate().unwrap();
        assert!(PipelineConfig::from_text("bogus = 1\n").is_err());
        assert!(PipelineConfig::from_text("alpha 0.1\n").is_err());
        let both = PipelineConfig::from_text("returns = r.csv\nsynth.kind = cascade\n").unwrap();
        assert!(matches!(both.validate(), Err(Error::Config(_))));
        assert!(matches!(PipelineConfig::default().validate(), Err(Error::Config(_))));
    }

    #[test]
    fn compare_self_is_zero() {
        let s = vec![
            Statistic { name: "x".into(), value: 0.3, pvalue: Some(0.001) },
            Statistic { name: "r2".into(), value: 0.5, pvalue: None },
        ];
        let rows = compare_reports(&s, &s, 0.05).unwrap();
        assert!(rows.iter().all(|r| r.abs_diff == 0.0));
        assert_eq!(rows[0].both_significant, Some(true));
        assert_eq!(rows[1].both_significant, None);
        let other = vec![Statistic { name: "y".into(), value: 0.3, pvalue: None }];
        assert!(matches!(compare_reports(&s, &other, 0.05), Err(Error::Config(_))));
    }

    #[test]
    fn kv_parse() {
        let s = parse_report_kv("n_stocks=3\nfoo.value=0.5\nfoo.pvalue=0.01\nbar.value=1\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].pvalue, Some(0.01));
        assert_eq!(s[1].pvalue, None);
    }
}
