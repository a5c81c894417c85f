//! Synthetic markets with known ground truth.
//!
//! Random streams follow [`crate::seed`]: stream 0 drives the common
//! factor, stream `i + 1` drives stock `i`.

use chrono::{Datelike, NaiveDate, Weekday};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal, StudentT};

use crate::association::{build_report, AssociationReport};
use crate::crosscorr::{correlation_matrix, SignificanceMode};
use crate::error::{Error, Result};
use crate::panel::{median_capitalization, CapitalizationTable, ReturnPanel};
use crate::scaling::{ScalingConfig, ScalingTable};
use crate::seed;

/// Marginal law of a noise term, always standardized to unit variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    Gaussian,
    /// Student-t with `nu > 2` degrees of freedom.
    StudentT(f64),
}

impl Tail {
    fn validate(&self) -> Result<()> {
        match *self {
            Tail::StudentT(nu) if !(nu > 2.0) || !nu.is_finite() => Err(Error::Config(format!(
                "Student-t degrees of freedom must exceed 2, got {}",
                nu
            ))),
            _ => Ok(()),
        }
    }

    fn sampler(&self) -> TailSampler {
        match *self {
            Tail::Gaussian => TailSampler::Gaussian,
            Tail::StudentT(nu) => TailSampler::StudentT {
                dist: StudentT::new(nu).expect("validated nu"),
                scale: ((nu - 2.0) / nu).sqrt(),
            },
        }
    }
}

enum TailSampler {
    Gaussian,
    StudentT { dist: StudentT<f64>, scale: f64 },
}

impl TailSampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            TailSampler::Gaussian => rng.sample(StandardNormal),
            TailSampler::StudentT { dist, scale } => dist.sample(rng) * scale,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MarketKind {
    GaussianIid,
    StudentT { nu: f64 },
    /// `r_i = (β_i f + ε_i) / √(β_i² + 1)` with `f` and `ε_i` of law `tail`.
    OneFactor { betas: Vec<f64>, tail: Tail },
    /// `r(t) = σ(t) ε(t)`, σ a dyadic lognormal cascade with
    /// `ln W ~ N(−spread², spread²)` so that `E[W²] = 1`.
    Cascade { depth: u32, spread: f64 },
    /// Gaussian one-factor returns multiplied by an independent per-stock
    /// volatility draw, giving each stock a standardized Student-t marginal
    /// (or Gaussian) regardless of its loading.
    TailedFactor { betas: Vec<f64>, tails: Vec<Tail> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarketRecipe {
    pub n_stocks: usize,
    pub n_days: usize,
    pub seed: u64,
    pub kind: MarketKind,
}

/// Smallest panel length accepted by [`MarketRecipe::validate`].
pub const MIN_DAYS: usize = 64;

impl MarketRecipe {
    pub fn new(n_stocks: usize, n_days: usize, seed: u64, kind: MarketKind) -> Self {
        MarketRecipe {
            n_stocks,
            n_days,
            seed,
            kind,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_stocks < 2 {
            return Err(Error::Config(format!("need at least 2 stocks, got {}", self.n_stocks)));
        }
        if self.n_days < MIN_DAYS {
            return Err(Error::Config(format!(
                "need at least {} days, got {}",
                MIN_DAYS, self.n_days
            )));
        }
        let check_betas = |betas: &[f64]| {
            if betas.len() != self.n_stocks {
                return Err(Error::Config(format!(
                    "{} loadings for {} stocks",
                    betas.len(),
                    self.n_stocks
                )));
            }
            if betas.iter().any(|b| !b.is_finite()) {
                return Err(Error::Config("non-finite factor loading".into()));
            }
            Ok(())
        };
        match &self.kind {
            MarketKind::GaussianIid => Ok(()),
            MarketKind::StudentT { nu } => Tail::StudentT(*nu).validate(),
            MarketKind::OneFactor { betas, tail } => {
                check_betas(betas)?;
                tail.validate()
            }
            MarketKind::Cascade { depth, spread } => {
                if *depth < 1 || *depth > 40 || (1usize << depth) > self.n_days {
                    return Err(Error::Config(format!(
                        "cascade depth {} needs 1 <= depth and 2^depth <= {} days",
                        depth, self.n_days
                    )));
                }
                if !(*spread >= 0.0) || !spread.is_finite() {
                    return Err(Error::Config(format!("cascade spread {} must be >= 0", spread)));
                }
                Ok(())
            }
            MarketKind::TailedFactor { betas, tails } => {
                check_betas(betas)?;
                if tails.len() != self.n_stocks {
                    return Err(Error::Config(format!(
                        "{} tail laws for {} stocks",
                        tails.len(),
                        self.n_stocks
                    )));
                }
                tails.iter().try_for_each(Tail::validate)
            }
        }
    }

    pub fn tickers(&self) -> Vec<String> {
        let width = self.n_stocks.to_string().len().max(4);
        (1..=self.n_stocks).map(|i| format!("S{:0w$}", i, w = width)).collect()
    }

    /// Synthetic median capitalizations for factor markets,
    /// `ln cap_i = 18 + 2 β_i`; `None` for other kinds.
    pub fn capitalizations(&self) -> Option<CapitalizationTable> {
        let betas = match &self.kind {
            MarketKind::OneFactor { betas, .. } | MarketKind::TailedFactor { betas, .. } => betas,
            _ => return None,
        };
        let records: Vec<(String, Vec<f64>)> = self
            .tickers()
            .into_iter()
            .zip(betas)
            .map(|(t, b)| (t, vec![(18.0 + 2.0 * b).exp()]))
            .collect();
        Some(median_capitalization(&records).expect("positive synthetic caps"))
    }
}

/// Consecutive weekdays starting on Tuesday 2000-01-04.
pub fn business_days(n: usize) -> Vec<NaiveDate> {
    let mut d = NaiveDate::from_ymd_opt(2000, 1, 4).expect("valid date");
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d.succ_opt().expect("date in range");
    }
    out
}

pub fn generate(recipe: &MarketRecipe) -> Result<ReturnPanel> {
    recipe.validate()?;
    let n = recipe.n_stocks;
    let t = recipe.n_days;
    let s = recipe.seed;
    let stock_rng = |i: usize| seed::stream(s, i as u64 + 1);

    let columns: Vec<Vec<f64>> = match &recipe.kind {
        MarketKind::GaussianIid => (0..n)
            .map(|i| {
                let mut rng = stock_rng(i);
                (0..t).map(|_| rng.sample(StandardNormal)).collect()
            })
            .collect(),
        MarketKind::StudentT { nu } => {
            let law = Tail::StudentT(*nu).sampler();
            (0..n)
                .map(|i| {
                    let mut rng = stock_rng(i);
                    (0..t).map(|_| law.draw(&mut rng)).collect()
                })
                .collect()
        }
        MarketKind::OneFactor { betas, tail } => {
            let law = tail.sampler();
            let mut frng = seed::stream(s, 0);
            let factor: Vec<f64> = (0..t).map(|_| law.draw(&mut frng)).collect();
            betas
                .iter()
                .enumerate()
                .map(|(i, &b)| {
                    let mut rng = stock_rng(i);
                    let norm = (b * b + 1.0).sqrt();
                    factor.iter().map(|f| (b * f + law.draw(&mut rng)) / norm).collect()
                })
                .collect()
        }
        MarketKind::Cascade { depth, spread } => (0..n)
            .map(|i| {
                let mut rng = stock_rng(i);
                let mut out = Vec::with_capacity(t);
                while out.len() < t {
                    let sigma = cascade(&mut rng, *depth, *spread);
                    for v in sigma {
                        if out.len() == t {
                            break;
                        }
                        let e: f64 = rng.sample(StandardNormal);
                        out.push(v * e);
                    }
                }
                out
            })
            .collect(),
        MarketKind::TailedFactor { betas, tails } => {
            let mut frng = seed::stream(s, 0);
            let factor: Vec<f64> = (0..t).map(|_| frng.sample(StandardNormal)).collect();
            betas
                .iter()
                .zip(tails)
                .enumerate()
                .map(|(i, (&b, tail))| {
                    let mut rng = stock_rng(i);
                    let norm = (b * b + 1.0).sqrt();
                    let chi = match *tail {
                        Tail::StudentT(nu) => Some((nu, ChiSquared::new(nu).expect("validated nu"))),
                        Tail::Gaussian => None,
                    };
                    factor
                        .iter()
                        .map(|f| {
                            let e: f64 = rng.sample(StandardNormal);
                            let g = (b * f + e) / norm;
                            match &chi {
                                Some((nu, c)) => g * ((nu - 2.0) / c.sample(&mut rng)).sqrt(),
                                None => g,
                            }
                        })
                        .collect()
                })
                .collect()
        }
    };

    ReturnPanel::from_raw(business_days(t), recipe.tickers(), columns)
}

/// One dyadic cascade of `2^depth` amplitudes.
fn cascade(rng: &mut ChaCha8Rng, depth: u32, spread: f64) -> Vec<f64> {
    let len = 1usize << depth;
    let mut sigma = vec![1.0; len];
    let mu = -spread * spread;
    for level in 1..=depth {
        let blocks = 1usize << level;
        let width = len / blocks;
        for b in 0..blocks {
            let z: f64 = rng.sample(StandardNormal);
            let w = (mu + spread * z).exp();
            for v in &mut sigma[b * width..(b + 1) * width] {
                *v *= w;
            }
        }
    }
    sigma
}

/// Market families for the end-to-end positive and negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecipeFamily {
    /// Loadings rise across stocks while tails lighten: heavy tails go
    /// with weak factor exposure.
    Coupled,
    /// Same loadings, one common tail law for every stock.
    Uncoupled,
}

pub const FAMILY_BETA_RANGE: (f64, f64) = (0.2, 1.5);
pub const COUPLED_NU_RANGE: (f64, f64) = (3.0, 20.0);
pub const UNCOUPLED_NU: f64 = 4.0;

pub fn evenly_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn family_recipe(family: RecipeFamily, n_stocks: usize, n_days: usize, seed: u64) -> MarketRecipe {
    let betas = evenly_spaced(FAMILY_BETA_RANGE.0, FAMILY_BETA_RANGE.1, n_stocks);
    let tails = match family {
        RecipeFamily::Coupled => evenly_spaced(COUPLED_NU_RANGE.0, COUPLED_NU_RANGE.1, n_stocks)
            .into_iter()
            .map(Tail::StudentT)
            .collect(),
        RecipeFamily::Uncoupled => vec![Tail::StudentT(UNCOUPLED_NU); n_stocks],
    };
    MarketRecipe::new(n_stocks, n_days, seed, MarketKind::TailedFactor { betas, tails })
}

/// Generates the market, estimates proxies and average correlations and
/// returns the association report.
pub fn stylized_fact_experiment(
    recipe: &MarketRecipe,
    scaling: &ScalingConfig,
    alpha: f64,
    mode: SignificanceMode,
) -> Result<AssociationReport> {
    let panel = generate(recipe)?;
    let table = ScalingTable::compute(&panel, scaling)?;
    let corr = correlation_matrix(&panel, alpha, mode)?;
    let caps = recipe.capitalizations().unwrap_or_default();
    build_report(&table, &corr.rho_bar_table(), &caps)
}
