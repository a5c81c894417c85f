//! Pearson correlation matrix, significance and average cross-correlation.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::{g17, LabelledTable};
use crate::panel::ReturnPanel;
use crate::stats::correlation_pvalue;

pub const DEFAULT_ALPHA: f64 = 0.05;

/// How coefficients enter the per-stock average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignificanceMode {
    /// Every coefficient is averaged.
    All,
    /// Coefficients with p-value >= alpha count as zero.
    #[default]
    Filtered,
}

impl fmt::Display for SignificanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignificanceMode::All => "all",
            SignificanceMode::Filtered => "filtered",
        })
    }
}

impl FromStr for SignificanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => Ok(SignificanceMode::All),
            "filtered" => Ok(SignificanceMode::Filtered),
            other => Err(Error::Config(format!(
                "significance mode must be 'all' or 'filtered', got {:?}",
                other
            ))),
        }
    }
}

/// Sample product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Estimation(format!(
            "pearson on series of lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::Estimation("pearson needs at least 3 observations".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if !(sxx > 0.0) || !(syy > 0.0) {
        return Err(Error::UndefinedCorrelation("constant input series".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Two-sided p-value of `rho` estimated on `n` pairs (t test, n − 2 df).
pub fn pearson_pvalue(rho: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::Estimation(format!(
            "correlation p-value needs n >= 3, got {}",
            n
        )));
    }
    correlation_pvalue(rho, n - 2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSummary {
    pub tickers: Vec<String>,
    pub n_obs: usize,
    /// Row-major `N × N`.
    pub rho: Vec<f64>,
    /// Row-major `N × N`, zero on the diagonal.
    pub pvalue: Vec<f64>,
    pub rho_bar: Vec<f64>,
    pub mode: SignificanceMode,
    pub alpha: f64,
}

impl CorrelationSummary {
    pub fn n(&self) -> usize {
        self.tickers.len()
    }

    pub fn rho(&self, i: usize, j: usize) -> f64 {
        self.rho[i * self.n() + j]
    }

    pub fn pvalue(&self, i: usize, j: usize) -> f64 {
        self.pvalue[i * self.n() + j]
    }

    pub fn rho_bar_table(&self) -> RhoBar {
        RhoBar {
            tickers: self.tickers.clone(),
            values: self.rho_bar.clone(),
        }
    }

    pub fn rho_csv(&self) -> String {
        self.matrix_csv(&self.rho)
    }

    pub fn pvalue_csv(&self) -> String {
        self.matrix_csv(&self.pvalue)
    }

    fn matrix_csv(&self, m: &[f64]) -> String {
        let n = self.n();
        LabelledTable {
            corner: "ticker".into(),
            columns: self.tickers.clone(),
            rows: self.tickers.clone(),
            values: (0..n).map(|i| m[i * n..(i + 1) * n].to_vec()).collect(),
        }
        .to_csv()
    }
}

/// Average cross-correlation per ticker.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoBar {
    pub tickers: Vec<String>,
    pub values: Vec<f64>,
}

impl RhoBar {
    pub fn get(&self, ticker: &str) -> Option<f64> {
        self.tickers
            .iter()
            .position(|t| t == ticker)
            .map(|i| self.values[i])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("ticker,rho_bar\n");
        for (t, v) in self.tickers.iter().zip(&self.values) {
            out.push_str(&format!("{},{}\n", t, g17(*v)));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let t = LabelledTable::parse(text)?;
        if t.columns.len() != 1 {
            return Err(Error::Data("rho_bar file must have two columns".into()));
        }
        Ok(RhoBar {
            tickers: t.rows,
            values: t.values.into_iter().map(|r| r[0]).collect(),
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four fixed lanes, combined in a fixed order
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for k in 0..chunks {
        let i = 4 * k;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Full correlation and p-value matrices plus the per-stock average
/// `ρ̄_i = Σ_{j≠i} ρ_ij / (N − 1)`.
pub fn correlation_matrix(panel: &ReturnPanel, alpha: f64, mode: SignificanceMode) -> Result<CorrelationSummary> {
    let n = panel.n_tickers();
    let t = panel.n_obs();
    if n < 2 {
        return Err(Error::Estimation(format!(
            "correlation matrix needs at least 2 stocks, got {}",
            n
        )));
    }
    if t < 3 {
        return Err(Error::Estimation(format!(
            "correlation matrix needs at least 3 observations, got {}",
            t
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", alpha)));
    }

    // centred, unit-norm columns
    let unit: Vec<Vec<f64>> = panel
        .tickers
        .par_iter()
        .zip(panel.returns.par_iter())
        .map(|(ticker, col)| {
            let m = col.iter().sum::<f64>() / t as f64;
            let centred: Vec<f64> = col.iter().map(|x| x - m).collect();
            let ss: f64 = centred.iter().map(|x| x * x).sum();
            if !(ss > 0.0) {
                return Err(Error::UndefinedCorrelation(format!("constant return column {}", ticker)));
            }
            let norm = ss.sqrt();
            Ok(centred.into_iter().map(|x| x / norm).collect())
        })
        .collect::<Result<_>>()?;

    let upper: Vec<Vec<(f64, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..n)
                .map(|j| {
                    let r = dot(&unit[i], &unit[j]).clamp(-1.0, 1.0);
                    let p = pearson_pvalue(r, t).expect("validated sample size");
                    (r, p)
                })
                .collect()
        })
        .collect();

    let mut rho = vec![0.0; n * n];
    let mut pvalue = vec![0.0; n * n];
    for i in 0..n {
        rho[i * n + i] = 1.0;
        for (k, &(r, p)) in upper[i].iter().enumerate() {
            let j = i + 1 + k;
            rho[i * n + j] = r;
            rho[j * n + i] = r;
            pvalue[i * n + j] = p;
            pvalue[j * n + i] = p;
        }
    }

    let rho_bar = (0..n)
        .map(|i| {
            let s: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let r = rho[i * n + j];
                    match mode {
                        SignificanceMode::Filtered if pvalue[i * n + j] >= alpha => 0.0,
                        _ => r,
                    }
                })
                .sum();
            s / (n - 1) as f64
        })
        .collect();

    Ok(CorrelationSummary {
        tickers: panel.tickers.clone(),
        n_obs: t,
        rho,
        pvalue,
        rho_bar,
        mode,
        alpha,
    })
}
