//! Structure-function scaling and the multiscaling proxies.
//!
//! For each moment order `q` the sample moment `E|r_τ|^q` of the τ-day
//! aggregated returns is regressed in log-log scale on τ. The slopes ζ(q)
//! are then fitted by `ζ(q) = A·q + B·q²` with no constant term; `B`
//! measures the curvature of ζ (zero for uniscaling series, negative for
//! concave ζ) and `A` the linear part.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::LabelledTable;
use crate::panel::ReturnPanel;
use crate::stats::fit_line;

/// Minimum number of aggregated observations required at every horizon.
pub const MIN_AGGREGATED_OBS: usize = 30;

/// `0.1, 0.2, …, 1.0`.
pub fn default_q_grid() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 10.0).collect()
}

/// `1, 2, …, 19` days.
pub fn default_taus() -> Vec<usize> {
    (1..=19).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingConfig {
    pub q_grid: Vec<f64>,
    pub taus: Vec<usize>,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            q_grid: default_q_grid(),
            taus: default_taus(),
        }
    }
}

impl ScalingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.q_grid.is_empty() {
            return Err(Error::Config("empty q grid".into()));
        }
        if let Some(q) = self.q_grid.iter().find(|q| !(**q > 0.0) || !q.is_finite()) {
            return Err(Error::Config(format!("moment order {} must be positive", q)));
        }
        if self.taus.len() < 3 {
            return Err(Error::Config("need at least 3 horizons".into()));
        }
        if self.taus[0] < 1 || self.taus.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "horizons must be >= 1 and strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// Overlapping τ-day sums of a daily return series.
pub fn aggregate_returns(returns: &[f64], tau: usize) -> Result<Vec<f64>> {
    if tau < 1 {
        return Err(Error::Estimation("horizon must be at least 1".into()));
    }
    if tau >= returns.len() {
        return Err(Error::Estimation(format!(
            "horizon {} not shorter than series length {}",
            tau,
            returns.len()
        )));
    }
    Ok(returns.windows(tau).map(|w| w.iter().sum()).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentCurve {
    pub q: f64,
    /// `(τ, E|r_τ|^q)` with τ strictly increasing.
    pub points: Vec<(usize, f64)>,
}

/// Sample absolute moments over the `q × τ` grid, one curve per `q`.
pub fn structure_function(returns: &[f64], q_grid: &[f64], taus: &[usize]) -> Result<Vec<MomentCurve>> {
    let max_tau = *taus.last().ok_or_else(|| Error::Config("no horizons".into()))?;
    if returns.len() < max_tau + MIN_AGGREGATED_OBS - 1 {
        return Err(Error::Estimation(format!(
            "series of length {} leaves fewer than {} aggregated observations at horizon {}",
            returns.len(),
            MIN_AGGREGATED_OBS,
            max_tau
        )));
    }
    let mut curves: Vec<MomentCurve> = q_grid
        .iter()
        .map(|&q| MomentCurve {
            q,
            points: Vec::with_capacity(taus.len()),
        })
        .collect();

    // agg[t] holds the sum of returns[t..t+width]; grown one day at a time,
    // which is the same left-to-right sum as aggregate_returns.
    let n = returns.len();
    let mut agg: Vec<f64> = returns.to_vec();
    let mut width = 1;
    let mut abs = Vec::with_capacity(n);
    for &tau in taus {
        while width < tau {
            for t in 0..n - width {
                agg[t] += returns[t + width];
            }
            width += 1;
        }
        let count = n - tau + 1;
        abs.clear();
        abs.extend(agg[..count].iter().map(|x| x.abs()));
        for curve in curves.iter_mut() {
            let q = curve.q;
            let moment = abs.iter().map(|a| a.powf(q)).sum::<f64>() / count as f64;
            if !(moment > 0.0) {
                return Err(Error::Estimation(format!(
                    "zero moment at q = {}, tau = {}",
                    q, tau
                )));
            }
            curve.points.push((tau, moment));
        }
    }
    Ok(curves)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZetaFit {
    pub zeta: Vec<f64>,
    pub ln_k: Vec<f64>,
    pub r2: Vec<f64>,
}

/// Log-log OLS slope (ζ) and intercept (ln K) of every moment curve.
pub fn estimate_zeta(curves: &[MomentCurve]) -> Result<ZetaFit> {
    let mut fit = ZetaFit {
        zeta: Vec::with_capacity(curves.len()),
        ln_k: Vec::with_capacity(curves.len()),
        r2: Vec::with_capacity(curves.len()),
    };
    for c in curves {
        if c.points.len() < 3 {
            return Err(Error::Estimation(format!(
                "moment curve for q = {} has {} points, need at least 3",
                c.q,
                c.points.len()
            )));
        }
        if let Some((tau, m)) = c.points.iter().find(|(_, m)| !(*m > 0.0)) {
            return Err(Error::Estimation(format!(
                "non-positive moment {} at q = {}, tau = {}",
                m, c.q, tau
            )));
        }
        let x: Vec<f64> = c.points.iter().map(|(tau, _)| (*tau as f64).ln()).collect();
        let y: Vec<f64> = c.points.iter().map(|(_, m)| m.ln()).collect();
        let line = fit_line(&x, &y).ok_or_else(|| {
            Error::Estimation(format!("singular log-log regression at q = {}", c.q))
        })?;
        fit.zeta.push(line.slope);
        fit.ln_k.push(line.intercept);
        fit.r2.push(line.r2());
    }
    Ok(fit)
}

/// Least-squares fit of `ζ = A·q + B·q²` through the origin.
/// Returns `(A, B, rss)`.
pub fn fit_proxies(q_grid: &[f64], zeta: &[f64]) -> Result<(f64, f64, f64)> {
    if q_grid.len() != zeta.len() {
        return Err(Error::Estimation(format!(
            "{} moment orders for {} exponents",
            q_grid.len(),
            zeta.len()
        )));
    }
    let mut distinct = q_grid.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::Estimation(
            "proxy fit needs at least 2 distinct moment orders".into(),
        ));
    }
    let (mut s2, mut s3, mut s4, mut s1z, mut s2z) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&q, &z) in q_grid.iter().zip(zeta) {
        let q2 = q * q;
        s2 += q2;
        s3 += q2 * q;
        s4 += q2 * q2;
        s1z += q * z;
        s2z += q2 * z;
    }
    let det = s2 * s4 - s3 * s3;
    if det.abs() <= f64::EPSILON * s2 * s4 {
        return Err(Error::Estimation("singular proxy normal equations".into()));
    }
    let a = (s1z * s4 - s3 * s2z) / det;
    let b = (s2 * s2z - s3 * s1z) / det;
    let rss = q_grid
        .iter()
        .zip(zeta)
        .map(|(&q, &z)| {
            let e = z - (a * q + b * q * q);
            e * e
        })
        .sum();
    Ok((a, b, rss))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingResult {
    pub q_grid: Vec<f64>,
    pub zeta: Vec<f64>,
    pub ln_k: Vec<f64>,
    pub a_hat: f64,
    pub b_hat: f64,
    pub fit_rss: f64,
    pub per_q_r2: Vec<f64>,
}

pub fn estimate_scaling(returns: &[f64], config: &ScalingConfig) -> Result<ScalingResult> {
    let curves = structure_function(returns, &config.q_grid, &config.taus)?;
    let z = estimate_zeta(&curves)?;
    let (a_hat, b_hat, fit_rss) = fit_proxies(&config.q_grid, &z.zeta)?;
    Ok(ScalingResult {
        q_grid: config.q_grid.clone(),
        zeta: z.zeta,
        ln_k: z.ln_k,
        a_hat,
        b_hat,
        fit_rss,
        per_q_r2: z.r2,
    })
}

/// Per-ticker proxies for a whole panel.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingTable {
    pub q_grid: Vec<f64>,
    pub tickers: Vec<String>,
    pub results: Vec<ScalingResult>,
}

impl ScalingTable {
    pub fn compute(panel: &ReturnPanel, config: &ScalingConfig) -> Result<Self> {
        config.validate()?;
        let results = panel
            .tickers
            .par_iter()
            .zip(panel.returns.par_iter())
            .map(|(t, col)| estimate_scaling(col, config).map_err(|e| e.for_ticker(t)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScalingTable {
            q_grid: config.q_grid.clone(),
            tickers: panel.tickers.clone(),
            results,
        })
    }

    pub fn get(&self, ticker: &str) -> Option<&ScalingResult> {
        self.tickers
            .iter()
            .position(|t| t == ticker)
            .map(|i| &self.results[i])
    }

    pub fn b_hat(&self) -> Vec<f64> {
        self.results.iter().map(|r| r.b_hat).collect()
    }

    pub fn a_hat(&self) -> Vec<f64> {
        self.results.iter().map(|r| r.a_hat).collect()
    }

    /// `ticker,A_hat,B_hat,fit_rss,zeta_<q>…,r2_<q>…`, with `q` in shortest
    /// round-trip form.
    pub fn to_csv(&self) -> String {
        let mut columns = vec!["A_hat".to_string(), "B_hat".into(), "fit_rss".into()];
        columns.extend(self.q_grid.iter().map(|q| format!("zeta_{}", q)));
        columns.extend(self.q_grid.iter().map(|q| format!("r2_{}", q)));
        let values = self
            .results
            .iter()
            .map(|r| {
                let mut row = vec![r.a_hat, r.b_hat, r.fit_rss];
                row.extend(&r.zeta);
                row.extend(&r.per_q_r2);
                row
            })
            .collect();
        LabelledTable {
            corner: "ticker".into(),
            columns,
            rows: self.tickers.clone(),
            values,
        }
        .to_csv()
    }

    /// Reads a table written by [`ScalingTable::to_csv`]. Intercepts are
    /// not serialized and come back as NaN.
    pub fn from_csv(text: &str) -> Result<Self> {
        let t = LabelledTable::parse(text)?;
        let bad = || Error::Data("scaling table header is not ticker,A_hat,B_hat,fit_rss,zeta_*,r2_*".into());
        if t.columns.len() < 5 || t.columns[0] != "A_hat" || t.columns[1] != "B_hat" || t.columns[2] != "fit_rss" {
            return Err(bad());
        }
        let rest = &t.columns[3..];
        if rest.len() % 2 != 0 {
            return Err(bad());
        }
        let nq = rest.len() / 2;
        let q_grid = rest[..nq]
            .iter()
            .map(|c| {
                c.strip_prefix("zeta_")
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(bad)
            })
            .collect::<Result<Vec<_>>>()?;
        let results = t
            .values
            .iter()
            .map(|row| ScalingResult {
                q_grid: q_grid.clone(),
                a_hat: row[0],
                b_hat: row[1],
                fit_rss: row[2],
                zeta: row[3..3 + nq].to_vec(),
                ln_k: vec![f64::NAN; nq],
                per_q_r2: row[3 + nq..].to_vec(),
            })
            .collect();
        Ok(ScalingTable {
            q_grid,
            tickers: t.rows,
            results,
        })
    }
}
