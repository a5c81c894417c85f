//! Dependence between per-stock statistics: Kendall τ, Pearson against
//! log-capitalization, partial correlation with log-capitalization as
//! control, and R² of the auxiliary fits.

use std::cmp::Ordering;

use crate::crosscorr::{pearson, pearson_pvalue, RhoBar};
use crate::error::{Error, Result};
use crate::format::{dec3, g17};
use crate::panel::CapitalizationTable;
use crate::scaling::ScalingTable;
use crate::stats::{correlation_pvalue, fit_line, normal_two_sided};

/// A coefficient with its two-sided p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tested {
    pub value: f64,
    pub pvalue: f64,
}

/// Pair counts behind Kendall's tau-b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KendallCounts {
    pub n: u64,
    /// Concordant minus discordant pairs.
    pub s: i64,
    /// Pairs tied in x.
    pub ties_x: u64,
    /// Pairs tied in y.
    pub ties_y: u64,
}

impl KendallCounts {
    pub fn tau_b(&self) -> f64 {
        let n0 = self.n * (self.n - 1) / 2;
        let dx = (n0 - self.ties_x) as f64;
        let dy = (n0 - self.ties_y) as f64;
        self.s as f64 / (dx * dy).sqrt()
    }
}

fn cmp(a: f64, b: f64) -> Ordering {
    a.total_cmp(&b)
}

/// Sum of `t(t−1)/2`, `t(t−1)(t−2)` and `t(t−1)(2t+5)` over runs of equal
/// values in a sorted slice.
fn tie_sums(sorted: &[f64]) -> (u64, f64, f64) {
    let (mut pairs, mut v2, mut v1) = (0u64, 0.0, 0.0);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as u64;
        pairs += t * (t - 1) / 2;
        let tf = t as f64;
        v2 += tf * (tf - 1.0) * (tf - 2.0);
        v1 += tf * (tf - 1.0) * (2.0 * tf + 5.0);
        i = j;
    }
    (pairs, v2, v1)
}

/// Sorts `v` ascending and returns the number of strict inversions.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid], &mut buf[..mid]);
    swaps += merge_count(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if cmp(v[j], v[i]) == Ordering::Less {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

fn check_pair(x: &[f64], y: &[f64], min: usize, what: &str) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Estimation(format!(
            "{}: lengths {} and {} differ",
            what,
            x.len(),
            y.len()
        )));
    }
    if x.len() < min {
        return Err(Error::Estimation(format!(
            "{} needs at least {} observations, got {}",
            what,
            min,
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::Estimation(format!("{}: NaN input", what)));
    }
    Ok(())
}

/// Pair counts in O(n log n): sort by (x, y), then count inversions of y.
pub fn kendall_counts(x: &[f64], y: &[f64]) -> Result<KendallCounts> {
    check_pair(x, y, 2, "kendall tau")?;
    // -0.0 and 0.0 must tie under both `==` and `total_cmp`
    let x: Vec<f64> = x.iter().map(|v| v + 0.0).collect();
    let y: Vec<f64> = y.iter().map(|v| v + 0.0).collect();
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| cmp(x[a], x[b]).then(cmp(y[a], y[b])));

    let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();

    let (ties_x, _, _) = tie_sums(&xs);
    let mut ties_xy = 0u64;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && xs[j] == xs[i] && ys[j] == ys[i] {
            j += 1;
        }
        let t = (j - i) as u64;
        ties_xy += t * (t - 1) / 2;
        i = j;
    }

    let mut buf = vec![0.0; n];
    let discordant = merge_count(&mut ys, &mut buf);
    let (ties_y, _, _) = tie_sums(&ys);

    let n0 = (n as u64) * (n as u64 - 1) / 2;
    let concordant = n0 + ties_xy - ties_x - ties_y - discordant;
    Ok(KendallCounts {
        n: n as u64,
        s: concordant as i64 - discordant as i64,
        ties_x,
        ties_y,
    })
}

/// Kendall tau-b with a two-sided normal-approximation p-value (variance
/// corrected for ties).
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<Tested> {
    let counts = kendall_counts(x, y)?;
    let n0 = counts.n * (counts.n - 1) / 2;
    if counts.ties_x == n0 || counts.ties_y == n0 {
        return Err(Error::UndefinedRank(
            "all values tied in one argument".into(),
        ));
    }
    let tau = counts.tau_b().clamp(-1.0, 1.0);

    let mut xs: Vec<f64> = x.iter().map(|v| v + 0.0).collect();
    xs.sort_by(|a, b| cmp(*a, *b));
    let mut ys: Vec<f64> = y.iter().map(|v| v + 0.0).collect();
    ys.sort_by(|a, b| cmp(*a, *b));
    let (tx, x2, x1) = tie_sums(&xs);
    let (ty, y2, y1) = tie_sums(&ys);
    let n = counts.n as f64;
    let m1 = n * (n - 1.0);
    let mut var = (m1 * (2.0 * n + 5.0) - x1 - y1) / 18.0 + 2.0 * (tx as f64) * (ty as f64) / m1;
    if counts.n > 2 {
        var += x2 * y2 / (9.0 * m1 * (n - 2.0));
    }
    let z = counts.s as f64 / var.sqrt();
    Ok(Tested {
        value: tau,
        pvalue: normal_two_sided(z),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    pub r2: f64,
}

/// Least-squares line of `y` on `x`. A constant response gives r2 = 0.
pub fn simple_ols(x: &[f64], y: &[f64]) -> Result<OlsFit> {
    check_pair(x, y, 3, "simple OLS")?;
    let line = fit_line(x, y).ok_or_else(|| Error::SingularFit("constant predictor".into()))?;
    let residuals = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| yi - (line.intercept + line.slope * xi))
        .collect();
    Ok(OlsFit {
        slope: line.slope,
        intercept: line.intercept,
        residuals,
        r2: line.r2(),
    })
}

/// Pearson correlation of the residuals of `a` and `b` after regressing
/// each on `control`; p-value from the t test with n − 3 degrees of freedom.
pub fn partial_correlation(a: &[f64], b: &[f64], control: &[f64]) -> Result<Tested> {
    check_pair(a, b, 4, "partial correlation")?;
    check_pair(a, control, 4, "partial correlation")?;
    let ra = simple_ols(control, a)?;
    let rb = simple_ols(control, b)?;
    let r = pearson(&ra.residuals, &rb.residuals)?;
    let p = correlation_pvalue(r, a.len() - 3)?;
    Ok(Tested { value: r, pvalue: p })
}

/// Statistics computed on stocks that have a capitalization.
#[derive(Debug, Clone, PartialEq)]
pub struct CapitalizationBlock {
    pub n_used: usize,
    pub pearson_b_lncap: Tested,
    pub pearson_rho_bar_lncap: Tested,
    pub partial_rho_bar_b: Tested,
    pub r2_rho_bar: f64,
    pub r2_b_hat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationReport {
    pub n_stocks: usize,
    pub kendall_b_rho_bar: Tested,
    pub kendall_a_rho_bar: Tested,
    /// `None` when fewer than 4 stocks carry a capitalization.
    pub capitalization: Option<CapitalizationBlock>,
}

/// Minimum number of capitalized stocks for the capitalization block.
pub const MIN_CAPITALIZED: usize = 4;

/// One named statistic in a report; `pvalue` is absent for R².
#[derive(Debug, Clone, PartialEq)]
pub struct Statistic {
    pub name: String,
    pub value: f64,
    pub pvalue: Option<f64>,
}

impl AssociationReport {
    pub fn n_used(&self) -> usize {
        self.capitalization.as_ref().map_or(0, |c| c.n_used)
    }

    pub fn statistics(&self) -> Vec<Statistic> {
        let tested = |name: &str, t: &Tested| Statistic {
            name: name.into(),
            value: t.value,
            pvalue: Some(t.pvalue),
        };
        let mut out = vec![
            tested("kendall_B_rho_bar", &self.kendall_b_rho_bar),
            tested("kendall_A_rho_bar", &self.kendall_a_rho_bar),
        ];
        if let Some(c) = &self.capitalization {
            out.push(tested("pearson_B_lncap", &c.pearson_b_lncap));
            out.push(tested("pearson_rho_bar_lncap", &c.pearson_rho_bar_lncap));
            out.push(tested("partial_rho_bar_B_given_lncap", &c.partial_rho_bar_b));
            for (name, v) in [("r2_rho_bar_lncap", c.r2_rho_bar), ("r2_B_lncap", c.r2_b_hat)] {
                out.push(Statistic {
                    name: name.into(),
                    value: v,
                    pvalue: None,
                });
            }
        }
        out
    }

    /// Machine-readable `key=value` lines at full precision.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("n_stocks={}\n", self.n_stocks));
        out.push_str(&format!("n_used={}\n", self.n_used()));
        out.push_str(&format!(
            "capitalization_block={}\n",
            if self.capitalization.is_some() { "available" } else { "unavailable" }
        ));
        for s in self.statistics() {
            out.push_str(&format!("{}.value={}\n", s.name, g17(s.value)));
            if let Some(p) = s.pvalue {
                out.push_str(&format!("{}.pvalue={}\n", s.name, g17(p)));
            }
        }
        out
    }

    /// Human-readable blocks, one per table analogue.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let line = |out: &mut String, label: &str, t: &Tested| {
            out.push_str(&format!(
                "  {:<10} {:>8}  p-value {}   (full: {} , p = {})\n",
                label,
                dec3(t.value),
                dec3(t.pvalue),
                g17(t.value),
                g17(t.pvalue)
            ));
        };
        out.push_str(&format!("stocks: {}\n\n", self.n_stocks));
        out.push_str("Kendall tau between B_hat and rho_bar\n");
        line(&mut out, "tau", &self.kendall_b_rho_bar);
        out.push_str("\nKendall tau between A_hat and rho_bar\n");
        line(&mut out, "tau", &self.kendall_a_rho_bar);
        match &self.capitalization {
            None => {
                out.push_str(&format!(
                    "\nCapitalization analyses unavailable (fewer than {} stocks with capitalization)\n",
                    MIN_CAPITALIZED
                ));
            }
            Some(c) => {
                out.push_str(&format!("\nStocks with capitalization: {}\n", c.n_used));
                out.push_str("\nPearson correlation between B_hat and ln(capitalization)\n");
                line(&mut out, "rho", &c.pearson_b_lncap);
                out.push_str("\nPearson correlation between rho_bar and ln(capitalization)\n");
                line(&mut out, "rho", &c.pearson_rho_bar_lncap);
                out.push_str("\nPartial correlation between rho_bar and B_hat given ln(capitalization)\n");
                line(&mut out, "rho_par", &c.partial_rho_bar_b);
                out.push_str(&format!(
                    "  R2 rho_bar ~ ln(cap) {}   (full: {})\n",
                    dec3(c.r2_rho_bar),
                    g17(c.r2_rho_bar)
                ));
                out.push_str(&format!(
                    "  R2 B_hat ~ ln(cap)   {}   (full: {})\n",
                    dec3(c.r2_b_hat),
                    g17(c.r2_b_hat)
                ));
            }
        }
        out
    }
}

/// Association statistics over the tickers present in both `scaling` and
/// `rho_bar`, in `scaling` order.
pub fn build_report(scaling: &ScalingTable, rho_bar: &RhoBar, caps: &CapitalizationTable) -> Result<AssociationReport> {
    let mut b = Vec::new();
    let mut a = Vec::new();
    let mut rb = Vec::new();
    let mut lncap = Vec::new();
    for (ticker, res) in scaling.tickers.iter().zip(&scaling.results) {
        if let Some(r) = rho_bar.get(ticker) {
            b.push(res.b_hat);
            a.push(res.a_hat);
            rb.push(r);
            lncap.push(caps.ln_cap(ticker));
        }
    }
    if b.is_empty() {
        return Err(Error::Config(
            "scaling table and rho_bar share no tickers".into(),
        ));
    }
    let kendall_b_rho_bar = kendall_tau(&b, &rb)?;
    let kendall_a_rho_bar = kendall_tau(&a, &rb)?;

    let with_cap: Vec<usize> = (0..b.len()).filter(|&i| lncap[i].is_some()).collect();
    let capitalization = if with_cap.len() >= MIN_CAPITALIZED {
        let pick = |v: &[f64]| with_cap.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let cb = pick(&b);
        let cr = pick(&rb);
        let cc: Vec<f64> = with_cap.iter().map(|&i| lncap[i].expect("filtered")).collect();
        let n = cb.len();
        let pb = pearson(&cb, &cc)?;
        let pr = pearson(&cr, &cc)?;
        Some(CapitalizationBlock {
            n_used: n,
            pearson_b_lncap: Tested {
                value: pb,
                pvalue: pearson_pvalue(pb, n)?,
            },
            pearson_rho_bar_lncap: Tested {
                value: pr,
                pvalue: pearson_pvalue(pr, n)?,
            },
            partial_rho_bar_b: partial_correlation(&cr, &cb, &cc)?,
            r2_rho_bar: simple_ols(&cc, &cr)?.r2,
            r2_b_hat: simple_ols(&cc, &cb)?.r2,
        })
    } else {
        None
    };

    Ok(AssociationReport {
        n_stocks: b.len(),
        kendall_b_rho_bar,
        kendall_a_rho_bar,
        capitalization,
    })
}
