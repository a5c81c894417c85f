//! Price ingestion, gap filling and return panels.
//!
//! Raw records are `ticker,date,close` lines. Cleaning keeps every series
//! at least `k` times as long as the longest one, starts the panel at the
//! latest first date among the survivors, uses the union of their trading
//! dates as the reference axis and drags the last available price over
//! every gap.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::format::{g17, parse_f64, LabelledTable};

/// Default length threshold for [`preprocess`].
pub const DEFAULT_K: f64 = 0.90;

#[derive(Debug, Clone, PartialEq)]
pub struct RawPriceSeries {
    pub ticker: String,
    /// Strictly increasing dates, strictly positive prices.
    pub observations: Vec<(NaiveDate, f64)>,
}

impl RawPriceSeries {
    pub fn new(ticker: impl Into<String>, mut observations: Vec<(NaiveDate, f64)>) -> Result<Self> {
        let ticker = ticker.into();
        observations.sort_by_key(|(d, _)| *d);
        for w in observations.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Data(format!(
                    "duplicate date {} for ticker {}",
                    w[0].0, ticker
                )));
            }
        }
        if let Some((d, p)) = observations.iter().find(|(_, p)| !(*p > 0.0) || !p.is_finite()) {
            return Err(Error::Data(format!(
                "non-positive price {} on {} for ticker {}",
                p, d, ticker
            )));
        }
        Ok(RawPriceSeries {
            ticker,
            observations,
        })
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

/// One parsed `ticker,date,value` line; `value` is `None` for an empty or
/// `NA` field.
#[derive(Debug, Clone)]
struct Record {
    row: usize,
    ticker: String,
    date: NaiveDate,
    value: Option<f64>,
}

fn parse_records(text: &str, allow_missing: bool) -> Result<Vec<Record>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            row: i + 1,
            msg: e.to_string(),
        })?;
        let row = rec.position().map(|p| p.line() as usize).unwrap_or(i + 1);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if out.is_empty() && !rec.is_empty() && rec[0].eq_ignore_ascii_case("ticker") {
            continue;
        }
        if rec.len() != 3 {
            return Err(Error::Parse {
                row,
                msg: format!("expected 3 fields (ticker, date, value), found {}", rec.len()),
            });
        }
        let ticker = rec[0].to_string();
        if ticker.is_empty() {
            return Err(Error::Parse {
                row,
                msg: "empty ticker".into(),
            });
        }
        let date = NaiveDate::parse_from_str(&rec[1], "%Y-%m-%d").map_err(|_| Error::Parse {
            row,
            msg: format!("not an ISO-8601 date: {:?}", &rec[1]),
        })?;
        let raw = &rec[2];
        let value = if allow_missing && (raw.is_empty() || raw.eq_ignore_ascii_case("na")) {
            None
        } else {
            Some(parse_f64(raw, row)?)
        };
        out.push(Record {
            row,
            ticker,
            date,
            value,
        });
    }
    Ok(out)
}

/// Parses one or more price sources into per-ticker series, sorted by
/// ticker. Tickers may be split across sources but a `(ticker, date)` pair
/// must appear only once overall.
pub fn load_prices<S: AsRef<str>>(sources: &[S]) -> Result<Vec<RawPriceSeries>> {
    let mut by_ticker: BTreeMap<String, Vec<(NaiveDate, f64)>> = BTreeMap::new();
    let mut seen: HashMap<(String, NaiveDate), usize> = HashMap::new();
    for text in sources {
        for rec in parse_records(text.as_ref(), false)? {
            let price = rec.value.expect("prices are never missing");
            if !(price > 0.0) || !price.is_finite() {
                return Err(Error::Data(format!(
                    "row {}: non-positive close {} for {}",
                    rec.row, price, rec.ticker
                )));
            }
            if let Some(prev) = seen.insert((rec.ticker.clone(), rec.date), rec.row) {
                return Err(Error::Data(format!(
                    "row {}: duplicate record ({}, {}) first seen at row {}",
                    rec.row, rec.ticker, rec.date, prev
                )));
            }
            by_ticker.entry(rec.ticker).or_default().push((rec.date, price));
        }
    }
    by_ticker
        .into_iter()
        .map(|(t, obs)| RawPriceSeries::new(t, obs))
        .collect()
}

/// A complete date × ticker price matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    pub dates: Vec<NaiveDate>,
    pub tickers: Vec<String>,
    /// Column-major: `prices[ticker][date]`.
    pub prices: Vec<Vec<f64>>,
    /// `fill_mask[ticker][date]` is true where the price was dragged forward.
    pub fill_mask: Vec<Vec<bool>>,
}

impl PricePanel {
    pub fn n_dates(&self) -> usize {
        self.dates.len()
    }

    pub fn n_tickers(&self) -> usize {
        self.tickers.len()
    }

    /// Every column as a dense series over the panel's date axis.
    pub fn as_series(&self) -> Vec<RawPriceSeries> {
        self.tickers
            .iter()
            .zip(&self.prices)
            .map(|(t, col)| RawPriceSeries {
                ticker: t.clone(),
                observations: self.dates.iter().copied().zip(col.iter().copied()).collect(),
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        self.table(|i, t| self.prices[i][t]).to_csv()
    }

    pub fn fill_mask_csv(&self) -> String {
        let mut out = String::from("date");
        for t in &self.tickers {
            out.push(',');
            out.push_str(t);
        }
        out.push('\n');
        for (t, d) in self.dates.iter().enumerate() {
            out.push_str(&d.to_string());
            for col in &self.fill_mask {
                out.push_str(if col[t] { ",1" } else { ",0" });
            }
            out.push('\n');
        }
        out
    }

    fn table(&self, value: impl Fn(usize, usize) -> f64) -> LabelledTable {
        LabelledTable {
            corner: "date".into(),
            columns: self.tickers.clone(),
            rows: self.dates.iter().map(|d| d.to_string()).collect(),
            values: (0..self.n_dates())
                .map(|t| (0..self.n_tickers()).map(|i| value(i, t)).collect())
                .collect(),
        }
    }

    /// Reads a panel written by [`PricePanel::to_csv`], with an optional
    /// fill mask written by [`PricePanel::fill_mask_csv`].
    pub fn from_csv(prices: &str, fill_mask: Option<&str>) -> Result<Self> {
        let table = LabelledTable::parse(prices)?;
        let dates = parse_dates(&table.rows)?;
        let (n, m) = (table.rows.len(), table.columns.len());
        let mut cols = vec![Vec::with_capacity(n); m];
        for (t, row) in table.values.iter().enumerate() {
            for (i, &v) in row.iter().enumerate() {
                if !(v > 0.0) {
                    return Err(Error::Data(format!(
                        "non-positive price {} for {} at {}",
                        v, table.columns[i], dates[t]
                    )));
                }
                cols[i].push(v);
            }
        }
        let mask = match fill_mask {
            Some(text) => {
                let mt = LabelledTable::parse(text)?;
                if mt.columns != table.columns || mt.rows != table.rows {
                    return Err(Error::Data("fill mask does not match the price panel".into()));
                }
                let mut mcols = vec![Vec::with_capacity(n); m];
                for row in &mt.values {
                    for (i, &v) in row.iter().enumerate() {
                        mcols[i].push(v != 0.0);
                    }
                }
                mcols
            }
            None => vec![vec![false; n]; m],
        };
        check_increasing(&dates)?;
        Ok(PricePanel {
            dates,
            tickers: table.columns,
            prices: cols,
            fill_mask: mask,
        })
    }
}

fn parse_dates(labels: &[String]) -> Result<Vec<NaiveDate>> {
    labels
        .iter()
        .enumerate()
        .map(|(i, s)| {
            NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| Error::Parse {
                row: i + 2,
                msg: format!("not an ISO-8601 date: {:?}", s),
            })
        })
        .collect()
}

fn check_increasing(dates: &[NaiveDate]) -> Result<()> {
    match dates.windows(2).find(|w| w[0] >= w[1]) {
        Some(w) => Err(Error::Data(format!(
            "dates not strictly increasing at {} -> {}",
            w[0], w[1]
        ))),
        None => Ok(()),
    }
}

/// Length filter, common start, union date axis and forward fill.
pub fn preprocess(series: &[RawPriceSeries], k: f64) -> Result<PricePanel> {
    if !(k > 0.0 && k <= 1.0) {
        return Err(Error::Config(format!("k must lie in (0, 1], got {}", k)));
    }
    if series.is_empty() {
        return Err(Error::EmptyPanel("no input series".into()));
    }
    let longest = series.iter().map(RawPriceSeries::len).max().unwrap_or(0);
    let cut = k * longest as f64;
    let survivors: Vec<&RawPriceSeries> = series
        .iter()
        .filter(|s| !s.is_empty() && (s.len() as f64) >= cut)
        .collect();
    if survivors.is_empty() {
        return Err(Error::EmptyPanel(
            "every series was removed by the length filter".into(),
        ));
    }

    let start = survivors
        .iter()
        .map(|s| s.observations[0].0)
        .max()
        .expect("non-empty survivors");

    let axis: BTreeSet<NaiveDate> = survivors
        .iter()
        .flat_map(|s| s.observations.iter().map(|(d, _)| *d))
        .filter(|d| *d >= start)
        .collect();
    let dates: Vec<NaiveDate> = axis.into_iter().collect();

    let mut prices = Vec::with_capacity(survivors.len());
    let mut fill_mask = Vec::with_capacity(survivors.len());
    for s in &survivors {
        let (col, mask) = forward_fill(&s.observations, &dates);
        prices.push(col);
        fill_mask.push(mask);
    }

    Ok(PricePanel {
        dates,
        tickers: survivors.iter().map(|s| s.ticker.clone()).collect(),
        prices,
        fill_mask,
    })
}

/// Aligns `obs` to `axis`, dragging the last price at or before each date.
/// The first observation must not postdate `axis[0]`.
fn forward_fill(obs: &[(NaiveDate, f64)], axis: &[NaiveDate]) -> (Vec<f64>, Vec<bool>) {
    let mut col = Vec::with_capacity(axis.len());
    let mut mask = Vec::with_capacity(axis.len());
    let mut j = 0;
    let mut last: Option<f64> = None;
    for d in axis {
        while j < obs.len() && obs[j].0 < *d {
            last = Some(obs[j].1);
            j += 1;
        }
        if j < obs.len() && obs[j].0 == *d {
            last = Some(obs[j].1);
            col.push(obs[j].1);
            mask.push(false);
            j += 1;
        } else {
            col.push(last.expect("common start guarantees an earlier price"));
            mask.push(true);
        }
    }
    (col, mask)
}

/// Demeaned one-day log-returns.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel {
    /// Date at the end of each one-day interval.
    pub dates: Vec<NaiveDate>,
    pub tickers: Vec<String>,
    /// Column-major: `returns[ticker][t]`.
    pub returns: Vec<Vec<f64>>,
    pub column_means_removed: Vec<f64>,
}

impl ReturnPanel {
    /// Builds a panel from raw return columns, removing each column mean.
    pub fn from_raw(dates: Vec<NaiveDate>, tickers: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if tickers.len() != columns.len() {
            return Err(Error::Data(format!(
                "{} tickers for {} columns",
                tickers.len(),
                columns.len()
            )));
        }
        if let Some((t, c)) = tickers.iter().zip(&columns).find(|(_, c)| c.len() != dates.len()) {
            return Err(Error::Data(format!(
                "column {} has {} rows, expected {}",
                t,
                c.len(),
                dates.len()
            )));
        }
        let mut returns = columns;
        let means = returns.iter_mut().map(|c| demean(c)).collect();
        Ok(ReturnPanel {
            dates,
            tickers,
            returns,
            column_means_removed: means,
        })
    }

    pub fn n_obs(&self) -> usize {
        self.dates.len()
    }

    pub fn n_tickers(&self) -> usize {
        self.tickers.len()
    }

    pub fn column(&self, ticker: &str) -> Option<&[f64]> {
        self.tickers
            .iter()
            .position(|t| t == ticker)
            .map(|i| self.returns[i].as_slice())
    }

    pub fn to_csv(&self) -> String {
        LabelledTable {
            corner: "date".into(),
            columns: self.tickers.clone(),
            rows: self.dates.iter().map(|d| d.to_string()).collect(),
            values: (0..self.n_obs())
                .map(|t| self.returns.iter().map(|c| c[t]).collect())
                .collect(),
        }
        .to_csv()
    }

    /// Two-column `ticker,mean` sidecar of the removed means.
    pub fn means_csv(&self) -> String {
        let mut out = String::from("ticker,mean\n");
        for (t, m) in self.tickers.iter().zip(&self.column_means_removed) {
            out.push_str(&format!("{},{}\n", t, g17(*m)));
        }
        out
    }

    /// Reads a panel written by [`ReturnPanel::to_csv`]. Columns are
    /// re-centred; the recorded means are those removed on reading.
    pub fn from_csv(text: &str) -> Result<Self> {
        let table = LabelledTable::parse(text)?;
        let dates = parse_dates(&table.rows)?;
        check_increasing(&dates)?;
        let m = table.columns.len();
        let mut cols = vec![Vec::with_capacity(dates.len()); m];
        for row in &table.values {
            for (i, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Data(format!("non-finite return in column {}", table.columns[i])));
                }
                cols[i].push(v);
            }
        }
        ReturnPanel::from_raw(dates, table.columns, cols)
    }
}

fn demean(col: &mut [f64]) -> f64 {
    if col.is_empty() {
        return 0.0;
    }
    let mean = col.iter().sum::<f64>() / col.len() as f64;
    for x in col.iter_mut() {
        *x -= mean;
    }
    mean
}

pub fn compute_returns(panel: &PricePanel) -> Result<ReturnPanel> {
    if panel.n_dates() < 3 {
        return Err(Error::Data(format!(
            "need at least 3 dates to form returns, panel has {}",
            panel.n_dates()
        )));
    }
    let columns = panel
        .prices
        .iter()
        .map(|col| col.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
        .collect();
    ReturnPanel::from_raw(panel.dates[1..].to_vec(), panel.tickers.clone(), columns)
}

/// Median capitalization per ticker; `None` where no observation exists.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CapitalizationTable {
    entries: BTreeMap<String, Option<f64>>,
}

impl CapitalizationTable {
    pub fn get(&self, ticker: &str) -> Option<f64> {
        self.entries.get(ticker).copied().flatten()
    }

    pub fn ln_cap(&self, ticker: &str) -> Option<f64> {
        self.get(ticker).map(f64::ln)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Option<f64>)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses a `ticker,date,value` capitalization file (empty or `NA`
    /// values count as missing) and takes the per-ticker median.
    pub fn from_records_text(text: &str) -> Result<Self> {
        let mut order: Vec<String> = Vec::new();
        let mut by_ticker: HashMap<String, Vec<f64>> = HashMap::new();
        for rec in parse_records(text, true)? {
            let values = by_ticker.entry(rec.ticker.clone()).or_insert_with(|| {
                order.push(rec.ticker.clone());
                Vec::new()
            });
            if let Some(v) = rec.value {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::Data(format!(
                        "row {}: non-positive capitalization {} for {}",
                        rec.row, v, rec.ticker
                    )));
                }
                values.push(v);
            }
        }
        let records: Vec<(String, Vec<f64>)> = order
            .into_iter()
            .map(|t| {
                let v = by_ticker.remove(&t).unwrap_or_default();
                (t, v)
            })
            .collect();
        median_capitalization(&records)
    }
}

pub fn median_capitalization(records: &[(String, Vec<f64>)]) -> Result<CapitalizationTable> {
    let mut entries = BTreeMap::new();
    for (ticker, values) in records {
        if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::Data(format!(
                "non-positive capitalization {} for {}",
                v, ticker
            )));
        }
        entries.insert(ticker.clone(), median(values));
    }
    Ok(CapitalizationTable { entries })
}

pub(crate) fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    #[test]
    fn load_sorts_shuffled_dates() {
        let text = "AAA,2020-01-03,3\nAAA,2020-01-01,1\nAAA,2020-01-02,2\n";
        let s = load_prices(&[text]).unwrap();
        assert_eq!(s.len(), 1);
        let dates: Vec<_> = s[0].observations.iter().map(|o| o.0).collect();
        assert_eq!(dates, vec![d("2020-01-01"), d("2020-01-02"), d("2020-01-03")]);
        assert_eq!(s[0].observations[0].1, 1.0);
    }

    #[test]
    fn zero_close_is_data_error() {
        let err = load_prices(&["AAA,2020-01-01,0\n"]).unwrap_err();
        assert!(matches!(err, Error::Data(_)), "{err}");
    }

    #[test]
    fn duplicate_record_is_data_error() {
        let err = load_prices(&["A,2020-01-01,1\nA,2020-01-01,2\n"]).unwrap_err();
        assert!(matches!(err, Error::Data(_)));
        // also across files
        let err = load_prices(&["A,2020-01-01,1\n", "A,2020-01-01,2\n"]).unwrap_err();
        assert!(matches!(err, Error::Data(_)));
    }

    #[test]
    fn malformed_row_names_row() {
        let err = load_prices(&["ticker,date,close\nA,2020-01-01,1\nA,2020-13-01,2\n"]).unwrap_err();
        match err {
            Error::Parse { row, .. } => assert_eq!(row, 3),
            other => panic!("unexpected {other}"),
        }
        let err = load_prices(&["A,2020-01-01,abc\n"]).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 1, .. }));
    }

    #[test]
    fn merged_sources_count_tickers() {
        let a = "A,2020-01-01,1\nA,2020-01-02,1\nB,2020-01-01,2\n";
        let b = "C,2020-01-01,1\nD,2020-01-02,1\nE,2020-01-02,5\n";
        let s = load_prices(&[a, b]).unwrap();
        assert_eq!(s.len(), 2 + 3);
    }

    #[test]
    fn fill_drags_last_price() {
        let a = RawPriceSeries::new("A", vec![(d("2020-01-01"), 100.0), (d("2020-01-03"), 110.0)]).unwrap();
        let b = RawPriceSeries::new(
            "B",
            vec![
                (d("2020-01-01"), 1.0),
                (d("2020-01-02"), 2.0),
                (d("2020-01-03"), 3.0),
            ],
        )
        .unwrap();
        let p = preprocess(&[a, b], 0.5).unwrap();
        assert_eq!(p.prices[0], vec![100.0, 100.0, 110.0]);
        assert_eq!(p.fill_mask[0], vec![false, true, false]);
        assert_eq!(p.fill_mask[1], vec![false, false, false]);
    }

    #[test]
    fn short_series_removed() {
        let base = d("2020-01-01");
        let mk = |name: &str, n: i64| {
            RawPriceSeries::new(
                name,
                (0..n).map(|i| (base + chrono::Duration::days(i), 1.0 + i as f64)).collect(),
            )
            .unwrap()
        };
        let p = preprocess(&[mk("LONG", 100), mk("SHORT", 85)], DEFAULT_K).unwrap();
        assert_eq!(p.tickers, vec!["LONG".to_string()]);
        let p = preprocess(&[mk("LONG", 100), mk("OK", 90)], DEFAULT_K).unwrap();
        assert_eq!(p.n_tickers(), 2);
    }

    #[test]
    fn gapless_input_is_unchanged() {
        let obs: Vec<_> = (0..5).map(|i| (d("2021-03-01") + chrono::Duration::days(i), 10.0 + i as f64)).collect();
        let s = RawPriceSeries::new("X", obs.clone()).unwrap();
        let p = preprocess(&[s], DEFAULT_K).unwrap();
        assert_eq!(p.prices[0], obs.iter().map(|o| o.1).collect::<Vec<_>>());
        assert!(p.fill_mask[0].iter().all(|m| !m));
    }

    #[test]
    fn invalid_k_and_empty_input() {
        assert!(matches!(preprocess(&[], 0.9), Err(Error::EmptyPanel(_))));
        let s = RawPriceSeries::new("X", vec![(d("2021-03-01"), 1.0)]).unwrap();
        assert!(matches!(preprocess(std::slice::from_ref(&s), 0.0), Err(Error::Config(_))));
        assert!(matches!(preprocess(&[s], 1.5), Err(Error::Config(_))));
    }

    #[test]
    fn returns_hand_arithmetic() {
        let p = PricePanel {
            dates: vec![d("2020-01-01"), d("2020-01-02"), d("2020-01-03")],
            tickers: vec!["A".into(), "C".into()],
            prices: vec![vec![100.0, 100.0, 110.0], vec![5.0, 5.0, 5.0]],
            fill_mask: vec![vec![false; 3]; 2],
        };
        let r = compute_returns(&p).unwrap();
        let h = 1.1f64.ln() / 2.0;
        assert!((r.returns[0][0] + h).abs() < 1e-15);
        assert!((r.returns[0][1] - h).abs() < 1e-15);
        assert_eq!(r.returns[1], vec![0.0, 0.0]);
        assert!((r.column_means_removed[0] - h).abs() < 1e-15);
        assert_eq!(r.dates, vec![d("2020-01-02"), d("2020-01-03")]);
    }

    #[test]
    fn returns_need_three_dates() {
        let p = PricePanel {
            dates: vec![d("2020-01-01"), d("2020-01-02")],
            tickers: vec!["A".into()],
            prices: vec![vec![1.0, 2.0]],
            fill_mask: vec![vec![false; 2]],
        };
        assert!(compute_returns(&p).is_err());
    }

    #[test]
    fn demeaning_twice_is_stable() {
        let mut c = vec![0.3, -1.2, 5.5, 0.01, 2.0];
        demean(&mut c);
        let once = c.clone();
        demean(&mut c);
        for (a, b) in once.iter().zip(&c) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn medians() {
        let recs = vec![
            ("A".to_string(), vec![1.0, 100.0, 5.0]),
            ("B".to_string(), vec![2.0, 4.0]),
            ("C".to_string(), vec![]),
        ];
        let t = median_capitalization(&recs).unwrap();
        assert_eq!(t.get("A"), Some(5.0));
        assert_eq!(t.get("B"), Some(3.0));
        assert_eq!(t.get("C"), None);
        assert_eq!(t.get("Z"), None);
        let bad = vec![("A".to_string(), vec![-1.0])];
        assert!(matches!(median_capitalization(&bad), Err(Error::Data(_))));
    }

    #[test]
    fn cap_file_with_missing_values() {
        let t = CapitalizationTable::from_records_text("A,2020-01-01,10\nA,2020-01-02,30\nB,2020-01-01,NA\n").unwrap();
        assert_eq!(t.get("A"), Some(20.0));
        assert_eq!(t.get("B"), None);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn panel_csv_round_trip() {
        let a = RawPriceSeries::new("A", vec![(d("2020-01-01"), 100.0), (d("2020-01-03"), 110.5)]).unwrap();
        let b = RawPriceSeries::new("B", vec![(d("2020-01-01"), 0.1), (d("2020-01-02"), 0.2)]).unwrap();
        let p = preprocess(&[a, b], 0.5).unwrap();
        let back = PricePanel::from_csv(&p.to_csv(), Some(&p.fill_mask_csv())).unwrap();
        assert_eq!(back, p);
    }
}
