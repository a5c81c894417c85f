//! Text serialization shared by every output table.
//!
//! Numbers are written with 17 significant digits in the style of C's
//! `%.17g`, which round-trips every finite `f64` exactly.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Formats `x` like `printf("%.17g", x)`.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let mantissa = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", mantissa, sign, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

/// Three-decimal display used for p-values and coefficients in reports.
pub fn dec3(x: f64) -> String {
    let s = format!("{:.3}", x);
    // avoid "-0.000" for tiny negatives
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

pub fn parse_f64(field: &str, row: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::Parse {
        row,
        msg: format!("not a number: {:?}", field),
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// A header-labelled numeric table: first column is a row label, the
/// remaining columns are named by the header.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledTable {
    pub corner: String,
    pub columns: Vec<String>,
    pub rows: Vec<String>,
    /// Row-major values, `rows.len() × columns.len()`.
    pub values: Vec<Vec<f64>>,
}

impl LabelledTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.corner);
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (label, row) in self.rows.iter().zip(&self.values) {
            out.push_str(label);
            for v in row {
                out.push(',');
                out.push_str(&g17(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut records = reader.records();
        let header = match records.next() {
            Some(r) => r.map_err(|e| Error::Parse {
                row: 1,
                msg: e.to_string(),
            })?,
            None => return Err(Error::Data("empty table".into())),
        };
        if header.is_empty() {
            return Err(Error::Parse {
                row: 1,
                msg: "missing header".into(),
            });
        }
        let corner = header[0].to_string();
        let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut rows = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in records.enumerate() {
            let row = i + 2;
            let rec = rec.map_err(|e| Error::Parse {
                row,
                msg: e.to_string(),
            })?;
            if rec.len() != columns.len() + 1 {
                return Err(Error::Parse {
                    row,
                    msg: format!("expected {} fields, found {}", columns.len() + 1, rec.len()),
                });
            }
            rows.push(rec[0].to_string());
            let vals = rec
                .iter()
                .skip(1)
                .map(|f| parse_f64(f, row))
                .collect::<Result<Vec<_>>>()?;
            values.push(vals);
        }
        Ok(LabelledTable {
            corner,
            columns,
            rows,
            values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf_style() {
        assert_eq!(g17(100.0), "100");
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(-2.5), "-2.5");
        assert_eq!(g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(g17(1.5e20), "1.5e+20");
        assert_eq!(g17(0.0), "0");
        assert_eq!(g17(110.0), "110");
        assert_eq!(g17(0.0001), "0.0001");
    }

    #[test]
    fn g17_round_trips() {
        for &x in &[std::f64::consts::PI, 1.0 / 3.0, -1e-300, 6.02214076e23, 0.95] {
            assert_eq!(g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn dec3_rounds() {
        assert_eq!(dec3(0.0246), "0.025");
        assert_eq!(dec3(-0.0001), "0.000");
        assert_eq!(dec3(1e-9), "0.000");
    }

    #[test]
    fn table_round_trip() {
        let t = LabelledTable {
            corner: "date".into(),
            columns: vec!["A".into(), "B".into()],
            rows: vec!["2000-01-03".into()],
            values: vec![vec![1.25, -0.1]],
        };
        let back = LabelledTable::parse(&t.to_csv()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn ragged_row_is_parse_error() {
        let err = LabelledTable::parse("date,A,B\nx,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { row: 2, .. }));
    }
}
