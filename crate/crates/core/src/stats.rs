//! Small numeric helpers shared across modules.

use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Two-sided tail probability of a Student-t statistic.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    // sf of |t| avoids the cancellation in 1 - cdf
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

/// Two-sided p-value of a correlation coefficient under the null of zero
/// correlation, using the t statistic with `df` degrees of freedom.
pub fn correlation_pvalue(r: f64, df: usize) -> Result<f64> {
    if df < 1 {
        return Err(Error::Estimation(
            "correlation p-value needs at least one degree of freedom".into(),
        ));
    }
    if r.is_nan() || r.abs() > 1.0 + 1e-12 {
        return Err(Error::Estimation(format!("correlation {} outside [-1, 1]", r)));
    }
    let r = r.clamp(-1.0, 1.0);
    if r.abs() == 1.0 {
        return Ok(0.0);
    }
    let df = df as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    Ok(student_t_two_sided(t, df))
}

/// Two-sided p-value of a standard normal statistic.
pub fn normal_two_sided(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Least-squares line through `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub rss: f64,
    pub tss: f64,
}

impl LineFit {
    pub fn r2(&self) -> f64 {
        if self.tss == 0.0 {
            0.0
        } else {
            (1.0 - self.rss / self.tss).clamp(0.0, 1.0)
        }
    }
}

/// Centred-moment OLS. `None` when `x` has no spread.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    debug_assert_eq!(x.len(), y.len());
    let mx = mean(x);
    let my = mean(y);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mx;
        let dy = yi - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let e = yi - (intercept + slope * xi);
            e * e
        })
        .sum();
    Some(LineFit {
        slope,
        intercept,
        rss,
        tss: syy,
    })
}
