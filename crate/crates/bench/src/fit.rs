use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sweep::SweepRow;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} usable rows, found {found}")]
    InsufficientData { needed: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Series {
    Error,
    APosteriori,
    Local,
    APriori,
    /// One of the three a posteriori terms.
    Term(usize),
}

impl Series {
    pub const TIERS: [Series; 3] = [Series::APosteriori, Series::Local, Series::APriori];

    pub fn value(self, row: &SweepRow) -> f64 {
        match self {
            Series::Error => row.error,
            Series::APosteriori => row.a_posteriori,
            Series::Local => row.local,
            Series::APriori => row.a_priori,
            Series::Term(k) => row.a_posteriori_terms[k],
        }
    }

    pub fn name(self) -> String {
        match self {
            Series::Error => "error".into(),
            Series::APosteriori => "a_posteriori".into(),
            Series::Local => "local".into(),
            Series::APriori => "a_priori".into(),
            Series::Term(k) => format!("a_posteriori_{k}"),
        }
    }

    pub fn parse(s: &str) -> Option<Series> {
        Some(match s {
            "error" => Series::Error,
            "a_posteriori" => Series::APosteriori,
            "local" => Series::Local,
            "a_priori" => Series::APriori,
            "a_posteriori_0" => Series::Term(0),
            "a_posteriori_1" => Series::Term(1),
            "a_posteriori_2" => Series::Term(2),
            _ => return None,
        })
    }
}

/// Successful rows without the `⌈10%⌉` largest `l`, in decreasing `l`.
pub fn retained(rows: &[SweepRow]) -> Vec<&SweepRow> {
    let mut ok: Vec<&SweepRow> = rows.iter().filter(|r| r.ok()).collect();
    ok.sort_by(|a, b| b.l.total_cmp(&a.l));
    let drop = ok.len().div_ceil(10);
    ok.split_off(drop.min(ok.len()))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x.ln() / n, b + y.ln() / n));
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in points {
        let dx = x.ln() - mx;
        sxy += dx * (y.ln() - my);
        sxx += dx * dx;
    }
    sxy / sxx
}

/// Exponent `p` of the trend `value ∝ l^p` over the retained rows.
/// Rows with a nonpositive value cannot enter a log-log fit and are skipped.
pub fn fit_trend(rows: &[SweepRow], series: Series) -> Result<f64, FitError> {
    let pts: Vec<(f64, f64)> = retained(rows)
        .into_iter()
        .map(|r| (r.l, series.value(r)))
        .filter(|(_, v)| *v > 0.0 && v.is_finite())
        .collect();
    if pts.len() < 4 {
        return Err(FitError::InsufficientData { needed: 4, found: pts.len() });
    }
    Ok(log_log_slope(&pts))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RatioSummary {
    /// Geometric means of bound/error for the three tiers; absent when a
    /// bound vanishes.
    pub a_posteriori: Option<f64>,
    pub local: Option<f64>,
    pub a_priori: Option<f64>,
    pub rows: usize,
}

/// Geometric-mean bound/error ratios over the retained rows with a
/// positive error.
pub fn ratio_summary(rows: &[SweepRow]) -> Result<RatioSummary, FitError> {
    let usable: Vec<&SweepRow> = retained(rows).into_iter().filter(|r| r.error > 0.0).collect();
    if usable.is_empty() {
        return Err(FitError::InsufficientData { needed: 1, found: 0 });
    }
    let mean = |s: Series| -> Option<f64> {
        let mut acc = 0.0;
        for r in &usable {
            let q = s.value(r) / r.error;
            if !(q > 0.0 && q.is_finite()) {
                return None;
            }
            acc += q.ln();
        }
        Some((acc / usable.len() as f64).exp())
    };
    Ok(RatioSummary {
        a_posteriori: mean(Series::APosteriori),
        local: mean(Series::Local),
        a_priori: mean(Series::APriori),
        rows: usable.len(),
    })
}
