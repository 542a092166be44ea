use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::scenario::{EstimatorTag, RepRecord};

/// Quantile levels reported in the coverage table.
pub const LEVELS: [f64; 6] = [0.005, 0.025, 0.05, 0.95, 0.975, 0.995];

type Extract = fn(&RepRecord) -> f64;

/// Named Studentized statistics and the estimator they are computed from.
pub const STATISTICS: [(&str, EstimatorTag, Extract); 5] = [
    ("S_PHY", EstimatorTag::Phy, |r| r.s),
    ("S_log", EstimatorTag::Phy, |r| r.s_log),
    ("S_inv", EstimatorTag::Phy, |r| r.s_inv),
    ("S_RV", EstimatorTag::Rv, |r| r.s),
    ("S_MSRV", EstimatorTag::Msrv, |r| r.s),
];

/// Defined values of the statistic `name`, in replication order.
pub fn statistic_values(records: &[RepRecord], name: &str) -> Vec<f64> {
    STATISTICS
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|&(_, tag, get)| {
            records
                .iter()
                .filter(|r| r.estimator == tag)
                .map(get)
                .filter(|v| v.is_finite())
                .collect()
        })
        .unwrap_or_default()
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn sd(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return f64::NAN;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasRow {
    pub estimator: EstimatorTag,
    pub n: usize,
    /// Mean of `(est − truth)/truth`.
    pub rel_bias: f64,
    /// Root mean square of `(est − truth)/truth`.
    pub rel_rmse: f64,
    /// Standard error of `rel_bias`.
    pub rel_bias_se: f64,
    pub mean_estimate: f64,
    pub mean_truth: f64,
}

pub fn bias_rmse_table(records: &[RepRecord]) -> Vec<BiasRow> {
    let mut tags: Vec<EstimatorTag> = records.iter().map(|r| r.estimator).collect();
    tags.sort();
    tags.dedup();
    tags.into_iter()
        .map(|tag| {
            let rows: Vec<&RepRecord> = records
                .iter()
                .filter(|r| r.estimator == tag && r.value.is_finite() && r.truth.is_finite())
                .collect();
            let rel: Vec<f64> = rows.iter().map(|r| (r.value - r.truth) / r.truth).collect();
            let est: Vec<f64> = rows.iter().map(|r| r.value).collect();
            let truth: Vec<f64> = rows.iter().map(|r| r.truth).collect();
            BiasRow {
                estimator: tag,
                n: rel.len(),
                rel_bias: mean(&rel),
                rel_rmse: (rel.iter().map(|v| v * v).sum::<f64>() / rel.len() as f64).sqrt(),
                rel_bias_se: sd(&rel) / (rel.len() as f64).sqrt(),
                mean_estimate: mean(&est),
                mean_truth: mean(&truth),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantileRow {
    pub statistic: String,
    pub n_used: usize,
    /// Replications where the statistic is undefined.
    pub n_excluded: usize,
    pub mean: f64,
    pub sd: f64,
    /// Share of `|S| ≤ 1.96`, in percent.
    pub coverage_95: f64,
    /// Empirical CDF at the standard normal quantile of each level, in percent.
    pub p0_5: f64,
    pub p2_5: f64,
    pub p5: f64,
    pub p95: f64,
    pub p97_5: f64,
    pub p99_5: f64,
}

fn ecdf(x: &[f64], at: f64) -> f64 {
    100.0 * x.iter().filter(|&&v| v <= at).count() as f64 / x.len() as f64
}

pub fn quantile_coverage_table(records: &[RepRecord]) -> Vec<QuantileRow> {
    let z = Normal::standard();
    let q: Vec<f64> = LEVELS.iter().map(|&p| z.inverse_cdf(p)).collect();
    STATISTICS
        .iter()
        .filter(|(_, tag, _)| records.iter().any(|r| r.estimator == *tag))
        .map(|&(name, tag, _)| {
            let total = records.iter().filter(|r| r.estimator == tag).count();
            let x = statistic_values(records, name);
            QuantileRow {
                statistic: name.to_string(),
                n_used: x.len(),
                n_excluded: total - x.len(),
                mean: mean(&x),
                sd: sd(&x),
                coverage_95: 100.0 * x.iter().filter(|v| v.abs() <= 1.96).count() as f64 / x.len() as f64,
                p0_5: ecdf(&x, q[0]),
                p2_5: ecdf(&x, q[1]),
                p5: ecdf(&x, q[2]),
                p95: ecdf(&x, q[3]),
                p97_5: ecdf(&x, q[4]),
                p99_5: ecdf(&x, q[5]),
            }
        })
        .collect()
}
