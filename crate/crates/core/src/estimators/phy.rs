//! The pre-averaged Hayashi–Yoshida estimator.

use crate::error::{Error, Result};
use crate::noise::ObservationSeries;
use crate::sampling::RefreshData;

use super::{preavg, Design, EstimatorMeta, EstimatorResult, PreAvgConfig, StepSeries};

/// Pre-averaged data of a design, truncated to windows `i` for which the
/// right end `τ^{i+k}` is observed.
fn complete_windows(d: &Design, cfg: &PreAvgConfig) -> Result<Vec<f64>> {
    let k = cfg.k_n;
    if d.len() <= k {
        return Err(Error::InsufficientData(format!(
            "PHY with k_n = {k} needs more than {k} observations, got {}",
            d.len()
        )));
    }
    let mut bar = preavg(&d.values, k, &cfg.weight)?;
    bar.truncate(d.len() - k);
    Ok(bar)
}

/// Visits every overlapping pair `(i, j)` in lexicographic order.
///
/// For fixed `i` the admissible `j` form a contiguous block whose ends are
/// nondecreasing in `i`, so two pointers suffice.
fn for_each_pair(s: &[f64], t: &[f64], n_i: usize, n_j: usize, k: usize, mut visit: impl FnMut(usize, usize)) {
    let (mut lo, mut hi) = (0usize, 0usize);
    for i in 0..n_i {
        while lo < n_j && t[lo + k] <= s[i] {
            lo += 1;
        }
        while hi < n_j && t[hi] < s[i + k] {
            hi += 1;
        }
        for j in lo..hi {
            visit(i, j);
        }
    }
}

fn norm(cfg: &PreAvgConfig) -> f64 {
    (cfg.psi_hy() * cfg.k_n as f64).powi(-2)
}

fn meta(cfg: &PreAvgConfig) -> EstimatorMeta {
    EstimatorMeta {
        tag: "phy",
        params: vec![("k_n", cfg.k_n as f64), ("theta", cfg.theta), ("psi_hy", cfg.psi_hy())],
    }
}

/// Terminal value of the PHY on two designs.
pub fn phy(xs: &Design, ys: &Design, cfg: &PreAvgConfig) -> Result<EstimatorResult> {
    let xb = complete_windows(xs, cfg)?;
    let yb = complete_windows(ys, cfg)?;
    let mut acc = 0.0;
    for_each_pair(&xs.times, &ys.times, xb.len(), yb.len(), cfg.k_n, |i, j| {
        acc += xb[i] * yb[j];
    });
    Ok(EstimatorResult {
        value: acc * norm(cfg),
        path: None,
        meta: meta(cfg),
    })
}

/// The PHY as a process in `t`. Each product enters at
/// `τ^{i+k} ∨ τ^{j+k}`, the first time its windows are fully observed.
pub fn phy_process(xs: &Design, ys: &Design, cfg: &PreAvgConfig) -> Result<StepSeries> {
    let xb = complete_windows(xs, cfg)?;
    let yb = complete_windows(ys, cfg)?;
    let k = cfg.k_n;
    let mut events = Vec::with_capacity(2 * k * xb.len());
    for_each_pair(&xs.times, &ys.times, xb.len(), yb.len(), k, |i, j| {
        events.push((xs.times[i + k].max(ys.times[j + k]), xb[i] * yb[j]));
    });
    Ok(StepSeries::from_events(events, norm(cfg)))
}

/// PHY on the next-tick designs of the refresh times, with its process.
pub fn phy_refresh(
    xo: &ObservationSeries,
    yo: &ObservationSeries,
    rd: &RefreshData,
    cfg: &PreAvgConfig,
) -> Result<EstimatorResult> {
    let xs = Design::refresh_x(xo, rd);
    let ys = Design::refresh_y(yo, rd);
    let mut out = phy(&xs, &ys, cfg)?;
    out.path = Some(phy_process(&xs, &ys, cfg)?);
    out.meta.tag = "phy_refresh";
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(xs: &Design, ys: &Design, cfg: &PreAvgConfig) -> f64 {
        let k = cfg.k_n;
        let xb = complete_windows(xs, cfg).unwrap();
        let yb = complete_windows(ys, cfg).unwrap();
        let mut acc = 0.0;
        for i in 0..xb.len() {
            for j in 0..yb.len() {
                if xs.times[i] < ys.times[j + k] && ys.times[j] < xs.times[i + k] {
                    acc += xb[i] * yb[j];
                }
            }
        }
        acc * norm(cfg)
    }

    #[test]
    fn matches_double_loop() {
        let xs = Design {
            times: vec![0.0, 0.1, 0.25, 0.3, 0.55, 0.6, 0.8, 0.95],
            values: vec![0.0, 1.0, -0.5, 0.2, 0.9, 1.4, 0.3, 0.7],
        };
        let ys = Design {
            times: vec![0.0, 0.05, 0.2, 0.4, 0.45, 0.7, 0.75, 0.9, 1.0],
            values: vec![1.0, 0.3, 0.4, -0.2, 0.6, 0.1, 0.0, 0.8, 0.5],
        };
        let cfg = PreAvgConfig::with_k(3, 0.15, 0.1).unwrap();
        let v = phy(&xs, &ys, &cfg).unwrap().value;
        assert_eq!(v, brute(&xs, &ys, &cfg));
        let p = phy_process(&xs, &ys, &cfg).unwrap();
        assert!((p.last() - v).abs() < 1e-12);
    }

    #[test]
    fn synchronous_linear_path() {
        // On a synchronous grid with X = Y = t, every window of g = x∧(1−x)
        // averages the same constant increment.
        let n = 40;
        let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let d = Design { times: times.clone(), values: times };
        let cfg = PreAvgConfig::with_k(4, 0.15, 1.0 / n as f64).unwrap();
        let v = phy(&d, &d, &cfg).unwrap().value;
        // X̄ = Σg(p/k)/n = ψk/n. Pairs with |i − j| < k: (2k − 1) per i minus edge losses.
        let m = n + 1 - 4;
        let pairs = (0..m as i64)
            .map(|i| (0..m as i64).filter(|j| (i - j).abs() < 4).count())
            .sum::<usize>();
        let expected = pairs as f64 / (n * n) as f64;
        assert!((v - expected).abs() < 1e-14);
    }

    #[test]
    fn short_design_is_an_error() {
        let d = Design { times: vec![0.0, 0.5], values: vec![0.0, 1.0] };
        let cfg = PreAvgConfig::with_k(2, 0.15, 0.5).unwrap();
        assert!(matches!(phy(&d, &d, &cfg), Err(Error::InsufficientData(_))));
    }
}
