//! The kernel-based estimator of the asymptotic variance of the PHY.

use crate::error::{Error, Result};
use crate::estimators::{PreAvgConfig, StepSeries, WeightFn};
use crate::noise::ObservationSeries;
use crate::sampling::RefreshData;

use super::spot::{spot_estimators, spot_inputs, SpotConfig, SpotRecord};
use super::KernelConstants;

#[derive(Debug, Clone)]
pub struct AvarResult {
    /// Raw running sum at the horizon. May be negative in finite samples.
    pub avar: f64,
    /// The same sum with each term floored at zero.
    pub avar_floored: f64,
    pub n_negative: usize,
    /// Terms dropped because an ingredient was not finite.
    pub n_skipped: usize,
    pub path: StepSeries,
    pub spot_records: Vec<SpotRecord>,
}

/// Sums `ŵ²_{R^k}` over `k = 1..K−1` with `R^k ≤ horizon`, writing each
/// term into `records[k].w2_hat`.
pub fn avar_hat(records: &mut [SpotRecord], rd: &RefreshData, k_n: usize, psi_hy: f64, c: &KernelConstants) -> AvarResult {
    let pre = k_n as f64 / psi_hy.powi(4);
    let n = rd.len();
    let mut events = Vec::with_capacity(n);
    let (mut raw, mut floored) = (0.0, 0.0);
    let (mut n_negative, mut n_skipped) = (0, 0);
    for k in 1..n.saturating_sub(1) {
        if rd.r[k] > rd.horizon {
            break;
        }
        let s = &records[k];
        let bracket = c.kappa * (s.spot_x * s.spot_y + s.spot_xy * s.spot_xy)
            + c.kappa_tilde * (s.dgamma11 * s.dgamma22 + s.dgamma12 * s.dgamma12)
            + c.kappa_bar
                * (s.spot_x * s.dgamma22 + s.spot_y * s.dgamma11 + 2.0 * s.spot_xy * s.dgamma12 - s.dxi * s.dxi);
        let w2 = pre * bracket * rd.gamma[k] * rd.gamma[k + 1];
        records[k].w2_hat = w2;
        if !w2.is_finite() {
            n_skipped += 1;
            continue;
        }
        if w2 < 0.0 {
            n_negative += 1;
        }
        raw += w2;
        floored += w2.max(0.0);
        events.push((rd.r[k], w2));
    }
    AvarResult {
        avar: raw,
        avar_floored: floored,
        n_negative,
        n_skipped,
        path: StepSeries::from_events(events, 1.0),
        spot_records: records.to_vec(),
    }
}

/// Spot records and variance estimate straight from observations.
pub fn avar_from_data(
    xo: &ObservationSeries,
    yo: &ObservationSeries,
    rd: &RefreshData,
    cfg: &PreAvgConfig,
    spot: &SpotConfig,
    constants: &KernelConstants,
    f: &WeightFn,
) -> Result<AvarResult> {
    if rd.len() < 3 {
        return Err(Error::InsufficientData("variance estimation needs at least three refresh times".into()));
    }
    let inputs = spot_inputs(xo, yo, rd, cfg, f)?;
    let mut records = spot_estimators(&inputs, rd, spot);
    Ok(avar_hat(&mut records, rd, cfg.k_n, cfg.psi_hy(), constants))
}
