//! Backward-difference spot estimators built from the global processes.

use crate::error::{Error, Result};
use crate::estimators::{autocov, phy::phy_process, Design, Gamma1, PreAvgConfig, StepSeries, WeightFn};
use crate::noise::ObservationSeries;
use crate::sampling::RefreshData;

/// How a window that would start before time zero is normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeRule {
    /// Divide by `h_n` even when the window is truncated to `[0, s]`.
    #[default]
    Literal,
    /// Divide by the truncated window length `min(s, h_n)`.
    Rescaled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpotConfig {
    pub h_n: f64,
    pub edge: EdgeRule,
}

impl SpotConfig {
    /// `h_n = N^{−0.2}`.
    pub fn from_returns(n_returns: usize) -> Result<Self> {
        Self::new((n_returns as f64).powf(-0.2))
    }

    pub fn new(h_n: f64) -> Result<Self> {
        if !(h_n > 0.0 && h_n.is_finite()) {
            return Err(Error::param("h_n", "bandwidth must be positive and finite"));
        }
        Ok(Self { h_n, edge: EdgeRule::Literal })
    }

    fn quotient(&self, p: &StepSeries, s: f64) -> f64 {
        let lo = (s - self.h_n).max(0.0);
        let width = match self.edge {
            EdgeRule::Literal => self.h_n,
            EdgeRule::Rescaled => s - lo,
        };
        if width > 0.0 {
            (p.value_at(s) - p.value_at(lo)) / width
        } else {
            f64::NAN
        }
    }
}

/// The global processes whose local increments feed the variance estimator.
#[derive(Debug, Clone)]
pub struct SpotInputs {
    pub phy_xx: StepSeries,
    pub phy_yy: StepSeries,
    pub phy_xy: StepSeries,
    pub gamma: Gamma1,
    pub xi_f: StepSeries,
}

/// Builds the PHY, autocovariance and Ξ[f] processes on the refresh designs.
/// Identical inputs (the univariate case) reuse one PHY process.
pub fn spot_inputs(
    xo: &ObservationSeries,
    yo: &ObservationSeries,
    rd: &RefreshData,
    cfg: &PreAvgConfig,
    f: &WeightFn,
) -> Result<SpotInputs> {
    let xs = Design::refresh_x(xo, rd);
    let ys = Design::refresh_y(yo, rd);
    let phy_xx = phy_process(&xs, &xs, cfg)?;
    let (phy_yy, phy_xy) = if xs == ys {
        (phy_xx.clone(), phy_xx.clone())
    } else {
        (phy_process(&ys, &ys, cfg)?, phy_process(&xs, &ys, cfg)?)
    };
    Ok(SpotInputs {
        phy_xx,
        phy_yy,
        phy_xy,
        gamma: autocov::gamma1(&xs, &ys, rd, cfg.k_n)?,
        xi_f: autocov::xi_f(&xs, &ys, rd, f, cfg.k_n)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SpotRecord {
    pub k: usize,
    pub r_k: f64,
    pub spot_x: f64,
    pub spot_y: f64,
    pub spot_xy: f64,
    pub dgamma11: f64,
    pub dgamma22: f64,
    pub dgamma12: f64,
    pub dxi: f64,
    /// Filled in by the variance estimator.
    pub w2_hat: f64,
}

/// Spot records at every refresh time `R^k`, `k = 0..=K`.
pub fn spot_estimators(inputs: &SpotInputs, rd: &RefreshData, spot: &SpotConfig) -> Vec<SpotRecord> {
    rd.r
        .iter()
        .enumerate()
        .map(|(k, &s)| SpotRecord {
            k,
            r_k: s,
            spot_x: spot.quotient(&inputs.phy_xx, s),
            spot_y: spot.quotient(&inputs.phy_yy, s),
            spot_xy: spot.quotient(&inputs.phy_xy, s),
            dgamma11: spot.quotient(&inputs.gamma.g11, s),
            dgamma22: spot.quotient(&inputs.gamma.g22, s),
            dgamma12: spot.quotient(&inputs.gamma.g12, s),
            dxi: spot.quotient(&inputs.xi_f, s),
            w2_hat: f64::NAN,
        })
        .collect()
}
