//! Data-driven choice of the number of scales for the multiscale estimator
//! and the matching asymptotic variance.
//!
//! The variance of `N^{1/4}(MSRV − IV)` with `M = c√N` is approximated by
//!
//! ```text
//! AV(c) = (52/35) c IQ ρ + (48/5) ω² IV / c + 48 ω⁴ / c³
//! ```
//!
//! where `ρ` is the duration kurtosis ratio `mean(Γ²)/mean(Γ)²`, which plays
//! the role of `G(2)/G(1)`. The signal term is the only one present without
//! noise. `ω²` comes from the first-lag autocovariance of returns, `IV` from
//! a pilot estimate with `c = 1`, and `IQ` is approximated by `IV²`
//! (constant volatility). `c` minimises `AV` on `[2/√N, C_MAX]`, so the only
//! lower restriction is `M ≥ 2`. Without noise this selects a handful of
//! scales, which is what keeps the estimator's error close to the RV's.

use crate::error::{Error, Result};
use crate::estimators::msrv;

pub const C_MAX: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MsrvTuning {
    pub c_multi: f64,
    pub m: usize,
    /// `AV(M/√N)`, the variance of `N^{1/4}(MSRV − IV)`.
    pub avar_multi: f64,
    pub omega2: f64,
    pub iv_pilot: f64,
    pub rho: f64,
    /// Set when the pilot was unusable and `c = 1` was imposed.
    pub fallback: bool,
}

fn av(c: f64, iq_rho: f64, omega2: f64, iv: f64) -> f64 {
    52.0 / 35.0 * c * iq_rho + 48.0 / 5.0 * omega2 * iv / c + 48.0 * omega2 * omega2 / c.powi(3)
}

fn m_of(c: f64, n: usize) -> usize {
    ((c * (n as f64).sqrt() - 1e-9).ceil() as usize).clamp(2, n.saturating_sub(1).max(2))
}

/// `values` are the observations and `durations` the gaps between their
/// times.
pub fn msrv_tuning(values: &[f64], durations: &[f64]) -> Result<MsrvTuning> {
    let n = values.len().saturating_sub(1);
    if n < 16 {
        return Err(Error::InsufficientData(format!("MSRV tuning needs at least 16 returns, got {n}")));
    }
    let sn = (n as f64).sqrt();
    let d: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let omega2 = (-d.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / n as f64).max(0.0);
    let mean = durations.iter().sum::<f64>() / durations.len().max(1) as f64;
    let mean2 = durations.iter().map(|g| g * g).sum::<f64>() / durations.len().max(1) as f64;
    let rho = if mean > 0.0 { mean2 / (mean * mean) } else { 1.0 };
    let iv_pilot = msrv(values, m_of(1.0, n))?;
    if !(iv_pilot > 0.0 && iv_pilot.is_finite()) {
        let m = m_of(1.0, n);
        return Ok(MsrvTuning {
            c_multi: 1.0,
            m,
            avar_multi: f64::NAN,
            omega2,
            iv_pilot,
            rho,
            fallback: true,
        });
    }
    let iq_rho = iv_pilot * iv_pilot * rho;
    // AV is convex in c > 0, so a golden-section search is enough.
    let c_min = 2.0 / sn;
    let (mut a, mut b) = (c_min, C_MAX);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c1 = b - phi * (b - a);
        let c2 = a + phi * (b - a);
        if av(c1, iq_rho, omega2, iv_pilot) <= av(c2, iq_rho, omega2, iv_pilot) {
            b = c2;
        } else {
            a = c1;
        }
    }
    let mut c_multi = 0.5 * (a + b);
    for edge in [c_min, C_MAX] {
        if av(edge, iq_rho, omega2, iv_pilot) <= av(c_multi, iq_rho, omega2, iv_pilot) {
            c_multi = edge;
        }
    }
    let m = m_of(c_multi, n);
    Ok(MsrvTuning {
        c_multi,
        m,
        avar_multi: av(m as f64 / sn, iq_rho, omega2, iv_pilot),
        omega2,
        iv_pilot,
        rho,
        fallback: false,
    })
}

/// `N^{1/4}(est − truth)/√avar_multi`.
pub fn studentize_msrv(est: f64, truth: f64, n_returns: usize, t: &MsrvTuning) -> Result<f64> {
    if !(t.avar_multi > 0.0) {
        return Err(Error::param("avar_multi", "must be positive"));
    }
    Ok((n_returns as f64).powf(0.25) * (est - truth) / t.avar_multi.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_equidistant_uses_smallest_scale() {
        let n = 400;
        // Smooth returns have positive lag-one autocovariance, so the noise
        // estimate is floored at zero.
        let v: Vec<f64> = (0..=n).map(|i| (i as f64 * 0.01).sin() * 0.1).collect();
        let d = vec![1.0 / n as f64; n];
        let t = msrv_tuning(&v, &d).unwrap();
        assert_eq!(t.omega2, 0.0);
        assert_eq!(t.c_multi, 2.0 / 20.0);
        assert!((t.rho - 1.0).abs() < 1e-12);
        assert_eq!(t.m, 2);
        let c = 2.0 / 20.0;
        assert!((t.avar_multi - 52.0 / 35.0 * c * t.iv_pilot * t.iv_pilot).abs() < 1e-15);
    }

    #[test]
    fn short_series() {
        assert!(msrv_tuning(&[0.0; 10], &[0.1; 9]).is_err());
    }
}
