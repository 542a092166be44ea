use crate::error::{Error, Result};

/// Coefficients of the limit law of `√n(RV − [X])` under two-sided barrier
/// sampling with barriers `−u√b_n` and `v√b_n` on the driving martingale.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RvLimitLaw {
    /// Skewness coefficient `v_s = E(ΔM)³ / (√b_n E(ΔM)²) = v − u`.
    pub v_s: f64,
    /// Kurtosis coefficient `u_s² = E(ΔM)⁴ / (b_n E(ΔM)²) = u² − uv + v²`.
    pub u_s2: f64,
    /// `(2/3) v_s (X_1 − X_0)`, the mean shift.
    pub bias: f64,
    /// `√((2/3)(u_s² − (2/3)v_s²)) · √[X]_1`, the mixed-normal scale.
    pub diffusion: f64,
}

pub fn rv_limit_law(u: f64, v: f64, qv: f64, x_increment: f64) -> Result<RvLimitLaw> {
    if !(u > 0.0 && v > 0.0) {
        return Err(Error::param("u, v", "barriers must be positive"));
    }
    let v_s = v - u;
    let u_s2 = u * u - u * v + v * v;
    let inner = u_s2 - 2.0 / 3.0 * v_s * v_s;
    // (u − v)²/3 + uv > 0 for positive barriers.
    assert!(inner > 0.0, "barrier moment identity violated");
    Ok(RvLimitLaw {
        v_s,
        u_s2,
        bias: 2.0 / 3.0 * v_s * x_increment,
        diffusion: (2.0 / 3.0 * inner).sqrt() * qv.max(0.0).sqrt(),
    })
}
