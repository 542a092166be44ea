//! Noise autocovariances and the Ξ statistics on refresh designs.

use crate::error::{Error, Result};
use crate::sampling::RefreshData;

use super::{preavg, Design, StepSeries, WeightFn};

/// First-order realized autocovariances `γ(1)^{11}`, `γ(1)^{22}`, `γ(1)^{12}`
/// as processes.
#[derive(Debug, Clone, PartialEq)]
pub struct Gamma1 {
    pub g11: StepSeries,
    pub g22: StepSeries,
    pub g12: StepSeries,
}

/// `xs`, `ys` are the next-tick designs `(Ŝ^k)`, `(T̂^k)`, `k = 0..=K`.
pub fn gamma1(xs: &Design, ys: &Design, rd: &RefreshData, k_n: usize) -> Result<Gamma1> {
    let n = rd.len();
    if xs.len() != n || ys.len() != n {
        return Err(Error::param("design", "next-tick designs must align with the refresh times"));
    }
    if n < 3 {
        return Err(Error::InsufficientData("autocovariances need at least three refresh times".into()));
    }
    let dx = xs.increments();
    let dy = ys.increments();
    let scale = -1.0 / (k_n as f64).powi(2);
    // dx[m − 1] is the increment ending at index m; the lag pair (m, m+1)
    // is complete at index m + 1.
    let own = |d: &[f64], times: &[f64]| {
        StepSeries::from_events(
            (1..d.len()).map(|m| (times[m + 1], d[m - 1] * d[m])).collect(),
            scale,
        )
    };
    let g12 = StepSeries::from_events(
        (1..dx.len())
            .map(|m| (rd.r[m + 1], dx[m - 1] * dy[m] + dx[m] * dy[m - 1]))
            .collect(),
        0.5 * scale,
    );
    Ok(Gamma1 {
        g11: own(&dx, &xs.times),
        g22: own(&dy, &ys.times),
        g12,
    })
}

/// `Ξ_{α,β} = (1/k) Σ_i X̄_α^i Ȳ_β^i` on the next-tick designs.
///
/// Only windows whose last observation `Ŝ^{i+k−1}` lies in the sample enter,
/// and each term is recorded at `R^{i+k−1}`.
pub fn xi(xs: &Design, ys: &Design, rd: &RefreshData, alpha: &WeightFn, beta: &WeightFn, k_n: usize) -> Result<StepSeries> {
    let xb = preavg(&xs.values, k_n, alpha)?;
    let yb = preavg(&ys.values, k_n, beta)?;
    let events = xb
        .iter()
        .zip(&yb)
        .enumerate()
        .map(|(i, (a, b))| (rd.r[i + k_n - 1], a * b))
        .collect();
    Ok(StepSeries::from_events(events, 1.0 / k_n as f64))
}

/// `Ξ[f] = (Ξ_{f',f} − Ξ_{f,f'}) / (2‖f'‖²)`. Vanishes identically when both
/// designs carry the same data.
pub fn xi_f(xs: &Design, ys: &Design, rd: &RefreshData, f: &WeightFn, k_n: usize) -> Result<StepSeries> {
    if !f.has_flat_ends() {
        return Err(Error::param("f", "needs f(0) = f(1) = f'(0) = f'(1) = 0"));
    }
    let df = f.derivative()?;
    let norm2 = crate::quadrature::integrate(|x| df.eval(x).powi(2), 0.0, 1.0, df.kinks(), 1e-13)?;
    let a = xi(xs, ys, rd, &df, f, k_n)?;
    let b = xi(xs, ys, rd, f, &df, k_n)?;
    let c = 0.5 / norm2;
    Ok(a.combine(c, &b, -c))
}
