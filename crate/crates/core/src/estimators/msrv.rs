use crate::error::{Error, Result};

/// Multiscale weights `α_{i,M}`, `i = 1..=M`. They satisfy `Σα = 1` and
/// `Σα/i = 0`.
pub fn msrv_weights(m: usize) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::param("M", "the multiscale estimator needs M >= 2"));
    }
    let mf = m as f64;
    let c3 = mf * mf * mf - mf;
    let c2 = mf * mf - 1.0;
    Ok((1..=m)
        .map(|i| {
            let i = i as f64;
            12.0 * i * i / c3 - 6.0 * i / c2 - 6.0 * i / c3
        })
        .collect())
}

/// `Σ_{i=1}^{M} (α_i/i) Σ_{j=i}^{N} (V_j − V_{j−i})²`.
pub fn msrv(values: &[f64], m: usize) -> Result<f64> {
    if values.len() <= m {
        return Err(Error::InsufficientData(format!(
            "MSRV with M = {m} needs more than {m} observations, got {}",
            values.len()
        )));
    }
    let w = msrv_weights(m)?;
    Ok(w.iter()
        .enumerate()
        .map(|(idx, a)| {
            let lag = idx + 1;
            let s: f64 = (lag..values.len()).map(|j| (values[j] - values[j - lag]).powi(2)).sum();
            a / lag as f64 * s
        })
        .sum())
}
