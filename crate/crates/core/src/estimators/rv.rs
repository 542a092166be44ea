/// Realized variance `Σ (ΔV)²`.
pub fn rv(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum()
}

/// Realized quarticity `Σ (ΔV)⁴`, unscaled.
pub fn rq(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).powi(4)).sum()
}
