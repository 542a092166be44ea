use statrs::distribution::{Continuous, ContinuousCDF, Normal};

/// Silverman's rule of thumb `0.9 min(sd, IQR/1.34) n^{-1/5}`.
pub fn silverman_bandwidth(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let sd = (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let iqr = quantile(&s, 0.75) - quantile(&s, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    0.9 * spread * n.powf(-0.2)
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let (lo, frac) = (pos.floor() as usize, pos.fract());
    if lo + 1 < sorted.len() {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[lo]
    }
}

/// Gaussian kernel density estimate on `points` equally spaced abscissae
/// covering `[-5, 5]`, as rows `(x, density, standard normal density)`.
pub fn density_export(x: &[f64], points: usize) -> Vec<(f64, f64, f64)> {
    let z = Normal::standard();
    if x.len() < 2 || points < 2 {
        return Vec::new();
    }
    let h = silverman_bandwidth(x);
    let norm = 1.0 / (x.len() as f64 * h);
    (0..points)
        .map(|i| {
            let g = -5.0 + 10.0 * i as f64 / (points - 1) as f64;
            let d = x.iter().map(|v| z.pdf((g - v) / h)).sum::<f64>() * norm;
            (g, d, z.pdf(g))
        })
        .collect()
}

/// Normal QQ pairs `(Φ^{-1}(k/(n+1)), x_(k))`.
pub fn qq_export(x: &[f64]) -> Vec<(f64, f64)> {
    let z = Normal::standard();
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.into_iter()
        .enumerate()
        .map(|(k, v)| (z.inverse_cdf((k + 1) as f64 / (n + 1.0)), v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kde_integrates_to_one() {
        let x: Vec<f64> = (0..200).map(|i| ((i as f64 + 0.5) / 200.0 - 0.5) * 3.0).collect();
        let d = density_export(&x, 1001);
        let step = 10.0 / 1000.0;
        let mass: f64 = d.iter().map(|r| r.1).sum::<f64>() * step;
        assert!((mass - 1.0).abs() < 1e-3, "{mass}");
    }

    #[test]
    fn qq_is_sorted_and_symmetric() {
        let q = qq_export(&[3.0, -1.0, 0.0]);
        assert_eq!(q.iter().map(|r| r.1).collect::<Vec<_>>(), vec![-1.0, 0.0, 3.0]);
        assert!((q[0].0 + q[2].0).abs() < 1e-12);
        assert!(q[1].0.abs() < 1e-12);
    }
}
