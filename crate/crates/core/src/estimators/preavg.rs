use crate::error::{Error, Result};

use super::WeightFn;

/// Pre-averaged returns `Σ_{p=1}^{k−1} w(p/k)(V_{i+p} − V_{i+p−1})` for every
/// `i` with `i + k − 1` inside the series.
pub fn preavg(values: &[f64], k: usize, weight: &WeightFn) -> Result<Vec<f64>> {
    if k < 2 {
        return Err(Error::param("k_n", "window must be at least 2"));
    }
    if values.len() < k {
        return Err(Error::InsufficientData(format!(
            "pre-averaging with k_n = {k} needs at least {k} observations, got {}",
            values.len()
        )));
    }
    let w = weight.grid(k);
    let d: Vec<f64> = values.windows(2).map(|v| v[1] - v[0]).collect();
    Ok((0..=values.len() - k)
        .map(|i| {
            let mut acc = 0.0;
            for p in 1..k {
                acc += w[p - 1] * d[i + p - 1];
            }
            acc
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series() {
        let v = preavg(&[3.0; 12], 4, &WeightFn::min_xx()).unwrap();
        assert_eq!(v.len(), 9);
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn window_of_two() {
        let x = [0.0, 1.0, 3.0, 6.0];
        let v = preavg(&x, 2, &WeightFn::min_xx()).unwrap();
        assert_eq!(v, vec![0.5, 1.0, 1.5]);
    }

    #[test]
    fn too_short() {
        assert!(preavg(&[1.0, 2.0], 3, &WeightFn::min_xx()).is_err());
    }
}
