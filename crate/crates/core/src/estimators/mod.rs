//! Point estimators of integrated (co)variance.

pub mod autocov;
pub mod mrc;
pub mod msrv;
pub mod phy;
pub mod preavg;
pub mod rv;
pub mod weight;

use crate::error::{Error, Result};
use crate::noise::ObservationSeries;
use crate::sampling::RefreshData;

pub use autocov::{gamma1, xi, xi_f, Gamma1};
pub use mrc::mrc;
pub use msrv::{msrv, msrv_weights};
pub use phy::{phy, phy_refresh};
pub use preavg::preavg;
pub use rv::{rq, rv};
pub use weight::{WeightFn, WeightTag};

/// How the pre-averaging normalisations are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Riemann sums over the actual weights `g(p/k_n)`, exact for finite `k_n`.
    #[default]
    Discrete,
    /// The limiting integrals `∫g`, `∫g²`, `∫g'²`.
    Continuous,
}

#[derive(Debug, Clone)]
pub struct PreAvgConfig {
    pub b_n: f64,
    pub theta: f64,
    pub k_n: usize,
    pub weight: WeightFn,
    pub normalization: Normalization,
}

impl PreAvgConfig {
    /// `k_n = ⌈θ √N⌉` with `N` the number of observed returns.
    pub fn from_returns(n_returns: usize, theta: f64, b_n: f64) -> Result<Self> {
        Self::with_k((theta * (n_returns as f64).sqrt()).ceil() as usize, theta, b_n)
    }

    /// `k_n = ⌈θ / √b_n⌉`.
    pub fn from_b_n(b_n: f64, theta: f64) -> Result<Self> {
        Self::with_k((theta / b_n.sqrt()).ceil() as usize, theta, b_n)
    }

    pub fn with_k(k_n: usize, theta: f64, b_n: f64) -> Result<Self> {
        if k_n < 2 {
            return Err(Error::param("k_n", format!("window must be at least 2, got {k_n}")));
        }
        if !(theta > 0.0) {
            return Err(Error::param("theta", "must be positive"));
        }
        Ok(Self {
            b_n,
            theta,
            k_n,
            weight: WeightFn::min_xx(),
            normalization: Normalization::Discrete,
        })
    }

    pub fn with_weight(mut self, weight: WeightFn) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_normalization(mut self, n: Normalization) -> Self {
        self.normalization = n;
        self
    }

    /// `k_n √b_n`, the effective θ of this configuration.
    pub fn theta_eff(&self) -> f64 {
        self.k_n as f64 * self.b_n.sqrt()
    }

    fn integral(&self, f: impl Fn(f64) -> f64) -> f64 {
        crate::quadrature::integrate(f, 0.0, 1.0, self.weight.kinks(), 1e-13).unwrap_or(f64::NAN)
    }

    /// `ψ_HY`: `(1/k)Σ g(p/k)` or `∫g`.
    pub fn psi_hy(&self) -> f64 {
        let k = self.k_n as f64;
        match self.normalization {
            Normalization::Discrete => self.weight.grid(self.k_n).iter().sum::<f64>() / k,
            Normalization::Continuous => self.integral(|x| self.weight.eval(x)),
        }
    }

    /// `ψ₂`: `(1/k)Σ g(p/k)²` or `∫g²`.
    pub fn psi2(&self) -> f64 {
        let k = self.k_n as f64;
        match self.normalization {
            Normalization::Discrete => self.weight.grid(self.k_n).iter().map(|g| g * g).sum::<f64>() / k,
            Normalization::Continuous => self.integral(|x| self.weight.eval(x).powi(2)),
        }
    }

    /// `ψ₁`: `k Σ_{p=1}^{k} (g(p/k) − g((p−1)/k))²` or `∫g'²`.
    pub fn psi1(&self) -> f64 {
        let k = self.k_n;
        match self.normalization {
            Normalization::Discrete => {
                let w = |p: usize| self.weight.eval(p as f64 / k as f64);
                (1..=k).map(|p| (w(p) - w(p - 1)).powi(2)).sum::<f64>() * k as f64
            }
            Normalization::Continuous => match self.weight.derivative() {
                Ok(d) => self.integral(|x| d.eval(x).powi(2)),
                Err(_) => f64::NAN,
            },
        }
    }
}

/// Right-continuous step function `t ↦ value`, zero before the first jump.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepSeries {
    /// Cumulative sums of `(time, increment)` events. Events are sorted by
    /// time (stable, so ties keep their order) and ties are merged.
    pub fn from_events(mut events: Vec<(f64, f64)>, scale: f64) -> Self {
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut s = StepSeries::default();
        let mut acc = 0.0;
        for (t, v) in events {
            acc += v;
            if s.times.last() == Some(&t) {
                *s.values.last_mut().unwrap() = acc * scale;
            } else {
                s.times.push(t);
                s.values.push(acc * scale);
            }
        }
        s
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let n = self.times.partition_point(|&x| x <= t);
        if n == 0 {
            0.0
        } else {
            self.values[n - 1]
        }
    }

    pub fn last(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            times: self.times.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Pointwise linear combination `a·self + b·other` on the merged jump times.
    pub fn combine(&self, a: f64, other: &StepSeries, b: f64) -> Self {
        let mut times: Vec<f64> = self.times.iter().chain(&other.times).copied().collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        let values = times
            .iter()
            .map(|&t| a * self.value_at(t) + b * other.value_at(t))
            .collect();
        Self { times, values }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorMeta {
    pub tag: &'static str,
    pub params: Vec<(&'static str, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorResult {
    pub value: f64,
    pub path: Option<StepSeries>,
    pub meta: EstimatorMeta,
}

/// Observation times and values of one asset on a (possibly interpolated)
/// design.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl Design {
    pub fn raw(o: &ObservationSeries) -> Self {
        Self {
            times: o.times.clone(),
            values: o.values.clone(),
        }
    }

    /// The next-tick design `(Ŝ^k, 𝖷_{Ŝ^k})` of the first asset.
    pub fn refresh_x(o: &ObservationSeries, rd: &RefreshData) -> Self {
        Self {
            times: rd.s_hat.clone(),
            values: rd.s_idx.iter().map(|&i| o.values[i]).collect(),
        }
    }

    /// The next-tick design `(T̂^k, 𝖸_{T̂^k})` of the second asset.
    pub fn refresh_y(o: &ObservationSeries, rd: &RefreshData) -> Self {
        Self {
            times: rd.t_hat.clone(),
            values: rd.t_idx.iter().map(|&j| o.values[j]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_n_rules() {
        let c = PreAvgConfig::from_returns(3600, 0.15, 1.0 / 3600.0).unwrap();
        assert_eq!(c.k_n, 9);
        let c = PreAvgConfig::from_b_n(1.0 / 3600.0, 0.15).unwrap();
        assert_eq!(c.k_n, 9);
        assert!(PreAvgConfig::with_k(1, 0.15, 1.0).is_err());
    }

    #[test]
    fn normalisations() {
        let c = PreAvgConfig::with_k(9, 0.15, 1.0 / 3600.0).unwrap();
        // Σ_{p=1}^{k-1} g(p/k) = (k² − 1)/(4k) for odd k.
        assert!((c.psi_hy() * 9.0 - 80.0 / 36.0).abs() < 1e-14);
        // For odd k the two middle weights coincide and one step vanishes.
        assert!((c.psi1() - 8.0 / 9.0).abs() < 1e-14);
        let c = c.with_normalization(Normalization::Continuous);
        assert!((c.psi_hy() - 0.25).abs() < 1e-13);
        assert!((c.psi1() - 1.0).abs() < 1e-12);
        assert!((c.psi2() - 1.0 / 12.0).abs() < 1e-13);
    }

    #[test]
    fn step_series_lookup() {
        let s = StepSeries::from_events(vec![(2.0, 1.0), (1.0, 2.0), (2.0, 0.5)], 2.0);
        assert_eq!(s.times, vec![1.0, 2.0]);
        assert_eq!(s.values, vec![4.0, 7.0]);
        assert_eq!(s.value_at(0.5), 0.0);
        assert_eq!(s.value_at(1.5), 4.0);
        assert_eq!(s.value_at(9.0), 7.0);
    }
}
