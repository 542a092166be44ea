//! Noisy observations `𝖷_{S^i} = X_{S^i} + U^X_{S^i}`.
//!
//! The noise is the sum of an endogenous part `b_n^{-1/2} ΔX̲` driven by the
//! latent path and an i.i.d. Gaussian part `ε` with covariance `Ψ`. The two
//! ε components are drawn jointly at every distinct epoch of the merged
//! designs, so that coinciding ticks see the cross covariance `Ψ^{12}`.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::paths::LatentPath;
use crate::rng::{Purpose, RngSeed};
use crate::sampling::SamplingTimes;
use crate::Asset;

/// Time-varying noise covariance `t -> Ψ_t`.
pub type PsiFn = Arc<dyn Fn(f64) -> [[f64; 2]; 2] + Send + Sync>;

#[derive(Clone)]
pub struct NoiseConfig {
    pub psi: [[f64; 2]; 2],
    /// Overrides `psi` when present.
    pub psi_fn: Option<PsiFn>,
    pub endo_scale_x: f64,
    pub endo_scale_y: f64,
    /// Linear-process weights on ε (`λ^1`, `λ^2`) and on `ΔX̲` (`μ^1`, `μ^2`).
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub mu1: Vec<f64>,
    pub mu2: Vec<f64>,
}

impl std::fmt::Debug for NoiseConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NoiseConfig")
            .field("psi", &self.psi)
            .field("psi_fn", &self.psi_fn.as_ref().map(|_| "<fn>"))
            .field("endo_scale_x", &self.endo_scale_x)
            .field("endo_scale_y", &self.endo_scale_y)
            .field("lambda1", &self.lambda1)
            .field("lambda2", &self.lambda2)
            .field("mu1", &self.mu1)
            .field("mu2", &self.mu2)
            .finish()
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self::none()
    }
}

impl NoiseConfig {
    /// No noise at all.
    pub fn none() -> Self {
        Self {
            psi: [[0.0; 2]; 2],
            psi_fn: None,
            endo_scale_x: 0.0,
            endo_scale_y: 0.0,
            lambda1: vec![1.0],
            lambda2: vec![1.0],
            mu1: vec![1.0],
            mu2: vec![1.0],
        }
    }

    /// Independent Gaussian noise with variances `v1`, `v2` and covariance `c`.
    pub fn iid(v1: f64, v2: f64, c: f64) -> Self {
        Self {
            psi: [[v1, c], [c, v2]],
            ..Self::none()
        }
    }

    /// Endogenous noise `b_n^{-1/2} ΔX̲` with unit scale on both assets.
    pub fn endogenous() -> Self {
        Self {
            endo_scale_x: 1.0,
            endo_scale_y: 1.0,
            ..Self::none()
        }
    }

    fn psi_at(&self, t: f64) -> [[f64; 2]; 2] {
        match &self.psi_fn {
            Some(f) => f(t),
            None => self.psi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_psd(self.psi)
    }

    fn is_silent(&self) -> bool {
        self.psi_fn.is_none() && self.psi == [[0.0; 2]; 2]
    }
}

fn check_psd(p: [[f64; 2]; 2]) -> Result<()> {
    let ok = p[0][1] == p[1][0]
        && p[0][0] >= 0.0
        && p[1][1] >= 0.0
        && p[0][0] * p[1][1] - p[0][1] * p[1][0] >= -1e-15 * (p[0][0] * p[1][1]).abs().max(1e-300);
    if ok {
        Ok(())
    } else {
        Err(Error::param("psi", format!("noise covariance {p:?} is not symmetric PSD")))
    }
}

/// Lower Cholesky factor of a 2×2 PSD matrix.
fn chol(p: [[f64; 2]; 2]) -> [f64; 3] {
    let l11 = p[0][0].max(0.0).sqrt();
    let l21 = if l11 > 0.0 { p[1][0] / l11 } else { 0.0 };
    let l22 = (p[1][1] - l21 * l21).max(0.0).sqrt();
    [l11, l21, l22]
}

/// Observed values of one asset on its design.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Latent prices at the epochs.
    pub latent: Vec<f64>,
    /// The i.i.d. ε draws at the epochs (kept for oracle checks).
    pub eps: Vec<f64>,
    pub b_n: f64,
}

impl ObservationSeries {
    /// Series made directly from values (no latent information).
    pub fn from_values(times: Vec<f64>, values: Vec<f64>, b_n: f64) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::param("values", "times and values differ in length"));
        }
        SamplingTimes::new(times.clone(), b_n, "external")?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("values", "non-finite observation"));
        }
        Ok(Self {
            latent: values.clone(),
            eps: vec![0.0; values.len()],
            times,
            values,
            b_n,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Multiplies all observed values by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| c * v).collect(),
            ..self.clone()
        }
    }
}

/// Latent values at the epochs of `times` that lie on the path's grid.
/// Exit-time designs carry the exact driver value at each epoch, which
/// replaces the interpolated martingale part.
pub fn latent_at(path: &LatentPath, times: &SamplingTimes, asset: Asset) -> Vec<f64> {
    let n = times.times.partition_point(|&t| t <= path.grid.t1);
    let exact = match &times.driver {
        Some((a, levels)) if *a == asset => Some(levels),
        _ => None,
    };
    (0..n)
        .map(|i| {
            let t = times.times[i];
            match exact {
                Some(levels) => path.drift_at(asset, t) + levels[i],
                None => path.value_at(asset, t),
            }
        })
        .collect()
}

/// Endogenous-noise increments `ΔX̲_{S^i}` with `ΔX̲_{S^0} = 0`.
fn driver_increments(path: &LatentPath, times: &[f64], latent: &[f64], asset: Asset) -> Vec<f64> {
    let u: Vec<f64> = times
        .iter()
        .zip(latent)
        .map(|(&t, &x)| path.driver_at(asset, t, x))
        .collect();
    let mut d = vec![0.0; u.len()];
    for i in 1..u.len() {
        d[i] = u[i] - u[i - 1];
    }
    d
}

/// Draws ε for both designs: one bivariate draw per distinct epoch of the
/// merged set, component 1 for X and component 2 for Y.
fn draw_eps(cfg: &NoiseConfig, s: &[f64], t: &[f64], seed: RngSeed) -> (Vec<f64>, Vec<f64>) {
    let mut ex = vec![0.0; s.len()];
    let mut ey = vec![0.0; t.len()];
    if cfg.is_silent() {
        return (ex, ey);
    }
    let mut rng = seed.rng(Purpose::Noise);
    let (mut i, mut j) = (0, 0);
    while i < s.len() || j < t.len() {
        let ti = s.get(i).copied().unwrap_or(f64::INFINITY);
        let tj = t.get(j).copied().unwrap_or(f64::INFINITY);
        let now = ti.min(tj);
        let [l11, l21, l22] = chol(cfg.psi_at(now));
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        if ti == now {
            ex[i] = l11 * z1;
            i += 1;
        }
        if tj == now {
            ey[j] = l21 * z1 + l22 * z2;
            j += 1;
        }
    }
    (ex, ey)
}

fn assemble(latent: Vec<f64>, eps: Vec<f64>, endo: Vec<f64>, times: Vec<f64>, b_n: f64) -> ObservationSeries {
    let values = latent
        .iter()
        .zip(&eps)
        .zip(&endo)
        .map(|((x, e), u)| x + e + u)
        .collect();
    ObservationSeries {
        times,
        values,
        latent,
        eps,
        b_n,
    }
}

/// Observations of both assets on their designs.
pub fn observe_pair(
    path: &LatentPath,
    s: &SamplingTimes,
    t: &SamplingTimes,
    cfg: &NoiseConfig,
    seed: RngSeed,
) -> Result<(ObservationSeries, ObservationSeries)> {
    cfg.validate()?;
    let lx = latent_at(path, s, Asset::X);
    let ly = latent_at(path, t, Asset::Y);
    let ts = s.times[..lx.len()].to_vec();
    let tt = t.times[..ly.len()].to_vec();
    if let Some(bad) = ts.iter().chain(&tt).find(|&&x| {
        let p = cfg.psi_at(x);
        check_psd(p).is_err()
    }) {
        return Err(Error::param("psi", format!("noise covariance not PSD at t={bad}")));
    }
    let (ex, ey) = draw_eps(cfg, &ts, &tt, seed);
    let endo = |times: &[f64], latent: &[f64], asset: Asset, scale: f64, b_n: f64| -> Vec<f64> {
        if scale == 0.0 {
            return vec![0.0; times.len()];
        }
        let rb = 1.0 / b_n.sqrt();
        driver_increments(path, times, latent, asset)
            .into_iter()
            .map(|d| scale * (rb * d))
            .collect()
    };
    let ux = endo(&ts, &lx, Asset::X, cfg.endo_scale_x, s.b_n);
    let uy = endo(&tt, &ly, Asset::Y, cfg.endo_scale_y, t.b_n);
    Ok((
        assemble(lx, ex, ux, ts, s.b_n),
        assemble(ly, ey, uy, tt, t.b_n),
    ))
}

/// Observations of a single asset (the ε stream is the X component of the
/// pair construction on the design merged with itself).
pub fn observe(
    path: &LatentPath,
    times: &SamplingTimes,
    asset: Asset,
    cfg: &NoiseConfig,
    seed: RngSeed,
) -> Result<ObservationSeries> {
    let (x, y) = observe_pair(path, times, times, cfg, seed)?;
    Ok(match asset {
        Asset::X => x,
        Asset::Y => {
            let _ = x;
            y
        }
    })
}

/// Synchronous observations with linear-process noise
/// `Σ_u λ_u ε_{i−u} + b_n^{-1/2} Σ_u μ_u ΔX̲_{i−u}`.
pub fn observe_linear_process(
    path: &LatentPath,
    s: &SamplingTimes,
    t: &SamplingTimes,
    cfg: &NoiseConfig,
    seed: RngSeed,
) -> Result<(ObservationSeries, ObservationSeries)> {
    if s.times != t.times {
        return Err(Error::Unsupported(
            "linear-process noise is defined for synchronous designs only".into(),
        ));
    }
    let base = NoiseConfig {
        lambda1: vec![1.0],
        lambda2: vec![1.0],
        mu1: vec![1.0],
        mu2: vec![1.0],
        ..cfg.clone()
    };
    let (bx, by) = observe_pair(path, s, t, &NoiseConfig { endo_scale_x: 0.0, endo_scale_y: 0.0, ..base.clone() }, seed)?;
    let rb = 1.0 / s.b_n.sqrt();
    let build = |o: ObservationSeries, asset: Asset, lambda: &[f64], mu: &[f64], scale: f64| {
        let n = o.len();
        let d = if scale == 0.0 {
            vec![0.0; n]
        } else {
            driver_increments(path, &o.times, &o.latent, asset)
        };
        let mut eps_part = vec![0.0; n];
        let mut endo_part = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for (u, l) in lambda.iter().enumerate().take(i + 1) {
                acc += l * o.eps[i - u];
            }
            eps_part[i] = acc;
            if scale != 0.0 {
                let mut acc = 0.0;
                for (u, m) in mu.iter().enumerate().take(i + 1) {
                    acc += m * (rb * d[i - u]);
                }
                endo_part[i] = scale * acc;
            }
        }
        ObservationSeries {
            values: o
                .latent
                .iter()
                .zip(&eps_part)
                .zip(&endo_part)
                .map(|((x, e), u)| x + e + u)
                .collect(),
            ..o
        }
    };
    Ok((
        build(bx, Asset::X, &cfg.lambda1, &cfg.mu1, cfg.endo_scale_x),
        build(by, Asset::Y, &cfg.lambda2, &cfg.mu2, cfg.endo_scale_y),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{simulate_bridge, ModelConfig, TimeGrid};
    use crate::sampling::{gen_barrier_hitting, gen_equidistant};

    fn setup(endo: f64) -> (LatentPath, SamplingTimes) {
        let cfg = ModelConfig {
            endo_factor_x: endo,
            endo_factor_y: endo,
            ..ModelConfig::default()
        };
        let p = simulate_bridge(&TimeGrid::unit(), &cfg, RngSeed::new(1, 2)).unwrap();
        (p, gen_equidistant(1.0, 1.0 / 3600.0).unwrap())
    }

    #[test]
    fn noiseless_values_equal_latent() {
        let (p, s) = setup(0.0);
        let o = observe(&p, &s, Asset::X, &NoiseConfig::none(), RngSeed::new(0, 0)).unwrap();
        assert_eq!(o.values, o.latent);
        assert_eq!(o.latent[3600], p.x[36_000]);
        assert_eq!(o.latent[1], p.x[10]);
    }

    #[test]
    fn iid_noise_variance() {
        let (p, s) = setup(0.0);
        let v = 0.001 * 0.02f64.powi(2);
        let o = observe(&p, &s, Asset::X, &NoiseConfig::iid(v, v, 0.0), RngSeed::new(0, 1)).unwrap();
        let n = o.len() as f64;
        let d: Vec<f64> = o.values.iter().zip(&o.latent).map(|(a, b)| a - b).collect();
        let mean = d.iter().sum::<f64>() / n;
        let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var / v - 1.0).abs() < 3.5 * (2.0 / n).sqrt(), "var = {var}");
        assert!(mean.abs() < 3.5 * (v / n).sqrt());
    }

    #[test]
    fn endogenous_noise_is_negatively_correlated_with_returns() {
        let delta = -(0.001f64).sqrt();
        let (p, s) = setup(delta);
        let o = observe(&p, &s, Asset::X, &NoiseConfig::endogenous(), RngSeed::new(0, 0)).unwrap();
        let noise: Vec<f64> = o.values.iter().zip(&o.latent).map(|(a, b)| a - b).collect();
        let ret: Vec<f64> = o.latent.windows(2).map(|w| w[1] - w[0]).collect();
        for i in 1..o.len() {
            let expect = delta * 60.0 * ret[i - 1];
            assert!((noise[i] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_psd() {
        let (p, s) = setup(0.0);
        let cfg = NoiseConfig::iid(1.0, 1.0, 2.0);
        assert!(observe(&p, &s, Asset::X, &cfg, RngSeed::new(0, 0)).is_err());
    }

    #[test]
    fn coinciding_ticks_share_cross_covariance() {
        let (p, s) = setup(0.0);
        let cfg = NoiseConfig::iid(1.0, 1.0, 0.6);
        let (x, y) = observe_pair(&p, &s, &s, &cfg, RngSeed::new(4, 4)).unwrap();
        let n = x.len() as f64;
        let c = x.eps.iter().zip(&y.eps).map(|(a, b)| a * b).sum::<f64>() / n;
        assert!((c - 0.6).abs() < 4.0 * (1.36 / n).sqrt(), "c = {c}");
    }

    #[test]
    fn linear_process_degenerates_to_observe() {
        let (p, s) = setup(-0.03);
        let cfg = NoiseConfig {
            endo_scale_x: 1.0,
            endo_scale_y: 1.0,
            ..NoiseConfig::iid(1e-7, 2e-7, 0.0)
        };
        let (a, b) = observe_pair(&p, &s, &s, &cfg, RngSeed::new(7, 1)).unwrap();
        let (c, d) = observe_linear_process(&p, &s, &s, &cfg, RngSeed::new(7, 1)).unwrap();
        assert_eq!(a.values, c.values);
        assert_eq!(b.values, d.values);
    }

    #[test]
    fn linear_process_requires_synchrony() {
        let (p, s) = setup(0.0);
        let t = gen_equidistant(1.0, 1.0 / 1800.0).unwrap();
        let r = observe_linear_process(&p, &s, &t, &NoiseConfig::none(), RngSeed::new(0, 0));
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }

    #[test]
    fn hitting_epochs_use_exact_driver_values() {
        let (p, _) = setup(0.0);
        let b = 1.0 / 3600.0;
        let s = gen_barrier_hitting(&p, Asset::X, 0.01, 0.04, b, RngSeed::new(1, 1)).unwrap();
        let l = latent_at(&p, &s, Asset::X);
        let (_, levels) = s.driver.as_ref().unwrap();
        for i in 1..l.len() {
            let dm = levels[i] - levels[i - 1];
            assert!((dm.abs() - 0.01 * b.sqrt()).abs() < 1e-12 || (dm - 0.04 * b.sqrt()).abs() < 1e-12);
            let interp = p.value_at(Asset::X, s.times[i]);
            // Interpolation and the exact level agree up to the sub-step path.
            assert!((l[i] - interp).abs() < 5e-4);
        }
    }
}
