//! Observation epochs and their refresh-time synchronization.

pub mod barrier;
pub mod diagnostics;
pub mod refresh;

use rand::Rng;
use rand_distr::{Distribution, Exp, InverseGaussian};

use crate::error::{Error, Result};
use crate::paths::LatentPath;
use crate::rng::{Purpose, RngSeed};
use crate::Asset;

pub use barrier::Refinement;
pub use diagnostics::{duration_diagnostics, DiagnosticSeries, DurationSummary, Moment};
pub use refresh::{refresh, RefreshData};

/// Ordered observation epochs of one asset.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingTimes {
    /// Strictly increasing, starting at 0.
    pub times: Vec<f64>,
    /// Nominal duration scale.
    pub b_n: f64,
    pub scheme_tag: String,
    /// When the epochs are exit times of a path's martingale part: the asset
    /// whose martingale drives them and its exact value at every epoch.
    pub driver: Option<(Asset, Vec<f64>)>,
}

impl SamplingTimes {
    pub fn new(times: Vec<f64>, b_n: f64, scheme_tag: impl Into<String>) -> Result<Self> {
        validate_times(&times)?;
        if !(b_n > 0.0) {
            return Err(Error::param("b_n", "must be positive"));
        }
        Ok(Self {
            times,
            b_n,
            scheme_tag: scheme_tag.into(),
            driver: None,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Epochs not exceeding `horizon`.
    pub fn truncated(&self, horizon: f64) -> SamplingTimes {
        let n = self.times.partition_point(|&t| t <= horizon);
        SamplingTimes {
            times: self.times[..n].to_vec(),
            b_n: self.b_n,
            scheme_tag: self.scheme_tag.clone(),
            driver: self
                .driver
                .as_ref()
                .map(|(a, v)| (*a, v[..n.min(v.len())].to_vec())),
        }
    }

    /// Number of returns observed up to `horizon`.
    pub fn n_returns(&self, horizon: f64) -> usize {
        self.times.partition_point(|&t| t <= horizon).saturating_sub(1)
    }

    pub fn durations(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.first() != Some(&0.0) {
        return Err(Error::param("times", "epochs must start at 0"));
    }
    if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::param(
            "times",
            format!("epochs must be strictly increasing ({} then {})", w[0], w[1]),
        ));
    }
    Ok(())
}

/// The sampling schemes offered by the generators below.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchemeConfig {
    Equidistant {
        b_n: f64,
    },
    BarrierHitting {
        u: f64,
        v: f64,
        b_n: f64,
        driver: Asset,
    },
    MixedHitting {
        mu: f64,
        c: f64,
        b_n: f64,
    },
    PoissonChangePoint(PoissonConfig),
    LoMacKinlay(LoMacKinlayConfig),
}

/// `S^i = i b_n` for `i = 0..=ceil(horizon / b_n)`; the last epoch is snapped
/// to the horizon when it lands on it up to rounding.
pub fn gen_equidistant(horizon: f64, b_n: f64) -> Result<SamplingTimes> {
    if !(b_n > 0.0) || !b_n.is_finite() {
        return Err(Error::param("b_n", "must be positive"));
    }
    if !(horizon > 0.0) {
        return Err(Error::param("horizon", "must be positive"));
    }
    let n = (horizon / b_n - 1e-9).ceil().max(1.0) as usize;
    let mut times: Vec<f64> = (0..=n).map(|i| i as f64 * b_n).collect();
    if (times[n] - horizon).abs() < 1e-9 * b_n {
        times[n] = horizon;
    }
    SamplingTimes::new(times, b_n, "equidistant")
}

/// Exit times of `M − M_{S^i}` from `(−u√b_n, v√b_n)` where `M` is the
/// martingale part of `driver` in `path`.
pub fn gen_barrier_hitting(
    path: &LatentPath,
    driver: Asset,
    u: f64,
    v: f64,
    b_n: f64,
    seed: RngSeed,
) -> Result<SamplingTimes> {
    if !(u > 0.0 && v > 0.0) {
        return Err(Error::param("u/v", "barriers must be positive"));
    }
    let (d, up) = (u * b_n.sqrt(), v * b_n.sqrt());
    let mut st = hitting_times(path, driver, b_n, move || Some((d, up)), seed)?;
    st.scheme_tag = "hitting".into();
    Ok(st)
}

/// Barrier hitting with i.i.d. random barriers `(U_i, V_i)` drawn from
/// `sampler` (Skorohod embedding of a general return law).
pub fn gen_general_return<F>(
    path: &LatentPath,
    driver: Asset,
    mut sampler: F,
    b_n: f64,
    seed: RngSeed,
) -> Result<SamplingTimes>
where
    F: FnMut(&mut rand_chacha::ChaCha8Rng) -> (f64, f64),
{
    let mut rng = seed.rng(Purpose::Sampling);
    let sb = b_n.sqrt();
    let mut bad = None;
    let st = hitting_times(
        path,
        driver,
        b_n,
        || {
            let (u, v) = sampler(&mut rng);
            if !(u > 0.0 && v > 0.0) {
                bad = Some((u, v));
                return None;
            }
            Some((u * sb, v * sb))
        },
        seed,
    )?;
    if let Some((u, v)) = bad {
        return Err(Error::param("uv_sampler", format!("non-positive barrier pair ({u}, {v})")));
    }
    Ok(SamplingTimes {
        scheme_tag: "general_return".into(),
        ..st
    })
}

fn hitting_times<B: FnMut() -> Option<(f64, f64)>>(
    path: &LatentPath,
    driver: Asset,
    b_n: f64,
    bands: B,
    seed: RngSeed,
) -> Result<SamplingTimes> {
    if !(b_n > 0.0) {
        return Err(Error::param("b_n", "must be positive"));
    }
    let times = path.grid.times();
    let m = path.martingale(driver);
    let rate = path.spot(driver);
    let mut rng = seed.rng(Purpose::Refinement);
    let crossings = barrier::scan(&times, m, rate, bands, Refinement::default(), &mut rng);
    let mut out = Vec::with_capacity(crossings.len() + 1);
    let mut levels = Vec::with_capacity(crossings.len() + 1);
    out.push(path.grid.t0);
    levels.push(m[0]);
    for c in crossings {
        // Two crossings can coincide in floating point only in pathological
        // cases; the later one is then dropped to keep times strictly ordered.
        if c.time > *out.last().unwrap() {
            out.push(c.time);
            levels.push(c.level);
        }
    }
    let mut st = SamplingTimes::new(out, b_n, "hitting")?;
    st.driver = Some((driver, levels));
    Ok(st)
}

/// Mixed hitting-time durations: `S^{i+1} − S^i ~ IG(√b_n c ζ_i, μ/√b_n)`
/// in the `(δ, γ)` parametrisation, i.e. mean `δ/γ` and shape `δ²`.
pub fn gen_mixed_hitting<Z>(
    mu: f64,
    c: f64,
    mut zeta: Z,
    b_n: f64,
    horizon: f64,
    seed: RngSeed,
) -> Result<SamplingTimes>
where
    Z: FnMut(&mut rand_chacha::ChaCha8Rng) -> f64,
{
    if !(mu > 0.0 && c > 0.0 && b_n > 0.0) {
        return Err(Error::param("mu/c/b_n", "must be positive"));
    }
    let mut rng = seed.rng(Purpose::Sampling);
    let mut times = vec![0.0];
    let mut t = 0.0;
    while t < horizon {
        let z = zeta(&mut rng);
        if !(z > 0.0) {
            return Err(Error::param("zeta_sampler", format!("non-positive draw {z}")));
        }
        let d = ig_duration(mu, c, z, b_n, &mut rng)?;
        t += d;
        times.push(t);
    }
    SamplingTimes::new(times, b_n, "mixed_hitting")
}

fn ig_duration<R: Rng>(mu: f64, c: f64, zeta: f64, b_n: f64, rng: &mut R) -> Result<f64> {
    let delta = b_n.sqrt() * c * zeta;
    let gamma = mu / b_n.sqrt();
    let ig = InverseGaussian::new(delta / gamma, delta * delta)
        .map_err(|e| Error::param("inverse_gaussian", e.to_string()))?;
    Ok(ig.sample(rng))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PoissonConfig {
    pub p_under: [f64; 2],
    pub p_over: [f64; 2],
    pub tau: [f64; 2],
    pub n: f64,
}

/// Two independent Poisson designs whose intensity switches from
/// `n p_under` to `n p_over` at the change points `τ¹`, `τ²`.
pub fn gen_poisson_changepoint(
    cfg: &PoissonConfig,
    horizon: f64,
    seed: RngSeed,
) -> Result<(SamplingTimes, SamplingTimes)> {
    let mut rng = seed.rng(Purpose::Sampling);
    let b_n = 1.0 / cfg.n;
    let mut one = |l: usize| -> Result<SamplingTimes> {
        let (pu, po, tau) = (cfg.p_under[l], cfg.p_over[l], cfg.tau[l]);
        if !(pu > 0.0 && po > 0.0 && cfg.n > 0.0) {
            return Err(Error::param("poisson", "intensities must be positive"));
        }
        if !(0.0..=horizon).contains(&tau) {
            return Err(Error::param("tau", "change point must lie in [0, horizon]"));
        }
        let before = Exp::new(cfg.n * pu).map_err(|e| Error::param("poisson", e.to_string()))?;
        let after = Exp::new(cfg.n * po).map_err(|e| Error::param("poisson", e.to_string()))?;
        let mut times = vec![0.0];
        let mut t: f64 = 0.0;
        // Before τ: arrivals of the slow/fast process, restarted at τ
        // (memorylessness makes the restart exact).
        loop {
            let next = t + before.sample(&mut rng);
            if next >= tau {
                break;
            }
            t = next;
            times.push(t);
        }
        t = tau;
        loop {
            t += after.sample(&mut rng);
            times.push(t);
            if t >= horizon {
                break;
            }
        }
        SamplingTimes::new(times, b_n, "poisson_changepoint")
    };
    let s = one(0)?;
    let t = one(1)?;
    Ok((s, t))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LoMacKinlayConfig {
    /// Non-trading probabilities `p¹`, `p²`.
    pub p: [f64; 2],
    pub b_n: f64,
    /// Base epochs: equidistant (`None`) or mixed hitting with `(μ, c)` and
    /// unit `ζ`.
    pub mixed: Option<(f64, f64)>,
}

/// Bernoulli thinning of common base epochs `τ_m`: asset `l` trades at
/// `τ_m` with probability `1 − p^l`. The base epoch `τ_0 = 0` is kept by
/// both assets so that every design starts at 0.
pub fn gen_lo_mackinlay(
    cfg: &LoMacKinlayConfig,
    horizon: f64,
    seed: RngSeed,
) -> Result<(SamplingTimes, SamplingTimes)> {
    for p in cfg.p {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::param("p", format!("non-trading probability must lie in [0,1), got {p}")));
        }
    }
    let base = match cfg.mixed {
        None => gen_equidistant(horizon, cfg.b_n)?.times,
        Some((mu, c)) => gen_mixed_hitting(mu, c, |_| 1.0, cfg.b_n, horizon, seed)?.times,
    };
    let mut rng = seed.rng(Purpose::Custom(0x4c4d));
    let mut s = vec![0.0];
    let mut t = vec![0.0];
    for &tau in &base[1..] {
        if rng.random::<f64>() >= cfg.p[0] {
            s.push(tau);
        }
        if rng.random::<f64>() >= cfg.p[1] {
            t.push(tau);
        }
    }
    Ok((
        SamplingTimes::new(s, cfg.b_n, "lo_mackinlay")?,
        SamplingTimes::new(t, cfg.b_n, "lo_mackinlay")?,
    ))
}
