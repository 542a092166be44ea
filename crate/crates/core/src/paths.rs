//! Latent bivariate semimartingales on a fine deterministic grid.
//!
//! Every path keeps its canonical decomposition `X = A + M` explicitly, so
//! that consumers (the barrier sampler, oracles in tests) can reach the
//! martingale part directly.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{Purpose, RngSeed};
use crate::Asset;

/// Equally spaced grid `t0 = s_0 < s_1 < ... < s_{n_fine} = t1`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub n_fine: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, n_fine: usize) -> Result<Self> {
        if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
            return Err(Error::param("t1", format!("horizon must exceed t0, got [{t0}, {t1}]")));
        }
        if n_fine == 0 {
            return Err(Error::param("n_fine", "at least one fine step is required"));
        }
        Ok(Self { t0, t1, n_fine })
    }

    /// Unit horizon with the default resolution of 36 000 steps.
    pub fn unit() -> Self {
        Self {
            t0: 0.0,
            t1: 1.0,
            n_fine: 36_000,
        }
    }

    pub fn mesh(&self) -> f64 {
        (self.t1 - self.t0) / self.n_fine as f64
    }

    /// Number of grid points (`n_fine + 1`).
    pub fn len(&self) -> usize {
        self.n_fine + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.n_fine {
            self.t1
        } else {
            self.t0 + k as f64 * self.mesh()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    /// Fine step containing `t` together with the fractional position inside
    /// it. Times within 1e-9 steps of a grid point snap onto that point.
    pub fn locate(&self, t: f64) -> (usize, f64) {
        let pos = (t - self.t0) / self.mesh();
        let nearest = pos.round();
        if (pos - nearest).abs() < 1e-9 {
            let k = (nearest.max(0.0) as usize).min(self.n_fine);
            return (k, 0.0);
        }
        let k = (pos.floor().max(0.0) as usize).min(self.n_fine - 1);
        (k, (pos - k as f64).clamp(0.0, 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriftKind {
    None,
    Bridge,
    Custom,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Volatility of both assets.
    pub sigma: f64,
    /// Terminal value of the X bridge.
    pub x1: f64,
    /// Terminal value of the Y bridge.
    pub y1: f64,
    /// Correlation of the two driving Wiener processes.
    pub corr: f64,
    pub drift_kind: DriftKind,
    /// The endogenous-noise drivers are `φ^X X` and `φ^Y Y`.
    pub endo_factor_x: f64,
    pub endo_factor_y: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let sigma = 0.02;
        Self {
            sigma,
            x1: sigma / 2.0,
            y1: sigma / 2.0,
            corr: 0.0,
            drift_kind: DriftKind::Bridge,
            endo_factor_x: 0.0,
            endo_factor_y: 0.0,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::param("sigma", format!("must be positive, got {}", self.sigma)));
        }
        check_corr(self.corr)?;
        for (name, v) in [
            ("x1", self.x1),
            ("y1", self.y1),
            ("endo_factor_x", self.endo_factor_x),
            ("endo_factor_y", self.endo_factor_y),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        Ok(())
    }
}

fn check_corr(corr: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&corr) {
        return Err(Error::param("corr", format!("must lie in [-1, 1], got {corr}")));
    }
    Ok(())
}

/// How the endogenous-noise drivers `X̲`, `Y̲` relate to the latent prices.
#[derive(Debug, Clone, PartialEq)]
pub enum EndoDrivers {
    /// `X̲ = φ^X X`, `Y̲ = φ^Y Y`; values between grid points follow the prices.
    Multiples { phi_x: f64, phi_y: f64 },
    /// Independently supplied driver paths on the grid.
    Paths { ux: Vec<f64>, uy: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct LatentPath {
    pub grid: TimeGrid,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Finite-variation parts.
    pub ax: Vec<f64>,
    pub ay: Vec<f64>,
    /// Martingale parts.
    pub mx: Vec<f64>,
    pub my: Vec<f64>,
    pub qv_x: Vec<f64>,
    pub qv_y: Vec<f64>,
    pub qc_xy: Vec<f64>,
    pub spot_x: Vec<f64>,
    pub spot_y: Vec<f64>,
    pub spot_xy: Vec<f64>,
    pub endo: EndoDrivers,
}

impl LatentPath {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn price(&self, asset: Asset) -> &[f64] {
        match asset {
            Asset::X => &self.x,
            Asset::Y => &self.y,
        }
    }

    pub fn drift_part(&self, asset: Asset) -> &[f64] {
        match asset {
            Asset::X => &self.ax,
            Asset::Y => &self.ay,
        }
    }

    pub fn martingale(&self, asset: Asset) -> &[f64] {
        match asset {
            Asset::X => &self.mx,
            Asset::Y => &self.my,
        }
    }

    pub fn spot(&self, asset: Asset) -> &[f64] {
        match asset {
            Asset::X => &self.spot_x,
            Asset::Y => &self.spot_y,
        }
    }

    /// Replace the endogenous-noise drivers by independently simulated paths.
    pub fn with_drivers(mut self, ux: Vec<f64>, uy: Vec<f64>) -> Result<Self> {
        if ux.len() != self.len() || uy.len() != self.len() {
            return Err(Error::param("drivers", "driver paths must share the grid length"));
        }
        self.endo = EndoDrivers::Paths { ux, uy };
        Ok(self)
    }

    /// Integrated spot variance `∫ spot dt` over the whole grid (left-point
    /// rule). This is the estimand used for Studentization: in the
    /// constant-volatility design it equals `σ² (t1 - t0)`.
    pub fn integrated_spot(&self, asset: Asset) -> f64 {
        let spot = self.spot(asset);
        let h = self.grid.mesh();
        spot[..spot.len() - 1].iter().sum::<f64>() * h
    }

    pub fn integrated_spot_xy(&self) -> f64 {
        let h = self.grid.mesh();
        self.spot_xy[..self.spot_xy.len() - 1].iter().sum::<f64>() * h
    }

    /// Latent value at an arbitrary time: linear interpolation of the drift
    /// and martingale parts inside the containing fine step.
    pub fn value_at(&self, asset: Asset, t: f64) -> f64 {
        let (k, w) = self.grid.locate(t);
        let (a, m) = (self.drift_part(asset), self.martingale(asset));
        if w == 0.0 {
            return self.price(asset)[k];
        }
        lerp(a[k], a[k + 1], w) + lerp(m[k], m[k + 1], w)
    }

    /// Drift part at an arbitrary time (linear interpolation).
    pub fn drift_at(&self, asset: Asset, t: f64) -> f64 {
        let (k, w) = self.grid.locate(t);
        let a = self.drift_part(asset);
        if w == 0.0 {
            a[k]
        } else {
            lerp(a[k], a[k + 1], w)
        }
    }

    /// Endogenous-noise driver value given the latent price at that time.
    pub fn driver_at(&self, asset: Asset, t: f64, latent: f64) -> f64 {
        match &self.endo {
            EndoDrivers::Multiples { phi_x, phi_y } => match asset {
                Asset::X => phi_x * latent,
                Asset::Y => phi_y * latent,
            },
            EndoDrivers::Paths { ux, uy } => {
                let u = match asset {
                    Asset::X => ux,
                    Asset::Y => uy,
                };
                let (k, w) = self.grid.locate(t);
                if w == 0.0 {
                    u[k]
                } else {
                    lerp(u[k], u[k + 1], w)
                }
            }
        }
    }
}

fn lerp(a: f64, b: f64, w: f64) -> f64 {
    a + (b - a) * w
}

/// Two correlated standard Wiener paths on `grid`, both starting at 0.
pub fn simulate_wiener(grid: &TimeGrid, corr: f64, seed: RngSeed) -> Result<(Vec<f64>, Vec<f64>)> {
    check_corr(corr)?;
    let (dw1, dw2) = wiener_increments(grid, corr, seed);
    Ok((cumulate(&dw1), cumulate(&dw2)))
}

fn wiener_increments(grid: &TimeGrid, corr: f64, seed: RngSeed) -> (Vec<f64>, Vec<f64>) {
    let mut rng = seed.rng(Purpose::Wiener);
    let sd = grid.mesh().sqrt();
    let rho_c = (1.0 - corr * corr).max(0.0).sqrt();
    let mut dw1 = Vec::with_capacity(grid.n_fine);
    let mut dw2 = Vec::with_capacity(grid.n_fine);
    for _ in 0..grid.n_fine {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        dw1.push(sd * z1);
        dw2.push(sd * (corr * z1 + rho_c * z2));
    }
    (dw1, dw2)
}

fn cumulate(inc: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(inc.len() + 1);
    let mut acc = 0.0;
    out.push(acc);
    for d in inc {
        acc += d;
        out.push(acc);
    }
    out
}

/// Drift callable: `(t, [x, y]) -> [drift_x, drift_y]`.
pub type DriftFn<'a> = dyn Fn(f64, [f64; 2]) -> [f64; 2] + 'a;
/// Volatility callable: `(t, [x, y]) -> [vol_x, vol_y]`.
pub type VolFn<'a> = dyn Fn(f64, [f64; 2]) -> [f64; 2] + 'a;

/// Euler–Maruyama scheme for `dX = a(t,X)dt + s(t,X)dW` with correlated
/// drivers. `steps` limits how many Euler steps are taken (the remainder of
/// the arrays is filled by the caller).
#[allow(clippy::too_many_arguments)]
fn euler(
    grid: &TimeGrid,
    drift: &DriftFn<'_>,
    vol: &VolFn<'_>,
    corr: f64,
    dw1: &[f64],
    dw2: &[f64],
    steps: usize,
    endo: EndoDrivers,
) -> Result<LatentPath> {
    let n = grid.len();
    let h = grid.mesh();
    let mut p = LatentPath {
        grid: *grid,
        x: vec![0.0; n],
        y: vec![0.0; n],
        ax: vec![0.0; n],
        ay: vec![0.0; n],
        mx: vec![0.0; n],
        my: vec![0.0; n],
        qv_x: vec![0.0; n],
        qv_y: vec![0.0; n],
        qc_xy: vec![0.0; n],
        spot_x: vec![0.0; n],
        spot_y: vec![0.0; n],
        spot_xy: vec![0.0; n],
        endo,
    };
    for k in 0..steps {
        let t = grid.time(k);
        let state = [p.x[k], p.y[k]];
        let [bx, by] = drift(t, state);
        let [sx, sy] = vol(t, state);
        if !(bx.is_finite() && by.is_finite() && sx.is_finite() && sy.is_finite()) {
            return Err(Error::Simulation {
                step: k,
                what: format!("drift=({bx}, {by}) vol=({sx}, {sy}) at t={t}"),
            });
        }
        p.spot_x[k] = sx * sx;
        p.spot_y[k] = sy * sy;
        p.spot_xy[k] = corr * sx * sy;
        let dmx = sx * dw1[k];
        let dmy = sy * dw2[k];
        p.ax[k + 1] = p.ax[k] + bx * h;
        p.ay[k + 1] = p.ay[k] + by * h;
        p.mx[k + 1] = p.mx[k] + dmx;
        p.my[k + 1] = p.my[k] + dmy;
        p.qv_x[k + 1] = p.qv_x[k] + dmx * dmx;
        p.qv_y[k + 1] = p.qv_y[k] + dmy * dmy;
        p.qc_xy[k + 1] = p.qc_xy[k] + dmx * dmy;
        p.x[k + 1] = p.ax[k + 1] + p.mx[k + 1];
        p.y[k + 1] = p.ay[k + 1] + p.my[k + 1];
    }
    Ok(p)
}

/// General Itô diffusion by Euler–Maruyama.
pub fn simulate_ito(
    grid: &TimeGrid,
    drift: &DriftFn<'_>,
    vol: &VolFn<'_>,
    corr: f64,
    seed: RngSeed,
) -> Result<LatentPath> {
    check_corr(corr)?;
    let (dw1, dw2) = wiener_increments(grid, corr, seed);
    let mut p = euler(
        grid,
        drift,
        vol,
        corr,
        &dw1,
        &dw2,
        grid.n_fine,
        EndoDrivers::Multiples { phi_x: 0.0, phi_y: 0.0 },
    )?;
    let last = grid.n_fine;
    let t = grid.time(last);
    let [sx, sy] = vol(t, [p.x[last], p.y[last]]);
    p.spot_x[last] = sx * sx;
    p.spot_y[last] = sy * sy;
    p.spot_xy[last] = corr * sx * sy;
    Ok(p)
}

/// Brownian bridge `dX = (x1 - X)/(t1 - t) dt + σ dW` (and likewise for Y),
/// or plain scaled Brownian motion when `drift_kind` is `None`.
///
/// The drift is only evaluated up to the penultimate grid point. The last
/// step pins `X(t1) = x1` exactly, with the finite-variation part absorbing
/// the difference from the martingale increment.
pub fn simulate_bridge(grid: &TimeGrid, cfg: &ModelConfig, seed: RngSeed) -> Result<LatentPath> {
    cfg.validate()?;
    let (dw1, dw2) = wiener_increments(grid, cfg.corr, seed);
    let endo = EndoDrivers::Multiples {
        phi_x: cfg.endo_factor_x,
        phi_y: cfg.endo_factor_y,
    };
    let sigma = cfg.sigma;
    let vol = move |_t: f64, _s: [f64; 2]| [sigma, sigma];
    match cfg.drift_kind {
        DriftKind::None => {
            let zero = |_t: f64, _s: [f64; 2]| [0.0, 0.0];
            let mut p = euler(grid, &zero, &vol, cfg.corr, &dw1, &dw2, grid.n_fine, endo)?;
            fill_last_spot(&mut p, sigma, cfg.corr);
            Ok(p)
        }
        DriftKind::Bridge => {
            let (x1, y1, t1) = (cfg.x1, cfg.y1, grid.t1);
            let drift = bridge_drift(x1, y1, t1);
            let last = grid.n_fine;
            let mut p = euler(grid, &drift, &vol, cfg.corr, &dw1, &dw2, last - 1, endo)?;
            let k = last - 1;
            let (dmx, dmy) = (sigma * dw1[k], sigma * dw2[k]);
            p.spot_x[k] = sigma * sigma;
            p.spot_y[k] = sigma * sigma;
            p.spot_xy[k] = cfg.corr * sigma * sigma;
            p.mx[last] = p.mx[k] + dmx;
            p.my[last] = p.my[k] + dmy;
            p.qv_x[last] = p.qv_x[k] + dmx * dmx;
            p.qv_y[last] = p.qv_y[k] + dmy * dmy;
            p.qc_xy[last] = p.qc_xy[k] + dmx * dmy;
            p.ax[last] = x1 - p.mx[last];
            p.ay[last] = y1 - p.my[last];
            p.x[last] = x1;
            p.y[last] = y1;
            fill_last_spot(&mut p, sigma, cfg.corr);
            Ok(p)
        }
        DriftKind::Custom => Err(Error::Unsupported(
            "custom drift requires simulate_ito with a drift callable".into(),
        )),
    }
}

/// The bridge drift as a callable, usable with [`simulate_ito`].
pub fn bridge_drift(x1: f64, y1: f64, t1: f64) -> impl Fn(f64, [f64; 2]) -> [f64; 2] {
    move |t: f64, s: [f64; 2]| [(x1 - s[0]) / (t1 - t), (y1 - s[1]) / (t1 - t)]
}

fn fill_last_spot(p: &mut LatentPath, sigma: f64, corr: f64) {
    let last = p.len() - 1;
    p.spot_x[last] = sigma * sigma;
    p.spot_y[last] = sigma * sigma;
    p.spot_xy[last] = corr * sigma * sigma;
}
