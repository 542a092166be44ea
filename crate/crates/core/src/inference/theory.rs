//! Integrated asymptotic variances `∫ w²_s ds` of the PHY and the MRC for
//! given spot processes and sampling-scheme limits.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, TOL};
use crate::sampling::PoissonConfig;

use super::KernelConstants;

pub type Curve = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub fn constant(c: f64) -> Curve {
    Arc::new(move |_| c)
}

/// Spot (co)volatilities of the latent prices, noise covariances and the
/// endogenous-noise drivers `X̲`, `Y̲`.
#[derive(Clone)]
pub struct SpotModel {
    pub x: Curve,
    pub y: Curve,
    pub xy: Curve,
    pub psi11: Curve,
    pub psi22: Curve,
    pub psi12: Curve,
    /// `[X̲]'`, `[Y̲]'`, `[X̲,Y̲]'`.
    pub ux: Curve,
    pub uy: Curve,
    pub ux_uy: Curve,
    /// `[X̲,Y]'` and `[X,Y̲]'`.
    pub ux_y: Curve,
    pub x_uy: Curve,
}

impl SpotModel {
    /// Constant volatility `σ²` observed once (so `X = Y`), with noise
    /// variance `psi` and driver `X̲ = φX`.
    pub fn univariate(sigma2: f64, psi: f64, phi: f64) -> Self {
        let u = phi * phi * sigma2;
        let c = phi * sigma2;
        Self {
            x: constant(sigma2),
            y: constant(sigma2),
            xy: constant(sigma2),
            psi11: constant(psi),
            psi22: constant(psi),
            psi12: constant(psi),
            ux: constant(u),
            uy: constant(u),
            ux_uy: constant(u),
            ux_y: constant(c),
            x_uy: constant(c),
        }
    }

    /// Zeroes every endogenous-driver spot.
    pub fn without_endogenous_noise(mut self) -> Self {
        for c in [&mut self.ux, &mut self.uy, &mut self.ux_uy, &mut self.ux_y, &mut self.x_uy] {
            *c = constant(0.0);
        }
        self
    }
}

/// Limits `G`, `χ`, `F¹`, `F²`, `F^{1*2}` of the conditional duration moments.
#[derive(Clone)]
pub struct SchemeLimits {
    pub g: Curve,
    pub chi: Curve,
    pub f1: Curve,
    pub f2: Curve,
    pub f12: Curve,
}

impl SchemeLimits {
    pub fn constants(g: f64, chi: f64, f1: f64, f2: f64, f12: f64) -> Self {
        Self {
            g: constant(g),
            chi: constant(chi),
            f1: constant(f1),
            f2: constant(f2),
            f12: constant(f12),
        }
    }

    /// A single synchronous design: every limit equals `G` and `χ = 1`.
    pub fn synchronous(g: f64) -> Self {
        Self::constants(g, 1.0, g, g, g)
    }

    /// Barrier hitting of a martingale with constant spot variance
    /// `sigma2`: `G = uv/σ²`.
    pub fn hitting(u: f64, v: f64, sigma2: f64) -> Self {
        Self::synchronous(u * v / sigma2)
    }

    /// Bernoulli thinning with non-trading probabilities `p1`, `p2` of base
    /// epochs whose mean duration is `psi·b_n` (`psi = 1` for equidistant
    /// base epochs, `c/μ` for mixed hitting).
    pub fn lo_mackinlay(p1: f64, p2: f64, psi: f64) -> Self {
        let (q1, q2) = (1.0 - p1, 1.0 - p2);
        Self::constants(
            (1.0 / q1 + 1.0 / q2 - 1.0 / (1.0 - p1 * p2)) * psi,
            q1 * q2,
            psi / q1,
            psi / q2,
            (2.0 - q1 * q2) / (1.0 - p1 * p2) * psi,
        )
    }

    /// Two independent Poisson designs with rates switching at `τ¹`, `τ²`.
    pub fn poisson_changepoint(cfg: &PoissonConfig) -> Self {
        let c = cfg.clone();
        let rates = move |s: f64| -> (f64, f64) {
            let a = if s < c.tau[0] { c.p_under[0] } else { c.p_over[0] };
            let b = if s < c.tau[1] { c.p_under[1] } else { c.p_over[1] };
            (a, b)
        };
        let r = Arc::new(rates);
        let (r1, r2, r3, r4) = (r.clone(), r.clone(), r.clone(), r);
        Self {
            g: Arc::new(move |s| {
                let (a, b) = r1(s);
                1.0 / a + 1.0 / b - 1.0 / (a + b)
            }),
            chi: constant(0.0),
            f1: Arc::new(move |s| 1.0 / r2(s).0),
            f2: Arc::new(move |s| 1.0 / r3(s).1),
            f12: Arc::new(move |s| {
                let (a, b) = r4(s);
                2.0 / (a + b)
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "flavor")]
pub enum W2Flavor {
    /// PHY without endogenous noise.
    PhyExogenous,
    /// PHY with endogenous noise.
    PhyEndogenous,
    Mrc,
    /// PHY with linear-process noise on a synchronous design; `lambda0` and
    /// `mu0` are the sums of the weight sequences of each asset.
    DepNoise { lambda0: [f64; 2], mu0: [f64; 2] },
}

/// `w²_s` at one time point.
pub fn w2_at(m: &SpotModel, sc: &SchemeLimits, c: &KernelConstants, theta: f64, flavor: W2Flavor, s: f64) -> Result<f64> {
    let g = (sc.g)(s);
    if !(g > 0.0) {
        return Err(Error::param("G", format!("duration limit must be positive, got {g} at s = {s}")));
    }
    let (x, y, xy) = ((m.x)(s), (m.y)(s), (m.xy)(s));
    let (p11, p22, p12) = ((m.psi11)(s), (m.psi22)(s), (m.psi12)(s));
    let chi = (sc.chi)(s);
    let endo_bar = || {
        let d = (m.ux_y)(s) * (sc.f1)(s) - (m.x_uy)(s) * (sc.f2)(s);
        (
            p11 + (m.ux)(s) * (sc.f1)(s),
            p22 + (m.uy)(s) * (sc.f2)(s),
            p12 * chi + (m.ux_uy)(s) * (sc.f12)(s),
            d * d / g,
        )
    };
    let phy = |q11: f64, q22: f64, q12: f64, last: f64| {
        c.psi_hy.powi(-4)
            * (theta * c.kappa * (x * y + xy * xy) * g
                + theta.powi(-3) * c.kappa_tilde * (q11 * q22 + q12 * q12) / g
                + theta.recip() * c.kappa_bar * (x * q22 + y * q11 + 2.0 * xy * q12 - last))
    };
    Ok(match flavor {
        W2Flavor::PhyExogenous => phy(p11, p22, p12 * chi, 0.0),
        W2Flavor::PhyEndogenous => {
            let (a, b, d, e) = endo_bar();
            phy(a, b, d, e)
        }
        W2Flavor::Mrc => {
            let (a, b, d, e) = endo_bar();
            2.0 * c.psi2.powi(-2)
                * (theta * c.phi22 * (x * y + xy * xy) * g
                    + theta.powi(-3) * c.phi11 * (a * b + d * d) / g
                    + theta.recip() * c.phi12 * (x * b + y * a + 2.0 * xy * d - e))
        }
        W2Flavor::DepNoise { lambda0: l, mu0: u } => {
            let a = l[0] * l[0] * p11 + u[0] * u[0] * (m.ux)(s) * g;
            let b = l[1] * l[1] * p22 + u[1] * u[1] * (m.uy)(s) * g;
            let d = l[0] * l[1] * p12 + u[0] * u[1] * (m.ux_uy)(s) * g;
            let e = u[0] * (m.ux_y)(s) - u[1] * (m.x_uy)(s);
            phy(a, b, d, e * e * g)
        }
    })
}

/// `∫_0^horizon w²_s ds`.
pub fn theoretical_w2(
    m: &SpotModel,
    sc: &SchemeLimits,
    c: &KernelConstants,
    theta: f64,
    flavor: W2Flavor,
    horizon: f64,
) -> Result<f64> {
    // Validate on a grid first so that quadrature only sees admissible input.
    for i in 0..=64 {
        w2_at(m, sc, c, theta, flavor, horizon * i as f64 / 64.0)?;
    }
    integrate(
        |s| w2_at(m, sc, c, theta, flavor, s).unwrap_or(f64::NAN),
        0.0,
        horizon,
        &[],
        TOL,
    )
}
