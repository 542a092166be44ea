use crate::error::Result;
use crate::estimators::WeightFn;
use crate::quadrature::{integrate, TOL};

/// Points in `[0, 1]` where a weight or its support changes regime.
fn nodes(w: &WeightFn) -> Vec<f64> {
    let mut v = vec![0.0, 1.0];
    v.extend_from_slice(w.kinks());
    v
}

fn psi_ab_tol(alpha: &WeightFn, beta: &WeightFn, x: f64, tol: f64) -> Result<f64> {
    if x.abs() >= 2.0 {
        return Ok(0.0);
    }
    // The inner integral over v is done in closed form through the
    // antiderivative of β, so only the u-integral is numerical.
    let mut breaks = alpha.kinks().to_vec();
    for c in nodes(beta) {
        breaks.push(c - x - 1.0);
        breaks.push(c - x + 1.0);
    }
    integrate(
        |u| alpha.eval(u) * (beta.antiderivative(x + u + 1.0) - beta.antiderivative(x + u - 1.0)),
        0.0,
        1.0,
        &breaks,
        tol,
    )
}

/// `ψ_{α,β}(x) = ∫_0^1 ∫_{x+u−1}^{x+u+1} α(u) β(v) dv du`.
pub fn psi_ab(alpha: &WeightFn, beta: &WeightFn, x: f64) -> f64 {
    psi_ab_tol(alpha, beta, x, TOL).unwrap_or(f64::NAN)
}

/// `φ_{α,β}(s) = ∫_s^1 α(u − s) β(u) du`.
pub fn phi_ab(alpha: &WeightFn, beta: &WeightFn, s: f64) -> f64 {
    phi_ab_tol(alpha, beta, s, TOL).unwrap_or(f64::NAN)
}

fn phi_ab_tol(alpha: &WeightFn, beta: &WeightFn, s: f64, tol: f64) -> Result<f64> {
    if s >= 1.0 {
        return Ok(0.0);
    }
    let mut breaks: Vec<f64> = alpha.kinks().iter().map(|k| k + s).collect();
    breaks.extend_from_slice(beta.kinks());
    integrate(|u| alpha.eval(u - s) * beta.eval(u), s.max(0.0), 1.0, &breaks, tol)
}

/// `∫_{-2}^{2} ψ_{α,β}(x)² dx`, split where the inner integrand changes
/// its piecewise-polynomial form.
fn kappa_ab(alpha: &WeightFn, beta: &WeightFn, tol: f64) -> Result<f64> {
    let mut breaks = Vec::new();
    for a in nodes(alpha) {
        for c in nodes(beta) {
            breaks.push(c - a - 1.0);
            breaks.push(c - a + 1.0);
        }
    }
    let v = integrate(
        |x| psi_ab_tol(alpha, beta, x, tol * 1e-2).map_or(f64::NAN, |p| p * p),
        -2.0,
        2.0,
        &breaks,
        tol,
    )?;
    finite(v, -2.0, 2.0)
}

fn finite(v: f64, a: f64, b: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(crate::Error::Quadrature { a, b, achieved: f64::INFINITY })
    }
}

fn big_phi(a1: &WeightFn, b1: &WeightFn, a2: &WeightFn, b2: &WeightFn, tol: f64) -> Result<f64> {
    let mut breaks: Vec<f64> = Vec::new();
    for w in [a1, b1, a2, b2] {
        for k in w.kinks() {
            breaks.push(*k);
            breaks.push(1.0 - k);
        }
    }
    integrate(
        |s| phi_ab_tol(a1, b1, s, tol * 1e-2).unwrap_or(f64::NAN) * phi_ab_tol(a2, b2, s, tol * 1e-2).unwrap_or(f64::NAN),
        0.0,
        1.0,
        &breaks,
        tol,
    )
    .and_then(|v| finite(v, 0.0, 1.0))
}

/// Limit constants of the weight `g` (and `f` for the Ξ[f] statistic).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct KernelConstants {
    pub psi_hy: f64,
    pub psi1: f64,
    pub psi2: f64,
    pub kappa: f64,
    pub kappa_tilde: f64,
    pub kappa_bar: f64,
    pub phi11: f64,
    pub phi22: f64,
    pub phi12: f64,
    pub norm_fprime_sq: f64,
    pub tolerance: f64,
}

impl KernelConstants {
    pub fn named(&self) -> [(&'static str, f64); 10] {
        [
            ("psi_hy", self.psi_hy),
            ("psi1", self.psi1),
            ("psi2", self.psi2),
            ("kappa", self.kappa),
            ("kappa_tilde", self.kappa_tilde),
            ("kappa_bar", self.kappa_bar),
            ("phi11", self.phi11),
            ("phi22", self.phi22),
            ("phi12", self.phi12),
            ("norm_fprime_sq", self.norm_fprime_sq),
        ]
    }
}

pub fn kernel_constants(g: &WeightFn, f: &WeightFn) -> Result<KernelConstants> {
    kernel_constants_tol(g, f, TOL)
}

pub fn kernel_constants_tol(g: &WeightFn, f: &WeightFn, tol: f64) -> Result<KernelConstants> {
    let dg = g.derivative()?;
    let df = f.derivative()?;
    let single = |h: &dyn Fn(f64) -> f64, kinks: &[f64]| integrate(h, 0.0, 1.0, kinks, tol);
    Ok(KernelConstants {
        psi_hy: single(&|x| g.eval(x), g.kinks())?,
        psi1: single(&|x| dg.eval(x).powi(2), g.kinks())?,
        psi2: single(&|x| g.eval(x).powi(2), g.kinks())?,
        kappa: kappa_ab(g, g, tol)?,
        kappa_tilde: kappa_ab(&dg, &dg, tol)?,
        kappa_bar: kappa_ab(g, &dg, tol)?,
        phi11: big_phi(&dg, &dg, &dg, &dg, tol)?,
        phi22: big_phi(g, g, g, g, tol)?,
        phi12: big_phi(g, g, &dg, &dg, tol)?,
        norm_fprime_sq: single(&|x| df.eval(x).powi(2), f.kinks())?,
        tolerance: tol,
    })
}
