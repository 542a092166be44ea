//! Weight functions for pre-averaging.

use std::sync::Arc;

use crate::error::{Error, Result};

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightTag {
    /// `g(x) = x ∧ (1 − x)`.
    MinXx,
    /// `f(x) = x²(1 − x)²`.
    QuarticF,
    /// Derivative of one of the above.
    Derived,
    Custom,
}

/// A function on `[0, 1]`, extended by zero outside.
#[derive(Clone)]
pub struct WeightFn {
    pub tag: WeightTag,
    f: Scalar,
    df: Option<Scalar>,
    /// `x ↦ ∫_0^{clamp(x, 0, 1)} f`, when known in closed form.
    anti: Option<Scalar>,
    kinks: Vec<f64>,
}

impl std::fmt::Debug for WeightFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeightFn")
            .field("tag", &self.tag)
            .field("kinks", &self.kinks)
            .finish()
    }
}

impl WeightFn {
    pub fn min_xx() -> Self {
        Self {
            tag: WeightTag::MinXx,
            f: Arc::new(|x: f64| x.min(1.0 - x)),
            df: Some(Arc::new(|x: f64| if x < 0.5 { 1.0 } else { -1.0 })),
            anti: Some(Arc::new(|x: f64| {
                if x < 0.5 {
                    0.5 * x * x
                } else {
                    x - 0.5 * x * x - 0.25
                }
            })),
            kinks: vec![0.5],
        }
    }

    pub fn quartic_f() -> Self {
        Self {
            tag: WeightTag::QuarticF,
            f: Arc::new(|x: f64| x * x * (1.0 - x) * (1.0 - x)),
            df: Some(Arc::new(|x: f64| 2.0 * x * (1.0 - x) * (1.0 - 2.0 * x))),
            anti: Some(Arc::new(|x: f64| {
                x * x * x / 3.0 - x * x * x * x / 2.0 + x * x * x * x * x / 5.0
            })),
            kinks: Vec::new(),
        }
    }

    /// A user weight with its a.e. derivative and the points where either is
    /// not smooth.
    pub fn custom<F, D>(f: F, df: D, kinks: Vec<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            tag: WeightTag::Custom,
            f: Arc::new(f),
            df: Some(Arc::new(df)),
            anti: None,
            kinks,
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "min_xx" => Ok(Self::min_xx()),
            "quartic_f" => Ok(Self::quartic_f()),
            other => Err(Error::param(
                "weight",
                format!("unknown weight `{other}` (expected min_xx or quartic_f)"),
            )),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if (0.0..=1.0).contains(&x) {
            (self.f)(x)
        } else {
            0.0
        }
    }

    /// The derivative as a weight in its own right. Its antiderivative is
    /// the original function.
    pub fn derivative(&self) -> Result<Self> {
        let df = self
            .df
            .clone()
            .ok_or_else(|| Error::Unsupported("derivative of a derived weight".into()))?;
        let f = self.f.clone();
        Ok(Self {
            tag: WeightTag::Derived,
            f: df,
            df: None,
            anti: Some(Arc::new(move |x: f64| f(x.clamp(0.0, 1.0)) - f(0.0))),
            kinks: self.kinks.clone(),
        })
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    /// `∫_0^{clamp(x,0,1)} f`, by closed form or quadrature.
    pub fn antiderivative(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match &self.anti {
            Some(a) => a(x),
            None => crate::quadrature::integrate(|u| self.eval(u), 0.0, x, &self.kinks, 1e-13)
                .unwrap_or(f64::NAN),
        }
    }

    /// Weights `w(p/k)` for `p = 1, ..., k − 1`.
    pub fn grid(&self, k: usize) -> Vec<f64> {
        (1..k).map(|p| self.eval(p as f64 / k as f64)).collect()
    }

    /// `f(0) = f(1) = f'(0) = f'(1) = 0`, required by the Ξ[f] statistic.
    pub fn has_flat_ends(&self) -> bool {
        let Some(df) = &self.df else { return false };
        let tiny = 1e-12;
        self.eval(0.0).abs() < tiny
            && self.eval(1.0).abs() < tiny
            && df(0.0).abs() < tiny
            && df(1.0).abs() < tiny
    }
}
