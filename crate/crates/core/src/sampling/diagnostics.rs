//! Empirical proxies for the duration limits `G(ρ)`, `F^l`, `χ`.
//!
//! The conditional moments behind these limits are not observable; local
//! averages over a trailing window of refresh durations stand in for them.
//! They serve diagnostics only and never enter an estimator.

use super::RefreshData;

/// Rolling proxies on the refresh times `R^1, ..., R^K`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSeries {
    pub r: Vec<f64>,
    pub window: usize,
    pub rho: Vec<f64>,
    /// `g[m][k]`: rolling mean of `(|Γ|/b_n)^{rho[m]}`.
    pub g: Vec<Vec<f64>>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    pub f12: Vec<f64>,
    pub chi: Vec<f64>,
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl Moment {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                se: f64::NAN,
                n,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            f64::NAN
        };
        Self {
            mean,
            se: (var / n as f64).sqrt(),
            n,
        }
    }

    /// `|mean − target| ≤ z · se`.
    pub fn within(&self, target: f64, z: f64) -> bool {
        (self.mean - target).abs() <= z * self.se
    }
}

/// Whole-sample averages of the scaled duration quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DurationSummary {
    pub g1: Moment,
    pub g2: Moment,
    pub f1: Moment,
    pub f2: Moment,
    pub f12: Moment,
    pub chi: Moment,
}

impl DurationSummary {
    pub fn from_refresh(rd: &RefreshData) -> Self {
        Self::from_many(std::slice::from_ref(rd))
    }

    /// Pools the durations of several independent designs.
    pub fn from_many(rds: &[RefreshData]) -> Self {
        let mut g1 = Vec::new();
        let mut g2 = Vec::new();
        let mut f1 = Vec::new();
        let mut f2 = Vec::new();
        let mut f12 = Vec::new();
        let mut chi = Vec::new();
        for rd in rds {
            let b = rd.b_n;
            for k in 1..rd.len() {
                let x = rd.gamma[k] / b;
                g1.push(x);
                g2.push(x * x);
                f1.push(rd.i_check[k] / b);
                f2.push(rd.j_check[k] / b);
                chi.push(if rd.coincide(k) { 1.0 } else { 0.0 });
                // The star interval of the last index lacks its successor.
                if k + 1 < rd.len() {
                    f12.push(rd.star[k] / b);
                }
            }
        }
        Self {
            g1: Moment::of(&g1),
            g2: Moment::of(&g2),
            f1: Moment::of(&f1),
            f2: Moment::of(&f2),
            f12: Moment::of(&f12),
            chi: Moment::of(&chi),
        }
    }

    /// Scale-free kurtosis proxy `G(2)/G(1)²`.
    pub fn g_ratio(&self) -> f64 {
        self.g2.mean / (self.g1.mean * self.g1.mean)
    }
}

/// Trailing-window proxies with window `⌈K^{0.4}⌉`. Entries whose window is
/// empty (only possible for an empty design) are NaN.
pub fn duration_diagnostics(rd: &RefreshData, rho: &[f64]) -> DiagnosticSeries {
    let k_max = rd.len().saturating_sub(1);
    let window = ((k_max as f64).powf(0.4).ceil() as usize).max(1);
    let b = rd.b_n;
    let rolling = |f: &dyn Fn(usize) -> f64| -> Vec<f64> {
        let vals: Vec<f64> = (1..=k_max).map(f).collect();
        let mut out = Vec::with_capacity(vals.len());
        let mut acc = 0.0;
        for (m, v) in vals.iter().enumerate() {
            acc += v;
            if m >= window {
                acc -= vals[m - window];
            }
            let len = (m + 1).min(window);
            out.push(if len == 0 { f64::NAN } else { acc / len as f64 });
        }
        out
    };
    DiagnosticSeries {
        r: rd.r[1..].to_vec(),
        window,
        rho: rho.to_vec(),
        g: rho
            .iter()
            .map(|&p| rolling(&|k| (rd.gamma[k] / b).powf(p)))
            .collect(),
        f1: rolling(&|k| rd.i_check[k] / b),
        f2: rolling(&|k| rd.j_check[k] / b),
        f12: rolling(&|k| rd.star[k] / b),
        chi: rolling(&|k| if rd.coincide(k) { 1.0 } else { 0.0 }),
    }
}
