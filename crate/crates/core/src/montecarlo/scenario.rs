use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{self, Normalization, PreAvgConfig, WeightFn};
use crate::inference::{self, EdgeRule, KernelConstants, SpotConfig};
use crate::noise::{observe, NoiseConfig, ObservationSeries};
use crate::paths::{simulate_bridge, LatentPath, ModelConfig, TimeGrid};
use crate::sampling::{gen_barrier_hitting, gen_equidistant, refresh, SamplingTimes};
use crate::{Asset, RngSeed};

use super::tables::{bias_rmse_table, quantile_coverage_table, BiasRow, QuantileRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// No microstructure noise.
    S1,
    /// I.i.d. Gaussian noise with variance `γσ²`.
    S2,
    /// Endogenous noise `δ√n ΔX`.
    S3,
    /// Both noise channels as configured.
    Custom,
}

impl std::str::FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s1" | "s1_no_noise" => Ok(Scenario::S1),
            "s2" | "s2_iid" => Ok(Scenario::S2),
            "s3" | "s3_endogenous" => Ok(Scenario::S3),
            "custom" => Ok(Scenario::Custom),
            _ => Err(Error::param("scenario", format!("unknown scenario `{s}` (s1, s2, s3, custom)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Sampling {
    Equidistant,
    /// Exits of the martingale part of `X` from `(−u√b_n, v√b_n)`.
    Hitting { u: f64, v: f64 },
}

impl Sampling {
    pub fn hitting_default() -> Self {
        Sampling::Hitting { u: 0.01, v: 0.04 }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Sampling::Equidistant => "equidistant",
            Sampling::Hitting { .. } => "hitting",
        }
    }
}

impl std::str::FromStr for Sampling {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equidistant" => Ok(Sampling::Equidistant),
            "hitting" => Ok(Sampling::hitting_default()),
            _ => Err(Error::param("sampling", format!("unknown sampling `{s}` (equidistant, hitting)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorTag {
    Phy,
    Rv,
    Msrv,
    Mrc,
}

impl EstimatorTag {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorTag::Phy => "phy",
            EstimatorTag::Rv => "rv",
            EstimatorTag::Msrv => "msrv",
            EstimatorTag::Mrc => "mrc",
        }
    }
}

impl std::str::FromStr for EstimatorTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phy" => Ok(EstimatorTag::Phy),
            "rv" => Ok(EstimatorTag::Rv),
            "msrv" => Ok(EstimatorTag::Msrv),
            "mrc" => Ok(EstimatorTag::Mrc),
            _ => Err(Error::param("estimator", format!("unknown estimator `{s}` (phy, rv, msrv, mrc)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub sampling: Sampling,
    pub reps: usize,
    /// Nominal frequency, `b_n = 1/n`.
    pub n: usize,
    /// Fine-grid steps per nominal duration.
    pub fine_per_duration: usize,
    pub model: ModelConfig,
    pub theta: f64,
    /// `h_n = N^{−h_exponent}`.
    pub h_exponent: f64,
    /// Noise variance as a fraction of `σ²` (scenario 2).
    pub gamma: f64,
    /// Endogenous-noise factor (scenario 3).
    pub delta: f64,
    pub estimators: Vec<EstimatorTag>,
    /// Studentize the PHY with the variance estimate floored termwise at 0.
    pub avar_floor: bool,
    pub normalization: Normalization,
    pub edge: EdgeRule,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::preset(Scenario::S1, Sampling::Equidistant)
    }
}

impl ScenarioConfig {
    pub fn preset(scenario: Scenario, sampling: Sampling) -> Self {
        Self {
            scenario,
            sampling,
            reps: 1000,
            n: 3600,
            fine_per_duration: 10,
            model: ModelConfig::default(),
            theta: 0.15,
            h_exponent: 0.2,
            gamma: 0.001,
            delta: -(0.001f64.sqrt()),
            estimators: vec![EstimatorTag::Phy, EstimatorTag::Rv, EstimatorTag::Msrv],
            avar_floor: false,
            normalization: Normalization::Discrete,
            edge: EdgeRule::Literal,
        }
    }

    pub fn b_n(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::param("reps", "need at least one replication"));
        }
        if self.n < 16 {
            return Err(Error::param("n", "nominal frequency must be at least 16"));
        }
        if self.fine_per_duration == 0 {
            return Err(Error::param("fine_per_duration", "must be positive"));
        }
        if !(self.theta > 0.0) {
            return Err(Error::param("theta", "must be positive"));
        }
        if self.estimators.is_empty() {
            return Err(Error::param("estimators", "select at least one estimator"));
        }
        self.model.validate()
    }

    fn noise_levels(&self) -> (f64, f64) {
        match self.scenario {
            Scenario::S1 => (0.0, 0.0),
            Scenario::S2 => (self.gamma, 0.0),
            Scenario::S3 => (0.0, self.delta),
            Scenario::Custom => (self.gamma, self.delta),
        }
    }

    /// Noise configuration and the model with its endogenous driver factor.
    pub fn noise_and_model(&self) -> (NoiseConfig, ModelConfig) {
        let (gamma, delta) = self.noise_levels();
        let v = gamma * self.model.sigma * self.model.sigma;
        let mut noise = NoiseConfig::iid(v, v, 0.0);
        let mut model = self.model.clone();
        if delta != 0.0 {
            noise.endo_scale_x = 1.0;
            noise.endo_scale_y = 1.0;
            model.endo_factor_x = delta;
            model.endo_factor_y = delta;
        }
        (noise, model)
    }
}

/// Simulated inputs of one replication.
#[derive(Debug, Clone)]
pub struct RepInputs {
    pub path: LatentPath,
    pub times: SamplingTimes,
    pub obs: ObservationSeries,
}

pub fn simulate_inputs(cfg: &ScenarioConfig, seed: RngSeed) -> Result<RepInputs> {
    let (noise, model) = cfg.noise_and_model();
    let grid = TimeGrid::new(0.0, 1.0, cfg.n * cfg.fine_per_duration)?;
    let path = simulate_bridge(&grid, &model, seed)?;
    let b_n = cfg.b_n();
    let times = match cfg.sampling {
        Sampling::Equidistant => gen_equidistant(1.0, b_n)?,
        Sampling::Hitting { u, v } => gen_barrier_hitting(&path, Asset::X, u, v, b_n, seed)?,
    }
    .truncated(1.0);
    let obs = observe(&path, &times, Asset::X, &noise, seed)?;
    Ok(RepInputs { path, times, obs })
}

/// One estimator outcome of one replication.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepRecord {
    pub rep: u64,
    pub estimator: EstimatorTag,
    pub value: f64,
    pub truth: f64,
    /// Estimated variance of `value − truth` on the data scale.
    pub avar: f64,
    pub s: f64,
    pub s_log: f64,
    pub s_inv: f64,
    pub n_returns: usize,
    pub k_n: usize,
    /// Reason code when a statistic is undefined or the replication failed.
    pub reason: String,
}

impl RepRecord {
    fn new(rep: u64, estimator: EstimatorTag, value: f64, truth: f64, n_returns: usize, k_n: usize) -> Self {
        Self {
            rep,
            estimator,
            value,
            truth,
            avar: f64::NAN,
            s: f64::NAN,
            s_log: f64::NAN,
            s_inv: f64::NAN,
            n_returns,
            k_n,
            reason: String::new(),
        }
    }

    fn failed(rep: u64, estimator: EstimatorTag, why: &str) -> Self {
        let mut r = Self::new(rep, estimator, f64::NAN, f64::NAN, 0, 0);
        r.reason = format!("failed: {why}");
        r
    }

    /// The statistic's value, or NaN with the reason code noted.
    fn defined(&mut self, v: std::result::Result<f64, inference::Undefined>) -> f64 {
        v.unwrap_or_else(|e| {
            self.note(e.code());
            f64::NAN
        })
    }

    fn note(&mut self, code: &str) {
        if !self.reason.is_empty() {
            self.reason.push(';');
        }
        self.reason.push_str(code);
    }
}

/// All estimator records of replication `rep`.
pub fn run_rep(cfg: &ScenarioConfig, master_seed: u64, rep: u64, constants: &KernelConstants) -> Result<Vec<RepRecord>> {
    let seed = RngSeed::replication(master_seed, rep);
    let RepInputs { path, times, obs } = simulate_inputs(cfg, seed)?;
    let truth = path.integrated_spot(Asset::X);
    let n_ret = obs.len() - 1;
    let pcfg = PreAvgConfig::from_returns(n_ret, cfg.theta, cfg.b_n())?.with_normalization(cfg.normalization);
    let k_n = pcfg.k_n;
    let mut out = Vec::with_capacity(cfg.estimators.len());
    for &tag in &cfg.estimators {
        let mut rec = RepRecord::new(rep, tag, f64::NAN, truth, n_ret, k_n);
        match tag {
            EstimatorTag::Phy | EstimatorTag::Mrc => {
                let rd = refresh(&times, &times, 1.0)?;
                if tag == EstimatorTag::Phy {
                    let est = estimators::phy_refresh(&obs, &obs, &rd, &pcfg)?;
                    let mut spot = SpotConfig::new((n_ret as f64).powf(-cfg.h_exponent))?;
                    spot.edge = cfg.edge;
                    let f = WeightFn::quartic_f();
                    let av = inference::avar_from_data(&obs, &obs, &rd, &pcfg, &spot, constants, &f)?;
                    rec.value = est.value;
                    rec.avar = if cfg.avar_floor { av.avar_floored } else { av.avar };
                    let a = rec.avar;
                    rec.s = rec.defined(inference::studentize(est.value, truth, a));
                    rec.s_log = rec.defined(inference::log_stat(est.value, truth, a));
                    rec.s_inv = rec.defined(inference::inv_stat(est.value, truth, a));
                } else {
                    rec.value = estimators::mrc(&obs, &obs, &rd, &pcfg)?.value;
                    rec.note("no_avar");
                }
            }
            EstimatorTag::Rv => {
                let (rv, rq) = (estimators::rv(&obs.values), estimators::rq(&obs.values));
                rec.value = rv;
                rec.avar = 2.0 / 3.0 * rq;
                rec.s = rec.defined(inference::studentize_rv(rv, rq, truth));
            }
            EstimatorTag::Msrv => {
                let t = inference::msrv_tuning(&obs.values, &times.durations())?;
                if t.fallback {
                    rec.note("msrv_pilot_fallback");
                }
                rec.value = estimators::msrv(&obs.values, t.m)?;
                rec.avar = t.avar_multi / (n_ret as f64).sqrt();
                let (v, a) = (rec.value, rec.avar);
                rec.s = rec.defined(inference::studentize(v, truth, a));
            }
        }
        out.push(rec);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct McReport {
    pub config: ScenarioConfig,
    pub master_seed: u64,
    pub per_rep: Vec<RepRecord>,
    pub n_failed: usize,
    pub bias_rmse: Vec<BiasRow>,
    pub quantiles: Vec<QuantileRow>,
}

impl McReport {
    pub fn records(&self, tag: EstimatorTag) -> impl Iterator<Item = &RepRecord> {
        self.per_rep.iter().filter(move |r| r.estimator == tag)
    }
}

/// Runs all replications. Results do not depend on `workers`.
pub fn run_scenario(cfg: &ScenarioConfig, master_seed: u64, workers: Option<usize>) -> Result<McReport> {
    cfg.validate()?;
    let constants = inference::kernel_constants(&WeightFn::min_xx(), &WeightFn::quartic_f())?;
    let job = || {
        (0..cfg.reps as u64)
            .into_par_iter()
            .map(|rep| match run_rep(cfg, master_seed, rep, &constants) {
                Ok(v) => (v, None),
                Err(e) => (
                    cfg.estimators
                        .iter()
                        .map(|&t| RepRecord::failed(rep, t, &e.to_string()))
                        .collect(),
                    Some(e.to_string()),
                ),
            })
            .collect::<Vec<_>>()
    };
    let results = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
            .install(job),
        None => job(),
    };
    let mut per_rep = Vec::with_capacity(cfg.reps * cfg.estimators.len());
    let mut failures = Vec::new();
    for (recs, err) in results {
        per_rep.extend(recs);
        failures.extend(err);
    }
    if failures.len() * 100 > cfg.reps {
        return Err(Error::TooManyFailures {
            failed: failures.len(),
            total: cfg.reps,
            reason: failures[0].clone(),
        });
    }
    let bias_rmse = bias_rmse_table(&per_rep);
    let quantiles = quantile_coverage_table(&per_rep);
    Ok(McReport {
        config: cfg.clone(),
        master_seed,
        per_rep,
        n_failed: failures.len(),
        bias_rmse,
        quantiles,
    })
}
