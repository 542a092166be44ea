use std::path::{Path, PathBuf};

use endophy::estimators::{self, PreAvgConfig, WeightFn};
use endophy::inference::{self, SchemeLimits, SpotConfig};
use endophy::io;
use endophy::montecarlo::{self, simulate_inputs, ScenarioConfig};
use endophy::noise::ObservationSeries;
use endophy::paths::{simulate_bridge, ModelConfig, TimeGrid};
use endophy::sampling::{
    gen_barrier_hitting, gen_equidistant, gen_lo_mackinlay, gen_poisson_changepoint, refresh, DurationSummary,
    LoMacKinlayConfig, Moment, PoissonConfig, RefreshData, SamplingTimes,
};
use endophy::{Asset, RngSeed};
use serde::Serialize;

use crate::args::{Common, ConstantsArgs, DataArgs, DiagArgs, Scheme};
use crate::Failure;

/// What a verb produced, for the run metadata.
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub config: Option<ScenarioConfig>,
}

fn rt(e: endophy::Error) -> Failure {
    Failure::Runtime(e.to_string())
}

fn single_seed(seed: u64) -> RngSeed {
    RngSeed::replication(seed, 0)
}

pub fn simulate(c: &Common, cfg: ScenarioConfig, out: &Path) -> Result<Outcome, Failure> {
    let (_, model) = cfg.noise_and_model();
    let grid = TimeGrid::new(0.0, 1.0, cfg.n * cfg.fine_per_duration).map_err(rt)?;
    let path = simulate_bridge(&grid, &model, single_seed(c.seed)).map_err(rt)?;
    let f = out.join("path.csv");
    io::write_path(&f, &path).map_err(rt)?;
    Ok(Outcome { files: vec![f], config: Some(cfg) })
}

pub fn sample(c: &Common, cfg: ScenarioConfig, out: &Path) -> Result<Outcome, Failure> {
    let inp = simulate_inputs(&cfg, single_seed(c.seed)).map_err(rt)?;
    let rd = refresh(&inp.times, &inp.times, 1.0).map_err(rt)?;
    let files = vec![out.join("path.csv"), out.join("sampling.csv"), out.join("refresh.csv")];
    io::write_path(&files[0], &inp.path).map_err(rt)?;
    io::write_sampling(&files[1], &inp.times).map_err(rt)?;
    io::write_refresh(&files[2], &rd).map_err(rt)?;
    Ok(Outcome { files, config: Some(cfg) })
}

pub fn observe(c: &Common, cfg: ScenarioConfig, out: &Path) -> Result<Outcome, Failure> {
    let inp = simulate_inputs(&cfg, single_seed(c.seed)).map_err(rt)?;
    let files = vec![out.join("sampling.csv"), out.join("observations.csv")];
    io::write_sampling(&files[0], &inp.times).map_err(rt)?;
    io::write_observations(&files[1], &inp.obs).map_err(rt)?;
    Ok(Outcome { files, config: Some(cfg) })
}

struct Data {
    xo: ObservationSeries,
    yo: ObservationSeries,
    rd: RefreshData,
    durations: Vec<f64>,
}

fn load(a: &DataArgs, cfg: &ScenarioConfig) -> Result<Data, Failure> {
    let b_n = cfg.b_n();
    let (xo, yo) = match (&a.input, &a.input_y) {
        (None, None) => {
            let inp = simulate_inputs(cfg, single_seed(a.common.seed)).map_err(rt)?;
            (inp.obs.clone(), inp.obs)
        }
        (Some(x), y) => {
            let xo = io::read_observations(x, b_n).map_err(rt)?;
            let yo = match y {
                Some(y) => io::read_observations(y, b_n).map_err(rt)?,
                None => xo.clone(),
            };
            (xo, yo)
        }
        (None, Some(_)) => return Err(Failure::Usage("--input-y requires --input".into())),
    };
    let s = SamplingTimes::new(xo.times.clone(), b_n, "input").map_err(rt)?;
    let t = SamplingTimes::new(yo.times.clone(), b_n, "input").map_err(rt)?;
    let horizon = s.times.last().copied().unwrap_or(0.0).min(t.times.last().copied().unwrap_or(0.0));
    let rd = refresh(&s, &t, horizon).map_err(rt)?;
    Ok(Data {
        durations: s.durations(),
        xo,
        yo,
        rd,
    })
}

#[derive(Serialize)]
struct EstimateRow {
    estimator: &'static str,
    value: f64,
    k_n: Option<usize>,
    m: Option<usize>,
}

pub fn estimate(a: &DataArgs, cfg: ScenarioConfig, out: &Path) -> Result<Outcome, Failure> {
    let d = load(a, &cfg)?;
    let n_ret = d.rd.len() - 1;
    let pcfg = PreAvgConfig::from_returns(n_ret, cfg.theta, cfg.b_n())
        .map_err(rt)?
        .with_normalization(cfg.normalization);
    let phy = estimators::phy_refresh(&d.xo, &d.yo, &d.rd, &pcfg).map_err(rt)?;
    let mrc = estimators::mrc(&d.xo, &d.yo, &d.rd, &pcfg).map_err(rt)?;
    let mut rows = vec![
        EstimateRow { estimator: "phy", value: phy.value, k_n: Some(pcfg.k_n), m: None },
        EstimateRow { estimator: "mrc", value: mrc.value, k_n: Some(pcfg.k_n), m: None },
    ];
    // The realized measures are univariate: they refer to the first asset.
    rows.push(EstimateRow { estimator: "rv", value: estimators::rv(&d.xo.values), k_n: None, m: None });
    rows.push(EstimateRow { estimator: "rq", value: estimators::rq(&d.xo.values), k_n: None, m: None });
    let tuning = inference::msrv_tuning(&d.xo.values, &d.durations).map_err(rt)?;
    rows.push(EstimateRow {
        estimator: "msrv",
        value: estimators::msrv(&d.xo.values, tuning.m).map_err(rt)?,
        k_n: None,
        m: Some(tuning.m),
    });
    let files = vec![out.join("estimates.csv"), out.join("phy_process.csv")];
    io::write_rows(&files[0], rows).map_err(rt)?;
    io::write_step_series(&files[1], phy.path.as_ref().expect("refresh PHY carries its process")).map_err(rt)?;
    Ok(Outcome { files, config: Some(cfg) })
}

#[derive(Serialize)]
struct AvarRow {
    phy: f64,
    avar: f64,
    avar_floored: f64,
    n_negative: usize,
    n_skipped: usize,
    k_n: usize,
    h_n: f64,
}

pub fn avar(a: &DataArgs, cfg: ScenarioConfig, out: &Path) -> Result<Outcome, Failure> {
    let d = load(a, &cfg)?;
    let n_ret = d.rd.len() - 1;
    let pcfg = PreAvgConfig::from_returns(n_ret, cfg.theta, cfg.b_n())
        .map_err(rt)?
        .with_normalization(cfg.normalization);
    let mut spot = SpotConfig::new((n_ret as f64).powf(-cfg.h_exponent)).map_err(rt)?;
    spot.edge = cfg.edge;
    let f = WeightFn::quartic_f();
    let consts = inference::kernel_constants(&pcfg.weight, &f).map_err(rt)?;
    let phy = estimators::phy_refresh(&d.xo, &d.yo, &d.rd, &pcfg).map_err(rt)?;
    let av = inference::avar_from_data(&d.xo, &d.yo, &d.rd, &pcfg, &spot, &consts, &f).map_err(rt)?;
    let files = vec![out.join("avar.csv"), out.join("avar_path.csv"), out.join("spot_records.csv")];
    io::write_rows(
        &files[0],
        [AvarRow {
            phy: phy.value,
            avar: av.avar,
            avar_floored: av.avar_floored,
            n_negative: av.n_negative,
            n_skipped: av.n_skipped,
            k_n: pcfg.k_n,
            h_n: spot.h_n,
        }],
    )
    .map_err(rt)?;
    io::write_step_series(&files[1], &av.path).map_err(rt)?;
    io::write_spot_records(&files[2], &av.spot_records).map_err(rt)?;
    Ok(Outcome { files, config: Some(cfg) })
}

pub fn mc(c: &Common, cfg: ScenarioConfig, out: &Path) -> Result<Outcome, Failure> {
    let report = montecarlo::run_scenario(&cfg, c.seed, c.workers).map_err(rt)?;
    let files = montecarlo::write_report(&report, out).map_err(rt)?;
    Ok(Outcome { files, config: Some(cfg) })
}

pub fn constants(a: &ConstantsArgs, out: &Path) -> Result<Outcome, Failure> {
    let g = WeightFn::from_tag(&a.weight).map_err(|e| Failure::Usage(e.to_string()))?;
    let f = WeightFn::from_tag(&a.aux).map_err(|e| Failure::Usage(e.to_string()))?;
    let c = match a.tol {
        Some(tol) => inference::kernel_constants_tol(&g, &f, tol),
        None => inference::kernel_constants(&g, &f),
    }
    .map_err(rt)?;
    let file = out.join("constants.csv");
    io::write_constants(&file, &c).map_err(rt)?;
    Ok(Outcome { files: vec![file], config: None })
}

#[derive(Serialize)]
struct DiagRow {
    quantity: &'static str,
    mean: f64,
    se: f64,
    n: usize,
    closed_form: f64,
}

/// Pools refresh designs on `[0, 1]` until `a.durations` durations are
/// collected.
pub fn diag(a: &DiagArgs, out: &Path) -> Result<Outcome, Failure> {
    if !(a.bn > 0.0 && a.bn < 1.0) {
        return Err(Failure::Usage("--bn must lie in (0, 1)".into()));
    }
    let model = ModelConfig { sigma: a.sigma, x1: 0.0, y1: 0.0, ..ModelConfig::default() };
    let n_fine = ((10.0 / a.bn).ceil() as usize).max(10);
    let grid = TimeGrid::new(0.0, 1.0, n_fine).map_err(rt)?;
    let mut designs = Vec::new();
    let mut pooled = 0;
    let mut rep = 0;
    while pooled < a.durations {
        let seed = RngSeed::replication(a.seed, rep);
        rep += 1;
        let (s, t) = match a.scheme {
            Scheme::Equidistant => {
                let s = gen_equidistant(1.0, a.bn).map_err(rt)?;
                (s.clone(), s)
            }
            Scheme::Hitting => {
                let p = simulate_bridge(&grid, &model, seed).map_err(rt)?;
                let s = gen_barrier_hitting(&p, Asset::X, a.u, a.v, a.bn, seed).map_err(rt)?.truncated(1.0);
                (s.clone(), s)
            }
            Scheme::LoMackinlay => {
                let cfg = LoMacKinlayConfig { p: [a.p1, a.p2], b_n: a.bn, mixed: None };
                gen_lo_mackinlay(&cfg, 1.0, seed).map_err(rt)?
            }
            Scheme::Poisson => {
                let cfg = poisson(a);
                gen_poisson_changepoint(&cfg, 1.0, seed).map_err(rt)?
            }
        };
        let rd = refresh(&s, &t, 1.0).map_err(rt)?;
        pooled += rd.len().saturating_sub(1);
        designs.push(rd);
    }
    let sm = DurationSummary::from_many(&designs);
    let limits = match a.scheme {
        Scheme::Equidistant => SchemeLimits::synchronous(1.0),
        Scheme::Hitting => SchemeLimits::hitting(a.u, a.v, a.sigma * a.sigma),
        Scheme::LoMackinlay => SchemeLimits::lo_mackinlay(a.p1, a.p2, 1.0),
        Scheme::Poisson => SchemeLimits::poisson_changepoint(&poisson(a)),
    };
    let row = |quantity, m: Moment, closed_form| DiagRow {
        quantity,
        mean: m.mean,
        se: m.se,
        n: m.n,
        closed_form,
    };
    let rows = [
        row("g1", sm.g1, (limits.g)(0.0)),
        row("g2", sm.g2, f64::NAN),
        row("f1", sm.f1, (limits.f1)(0.0)),
        row("f2", sm.f2, (limits.f2)(0.0)),
        row("f12", sm.f12, (limits.f12)(0.0)),
        row("chi", sm.chi, (limits.chi)(0.0)),
    ];
    let file = out.join("diagnostics.csv");
    io::write_rows(&file, rows).map_err(rt)?;
    Ok(Outcome { files: vec![file], config: None })
}

/// Homogeneous Poisson designs with rates `p1·n`, `p2·n`, `n = 1/b_n`.
fn poisson(a: &DiagArgs) -> PoissonConfig {
    PoissonConfig {
        p_under: [a.p1, a.p2],
        p_over: [a.p1, a.p2],
        tau: [1.0, 1.0],
        n: 1.0 / a.bn,
    }
}
