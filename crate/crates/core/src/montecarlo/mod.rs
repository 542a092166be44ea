//! Replicated experiments on the reference simulation design:
//! a noisy Brownian bridge observed either equidistantly or at barrier-hitting
//! times, with the PHY and its comparators computed on every replication.

pub mod density;
pub mod scenario;
pub mod tables;

pub use density::{density_export, qq_export, silverman_bandwidth};
pub use scenario::{
    run_rep, run_scenario, simulate_inputs, EstimatorTag, McReport, RepInputs, RepRecord, Sampling, Scenario,
    ScenarioConfig,
};
pub use tables::{bias_rmse_table, quantile_coverage_table, statistic_values, BiasRow, QuantileRow, STATISTICS};

use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::io::write_rows;

/// Abscissae of the exported density estimates.
pub const DENSITY_POINTS: usize = 201;

/// Writes the per-replication records, the summary tables and a density and
/// QQ export per statistic into `dir`. Returns the files written.
pub fn write_report(report: &McReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut files = vec![dir.join("per_rep.csv"), dir.join("bias_rmse.csv"), dir.join("quantiles.csv")];
    write_rows(&files[0], &report.per_rep)?;
    write_rows(&files[1], &report.bias_rmse)?;
    write_rows(&files[2], &report.quantiles)?;
    for row in &report.quantiles {
        let x = statistic_values(&report.per_rep, &row.statistic);
        let tag = row.statistic.to_lowercase();
        let d = dir.join(format!("density_{tag}.csv"));
        write_rows(
            &d,
            density_export(&x, DENSITY_POINTS)
                .into_iter()
                .map(|(x, density, normal)| DensityRow { x, density, normal }),
        )?;
        let q = dir.join(format!("qq_{tag}.csv"));
        write_rows(&q, qq_export(&x).into_iter().map(|(theoretical, sample)| QqRow { theoretical, sample }))?;
        files.extend([d, q]);
    }
    Ok(files)
}

#[derive(serde::Serialize)]
struct DensityRow {
    x: f64,
    density: f64,
    normal: f64,
}

#[derive(serde::Serialize)]
struct QqRow {
    theoretical: f64,
    sample: f64,
}
