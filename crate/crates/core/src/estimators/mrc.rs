use crate::error::Result;
use crate::noise::ObservationSeries;
use crate::sampling::RefreshData;

use super::{autocov, Design, EstimatorMeta, EstimatorResult, PreAvgConfig};

/// Modulated realized covariance with the symmetric autocovariance as
/// noise correction: `Ξ_{g,g}/ψ₂ − (ψ₁/ψ₂) γ(1)^{12}`.
pub fn mrc(xo: &ObservationSeries, yo: &ObservationSeries, rd: &RefreshData, cfg: &PreAvgConfig) -> Result<EstimatorResult> {
    let xs = Design::refresh_x(xo, rd);
    let ys = Design::refresh_y(yo, rd);
    let (psi1, psi2) = (cfg.psi1(), cfg.psi2());
    let xi = autocov::xi(&xs, &ys, rd, &cfg.weight, &cfg.weight, cfg.k_n)?;
    let g = autocov::gamma1(&xs, &ys, rd, cfg.k_n)?;
    let path = xi.combine(1.0 / psi2, &g.g12, -psi1 / psi2);
    Ok(EstimatorResult {
        value: path.last(),
        path: Some(path),
        meta: EstimatorMeta {
            tag: "mrc",
            params: vec![("k_n", cfg.k_n as f64), ("psi1", psi1), ("psi2", psi2)],
        },
    })
}
