//! Kernel constants, local (spot) estimators, the feasible asymptotic
//! variance estimator, theoretical variance formulas and Studentized
//! statistics.

pub mod avar;
pub mod constants;
pub mod msrv_tuning;
pub mod rv_law;
pub mod spot;
pub mod studentize;
pub mod theory;

pub use avar::{avar_from_data, avar_hat, AvarResult};
pub use constants::{kernel_constants, kernel_constants_tol, phi_ab, psi_ab, KernelConstants};
pub use msrv_tuning::{msrv_tuning, studentize_msrv, MsrvTuning};
pub use rv_law::{rv_limit_law, RvLimitLaw};
pub use spot::{spot_estimators, spot_inputs, EdgeRule, SpotConfig, SpotInputs, SpotRecord};
pub use studentize::{inv_stat, log_stat, studentize, studentize_rv, Undefined};
pub use theory::{constant, theoretical_w2, w2_at, Curve, SchemeLimits, SpotModel, W2Flavor};
