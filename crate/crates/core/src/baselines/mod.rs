//! Gradient-boosting and support-vector baselines. Their defaults are
//! acknowledged stand-ins for common library settings; comparisons against
//! them are qualitative (failure modes and orderings), not digit-level.

mod boost;
mod svm;

pub use boost::{fit_boost, BoostConfig, BoostModel, RegressionTree};
pub use svm::{fit_svm, SvmConfig, SvmModel, KKT_TOL};
