//! The sampled law, its Lévy limit measure, the truncation function and the
//! scaling/centering constants that connect them.

mod law;
mod measure;
mod scaling;
mod truncation;

pub use law::{sample_tail_law, TailLaw, TailSide, SUPPORT_FLOOR};
pub use measure::{rho_integrate, LevyMeasure, MagnitudeRange};
pub use scaling::{centering_cn, normalizer_bn, quantile_normalizer, ScalingConstants};
pub use truncation::{truncation_eval, TruncationFn, TruncationShape, INNER_RADIUS, OUTER_RADIUS};

use crate::error::{Error, Result};

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "tail index {alpha} outside (0, 2)"
        )))
    }
}

pub(crate) fn check_weight(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "tail weight {p} outside [0, 1]"
        )))
    }
}
