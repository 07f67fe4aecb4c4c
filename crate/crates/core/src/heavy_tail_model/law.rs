use rand::Rng;
use serde::{Deserialize, Serialize};

use super::measure::{LevyMeasure, MagnitudeRange};
use super::{check_alpha, check_weight};
use crate::error::{Error, Result};

/// Every draw has magnitude at least this.
pub const SUPPORT_FLOOR: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailSide {
    Positive,
    Negative,
    Absolute,
}

/// Two-sided Pareto law with support floor 1:
/// `P(X > x) = p x^-α` and `P(X < -x) = q x^-α` for `x >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailLaw {
    alpha: f64,
    p: f64,
}

impl TailLaw {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_weight(p)?;
        Ok(Self { alpha, p })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// The Lévy measure with the same index and tail weights.
    pub fn limit_measure(&self) -> LevyMeasure {
        LevyMeasure::from_parts(self.alpha, self.p)
    }

    /// Inverse transform: positive iff `u_sign < p`, magnitude `u_mag^(-1/α)`.
    /// `u_mag` must lie in `(0, 1]`.
    #[inline]
    pub fn from_uniforms(&self, u_sign: f64, u_mag: f64) -> f64 {
        let magnitude = SUPPORT_FLOOR * u_mag.powf(-1.0 / self.alpha);
        if u_sign < self.p {
            magnitude
        } else {
            -magnitude
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u_sign: f64 = rng.random();
        // random() is on [0, 1); flip it onto (0, 1].
        let u_mag = 1.0 - rng.random::<f64>();
        self.from_uniforms(u_sign, u_mag)
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        (0..count).map(|_| self.sample(rng)).collect()
    }

    pub fn tail_prob(&self, x: f64, side: TailSide) -> Result<f64> {
        if !(x >= SUPPORT_FLOOR) {
            return Err(Error::Domain(format!(
                "tail formula holds only for x >= {SUPPORT_FLOOR}, got {x}"
            )));
        }
        let base = x.powf(-self.alpha);
        Ok(match side {
            TailSide::Positive => self.p * base,
            TailSide::Negative => self.q() * base,
            TailSide::Absolute => base,
        })
    }

    pub fn density(&self, x: f64) -> f64 {
        if x.abs() < SUPPORT_FLOOR {
            return 0.0;
        }
        let weight = if x > 0.0 { self.p } else { self.q() };
        weight * self.alpha * x.abs().powf(-self.alpha - 1.0)
    }

    /// `E[g(X / scale)]` for `scale >= 1`, by quadrature in the scaled variable.
    ///
    /// The law of `X / scale` is `scale^-α` times the limit measure restricted
    /// to `|y| >= 1/scale`, so the features of `g` stay at their natural scale.
    pub fn expect_scaled<G: Fn(f64) -> f64>(&self, g: G, scale: f64) -> Result<f64> {
        if !(scale >= 1.0) {
            return Err(Error::Domain(format!("scale must be >= 1, got {scale}")));
        }
        let range = MagnitudeRange::new(SUPPORT_FLOOR / scale, f64::INFINITY)?;
        let integral = self
            .limit_measure()
            .integrate_with(g, range, &Default::default())?;
        Ok(scale.powf(-self.alpha) * integral)
    }
}

pub fn sample_tail_law<R: Rng + ?Sized>(law: &TailLaw, count: usize, rng: &mut R) -> Vec<f64> {
    law.sample_n(count, rng)
}
