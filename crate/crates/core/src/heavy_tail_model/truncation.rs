use serde::{Deserialize, Serialize};

/// `h(x) = x` on `|x| <= INNER_RADIUS` for every shape.
pub const INNER_RADIUS: f64 = 0.5;
/// `h` vanishes on `|x| > OUTER_RADIUS`.
pub const OUTER_RADIUS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruncationShape {
    /// Continuous: identity on `|x| <= 1/2`, `sign(x)(1 - |x|)` out to 1, zero beyond.
    Taper,
    /// `x 1{|x| <= 1}`, discontinuous at `±1`.
    Hard,
}

/// The truncation function separating small (compensated) jumps from large ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncationFn {
    pub shape: TruncationShape,
}

impl Default for TruncationFn {
    fn default() -> Self {
        Self::taper()
    }
}

impl TruncationFn {
    pub const fn taper() -> Self {
        Self {
            shape: TruncationShape::Taper,
        }
    }

    pub const fn hard() -> Self {
        Self {
            shape: TruncationShape::Hard,
        }
    }

    pub fn inner_radius(&self) -> f64 {
        INNER_RADIUS
    }

    /// Magnitudes at which `h` is not smooth.
    pub fn kinks(&self) -> &'static [f64] {
        match self.shape {
            TruncationShape::Taper => &[INNER_RADIUS, OUTER_RADIUS],
            TruncationShape::Hard => &[OUTER_RADIUS],
        }
    }

    /// Kinks of `x ↦ h(x)` together with those of `x ↦ h(ux)`.
    pub fn scaled_kinks(&self, u: f64) -> Vec<f64> {
        let mut out = self.kinks().to_vec();
        if u != 0.0 {
            out.extend(self.kinks().iter().map(|k| k / u.abs()));
        }
        out
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        match self.shape {
            TruncationShape::Taper => {
                if ax <= INNER_RADIUS {
                    x
                } else if ax <= OUTER_RADIUS {
                    x.signum() * (OUTER_RADIUS - ax)
                } else {
                    0.0
                }
            }
            TruncationShape::Hard => {
                if ax <= OUTER_RADIUS {
                    x
                } else {
                    0.0
                }
            }
        }
    }
}

pub fn truncation_eval(h: &TruncationFn, x: f64) -> f64 {
    h.eval(x)
}
