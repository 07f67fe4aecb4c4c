use serde::{Deserialize, Serialize};

use super::law::TailSide;
use super::{check_alpha, check_weight};
use crate::error::{Error, Result};
use crate::quadrature::{Quadrature, QuadratureError};

/// Number of e-folds covered by the initial partition on each side of the pivot.
const DECADES: usize = 40;

/// Lévy measure `ρ((x, ∞]) = p x^-α`, `ρ([-∞, -x)) = q x^-α`, `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevyMeasure {
    alpha: f64,
    p: f64,
}

/// The symmetric pair of intervals `[-upper, -lower] ∪ [lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnitudeRange {
    pub lower: f64,
    pub upper: f64,
}

impl MagnitudeRange {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower >= 0.0) || !(upper > lower) {
            return Err(Error::Argument(format!(
                "bad magnitude range [{lower}, {upper}]"
            )));
        }
        Ok(Self { lower, upper })
    }

    /// All of `ℝ \ {0}`.
    pub fn full() -> Self {
        Self {
            lower: 0.0,
            upper: f64::INFINITY,
        }
    }

    /// `|x| > lower`.
    pub fn beyond(lower: f64) -> Result<Self> {
        Self::new(lower, f64::INFINITY)
    }
}

impl LevyMeasure {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_weight(p)?;
        Ok(Self { alpha, p })
    }

    pub(crate) fn from_parts(alpha: f64, p: f64) -> Self {
        Self { alpha, p }
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

    /// Tail mass beyond `x > 0` on the requested side.
    pub fn tail(&self, x: f64, side: TailSide) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("tail of ρ needs x > 0, got {x}")));
        }
        let base = x.powf(-self.alpha);
        Ok(match side {
            TailSide::Positive => self.p * base,
            TailSide::Negative => self.q() * base,
            TailSide::Absolute => base,
        })
    }

    pub fn density(&self, x: f64) -> f64 {
        if x == 0.0 {
            return f64::INFINITY;
        }
        let weight = if x > 0.0 { self.p } else { self.q() };
        weight * self.alpha * x.abs().powf(-self.alpha - 1.0)
    }

    /// `∫ g dρ` over the range; quadrature failures surface as numerical errors.
    pub fn integrate_with<G: Fn(f64) -> f64>(
        &self,
        g: G,
        range: MagnitudeRange,
        quad: &Quadrature,
    ) -> Result<f64> {
        self.integrate_with_breaks(g, range, &[], quad)
    }

    /// As [`integrate_with`](Self::integrate_with), with magnitudes `|x|` at
    /// which `g` may be non-smooth on either side seeded into the partition.
    pub fn integrate_with_breaks<G: Fn(f64) -> f64>(
        &self,
        g: G,
        range: MagnitudeRange,
        breaks: &[f64],
        quad: &Quadrature,
    ) -> Result<f64> {
        let half = Quadrature {
            abs_tol: quad.abs_tol / 2.0,
            ..*quad
        };
        let mut total = 0.0;
        if self.p > 0.0 {
            total += self.p
                * power_law_integral(&g, self.alpha, range.lower, range.upper, breaks, &half)?;
        }
        if self.q() > 0.0 {
            total += self.q()
                * power_law_integral(
                    |x| g(-x),
                    self.alpha,
                    range.lower,
                    range.upper,
                    breaks,
                    &half,
                )?;
        }
        Ok(total)
    }

    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G, range: MagnitudeRange) -> Result<f64> {
        self.integrate_with(g, range, &Quadrature::default())
    }

    pub fn integrate_breaks<G: Fn(f64) -> f64>(
        &self,
        g: G,
        range: MagnitudeRange,
        breaks: &[f64],
    ) -> Result<f64> {
        self.integrate_with_breaks(g, range, breaks, &Quadrature::default())
    }
}

/// `∫ g dρ` over the range, absolute tolerance 1e-10. Failure to converge is
/// read as `g` not being ρ-integrable there and reported as a domain error.
pub fn rho_integrate<G: Fn(f64) -> f64>(
    measure: &LevyMeasure,
    g: G,
    range: MagnitudeRange,
) -> Result<f64> {
    measure.integrate(g, range).map_err(|e| match e {
        Error::Numerical(q) => Error::Domain(format!(
            "integrand is not ρ-integrable on the requested range: {q}"
        )),
        other => other,
    })
}

/// `∫_lower^upper g(x) α x^(-α-1) dx` for `0 <= lower < upper <= ∞`.
///
/// The range is split at a pivot (1, clamped into the range). Below the pivot
/// the integral is taken in `log x`, or, when `lower = 0`, under
/// `x = pivot v^(1/(2-α))`, which makes the integrand bounded whenever
/// `g(x) = O(x²)`. Above the pivot `x = pivot u^(-1/α)` maps the tail onto a
/// bounded interval with integrand `pivot^-α g(x)`.
fn power_law_integral<G: Fn(f64) -> f64>(
    g: G,
    alpha: f64,
    lower: f64,
    upper: f64,
    breaks: &[f64],
    quad: &Quadrature,
) -> std::result::Result<f64, QuadratureError> {
    if !(upper > lower) {
        return Ok(0.0);
    }
    let pivot = 1f64.clamp(lower, upper.min(f64::MAX));
    let half = Quadrature {
        abs_tol: quad.abs_tol / 2.0,
        ..*quad
    };
    let mut total = 0.0;

    if pivot > lower {
        if lower > 0.0 {
            let (s_lo, s_hi) = (lower.ln(), pivot.ln());
            let steps = ((s_hi - s_lo).ceil() as usize).clamp(1, 4 * DECADES);
            let mut points: Vec<f64> = (0..=steps)
                .map(|i| s_lo + (s_hi - s_lo) * i as f64 / steps as f64)
                .collect();
            seed(&mut points, breaks.iter().map(|b| b.ln()));
            total += half
                .integrate_split(|s| g(s.exp()) * alpha * (-alpha * s).exp(), &points)?
                .value;
        } else {
            let k = 1.0 / (2.0 - alpha);
            let scale = alpha * k * pivot.powf(-alpha);
            let mut points: Vec<f64> = (0..=DECADES).map(|j| (-(j as f64) / k).exp()).collect();
            points.push(0.0);
            seed(
                &mut points,
                breaks.iter().map(|b| (b / pivot).powf(1.0 / k)),
            );
            total += half
                .integrate_split(
                    |v| {
                        let x = pivot * v.powf(k);
                        let gx = g(x);
                        if gx == 0.0 {
                            0.0
                        } else {
                            scale * gx * v.powf(-k * alpha - 1.0)
                        }
                    },
                    &points,
                )?
                .value;
        }
    }

    if upper > pivot {
        let u_lo = if upper.is_finite() {
            (pivot / upper).powf(alpha)
        } else {
            0.0
        };
        let mut points: Vec<f64> = (0..=DECADES)
            .map(|j| (-alpha * j as f64).exp())
            .filter(|&u| u > u_lo)
            .collect();
        points.push(u_lo);
        seed(&mut points, breaks.iter().map(|b| (pivot / b).powf(alpha)));
        let weight = pivot.powf(-alpha);
        total += half
            .integrate_split(
                |u| {
                    let x = pivot * u.powf(-1.0 / alpha);
                    if x.is_finite() {
                        weight * g(x)
                    } else {
                        0.0
                    }
                },
                &points,
            )?
            .value;
    }
    Ok(total)
}

/// Adds the interior `extra` points to a partition and sorts it ascending.
fn seed<I: Iterator<Item = f64>>(points: &mut Vec<f64>, extra: I) {
    let lo = points.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = points.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    points.extend(extra.filter(|p| p.is_finite() && *p > lo && *p < hi));
    points.sort_by(f64::total_cmp);
    points.dedup();
}
