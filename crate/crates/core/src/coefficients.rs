//! Tabulated coefficient functions `u ↦ ∫ k(u, x) m(dx)` and the registry of
//! test functions integrated against jump compensators.
//!
//! Characteristics of `Y = ∫ f(Z(s-)) dZ(s)` integrate, at each time, a
//! kernel in `x` scaled by the current level `u = f(Z(s-))`. Tabulating each
//! kernel once over the range of `f` turns path evaluation into interpolation.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heavy_tail_model::TruncationFn;

/// Nodes per table.
pub const TABLE_NODES: usize = 2048;

/// A function of `u ∈ [-bound, bound]` sampled on a grid that is uniform in
/// `w`, with `u = bound·sign(w)|w|^γ`, and read back by 4-point cubic
/// Lagrange interpolation in `w`.
///
/// Coefficients against an α-stable measure behave like `|u|^α` at the
/// origin; `γ = max(1, 3/α)` makes them at least `|w|³` there.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    bound: f64,
    gamma: f64,
    values: Vec<f64>,
    origin: Option<f64>,
}

impl CoefficientTable {
    pub fn build<G>(bound: f64, alpha: f64, nodes: usize, g: G) -> Result<Self>
    where
        G: Fn(f64) -> Result<f64> + Sync,
    {
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::Argument(format!(
                "table bound {bound} must be positive"
            )));
        }
        if nodes < 4 {
            return Err(Error::Argument(
                "a cubic table needs at least 4 nodes".into(),
            ));
        }
        let gamma = (3.0 / alpha).max(1.0);
        let step = 2.0 / (nodes - 1) as f64;
        let values = (0..nodes)
            .into_par_iter()
            .map(|k| {
                let w = -1.0 + step * k as f64;
                g(bound * w.signum() * w.abs().powf(gamma))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self {
            bound,
            gamma,
            values,
            origin: None,
        })
    }

    /// Pins the value at `u = 0`. Near the origin, interpolation then uses
    /// the pinned value and nodes on the same side only, so functions with a
    /// one-sided expansion in `|w|` are not smeared across zero.
    pub fn with_origin(mut self, value: f64) -> Self {
        self.origin = Some(value);
        self
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Node positions in `u`.
    pub fn nodes(&self) -> Vec<f64> {
        let step = 2.0 / (self.values.len() - 1) as f64;
        (0..self.values.len())
            .map(|k| {
                let w = -1.0 + step * k as f64;
                self.bound * w.signum() * w.abs().powf(self.gamma)
            })
            .collect()
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        let slack = 1e-12 * self.bound;
        if !(u.abs() <= self.bound + slack) {
            return Err(Error::Domain(format!(
                "u = {u} outside tabulated range [-{b}, {b}]",
                b = self.bound
            )));
        }
        let r = (u.abs() / self.bound).min(1.0);
        let w = u.signum() * r.powf(1.0 / self.gamma);
        let m = self.values.len();
        let step = 2.0 / (m - 1) as f64;
        let pos = (w + 1.0) / step;
        if let Some(origin) = self.origin {
            let centre = (m - 1) as f64 / 2.0;
            if (pos - centre).abs() < 1.5 {
                return Ok(self.one_sided(w, origin, step));
            }
        }
        let base = (pos.floor() as isize - 1).clamp(0, m as isize - 4) as usize;
        let x = pos - base as f64;
        let y = &self.values[base..base + 4];
        // Lagrange basis on nodes 0, 1, 2, 3.
        let l0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
        let l1 = x * (x - 2.0) * (x - 3.0) / 2.0;
        let l2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
        let l3 = x * (x - 1.0) * (x - 2.0) / 6.0;
        Ok(l0 * y[0] + l1 * y[1] + l2 * y[2] + l3 * y[3])
    }

    fn one_sided(&self, w: f64, origin: f64, step: f64) -> f64 {
        let m = self.values.len();
        let node_w = |k: usize| -1.0 + step * k as f64;
        let first = if w >= 0.0 { m / 2 } else { (m - 1) / 2 };
        let picks: Vec<usize> = if w >= 0.0 {
            (first..first + 3).collect()
        } else {
            (first - 2..=first).rev().collect()
        };
        let xs = [0.0, node_w(picks[0]), node_w(picks[1]), node_w(picks[2])];
        let ys = [
            origin,
            self.values[picks[0]],
            self.values[picks[1]],
            self.values[picks[2]],
        ];
        let mut total = 0.0;
        for i in 0..4 {
            let mut basis = 1.0;
            for j in 0..4 {
                if i != j {
                    basis *= (w - xs[j]) / (xs[i] - xs[j]);
                }
            }
            total += basis * ys[i];
        }
        total
    }
}

/// Test functions integrated against jump compensators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TestFunction {
    Zero,
    /// `g_a(x) = (a|x| - 1)^+ ∧ 1`.
    Ga(f64),
    Truncation(TruncationFn),
    TruncationSquared(TruncationFn),
    /// `1{|x| > A}`.
    OutsideWindow(f64),
}

impl TestFunction {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::Ga(a) => (a * x.abs() - 1.0).clamp(0.0, 1.0),
            Self::Truncation(h) => h.eval(x),
            Self::TruncationSquared(h) => h.eval(x).powi(2),
            Self::OutsideWindow(a) => {
                if x.abs() > a {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Magnitudes at which the function is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match *self {
            Self::Zero => Vec::new(),
            Self::Ga(a) => vec![1.0 / a, 2.0 / a],
            Self::Truncation(h) | Self::TruncationSquared(h) => h.kinks().to_vec(),
            Self::OutsideWindow(a) => vec![a],
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => f.write_str("zero"),
            Self::Ga(a) => write!(f, "g_a:{a}"),
            Self::Truncation(_) => f.write_str("h"),
            Self::TruncationSquared(_) => f.write_str("h2"),
            Self::OutsideWindow(a) => write!(f, "outside:{a}"),
        }
    }
}

/// `g_1` and `g_2`, the default compensator probes.
pub fn default_test_functions() -> Vec<TestFunction> {
    vec![TestFunction::Ga(1.0), TestFunction::Ga(2.0)]
}
