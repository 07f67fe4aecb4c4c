//! Càdlàg step paths on `[0, 1]`, optionally carrying a linear drift.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A right-continuous path on `[0, 1]`: piecewise constant between the
/// breakpoints in `times`, plus an optional deterministic linear drift.
///
/// `value_at(t) = level(t) + drift * t`, where `level` is `initial_value`
/// before the first breakpoint and `values[k]` on `[times[k], times[k+1])`.
/// Pre-limit paths have zero drift; simulated Lévy paths carry the
/// compensator drift here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepPath {
    times: Vec<f64>,
    values: Vec<f64>,
    initial_value: f64,
    drift: f64,
}

impl StepPath {
    pub fn new(times: Vec<f64>, values: Vec<f64>, initial_value: f64) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Argument(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if let Some(&first) = times.first() {
            if !(first > 0.0) {
                return Err(Error::Argument(format!(
                    "first breakpoint {first} must be > 0"
                )));
            }
        }
        if let Some(&last) = times.last() {
            if !(last <= 1.0) {
                return Err(Error::Argument(format!(
                    "breakpoint {last} beyond horizon 1"
                )));
            }
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Argument(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            times,
            values,
            initial_value,
            drift: 0.0,
        })
    }

    /// Builds a path from per-breakpoint increments.
    pub fn from_increments(
        times: Vec<f64>,
        increments: &[f64],
        initial_value: f64,
    ) -> Result<Self> {
        let mut level = initial_value;
        let values = increments
            .iter()
            .map(|dx| {
                level += dx;
                level
            })
            .collect();
        Self::new(times, values, initial_value)
    }

    /// Constant path.
    pub fn constant(value: f64) -> Self {
        Self {
            times: Vec::new(),
            values: Vec::new(),
            initial_value: value,
            drift: 0.0,
        }
    }

    pub fn with_drift(mut self, rate: f64) -> Self {
        self.drift = rate;
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn initial_value(&self) -> f64 {
        self.initial_value
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Step level (drift excluded) at the last breakpoint `<= t`.
    fn level_at(&self, t: f64) -> f64 {
        let idx = self.times.partition_point(|&s| s <= t);
        if idx == 0 {
            self.initial_value
        } else {
            self.values[idx - 1]
        }
    }

    /// Step level strictly before `t`.
    fn level_before(&self, t: f64) -> f64 {
        let idx = self.times.partition_point(|&s| s < t);
        if idx == 0 {
            self.initial_value
        } else {
            self.values[idx - 1]
        }
    }

    pub fn value_at(&self, t: f64) -> f64 {
        self.level_at(t) + self.drift * t
    }

    /// `X(t-)`.
    pub fn left_limit(&self, t: f64) -> f64 {
        self.level_before(t) + self.drift * t
    }

    /// Jump `X(t) - X(t-)`; zero away from breakpoints.
    pub fn jump_at(&self, t: f64) -> f64 {
        self.level_at(t) - self.level_before(t)
    }

    pub fn terminal(&self) -> f64 {
        self.value_at(1.0)
    }

    /// Values at each of `ts`, which must be sorted ascending.
    pub fn sample_at(&self, ts: &[f64]) -> Vec<f64> {
        ts.iter().map(|&t| self.value_at(t)).collect()
    }

    /// Largest absolute pointwise difference over the union of breakpoints
    /// (and `t = 0`, `t = 1`); exact for zero-drift paths.
    pub fn sup_distance(&self, other: &StepPath) -> f64 {
        let mut grid: Vec<f64> = self
            .times
            .iter()
            .chain(other.times.iter())
            .copied()
            .collect();
        grid.push(0.0);
        grid.push(1.0);
        grid.sort_by(f64::total_cmp);
        grid.iter()
            .map(|&t| (self.value_at(t) - other.value_at(t)).abs())
            .fold(0.0, f64::max)
    }
}
