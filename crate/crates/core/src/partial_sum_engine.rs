//! Pre-limit processes built from a sample of the heavy-tailed law:
//!
//! * `S_n(t) = Σ_{i <= [nt]} X_{n,i}`
//! * `Y_n(t) = Σ_{2 <= i <= [nt]} f(Σ_{j<i} X_{n,j}) X_{n,i}`
//!
//! with `X_{n,i} = X_i / b_n - c_n`, and the ε-truncated variant where only
//! scaled summands of magnitude at least ε are kept.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::FunctionalF;
use crate::heavy_tail_model::{normalizer_bn, ScalingConstants, TailLaw, TruncationFn};
use crate::path::StepPath;

/// Which quantity the ε-indicator of the truncated summands is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndicatorScale {
    /// `1{|X_j / b_n| >= ε}`: removes the jumps the truncated limit removes.
    #[default]
    Scaled,
    /// `1{|X_j| >= ε}` on the raw draws; with support floor 1 and `ε < 1/2`
    /// this never removes anything.
    Raw,
}

/// Normalizer, ε level and centering for the truncated summands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedScaling {
    pub n: usize,
    pub b_n: f64,
    pub eps: f64,
    pub indicator: IndicatorScale,
    /// `E[h((X_1/b_n) 1{|·| >= ε})]`.
    pub c_eps: f64,
}

impl TruncatedScaling {
    pub fn for_law(
        law: &TailLaw,
        n: usize,
        h: &TruncationFn,
        eps: f64,
        indicator: IndicatorScale,
    ) -> Result<Self> {
        if !(eps > 0.0 && eps < h.inner_radius()) {
            return Err(Error::Argument(format!(
                "truncation level {eps} must lie in (0, {})",
                h.inner_radius()
            )));
        }
        let b_n = normalizer_bn(law, n)?;
        let c_eps = match indicator {
            IndicatorScale::Scaled => {
                law.expect_scaled(|y| if y.abs() >= eps { h.eval(y) } else { 0.0 }, b_n)?
            }
            IndicatorScale::Raw => law.expect_scaled(
                |y| {
                    if (y * b_n).abs() >= eps {
                        h.eval(y)
                    } else {
                        0.0
                    }
                },
                b_n,
            )?,
        };
        Ok(Self {
            n,
            b_n,
            eps,
            indicator,
            c_eps,
        })
    }

    #[inline]
    pub fn summand(&self, raw: f64) -> f64 {
        let scaled = raw / self.b_n;
        let keep = match self.indicator {
            IndicatorScale::Scaled => scaled.abs() >= self.eps,
            IndicatorScale::Raw => raw.abs() >= self.eps,
        };
        if keep {
            scaled - self.c_eps
        } else {
            -self.c_eps
        }
    }
}

/// `[nt]`, counted as the number of `i` with `i/n <= t` so it agrees with
/// the step times of the built paths.
pub fn steps_until(n: usize, t: f64) -> usize {
    let mut k = ((n as f64 * t).floor().max(0.0) as usize).min(n);
    while k < n && ((k + 1) as f64) / (n as f64) <= t {
        k += 1;
    }
    while k > 0 && (k as f64) / (n as f64) > t {
        k -= 1;
    }
    k
}

fn check_len(samples: &[f64], n: usize) -> Result<()> {
    if n == 0 || samples.len() != n {
        return Err(Error::Argument(format!(
            "expected {n} samples (n >= 1), got {}",
            samples.len()
        )));
    }
    Ok(())
}

/// Assembles `(S_n, Y_n)` from already-centered summands.
fn assemble(increments: &[f64], f: &FunctionalF) -> Result<(StepPath, StepPath)> {
    let n = increments.len();
    let times: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
    let mut s_values = Vec::with_capacity(n);
    let mut y_values = Vec::with_capacity(n.saturating_sub(1));
    let (mut s, mut y) = (0.0, 0.0);
    for (i, &x) in increments.iter().enumerate() {
        if i > 0 {
            y += f.eval(s) * x;
            y_values.push(y);
        }
        s += x;
        s_values.push(s);
    }
    let y_times = times[1..].to_vec();
    Ok((
        StepPath::new(times, s_values, 0.0)?,
        StepPath::new(y_times, y_values, 0.0)?,
    ))
}

/// `(S_n, Y_n)` on the grid `{i/n}`.
pub fn build_functional_paths(
    samples: &[f64],
    sc: &ScalingConstants,
    f: &FunctionalF,
) -> Result<(StepPath, StepPath)> {
    check_len(samples, sc.n)?;
    let increments: Vec<f64> = samples.iter().map(|&x| x / sc.b_n - sc.c_n).collect();
    assemble(&increments, f)
}

/// `(S_n^ε, Y_n^ε)` on the grid `{i/n}`.
pub fn build_truncated_paths(
    samples: &[f64],
    ts: &TruncatedScaling,
    f: &FunctionalF,
) -> Result<(StepPath, StepPath)> {
    check_len(samples, ts.n)?;
    let increments: Vec<f64> = samples.iter().map(|&x| ts.summand(x)).collect();
    assemble(&increments, f)
}

/// `(S_n(t), Y_n(t))` at each sorted `t` in `times`, without materialising
/// the paths. `increment` maps a raw draw to its centered summand.
pub fn functional_values_at<I: Fn(f64) -> f64>(
    samples: &[f64],
    increment: I,
    f: &FunctionalF,
    times: &[f64],
) -> Vec<(f64, f64)> {
    let n = samples.len();
    let mut out = Vec::with_capacity(times.len());
    let (mut s, mut y) = (0.0, 0.0);
    let mut i = 0usize;
    for &t in times {
        // [nt], guarding against i/n rounding just above t.
        while i < n && ((i + 1) as f64) / (n as f64) <= t {
            let x = increment(samples[i]);
            if i > 0 {
                y += f.eval(s) * x;
            }
            s += x;
            i += 1;
        }
        out.push((s, y));
    }
    out
}
