//! Predictable characteristics of the pre-limit pair `(Y_n, S_n)` and checks
//! that the scaled summand law approaches the limit Lévy measure.
//!
//! At each step `i/n` the compensator places the law of one scaled summand.
//! Multiplying by `n` gives a measure that, for the floor-1 Pareto law, is
//! exactly `ρ` restricted to `|y| >= 1/b_n` (shifted by the centering), so
//! every kernel below is a `ρ`-integral over that range.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coefficients::{default_test_functions, CoefficientTable, TestFunction, TABLE_NODES};
use crate::error::{Error, Result};
use crate::functional::FunctionalF;
use crate::heavy_tail_model::{
    LevyMeasure, MagnitudeRange, ScalingConstants, TailLaw, TailSide, TruncationFn,
};
use crate::partial_sum_engine::steps_until;
use crate::stable_limit_sim::{check_grid, table_bound, CharTriplet};

/// Law the kernels integrate against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelLaw {
    /// Law of `X_1/b_n - c_n`, the summands the processes are built from.
    #[default]
    Centered,
    /// Law of `X_1/b_n`.
    Uncentered,
}

/// One-step compensator of the scaled summands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreLimitKernel {
    pub law: TailLaw,
    pub sc: ScalingConstants,
    pub h: TruncationFn,
    #[serde(default)]
    pub kernel_law: KernelLaw,
}

impl PreLimitKernel {
    pub fn new(law: TailLaw, n: usize, h: TruncationFn) -> Result<Self> {
        Ok(Self {
            law,
            sc: ScalingConstants::for_law(&law, n, &h)?,
            h,
            kernel_law: KernelLaw::Centered,
        })
    }

    pub fn with_kernel_law(mut self, kernel_law: KernelLaw) -> Self {
        self.kernel_law = kernel_law;
        self
    }

    pub fn n(&self) -> usize {
        self.sc.n
    }

    /// Shift subtracted from `X_1/b_n` under the selected kernel law.
    pub fn shift(&self) -> f64 {
        match self.kernel_law {
            KernelLaw::Centered => self.sc.c_n,
            KernelLaw::Uncentered => 0.0,
        }
    }

    /// `n E[g(X_1/b_n - shift)]`; `kinks` are magnitudes where `g` is not smooth.
    pub fn scaled_expectation<G: Fn(f64) -> f64>(&self, g: G, kinks: &[f64]) -> Result<f64> {
        let (b, c) = (self.sc.b_n, self.shift());
        let breaks: Vec<f64> = kinks
            .iter()
            .flat_map(|k| [(k + c).abs(), (k - c).abs()])
            .collect();
        let range = MagnitudeRange::new(1.0 / b, f64::INFINITY)?;
        let integral = self
            .law
            .limit_measure()
            .integrate_breaks(|y| g(y - c), range, &breaks)?;
        Ok(self.sc.n as f64 * b.powf(-self.law.alpha()) * integral)
    }

    /// `E[g(X_1/b_n - shift)]`.
    pub fn expectation<G: Fn(f64) -> f64>(&self, g: G, kinks: &[f64]) -> Result<f64> {
        Ok(self.scaled_expectation(g, kinks)? / self.sc.n as f64)
    }
}

/// `∫_0^t ∫ g dν_n = [nt] E[g(X_{n,1})]`.
pub fn kernel_expectation(k: &PreLimitKernel, g: &TestFunction, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Argument(format!("time {t} outside [0, 1]")));
    }
    let steps = steps_until(k.n(), t);
    if steps == 0 {
        return Ok(0.0);
    }
    Ok(steps as f64 * k.expectation(|x| g.eval(x), &g.kinks())?)
}

/// `n`-scaled one-step coefficients tabulated over the range of `f`.
#[derive(Debug, Clone)]
pub struct PreLimitCoefficients {
    kernel: PreLimitKernel,
    f: FunctionalF,
    drift: CoefficientTable,
    quad11: CoefficientTable,
    quad12: CoefficientTable,
    mean_h: CoefficientTable,
    h2_rate: f64,
    h_rate: f64,
    probes: Vec<(TestFunction, f64)>,
}

impl PreLimitCoefficients {
    pub fn new(kernel: &PreLimitKernel, f: &FunctionalF) -> Result<Self> {
        let (alpha, bound, h) = (kernel.law.alpha(), table_bound(f), kernel.h);
        let table = |k: &(dyn Fn(f64, f64) -> f64 + Sync)| {
            CoefficientTable::build(bound, alpha, TABLE_NODES, |u| {
                kernel.scaled_expectation(|x| k(u, x), &h.scaled_kinks(u))
            })
            .map(|t| t.with_origin(0.0))
        };
        let drift = table(&|u, x| h.eval(u * x) - u * h.eval(x))?;
        let quad11 = table(&|u, x| h.eval(u * x).powi(2))?;
        let quad12 = table(&|u, x| h.eval(u * x) * h.eval(x))?;
        let mean_h = table(&|u, x| h.eval(u * x))?;
        let h2_rate = kernel.scaled_expectation(|x| h.eval(x).powi(2), h.kinks())?;
        let h_rate = kernel.scaled_expectation(|x| h.eval(x), h.kinks())?;
        let probes = default_test_functions()
            .into_iter()
            .map(|g| Ok((g, kernel.scaled_expectation(|x| g.eval(x), &g.kinks())?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kernel: *kernel,
            f: *f,
            drift,
            quad11,
            quad12,
            mean_h,
            h2_rate,
            h_rate,
            probes,
        })
    }

    /// `n E[h(u X_{n,1}) - u h(X_{n,1})]`.
    pub fn drift_coefficient(&self, u: f64) -> Result<f64> {
        self.drift.eval(u)
    }

    pub fn c11_coefficient(&self, u: f64) -> Result<f64> {
        self.quad11.eval(u)
    }

    pub fn c12_coefficient(&self, u: f64) -> Result<f64> {
        self.quad12.eval(u)
    }

    /// `n E[h(u X_{n,1})]`.
    pub fn mean_h_coefficient(&self, u: f64) -> Result<f64> {
        self.mean_h.eval(u)
    }

    /// `n E[h²(X_{n,1})]`.
    pub fn h2_rate(&self) -> f64 {
        self.h2_rate
    }

    /// `n E[h(X_{n,1})]`.
    pub fn h_rate(&self) -> f64 {
        self.h_rate
    }

    /// Characteristics along the realized sample: step `i` contributes the
    /// one-step kernels at level `u = f(s_{i-1})`, minus the squared atoms.
    pub fn characteristics(&self, samples: &[f64], grid: &[f64]) -> Result<CharTriplet> {
        check_grid(grid)?;
        let sc = &self.kernel.sc;
        let n = sc.n;
        if samples.len() != n {
            return Err(Error::Argument(format!(
                "expected {n} samples, got {}",
                samples.len()
            )));
        }
        let inv_n = 1.0 / n as f64;
        let atom_h = self.h_rate * inv_n;
        let c22_step = self.h2_rate * inv_n - atom_h * atom_h;

        let m = grid.len();
        let mut out = CharTriplet {
            grid: grid.to_vec(),
            b1: Vec::with_capacity(m),
            c11: Vec::with_capacity(m),
            c12: Vec::with_capacity(m),
            c22: Vec::with_capacity(m),
            nu_test_integrals: BTreeMap::new(),
        };
        let (mut b1, mut c11, mut c12) = (0.0, 0.0, 0.0);
        let (mut s, mut i) = (0.0, 0usize);
        for &t in grid {
            let until = steps_until(n, t);
            while i < until {
                let u = self.f.eval(s);
                let atom = self.mean_h.eval(u)? * inv_n;
                b1 += self.drift.eval(u)? * inv_n;
                c11 += self.quad11.eval(u)? * inv_n - atom * atom;
                c12 += self.quad12.eval(u)? * inv_n - atom * atom_h;
                s += samples[i] / sc.b_n - sc.c_n;
                i += 1;
            }
            out.b1.push(b1);
            out.c11.push(c11);
            out.c12.push(c12);
            out.c22.push(until as f64 * c22_step);
        }
        for (g, mass) in &self.probes {
            out.nu_test_integrals.insert(
                g.to_string(),
                grid.iter()
                    .map(|&t| steps_until(n, t) as f64 * mass * inv_n)
                    .collect(),
            );
        }
        Ok(out)
    }
}

pub fn path_characteristics(
    k: &PreLimitKernel,
    samples: &[f64],
    f: &FunctionalF,
    grid: &[f64],
) -> Result<CharTriplet> {
    if samples.len() != k.n() {
        return Err(Error::Argument(format!(
            "expected {} samples, got {}",
            k.n(),
            samples.len()
        )));
    }
    PreLimitCoefficients::new(k, f)?.characteristics(samples, grid)
}

/// Smallest grid point accepted by [`vague_check`]: `n P(X_1/b_n ∈ ·)` and
/// `ρ` coincide beyond `1/b_n`, and only neighbourhoods away from 0 are tested.
pub fn vague_grid_floor(k: &PreLimitKernel) -> f64 {
    (0.5f64).max(1.0 / k.sc.b_n)
}

/// `sup_x max(|n P(X_1/b_n > x) - ρ((x,∞])|, |n P(X_1/b_n < -x) - ρ([-∞,-x))|)`.
pub fn vague_check(k: &PreLimitKernel, measure: &LevyMeasure, x_grid: &[f64]) -> Result<f64> {
    if x_grid.is_empty() {
        return Err(Error::Argument("vague check needs a nonempty grid".into()));
    }
    let floor = vague_grid_floor(k);
    if let Some(x) = x_grid
        .iter()
        .find(|&&x| !(x >= floor * (1.0 - 1e-12)) || !x.is_finite())
    {
        return Err(Error::Domain(format!(
            "grid point {x} lies in the excluded neighbourhood of 0 (must be >= {floor})"
        )));
    }
    let (n, b) = (k.sc.n as f64, k.sc.b_n);
    let mut worst = 0.0f64;
    for &x in x_grid {
        let raw = (b * x).max(1.0);
        for side in [TailSide::Positive, TailSide::Negative] {
            let pre = n * k.law.tail_prob(raw, side)?;
            worst = worst.max((pre - measure.tail(x, side)?).abs());
        }
    }
    Ok(worst)
}

/// `|∫ g_a d(n F_n) - ∫ g_a dρ|` for each `a`, with `F_n` the law of `X_1/b_n`.
pub fn ca_family_check(
    k: &PreLimitKernel,
    measure: &LevyMeasure,
    a_values: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if a_values.is_empty() {
        return Err(Error::Argument("no g_a parameters given".into()));
    }
    let uncentered = k.with_kernel_law(KernelLaw::Uncentered);
    a_values
        .iter()
        .map(|&a| {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Argument(format!("g_a needs a > 0, got {a}")));
            }
            let g = TestFunction::Ga(a);
            let pre = uncentered.scaled_expectation(|x| g.eval(x), &g.kinks())?;
            let lim =
                measure.integrate_breaks(|x| g.eval(x), MagnitudeRange::full(), &g.kinks())?;
            Ok((a, (pre - lim).abs()))
        })
        .collect()
}
