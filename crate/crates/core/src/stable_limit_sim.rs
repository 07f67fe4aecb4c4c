//! The limit side: Poisson construction of the α-stable Lévy process `Z`
//! (or its ε-truncation), the Euler stochastic integral `∫ f(Z(s-)) dZ(s)`,
//! and the predictable characteristics of the pair `(∫ f(Z-) dZ, Z)`.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::coefficients::{default_test_functions, CoefficientTable, TestFunction, TABLE_NODES};
use crate::error::{Error, Result};
use crate::functional::FunctionalF;
use crate::heavy_tail_model::{LevyMeasure, MagnitudeRange, TruncationFn};
use crate::path::StepPath;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpRecord {
    pub time: f64,
    pub size: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum LimitRegime {
    /// α < 1: jumps with `|x| > delta` are simulated, smaller ones are dropped
    /// together with their compensator.
    Direct { delta: f64 },
    /// α ∈ [1, 2): the ε-truncated process, exact in law.
    Truncated { eps: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitPathConfig {
    pub regime: LimitRegime,
    pub horizon: f64,
}

impl LimitPathConfig {
    pub fn direct(delta: f64) -> Self {
        Self {
            regime: LimitRegime::Direct { delta },
            horizon: 1.0,
        }
    }

    pub fn truncated(eps: f64) -> Self {
        Self {
            regime: LimitRegime::Truncated { eps },
            horizon: 1.0,
        }
    }

    /// Smallest simulated jump magnitude.
    pub fn jump_floor(&self) -> f64 {
        match self.regime {
            LimitRegime::Direct { delta } => delta,
            LimitRegime::Truncated { eps } => eps,
        }
    }

    pub fn validate(&self, alpha: f64, h: &TruncationFn) -> Result<()> {
        match self.regime {
            LimitRegime::Direct { .. } if alpha >= 1.0 => {
                return Err(Error::Argument(format!(
                    "direct simulation needs α < 1 (got {alpha}); use the truncated regime"
                )))
            }
            LimitRegime::Truncated { .. } if !(1.0..2.0).contains(&alpha) => {
                return Err(Error::Argument(format!(
                    "truncated regime needs α ∈ [1, 2), got {alpha}"
                )))
            }
            _ => {}
        }
        let floor = self.jump_floor();
        if !(floor > 0.0 && floor < h.inner_radius()) {
            return Err(Error::Argument(format!(
                "jump floor {floor} must lie in (0, {})",
                h.inner_radius()
            )));
        }
        if self.horizon != 1.0 {
            return Err(Error::Argument("paths live on [0, 1]".into()));
        }
        Ok(())
    }
}

/// Variance `t·∫_{|x|<=δ} x² ρ(dx) = t·α/(2-α)·δ^(2-α)` of the compensated
/// small-jump part dropped by the direct regime, at `t = 1`.
pub fn small_jump_variance(alpha: f64, delta: f64) -> f64 {
    alpha / (2.0 - alpha) * delta.powf(2.0 - alpha)
}

/// Reusable simulator: validates the configuration once and caches the
/// compensator drift `∫_{|x|>m} h dρ`.
#[derive(Debug, Clone)]
pub struct LevySimulator {
    measure: LevyMeasure,
    floor: f64,
    drift_rate: f64,
    jump_count: Poisson<f64>,
}

impl LevySimulator {
    pub fn new(measure: &LevyMeasure, cfg: &LimitPathConfig, h: &TruncationFn) -> Result<Self> {
        cfg.validate(measure.alpha(), h)?;
        let floor = cfg.jump_floor();
        let compensator = measure.integrate(|x| h.eval(x), MagnitudeRange::beyond(floor)?)?;
        let mean = cfg.horizon * floor.powf(-measure.alpha());
        let jump_count = Poisson::new(mean)
            .map_err(|e| Error::InvalidParameter(format!("Poisson mean {mean}: {e}")))?;
        Ok(Self {
            measure: *measure,
            floor,
            drift_rate: -compensator,
            jump_count,
        })
    }

    /// `-∫_{|x|>m} h dρ`.
    pub fn drift_rate(&self) -> f64 {
        self.drift_rate
    }

    /// Intensity of simulated jumps, `m^-α`.
    pub fn jump_intensity(&self) -> f64 {
        self.floor.powf(-self.measure.alpha())
    }

    /// Jumps with `|x| > m` on `(0, 1]`, sorted by time.
    pub fn jumps<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<JumpRecord> {
        let count = self.jump_count.sample(rng) as usize;
        let inv_alpha = 1.0 / self.measure.alpha();
        let mut jumps: Vec<JumpRecord> = (0..count)
            .map(|_| {
                let time = 1.0 - rng.random::<f64>();
                let u = 1.0 - rng.random::<f64>();
                let magnitude = self.floor * u.powf(-inv_alpha);
                let size = if rng.random::<f64>() < self.measure.p() {
                    magnitude
                } else {
                    -magnitude
                };
                JumpRecord { time, size }
            })
            .collect();
        jumps.sort_by(|a, b| a.time.total_cmp(&b.time));
        jumps
    }

    pub fn simulate<R: Rng + ?Sized>(&self, rng: &mut R) -> StepPath {
        path_from_jumps(&self.jumps(rng), self.drift_rate)
    }
}

/// Step path with the given jumps plus linear drift; coincident jump times merge.
pub fn path_from_jumps(jumps: &[JumpRecord], drift_rate: f64) -> StepPath {
    let mut times: Vec<f64> = Vec::with_capacity(jumps.len());
    let mut sizes: Vec<f64> = Vec::with_capacity(jumps.len());
    for j in jumps {
        if times.last() == Some(&j.time) {
            *sizes.last_mut().expect("paired with times") += j.size;
        } else {
            times.push(j.time);
            sizes.push(j.size);
        }
    }
    StepPath::from_increments(times, &sizes, 0.0)
        .expect("sorted jump times in (0, 1]")
        .with_drift(drift_rate)
}

pub fn simulate_levy_path<R: Rng + ?Sized>(
    measure: &LevyMeasure,
    cfg: &LimitPathConfig,
    h: &TruncationFn,
    rng: &mut R,
) -> Result<StepPath> {
    Ok(LevySimulator::new(measure, cfg, h)?.simulate(rng))
}

/// `∫_0^t f(X(s-)) dX(s)` for a jump-plus-drift path `X`.
///
/// The output has a breakpoint at every jump time of `X`, at every time in
/// `extra_times` and at `t = 1`. Its increment at breakpoint `τ_k` is
/// `f(X(τ_k-))·ΔX(τ_k) + f(X(τ_{k-1}))·drift·(τ_k - τ_{k-1})`: jumps use left
/// limits, the drift over each inter-breakpoint interval is charged at its
/// left level.
pub fn euler_integral_with<F: Fn(f64) -> f64>(
    path: &StepPath,
    f: F,
    extra_times: &[f64],
) -> Result<StepPath> {
    let mut grid: Vec<f64> = path
        .times()
        .iter()
        .copied()
        .chain(extra_times.iter().copied().filter(|&t| t > 0.0 && t <= 1.0))
        .chain(std::iter::once(1.0))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let (times, values, x0, drift) = (
        path.times(),
        path.values(),
        path.initial_value(),
        path.drift(),
    );
    let mut increments = Vec::with_capacity(grid.len());
    let mut level = x0; // step level on [prev, τ)
    let mut prev = 0.0;
    let mut j = 0usize;
    for &tau in &grid {
        let mut dy = 0.0;
        if drift != 0.0 {
            dy += f(level + drift * prev) * drift * (tau - prev);
        }
        if j < times.len() && times[j] == tau {
            let left = level + drift * tau;
            dy += f(left) * (values[j] - level);
            level = values[j];
            j += 1;
        }
        increments.push(dy);
        prev = tau;
    }
    StepPath::from_increments(grid, &increments, 0.0)
}

pub fn euler_stochastic_integral(path: &StepPath, f: &FunctionalF) -> Result<StepPath> {
    euler_integral_with(path, |x| f.eval(x), &[])
}

/// Characteristics of `(Y, S)` sampled on a time grid: `b1` drift of `Y`,
/// `c11`, `c12`, `c22` quadratic characteristics, and compensator integrals
/// `∫_0^t ∫ g dν` for each probe `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharTriplet {
    pub grid: Vec<f64>,
    pub b1: Vec<f64>,
    pub c11: Vec<f64>,
    pub c12: Vec<f64>,
    pub c22: Vec<f64>,
    pub nu_test_integrals: BTreeMap<String, Vec<f64>>,
}

/// Largest absolute gap between two triplets over their common grid.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CharGaps {
    pub b1: f64,
    pub c11: f64,
    pub c12: f64,
    pub c22: f64,
}

fn sup_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

impl CharTriplet {
    pub fn sup_gaps(&self, other: &CharTriplet) -> Result<CharGaps> {
        if self.grid != other.grid {
            return Err(Error::Argument(
                "characteristics sampled on different grids".into(),
            ));
        }
        Ok(CharGaps {
            b1: sup_abs_diff(&self.b1, &other.b1),
            c11: sup_abs_diff(&self.c11, &other.c11),
            c12: sup_abs_diff(&self.c12, &other.c12),
            c22: sup_abs_diff(&self.c22, &other.c22),
        })
    }

    /// Gaps restricted to grid points `<= t`.
    pub fn sup_gaps_until(&self, other: &CharTriplet, t: f64) -> Result<CharGaps> {
        if self.grid != other.grid {
            return Err(Error::Argument(
                "characteristics sampled on different grids".into(),
            ));
        }
        let k = self.grid.partition_point(|&s| s <= t);
        Ok(CharGaps {
            b1: sup_abs_diff(&self.b1[..k], &other.b1[..k]),
            c11: sup_abs_diff(&self.c11[..k], &other.c11[..k]),
            c12: sup_abs_diff(&self.c12[..k], &other.c12[..k]),
            c22: sup_abs_diff(&self.c22[..k], &other.c22[..k]),
        })
    }

    /// `c11`, `c22` nondecreasing and `|c12| <= sqrt(c11 c22)`, up to `tol`.
    pub fn satisfies_invariants(&self, tol: f64) -> bool {
        let monotone = |v: &[f64]| v.windows(2).all(|w| w[1] >= w[0] - tol);
        let nonneg = |v: &[f64]| v.iter().all(|&x| x >= -tol);
        monotone(&self.c11)
            && monotone(&self.c22)
            && nonneg(&self.c11)
            && nonneg(&self.c22)
            && self
                .c12
                .iter()
                .zip(self.c11.iter().zip(&self.c22))
                .all(|(c12, (c11, c22))| c12.abs() <= (c11.max(0.0) * c22.max(0.0)).sqrt() + tol)
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::Argument("time grid must lie in [0, 1]".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Argument(
            "time grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `{i/m : i = 1..=m}`.
pub fn uniform_grid(m: usize) -> Vec<f64> {
    (1..=m).map(|i| i as f64 / m as f64).collect()
}

pub(crate) fn table_bound(f: &FunctionalF) -> f64 {
    if f.bound() > 0.0 {
        f.bound()
    } else {
        1.0
    }
}

/// Tabulated limit coefficients for one `(ρ, h, f)`:
/// `u ↦ ∫(h(ux) - u h(x)) ρ(dx)`, `u ↦ ∫ h²(ux) ρ(dx)`, `u ↦ ∫ h(ux) h(x) ρ(dx)`.
#[derive(Debug, Clone)]
pub struct LimitCoefficients {
    f: FunctionalF,
    drift: CoefficientTable,
    quad11: CoefficientTable,
    quad12: CoefficientTable,
    quad22_rate: f64,
    probes: Vec<(TestFunction, f64)>,
}

impl LimitCoefficients {
    pub fn new(measure: &LevyMeasure, h: &TruncationFn, f: &FunctionalF) -> Result<Self> {
        let (alpha, bound, full) = (measure.alpha(), table_bound(f), MagnitudeRange::full());
        let drift = CoefficientTable::build(bound, alpha, TABLE_NODES, |u| {
            measure.integrate_breaks(|x| h.eval(u * x) - u * h.eval(x), full, &h.scaled_kinks(u))
        })?
        .with_origin(0.0);
        let quad11 = CoefficientTable::build(bound, alpha, TABLE_NODES, |u| {
            measure.integrate_breaks(|x| h.eval(u * x).powi(2), full, &h.scaled_kinks(u))
        })?
        .with_origin(0.0);
        let quad12 = CoefficientTable::build(bound, alpha, TABLE_NODES, |u| {
            measure.integrate_breaks(|x| h.eval(u * x) * h.eval(x), full, &h.scaled_kinks(u))
        })?
        .with_origin(0.0);
        let quad22_rate = measure.integrate(|x| h.eval(x).powi(2), full)?;
        let probes = default_test_functions()
            .into_iter()
            .map(|g| Ok((g, measure.integrate(|x| g.eval(x), full)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            f: *f,
            drift,
            quad11,
            quad12,
            quad22_rate,
            probes,
        })
    }

    pub fn drift_coefficient(&self, u: f64) -> Result<f64> {
        self.drift.eval(u)
    }

    pub fn c11_coefficient(&self, u: f64) -> Result<f64> {
        self.quad11.eval(u)
    }

    pub fn c12_coefficient(&self, u: f64) -> Result<f64> {
        self.quad12.eval(u)
    }

    /// `∫ h² dρ`.
    pub fn c22_rate(&self) -> f64 {
        self.quad22_rate
    }

    /// Limit characteristics evaluated along `z` (the `∘ S_n` composition
    /// when `z` is a pre-limit path): the level `u = f(z(s-))` is frozen
    /// between consecutive breakpoints of `z` and of the grid.
    pub fn characteristics(&self, z: &StepPath, grid: &[f64]) -> Result<CharTriplet> {
        check_grid(grid)?;
        let mut cuts: Vec<f64> = z.times().iter().chain(grid.iter()).copied().collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

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
        let mut start = 0.0;
        let mut next_grid = 0usize;
        // A grid point at 0 sees empty integrals.
        while next_grid < m && grid[next_grid] <= 0.0 {
            out.b1.push(0.0);
            out.c11.push(0.0);
            out.c12.push(0.0);
            next_grid += 1;
        }
        for &cut in &cuts {
            if next_grid == m {
                break;
            }
            if cut > start {
                let u = self.f.eval(z.value_at(start));
                let dt = cut - start;
                b1 += self.drift.eval(u)? * dt;
                c11 += self.quad11.eval(u)? * dt;
                c12 += self.quad12.eval(u)? * dt;
                start = cut;
            }
            if grid[next_grid] == cut {
                out.b1.push(b1);
                out.c11.push(c11);
                out.c12.push(c12);
                next_grid += 1;
            }
        }
        out.c22 = grid.iter().map(|t| t * self.quad22_rate).collect();
        for (g, mass) in &self.probes {
            out.nu_test_integrals
                .insert(g.to_string(), grid.iter().map(|t| t * mass).collect());
        }
        Ok(out)
    }
}

pub fn limit_characteristics(
    measure: &LevyMeasure,
    z_path: &StepPath,
    f: &FunctionalF,
    h: &TruncationFn,
    grid: &[f64],
) -> Result<CharTriplet> {
    LimitCoefficients::new(measure, h, f)?.characteristics(z_path, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::FunctionalTag;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn regime_gates() {
        let h = TruncationFn::taper();
        assert!(LimitPathConfig::direct(1e-3).validate(0.8, &h).is_ok());
        assert!(LimitPathConfig::direct(1e-3).validate(1.2, &h).is_err());
        assert!(LimitPathConfig::truncated(0.1).validate(0.8, &h).is_err());
        assert!(LimitPathConfig::truncated(0.1).validate(1.2, &h).is_ok());
        assert!(LimitPathConfig::truncated(0.5).validate(1.2, &h).is_err());
        assert!(LimitPathConfig::direct(0.6).validate(0.5, &h).is_err());
    }

    #[test]
    fn paths_start_at_zero() {
        let h = TruncationFn::taper();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = LevyMeasure::new(0.7, 0.3).unwrap();
        let p = simulate_levy_path(&rho, &LimitPathConfig::direct(1e-3), &h, &mut rng).unwrap();
        assert_eq!(p.value_at(0.0), 0.0);
        let rho = LevyMeasure::new(1.5, 0.3).unwrap();
        let p = simulate_levy_path(&rho, &LimitPathConfig::truncated(0.2), &h, &mut rng).unwrap();
        assert_eq!(p.value_at(0.0), 0.0);
    }

    #[test]
    fn one_sided_jump_part_is_nondecreasing() {
        let h = TruncationFn::taper();
        let rho = LevyMeasure::new(0.5, 1.0).unwrap();
        let sim = LevySimulator::new(&rho, &LimitPathConfig::direct(1e-4), &h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let p = sim.simulate(&mut rng);
            assert!(p.values().windows(2).all(|w| w[1] >= w[0]));
            assert!(p.values().first().is_none_or(|&v| v > 0.0));
        }
    }

    #[test]
    fn large_jump_counts_are_poisson() {
        let h = TruncationFn::taper();
        let rho = LevyMeasure::new(1.2, 0.6).unwrap();
        let sim = LevySimulator::new(&rho, &LimitPathConfig::truncated(0.1), &h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let paths = 10_000;
        let total: usize = (0..paths)
            .map(|_| {
                sim.jumps(&mut rng)
                    .iter()
                    .filter(|j| j.size.abs() > 0.5)
                    .count()
            })
            .sum();
        let mean = 0.5f64.powf(-1.2);
        let empirical = total as f64 / paths as f64;
        let sigma = (mean / paths as f64).sqrt();
        assert!(
            (empirical - mean).abs() < 3.0 * sigma,
            "{empirical} vs {mean}"
        );
    }

    #[test]
    fn drift_matches_compensator() {
        let h = TruncationFn::taper();
        let rho = LevyMeasure::new(1.2, 0.5).unwrap();
        let sim = LevySimulator::new(&rho, &LimitPathConfig::truncated(0.1), &h).unwrap();
        assert!(sim.drift_rate().abs() < 1e-10);
        assert!((sim.jump_intensity() - 0.1f64.powf(-1.2)).abs() < 1e-9);
    }

    #[test]
    fn small_jump_budget() {
        let v = small_jump_variance(0.8, 1e-4);
        assert!(v < (0.1 * 0.0364f64).powi(2));
    }

    #[test]
    fn euler_identity_integrand() {
        let path = StepPath::new(vec![0.2, 0.55, 0.9], vec![1.0, -0.5, 2.0], 0.0).unwrap();
        let out = euler_integral_with(&path, |_| 1.0, &[]).unwrap();
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!((out.value_at(t) - (path.value_at(t) - path.value_at(0.0))).abs() < 1e-15);
        }
        let drifting = path.clone().with_drift(-0.7);
        let out = euler_integral_with(&drifting, |_| 1.0, &[0.5]).unwrap();
        for &t in &[0.2, 0.5, 0.55, 0.9, 1.0] {
            assert!(
                (out.value_at(t) - drifting.value_at(t)).abs() < 1e-12,
                "t={t}"
            );
        }
    }

    #[test]
    fn euler_single_jump_uses_left_limit() {
        let f = FunctionalF::new(FunctionalTag::Cosine).unwrap();
        let path = StepPath::new(vec![0.4], vec![2.5], 0.0).unwrap();
        let out = euler_stochastic_integral(&path, &f).unwrap();
        assert_eq!(out.terminal(), 1.0 * 2.5);
    }

    #[test]
    fn euler_two_jumps_clamped_identity() {
        let f = FunctionalF::new(FunctionalTag::ClampedIdentity(5.0)).unwrap();
        let path = StepPath::new(vec![0.3, 0.7], vec![1.0, 3.0], 0.0).unwrap();
        let out = euler_stochastic_integral(&path, &f).unwrap();
        assert_eq!(out.terminal(), 2.0);
        assert_eq!(out.value_at(0.5), 0.0);
    }

    #[test]
    fn euler_drift_is_charged_at_left_level() {
        let f = FunctionalF::new(FunctionalTag::ClampedIdentity(10.0)).unwrap();
        let path = StepPath::new(vec![0.5], vec![1.0], 0.0)
            .unwrap()
            .with_drift(2.0);
        let out = euler_stochastic_integral(&path, &f).unwrap();
        // [0, 0.5): level 0 -> 0; jump at 0.5 with left limit 1.0 -> 1·1;
        // (0.5, 1]: left level 1 + 2·0.5 = 2 -> 2·2·0.5
        assert!((out.terminal() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn limit_characteristics_trivial_integrands() {
        let rho = LevyMeasure::new(0.8, 0.7).unwrap();
        let h = TruncationFn::taper();
        let path = StepPath::new(vec![0.1, 0.6], vec![0.4, -1.3], 0.0).unwrap();
        let grid = uniform_grid(10);
        let one = FunctionalF::new(FunctionalTag::Constant(1.0)).unwrap();
        let tri = limit_characteristics(&rho, &path, &one, &h, &grid).unwrap();
        assert!(tri.b1.iter().all(|b| b.abs() < 1e-10));
        let zero = FunctionalF::new(FunctionalTag::Constant(0.0)).unwrap();
        let tri = limit_characteristics(&rho, &path, &zero, &h, &grid).unwrap();
        assert!(tri
            .b1
            .iter()
            .chain(&tri.c11)
            .chain(&tri.c12)
            .all(|v| v.abs() < 1e-10));
        assert!(tri.c22[9] > 0.0);
    }

    #[test]
    fn c22_slope_at_alpha_one() {
        let rho = LevyMeasure::new(1.0, 0.5).unwrap();
        let h = TruncationFn::taper();
        let coeffs = LimitCoefficients::new(&rho, &h, &FunctionalF::sine()).unwrap();
        let exact = 2.0 - 2.0 * std::f64::consts::LN_2;
        assert!((coeffs.c22_rate() - exact).abs() < 1e-10);
        let tri = coeffs
            .characteristics(&StepPath::constant(0.0), &[0.25, 0.5, 1.0])
            .unwrap();
        assert!((tri.c22[1] - 0.5 * exact).abs() < 1e-10);
        assert!(tri.satisfies_invariants(1e-12));
    }

    #[test]
    fn tables_match_direct_quadrature() {
        // Also checks the scale-invariance closed form ∫ h²(ux) ρ(dx) = |u|^α ∫ h² dρ.
        let rho = LevyMeasure::new(0.8, 0.7).unwrap();
        let h = TruncationFn::taper();
        let f = FunctionalF::sine();
        let coeffs = LimitCoefficients::new(&rho, &h, &f).unwrap();
        let full = MagnitudeRange::full();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let u: f64 = rng.random_range(-1.0..1.0);
            let direct_b = rho
                .integrate_breaks(|x| h.eval(u * x) - u * h.eval(x), full, &h.scaled_kinks(u))
                .unwrap();
            let direct_11 = u.abs().powf(0.8) * coeffs.c22_rate();
            let direct_12 = rho
                .integrate_breaks(|x| h.eval(u * x) * h.eval(x), full, &h.scaled_kinks(u))
                .unwrap();
            assert!(
                (coeffs.drift_coefficient(u).unwrap() - direct_b).abs() < 1e-8,
                "u={u}"
            );
            assert!(
                (coeffs.c11_coefficient(u).unwrap() - direct_11).abs() < 1e-8,
                "u={u}"
            );
            assert!(
                (coeffs.c12_coefficient(u).unwrap() - direct_12).abs() < 1e-8,
                "u={u}"
            );
        }
    }

    #[test]
    fn limit_triplet_invariants_along_random_paths() {
        let rho = LevyMeasure::new(0.8, 0.7).unwrap();
        let h = TruncationFn::taper();
        let f = FunctionalF::sine();
        let coeffs = LimitCoefficients::new(&rho, &h, &f).unwrap();
        let sim = LevySimulator::new(&rho, &LimitPathConfig::direct(1e-3), &h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let z = sim.simulate(&mut rng);
            let tri = coeffs.characteristics(&z, &uniform_grid(50)).unwrap();
            assert!(tri.satisfies_invariants(1e-10));
        }
    }
}
