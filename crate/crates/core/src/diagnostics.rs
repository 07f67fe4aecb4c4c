//! Distribution-level comparisons at fixed times: two-sample Kolmogorov–Smirnov,
//! empirical characteristic functions, the Hill tail-index estimator and QQ pairs.

use std::fmt;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Significance level of the KS gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub enum KsLevel {
    P05,
    #[default]
    P01,
}

impl KsLevel {
    /// Asymptotic Kolmogorov critical value `c(level)`.
    pub fn critical_value(self) -> f64 {
        match self {
            Self::P05 => 1.358,
            Self::P01 => 1.628,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Self::P05 => 0.05,
            Self::P01 => 0.01,
        }
    }

    /// `c(level) sqrt((n_a + n_b) / (n_a n_b))`.
    pub fn threshold(self, n_a: usize, n_b: usize) -> f64 {
        let (na, nb) = (n_a as f64, n_b as f64);
        self.critical_value() * ((na + nb) / (na * nb)).sqrt()
    }
}

impl TryFrom<f64> for KsLevel {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        if v == 0.05 {
            Ok(Self::P05)
        } else if v == 0.01 {
            Ok(Self::P01)
        } else {
            Err(Error::Config(format!(
                "KS level must be 0.05 or 0.01, got {v}"
            )))
        }
    }
}

impl From<KsLevel> for f64 {
    fn from(level: KsLevel) -> f64 {
        level.as_f64()
    }
}

impl fmt::Display for KsLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_f64())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn sorted_copy(xs: &[f64], what: &str) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::Argument(format!("{what} is empty")));
    }
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::Argument(format!("{what} contains NaN")));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `sup_x |F_a(x) - F_b(x)|` for two sorted samples. Ties across samples
/// are consumed together, so the ECDFs are compared only at jump points.
fn ks_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

pub fn ks_two_sample(a: &[f64], b: &[f64], level: KsLevel) -> Result<KsResult> {
    let a = sorted_copy(a, "first sample")?;
    let b = sorted_copy(b, "second sample")?;
    let statistic = ks_sorted(&a, &b);
    let threshold = level.threshold(a.len(), b.len());
    Ok(KsResult {
        statistic,
        threshold,
        pass: statistic < threshold,
    })
}

/// Permutation p-value of the KS statistic, `(1 + #{D* >= D}) / (1 + rounds)`.
/// Meant for small samples where the asymptotic threshold is unreliable.
pub fn ks_permutation_pvalue<R: Rng + ?Sized>(
    a: &[f64],
    b: &[f64],
    rounds: usize,
    rng: &mut R,
) -> Result<f64> {
    let sa = sorted_copy(a, "first sample")?;
    let sb = sorted_copy(b, "second sample")?;
    let observed = ks_sorted(&sa, &sb);
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut hits = 0usize;
    for _ in 0..rounds {
        pooled.shuffle(rng);
        let (mut x, mut y) = (pooled[..a.len()].to_vec(), pooled[a.len()..].to_vec());
        x.sort_by(f64::total_cmp);
        y.sort_by(f64::total_cmp);
        if ks_sorted(&x, &y) >= observed {
            hits += 1;
        }
    }
    Ok((1 + hits) as f64 / (1 + rounds) as f64)
}

fn ecf(xs: &[f64], u: f64) -> Complex64 {
    let sum: Complex64 = xs.iter().map(|&x| Complex64::cis(u * x)).sum();
    sum / xs.len() as f64
}

/// `max_u |φ_a(u) - φ_b(u)|` over the grid, `φ` the empirical characteristic function.
pub fn ecf_distance(a: &[f64], b: &[f64], u_grid: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() || u_grid.is_empty() {
        return Err(Error::Argument(
            "ECF distance needs nonempty samples and grid".into(),
        ));
    }
    Ok(u_grid
        .iter()
        .map(|&u| (ecf(a, u) - ecf(b, u)).norm())
        .fold(0.0, f64::max))
}

/// Default ECF grid `u = 0.1, 0.2, ..., 2.0`.
pub fn default_ecf_grid() -> Vec<f64> {
    (1..=20).map(|i| i as f64 / 10.0).collect()
}

/// Hill estimator from the `k` largest magnitudes.
pub fn hill_estimate(samples: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k >= samples.len() {
        return Err(Error::Argument(format!(
            "Hill needs 1 <= k < {} samples, got k = {k}",
            samples.len()
        )));
    }
    let mut mags: Vec<f64> = samples
        .iter()
        .map(|x| x.abs())
        .filter(|x| *x > 0.0)
        .collect();
    mags.sort_by(|x, y| y.total_cmp(x));
    let mut distinct = mags.clone();
    distinct.dedup();
    if distinct.len() < k + 1 {
        return Err(Error::Domain(format!(
            "Hill with k = {k} needs at least {} distinct positive magnitudes, found {}",
            k + 1,
            distinct.len()
        )));
    }
    let anchor = mags[k].ln();
    let spacing: f64 = mags[..k].iter().map(|x| x.ln() - anchor).sum();
    if !(spacing > 0.0) {
        return Err(Error::Domain("Hill log-spacings sum to zero".into()));
    }
    Ok(k as f64 / spacing)
}

/// Type-7 empirical quantile of a sorted sample.
pub fn quantile_sorted(sorted: &[f64], level: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * level;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Matched quantiles of `a` and `b` at levels `j/(m+1)`, `j = 1..m`.
pub fn qq_points(a: &[f64], b: &[f64], m: usize) -> Result<Vec<(f64, f64)>> {
    if m < 2 {
        return Err(Error::Argument(format!(
            "need at least 2 quantiles, got {m}"
        )));
    }
    let a = sorted_copy(a, "first sample")?;
    let b = sorted_copy(b, "second sample")?;
    Ok((1..=m)
        .map(|j| {
            let level = j as f64 / (m + 1) as f64;
            (quantile_sorted(&a, level), quantile_sorted(&b, level))
        })
        .collect())
}
