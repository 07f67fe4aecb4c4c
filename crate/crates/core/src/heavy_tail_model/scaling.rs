use serde::{Deserialize, Serialize};

use super::law::TailLaw;
use super::truncation::TruncationFn;
use crate::error::{Error, Result};

/// Normalizer and centering for one sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingConstants {
    pub n: usize,
    pub b_n: f64,
    pub c_n: f64,
}

impl ScalingConstants {
    pub fn for_law(law: &TailLaw, n: usize, h: &TruncationFn) -> Result<Self> {
        Ok(Self {
            n,
            b_n: normalizer_bn(law, n)?,
            c_n: centering_cn(law, n, h)?,
        })
    }

    /// Same normalizer with the centering dropped.
    pub fn uncentered(self) -> Self {
        Self { c_n: 0.0, ..self }
    }
}

/// `b_n = inf{x > 0 : n P(|X| > x) < 1} = n^(1/α)` for the floor-1 Pareto law.
pub fn normalizer_bn(law: &TailLaw, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    Ok((n as f64).powf(1.0 / law.alpha()))
}

/// Tail-quantile normalizer `inf{x > 0 : n·abs_tail(x) < 1}` for a law given
/// only by its (non-increasing) absolute tail, by bisection on `log x`.
/// Agrees with the `<= 1` form wherever the tail is strictly decreasing, and
/// gives the support floor rather than 0 at `n = 1`.
pub fn quantile_normalizer<T: Fn(f64) -> f64>(n: usize, abs_tail: T) -> Result<f64> {
    if n == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    let target = 1.0 / n as f64;
    let (mut lo, mut hi) = (-700.0f64, 0.0f64);
    while abs_tail(hi.exp()) >= target {
        hi += 10.0;
        if hi > 700.0 {
            return Err(Error::Domain("tail never drops below 1/n".into()));
        }
    }
    if abs_tail(lo.exp()) < target {
        return Ok(0.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if abs_tail(mid.exp()) < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.exp())
}

/// `c_n = E[h(X_1 / b_n)]`, by adaptive quadrature (absolute tolerance 1e-10).
pub fn centering_cn(law: &TailLaw, n: usize, h: &TruncationFn) -> Result<f64> {
    let b_n = normalizer_bn(law, n)?;
    law.expect_scaled(|y| h.eval(y), b_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heavy_tail_model::TailSide;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn normalizer_examples() {
        let law = TailLaw::new(0.5, 0.5).unwrap();
        assert_eq!(normalizer_bn(&law, 1).unwrap(), 1.0);
        assert!((normalizer_bn(&law, 100).unwrap() - 10_000.0).abs() < 1e-9);
        assert!(normalizer_bn(&law, 0).is_err());
        let mut prev = 0.0;
        for n in 1..2000 {
            let b = normalizer_bn(&law, n).unwrap();
            assert!(b > prev);
            prev = b;
        }
    }

    #[test]
    fn normalizer_matches_root_find() {
        for &alpha in &[0.5, 0.8, 1.2, 1.9] {
            let law = TailLaw::new(alpha, 0.3).unwrap();
            for &n in &[1usize, 7, 100, 12_345] {
                let tail = |x: f64| {
                    if x < 1.0 {
                        1.0
                    } else {
                        law.tail_prob(x, TailSide::Absolute).unwrap()
                    }
                };
                let root = quantile_normalizer(n, tail).unwrap();
                let closed = normalizer_bn(&law, n).unwrap();
                assert!(
                    (root - closed).abs() <= 1e-9 * closed,
                    "alpha={alpha} n={n}"
                );
                assert!(
                    (n as f64 * law.tail_prob(closed, TailSide::Absolute).unwrap() - 1.0).abs()
                        < 1e-12
                );
            }
        }
    }

    #[test]
    fn centering_vanishes_for_symmetric_law_and_for_n_one() {
        let h = TruncationFn::taper();
        let sym = TailLaw::new(0.7, 0.5).unwrap();
        assert!(centering_cn(&sym, 1000, &h).unwrap().abs() < 1e-10);
        let skew = TailLaw::new(0.7, 0.9).unwrap();
        assert!(centering_cn(&skew, 1, &h).unwrap().abs() < 1e-10);
        assert!(centering_cn(&skew, 1, &TruncationFn::hard()).unwrap().abs() < 1e-10);
    }

    /// Closed form of `(p - q)/n ∫_{1/b}^{1} h(y) α y^(-α-1) dy` for the taper, α ≠ 1.
    fn taper_centering_closed_form(alpha: f64, p: f64, n: usize) -> f64 {
        let b = (n as f64).powf(1.0 / alpha);
        let lo = 1.0 / b;
        let prim = |y: f64, e: f64| y.powf(e) / e;
        let identity_part = if lo < 0.5 {
            alpha * (prim(0.5, 1.0 - alpha) - prim(lo, 1.0 - alpha))
        } else {
            0.0
        };
        let start = lo.max(0.5);
        let ramp_part = if start < 1.0 {
            alpha
                * ((prim(1.0, -alpha) - prim(start, -alpha))
                    - (prim(1.0, 1.0 - alpha) - prim(start, 1.0 - alpha)))
        } else {
            0.0
        };
        (2.0 * p - 1.0) / n as f64 * (identity_part + ramp_part)
    }

    #[test]
    fn centering_matches_closed_form() {
        let h = TruncationFn::taper();
        for &(alpha, p) in &[(0.5, 1.0), (0.8, 0.7), (1.5, 0.2)] {
            let law = TailLaw::new(alpha, p).unwrap();
            for &n in &[2usize, 10, 100, 10_000] {
                let c = centering_cn(&law, n, &h).unwrap();
                let exact = taper_centering_closed_form(alpha, p, n);
                assert!(
                    (c - exact).abs() < 1e-10,
                    "alpha={alpha} n={n}: {c} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn centering_matches_monte_carlo() {
        let law = TailLaw::new(0.5, 1.0).unwrap();
        let h = TruncationFn::taper();
        let n = 100;
        let b = normalizer_bn(&law, n).unwrap();
        let c = centering_cn(&law, n, &h).unwrap();
        assert!(c > 0.0 && c < 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let draws = 10_000_000;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..draws {
            let v = h.eval(law.sample(&mut rng) / b);
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / draws as f64;
        let sd = ((sum_sq / draws as f64 - mean * mean) / draws as f64).sqrt();
        assert!((mean - c).abs() < 3.0 * sd, "{mean} vs {c} (sd {sd})");
    }

    #[test]
    fn centering_is_non_increasing_in_n() {
        let law = TailLaw::new(0.5, 1.0).unwrap();
        let h = TruncationFn::taper();
        let cs: Vec<f64> = [10, 100, 1000, 10_000]
            .iter()
            .map(|&n| centering_cn(&law, n, &h).unwrap().abs())
            .collect();
        assert!(cs.windows(2).all(|w| w[1] <= w[0]), "{cs:?}");
    }

    #[test]
    fn scaling_identity_is_exact() {
        for &alpha in &[0.5, 1.0, 1.5] {
            let law = TailLaw::new(alpha, 0.7).unwrap();
            let rho = law.limit_measure();
            for &n in &[3usize, 100, 10_000] {
                let b = normalizer_bn(&law, n).unwrap();
                for &x in &[0.5, 1.0, 3.7, 10.0] {
                    if b * x < 1.0 {
                        continue;
                    }
                    let pre = n as f64 * law.tail_prob(b * x, TailSide::Positive).unwrap();
                    let lim = rho.tail(x, TailSide::Positive).unwrap();
                    assert!((pre - lim).abs() <= 1e-12 * lim);
                }
            }
        }
    }
}
