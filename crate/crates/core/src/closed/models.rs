//! Two reference random-variable models with factorially decaying
//! pseudo-moments: the constant-plus-oscillation circle model (moments
//! exactly 2^-k) and the product model Z = X e^{iT} with a cosine-series
//! density for T.

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{factorial, rat_int, Rational};
use crate::error::{Error, Result};
use num::ToPrimitive;

/// Pseudo-moments of X(t) = sum a_n e^{int} + 1/2 with t uniform: exactly 2^-k.
pub fn circle_rv_moment(k: u32) -> Rational {
    rat_int(1) / Rational::from(num::BigInt::from(2u64).pow(k))
}

#[derive(Debug, Clone)]
pub struct CircleMc {
    pub k: u32,
    pub empirical: Complex64,
    pub analytic: f64,
    pub std_err: f64,
}

/// Monte Carlo confirmation of the circle model with coefficients a_n = 2^-n.
/// Counter-based generator: one (seed, samples) pair gives one result,
/// independent of threading.
pub fn circle_rv_mc(k_max: u32, samples: u64, seed: u64) -> Vec<CircleMc> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = (1..=40).map(|n| 0.5f64.powi(n)).collect();
    let mut sums = vec![Complex64::new(0.0, 0.0); k_max as usize + 1];
    let mut sq = vec![0.0f64; k_max as usize + 1];
    for _ in 0..samples {
        let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let mut x = Complex64::new(0.5, 0.0);
        for (n, &a) in coeffs.iter().enumerate() {
            x += a * Complex64::from_polar(1.0, (n as f64 + 1.0) * t);
        }
        let mut p = Complex64::new(1.0, 0.0);
        for k in 0..=k_max as usize {
            sums[k] += p;
            sq[k] += p.norm_sqr();
            p *= x;
        }
    }
    let n = samples as f64;
    (0..=k_max)
        .map(|k| {
            let mean = sums[k as usize] / n;
            let var = (sq[k as usize] / n - mean.norm_sqr()).max(0.0);
            CircleMc {
                k,
                empirical: mean,
                analytic: 0.5f64.powi(k as i32),
                std_err: (var / n).sqrt(),
            }
        })
        .collect()
}

/// Configuration for the product model: X lognormal scaled to `mean_x`
/// (truncated at the 1e-12 upper quantile), a_n = 1/((n+1)! mean_x^n).
#[derive(Debug, Clone)]
pub struct WasilewskiConfig {
    pub k_max: u32,
    pub mean_x: f64,
    pub sigma: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Default for WasilewskiConfig {
    fn default() -> Self {
        WasilewskiConfig { k_max: 6, mean_x: 2.0, sigma: 0.5, samples: 1_000_000, seed: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct WasilewskiMoment {
    pub k: u32,
    pub empirical: Complex64,
    /// a_k E[X^k] with the truncated-lognormal moment
    pub analytic: f64,
    pub std_err_re: f64,
    pub std_err_im: f64,
}

/// Sample Z = X e^{iT}, T drawn by rejection from the density
/// (1 + 2 sum a_n cos nt) / 2pi, and report empirical vs analytic moments.
pub fn wasilewski_moments(cfg: &WasilewskiConfig) -> Result<Vec<WasilewskiMoment>> {
    // a_n = 1/((n+1)! mean_x^n), truncated where negligible
    let mut a = Vec::new();
    for n in 1..=24u64 {
        let v = 1.0 / (factorial(n + 1).to_f64().unwrap() * cfg.mean_x.powi(n as i32));
        if v < 1e-18 {
            break;
        }
        a.push(v);
    }
    let a_sum2: f64 = 2.0 * a.iter().sum::<f64>();
    if a_sum2 >= 1.0 {
        return Err(Error::InvalidDensity(a_sum2));
    }

    let density = |t: f64| {
        let mut s = 1.0;
        for (n, &an) in a.iter().enumerate() {
            s += 2.0 * an * ((n as f64 + 1.0) * t).cos();
        }
        s / std::f64::consts::TAU
    };
    let p_max = (1.0 + a_sum2) / std::f64::consts::TAU;

    // lognormal with E[X] = mean_x: mu = log(mean_x) - sigma^2/2
    let mu = cfg.mean_x.ln() - cfg.sigma * cfg.sigma / 2.0;
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let z_hi = std_normal.inverse_cdf(1.0 - 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let kk = cfg.k_max as usize;
    let mut sums = vec![Complex64::new(0.0, 0.0); kk + 1];
    let mut sq_re = vec![0.0f64; kk + 1];
    let mut sq_im = vec![0.0f64; kk + 1];
    for _ in 0..cfg.samples {
        let t = loop {
            let cand: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let u: f64 = rng.gen_range(0.0..1.0);
            if u * p_max <= density(cand) {
                break cand;
            }
        };
        let z_std: f64 = loop {
            let z: f64 = StandardNormal.sample(&mut rng);
            if z <= z_hi {
                break z;
            }
        };
        let x = (mu + cfg.sigma * z_std).exp();
        let z = Complex64::from_polar(x, t);
        let mut p = Complex64::new(1.0, 0.0);
        for k in 0..=kk {
            sums[k] += p;
            sq_re[k] += p.re * p.re;
            sq_im[k] += p.im * p.im;
            p *= z;
        }
    }

    let n = cfg.samples as f64;
    let phi_hi = std_normal.cdf(z_hi);
    Ok((0..=cfg.k_max)
        .map(|k| {
            let mean = sums[k as usize] / n;
            let var_re = (sq_re[k as usize] / n - mean.re * mean.re).max(0.0);
            let var_im = (sq_im[k as usize] / n - mean.im * mean.im).max(0.0);
            // truncated-lognormal moment: E[X^k] Phi(z_hi - k sigma)/Phi(z_hi)
            let ex_k = (k as f64 * mu + (k as f64 * cfg.sigma).powi(2) / 2.0).exp()
                * std_normal.cdf(z_hi - k as f64 * cfg.sigma)
                / phi_hi;
            let a_k = if k == 0 {
                1.0
            } else {
                1.0 / (factorial(k as u64 + 1).to_f64().unwrap() * cfg.mean_x.powi(k as i32))
            };
            WasilewskiMoment {
                k,
                empirical: mean,
                analytic: a_k * ex_k,
                std_err_re: (var_re / n).sqrt(),
                std_err_im: (var_im / n).sqrt(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed::rat;

    #[test]
    fn circle_moments_exact() {
        assert_eq!(circle_rv_moment(0), rat(1, 1));
        assert_eq!(circle_rv_moment(3), rat(1, 8));
        assert_eq!(circle_rv_moment(10), rat(1, 1024));
    }

    #[test]
    fn circle_mc_within_three_sigma() {
        let rows = circle_rv_mc(4, 200_000, 17);
        for r in &rows {
            let dev = (r.empirical.re - r.analytic).abs();
            assert!(
                dev <= 3.0 * r.std_err.max(1e-12),
                "k = {}: dev {dev:.2e} > 3 se {:.2e}",
                r.k,
                r.std_err
            );
            assert!(r.empirical.im.abs() <= 3.0 * r.std_err.max(1e-12));
        }
    }

    #[test]
    fn density_validity_guard() {
        // mean_x = 1 makes 2 sum a_n = 2(e - 2) > 1: rejected
        let cfg = WasilewskiConfig { mean_x: 1.0, samples: 10, ..Default::default() };
        assert!(matches!(wasilewski_moments(&cfg), Err(Error::InvalidDensity(_))));
    }

    #[test]
    fn zeroth_moment_is_one() {
        let cfg = WasilewskiConfig { samples: 20_000, ..Default::default() };
        let rows = wasilewski_moments(&cfg).unwrap();
        assert!((rows[0].empirical.re - 1.0).abs() < 1e-12);
        assert!((rows[0].analytic - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_model_matches_analytic_within_three_se() {
        let cfg = WasilewskiConfig { samples: 400_000, seed: 5, ..Default::default() };
        let rows = wasilewski_moments(&cfg).unwrap();
        for r in rows.iter().skip(1) {
            let dev = (r.empirical.re - r.analytic).abs();
            assert!(
                dev <= 3.0 * r.std_err_re,
                "k = {}: dev {dev:.3e} > 3 se {:.3e}",
                r.k,
                r.std_err_re
            );
            assert!(r.empirical.im.abs() <= 3.0 * r.std_err_im, "k = {}", r.k);
        }
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let cfg = WasilewskiConfig { samples: 5_000, seed: 99, ..Default::default() };
        let a = wasilewski_moments(&cfg).unwrap();
        let b = wasilewski_moments(&cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.empirical, y.empirical);
        }
    }
}
