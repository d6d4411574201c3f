//! Exact and semi-exact closed forms: factorial-binomial moment sums, simplex
//! integrals, mean-square integrals, the zero-shift profile, and the two
//! reference random-variable models.

mod meansq;
mod models;
mod profile;
mod simplex;

pub use meansq::{cor14_value, mean_square_closed};
pub use models::{
    circle_rv_mc, circle_rv_moment, wasilewski_moments, CircleMc, WasilewskiConfig,
    WasilewskiMoment,
};
pub use profile::{landau_gonek_max, landau_gonek_profile};
pub use simplex::{simplex_moment, FlipWindow, SimplexIntegrand, SimplexMoment};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn pow_rational(q: &Rational, k: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..k {
        acc *= q;
    }
    acc
}

fn sign(i: u64) -> Rational {
    if i % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Render "p/q (decimal)".
pub fn display_rational(q: &Rational) -> String {
    format!("{}/{} ({})", q.numer(), q.denom(), q.to_f64().unwrap_or(f64::NAN))
}

/// The k-th pseudo-moment of the smoothed log-derivative against the
/// Liouville measure, exact:
/// (2/alpha)^k sum_{i=0}^{k} C(k,i) (-1/alpha)^i / (k+i+1)!.
pub fn exact_pseudo_moment(k: u32, alpha: &Rational) -> Rational {
    let two_over_alpha = rat_int(2) / alpha;
    let minus_inv_alpha = -Rational::one() / alpha;
    let mut sum = Rational::zero();
    for i in 0..=k as u64 {
        let term = Rational::from(binomial(k as u64, i)) * pow_rational(&minus_inv_alpha, i as u32)
            / Rational::from(factorial(k as u64 + i + 1));
        sum += term;
    }
    pow_rational(&two_over_alpha, k) * sum
}

/// Even moments against the lambda_2 measure: (-1)^k times the 2k-th
/// Liouville pseudo-moment.
pub fn lambda2_even_moment(k: u32, alpha: &Rational) -> Rational {
    sign(k as u64) * exact_pseudo_moment(2 * k, alpha)
}

/// The binomial expansion of Re(z^k) in powers of Re z and Im z, evaluated
/// as a combination constant. Checks the expansion identity on sample points
/// before returning the exact moment it represents.
pub fn polyc_identity(k: u32, alpha: &Rational) -> Rational {
    for &(re, im) in &[(0.7, -1.3), (1.9, 0.4), (-0.6, 0.8)] {
        let z = num::complex::Complex64::new(re, im);
        let lhs = z.powu(k).re;
        let mut rhs = 0.0;
        for n in 0..=(k / 2) as u64 {
            let c = binomial(k as u64, 2 * n).to_f64().unwrap();
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            rhs += c * s * re.powi((k as u64 - 2 * n) as i32) * im.powi(2 * n as i32);
        }
        assert!(
            (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
            "Re(z^k) expansion identity violated at k = {k}"
        );
    }
    exact_pseudo_moment(k, alpha)
}

/// |moment| <= (2/alpha)^k (k+1)/(k+1)! decay envelope.
pub fn moment_decay_bound(k: u32, alpha: &Rational) -> Rational {
    let two_over_alpha = rat_int(2) / alpha;
    pow_rational(&two_over_alpha, k) * rat_int(k as i64 + 1)
        / Rational::from(factorial(k as u64 + 1))
}
