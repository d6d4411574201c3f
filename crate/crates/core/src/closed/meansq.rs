//! Exact mean-square of the smoothed log-derivative against the divisor-
//! weighted measures: the two-piece (equal-prime / distinct-prime) integral,
//! normalized by the measure's total mass.

use num::{One, Zero};

use super::{binomial, factorial, pow_rational, rat_int, sign, Rational};
use crate::error::{Error, Result};

/// [4r^2/a^2 I_a + 4r^4/a^2 I_b] / (r^2 D) with
/// I_a = int_{u+v<=1} v Q(u,v,v), I_b = int_{u+v1+v2<=1} Q(u,v1,v2),
/// Q(u,v1,v2) = u^{r^2-1} (1-v1/a)(1-v2/a)(1-u-v1)^eta (1-u-v2)^eta,
/// D = int_0^1 v^{r^2-1}(1-v)^{2 eta} dv.
pub fn mean_square_closed(alpha: &Rational, r: u32, eta: u32) -> Result<Rational> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be >= 1".into()));
    }
    if alpha < &Rational::one() {
        return Err(Error::InvalidParameter("alpha must be >= 1".into()));
    }
    let r2 = (r as u64) * (r as u64);
    let eta = eta as u64;
    let inv_alpha = Rational::one() / alpha;

    // I_a: expand (1-u-v)^{2 eta} around (u+v), integrate u first, then v
    // against v (1-v/alpha)^2.
    let mut i_a = Rational::zero();
    for j in 0..=2 * eta {
        for c in 0..=j {
            let coef = Rational::from(binomial(2 * eta, j) * binomial(j, c)) * sign(j)
                / rat_int((r2 + c) as i64);
            // remaining: int_0^1 v^{1 + j - c} (1-v/alpha)^2 (1-v)^{r^2+c} dv
            for (d, w_d) in [(0u64, Rational::one()), (1, rat_int(-2) * &inv_alpha), (2, &inv_alpha * &inv_alpha)] {
                let a_exp = 1 + j - c + d;
                let beta = Rational::new(
                    factorial(a_exp) * factorial(r2 + c),
                    factorial(a_exp + r2 + c + 1),
                );
                i_a += &coef * w_d * beta;
            }
        }
    }

    // I_b: expand both eta-factors and (1-v1/a)(1-v2/a); 3-simplex monomials
    let mut i_b = Rational::zero();
    for a1 in 0..=eta {
        for c1 in 0..=a1 {
            for a2 in 0..=eta {
                for c2 in 0..=a2 {
                    let base = Rational::from(
                        binomial(eta, a1) * binomial(a1, c1) * binomial(eta, a2) * binomial(a2, c2),
                    ) * sign(a1 + a2);
                    for d1 in 0..=1u64 {
                        for d2 in 0..=1u64 {
                            let w = pow_rational(&(-&inv_alpha), (d1 + d2) as u32);
                            let ue = r2 - 1 + c1 + c2;
                            let v1e = a1 - c1 + d1;
                            let v2e = a2 - c2 + d2;
                            let mono = Rational::new(
                                factorial(ue) * factorial(v1e) * factorial(v2e),
                                factorial(ue + v1e + v2e + 3),
                            );
                            i_b += &base * w * mono;
                        }
                    }
                }
            }
        }
    }

    let d = Rational::new(factorial(r2 - 1) * factorial(2 * eta), factorial(r2 + 2 * eta));
    let inv_a2 = &inv_alpha * &inv_alpha;
    let numer = rat_int(4 * r2 as i64) * &inv_a2 * i_a
        + rat_int(4 * (r2 * r2) as i64) * &inv_a2 * i_b;
    Ok(numer / (rat_int(r2 as i64) * d))
}

/// The alpha-polynomial form of the r = 1, eta = 0 mean square:
/// 4/(3 a^2) - 1/a^3 + 7/(30 a^4).
pub fn cor14_value(alpha: &Rational) -> Result<Rational> {
    if alpha < &Rational::one() {
        return Err(Error::InvalidParameter("alpha must be >= 1".into()));
    }
    let inv = Rational::one() / alpha;
    let inv2 = &inv * &inv;
    let inv3 = &inv2 * &inv;
    let inv4 = &inv3 * &inv;
    Ok(super::rat(4, 3) * inv2 - inv3 + super::rat(7, 30) * inv4)
}
