//! The k-fold simplex integral behind the moment theorem.
//!
//! For trivial flip windows (none, or all of [0,1]) and integer r, eta the
//! integrand is a polynomial on the simplex and the value is an exact
//! rational via the monomial formula
//! int_simplex v1^{a_1}..vk^{a_k} (1-S)^c dv = (prod a_j!) c! / (sum a_j + c + k)!.
//! Fractional windows fall back to nested adaptive quadrature.

use num::{One, ToPrimitive, Zero};

use super::{binomial, factorial, pow_rational, rat_int, sign, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlipWindow {
    /// no sign flip anywhere
    None,
    /// flip on all of (0, 1]: constant sign (-1) per variable
    Full,
    /// flip on (beta1, beta2] with 0 <= beta1 <= beta2 <= 1
    Interval(f64, f64),
}

#[derive(Debug, Clone)]
pub struct SimplexIntegrand {
    pub k: u32,
    pub r: u32,
    pub eta: u32,
    pub alpha: Rational,
    pub flip: FlipWindow,
}

#[derive(Debug, Clone)]
pub struct SimplexMoment {
    pub value: f64,
    pub exact: Option<Rational>,
}

/// Evaluate the k-th moment integral:
/// (-2r/alpha)^k [ int_simplex prod_j s(v_j)(1 - v_j/alpha) I(S) dv ] / D
/// with I(S) = int_0^{1-S} u^{r^2-1} (1-u)^eta (1-u-S)^eta du and
/// D = int_0^1 v^{r^2-1} (1-v)^{2 eta} dv.
pub fn simplex_moment(si: &SimplexIntegrand) -> Result<SimplexMoment> {
    if si.k > 4 {
        return Err(Error::InvalidParameter(format!("simplex depth k = {} > 4", si.k)));
    }
    if si.r == 0 {
        return Err(Error::InvalidParameter("r must be >= 1".into()));
    }
    if si.alpha < Rational::one() {
        return Err(Error::InvalidParameter("alpha must be >= 1".into()));
    }
    match si.flip {
        FlipWindow::None | FlipWindow::Full => {
            let exact = rational_moment(si);
            let value = exact.to_f64().ok_or_else(|| {
                Error::InvalidParameter("rational moment does not fit in f64".into())
            })?;
            Ok(SimplexMoment { value, exact: Some(exact) })
        }
        FlipWindow::Interval(b1, b2) => {
            if !(0.0..=1.0).contains(&b1) || !(0.0..=1.0).contains(&b2) || b1 > b2 {
                return Err(Error::InvalidParameter(format!(
                    "flip window [{b1}, {b2}] out of order"
                )));
            }
            if si.k > 3 {
                return Err(Error::InvalidParameter(
                    "adaptive fallback supports k <= 3 (depth limit)".into(),
                ));
            }
            Ok(SimplexMoment { value: numeric_moment(si, b1, b2), exact: None })
        }
    }
}

fn rational_moment(si: &SimplexIntegrand) -> Rational {
    let k = si.k as u64;
    let r2 = (si.r as u64) * (si.r as u64);
    let eta = si.eta as u64;
    let sign_factor = match si.flip {
        FlipWindow::Full => sign(k),
        _ => Rational::one(),
    };
    let minus_inv_alpha = -Rational::one() / &si.alpha;

    // inner u-integral coefficients:
    // I(S) = sum_{a,b,c} C(eta,a)(-1)^a C(eta,b)(-1)^b C(b,c)
    //        S^{b-c} (1-S)^{r^2+a+c} / (r^2+a+c)
    let mut total = Rational::zero();
    for m in 0..=k {
        // subset of m variables contributing v_j from prod (1 - v_j/alpha)
        let subset = Rational::from(binomial(k, m)) * pow_rational(&minus_inv_alpha, m as u32);
        let mut inner = Rational::zero();
        for a in 0..=eta {
            for b in 0..=eta {
                for c in 0..=b {
                    let coef = Rational::from(binomial(eta, a) * binomial(eta, b) * binomial(b, c))
                        * sign(a + b)
                        / rat_int((r2 + a + c) as i64);
                    inner += coef * moment_e(k, m, b - c, r2 + a + c);
                }
            }
        }
        total += subset * inner;
    }
    let d = Rational::new(factorial(r2 - 1) * factorial(2 * eta), factorial(r2 + 2 * eta));
    let minus_2r_over_alpha = rat_int(-2 * si.r as i64) / &si.alpha;
    sign_factor * pow_rational(&minus_2r_over_alpha, si.k) * total / d
}

/// E(m; p, w) = int_simplex v1..vm S^p (1-S)^w dv over the k-simplex,
/// via S^p = (1 - (1-S))^p.
fn moment_e(k: u64, m: u64, p: u64, w: u64) -> Rational {
    let mut acc = Rational::zero();
    for i in 0..=p {
        let term = Rational::from(binomial(p, i)) * sign(i)
            * Rational::new(factorial(w + i), factorial(m + w + i + k));
        acc += term;
    }
    acc
}

// ---- numeric fallback for fractional flip windows ----

struct NumericCtx {
    alpha: f64,
    b1: f64,
    b2: f64,
    k: usize,
    /// I(S) expansion terms (coef, s_pow, one_minus_s_pow)
    inner: Vec<(f64, i32, i32)>,
}

impl NumericCtx {
    fn inner_integral(&self, s: f64) -> f64 {
        let oms = 1.0 - s;
        self.inner
            .iter()
            .map(|&(c, ps, pw)| c * s.powi(ps) * oms.powi(pw))
            .sum()
    }

    fn integrand_rec(&self, dim: usize, s_prev: f64) -> f64 {
        let ub = 1.0 - s_prev;
        if ub <= 0.0 {
            return 0.0;
        }
        // the smooth part; the piecewise-constant sign is factored out per segment
        let f = |v: f64| {
            let w = 1.0 - v / self.alpha;
            if dim + 1 == self.k {
                w * self.inner_integral(s_prev + v)
            } else {
                w * self.integrand_rec(dim + 1, s_prev + v)
            }
        };
        // split at the sign breakpoints and at the images of deeper-level
        // breakpoints (where the remaining budget crosses the window edges)
        let mut cuts = vec![0.0, ub];
        for b in [self.b1, self.b2, ub - self.b1, ub - self.b2] {
            if b > 0.0 && b < ub {
                cuts.push(b);
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        let mut acc = 0.0;
        for pair in cuts.windows(2) {
            let mid = 0.5 * (pair[0] + pair[1]);
            let sign = if mid > self.b1 && mid <= self.b2 { -1.0 } else { 1.0 };
            acc += sign * adaptive_simpson(&f, pair[0], pair[1], 1e-12, 24);
        }
        acc
    }
}

pub(crate) fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
                + rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
        }
    }
    if b <= a {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fb, fm) = (f(a), f(b), f(m));
    let whole = simpson(a, fa, b, fb, fm);
    rec(f, a, fa, b, fb, m, fm, whole, tol, depth)
}

fn numeric_moment(si: &SimplexIntegrand, b1: f64, b2: f64) -> f64 {
    let r2 = (si.r * si.r) as u64;
    let eta = si.eta as u64;
    let mut inner = Vec::new();
    for a in 0..=eta {
        for b in 0..=eta {
            for c in 0..=b {
                let coef = (binomial(eta, a) * binomial(eta, b) * binomial(b, c))
                    .to_f64()
                    .unwrap()
                    * if (a + b) % 2 == 0 { 1.0 } else { -1.0 }
                    / (r2 + a + c) as f64;
                inner.push((coef, (b - c) as i32, (r2 + a + c) as i32));
            }
        }
    }
    let alpha = si.alpha.to_f64().unwrap();
    let ctx = NumericCtx { alpha, b1, b2, k: si.k as usize, inner };
    let integral = ctx.integrand_rec(0, 0.0);
    let d = (factorial(r2 - 1) * factorial(2 * eta)).to_f64().unwrap()
        / factorial(r2 + 2 * eta).to_f64().unwrap();
    (-2.0 * si.r as f64 / alpha).powi(si.k as i32) * integral / d
}
