//! Mollifier coefficient series a(n), the smoothed log-derivative coefficients,
//! their Dirichlet convolution b = zhat * a, and the divisor-square constant fit.

use serde::{Deserialize, Serialize};

use super::sieve::FactorTables;
use crate::error::{Error, Result};

/// Support cutoff for mollifier series: coefficients live on n < T / log^2 T (strict).
pub fn t0_cutoff(t: f64) -> f64 {
    t / t.ln().powi(2)
}

/// Largest integer strictly below x (0 when x <= 1).
pub fn max_n_below(x: f64) -> u64 {
    if x <= 1.0 {
        return 0;
    }
    let f = x.floor();
    if f == x {
        (f as u64) - 1
    } else {
        f as u64
    }
}

/// Which mollifier to build. `beta` windows are exponents of T; the sign
/// function flips once per prime factor p with T^b1 < p <= T^b2, counted
/// with multiplicity (complete multiplicativity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MollifierSpec {
    /// a(n) = 1
    Unit,
    /// a(n) = lambda(n)
    Liouville,
    /// a(n) = lambda_k(n)
    LiouvilleK(u32),
    /// a(n) = lambda_{b1,b2}(n)
    IntervalFlip { beta1: f64, beta2: f64 },
    /// a(n) = lambda(n) d_r(n)
    LiouvilleDivisor { r: u32 },
    /// a(n) = lambda_{b1,b2}(n) d_r(n) (1 - log n / log T)^eta
    General { beta1: f64, beta2: f64, r: u32, eta: u32 },
}

impl MollifierSpec {
    pub fn validate(&self) -> Result<()> {
        let check_window = |b1: f64, b2: f64| {
            if !(0.0..=1.0).contains(&b1) || !(0.0..=1.0).contains(&b2) || b1 > b2 {
                Err(Error::InvalidParameter(format!(
                    "flip window [{b1}, {b2}] must satisfy 0 <= b1 <= b2 <= 1"
                )))
            } else {
                Ok(())
            }
        };
        match *self {
            MollifierSpec::LiouvilleK(k) if k == 0 => {
                Err(Error::InvalidParameter("lambda_k needs k >= 1".into()))
            }
            MollifierSpec::LiouvilleDivisor { r } | MollifierSpec::General { r, .. } if r == 0 => {
                Err(Error::InvalidParameter("divisor order r must be >= 1".into()))
            }
            MollifierSpec::IntervalFlip { beta1, beta2 } => check_window(beta1, beta2),
            MollifierSpec::General { beta1, beta2, .. } => check_window(beta1, beta2),
            _ => Ok(()),
        }
    }

    /// Divisor order r of the series (1 unless a d_r factor is present).
    pub fn divisor_order(&self) -> u32 {
        match *self {
            MollifierSpec::LiouvilleDivisor { r } | MollifierSpec::General { r, .. } => r,
            _ => 1,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            MollifierSpec::Unit => "unit".into(),
            MollifierSpec::Liouville => "lambda".into(),
            MollifierSpec::LiouvilleK(k) => format!("lambda{k}"),
            MollifierSpec::IntervalFlip { beta1, beta2 } => format!("flip[{beta1},{beta2}]"),
            MollifierSpec::LiouvilleDivisor { r } => format!("lambda*d{r}"),
            MollifierSpec::General { beta1, beta2, r, eta } => {
                format!("general[{beta1},{beta2}]*d{r}^eta{eta}")
            }
        }
    }

    /// a(n) for this mollifier at height T.
    pub fn coefficient(&self, n: u64, t: f64, tables: &FactorTables) -> Result<f64> {
        Ok(match *self {
            MollifierSpec::Unit => 1.0,
            MollifierSpec::Liouville => tables.lambda(n)? as f64,
            MollifierSpec::LiouvilleK(k) => tables.lambda_k(n, k)? as f64,
            MollifierSpec::IntervalFlip { beta1, beta2 } => {
                flip_sign(n, t, beta1, beta2, tables)? as f64
            }
            MollifierSpec::LiouvilleDivisor { r } => {
                tables.lambda(n)? as f64 * tables.divisor_r(n, r)? as f64
            }
            MollifierSpec::General { beta1, beta2, r, eta } => {
                let smooth = (1.0 - (n as f64).ln() / t.ln()).powi(eta as i32);
                flip_sign(n, t, beta1, beta2, tables)? as f64
                    * tables.divisor_r(n, r)? as f64
                    * smooth
            }
        })
    }
}

/// Completely multiplicative sign: -1 per prime factor in (T^b1, T^b2],
/// counted with multiplicity.
fn flip_sign(n: u64, t: f64, beta1: f64, beta2: f64, tables: &FactorTables) -> Result<i8> {
    let lo = t.powf(beta1);
    let hi = t.powf(beta2);
    let mut flips = 0u32;
    for (p, e) in tables.factorize(n)? {
        let pf = p as f64;
        if pf > lo && pf <= hi {
            flips += e;
        }
    }
    Ok(if flips % 2 == 0 { 1 } else { -1 })
}

/// A materialized coefficient sequence c(1..len), with its height scale and
/// a provenance note (including any global factor consumers must apply).
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeries {
    /// values[n] is the coefficient of n; values[0] is unused and zero.
    values: Vec<f64>,
    pub scale_t: f64,
    pub description: String,
}

impl CoeffSeries {
    pub fn new(values: Vec<f64>, scale_t: f64, description: String) -> Self {
        CoeffSeries { values, scale_t, description }
    }

    /// Largest representable index.
    pub fn len(&self) -> u64 {
        (self.values.len() as u64).saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, n: u64) -> f64 {
        self.values.get(n as usize).copied().unwrap_or(0.0)
    }

    /// Nonzero coefficients as (n, value), ascending in n.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &v)| v != 0.0)
            .map(|(n, &v)| (n as u64, v))
    }

    /// sum |c(n)| / sqrt(n) — triangle-inequality bound on polynomial values.
    pub fn l1_over_sqrt(&self) -> f64 {
        self.iter_nonzero().map(|(n, v)| v.abs() / (n as f64).sqrt()).sum()
    }

    /// sum c(n)^2 / n, summed small-term-first.
    pub fn sum_sq_over_n(&self) -> f64 {
        let mut acc = 0.0;
        for (n, v) in self.iter_nonzero().collect::<Vec<_>>().into_iter().rev() {
            acc += v * v / n as f64;
        }
        acc
    }
}

/// Materialize a(n) on n < T / log^2 T.
pub fn mollifier_coeffs(spec: MollifierSpec, t: f64, tables: &FactorTables) -> Result<CoeffSeries> {
    spec.validate()?;
    if t < 100.0 {
        return Err(Error::InvalidParameter(format!("T = {t} < 100")));
    }
    let n_max = max_n_below(t0_cutoff(t));
    if tables.limit() < n_max {
        return Err(Error::TablesTooSmall { limit: tables.limit(), needed: n_max });
    }
    let mut values = vec![0.0; n_max as usize + 1];
    for n in 1..=n_max {
        values[n as usize] = spec.coefficient(n, t, tables)?;
    }
    Ok(CoeffSeries::new(values, t, format!("a(n): {} up to n < T/log^2 T", spec.label())))
}

/// Coefficients Lambda(n) (1 - log n / (alpha log T)) on n < T^alpha.
///
/// The global factor -2/(alpha log T) is *not* folded in; it is recorded in
/// the description and must be applied by the consumer exactly once.
pub fn zhat_coeffs(alpha: f64, t: f64, tables: &FactorTables) -> Result<CoeffSeries> {
    if alpha < 1.0 {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} < 1")));
    }
    let cutoff = t.powf(alpha);
    let n_max = max_n_below(cutoff);
    if tables.limit() < n_max {
        return Err(Error::TablesTooSmall { limit: tables.limit(), needed: n_max });
    }
    let denom = alpha * t.ln();
    let mut values = vec![0.0; n_max as usize + 1];
    for pp in tables.prime_powers_below(cutoff)? {
        values[pp.q as usize] = pp.log_p * (1.0 - (pp.q as f64).ln() / denom);
    }
    Ok(CoeffSeries::new(
        values,
        t,
        format!("zhat(n) for alpha = {alpha}; global factor -2/(alpha log T) applied by consumer"),
    ))
}

/// Dirichlet product b = z * a with the global -2/(alpha log T) folded in:
/// b(m) = -2/(alpha log T) sum over prime-power divisors q | m, q < T^alpha of
/// Lambda(q) (1 - log q / (alpha log T)) a(m/q).
///
/// `m_cap`: build b(m) for m < m_cap. Support never exceeds T0 * T^alpha.
pub fn convolve_b_upto(
    spec: MollifierSpec,
    alpha: f64,
    t: f64,
    tables: &FactorTables,
    m_cap: f64,
) -> Result<CoeffSeries> {
    let a = mollifier_coeffs(spec, t, tables)?;
    let q_cut = t.powf(alpha);
    let support = ((a.len() + 1) as f64) * q_cut;
    let m_max = max_n_below(m_cap.min(support));
    const BUDGET_ENTRIES: u64 = 1 << 27;
    if m_max >= BUDGET_ENTRIES {
        return Err(Error::Capacity {
            what: "b-series entries",
            needed: m_max,
            budget: BUDGET_ENTRIES,
        });
    }
    let scale = -2.0 / (alpha * t.ln());
    let denom = alpha * t.ln();
    let mut values = vec![0.0; m_max as usize + 1];
    // only q <= m_max can land inside the cap; the Lambda-hat weight still
    // uses the T^alpha cutoff
    for pp in tables.prime_powers_below(q_cut.min(m_max as f64 + 1.0))? {
        if pp.q > m_max {
            break;
        }
        let w = pp.log_p * (1.0 - (pp.q as f64).ln() / denom);
        let top = (m_max / pp.q).min(a.len());
        for n in 1..=top {
            let an = a.get(n);
            if an != 0.0 {
                values[(n * pp.q) as usize] += scale * w * an;
            }
        }
    }
    Ok(CoeffSeries::new(
        values,
        t,
        format!("b = zhat*a, alpha = {alpha}, a: {}", spec.label()),
    ))
}

/// Full-support convolution (m up to T0 * T^alpha), for tail mean squares.
pub fn convolve_b(
    spec: MollifierSpec,
    alpha: f64,
    t: f64,
    tables: &FactorTables,
) -> Result<CoeffSeries> {
    convolve_b_upto(spec, alpha, t, tables, f64::INFINITY)
}

/// Least-squares fit of sum_{m<x} d_r(m)^2 / m against
/// c (log x)^{r^2} + c' (log x)^{r^2 - 1}, sampled at `points` geometric
/// x in [n/100, n]. Returns the leading coefficient c.
pub fn fit_ar(r: u32, n: u64, tables: &FactorTables) -> Result<f64> {
    fit_ar_windowed(r, n, tables, n / 100, n, 32)
}

pub fn fit_ar_windowed(
    r: u32,
    n: u64,
    tables: &FactorTables,
    x_lo: u64,
    x_hi: u64,
    points: usize,
) -> Result<f64> {
    if n < 100_000 {
        return Err(Error::InvalidParameter(format!("fit_ar needs N >= 1e5, got {n}")));
    }
    if tables.limit() < x_hi {
        return Err(Error::TablesTooSmall { limit: tables.limit(), needed: x_hi });
    }
    let ratio = (x_hi as f64 / x_lo as f64).powf(1.0 / (points as f64 - 1.0));
    let xs: Vec<u64> = (0..points)
        .map(|i| (x_lo as f64 * ratio.powi(i as i32)).round() as u64)
        .collect();

    // one pass over m accumulating the partial sums at each sample point
    let mut samples = Vec::with_capacity(points);
    let mut acc = 0.0f64;
    let mut comp = 0.0f64; // Kahan compensation
    let mut next = 0usize;
    for m in 1..=x_hi {
        while next < xs.len() && m >= xs[next] {
            samples.push((xs[next] as f64, acc));
            next += 1;
        }
        let d = tables.divisor_r(m, r)? as f64;
        let y = d * d / m as f64 - comp;
        let s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    }
    while next < xs.len() {
        samples.push((xs[next] as f64, acc));
        next += 1;
    }

    // 2-parameter linear least squares on basis (L^{r^2}, L^{r^2-1}), L = log x
    let e = (r * r) as i32;
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y) in &samples {
        let l = x.ln();
        let f1 = l.powi(e);
        let f2 = l.powi(e - 1);
        s11 += f1 * f1;
        s12 += f1 * f2;
        s22 += f2 * f2;
        b1 += f1 * y;
        b2 += f2 * y;
    }
    let det = s11 * s22 - s12 * s12;
    let trace = s11 + s22;
    // condition estimate of the 2x2 Gram matrix
    let disc = (trace * trace / 4.0 - det).max(0.0).sqrt();
    let eig_hi = trace / 2.0 + disc;
    let eig_lo = (trace / 2.0 - disc).abs();
    let cond = if eig_lo > 0.0 { eig_hi / eig_lo } else { f64::INFINITY };
    const COND_MAX: f64 = 1e14;
    if cond > COND_MAX {
        return Err(Error::IllConditionedFit { cond, max: COND_MAX });
    }
    Ok((b1 * s22 - b2 * s12) / det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tables(n: u64) -> FactorTables {
        FactorTables::build(n).unwrap()
    }

    #[test]
    fn cutoff_is_strict() {
        // T = 1e4: T0 = 117.88..., so the largest index is 117
        let t = 1e4;
        assert_eq!(max_n_below(t0_cutoff(t)), 117);
        assert_eq!(max_n_below(5.0), 4);
        assert_eq!(max_n_below(1.0), 0);
    }

    #[test]
    fn liouville_series_matches_lambda() {
        let tb = tables(200);
        let s = mollifier_coeffs(MollifierSpec::Liouville, 1e4, &tb).unwrap();
        assert_eq!(s.len(), 117);
        assert_eq!(s.get(1), 1.0);
        for n in 1..=s.len() {
            assert_eq!(s.get(n), tb.lambda(n).unwrap() as f64);
        }
    }

    #[test]
    fn general_full_flip_equals_liouville() {
        let tb = tables(200);
        let t = 1e4;
        let lam = mollifier_coeffs(MollifierSpec::Liouville, t, &tb).unwrap();
        let gen = mollifier_coeffs(
            MollifierSpec::General { beta1: 0.0, beta2: 1.0, r: 1, eta: 0 },
            t,
            &tb,
        )
        .unwrap();
        for n in 1..=lam.len() {
            assert_eq!(lam.get(n), gen.get(n), "mismatch at n = {n}");
        }
    }

    #[test]
    fn degenerate_flip_window_is_unit_on_primes() {
        let tb = tables(200);
        let t = 1e4;
        let s = mollifier_coeffs(MollifierSpec::IntervalFlip { beta1: 0.3, beta2: 0.3 }, t, &tb)
            .unwrap();
        for n in 1..=s.len() {
            assert_eq!(s.get(n), 1.0);
        }
    }

    #[test]
    fn liouville_divisor_example() {
        let tb = tables(200);
        let s = mollifier_coeffs(MollifierSpec::LiouvilleDivisor { r: 2 }, 1e4, &tb).unwrap();
        // a(12) = lambda(12) d(12) = -6
        assert_eq!(s.get(12), -6.0);
        assert_eq!(s.get(1), 1.0);
    }

    #[test]
    fn zhat_values() {
        let tb = tables(23_000);
        // alpha = 1, T = e^10: value at n = 2 is log2 * (1 - log2/10)
        let t = 10f64.exp();
        let s = zhat_coeffs(1.0, t, &tb).unwrap();
        let l2 = 2f64.ln();
        assert_abs_diff_eq!(s.get(2), l2 * (1.0 - l2 / 10.0), epsilon = 1e-15);
        assert_eq!(s.get(1), 0.0);
        assert_eq!(s.get(6), 0.0); // not a prime power
        // weight vanishes continuously at the cutoff: largest prime power near T
        let top = s.iter_nonzero().last().unwrap();
        assert!(top.1 / (top.0 as f64).ln() < 0.05 || top.1 > 0.0);
    }

    #[test]
    fn b_at_primes_has_closed_form() {
        let tb = tables(3000);
        let t = 1e4;
        let alpha = 1.0;
        let b = convolve_b_upto(MollifierSpec::Liouville, alpha, t, &tb, 118.0).unwrap();
        let lt = alpha * t.ln();
        for p in [2u64, 3, 5, 7, 11, 113] {
            let lp = (p as f64).ln();
            let expect = -(2.0 * lp / lt) * (1.0 - lp / lt);
            assert_abs_diff_eq!(b.get(p), expect, epsilon = 1e-14);
        }
        assert_eq!(b.get(1), 0.0);
    }

    #[test]
    fn b_approximates_lambda_d_logn_over_logt() {
        // For a = lambda*d_2 and m with all prime-power divisors small,
        // b(m) is approximately lambda(m) d(m) log m / log T.
        let tb = tables(6000);
        let t = 1e6;
        let b = convolve_b_upto(MollifierSpec::LiouvilleDivisor { r: 2 }, 1.0, t, &tb, 2000.0)
            .unwrap();
        let mut checked = 0;
        for m in [210u64, 330, 462, 1155, 1870] {
            let lam = tb.lambda(m).unwrap() as f64;
            let d = tb.divisor_r(m, 2).unwrap() as f64;
            let approx_val = lam * d * (m as f64).ln() / t.ln();
            let rel = (b.get(m) - approx_val).abs() / approx_val.abs();
            assert!(rel < 0.35, "m = {m}: b = {}, approx = {approx_val}", b.get(m));
            checked += 1;
        }
        assert_eq!(checked, 5);
    }

    #[test]
    fn flip_sign_is_completely_multiplicative() {
        let tb = tables(40_000);
        let t = 1e4;
        let spec = MollifierSpec::IntervalFlip { beta1: 0.2, beta2: 0.7 };
        let pairs = [(6u64, 35u64), (12, 11), (2, 9973), (100, 391), (17, 17)];
        for (m, n) in pairs {
            let sm = spec.coefficient(m, t, &tb).unwrap();
            let sn = spec.coefficient(n, t, &tb).unwrap();
            let smn = spec.coefficient(m * n, t, &tb).unwrap();
            assert_eq!(smn, sm * sn, "multiplicativity at ({m}, {n})");
        }
    }

    #[test]
    fn fit_ar_r1_recovers_unity() {
        // d_1 = 1: sum 1/m = log x + gamma, so the leading coefficient is 1
        let tb = tables(100_000);
        let c = fit_ar(1, 100_000, &tb).unwrap();
        assert!((c - 1.0).abs() < 0.05, "c = {c}");
    }

    #[test]
    fn euler_mascheroni_from_partial_sums() {
        let n = 1_000_000u64;
        let mut s = 0.0f64;
        for m in (1..n).rev() {
            s += 1.0 / m as f64;
        }
        let gamma = s - (n as f64).ln();
        assert!(gamma > 0.577 && gamma < 0.578, "gamma = {gamma}");
    }
}
