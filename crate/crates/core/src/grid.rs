//! Gaussian weight discretization and fast evaluation of Dirichlet polynomials
//! on a uniform t-grid around t = T.
//!
//! The evaluator walks each term's phase with a unit-modulus rotor along the
//! grid, re-seeded from a direct sin/cos every segment of 1024 points, which
//! both renormalizes the rotor and caps phase drift at ~1e-13 per segment.

use num::complex::Complex64;
use rayon::prelude::*;

use crate::arith::CoeffSeries;
use crate::error::{Error, Result};

/// Points per recurrence segment; also the parallel work unit.
const SEGMENT: usize = 1024;

/// Default ceiling on grid size.
pub const DEFAULT_POINT_BUDGET: u64 = 1 << 26;

/// The normalized Gaussian weight centered at T.
#[derive(Debug, Clone, Copy)]
pub struct WeightSpec {
    pub t: f64,
    pub log_t: f64,
}

impl WeightSpec {
    pub fn new(t: f64) -> Result<Self> {
        if t < 100.0 {
            return Err(Error::InvalidParameter(format!("T = {t} < 100")));
        }
        Ok(WeightSpec { t, log_t: t.ln() })
    }

    /// omega(1/2 + it) = (log T / (sqrt(pi) T)) exp(-(t-T)^2 log^2 T / T^2).
    pub fn omega(&self, at: f64) -> f64 {
        let u = (at - self.t) * self.log_t / self.t;
        self.log_t / (std::f64::consts::PI.sqrt() * self.t) * (-u * u).exp()
    }
}

/// Uniform quadrature grid, symmetric about T, with Gaussian trapezoid weights.
#[derive(Debug, Clone)]
pub struct TGrid {
    weight: WeightSpec,
    step: f64,
    /// points are t_j = T + (j - half_points) * step, j = 0..=2*half_points
    half_points: usize,
    pub half_width: f64,
    weights: Vec<f64>,
}

impl TGrid {
    pub fn len(&self) -> usize {
        2 * self.half_points + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn center(&self) -> f64 {
        self.weight.t
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn point(&self, j: usize) -> f64 {
        self.weight.t + (j as f64 - self.half_points as f64) * self.step
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_spec(&self) -> WeightSpec {
        self.weight
    }

    /// Largest admissible step for a k-th moment at this alpha.
    pub fn nyquist_step(t: f64, k: u32, alpha: f64) -> f64 {
        std::f64::consts::PI / ((alpha * k as f64 + 2.0) * (alpha + 1.0) * t.ln())
    }

    /// Check this grid is fine enough for the k-th moment at `alpha`.
    pub fn validate_for(&self, k: u32, alpha: f64) -> Result<()> {
        let needed = Self::nyquist_step(self.weight.t, k, alpha);
        if self.step > needed * (1.0 + 1e-12) {
            return Err(Error::NyquistViolation { step: self.step, needed, k, alpha });
        }
        Ok(())
    }

    /// Weighted sum over the grid, pairing each mirror pair (T - u, T + u)
    /// before accumulation and summing pairwise for reproducibility.
    pub fn integrate(&self, values: &[Complex64]) -> Complex64 {
        assert_eq!(values.len(), self.len());
        let m = self.half_points;
        let mut paired: Vec<Complex64> = Vec::with_capacity(m + 1);
        paired.push(self.weights[m] * values[m]);
        for u in 1..=m {
            paired.push(self.weights[m - u] * values[m - u] + self.weights[m + u] * values[m + u]);
        }
        pairwise_sum(&paired)
    }

    /// Same sum restricted to every other point with trapezoid reweighting:
    /// the stride-2 coarsening used for refinement error estimates.
    pub fn integrate_coarse(&self, values: &[Complex64]) -> Complex64 {
        assert_eq!(values.len(), self.len());
        let m = self.half_points;
        // keep symmetry: use points at even offsets from the center
        let start = m % 2;
        let coarse: Vec<usize> = (start..self.len()).step_by(2).collect();
        let dt2 = 2.0 * self.step;
        let mut paired = Vec::with_capacity(coarse.len());
        for (pos, &j) in coarse.iter().enumerate() {
            let endpoint = pos == 0 || pos == coarse.len() - 1;
            let w = self.weight.omega(self.point(j)) * dt2 * if endpoint { 0.5 } else { 1.0 };
            paired.push(w * values[j]);
        }
        pairwise_sum(&paired)
    }
}

/// Build the quadrature grid for moments up to `k_max` at `alpha`.
///
/// Window half-width W = (T / log T) sqrt(log(1/tail_eps)); step from the
/// Nyquist rule; weights omega(t_j) * dt with trapezoid endpoints.
pub fn make_grid(t: f64, k_max: u32, alpha: f64, tail_eps: f64) -> Result<TGrid> {
    make_grid_with_budget(t, k_max, alpha, tail_eps, DEFAULT_POINT_BUDGET)
}

pub fn make_grid_with_budget(
    t: f64,
    k_max: u32,
    alpha: f64,
    tail_eps: f64,
    point_budget: u64,
) -> Result<TGrid> {
    if !(1e-16..=1e-6).contains(&tail_eps) {
        return Err(Error::InvalidParameter(format!(
            "tail_eps = {tail_eps} outside (1e-16, 1e-6)"
        )));
    }
    let weight = WeightSpec::new(t)?;
    let half_width = t / weight.log_t * (1.0 / tail_eps).ln().sqrt();
    let step = TGrid::nyquist_step(t, k_max, alpha);
    let half_points = (half_width / step).ceil() as u64;
    let points = 2 * half_points + 1;
    if points > point_budget {
        return Err(Error::GridBudget { points, budget: point_budget });
    }
    let half_points = half_points as usize;
    let n = 2 * half_points + 1;
    let mut weights = Vec::with_capacity(n);
    for j in 0..n {
        let tj = t + (j as f64 - half_points as f64) * step;
        let endpoint = j == 0 || j == n - 1;
        weights.push(weight.omega(tj) * step * if endpoint { 0.5 } else { 1.0 });
    }
    Ok(TGrid { weight, step, half_points, half_width, weights })
}

/// Values of a Dirichlet polynomial on a grid.
#[derive(Debug, Clone)]
pub struct PolyValues {
    pub values: Vec<Complex64>,
    pub description: String,
}

impl PolyValues {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Evaluate sum_n c(n) n^{-1/2} e^{-i t log n} on the grid by the segmented
/// rotor recurrence. Deterministic for a fixed grid regardless of thread count.
pub fn eval_dirichlet(coeffs: &CoeffSeries, grid: &TGrid) -> PolyValues {
    let terms: Vec<(f64, f64)> = coeffs
        .iter_nonzero()
        .map(|(n, c)| ((n as f64).ln(), c / (n as f64).sqrt()))
        .collect();
    let n_points = grid.len();
    let n_segments = n_points.div_ceil(SEGMENT);
    let step = grid.step();

    let segments: Vec<Vec<Complex64>> = (0..n_segments)
        .into_par_iter()
        .map(|s| {
            let j0 = s * SEGMENT;
            let len = SEGMENT.min(n_points - j0);
            let t0 = grid.point(j0);
            let mut acc = vec![Complex64::new(0.0, 0.0); len];
            for &(log_n, amp) in &terms {
                // phase seed for this segment, then unit rotor steps
                let (s0, c0) = (-t0 * log_n).sin_cos();
                let (sr, cr) = (-step * log_n).sin_cos();
                let (mut pr, mut pi) = (c0, s0);
                for a in acc.iter_mut().take(len) {
                    a.re += amp * pr;
                    a.im += amp * pi;
                    let nr = pr * cr - pi * sr;
                    pi = pr * sr + pi * cr;
                    pr = nr;
                }
            }
            acc
        })
        .collect();

    let mut values = Vec::with_capacity(n_points);
    for seg in segments {
        values.extend(seg);
    }
    PolyValues { values, description: coeffs.description.clone() }
}

/// Direct per-point evaluation (the oracle for the recurrence).
pub fn eval_dirichlet_direct(coeffs: &CoeffSeries, points: &[f64]) -> Vec<Complex64> {
    let terms: Vec<(f64, f64)> = coeffs
        .iter_nonzero()
        .map(|(n, c)| ((n as f64).ln(), c / (n as f64).sqrt()))
        .collect();
    points
        .iter()
        .map(|&t| {
            let mut z = Complex64::new(0.0, 0.0);
            for &(log_n, amp) in &terms {
                let (s, c) = (-t * log_n).sin_cos();
                z.re += amp * c;
                z.im += amp * s;
            }
            z
        })
        .collect()
}

/// Evaluate the smoothed log-derivative polynomial on the grid: the zhat
/// coefficient series scaled by -2/(alpha log T), applied exactly once here.
pub fn eval_z(
    alpha: f64,
    t: f64,
    grid: &TGrid,
    tables: &crate::arith::FactorTables,
) -> Result<PolyValues> {
    let coeffs = crate::arith::zhat_coeffs(alpha, t, tables)?;
    let mut vals = eval_dirichlet(&coeffs, grid);
    let scale = -2.0 / (alpha * t.ln());
    for v in &mut vals.values {
        *v *= scale;
    }
    vals.description = format!("Z_alpha on grid, alpha = {alpha}, T = {t}");
    Ok(vals)
}

/// Gaussian suppression of an off-diagonal pair (m, n):
/// exp(-T^2 log^2(m/n) / (4 log^2 T)). Symmetric in (m, n).
pub fn off_diagonal_factor(m: u64, n: u64, t: f64) -> f64 {
    let ratio = (m as f64 / n as f64).ln();
    let x = t * ratio / (2.0 * t.ln());
    (-x * x).exp()
}

/// Deterministic pairwise (tree) summation.
pub fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 64 {
        let mut s = Complex64::new(0.0, 0.0);
        for x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise summation for reals.
pub fn pairwise_sum_f64(xs: &[f64]) -> f64 {
    if xs.len() <= 64 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_f64(&xs[..mid]) + pairwise_sum_f64(&xs[mid..])
}
