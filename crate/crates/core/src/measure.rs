//! The mollified probability measure and its quadrature-side moments.
//!
//! A measure context holds the grid, the evaluated mollifier polynomial, and
//! both normalizations: the quadrature mass of omega |A|^2 and the exact
//! diagonal sum of a(n)^2/n. The two agree to the Gaussian off-diagonal
//! suppression, which build_measure verifies.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num::complex::Complex64;

use crate::arith::{mollifier_coeffs, t0_cutoff, CoeffSeries, FactorTables, MollifierSpec};
use crate::closed::Rational;
use crate::error::{Error, Result};
use crate::grid::{eval_dirichlet, eval_z, make_grid, PolyValues, TGrid};

/// How a reported value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quadrature,
    Diagonal,
    ClosedForm,
    MonteCarlo,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::Diagonal => "diagonal",
            Method::ClosedForm => "closed_form",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// A computed moment with provenance and an error estimate.
#[derive(Debug, Clone)]
pub struct MomentResult {
    pub value: f64,
    pub method: Method,
    pub err_estimate: f64,
    /// exact rational payload when the method produces one
    pub exact: Option<Rational>,
    /// size of the discarded imaginary part (grid noise for real series)
    pub im_residual: f64,
}

impl MomentResult {
    pub fn real(value: f64, method: Method, err_estimate: f64) -> Self {
        MomentResult { value, method, err_estimate, exact: None, im_residual: 0.0 }
    }
}

/// Grid parameters used when building a measure.
#[derive(Debug, Clone, Copy)]
pub struct MeasureParams {
    /// largest moment order the grid must support
    pub k_max: u32,
    /// largest alpha the grid must support
    pub alpha_max: f64,
    pub tail_eps: f64,
}

impl Default for MeasureParams {
    fn default() -> Self {
        MeasureParams { k_max: 2, alpha_max: 1.0, tail_eps: 1e-12 }
    }
}

pub struct MeasureContext {
    pub spec: MollifierSpec,
    pub t: f64,
    /// quadrature of omega |A|^2
    pub mass: f64,
    /// exact sum over n < T0 of a(n)^2 / n
    pub diag_mass: f64,
    pub grid: TGrid,
    pub a_series: CoeffSeries,
    pub a_values: PolyValues,
    z_cache: Mutex<HashMap<u64, Arc<PolyValues>>>,
}

impl MeasureContext {
    /// Z values on the grid for a given alpha, cached per alpha.
    pub fn z_values(&self, alpha: f64, tables: &FactorTables) -> Result<Arc<PolyValues>> {
        let key = alpha.to_bits();
        if let Some(v) = self.z_cache.lock().unwrap().get(&key) {
            return Ok(Arc::clone(v));
        }
        let v = Arc::new(eval_z(alpha, self.t, &self.grid, tables)?);
        self.z_cache.lock().unwrap().insert(key, Arc::clone(&v));
        Ok(v)
    }
}

/// Build the measure: evaluate the mollifier on the grid and record both
/// normalizations.
pub fn build_measure(
    spec: MollifierSpec,
    t: f64,
    tables: &FactorTables,
    params: MeasureParams,
) -> Result<MeasureContext> {
    let grid = make_grid(t, params.k_max, params.alpha_max, params.tail_eps)?;
    let a_series = mollifier_coeffs(spec, t, tables)?;
    let a_values = eval_dirichlet(&a_series, &grid);
    let asq: Vec<Complex64> =
        a_values.values.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect();
    let mass = grid.integrate(&asq).re;
    let diag_mass = a_series.sum_sq_over_n();
    if mass <= 0.0 {
        return Err(Error::InvalidParameter(format!("degenerate mass {mass}")));
    }
    Ok(MeasureContext {
        spec,
        t,
        mass,
        diag_mass,
        grid,
        a_series,
        a_values,
        z_cache: Mutex::new(HashMap::new()),
    })
}

/// k-th pseudo-moment by quadrature: integral of omega Z^k |A|^2 over mass.
/// The imaginary residual is recorded and discarded (real coefficient series).
pub fn pseudo_moment_numeric(
    ctx: &MeasureContext,
    k: u32,
    alpha: f64,
    tables: &FactorTables,
) -> Result<MomentResult> {
    ctx.grid.validate_for(k, alpha)?;
    let z = ctx.z_values(alpha, tables)?;
    let vals: Vec<Complex64> = z
        .values
        .iter()
        .zip(&ctx.a_values.values)
        .map(|(zj, aj)| zj.powu(k) * aj.norm_sqr())
        .collect();
    let full = ctx.grid.integrate(&vals) / ctx.mass;
    let coarse = ctx.grid.integrate_coarse(&vals) / ctx.mass;
    Ok(MomentResult {
        value: full.re,
        method: Method::Quadrature,
        err_estimate: (full - coarse).norm(),
        exact: None,
        im_residual: full.im,
    })
}

/// Mean square by quadrature: integral of omega |Z|^2 |A|^2 over mass.
/// This value contains the genuine tail/off-diagonal contribution and serves
/// as the empirical ground truth the closed forms only lower-bound.
pub fn mean_square_numeric(
    ctx: &MeasureContext,
    alpha: f64,
    tables: &FactorTables,
) -> Result<MomentResult> {
    ctx.grid.validate_for(2, alpha)?;
    let z = ctx.z_values(alpha, tables)?;
    let vals: Vec<Complex64> = z
        .values
        .iter()
        .zip(&ctx.a_values.values)
        .map(|(zj, aj)| Complex64::new(zj.norm_sqr() * aj.norm_sqr(), 0.0))
        .collect();
    let full = ctx.grid.integrate(&vals) / ctx.mass;
    let coarse = ctx.grid.integrate_coarse(&vals) / ctx.mass;
    Ok(MomentResult {
        value: full.re,
        method: Method::Quadrature,
        err_estimate: (full - coarse).norm(),
        exact: None,
        im_residual: full.im,
    })
}

/// The tail mean square: quadrature of omega |sum_{n >= T0} b(n) n^{-1/2-it}|^2,
/// with the decomposition companions (full product and head integrals, and the
/// coefficient-level bound on the cross term).
#[derive(Debug, Clone)]
pub struct TailMeanSquare {
    pub tail: MomentResult,
    /// quadrature of omega |B|^2 for the full product polynomial
    pub full: f64,
    /// quadrature of omega |head|^2
    pub head: f64,
    /// bound on |cross term| from coefficients and the off-diagonal factor
    pub cross_bound: f64,
}

pub fn tail_mean_square(
    spec: MollifierSpec,
    alpha: f64,
    t: f64,
    tables: &FactorTables,
    grid: &TGrid,
) -> Result<TailMeanSquare> {
    grid.validate_for(0, alpha)?;
    let b = crate::arith::convolve_b(spec, alpha, t, tables)?;
    let t0 = t0_cutoff(t);
    let len = b.len();
    let mut head_vals = vec![0.0; len as usize + 1];
    let mut tail_vals = vec![0.0; len as usize + 1];
    let mut tail_terms = 0u64;
    for (n, v) in b.iter_nonzero() {
        if (n as f64) < t0 {
            head_vals[n as usize] = v;
        } else {
            tail_vals[n as usize] = v;
            tail_terms += 1;
        }
    }
    if tail_terms == 0 {
        return Err(Error::InvalidParameter(
            "empty tail: product support ends below T0".into(),
        ));
    }
    let head = CoeffSeries::new(head_vals, t, format!("head of {}", b.description));
    let tail = CoeffSeries::new(tail_vals, t, format!("tail of {}", b.description));

    let quad_abs2 = |series: &CoeffSeries| -> (f64, f64) {
        let vals = eval_dirichlet(series, grid);
        let sq: Vec<Complex64> =
            vals.values.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect();
        let full = grid.integrate(&sq).re;
        let coarse = grid.integrate_coarse(&sq).re;
        (full, (full - coarse).abs())
    };
    let (tail_sq, tail_err) = quad_abs2(&tail);
    let (head_sq, _) = quad_abs2(&head);
    let (full_sq, _) = quad_abs2(&b);

    // cross term bounded termwise: 2 sum |b(m) b(n)| / sqrt(mn) * factor(m, n)
    let mut cross = 0.0;
    for (m, bm) in head.iter_nonzero() {
        for (n, bn) in tail.iter_nonzero() {
            cross += 2.0 * (bm * bn).abs() / ((m as f64) * (n as f64)).sqrt()
                * crate::grid::off_diagonal_factor(m, n, t);
        }
    }

    Ok(TailMeanSquare {
        tail: MomentResult::real(tail_sq, Method::Quadrature, tail_err),
        full: full_sq,
        head: head_sq,
        cross_bound: cross,
    })
}
