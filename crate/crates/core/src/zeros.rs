//! Ingestion of published zero tables and the empirical statistics built on
//! them: the windowed sinc-squared zero sum and the shifted-average profile
//! over zeros.

use std::path::Path;

use rayon::prelude::*;

use crate::arith::FactorTables;
use crate::error::{Error, Result};
use crate::grid::pairwise_sum_f64;

/// Ascending imaginary parts of zeros, with provenance.
#[derive(Debug, Clone)]
pub struct ZeroTable {
    pub heights: Vec<f64>,
    pub source: String,
}

impl ZeroTable {
    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }

    pub fn max_height(&self) -> f64 {
        *self.heights.last().unwrap()
    }

    /// Number of zeros with height in (0, t].
    pub fn count_below(&self, t: f64) -> usize {
        self.heights.partition_point(|&g| g <= t)
    }

    /// Zeros in [lo, hi].
    pub fn window(&self, lo: f64, hi: f64) -> &[f64] {
        let a = self.heights.partition_point(|&g| g < lo);
        let b = self.heights.partition_point(|&g| g <= hi);
        &self.heights[a..b]
    }
}

/// Main term of the zero-counting function: (t/2pi) log(t/(2 pi e)) + 7/8.
pub fn zero_count_main_term(t: f64) -> f64 {
    let x = t / std::f64::consts::TAU;
    x * (x / std::f64::consts::E).ln() + 0.875
}

/// Parse a plain-text table: one ascending decimal height per line,
/// '#'-prefixed lines ignored.
pub fn load_zeros(path: &Path) -> Result<ZeroTable> {
    let text = std::fs::read_to_string(path)?;
    let mut heights = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|e| Error::ZeroTable {
            path: path.into(),
            line: idx + 1,
            reason: format!("unparsable height: {e}"),
        })?;
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::ZeroTable {
                path: path.into(),
                line: idx + 1,
                reason: format!("height {v} must be positive and finite"),
            });
        }
        if let Some(&prev) = heights.last() {
            if v <= prev {
                return Err(Error::ZeroTable {
                    path: path.into(),
                    line: idx + 1,
                    reason: format!("non-ascending height {v} after {prev}"),
                });
            }
        }
        heights.push(v);
    }
    if heights.is_empty() {
        return Err(Error::ZeroTable {
            path: path.into(),
            line: 0,
            reason: "no zeros in file".into(),
        });
    }
    Ok(ZeroTable { heights, source: path.display().to_string() })
}

/// Windowed evaluation of the sinc-squared zero sum minus 1/alpha.
#[derive(Debug, Clone, Copy)]
pub struct ZeroSumValue {
    pub value: f64,
    /// bound on the discarded kernel tail beyond the window
    pub truncation_estimate: f64,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Kernel window: |gamma - t| (alpha/2) log T <= 200 pi.
const WINDOW_ARG: f64 = 200.0 * std::f64::consts::PI;

pub fn c_alpha_from_zeros(
    t: f64,
    alpha: f64,
    zt: &ZeroTable,
    t_scale: f64,
) -> Result<ZeroSumValue> {
    if !(0.0..=4.0).contains(&alpha) || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside (0, 4]")));
    }
    let s = 0.5 * alpha * t_scale.ln();
    let cut = WINDOW_ARG / s;
    if t < zt.heights[0] - cut || t > zt.max_height() + cut {
        return Err(Error::InvalidParameter(format!(
            "t = {t} outside table coverage [{}, {}]",
            zt.heights[0],
            zt.max_height()
        )));
    }
    let mut sum = 0.0;
    for &g in zt.window(t - cut, t + cut) {
        let x = s * (g - t);
        let k = sinc(x);
        sum += k * k;
    }
    // local zero density per unit height, for the kernel tail integral
    let density = (t.max(20.0) / std::f64::consts::TAU).ln() / std::f64::consts::TAU;
    let truncation = 2.0 * density / (s * s * cut);
    Ok(ZeroSumValue { value: sum - 1.0 / alpha, truncation_estimate: truncation })
}

/// Average of the imaginary part over zeros offset by 2 pi d / log T:
/// (1/N(T)) sum_{0 < gamma <= T} Im_alpha(gamma - shift), alpha < 1.
///
/// Orientation: with the sign conventions of the smoothed polynomial (the
/// -2/(alpha log T) prefactor), the zero power-sum average makes the
/// *right*-shifted mean equal to the negated profile; the leftward offset
/// used here is the one whose mean matches the positive profile
/// int_0^1 2u(1-u) sin(2 pi u d) du, peaking near 0.27 at d = 0.4147.
/// Both orientations are antisymmetric in d.
pub fn lg_empirical(
    d: f64,
    alpha: f64,
    zt: &ZeroTable,
    t: f64,
    tables: &FactorTables,
) -> Result<f64> {
    if alpha >= 1.0 || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "shifted-average validity needs 0 < alpha < 1, got {alpha}"
        )));
    }
    if zt.max_height() < t {
        return Err(Error::InvalidParameter(format!(
            "table reaches {} < T = {t}",
            zt.max_height()
        )));
    }
    let log_t = t.ln();
    let shift = -std::f64::consts::TAU * d / log_t;
    let denom = alpha * log_t;
    let terms: Vec<(f64, f64)> = tables
        .prime_powers_below(t.powf(alpha))?
        .into_iter()
        .map(|pp| {
            let w = pp.log_p * (1.0 - (pp.q as f64).ln() / denom) / (pp.q as f64).sqrt();
            ((pp.q as f64).ln(), w)
        })
        .collect();
    let zeros = zt.window(f64::MIN_POSITIVE, t);
    if zeros.is_empty() {
        return Err(Error::InvalidParameter("no zeros below T".into()));
    }
    // Im of -2/(alpha log T) sum w_q e^{-i t log q} is +2/(alpha log T) sum w_q sin(t log q)
    let partials: Vec<f64> = zeros
        .par_chunks(4096)
        .map(|chunk| {
            let vals: Vec<f64> = chunk
                .iter()
                .map(|&g| {
                    let tt = g + shift;
                    let mut acc = 0.0;
                    for &(lq, w) in &terms {
                        acc += w * (tt * lq).sin();
                    }
                    acc
                })
                .collect();
            pairwise_sum_f64(&vals)
        })
        .collect();
    let total = pairwise_sum_f64(&partials);
    Ok(2.0 / denom * total / zeros.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_table(lines: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(lines.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn parses_known_first_zeros() {
        let f = write_table("# comment\n14.134725\n21.022040\n25.010858\n");
        let zt = load_zeros(f.path()).unwrap();
        assert_eq!(zt.len(), 3);
        assert!((zt.heights[0] - 14.134725).abs() < 1e-9);
    }

    #[test]
    fn empty_file_rejected() {
        let f = write_table("# only comments\n");
        assert!(matches!(load_zeros(f.path()), Err(Error::ZeroTable { line: 0, .. })));
    }

    #[test]
    fn out_of_order_names_line() {
        let f = write_table("14.1\n25.0\n21.0\n");
        match load_zeros(f.path()) {
            Err(Error::ZeroTable { line, reason, .. }) => {
                assert_eq!(line, 3);
                assert!(reason.contains("non-ascending"));
            }
            other => panic!("expected line-3 failure, got {other:?}"),
        }
    }

    #[test]
    fn garbage_line_reported() {
        let f = write_table("14.1\nnot-a-number\n");
        match load_zeros(f.path()) {
            Err(Error::ZeroTable { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse failure, got {other:?}"),
        }
    }

    #[test]
    fn isolated_zero_contributes_exactly_one() {
        // single zero, huge gaps: at t on the zero the kernel term is 1
        let f = write_table("5000.0\n");
        let zt = load_zeros(f.path()).unwrap();
        let v = c_alpha_from_zeros(5000.0, 1.0, &zt, 1e4).unwrap();
        assert!((v.value - (1.0 - 1.0)).abs() < 1e-12, "v = {}", v.value);
    }

    #[test]
    fn two_zero_gap_configuration() {
        // neighbor at normalized spacing 0.75 with alpha = 2:
        // 1 + sinc^2(0.75 * 2pi) - 1/2 > 0.545
        let t_scale = 10f64.exp();
        let gap = 0.75 * std::f64::consts::TAU / t_scale.ln();
        let f = write_table(&format!("{}\n{}\n", 5000.0, 5000.0 + gap));
        let zt = load_zeros(f.path()).unwrap();
        let v = c_alpha_from_zeros(5000.0, 2.0, &zt, t_scale).unwrap();
        assert!(v.value > 0.545, "v = {}", v.value);
        assert!(v.value < 0.56);
    }

    #[test]
    fn evenly_spaced_table_is_translation_invariant() {
        // gamma_n = n * 2pi / log T: the midpoint kernel value is the same
        // everywhere up to window truncation
        let t_scale = 1e4f64;
        let spacing = std::f64::consts::TAU / t_scale.ln();
        let n0 = 200_000u64;
        let lines: String =
            (0..400_000).map(|i| format!("{}\n", (n0 + i) as f64 * spacing)).collect();
        let f = write_table(&lines);
        let zt = load_zeros(f.path()).unwrap();
        let mut vals = Vec::new();
        for j in [100_000u64, 200_000, 300_000] {
            let mid = (n0 + j) as f64 * spacing + 0.5 * spacing;
            vals.push(c_alpha_from_zeros(mid, 1.0, &zt, t_scale).unwrap().value);
        }
        for w in vals.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-3, "{vals:?}");
        }
    }

    #[test]
    fn lg_guards() {
        let f = write_table("14.134725\n21.022040\n");
        let zt = load_zeros(f.path()).unwrap();
        let tb = FactorTables::build(200).unwrap();
        assert!(lg_empirical(0.5, 1.0, &zt, 100.0, &tb).is_err());
        assert!(lg_empirical(0.5, 0.9, &zt, 1e4, &tb).is_err());
    }

    #[test]
    fn count_main_term_matches_low_height() {
        // 29 zeros below 100
        assert!((zero_count_main_term(100.0) - 29.0).abs() < 0.15);
    }
}
