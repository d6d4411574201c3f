//! Sieve tables, mollifier coefficient series, and their convolutions.

mod cache;
mod coeffs;
mod sieve;

pub use cache::{cache_file_name, load_or_build, read_cache, write_cache, CACHE_MAGIC, CACHE_VERSION};
pub use coeffs::{
    convolve_b, convolve_b_upto, fit_ar, fit_ar_windowed, max_n_below, mollifier_coeffs,
    t0_cutoff, zhat_coeffs, CoeffSeries, MollifierSpec,
};
pub use sieve::{FactorTables, PrimePower, DEFAULT_SIEVE_BUDGET};
