use std::time::Instant;
use zmom_core::arith::{FactorTables, MollifierSpec};
use zmom_core::measure::{build_measure, pseudo_moment_numeric, MeasureParams};
use zmom_core::oracle::diagonal_moment;

fn main() {
    let t = 1e4;
    let tables = FactorTables::build(10_000).unwrap();
    let t_start = Instant::now();
    for spec in [MollifierSpec::Unit, MollifierSpec::Liouville] {
        let ctx = build_measure(spec, t, &tables, MeasureParams::default()).unwrap();
        println!("{spec:?}: mass = {:.12}, diag = {:.12}, rel = {:.2e}, grid = {} pts",
                 ctx.mass, ctx.diag_mass, (ctx.mass-ctx.diag_mass).abs()/ctx.diag_mass, ctx.grid.len());
        for k in [1u32, 2] {
            let q = pseudo_moment_numeric(&ctx, k, 1.0, &tables).unwrap();
            let d = diagonal_moment(spec, k, 1.0, t, &tables).unwrap();
            println!("  k={k}: quad = {:+.12} (err_est {:.1e}, im {:.1e}), diag = {:+.12}, |delta| = {:.3e}",
                     q.value, q.err_estimate, q.im_residual, d.value, (q.value - d.value).abs());
        }
    }
    println!("elapsed: {:.1?}", t_start.elapsed());
}
