//! Exponential sums with d3 coefficients and their mean square.
//!
//!     cargo run --release --example exponential_sums

use hardy_moments::divisor::build_divisor_table;
use hardy_moments::expsum::{exp_sum_d3, exp_sum_plain, expsum_scan, good_point_bound};
use std::f64::consts::PI;

fn main() -> hardy_moments::Result<()> {
    let table = build_divisor_table(20_000)?;
    for alpha in [1.0, 2.5, 3.0 * PI] {
        let s = exp_sum_d3(alpha, 10_000, 20_000, &table)?;
        let plain = exp_sum_plain(alpha, 10_000, 20_000)?;
        println!(
            "alpha = {alpha:.4}: |S| = {:>10.3}, plain |T| = {:>8.3}",
            s.norm(),
            plain.value.norm()
        );
    }

    for n in [1000, 10_000] {
        let scan = expsum_scan(1.0, 4.0, n, true, &table)?;
        let rel = (scan.ms_exact - scan.ms_quad).abs() / scan.ms_exact;
        println!(
            "N = {n}: mean square {:.6e}, quadrature rel diff {rel:.1e}, ratio {:.3e}",
            scan.ms_exact, scan.ratio
        );
        if let Some((c, v)) = scan.good_point {
            println!(
                "        |S(C, N)| = {v:.3} at C = {c:.8} (bound {:.3e})",
                good_point_bound(n)
            );
        }
    }
    Ok(())
}
