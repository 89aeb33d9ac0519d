//! The cubic moment of Z against its divisor-sum expansion.
//!
//!     cargo run --release --example explicit_formula

use hardy_moments::divisor::build_divisor_table;
use hardy_moments::explicit::{compare_cubic_moment, Variant};
use hardy_moments::quadrature::QuadratureSpec;
use hardy_moments::saddle::summation_range;

fn main() -> hardy_moments::Result<()> {
    let spec = QuadratureSpec::default();
    let table = build_divisor_table(summation_range(4000.0, 0.0)?.n_hi)?;
    println!(
        "{:>5} {:>7} {:>6} {:>13} {:>13} {:>11} {:>7}",
        "T", "U", "shape", "lhs", "Re rhs", "Im rhs", "norm"
    );
    for t in [500.0, 1000.0, 2000.0, 4000.0] {
        for u in [0.0, 2.0, f64::powf(t, 0.3)] {
            for v in [Variant::Exact, Variant::Leading] {
                let c = compare_cubic_moment(t, u, v, false, &spec, &table)?;
                println!(
                    "{t:>5} {u:>7.3} {:>6} {:>13.4} {:>13.4} {:>11.4} {:>7.4}",
                    v.name(),
                    c.lhs,
                    c.rhs.re,
                    c.rhs.im,
                    c.normalized
                );
            }
        }
    }
    let c = compare_cubic_moment(2000.0, 2.0, Variant::Exact, true, &spec, &table)?;
    println!(
        "int Z(t) Z^2(t+2) over [1000, 2000]: {:.4}, sum {:.4}, normalized {:.4}",
        c.lhs, c.rhs.re, c.normalized
    );
    Ok(())
}
