//! The d3 sieve, shifted coefficients h(n, U), and the growth of sum d3^2.
//!
//!     cargo run --release --example divisor_sieve

use hardy_moments::divisor::build_divisor_table;

fn main() -> hardy_moments::Result<()> {
    let table = build_divisor_table(1_000_000)?;
    println!("d3(n) for n = 1..12: {:?}", &table.d3_slice()[1..=12]);
    println!("sum_(n<=10) d3(n)^2 = {}", table.sum_d3_squared(10)?);
    println!("720 = {:?}", table.factorize(720)?);

    for u in [0.0, 0.7, 3.2] {
        let h = table.h_shift(360, u)?.value;
        println!(
            "h(360, {u}) = {:.10} {:+.10}i, |h| = {:.6} <= d3 = {}",
            h.re,
            h.im,
            h.norm(),
            table.d3(360)?
        );
    }

    println!("{:>9} {:>16} {:>14}", "x", "sum d3^2", "/(x log^8 x)");
    for x in [1_000, 10_000, 100_000, 1_000_000] {
        println!(
            "{x:>9} {:>16} {:>14.6e}",
            table.sum_d3_squared(x)?,
            table.d3_squared_ratio(x)?
        );
    }
    Ok(())
}
