//! Saddle points t_n of the cubic phase and their expansions in U.
//!
//!     cargo run --release --example saddle_point

use hardy_moments::divisor::build_divisor_table;
use hardy_moments::saddle::{
    fit_k_coefficients, formula_term, log_log_slope, solve_saddle, summation_range,
};
use std::f64::consts::PI;

fn main() -> hardy_moments::Result<()> {
    let n = 1_000_000;
    println!(
        "n = {n}, base point 2 pi n^(2/3) = {:.12}",
        solve_saddle(n, 0.0)?.base()
    );
    println!(
        "{:>4} {:>22} {:>11} {:>11} {:>11}",
        "U", "t_n", "err 1", "err 2", "err 3"
    );
    let mut errs = [Vec::new(), Vec::new(), Vec::new()];
    for u in [1.0, 2.0, 4.0, 8.0] {
        let sp = solve_saddle(n, u)?;
        let e = sp.approximant_errors();
        println!(
            "{u:>4} {:>22.15} {:>11.3e} {:>11.3e} {:>11.3e}",
            sp.t_n, e[0], e[1], e[2]
        );
        for k in 0..3 {
            errs[k].push((u, e[k]));
        }
    }
    for (k, pts) in errs.iter().enumerate() {
        println!(
            "approximation {} error grows like U^{:.3}",
            k + 1,
            log_log_slope(pts)?
        );
    }

    let (c2, c3) = fit_k_coefficients(n, &[0.5, 1.0, 2.0, 4.0])?;
    println!(
        "fitted K coefficient {:.6e} {:+.6e}i (i/(12 pi) = {:.6e}i)",
        c2.re,
        c2.im,
        1.0 / (12.0 * PI)
    );
    println!("next coefficient {:.3e} {:+.3e}i", c3.re, c3.im);

    let range = summation_range(2000.0, 3.0)?;
    println!(
        "T = 2000, U = 3: n runs over [{}, {}], {} terms",
        range.n_lo,
        range.n_hi,
        range.n_terms()
    );
    let table = build_divisor_table(range.n_hi)?;
    let term = formula_term(range.n_lo, 3.0, &table)?;
    println!(
        "first term: exact {:.6} {:+.6}i, leading form {:.6} {:+.6}i",
        term.exact_term.re, term.exact_term.im, term.leading_term.re, term.leading_term.im
    );
    Ok(())
}
