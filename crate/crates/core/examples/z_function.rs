//! Hardy's Z-function: the fast path against the oracle, and the first zero.
//!
//!     cargo run --release --example z_function

use hardy_moments::zeta::{chi_factor, hardy_z, hardy_z_oracle, theta, ZMethod};
use hardy_moments::ComplexValue;

fn main() -> hardy_moments::Result<()> {
    println!(
        "{:>10} {:>22} {:>22} {:>10}",
        "t", "Z (Riemann-Siegel)", "Z (oracle)", "est_error"
    );
    for t in [100.0, 1000.0, 10_000.0, 100_000.0] {
        let fast = hardy_z(t, ZMethod::RiemannSiegel)?;
        let slow = hardy_z_oracle(t, 15)?;
        println!(
            "{t:>10} {:>22.15e} {:>22.15e} {:>10.2e}",
            fast.z, slow.z, fast.est_error
        );
    }

    // Bisect the sign change of Z between 14 and 14.2.
    let (mut lo, mut hi) = (14.0, 14.2);
    let z_lo = hardy_z_oracle(lo, 15)?.z;
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        let z = hardy_z_oracle(mid, 15)?.z;
        if z.signum() == z_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    println!("first zero of Z near t = {:.12}", 0.5 * (lo + hi));

    let chi = chi_factor(ComplexValue::new(0.5, 1000.0))?;
    println!(
        "|chi(1/2 + 1000i)| = {:.17}, theta(1000) = {:.12}",
        chi.modulus,
        theta(1000.0)?
    );
    Ok(())
}
