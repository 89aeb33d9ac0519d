//! Oscillatory quadrature of moments of Z.
//!
//!     cargo run --release --example moments

use hardy_moments::quadrature::{
    cumulative_profile, integrate_moment, shifted_second_moment_fit, MomentKind, QuadratureSpec,
};

fn main() -> hardy_moments::Result<()> {
    let spec = QuadratureSpec::default();
    for (kind, t, u) in [
        (MomentKind::M1, 10_000.0, 0.0),
        (MomentKind::M3Shift, 2000.0, 0.0),
        (MomentKind::M3Shift, 2000.0, 2.0),
        (MomentKind::M4, 5000.0, 0.0),
    ] {
        let r = integrate_moment(kind, t, u, &spec)?;
        println!(
            "{:>8} T = {t:>6} U = {u}: {:>20.10} (est_error {:.1e}, normalized {:.4})",
            kind.name(),
            r.value,
            r.est_error,
            r.normalized.unwrap_or(f64::NAN)
        );
    }

    let checkpoints: Vec<f64> = (1..=10).map(|k| 1000.0 * k as f64).collect();
    println!("int_0^T Z(t) dt / T^(1/4):");
    for p in cumulative_profile(MomentKind::M1, 0.0, &checkpoints, &spec)? {
        println!("  T = {:>6}: {:+.4}", p.T, p.normalized.unwrap_or(f64::NAN));
    }

    for alpha in [0.5, 1.0] {
        let fit = shifted_second_moment_fit(alpha, 10_000.0, 21, &spec)?;
        println!(
            "shifted second moment, alpha = {alpha}: constant {:.4}, closer to {}",
            fit.fitted_constant, fit.closer
        );
    }
    Ok(())
}
