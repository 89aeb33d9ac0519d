//! Riemann–Siegel evaluation of `Z(t)` for `t >= 50`.
//!
//! `Z(t) = 2 sum_{n <= N} n^{-1/2} cos(theta(t) - t log n)
//!        + (-1)^{N-1} a^{-1/2} sum_{k=0}^{4} C_k(p) a^{-k}`
//! with `a = sqrt(t / 2 pi)`, `N = floor(a)`, `p = a - N`.
//!
//! The correction functions `C_k` are combinations of derivatives of
//! `Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)`. Derivatives come from
//! Cauchy integrals of `Psi` on a circle (it is entire), and each `C_k` is
//! stored as a Chebyshev series on `[0, 1]` built once per process.

use crate::error::{Error, Result};
use crate::ComplexValue;
use std::f64::consts::PI;
use std::sync::OnceLock;

use super::chi::theta;

/// Smallest height accepted by the fast path.
pub const MIN_T: f64 = 50.0;

/// Empirical constant in the error estimate `c (t / 2 pi)^{-11/4}` for the
/// five-term expansion; checked against the oracle in the test suite.
pub const ERROR_CONSTANT: f64 = 0.05;

const CHEB_DEGREE: usize = 40;
const CAUCHY_NODES: usize = 64;
const CAUCHY_RADIUS: f64 = 0.5;
const MAX_DERIV: usize = 12;

fn psi(z: ComplexValue) -> ComplexValue {
    let two_pi = 2.0 * PI;
    (two_pi * (z * z - z - 1.0 / 16.0)).cos() / (two_pi * z).cos()
}

/// `Psi^{(k)}(p)` for k = 0..=12 by the trapezoid rule on a circle.
fn psi_derivatives(p: f64) -> [f64; MAX_DERIV + 1] {
    let m = CAUCHY_NODES;
    let mut acc = [ComplexValue::new(0.0, 0.0); MAX_DERIV + 1];
    for j in 0..m {
        // half-step offset keeps every node off the real axis
        let phi = 2.0 * PI * (j as f64 + 0.5) / m as f64;
        let w = ComplexValue::from_polar(1.0, phi);
        let f = psi(p + CAUCHY_RADIUS * w);
        let winv = w.conj();
        let mut wk = ComplexValue::new(1.0, 0.0);
        for a in acc.iter_mut() {
            *a += f * wk;
            wk *= winv;
        }
    }
    let mut out = [0.0; MAX_DERIV + 1];
    let mut fact = 1.0;
    for (k, o) in out.iter_mut().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        *o = (acc[k] / m as f64).re * fact / CAUCHY_RADIUS.powi(k as i32);
    }
    out
}

fn corrections_from_derivatives(d: &[f64; MAX_DERIV + 1]) -> [f64; 5] {
    let p2 = PI * PI;
    let p4 = p2 * p2;
    let p6 = p4 * p2;
    let p8 = p4 * p4;
    [
        d[0],
        -d[3] / (96.0 * p2),
        d[2] / (64.0 * p2) + d[6] / (18432.0 * p4),
        -d[1] / (64.0 * p2) - d[5] / (3840.0 * p4) - d[9] / (5308416.0 * p6),
        d[0] / (128.0 * p2)
            + 19.0 * d[4] / (24576.0 * p4)
            + 11.0 * d[8] / (5898240.0 * p6)
            + d[12] / (2038431744.0 * p8),
    ]
}

struct CorrectionTable {
    coeffs: [[f64; CHEB_DEGREE]; 5],
}

fn table() -> &'static CorrectionTable {
    static TABLE: OnceLock<CorrectionTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let m = CHEB_DEGREE;
        let mut samples = vec![[0.0; 5]; m];
        for (j, s) in samples.iter_mut().enumerate() {
            let x = (PI * (j as f64 + 0.5) / m as f64).cos();
            let p = 0.5 * (x + 1.0);
            *s = corrections_from_derivatives(&psi_derivatives(p));
        }
        let mut coeffs = [[0.0; CHEB_DEGREE]; 5];
        for (k, row) in coeffs.iter_mut().enumerate() {
            for (i, c) in row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, s) in samples.iter().enumerate() {
                    acc += s[k] * (PI * i as f64 * (j as f64 + 0.5) / m as f64).cos();
                }
                *c = 2.0 * acc / m as f64;
            }
            row[0] *= 0.5;
        }
        CorrectionTable { coeffs }
    })
}

fn clenshaw(c: &[f64], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    x * b1 - b2 + c[0]
}

/// `C_0(p) .. C_4(p)` for `p` in `[0, 1)`.
pub fn correction_terms(p: f64) -> [f64; 5] {
    let t = table();
    let x = 2.0 * p - 1.0;
    let mut out = [0.0; 5];
    for (o, c) in out.iter_mut().zip(t.coeffs.iter()) {
        *o = clenshaw(c, x);
    }
    out
}

/// Riemann–Siegel value and error estimate. `t` must satisfy `|t| >= 50`.
pub fn z_riemann_siegel(t: f64) -> Result<(f64, f64)> {
    if !t.is_finite() {
        return Err(Error::NonFinite("t"));
    }
    let t = t.abs();
    if t < MIN_T {
        return Err(Error::MethodRange {
            method: "riemann-siegel",
            t,
            min: MIN_T,
        });
    }
    let th = theta(t)?;
    let a = (t / (2.0 * PI)).sqrt();
    let n_main = a.floor() as usize;
    let p = a - n_main as f64;

    let mut main = 0.0;
    for n in 1..=n_main {
        let nf = n as f64;
        main += (th - t * nf.ln()).cos() / nf.sqrt();
    }
    main *= 2.0;

    let c = correction_terms(p);
    let ainv = 1.0 / a;
    let mut rem = 0.0;
    for ck in c.iter().rev() {
        rem = rem * ainv + ck;
    }
    let sign = if n_main % 2 == 1 { 1.0 } else { -1.0 };
    let z = main + sign * ainv.sqrt() * rem;
    // truncation of the expansion, plus rounding of the phases t log n (~|t log t| ulp)
    let est = ERROR_CONSTANT * (a * a).powf(-11.0 / 4.0)
        + 4.0 * f64::EPSILON * t * t.ln() * (a.ln() + 1.0).sqrt();
    Ok((z, est))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c0_matches_psi_directly() {
        for &p in &[0.0, 0.1, 0.2, 0.33, 0.6, 0.9, 0.99] {
            let direct = psi(ComplexValue::new(p, 0.0)).re;
            let c = correction_terms(p)[0];
            assert!((direct - c).abs() < 1e-13, "p={p}: {direct} vs {c}");
        }
    }

    #[test]
    fn c0_at_removable_points() {
        // Psi(1/4) by l'Hopital: d/dp numerator / d/dp denominator.
        let p: f64 = 0.25;
        let num = -(2.0 * PI * (p * p - p - 1.0 / 16.0)).sin() * 2.0 * PI * (2.0 * p - 1.0);
        let den = -(2.0 * PI * p).sin() * 2.0 * PI;
        assert!((correction_terms(p)[0] - num / den).abs() < 1e-13);
    }

    #[test]
    fn derivative_of_psi_matches_finite_difference() {
        let p = 0.37;
        let d = psi_derivatives(p);
        let h = 1e-5;
        let fd = (psi(ComplexValue::new(p + h, 0.0)).re - psi(ComplexValue::new(p - h, 0.0)).re)
            / (2.0 * h);
        assert!((d[1] - fd).abs() < 1e-7 * d[1].abs().max(1.0));
    }

    #[test]
    fn rejects_low_heights() {
        assert!(matches!(
            z_riemann_siegel(49.0),
            Err(Error::MethodRange { .. })
        ));
    }
}
