//! The functional-equation factor `chi(s)` with `zeta(s) = chi(s) zeta(1 - s)`,
//! and the Riemann–Siegel theta function `theta(t) = -arg chi(1/2 + it) / 2`.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::ComplexValue;
use std::f64::consts::PI;

/// Height above which `chi` is evaluated from its large-`|t|` expansion.
pub const ASYMPTOTIC_SWITCH: f64 = 50.0;

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2k} / (2k (2k - 1))` for k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// Which formula produced a [`ChiDecomposition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum ChiBranch {
    /// Gamma-function formula with recurrence shift, `|Im s| < 50`.
    Exact,
    /// Stirling expansion applied directly, `|Im s| >= 50`.
    Asymptotic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiDecomposition {
    pub modulus: f64,
    /// Continuous in `t` at fixed `sigma`, zero at `s = 1/2`.
    pub argument: f64,
    pub value: ComplexValue,
    pub branch: ChiBranch,
}

fn stirling_series(z: ComplexValue) -> ComplexValue {
    let zi = z.inv();
    let zi2 = zi * zi;
    let mut acc = ComplexValue::new(0.0, 0.0);
    for c in STIRLING.iter().rev() {
        acc = acc * zi2 + *c;
    }
    acc * zi
}

/// `(z - 1/2) ln z - z + ln(2 pi)/2 + sum_k B_2k / (2k(2k-1) z^(2k-1))`.
fn ln_gamma_stirling(z: ComplexValue) -> ComplexValue {
    (z - 0.5) * z.ln() - z + HALF_LN_TWO_PI + stirling_series(z)
}

/// Log-gamma on the branch that is continuous off the non-positive real axis.
pub fn ln_gamma(z: ComplexValue) -> Result<ComplexValue> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("ln_gamma argument"));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Domain(format!("gamma pole at {}", z.re)));
    }
    const SHIFT_TO: f64 = 15.0;
    if z.norm() >= SHIFT_TO && z.re > 0.0 {
        return Ok(ln_gamma_stirling(z));
    }
    let m = (SHIFT_TO - z.re).ceil().max(0.0) as usize;
    let mut acc = ComplexValue::new(0.0, 0.0);
    for k in 0..m {
        acc += (z + k as f64).ln();
    }
    Ok(ln_gamma_stirling(z + m as f64) - acc)
}

/// `ln chi(s) = (s - 1/2) ln pi + ln Gamma((1 - s)/2) - ln Gamma(s/2)`.
fn ln_chi_exact(s: ComplexValue) -> Result<ComplexValue> {
    Ok((s - 0.5) * PI.ln() + ln_gamma((1.0 - s) * 0.5)? - ln_gamma(s * 0.5)?)
}

fn ln_chi_asymptotic(s: ComplexValue) -> ComplexValue {
    let a = (1.0 - s) * 0.5;
    let b = s * 0.5;
    (s - 0.5) * PI.ln() + ln_gamma_stirling(a) - ln_gamma_stirling(b)
}

/// Evaluate `chi(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s)`.
pub fn chi_factor(s: ComplexValue) -> Result<ChiDecomposition> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::NonFinite("chi_factor argument"));
    }
    let (ln_chi, branch) = if s.im.abs() >= ASYMPTOTIC_SWITCH {
        (ln_chi_asymptotic(s), ChiBranch::Asymptotic)
    } else {
        if s.im == 0.0 {
            let odd_pole = s.re >= 1.0 && s.re == s.re.round() && (s.re as i64) % 2 == 1;
            let even_zero = s.re <= 0.0 && s.re == s.re.round() && (s.re as i64) % 2 == 0;
            if odd_pole || even_zero {
                return Err(Error::Domain(format!(
                    "chi has a pole or zero at s = {}",
                    s.re
                )));
            }
        }
        (ln_chi_exact(s)?, ChiBranch::Exact)
    };
    let modulus = ln_chi.re.exp();
    Ok(ChiDecomposition {
        modulus,
        argument: ln_chi.im,
        value: ComplexValue::from_polar(modulus, ln_chi.im),
        branch,
    })
}

/// Leading term `(2 pi / t)^(s - 1/2) e^{i (t + pi/4)}` of the large-`t`
/// expansion, without corrections. Diagnostics only.
pub fn chi_leading(s: ComplexValue) -> ComplexValue {
    let t = s.im;
    let base = (2.0 * PI / t).ln();
    ((s - 0.5) * base + ComplexValue::new(0.0, t + PI / 4.0)).exp()
}

/// Riemann–Siegel theta in double-double precision.
///
/// This is `-arg chi(1/2 + it) / 2` on the continuous branch of
/// [`chi_factor`]. For `|t| >= 50` the Stirling expansion is summed with the
/// leading terms in double-double so the phase stays accurate to ~1e-20
/// absolute even where `theta` itself is of size 1e6.
pub fn theta_dd(t: f64) -> Result<Dd> {
    if !t.is_finite() {
        return Err(Error::NonFinite("theta argument"));
    }
    if t < 0.0 {
        return theta_dd(-t).map(|x| -x);
    }
    if t < ASYMPTOTIC_SWITCH {
        let c = chi_factor(ComplexValue::new(0.5, t))?;
        return Ok(Dd::from_f64(-0.5 * c.argument));
    }
    let td = Dd::from_f64(t);
    let log_term = (td / Dd::TWO_PI).ln();
    let main = (td * log_term - td).ldexp(-1) - Dd::PI.ldexp(-3);
    let ti = 1.0 / t;
    let ti2 = ti * ti;
    let corr = ti
        * (1.0 / 48.0
            + ti2
                * (7.0 / 5760.0
                    + ti2
                        * (31.0 / 80640.0 + ti2 * (127.0 / 430080.0 + ti2 * (511.0 / 1216512.0)))));
    Ok(main + Dd::from_f64(corr))
}

pub fn theta(t: f64) -> Result<f64> {
    theta_dd(t).map(Dd::to_f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_at_one_half_is_one() {
        let c = chi_factor(ComplexValue::new(0.5, 0.0)).unwrap();
        assert!((c.value - ComplexValue::new(1.0, 0.0)).norm() < 1e-15);
        assert!(c.argument.abs() < 1e-15);
    }

    #[test]
    fn chi_is_unimodular_on_the_critical_line() {
        for &t in &[1.0, 49.9, 50.0, 1000.0, 1e5] {
            let c = chi_factor(ComplexValue::new(0.5, t)).unwrap();
            assert!((c.modulus - 1.0).abs() <= 1e-12, "t={t}: {}", c.modulus);
        }
    }

    #[test]
    fn branches_agree_at_the_switch() {
        for &sigma in &[0.3, 0.5, 0.7] {
            let s = ComplexValue::new(sigma, ASYMPTOTIC_SWITCH);
            let exact = ln_chi_exact(s).unwrap();
            let asym = ln_chi_asymptotic(s);
            assert!(
                (exact - asym).norm() < 1e-12,
                "sigma={sigma}: {exact} vs {asym}"
            );
        }
    }

    #[test]
    fn argument_is_continuous_in_t() {
        let mut prev = chi_factor(ComplexValue::new(0.5, 0.0)).unwrap().argument;
        let mut t = 0.0;
        while t < 120.0 {
            t += 0.01;
            let a = chi_factor(ComplexValue::new(0.5, t)).unwrap().argument;
            // |d arg / dt| stays below 6 on this range
            assert!((a - prev).abs() < 0.06, "jump at t={t}: {prev} -> {a}");
            prev = a;
        }
    }

    #[test]
    fn leading_form_has_one_over_t_error() {
        for &t in &[100.0, 1000.0, 10000.0] {
            let s = ComplexValue::new(0.5, t);
            let full = chi_factor(s).unwrap().value;
            let lead = chi_leading(s);
            let rel = (full - lead).norm() / full.norm();
            assert!(rel < 0.1 / t && rel > 0.01 / t, "t={t}: rel {rel:e}");
        }
    }

    #[test]
    fn theta_matches_chi_argument() {
        for &t in &[50.0, 77.7, 1234.5, 99_999.0] {
            let th = theta(t).unwrap();
            let arg = chi_factor(ComplexValue::new(0.5, t)).unwrap().argument;
            assert!((th + 0.5 * arg).abs() < 1e-9 * th.abs().max(1.0), "t={t}");
        }
        assert!(theta(0.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn poles_are_rejected() {
        assert!(chi_factor(ComplexValue::new(1.0, 0.0)).is_err());
        assert!(chi_factor(ComplexValue::new(-2.0, 0.0)).is_err());
        assert!(chi_factor(ComplexValue::new(f64::NAN, 0.0)).is_err());
        assert!(ln_gamma(ComplexValue::new(-3.0, 0.0)).is_err());
    }

    #[test]
    fn ln_gamma_known_values() {
        // Gamma(1/2) = sqrt(pi), Gamma(5) = 24
        let g = ln_gamma(ComplexValue::new(0.5, 0.0)).unwrap();
        assert!((g.re - 0.5 * PI.ln()).abs() < 1e-14);
        let g = ln_gamma(ComplexValue::new(5.0, 0.0)).unwrap();
        assert!((g.re - 24f64.ln()).abs() < 1e-14);
    }
}
