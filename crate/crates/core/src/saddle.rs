//! Saddle points of the phase `f_n(t)` and the per-`n` terms of the explicit
//! formula.
//!
//! The saddle equation `t^2 (t + U) = 8 pi^3 n^2` is solved for the offset
//! `tau = t_n - a`, `a = 2 pi n^{2/3}`. Dividing the cubic by `a^2` gives
//!
//! `G(tau) = 3 tau + U + (3 tau^2 + 2 U tau) / a + tau^2 (tau + U) / a^2 = 0`,
//!
//! which has no cancellation when `U` is small against `a`, so the offsets and
//! the errors of the asymptotic approximants stay accurate to full relative
//! precision even where `t_n` itself is of size 1e4 or more.

use crate::dd::Dd;
use crate::divisor::DivisorTable;
use crate::error::{Error, Result};
use crate::ComplexValue;
use serde::Serialize;
use std::f64::consts::PI;

/// Newton iteration cap.
pub const MAX_ITERATIONS: usize = 64;
/// Required relative residual of the cubic.
pub const RESIDUAL_TOL: f64 = 1e-12;

/// `2 pi sqrt(2/3)`, the leading amplitude constant.
pub const LEADING_CONSTANT: f64 = 5.130_199_320_647_456;

/// Which product of `Z` values the saddle belongs to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Orientation {
    /// `Z^2(t) Z(t + U)`, saddle equation `t^2 (t + U) = 8 pi^3 n^2`.
    #[default]
    Direct,
    /// `Z(t) Z^2(t + U)`, saddle equation `t (t + U)^2 = 8 pi^3 n^2`.
    Conjugate,
}

/// `f_n` and its first two derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseFunction {
    pub n: u64,
    pub u: f64,
    pub orientation: Orientation,
}

impl PhaseFunction {
    pub fn new(n: u64, u: f64) -> Self {
        PhaseFunction {
            n,
            u,
            orientation: Orientation::Direct,
        }
    }

    pub fn conjugate(n: u64, u: f64) -> Self {
        PhaseFunction {
            n,
            u,
            orientation: Orientation::Conjugate,
        }
    }

    /// Weights `(w_t, w_{t+U})` of the two logarithms; they sum to 3/2.
    fn weights(&self) -> (f64, f64) {
        match self.orientation {
            Orientation::Direct => (1.0, 0.5),
            Orientation::Conjugate => (0.5, 1.0),
        }
    }

    /// `w_t t log(t / 2 pi) + w_U (t+U) log((t+U) / 2 pi) - 3t/2 - t log n`.
    pub fn f(&self, t: f64) -> f64 {
        let (wa, wb) = self.weights();
        let v = t + self.u;
        wa * t * (t / (2.0 * PI)).ln() + wb * v * (v / (2.0 * PI)).ln()
            - 1.5 * t
            - t * (self.n as f64).ln()
    }

    pub fn f_prime(&self, t: f64) -> f64 {
        let (wa, wb) = self.weights();
        let v = t + self.u;
        wa * (t / (2.0 * PI)).ln() + wb * (v / (2.0 * PI)).ln() - (self.n as f64).ln()
    }

    pub fn f_second(&self, t: f64) -> f64 {
        let (wa, wb) = self.weights();
        wa / t + wb / (t + self.u)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SaddlePoint {
    pub n: u64,
    pub u: f64,
    pub orientation: Orientation,
    pub t_n: f64,
    /// `t_n - 2 pi n^{2/3}`, carried separately for full relative accuracy.
    pub offset: f64,
    /// `|t^2 (t+U) - 8 pi^3 n^2| / (8 pi^3 n^2)` (or the conjugate cubic).
    pub residual: f64,
    /// First approximation `2 pi n^{2/3}`.
    pub approx1: f64,
    /// Second approximation, one correction linear in `U`.
    pub approx2: f64,
    /// Third approximation, adding the `U^2 n^{-2/3}` term.
    pub approx3: f64,
    pub iterations: usize,
}

impl SaddlePoint {
    /// `a = 2 pi n^{2/3}`.
    pub fn base(&self) -> f64 {
        self.t_n - self.offset
    }

    /// Errors `t_n - approx_k` for k = 1, 2, 3, computed from offsets.
    pub fn approximant_errors(&self) -> [f64; 3] {
        let a = self.base();
        let (c1, c2) = linear_and_quadratic(self.orientation);
        let u = self.u;
        [
            self.offset,
            self.offset - c1 * u,
            self.offset - c1 * u - c2 * u * u / a,
        ]
    }
}

fn linear_and_quadratic(o: Orientation) -> (f64, f64) {
    match o {
        Orientation::Direct => (-1.0 / 3.0, 1.0 / 9.0),
        Orientation::Conjugate => (-2.0 / 3.0, 1.0 / 9.0),
    }
}

/// `2 pi n^{2/3}`.
pub fn base_point(n: u64) -> f64 {
    let c = (n as f64).cbrt();
    2.0 * PI * c * c
}

/// `n^{2/3}`.
pub fn n_two_thirds(n: u64) -> f64 {
    let c = (n as f64).cbrt();
    c * c
}

fn check_inputs(n: u64, u: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "n",
            detail: "n must be >= 1".into(),
        });
    }
    if !u.is_finite() {
        return Err(Error::NonFinite("U"));
    }
    if u < 0.0 {
        return Err(Error::OutOfRange {
            what: "U",
            detail: format!("{u} < 0"),
        });
    }
    Ok(())
}

/// `G(tau)` and `G'(tau)` for the scaled cubic.
fn scaled_cubic(o: Orientation, tau: f64, u: f64, a: f64) -> (f64, f64) {
    match o {
        Orientation::Direct => {
            let g = 3.0 * tau
                + u
                + (3.0 * tau * tau + 2.0 * u * tau) / a
                + tau * tau * (tau + u) / (a * a);
            let gp = 3.0 + (6.0 * tau + 2.0 * u) / a + (3.0 * tau * tau + 2.0 * u * tau) / (a * a);
            (g, gp)
        }
        Orientation::Conjugate => {
            let v = tau + u;
            let g = tau + 2.0 * v + (2.0 * tau * v + v * v) / a + tau * v * v / (a * a);
            let gp = 3.0 + (2.0 * tau + 4.0 * v) / a + (v * v + 2.0 * tau * v) / (a * a);
            (g, gp)
        }
    }
}

/// Relative residual of the unscaled cubic, in double-double.
fn cubic_residual(o: Orientation, n: u64, t: f64, u: f64) -> f64 {
    let td = Dd::from_f64(t);
    let vd = td + Dd::from_f64(u);
    let lhs = match o {
        Orientation::Direct => td * td * vd,
        Orientation::Conjugate => td * vd * vd,
    };
    let nd = Dd::from_f64(n as f64);
    let rhs = Dd::PI.sqr() * Dd::PI.mul_f64(8.0) * nd * nd;
    ((lhs - rhs) / rhs).to_f64().abs()
}

fn solve(o: Orientation, n: u64, u: f64) -> Result<SaddlePoint> {
    check_inputs(n, u)?;
    let a = base_point(n);
    // Newton from tau = 0 (the first approximation). G is increasing and
    // convex to the right of the root and G(0) >= 0, so iterates decrease
    // monotonically towards it.
    let mut tau = 0.0f64;
    let mut iterations = 0;
    loop {
        let (g, gp) = scaled_cubic(o, tau, u, a);
        if g == 0.0 {
            break;
        }
        let step = g / gp;
        let next = tau - step;
        iterations += 1;
        let done = step.abs() <= 4.0 * f64::EPSILON * next.abs() || next == tau;
        tau = next;
        if done {
            break;
        }
        if iterations >= MAX_ITERATIONS {
            let residual = cubic_residual(o, n, a + tau, u);
            return Err(Error::NoConvergence { n, u, residual });
        }
    }
    let t_n = a + tau;
    let residual = cubic_residual(o, n, t_n, u);
    if !(residual <= RESIDUAL_TOL) || t_n <= 0.0 {
        return Err(Error::NoConvergence { n, u, residual });
    }
    let (c1, c2) = linear_and_quadratic(o);
    Ok(SaddlePoint {
        n,
        u,
        orientation: o,
        t_n,
        offset: tau,
        residual,
        approx1: a,
        approx2: a + c1 * u,
        approx3: a + c1 * u + c2 * u * u / a,
        iterations,
    })
}

/// Positive root of `t^2 (t + U) = 8 pi^3 n^2`.
pub fn solve_saddle(n: u64, u: f64) -> Result<SaddlePoint> {
    solve(Orientation::Direct, n, u)
}

/// Positive root of `t (t + U)^2 = 8 pi^3 n^2`.
pub fn solve_saddle_conjugate(n: u64, u: f64) -> Result<SaddlePoint> {
    solve(Orientation::Conjugate, n, u)
}

/// Range of summation and the saddle window `[T/2, T]` in terms of `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct SummationRange {
    pub T: f64,
    pub U: f64,
    pub T0: f64,
    pub T1: f64,
    pub N0: f64,
    pub N1: f64,
    pub n_lo: u64,
    pub n_hi: u64,
}

impl SummationRange {
    /// Number of integers in `[n_lo, n_hi]`.
    pub fn n_terms(&self) -> u64 {
        (self.n_hi + 1).saturating_sub(self.n_lo)
    }

    /// Integers `n` with saddle point inside `[T/2, T]`.
    pub fn saddle_window(&self) -> (u64, u64) {
        (self.N1.ceil() as u64, self.N0.floor() as u64)
    }
}

/// `T0 = T^{3/2} / sqrt(8 pi^3)`, `T1` the same at `T/2`, and the shifted
/// `N0 = sqrt(T^2 (T+U) / (8 pi^3))`, `N1` the same at `T/2`.
#[allow(non_snake_case)]
pub fn summation_range(T: f64, U: f64) -> Result<SummationRange> {
    if !(T.is_finite() && U.is_finite()) {
        return Err(Error::NonFinite("T or U"));
    }
    if T <= 0.0 {
        return Err(Error::OutOfRange {
            what: "T",
            detail: format!("{T} <= 0"),
        });
    }
    if U < 0.0 || U > T.sqrt() {
        return Err(Error::OutOfRange {
            what: "U",
            detail: format!("{U} not in [0, sqrt(T)]"),
        });
    }
    // Written as x sqrt(x) with x = T / 2 pi so that T = 2 pi gives T0 = 1
    // exactly and U = 0 gives N0 = T0 bit for bit.
    let x = T / (2.0 * PI);
    let y = T / (4.0 * PI);
    let s = U / (2.0 * PI);
    let T0 = x * x.sqrt();
    let T1 = y * y.sqrt();
    let N0 = x * (x + s).sqrt();
    let N1 = y * (y + s).sqrt();
    Ok(SummationRange {
        T,
        U,
        T0,
        T1,
        N0,
        N1,
        n_lo: T1.ceil() as u64,
        n_hi: T0.floor() as u64,
    })
}

/// One summand of the explicit formula in both shapes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FormulaTerm {
    pub n: u64,
    pub u: f64,
    pub orientation: Orientation,
    pub t_n: f64,
    /// Shifted divisor coefficient (`h` or its conjugate-side analogue).
    pub coefficient: ComplexValue,
    /// Term built from the exact saddle: constant phases, coefficient,
    /// `n^{-1/2} sqrt(2 t (t+U) / (3t + 2U)) e^{-3it/2} ((t+U)/2 pi)^{iU/2}`.
    pub exact_term: ComplexValue,
    /// `2 pi sqrt(2/3) h n^{-1/6 + iU/3} e^{-3 pi i n^{2/3} - pi i / 8} (1 + K)`.
    pub leading_term: ComplexValue,
    /// The bracket `1 + K(n, U)`.
    pub k_factor: ComplexValue,
}

/// Exact and leading-form terms for `Z^2(t) Z(t+U)`.
pub fn formula_term(n: u64, u: f64, table: &DivisorTable) -> Result<FormulaTerm> {
    let sp = solve_saddle(n, u)?;
    let h = table.h_shift(n, u)?.value;
    Ok(assemble(&sp, h))
}

/// Terms for `Z(t) Z^2(t+U)`: coefficient `sum_{delta|n} d(delta) delta^{-iU}`,
/// amplitude `sqrt(2 t (t+U) / (3t + U))`, phase factor `((t+U)/2 pi)^{iU}`.
pub fn formula_term_conjugate(n: u64, u: f64, table: &DivisorTable) -> Result<FormulaTerm> {
    let sp = solve_saddle_conjugate(n, u)?;
    let g = table.g_shift(n, u)?;
    Ok(assemble(&sp, g))
}

fn assemble(sp: &SaddlePoint, coefficient: ComplexValue) -> FormulaTerm {
    let (n, u, t, tau) = (sp.n, sp.u, sp.t_n, sp.offset);
    let a = sp.base();
    let nf = n as f64;
    let ln_n = nf.ln();
    // Multiplicity of U in the constant phase, in the power of (t+U)/2pi, and
    // of ln n after eliminating it with the saddle equation.
    let (const_mult, power_mult, amp_den, n_mult) = match sp.orientation {
        Orientation::Direct => (0.5, 0.5, 3.0 * t + 2.0 * u, 1.0 / 3.0),
        Orientation::Conjugate => (1.0, 1.0, 3.0 * t + u, 2.0 / 3.0),
    };
    // (t+U)/2pi = n^{2/3} (1 + (tau+U)/a), so the full phase splits into the
    // leading part and the K phase below; no large argument is ever formed
    // except 3 pi n^{2/3}.
    let k_phase = -const_mult * u - 1.5 * tau + power_mult * u * ((tau + u) / a).ln_1p();
    let lead_phase = -3.0 * PI * n_two_thirds(n) - PI / 8.0 + n_mult * u * ln_n;
    let amp = (2.0 * PI).sqrt() * nf.powf(-0.5) * (2.0 * t * (t + u) / amp_den).sqrt();
    let exact_term = coefficient * ComplexValue::from_polar(amp, lead_phase + k_phase);
    let k_factor = ComplexValue::from_polar(1.0, k_phase);
    let lead_amp = LEADING_CONSTANT * nf.powf(-1.0 / 6.0);
    let leading_term = coefficient * ComplexValue::from_polar(lead_amp, lead_phase) * k_factor;
    FormulaTerm {
        n,
        u,
        orientation: sp.orientation,
        t_n: t,
        coefficient,
        exact_term,
        leading_term,
        k_factor,
    }
}

/// Least-squares fit `k_factor - 1 ~ c2 U^2 n^{-2/3} + c3 U^3 n^{-4/3}` at
/// fixed `n`, real and imaginary parts separately. Returns `(c2, c3)`.
pub fn fit_k_coefficients(n: u64, shifts: &[f64]) -> Result<(ComplexValue, ComplexValue)> {
    if shifts.len() < 2 {
        return Err(Error::OutOfRange {
            what: "shifts",
            detail: "need at least two shifts".into(),
        });
    }
    let m = n_two_thirds(n).recip();
    let mut rows = Vec::with_capacity(shifts.len());
    for &u in shifts {
        let sp = solve_saddle(n, u)?;
        let k = assemble(&sp, ComplexValue::new(1.0, 0.0)).k_factor - 1.0;
        rows.push((u * u * m, u * u * u * m * m, k));
    }
    let (mut s11, mut s12, mut s22) = (0.0, 0.0, 0.0);
    let mut b1 = ComplexValue::new(0.0, 0.0);
    let mut b2 = ComplexValue::new(0.0, 0.0);
    for &(x, y, k) in &rows {
        s11 += x * x;
        s12 += x * y;
        s22 += y * y;
        b1 += k * x;
        b2 += k * y;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() <= 1e-300 || !det.is_finite() {
        return Err(Error::Domain("degenerate shift set for the K fit".into()));
    }
    let c2 = (b1 * s22 - b2 * s12) / det;
    let c3 = (b2 * s11 - b1 * s12) / det;
    Ok((c2, c3))
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    if pts.len() < 2 || pts.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Domain(
            "slope needs two or more positive points".into(),
        ));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::build_divisor_table;

    #[test]
    fn leading_constant() {
        assert!((LEADING_CONSTANT - 2.0 * PI * (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn unit_saddle_is_two_pi() {
        let sp = solve_saddle(1, 0.0).unwrap();
        assert_eq!(sp.t_n, 2.0 * PI);
        assert!(sp.residual < 1e-15);
    }

    #[test]
    fn third_approximation_at_large_n() {
        let (n, u) = (1_000_000u64, 5.0);
        let sp = solve_saddle(n, u).unwrap();
        let nm = (n as f64).powf(-2.0 / 3.0);
        let approx = sp.base() - u / 3.0 + u * u * nm / (18.0 * PI);
        assert!((sp.t_n - approx).abs() <= 10.0 * u.powi(3) * nm * nm);
        // the error is the cubic term -2 U^3 / (81 a^2)
        let e = sp.approximant_errors()[2];
        let want = -2.0 * u.powi(3) / (81.0 * sp.base().powi(2));
        assert!((e - want).abs() < 0.01 * want.abs(), "{e:e} vs {want:e}");
    }

    #[test]
    fn saddle_decreases_in_u() {
        let mut prev = f64::INFINITY;
        for u in [0.0, 0.5, 1.0, 3.0, 10.0] {
            let t = solve_saddle(5000, u).unwrap().t_n;
            assert!(t < prev);
            prev = t;
        }
    }

    #[test]
    fn saddle_is_stationary_and_second_derivative_matches() {
        for (n, u) in [(1u64, 0.0), (17, 2.0), (40_000, 9.0), (1_000_000, 0.3)] {
            for sp in [
                solve_saddle(n, u).unwrap(),
                solve_saddle_conjugate(n, u).unwrap(),
            ] {
                let phi = PhaseFunction {
                    n,
                    u,
                    orientation: sp.orientation,
                };
                assert!(phi.f_prime(sp.t_n).abs() <= 1e-10 * sp.t_n.ln().max(1.0));
                let t = sp.t_n;
                let h = 1e-4 * t;
                let fd = (phi.f_prime(t + h) - phi.f_prime(t - h)) / (2.0 * h);
                assert!((fd - phi.f_second(t)).abs() <= 1e-6 * phi.f_second(t));
                // derivative of f matches f_prime
                let fdf = (phi.f(t + h) - phi.f(t - h)) / (2.0 * h);
                assert!((fdf - phi.f_prime(t)).abs() <= 1e-6 * phi.f(t).abs() / t);
            }
        }
        let phi = PhaseFunction::new(10, 3.0);
        let t = 7.0;
        assert!((phi.f_second(t) - (3.0 * t + 6.0) / (2.0 * t * (t + 3.0))).abs() < 1e-15);
    }

    #[test]
    fn extreme_shift_still_converges() {
        let sp = solve_saddle(1, 1e4).unwrap();
        assert!(sp.t_n > 0.0 && sp.residual <= RESIDUAL_TOL);
        assert!(solve_saddle(0, 1.0).is_err());
        assert!(solve_saddle(3, -1.0).is_err());
    }

    #[test]
    fn range_examples() {
        let r = summation_range(2.0 * PI, 0.0).unwrap();
        assert_eq!(r.T0, 1.0);
        assert!((r.T1 - 2f64.powf(-1.5)).abs() < 1e-15);
        assert_eq!((r.n_lo, r.n_hi, r.n_terms()), (1, 1, 1));
        let r = summation_range(777.0, 0.0).unwrap();
        assert_eq!((r.N0, r.N1), (r.T0, r.T1));
        let r = summation_range(1000.0, 10.0).unwrap();
        assert!((r.N0 / r.T0 - (1.01f64).sqrt()).abs() < 1e-14);
        assert!(summation_range(100.0, 11.0).is_err());
        assert!(summation_range(0.0, 0.0).is_err());
    }

    #[test]
    fn terms_at_zero_shift() {
        let table = build_divisor_table(3000).unwrap();
        for n in [1u64, 2, 12, 999, 2999] {
            let ft = formula_term(n, 0.0, &table).unwrap();
            let d3 = f64::from(table.d3(n).unwrap());
            let nf = n as f64;
            let want = LEADING_CONSTANT
                * d3
                * nf.powf(-1.0 / 6.0)
                * (3.0 * PI * n_two_thirds(n) + PI / 8.0).cos();
            assert!((ft.exact_term.re - want).abs() < 1e-10, "n={n}");
            assert!((ft.k_factor - 1.0).norm() < 1e-12);
            assert!((ft.exact_term - ft.leading_term).norm() < 1e-10);
        }
    }

    #[test]
    fn k_deviation_grows_like_u_squared() {
        let table = build_divisor_table(100_000).unwrap();
        let dev: Vec<f64> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&u| (formula_term(100_000, u, &table).unwrap().k_factor - 1.0).norm())
            .collect();
        for w in dev.windows(2) {
            let r = w[1] / w[0];
            assert!(r > 4.0 / 3.0 && r < 12.0, "ratio {r}");
        }
    }

    #[test]
    fn k_coefficient_is_i_over_twelve_pi() {
        for n in [10_000u64, 1_000_000] {
            let (c2, _) = fit_k_coefficients(n, &[0.5, 1.0, 2.0, 4.0, 8.0]).unwrap();
            let want = ComplexValue::new(0.0, 1.0 / (12.0 * PI));
            assert!((c2 - want).norm() < 1e-3 * want.norm(), "n={n}: {c2}");
        }
    }

    #[test]
    fn conjugate_term_limits() {
        let table = build_divisor_table(500).unwrap();
        for n in [1u64, 6, 360] {
            let a = formula_term(n, 0.0, &table).unwrap();
            let b = formula_term_conjugate(n, 0.0, &table).unwrap();
            assert!((a.exact_term - b.exact_term).norm() < 1e-12);
        }
        // conjugate K has the same leading coefficient
        let ft = formula_term_conjugate(1_000_000, 2.0, &table_for(1_000_000)).unwrap();
        let want = 4.0 * n_two_thirds(1_000_000).recip() / (12.0 * PI);
        assert!((ft.k_factor.im - want).abs() < 0.05 * want);
    }

    fn table_for(n: u64) -> DivisorTable {
        build_divisor_table(n).unwrap()
    }
}
