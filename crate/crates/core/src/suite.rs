//! The acceptance grid: eight checks covering every layer, each producing a
//! one-line verdict plus the measured quantities behind it.

use crate::divisor::{d3_bruteforce, DivisorTable};
use crate::error::{Error, Result};
use crate::explicit::{compare_cubic_moment, MomentComparison, Variant};
use crate::expsum::{
    exp_sum_plain, find_good_point, good_point_bound, mean_square_exact, ms_quad, ratio_scale,
    MsRule,
};
use crate::quadrature::{
    cumulative_profile, integrate_moment, shifted_second_moment_fit, MomentKind, QuadratureSpec,
};
use crate::saddle::{log_log_slope, solve_saddle, summation_range};
use crate::zeta::{chi_factor, hardy_z_oracle, z_riemann_siegel, zeta_oracle};
use crate::ComplexValue;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Level {
    /// Reduced grids, a couple of minutes in total.
    Smoke,
    /// The complete grids.
    Full,
}

impl std::str::FromStr for Level {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "smoke" => Ok(Level::Smoke),
            "full" => Ok(Level::Full),
            other => Err(format!("unknown level {other:?} (expected smoke or full)")),
        }
    }
}

/// Empirical constants for the asymptotic bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub constants: BTreeMap<String, f64>,
}

pub const CAL_CUBIC_NORMALIZED: &str = "cubic_normalized";
pub const CAL_CUBIC_IM_LEAK: &str = "cubic_im_leak";
pub const CAL_M1_NORMALIZED: &str = "m1_normalized";
pub const CAL_PLAIN_SUM: &str = "plain_sum_normalized";
pub const CAL_MEAN_SQUARE_RATIO: &str = "mean_square_ratio";

const PINNED: [(&str, f64); 5] = [
    (CAL_CUBIC_NORMALIZED, 5.0),
    (CAL_CUBIC_IM_LEAK, 5.0),
    (CAL_M1_NORMALIZED, 5.0),
    (CAL_PLAIN_SUM, 50.0),
    (CAL_MEAN_SQUARE_RATIO, 1.0),
];

/// Headroom applied to measured maxima when calibrating.
pub const CALIBRATION_HEADROOM: f64 = 1.25;

impl Default for Calibration {
    fn default() -> Self {
        Calibration {
            constants: PINNED.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

impl Calibration {
    pub fn get(&self, key: &str) -> f64 {
        self.constants
            .get(key)
            .copied()
            .or_else(|| PINNED.iter().find(|(k, _)| *k == key).map(|p| p.1))
            .unwrap_or(f64::INFINITY)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cal: Calibration = serde_json::from_str(&text)?;
        if cal.constants.values().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::BadCache(format!(
                "{}: constants must be positive",
                path.display()
            )));
        }
        Ok(cal)
    }

    /// Load from `path` if it exists, pinned defaults otherwise.
    pub fn load_or_default(path: &Path) -> Result<Self> {
        if path.exists() {
            Self::load(path)
        } else {
            Ok(Self::default())
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Constants `min(pinned, headroom * measured)` from suite reports.
    pub fn from_reports(reports: &[CriterionReport]) -> Self {
        let mut cal = Calibration::default();
        for r in reports {
            for (k, v) in &r.metrics {
                if let Some(key) = k.strip_suffix("_max") {
                    if let Some(slot) = cal.constants.get_mut(key) {
                        if v.is_finite() && *v > 0.0 {
                            *slot = slot.min(CALIBRATION_HEADROOM * v);
                        }
                    }
                }
            }
        }
        cal
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    /// Reported but never counted as a failure.
    pub informational: bool,
    pub details: Vec<String>,
    pub metrics: BTreeMap<String, f64>,
    pub elapsed_s: f64,
}

impl CriterionReport {
    fn new(id: u8, title: &'static str) -> Self {
        CriterionReport {
            id,
            title,
            passed: true,
            informational: false,
            details: Vec::new(),
            metrics: BTreeMap::new(),
            elapsed_s: 0.0,
        }
    }

    fn check(&mut self, ok: bool, what: String) {
        self.details
            .push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
        self.passed &= ok;
    }

    fn note(&mut self, what: String) {
        self.details.push(format!("info {what}"));
    }

    fn metric(&mut self, key: &str, v: f64) {
        self.metrics.insert(key.to_string(), v);
    }

    /// `criterion N [PASS|FAIL|INFO] title (t s)`
    pub fn line(&self) -> String {
        let tag = if self.informational {
            "INFO"
        } else if self.passed {
            "PASS"
        } else {
            "FAIL"
        };
        format!(
            "criterion {} [{tag}] {} ({:.1} s)",
            self.id, self.title, self.elapsed_s
        )
    }
}

fn timed(
    mut r: CriterionReport,
    start: Instant,
    body: impl FnOnce(&mut CriterionReport) -> Result<()>,
) -> CriterionReport {
    if let Err(e) = body(&mut r) {
        r.check(false, format!("error: {e}"));
    }
    r.elapsed_s = start.elapsed().as_secs_f64();
    r
}

fn cubic_grid(level: Level) -> Vec<f64> {
    match level {
        Level::Smoke => vec![500.0, 1000.0],
        Level::Full => vec![500.0, 1000.0, 2000.0, 4000.0],
    }
}

fn comparison_detail(c: &MomentComparison) -> String {
    format!(
        "T={} U={:.4} {}: lhs {:.6} Re rhs {:.6} Im rhs {:.3} normalized {:.4}",
        c.T,
        c.U,
        c.variant.name(),
        c.lhs,
        c.rhs.re,
        c.rhs.im,
        c.normalized
    )
}

/// Unshifted cubic formula: bounded normalized difference, slope of
/// `log |diff|` against `log T` at most 0.85.
pub fn criterion_1(level: Level, cal: &Calibration, table: &DivisorTable) -> CriterionReport {
    timed(
        CriterionReport::new(1, "cubic explicit formula at U = 0"),
        Instant::now(),
        |r| {
            let spec = QuadratureSpec::default();
            let bound = cal.get(CAL_CUBIC_NORMALIZED);
            let mut pts = Vec::new();
            let mut worst: f64 = 0.0;
            for t in cubic_grid(level) {
                let c = compare_cubic_moment(t, 0.0, Variant::Exact, false, &spec, table)?;
                r.check(c.normalized <= bound, comparison_detail(&c));
                worst = worst.max(c.normalized);
                pts.push((t, c.abs_diff));
            }
            let slope = log_log_slope(&pts)?;
            r.check(
                slope <= 0.85,
                format!("slope of log|diff| vs log T = {slope:.4} (<= 0.85)"),
            );
            r.metric("cubic_normalized_max", worst);
            r.metric("diff_slope", slope);
            Ok(())
        },
    )
}

/// Shifted formula, both summand shapes, normalized difference and imaginary
/// part bounded uniformly in `U`.
pub fn criterion_2(level: Level, cal: &Calibration, table: &DivisorTable) -> CriterionReport {
    timed(
        CriterionReport::new(2, "explicit formula with shifts"),
        Instant::now(),
        |r| {
            let spec = QuadratureSpec::default();
            let bound = cal.get(CAL_CUBIC_NORMALIZED);
            let im_bound = cal.get(CAL_CUBIC_IM_LEAK);
            let (mut worst, mut worst_im): (f64, f64) = (0.0, 0.0);
            for t in cubic_grid(level) {
                for u in [0.5, 2.0, t.powf(0.3)] {
                    for v in [Variant::Exact, Variant::Leading] {
                        let c = compare_cubic_moment(t, u, v, false, &spec, table)?;
                        let im = c.im_leak / t.powf(0.75);
                        r.check(
                            c.normalized <= bound && im <= im_bound,
                            format!("{} |Im|/T^0.75 {im:.4}", comparison_detail(&c)),
                        );
                        worst = worst.max(c.normalized);
                        worst_im = worst_im.max(im);
                    }
                }
            }
            r.metric("cubic_normalized_max", worst);
            r.metric("cubic_im_leak_max", worst_im);
            Ok(())
        },
    )
}

/// Saddle residuals over the `T = 2000` range and the exponents of the
/// expansion ladder at `n = 10^6`.
pub fn criterion_3(_level: Level) -> CriterionReport {
    timed(
        CriterionReport::new(3, "saddle kernel"),
        Instant::now(),
        |r| {
            let mut worst: f64 = 0.0;
            for u in [0.0, 3.0] {
                let range = summation_range(2000.0, u)?;
                let (w_lo, w_hi) = range.saddle_window();
                for n in range.n_lo.min(w_lo)..=range.n_hi.max(w_hi) {
                    worst = worst.max(solve_saddle(n, u)?.residual);
                }
            }
            r.check(
                worst <= 1e-12,
                format!("max residual over the T = 2000 ranges {worst:.2e} (<= 1e-12)"),
            );
            r.metric("max_residual", worst);

            let mut bracket_ok = true;
            for t in [500.0, 2000.0] {
                for u in [0.0, 3.0] {
                    let range = summation_range(t, u)?;
                    let (w_lo, w_hi) = range.saddle_window();
                    for n in 1..=w_hi + 50 {
                        let tn = solve_saddle(n, u)?.t_n;
                        let inside_n = n >= w_lo && n <= w_hi;
                        let inside_t = tn >= t / 2.0 && tn <= t;
                        bracket_ok &= inside_n == inside_t;
                    }
                }
            }
            r.check(
                bracket_ok,
                "n in [ceil N1, floor N0] iff t_n in [T/2, T] for T in {500, 2000}, U in {0, 3}"
                    .into(),
            );

            let shifts = [1.0, 2.0, 4.0, 8.0];
            let mut errs = [Vec::new(), Vec::new(), Vec::new()];
            for &u in &shifts {
                let e = solve_saddle(1_000_000, u)?.approximant_errors();
                for k in 0..3 {
                    errs[k].push((u, e[k]));
                }
            }
            for (k, pts) in errs.iter().enumerate() {
                let slope = log_log_slope(pts)?;
                let want = (k + 1) as f64;
                r.check(
                    (slope - want).abs() <= 0.15,
                    format!(
                        "approximant {} error exponent {slope:.4} (target {want} +- 0.15)",
                        k + 1
                    ),
                );
                r.metric(&format!("ladder_slope_{}", k + 1), slope);
            }
            Ok(())
        },
    )
}

/// Sieve against brute force, small sums, `h` invariants, and the
/// stabilization of `sum d3^2 / (x log^8 x)`.
pub fn criterion_4(_level: Level, table: &DivisorTable) -> CriterionReport {
    timed(
        CriterionReport::new(4, "divisor layer"),
        Instant::now(),
        |r| {
            let mut mismatches = 0;
            for n in 1..=10_000u64 {
                if u64::from(table.d3(n)?) != d3_bruteforce(n)? {
                    mismatches += 1;
                }
            }
            r.check(
                mismatches == 0,
                format!("sieve d3 vs brute force for n <= 10^4: {mismatches} mismatches"),
            );
            let s10 = table.sum_d3_squared(10)?;
            r.check(s10 == 371, format!("sum_(n<=10) d3^2 = {s10} (371)"));

            let mut worst_mult: f64 = 0.0;
            for u in [0.0, 0.7, 3.2] {
                for m in 2..=5000u64 {
                    for n in 2..=10_000 / m {
                        if gcd(m, n) != 1 {
                            continue;
                        }
                        let prod = table.h_shift(m, u)?.value * table.h_shift(n, u)?.value;
                        let whole = table.h_shift(m * n, u)?.value;
                        worst_mult =
                            worst_mult.max((whole - prod).norm() / f64::from(table.d3(m * n)?));
                    }
                }
            }
            r.check(
                worst_mult <= 1e-10,
                format!("h multiplicativity, worst |h(mn)-h(m)h(n)|/d3(mn) = {worst_mult:.2e}"),
            );
            let mut triangle_ok = true;
            for u in [0.0, 1.0, 10.0] {
                for n in 1..=10_000u64 {
                    triangle_ok &=
                        table.h_shift(n, u)?.value.norm() <= f64::from(table.d3(n)?) + 1e-12;
                }
            }
            r.check(
                triangle_ok,
                "|h(n,U)| <= d3(n) for n <= 10^4, U in {0, 1, 10}".into(),
            );

            let r5 = table.d3_squared_ratio(100_000)?;
            let r6 = table.d3_squared_ratio(1_000_000)?;
            let variation = (r6 - r5).abs() / r5;
            r.check(
            variation < 0.2,
            format!("sum d3^2/(x log^8 x): {r5:.5e} at 1e5, {r6:.5e} at 1e6, variation {:.1}% (< 20%)", 100.0 * variation),
        );
            r.metric("d3sq_ratio_1e5", r5);
            r.metric("d3sq_ratio_1e6", r6);
            Ok(())
        },
    )
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Mean square closed form against sampled quadrature, the normalized ratio,
/// and a good point below `N^{2/3} log^{9/2} N`.
pub fn criterion_5(level: Level, cal: &Calibration, table: &DivisorTable) -> CriterionReport {
    timed(
        CriterionReport::new(5, "mean square of S(alpha, N)"),
        Instant::now(),
        |r| {
            let ns: &[u64] = match level {
                Level::Smoke => &[1000],
                Level::Full => &[1000, 10_000],
            };
            let ratio_bound = cal.get(CAL_MEAN_SQUARE_RATIO);
            let mut worst: f64 = 0.0;
            for &n in ns {
                let exact = mean_square_exact(1.0, 4.0, n, table)?;
                let quad = ms_quad(1.0, 4.0, n, MsRule::Simpson, table)?;
                let rel = (exact - quad).abs() / exact;
                r.check(
                    rel <= 1e-6,
                    format!(
                        "N={n}: ms_exact {exact:.10e}, quadrature rel diff {rel:.2e} (<= 1e-6)"
                    ),
                );
                let ratio = exact / ratio_scale(n);
                r.check(
                    ratio <= ratio_bound,
                    format!("N={n}: ms/(N^(4/3) log^9 N) = {ratio:.4e}"),
                );
                worst = worst.max(ratio);
                let (c, mag) = find_good_point(1.0, 4.0, n, table)?;
                let bound = good_point_bound(n);
                r.check(
                    mag <= bound,
                    format!("N={n}: |S(C,N)| = {mag:.4} at C = {c:.6} (bound {bound:.4e})"),
                );
            }
            r.metric("mean_square_ratio_max", worst);
            let plain = exp_sum_plain(3.0 * PI, 10_000, 20_000)?
                .normalized
                .unwrap_or(f64::NAN);
            r.check(
                plain <= cal.get(CAL_PLAIN_SUM),
                format!("plain sum |T(3 pi, 10^4)| |alpha| / N^(1/3) = {plain:.4}"),
            );
            r.metric("plain_sum_normalized_max", plain);
            Ok(())
        },
    )
}

/// Fourth-moment ratio and the first moment's size and sign changes.
pub fn criterion_6(level: Level, cal: &Calibration) -> CriterionReport {
    timed(
        CriterionReport::new(6, "moment sanity"),
        Instant::now(),
        |r| {
            let spec = QuadratureSpec::default();
            let m4 = integrate_moment(MomentKind::M4, 5000.0, 0.0, &spec)?;
            let ratio = m4.normalized.unwrap_or(f64::NAN);
            r.check(
                (0.7..=1.3).contains(&ratio),
                format!("M4(5000) / (T log^4 T / 2 pi^2) = {ratio:.4} (in [0.7, 1.3])"),
            );
            r.metric("m4_ratio_5000", ratio);
            if level == Level::Full {
                for t in [1000.0, 20_000.0] {
                    let v = integrate_moment(MomentKind::M4, t, 0.0, &spec)?
                        .normalized
                        .unwrap_or(f64::NAN);
                    r.note(format!("M4 ratio at T = {t}: {v:.4}"));
                }
                for t in [1000.0, 5000.0, 20_000.0] {
                    let v = integrate_moment(MomentKind::AbsCube, t, 0.0, &spec)?
                        .normalized
                        .unwrap_or(f64::NAN);
                    r.note(format!(
                        "int_1^T |Z|^3 / (T log^(9/4) T) at T = {t}: {v:.4}"
                    ));
                }
            }
            let top: f64 = match level {
                Level::Smoke => 10_000.0,
                Level::Full => 100_000.0,
            };
            let steps = ((top - 1000.0) / 100.0).round() as usize;
            let cps: Vec<f64> = (0..=steps).map(|i| 1000.0 + 100.0 * i as f64).collect();
            let prof = cumulative_profile(MomentKind::M1, 0.0, &cps, &spec)?;
            let bound = cal.get(CAL_M1_NORMALIZED);
            let mut worst: f64 = 0.0;
            for p in prof
                .iter()
                .filter(|p| [1000.0, 10_000.0, 100_000.0].contains(&p.T))
            {
                let v = p.normalized.unwrap_or(f64::NAN).abs();
                worst = worst.max(v);
                r.check(
                    v <= bound,
                    format!("|int_0^T Z| / T^(1/4) at T = {}: {v:.4}", p.T),
                );
            }
            let changes = prof
                .windows(2)
                .filter(|w| w[0].value.signum() != w[1].value.signum())
                .count();
            r.check(
                changes >= 1,
                format!("sign changes of int_0^T Z on [1e3, {top:e}] (step 100): {changes}"),
            );
            r.metric("m1_normalized_max", worst);
            Ok(())
        },
    )
}

/// Zeta core: functional equation, unimodular chi, fast path against the
/// oracle, evenness and realness of `Z`.
pub fn criterion_7(level: Level) -> CriterionReport {
    timed(CriterionReport::new(7, "zeta core"), Instant::now(), |r| {
        let mut worst_fe: f64 = 0.0;
        for sigma in [0.3, 0.5, 0.7] {
            for t in [10.0, 100.0, 1000.0] {
                let s = ComplexValue::new(sigma, t);
                let z = zeta_oracle(s, 20)?.value;
                let zr = zeta_oracle(1.0 - s, 20)?.value;
                let chi = chi_factor(s)?.value;
                worst_fe = worst_fe.max((z - chi * zr).norm() / (1.0 + z.norm()));
            }
        }
        r.check(
            worst_fe <= 1e-8,
            format!("functional-equation residual {worst_fe:.2e} (<= 1e-8)"),
        );

        let points = match level {
            Level::Smoke => 100,
            Level::Full => 1000,
        };
        let grid: Vec<f64> = (0..points)
            .map(|i| 100.0 * 1000f64.powf(i as f64 / (points - 1) as f64))
            .collect();
        let mut worst_chi: f64 = 0.0;
        let mut worst_dev: f64 = 0.0;
        let mut worst_leak: f64 = 0.0;
        for &t in &grid {
            worst_chi = worst_chi.max((chi_factor(ComplexValue::new(0.5, t))?.modulus - 1.0).abs());
            let o = hardy_z_oracle(t, 15)?;
            worst_leak = worst_leak.max(o.imag_residue / o.z.abs().max(1.0));
            worst_dev = worst_dev.max((z_riemann_siegel(t)?.0 - o.z).abs());
        }
        r.check(
            worst_chi <= 1e-12,
            format!("max ||chi| - 1| on {points} heights in [1e2, 1e5]: {worst_chi:.2e}"),
        );
        r.check(
            worst_dev <= 1e-6,
            format!("max |Z_RS - Z_oracle| on the same grid: {worst_dev:.2e} (<= 1e-6)"),
        );
        r.check(
            worst_leak <= 1e-10,
            format!("max imaginary residue / max(1,|Z|): {worst_leak:.2e} (<= 1e-10)"),
        );
        for t in [100.0, 1000.0] {
            let a = hardy_z_oracle(t, 15)?.z;
            let b = hardy_z_oracle(-t, 15)?.z;
            r.check(
                (a - b).abs() <= 1e-9,
                format!("Z(-{t}) - Z({t}) = {:.2e}", a - b),
            );
        }
        let z0 = hardy_z_oracle(14.134725141, 15)?.z;
        r.check(z0.abs() <= 1e-5, format!("Z(14.134725141) = {z0:.2e}"));
        r.metric("rs_vs_oracle_max", worst_dev);
        Ok(())
    })
}

/// Secondary constant of the shifted second moment; informational only.
pub fn criterion_8(_level: Level) -> CriterionReport {
    let mut r = timed(
        CriterionReport::new(8, "shifted second moment constant"),
        Instant::now(),
        |r| {
            let spec = QuadratureSpec::default();
            for alpha in [0.5, 1.0] {
                let fit = shifted_second_moment_fit(alpha, 10_000.0, 21, &spec)?;
                r.note(format!(
                "alpha = {alpha}: fitted {:.4}; 2gamma-1-2pi = {:.4}, 2gamma-1-log(2pi) = {:.4}; closer: {}",
                fit.fitted_constant, fit.constant_two_pi, fit.constant_log_two_pi, fit.closer
            ));
                r.metric(
                    &format!("second_moment_constant_alpha_{alpha}"),
                    fit.fitted_constant,
                );
            }
            Ok(())
        },
    );
    r.informational = true;
    r
}

/// Run the checks in order. The table must cover `10^6`.
pub fn run_suite(level: Level, cal: &Calibration, table: &DivisorTable) -> Vec<CriterionReport> {
    vec![
        criterion_1(level, cal, table),
        criterion_2(level, cal, table),
        criterion_3(level),
        criterion_4(level, table),
        criterion_5(level, cal, table),
        criterion_6(level, cal),
        criterion_7(level),
        criterion_8(level),
    ]
}

/// Sieve bound needed by [`run_suite`].
pub const SUITE_TABLE_BOUND: u64 = 1_000_000;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibration_takes_the_smaller_constant() {
        let mut r = CriterionReport::new(1, "x");
        r.metric("cubic_normalized_max", 2.0);
        r.metric("plain_sum_normalized_max", 100.0);
        let cal = Calibration::from_reports(&[r]);
        assert_eq!(cal.get(CAL_CUBIC_NORMALIZED), 2.5);
        assert_eq!(cal.get(CAL_PLAIN_SUM), 50.0);
        assert_eq!(cal.get(CAL_M1_NORMALIZED), 5.0);
    }

    #[test]
    fn calibration_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cal.json");
        let cal = Calibration::default();
        cal.save(&p).unwrap();
        assert_eq!(Calibration::load(&p).unwrap(), cal);
        std::fs::write(&p, r#"{"constants":{"cubic_normalized":-1}}"#).unwrap();
        assert!(Calibration::load(&p).is_err());
    }

    #[test]
    fn report_line_format() {
        let mut r = CriterionReport::new(3, "saddle kernel");
        assert!(r.line().starts_with("criterion 3 [PASS] saddle kernel"));
        r.check(false, "x".into());
        assert!(r.line().contains("[FAIL]"));
    }
}
