//! Oscillation-aware integration of products of `Z`.
//!
//! The range is cut into panels whose length follows the local zero spacing
//! `2 pi / log(t / 2 pi)`, each panel receiving `points_per_oscillation`
//! nodes per spacing. A result is the finer of two levels (the second with
//! twice the density); their difference is the error estimate. Panels are
//! evaluated in parallel and combined with a fixed pairwise tree.

use crate::error::{Error, Result};
use crate::summation::pairwise_sum;
use crate::zeta::{hardy_z_oracle, z_value, ORACLE_DEFAULT_DIGITS};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

/// Start of the Riemann–Siegel body for ranges that begin at zero.
pub const HEAD_END: f64 = 100.0;
/// Smallest and largest `T` accepted by [`integrate_moment`].
pub const T_MIN: f64 = 100.0;
pub const T_MAX: f64 = 100_000.0;
/// Extra doublings of the density tried before giving up.
pub const MAX_REFINEMENTS: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MomentKind {
    /// `Z(t)`
    M1,
    /// `Z(t) Z(t+U)`
    M2Shift,
    /// `Z^2(t) Z(t+U)`
    M3Shift,
    /// `Z(t) Z^2(t+U)`
    M3Conj,
    /// `Z^4(t)`
    M4,
    /// `|Z(t)|^3`
    AbsCube,
}

impl MomentKind {
    fn uses_shift(self) -> bool {
        matches!(
            self,
            MomentKind::M2Shift | MomentKind::M3Shift | MomentKind::M3Conj
        )
    }

    fn integrand(self, z: f64, zu: f64) -> f64 {
        match self {
            MomentKind::M1 => z,
            MomentKind::M2Shift => z * zu,
            MomentKind::M3Shift => z * z * zu,
            MomentKind::M3Conj => z * zu * zu,
            MomentKind::M4 => {
                let z2 = z * z;
                z2 * z2
            }
            MomentKind::AbsCube => (z * z * z).abs(),
        }
    }

    /// Lower end of the canonical range for height `T`.
    pub fn lower_limit(self, t: f64) -> f64 {
        match self {
            MomentKind::M3Shift | MomentKind::M3Conj => 0.5 * t,
            MomentKind::AbsCube => 1.0,
            _ => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MomentKind::M1 => "m1",
            MomentKind::M2Shift => "m2shift",
            MomentKind::M3Shift => "m3shift",
            MomentKind::M3Conj => "m3conj",
            MomentKind::M4 => "m4",
            MomentKind::AbsCube => "abs3",
        }
    }
}

impl std::str::FromStr for MomentKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "m1" => MomentKind::M1,
            "m2shift" => MomentKind::M2Shift,
            "m3shift" => MomentKind::M3Shift,
            "m3conj" => MomentKind::M3Conj,
            "m4" => MomentKind::M4,
            "abs3" => MomentKind::AbsCube,
            other => return Err(format!("unknown moment kind {other:?}")),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PanelRule {
    GaussLegendre16,
    AdaptiveSimpson,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub a: f64,
    pub b: f64,
    pub points_per_oscillation: u32,
    pub panel_rule: PanelRule,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            a: 0.0,
            b: 0.0,
            points_per_oscillation: 12,
            panel_rule: PanelRule::GaussLegendre16,
            abs_tol: 1e-9,
            rel_tol: 1e-9,
        }
    }
}

impl QuadratureSpec {
    pub fn with_range(self, a: f64, b: f64) -> Self {
        QuadratureSpec { a, b, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite()) {
            return Err(Error::NonFinite("integration limits"));
        }
        if self.a > self.b {
            return Err(Error::OutOfRange {
                what: "range",
                detail: format!("a = {} > b = {}", self.a, self.b),
            });
        }
        if self.points_per_oscillation < 8 {
            return Err(Error::OutOfRange {
                what: "points_per_oscillation",
                detail: format!("{} < 8", self.points_per_oscillation),
            });
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::OutOfRange {
                what: "tolerance",
                detail: "tolerances must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Where `Z` values come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ZSource {
    /// Riemann–Siegel for `|t| >= 50`, oracle below.
    Fast,
    /// Oracle everywhere.
    Oracle,
}

impl ZSource {
    fn z(self, t: f64) -> f64 {
        let v = match self {
            ZSource::Fast => z_value(t),
            ZSource::Oracle => hardy_z_oracle(t, ORACLE_DEFAULT_DIGITS).map(|e| e.z),
        };
        // inputs are finite by construction
        v.expect("Z evaluation on a finite argument")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct MomentResult {
    pub kind: MomentKind,
    pub T: f64,
    pub U: f64,
    pub value: f64,
    pub est_error: f64,
    /// Number of `Z` evaluations, all levels included.
    pub evaluations: u64,
    /// Kind-specific normalization, e.g. `value / T^{1/4}` for the first moment.
    pub normalized: Option<f64>,
}

/// Local zero spacing of `Z`, floored at `2 pi`.
pub fn zero_spacing(t: f64) -> f64 {
    2.0 * PI / (t.abs() / (2.0 * PI)).ln().max(1.0)
}

fn panel_edges(a: f64, b: f64, u: f64, ppo: f64) -> Vec<f64> {
    let mut edges = vec![a];
    let mut x = a;
    while x < b {
        let h0 = 16.0 * zero_spacing(x) / ppo;
        let far = x.abs().max((x + h0).abs()).max((x + h0 + u).abs());
        let h = 16.0 * zero_spacing(far) / ppo;
        x = if x + h >= b || b - (x + h) < 1e-9 * h {
            b
        } else {
            x + h
        };
        edges.push(x);
    }
    edges
}

fn gauss_legendre_16() -> &'static ([f64; 16], [f64; 16]) {
    static RULE: OnceLock<([f64; 16], [f64; 16])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = 16;
        let mut x = [0.0; 16];
        let mut w = [0.0; 16];
        for i in 0..n {
            let mut r = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, r);
                let dr = p / dp;
                r -= dr;
                if dr.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, r);
            x[i] = r;
            w[i] = 2.0 / ((1.0 - r * r) * dp * dp);
        }
        (x, w)
    })
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[derive(Clone, Copy, Debug, Default)]
struct PanelOut {
    value: f64,
    abs: f64,
    evals: u64,
}

struct Integrand {
    kind: MomentKind,
    u: f64,
    source: ZSource,
}

impl Integrand {
    /// `(f(t), number of Z evaluations)`.
    fn eval(&self, t: f64) -> (f64, u64) {
        let z = self.source.z(t);
        if self.kind.uses_shift() && self.u != 0.0 {
            let zu = self.source.z(t + self.u);
            (self.kind.integrand(z, zu), 2)
        } else {
            (self.kind.integrand(z, z), 1)
        }
    }
}

fn gl_panel(f: &Integrand, lo: f64, hi: f64) -> PanelOut {
    let (x, w) = gauss_legendre_16();
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut out = PanelOut::default();
    for (xi, wi) in x.iter().zip(w) {
        let (v, e) = f.eval(mid + half * xi);
        out.value += wi * v;
        out.abs += wi * v.abs();
        out.evals += e;
    }
    out.value *= half;
    out.abs *= half;
    out
}

/// Adaptive Simpson on one panel; the tolerance is `max(tol, rel * int |f|)`.
fn simpson_panel(f: &Integrand, lo: f64, hi: f64, tol: f64, rel: f64) -> PanelOut {
    struct Acc {
        evals: u64,
        abs: f64,
    }
    fn rec(
        f: &Integrand,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
        acc: &mut Acc,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let (flm, e1) = f.eval(lm);
        let (frm, e2) = f.eval(rm);
        acc.evals += e1 + e2;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            acc.abs += (m - a) / 6.0 * (fa.abs() + 4.0 * flm.abs() + fm.abs())
                + (b - m) / 6.0 * (fm.abs() + 4.0 * frm.abs() + fb.abs());
            return left + right + diff / 15.0;
        }
        rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, acc)
            + rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, acc)
    }
    let (fa, e1) = f.eval(lo);
    let (fb, e2) = f.eval(hi);
    let m = 0.5 * (lo + hi);
    let (fm, e3) = f.eval(m);
    let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = tol.max(rel * (hi - lo) / 6.0 * (fa.abs() + 4.0 * fm.abs() + fb.abs()));
    let mut acc = Acc {
        evals: e1 + e2 + e3,
        abs: 0.0,
    };
    let value = rec(f, lo, fa, hi, fb, m, fm, whole, tol, 30, &mut acc);
    PanelOut {
        value,
        abs: acc.abs,
        evals: acc.evals,
    }
}

fn one_level(f: &Integrand, spec: &QuadratureSpec, level: u32) -> PanelOut {
    let ppo = f64::from(spec.points_per_oscillation) * f64::from(1u32 << level);
    let edges = panel_edges(spec.a, spec.b, f.u, ppo);
    let len = spec.b - spec.a;
    let parts: Vec<PanelOut> = edges
        .par_windows(2)
        .map(|w| match spec.panel_rule {
            PanelRule::GaussLegendre16 => gl_panel(f, w[0], w[1]),
            PanelRule::AdaptiveSimpson => {
                let shrink = 4f64.powi(level as i32);
                let tol = spec.abs_tol * (w[1] - w[0]) / len / shrink;
                simpson_panel(f, w[0], w[1], tol, spec.rel_tol / shrink)
            }
        })
        .collect();
    let values: Vec<f64> = parts.iter().map(|p| p.value).collect();
    let abs: Vec<f64> = parts.iter().map(|p| p.abs).collect();
    PanelOut {
        value: pairwise_sum(&values),
        abs: pairwise_sum(&abs),
        evals: parts.iter().map(|p| p.evals).sum(),
    }
}

/// Integrate `kind` over `[spec.a, spec.b]` with `Z` from `source`.
#[allow(non_snake_case)]
pub fn integrate_range_with(
    kind: MomentKind,
    U: f64,
    spec: &QuadratureSpec,
    source: ZSource,
) -> Result<MomentResult> {
    spec.validate()?;
    if !U.is_finite() {
        return Err(Error::NonFinite("U"));
    }
    let base = MomentResult {
        kind,
        T: spec.b,
        U,
        value: 0.0,
        est_error: 0.0,
        evaluations: 0,
        normalized: None,
    };
    if spec.a == spec.b {
        return Ok(base);
    }
    let f = Integrand { kind, u: U, source };
    let mut coarse = one_level(&f, spec, 0);
    let mut evaluations = coarse.evals;
    let mut level = 1;
    loop {
        let fine = one_level(&f, spec, level);
        evaluations += fine.evals;
        let diff = (fine.value - coarse.value).abs();
        let tol = spec.abs_tol.max(spec.rel_tol * fine.value.abs());
        let est_error = diff + 32.0 * f64::EPSILON * fine.abs;
        if diff <= tol {
            return Ok(MomentResult {
                value: fine.value,
                est_error,
                evaluations,
                ..base
            });
        }
        if level > MAX_REFINEMENTS {
            return Err(Error::Tolerance {
                value: fine.value,
                est_error,
                tolerance: tol,
            });
        }
        coarse = fine;
        level += 1;
    }
}

/// [`integrate_range_with`] using the fast path.
#[allow(non_snake_case)]
pub fn integrate_range(kind: MomentKind, U: f64, spec: &QuadratureSpec) -> Result<MomentResult> {
    integrate_range_with(kind, U, spec, ZSource::Fast)
}

type HeadKey = (MomentKind, u64, u64, u32, PanelRule, u64, u64);

fn head_cache() -> &'static Mutex<HashMap<HeadKey, MomentResult>> {
    static CACHE: OnceLock<Mutex<HashMap<HeadKey, MomentResult>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Oracle integral over `[lo, HEAD_END]`, computed once per parameter set.
fn head(kind: MomentKind, lo: f64, u: f64, spec: &QuadratureSpec) -> Result<MomentResult> {
    let key = (
        kind,
        lo.to_bits(),
        u.to_bits(),
        spec.points_per_oscillation,
        spec.panel_rule,
        spec.abs_tol.to_bits(),
        spec.rel_tol.to_bits(),
    );
    if let Some(r) = head_cache().lock().expect("head cache lock").get(&key) {
        return Ok(*r);
    }
    let r = integrate_range_with(kind, u, &spec.with_range(lo, HEAD_END), ZSource::Oracle)?;
    head_cache().lock().expect("head cache lock").insert(key, r);
    Ok(r)
}

#[allow(non_snake_case)]
fn check_moment_args(T: f64, U: f64) -> Result<()> {
    if !(T.is_finite() && U.is_finite()) {
        return Err(Error::NonFinite("T or U"));
    }
    if !(T_MIN..=T_MAX).contains(&T) {
        return Err(Error::OutOfRange {
            what: "T",
            detail: format!("{T} not in [{T_MIN}, {T_MAX}]"),
        });
    }
    if U < 0.0 || U > T.sqrt() {
        return Err(Error::OutOfRange {
            what: "U",
            detail: format!("{U} not in [0, sqrt(T)]"),
        });
    }
    Ok(())
}

/// Moment over its canonical range: `[T/2, T]` for the cubic moments,
/// `[0, T]` (`[1, T]` for `|Z|^3`) otherwise, with the part below 100
/// integrated by the oracle. The limits in `spec` are ignored.
#[allow(non_snake_case)]
pub fn integrate_moment(
    kind: MomentKind,
    T: f64,
    U: f64,
    spec: &QuadratureSpec,
) -> Result<MomentResult> {
    check_moment_args(T, U)?;
    let lo = kind.lower_limit(T);
    let mut r = if lo >= HEAD_END {
        integrate_range(kind, U, &spec.with_range(lo, T))?
    } else {
        let h = head(kind, lo, U, spec)?;
        let body = integrate_range(kind, U, &spec.with_range(HEAD_END, T))?;
        MomentResult {
            value: h.value + body.value,
            est_error: h.est_error + body.est_error,
            evaluations: h.evaluations + body.evaluations,
            ..body
        }
    };
    r.T = T;
    r.normalized = normalization(kind, T).map(|n| r.value / n);
    Ok(r)
}

/// Reference scale for the normalized value of each kind.
#[allow(non_snake_case)]
pub fn normalization(kind: MomentKind, T: f64) -> Option<f64> {
    let l = T.ln();
    match kind {
        MomentKind::M1 => Some(T.powf(0.25)),
        MomentKind::M3Shift | MomentKind::M3Conj => Some(T.powf(0.75)),
        MomentKind::M4 => Some(T * l.powi(4) / (2.0 * PI * PI)),
        MomentKind::AbsCube => Some(T * l.powf(2.25)),
        MomentKind::M2Shift => None,
    }
}

/// First moment `int_0^T Z`, with `value / T^{1/4}` attached.
#[allow(non_snake_case)]
pub fn first_moment_diag(T: f64, spec: &QuadratureSpec) -> Result<MomentResult> {
    integrate_moment(MomentKind::M1, T, 0.0, spec)
}

/// Running integral from the kind's lower limit, reported at each checkpoint.
/// Checkpoints must be increasing and at least 100.
#[allow(non_snake_case)]
pub fn cumulative_profile(
    kind: MomentKind,
    U: f64,
    checkpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<MomentResult>> {
    if checkpoints.windows(2).any(|w| w[0] >= w[1])
        || checkpoints.first().is_some_and(|&c| c < HEAD_END)
    {
        return Err(Error::OutOfRange {
            what: "checkpoints",
            detail: "must increase from at least 100".into(),
        });
    }
    let lo = kind.lower_limit(0.0);
    let mut acc = head(kind, lo, U, spec)?;
    let mut prev = HEAD_END;
    let mut out = Vec::with_capacity(checkpoints.len());
    for &c in checkpoints {
        let seg = integrate_range(kind, U, &spec.with_range(prev, c))?;
        acc.value += seg.value;
        acc.est_error += seg.est_error;
        acc.evaluations += seg.evaluations;
        acc.T = c;
        acc.normalized = normalization(kind, c).map(|n| acc.value / n);
        out.push(acc);
        prev = c;
    }
    Ok(out)
}

/// Result of fitting the secondary term of the shifted second moment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SecondMomentFit {
    pub alpha: f64,
    pub u: f64,
    /// `c` in `I(T) - sinc(alpha/2) T log T ~ c T cos(alpha/2) + b`.
    pub fitted_constant: f64,
    pub intercept: f64,
    /// `2 gamma - 1 - 2 pi`
    pub constant_two_pi: f64,
    /// `2 gamma - 1 - log 2 pi`
    pub constant_log_two_pi: f64,
    /// Which of the two candidates is closer to the fit.
    pub closer: &'static str,
    pub points: Vec<(f64, f64)>,
}

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Fit the secondary constant of `int_0^T Z(t) Z(t + U) dt` with
/// `U = alpha / log T_max`, sampling the running integral at `samples`
/// equally spaced heights in `[T_max / 2, T_max]`.
#[allow(non_snake_case)]
pub fn shifted_second_moment_fit(
    alpha: f64,
    T_max: f64,
    samples: usize,
    spec: &QuadratureSpec,
) -> Result<SecondMomentFit> {
    check_moment_args(T_max, 0.0)?;
    if samples < 2 || !(alpha > 0.0) {
        return Err(Error::OutOfRange {
            what: "second moment fit",
            detail: "need alpha > 0 and two samples".into(),
        });
    }
    let u = alpha / T_max.ln();
    let cps: Vec<f64> = (0..samples)
        .map(|i| 0.5 * T_max * (1.0 + i as f64 / (samples - 1) as f64))
        .collect();
    let prof = cumulative_profile(MomentKind::M2Shift, u, &cps, spec)?;
    // regress R(T) on x = T cos(a(T)/2) with a(T) = U log T
    let mut pts = Vec::with_capacity(samples);
    let mut xs = Vec::with_capacity(samples);
    for r in &prof {
        let t = r.T;
        let a = u * t.ln();
        let sinc = (a / 2.0).sin() / (a / 2.0);
        let resid = r.value - sinc * t * t.ln();
        pts.push((t, resid));
        xs.push((t * (a / 2.0).cos(), resid));
    }
    let k = xs.len() as f64;
    let mx = xs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = xs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = xs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let c = sxy / sxx;
    let two_pi_form = 2.0 * EULER_GAMMA - 1.0 - 2.0 * PI;
    let logc = 2.0 * EULER_GAMMA - 1.0 - (2.0 * PI).ln();
    let closer = if (c - logc).abs() <= (c - two_pi_form).abs() {
        "2gamma-1-log(2pi)"
    } else {
        "2gamma-1-2pi"
    };
    Ok(SecondMomentFit {
        alpha,
        u,
        fitted_constant: c,
        intercept: my - c * mx,
        constant_two_pi: two_pi_form,
        constant_log_two_pi: logc,
        closer,
        points: pts,
    })
}
