//! Exponential sums `S(alpha, N) = sum_{N < n <= N'} d_3(n) e^{i alpha n^{2/3}}`,
//! their plain analogue without divisor weights, and mean squares over an
//! interval of `alpha`.

use crate::divisor::DivisorTable;
use crate::error::{Error, Result};
use crate::saddle::n_two_thirds;
use crate::summation::{pairwise_sum, par_sum_real, ComplexNeumaier, Neumaier};
use crate::ComplexValue;
use rayon::prelude::*;
use serde::Serialize;

/// Largest `N` for the quadratic-cost exact mean square.
pub const MEAN_SQUARE_MAX_N: u64 = 100_000;
/// Rows of the pairwise sum handled per parallel work item.
const ROW_CHUNK: usize = 16;

fn check_range(n: u64, n_prime: u64) -> Result<()> {
    if n_prime <= n || n_prime > 2 * n.max(1) {
        return Err(Error::OutOfRange {
            what: "N'",
            detail: format!("need N < N' <= 2N, got N = {n}, N' = {n_prime}"),
        });
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite("alpha"));
    }
    Ok(())
}

/// Weights and frequencies `n^{2/3}` for `N < n <= N'`, reused across many
/// values of `alpha`.
#[derive(Clone, Debug)]
pub struct ExpSumKernel {
    pub n: u64,
    pub n_prime: u64,
    weights: Vec<f64>,
    freqs: Vec<f64>,
}

impl ExpSumKernel {
    /// Divisor-weighted kernel.
    pub fn d3(n: u64, n_prime: u64, table: &DivisorTable) -> Result<Self> {
        check_range(n, n_prime)?;
        if n_prime > table.bound() {
            return Err(Error::TableTooSmall {
                bound: table.bound(),
                requested: n_prime,
            });
        }
        let d3 = table.d3_slice();
        let weights = (n + 1..=n_prime)
            .map(|m| f64::from(d3[m as usize]))
            .collect();
        Ok(Self::with_weights(n, n_prime, weights))
    }

    /// Unit weights.
    pub fn plain(n: u64, n_prime: u64) -> Result<Self> {
        check_range(n, n_prime)?;
        Ok(Self::with_weights(
            n,
            n_prime,
            vec![1.0; (n_prime - n) as usize],
        ))
    }

    fn with_weights(n: u64, n_prime: u64, weights: Vec<f64>) -> Self {
        let freqs = (n + 1..=n_prime).map(n_two_thirds).collect();
        ExpSumKernel {
            n,
            n_prime,
            weights,
            freqs,
        }
    }

    pub fn eval(&self, alpha: f64) -> ComplexValue {
        let mut acc = ComplexNeumaier::new();
        for (w, f) in self.weights.iter().zip(&self.freqs) {
            let (s, c) = (alpha * f).sin_cos();
            acc.add(ComplexValue::new(w * c, w * s));
        }
        acc.value()
    }

    /// `sum w_n^2`.
    pub fn diagonal(&self) -> f64 {
        self.weights
            .iter()
            .map(|w| w * w)
            .collect::<Neumaier>()
            .value()
    }

    /// `sum w_n`.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().copied().collect::<Neumaier>().value()
    }
}

/// `sum_{N < n <= N'} d_3(n) e^{i alpha n^{2/3}}`.
pub fn exp_sum_d3(alpha: f64, n: u64, n_prime: u64, table: &DivisorTable) -> Result<ComplexValue> {
    check_alpha(alpha)?;
    Ok(ExpSumKernel::d3(n, n_prime, table)?.eval(alpha))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlainSum {
    pub value: ComplexValue,
    /// `|T| |alpha| / N^{1/3}`; absent for `alpha = 0`.
    pub normalized: Option<f64>,
}

/// `sum_{N < n <= N'} e^{i alpha n^{2/3}}`.
pub fn exp_sum_plain(alpha: f64, n: u64, n_prime: u64) -> Result<PlainSum> {
    check_alpha(alpha)?;
    let value = ExpSumKernel::plain(n, n_prime)?.eval(alpha);
    let normalized = (alpha != 0.0).then(|| value.norm() * alpha.abs() / (n as f64).cbrt());
    Ok(PlainSum { value, normalized })
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NonFinite("A or B"));
    }
    if a > b {
        return Err(Error::OutOfRange {
            what: "interval",
            detail: format!("A = {a} > B = {b}"),
        });
    }
    Ok(())
}

/// `m^{2/3} - n^{2/3}` written as `(m^2 - n^2) / (m^{4/3} + m^{2/3} n^{2/3} + n^{4/3})`
/// so that close pairs lose no digits.
fn delta(m: u64, n: u64, fm: f64, fn_: f64) -> f64 {
    let num = (m as f64 - n as f64) * (m as f64 + n as f64);
    num / (fm * fm + fm * fn_ + fn_ * fn_)
}

/// `int_A^B |sum_{N < n <= N'} w_n e^{i alpha n^{2/3}}|^2 d alpha` in closed form:
/// `(B - A) sum w^2 + sum_{m != n} w_m w_n (e^{iB delta} - e^{iA delta}) / (i delta)`.
/// The conjugate pairs are combined so the result is real by construction.
pub fn mean_square_kernel(a: f64, b: f64, k: &ExpSumKernel) -> Result<f64> {
    check_interval(a, b)?;
    if k.n > MEAN_SQUARE_MAX_N {
        return Err(Error::OutOfRange {
            what: "N",
            detail: format!("{} > {MEAN_SQUARE_MAX_N}", k.n),
        });
    }
    if a == b {
        return Ok(0.0);
    }
    let len = k.weights.len();
    let half_sum = 0.5 * (a + b);
    let half_len = 0.5 * (b - a);
    let rows = par_sum_real(0..len as u64, ROW_CHUNK, |i| {
        let i = i as usize;
        let (wi, fi) = (k.weights[i], k.freqs[i]);
        let mi = k.n + 1 + i as u64;
        let mut acc = Neumaier::new();
        for j in i + 1..len {
            let mj = k.n + 1 + j as u64;
            let d = delta(mj, mi, k.freqs[j], fi);
            // (sin B d - sin A d) / d, doubled for the (n, m) partner
            acc.add(k.weights[j] * (half_sum * d).cos() * (half_len * d).sin() / d);
        }
        4.0 * wi * acc.value()
    });
    Ok((b - a) * k.diagonal() + rows)
}

/// Exact mean square of `S(alpha, N)` with `N' = 2N`.
pub fn mean_square_exact(a: f64, b: f64, n: u64, table: &DivisorTable) -> Result<f64> {
    mean_square_kernel(a, b, &ExpSumKernel::d3(n, 2 * n, table)?)
}

/// The lower bound `(B - A) max(0, sum d3^2 - sum_{m != n} d3(m) d3(n) 2 / ((B - A)|delta|))`.
pub fn mean_square_lower_bound(a: f64, b: f64, n: u64, table: &DivisorTable) -> Result<f64> {
    check_interval(a, b)?;
    if n > MEAN_SQUARE_MAX_N {
        return Err(Error::OutOfRange {
            what: "N",
            detail: format!("{n} > {MEAN_SQUARE_MAX_N}"),
        });
    }
    if a == b {
        return Ok(0.0);
    }
    let k = ExpSumKernel::d3(n, 2 * n, table)?;
    let len = k.weights.len();
    let off = par_sum_real(0..len as u64, ROW_CHUNK, |i| {
        let i = i as usize;
        let mi = k.n + 1 + i as u64;
        let mut acc = Neumaier::new();
        for j in i + 1..len {
            let d = delta(k.n + 1 + j as u64, mi, k.freqs[j], k.freqs[i]);
            acc.add(k.weights[j] / d.abs());
        }
        2.0 * k.weights[i] * acc.value()
    });
    Ok((b - a) * (k.diagonal() - 2.0 * off / (b - a)).max(0.0))
}

/// Quadrature rule for the sampled mean square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MsRule {
    Trapezoid,
    Simpson,
}

/// Number of sub-intervals used for the sampled mean square: `4 ceil((B - A) N^{2/3})`.
pub fn quadrature_intervals(a: f64, b: f64, n: u64) -> usize {
    4 * ((b - a) * n_two_thirds(n)).ceil().max(1.0) as usize
}

/// `(alpha_j, S(alpha_j))` on `intervals + 1` equally spaced points.
pub fn sample_grid(a: f64, b: f64, intervals: usize, k: &ExpSumKernel) -> Vec<(f64, ComplexValue)> {
    let h = (b - a) / intervals as f64;
    (0..=intervals)
        .into_par_iter()
        .map(|j| {
            let alpha = if j == intervals { b } else { a + h * j as f64 };
            (alpha, k.eval(alpha))
        })
        .collect()
}

/// Integrate `|S|^2` from equally spaced samples.
pub fn ms_from_samples(grid: &[(f64, ComplexValue)], rule: MsRule) -> f64 {
    let m = grid.len().saturating_sub(1);
    if m == 0 {
        return 0.0;
    }
    let h = (grid[m].0 - grid[0].0) / m as f64;
    let simpson = rule == MsRule::Simpson && m % 2 == 0;
    let terms: Vec<f64> = grid
        .iter()
        .enumerate()
        .map(|(j, (_, s))| {
            let w = if j == 0 || j == m {
                if simpson {
                    1.0 / 3.0
                } else {
                    0.5
                }
            } else if simpson {
                if j % 2 == 1 {
                    4.0 / 3.0
                } else {
                    2.0 / 3.0
                }
            } else {
                1.0
            };
            w * s.norm_sqr()
        })
        .collect();
    h * pairwise_sum(&terms)
}

/// Sampled mean square of `S(alpha, N)`, `N' = 2N`.
pub fn ms_quad(a: f64, b: f64, n: u64, rule: MsRule, table: &DivisorTable) -> Result<f64> {
    check_interval(a, b)?;
    if a == b {
        return Ok(0.0);
    }
    let k = ExpSumKernel::d3(n, 2 * n, table)?;
    Ok(ms_from_samples(
        &sample_grid(a, b, quadrature_intervals(a, b, n), &k),
        rule,
    ))
}

/// `N^{2/3} log^{9/2} N`.
pub fn good_point_bound(n: u64) -> f64 {
    n_two_thirds(n) * (n as f64).ln().powf(4.5)
}

/// Grid scan of `|S(alpha, N)|` on `[A, B]` with golden-section refinement
/// around the smallest sample. Returns `(C, |S(C, N)|)`.
pub fn find_good_point(a: f64, b: f64, n: u64, table: &DivisorTable) -> Result<(f64, f64)> {
    check_interval(a, b)?;
    if b - a < 0.1 {
        return Err(Error::OutOfRange {
            what: "interval",
            detail: format!("B - A = {} < 0.1", b - a),
        });
    }
    if n > MEAN_SQUARE_MAX_N {
        return Err(Error::OutOfRange {
            what: "N",
            detail: format!("{n} > {MEAN_SQUARE_MAX_N}"),
        });
    }
    let k = ExpSumKernel::d3(n, 2 * n, table)?;
    let steps = (10.0 * n_two_thirds(n)).ceil() as usize;
    let grid = sample_grid(a, b, steps, &k);
    let (imin, _) = grid
        .iter()
        .enumerate()
        .map(|(i, (_, s))| (i, s.norm()))
        .fold(
            (0, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        );
    let lo = grid[imin.saturating_sub(1)].0;
    let hi = grid[(imin + 1).min(grid.len() - 1)].0;
    let (mut c, mut mag) = golden_section(|x| k.eval(x).norm(), lo, hi, 60);
    let grid_min = grid[imin].1.norm();
    if grid_min < mag {
        c = grid[imin].0;
        mag = grid_min;
    }
    let bound = good_point_bound(n);
    if !(mag <= bound) {
        let mean = grid.iter().map(|(_, s)| s.norm()).sum::<f64>() / grid.len() as f64;
        let dump: Vec<String> = grid
            .iter()
            .map(|(x, s)| format!("{x:.6}:{:.3}", s.norm()))
            .collect();
        return Err(Error::BoundViolated(format!(
            "min |S| = {mag} > bound {bound} (N = {n}, [{a}, {b}], mean |S| = {mean}); scan: {}",
            dump.join(" ")
        )));
    }
    Ok((c, mag))
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// One mean-square experiment, `N' = 2N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct ExpSumScan {
    pub N: u64,
    pub A: f64,
    pub B: f64,
    pub grid: Vec<(f64, ComplexValue)>,
    pub ms_exact: f64,
    pub ms_quad: f64,
    pub rule: MsRule,
    /// `ms_exact / (N^{4/3} log^9 N)`
    pub ratio: f64,
    pub good_point: Option<(f64, f64)>,
}

/// Ratio normalization `N^{4/3} log^9 N`.
pub fn ratio_scale(n: u64) -> f64 {
    let t = n_two_thirds(n);
    t * t * (n as f64).ln().powi(9)
}

pub fn expsum_scan(
    a: f64,
    b: f64,
    n: u64,
    find_point: bool,
    table: &DivisorTable,
) -> Result<ExpSumScan> {
    check_interval(a, b)?;
    let k = ExpSumKernel::d3(n, 2 * n, table)?;
    let ms_exact = mean_square_kernel(a, b, &k)?;
    let grid = if a < b {
        sample_grid(a, b, quadrature_intervals(a, b, n), &k)
    } else {
        Vec::new()
    };
    let rule = MsRule::Simpson;
    let ms_quad = ms_from_samples(&grid, rule);
    let good_point = if find_point {
        Some(find_good_point(a, b, n, table)?)
    } else {
        None
    };
    Ok(ExpSumScan {
        N: n,
        A: a,
        B: b,
        grid,
        ms_exact,
        ms_quad,
        rule,
        ratio: ms_exact / ratio_scale(n),
        good_point,
    })
}

impl ExpSumScan {
    pub const CSV_HEADER: &'static str = "alpha,S_re,S_im,abs_S";

    pub fn csv_rows(&self) -> impl Iterator<Item = String> + '_ {
        self.grid
            .iter()
            .map(|(x, s)| format!("{x:.16e},{:.16e},{:.16e},{:.16e}", s.re, s.im, s.norm()))
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "N": self.N,
            "A": self.A,
            "B": self.B,
            "ms_exact": self.ms_exact,
            "ms_quad": self.ms_quad,
            "ratio": self.ratio,
            "C": self.good_point.map(|p| p.0),
            "abs_S_at_C": self.good_point.map(|p| p.1),
            "bound": good_point_bound(self.N),
        })
    }
}
