//! Right-hand sides of the cubic explicit formula and comparisons against
//! the integrated moment.

use crate::divisor::DivisorTable;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_moment, MomentKind, QuadratureSpec};
use crate::saddle::{formula_term, formula_term_conjugate, summation_range, FormulaTerm};
use crate::summation::ComplexNeumaier;
use crate::ComplexValue;
use rayon::prelude::*;
use serde::Serialize;

/// Shape of each summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    /// Amplitude and phase from the exact saddle point.
    Exact,
    /// Leading amplitude `2 pi sqrt(2/3) n^{-1/6}` times the bracket `1 + K`.
    Leading,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Exact => "exact",
            Variant::Leading => "thm1",
        }
    }

    fn pick(self, t: &FormulaTerm) -> ComplexValue {
        match self {
            Variant::Exact => t.exact_term,
            Variant::Leading => t.leading_term,
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(Variant::Exact),
            "thm1" => Ok(Variant::Leading),
            other => Err(format!(
                "unknown variant {other:?} (expected exact or thm1)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct MomentComparison {
    pub T: f64,
    pub U: f64,
    pub variant: Variant,
    /// `int Z(t) Z^2(t+U)` instead of `int Z^2(t) Z(t+U)`.
    pub conjugate: bool,
    pub lhs: f64,
    pub lhs_est_error: f64,
    pub rhs: ComplexValue,
    /// `|lhs - Re rhs|`
    pub abs_diff: f64,
    /// `|Im rhs|`
    pub im_leak: f64,
    /// `abs_diff / T^{3/4}`
    pub normalized: f64,
    pub n_terms: u64,
    pub evaluations: u64,
}

impl MomentComparison {
    pub const CSV_HEADER: &'static str =
        "T,U,variant,lhs,rhs_re,rhs_im,abs_diff,normalized,n_terms,evaluations";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            self.T,
            self.U,
            self.variant.name(),
            self.lhs,
            self.rhs.re,
            self.rhs.im,
            self.abs_diff,
            self.normalized,
            self.n_terms,
            self.evaluations
        )
    }
}

/// Largest shift accepted by the sums, `T^{1/2 - 0.05}`.
#[allow(non_snake_case)]
pub fn max_shift(T: f64) -> f64 {
    T.powf(0.45)
}

/// The summands for `n` in `[ceil T1, floor T0]`, in increasing `n`.
#[allow(non_snake_case)]
pub fn rhs_terms(
    T: f64,
    U: f64,
    variant: Variant,
    conjugate: bool,
    table: &DivisorTable,
) -> Result<Vec<ComplexValue>> {
    let range = summation_range(T, U)?;
    if U > max_shift(T) {
        return Err(Error::OutOfRange {
            what: "U",
            detail: format!("{U} > T^0.45 = {}", max_shift(T)),
        });
    }
    if range.n_terms() == 0 {
        return Ok(Vec::new());
    }
    if range.n_hi > table.bound() {
        return Err(Error::TableTooSmall {
            bound: table.bound(),
            requested: range.n_hi,
        });
    }
    (range.n_lo..=range.n_hi)
        .into_par_iter()
        .map(|n| {
            let t = if conjugate {
                formula_term_conjugate(n, U, table)?
            } else {
                formula_term(n, U, table)?
            };
            Ok(variant.pick(&t))
        })
        .collect()
}

fn compensated(terms: impl Iterator<Item = ComplexValue>) -> ComplexValue {
    terms.collect::<ComplexNeumaier>().value()
}

/// `sum_{T1 <= n <= T0}` of the chosen summand, compensated.
#[allow(non_snake_case)]
pub fn rhs_sum(T: f64, U: f64, variant: Variant, table: &DivisorTable) -> Result<ComplexValue> {
    Ok(compensated(
        rhs_terms(T, U, variant, false, table)?.into_iter(),
    ))
}

/// The analogous sum for `int Z(t) Z^2(t+U)`.
#[allow(non_snake_case)]
pub fn rhs_sum_conjugate(
    T: f64,
    U: f64,
    variant: Variant,
    table: &DivisorTable,
) -> Result<ComplexValue> {
    Ok(compensated(
        rhs_terms(T, U, variant, true, table)?.into_iter(),
    ))
}

/// [`rhs_sum`] accumulated from the largest `n` down.
#[allow(non_snake_case)]
pub fn rhs_sum_reversed(
    T: f64,
    U: f64,
    variant: Variant,
    table: &DivisorTable,
) -> Result<ComplexValue> {
    Ok(compensated(
        rhs_terms(T, U, variant, false, table)?.into_iter().rev(),
    ))
}

/// Integrate the cubic moment over `[T/2, T]` and compare with the sum.
#[allow(non_snake_case)]
pub fn compare_cubic_moment(
    T: f64,
    U: f64,
    variant: Variant,
    conjugate: bool,
    spec: &QuadratureSpec,
    table: &DivisorTable,
) -> Result<MomentComparison> {
    let kind = if conjugate {
        MomentKind::M3Conj
    } else {
        MomentKind::M3Shift
    };
    let rhs = if conjugate {
        rhs_sum_conjugate(T, U, variant, table)?
    } else {
        rhs_sum(T, U, variant, table)?
    };
    let lhs = integrate_moment(kind, T, U, spec)?;
    let abs_diff = (lhs.value - rhs.re).abs();
    Ok(MomentComparison {
        T,
        U,
        variant,
        conjugate,
        lhs: lhs.value,
        lhs_est_error: lhs.est_error,
        rhs,
        abs_diff,
        im_leak: rhs.im.abs(),
        normalized: abs_diff / T.powf(0.75),
        n_terms: summation_range(T, U)?.n_terms(),
        evaluations: lhs.evaluations,
    })
}
