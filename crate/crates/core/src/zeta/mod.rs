//! Critical-line evaluation: `chi(s)`, `zeta(1/2 + it)` and Hardy's `Z(t)`.

mod chi;
mod oracle;
mod riemann_siegel;

pub use chi::{
    chi_factor, chi_leading, ln_gamma, theta, theta_dd, ChiBranch, ChiDecomposition,
    ASYMPTOTIC_SWITCH,
};
pub use oracle::{eta_terms, zeta_half_oracle, zeta_oracle, OracleValue, MAX_DIGITS, MIN_DIGITS};
pub use riemann_siegel::{
    correction_terms, z_riemann_siegel, ERROR_CONSTANT as RS_ERROR_CONSTANT, MIN_T as RS_MIN_T,
};

use crate::dd::DdComplex;
use crate::error::{Error, Result};
use crate::ComplexValue;
use serde::Serialize;

/// Digits requested from the oracle when it stands in for the fast path.
pub const ORACLE_DEFAULT_DIGITS: u32 = 15;

/// Height `t` on the critical line `s = 1/2 + it`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct CriticalLineArg(f64);

impl CriticalLineArg {
    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::NonFinite("t"));
        }
        Ok(CriticalLineArg(t))
    }

    pub fn t(self) -> f64 {
        self.0
    }

    pub fn s(self) -> ComplexValue {
        ComplexValue::new(0.5, self.0)
    }

    pub fn fast_path_ok(self) -> bool {
        self.0.abs() >= RS_MIN_T
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ZMethod {
    RiemannSiegel,
    Oracle,
}

impl std::str::FromStr for ZMethod {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rs" | "riemann-siegel" => Ok(ZMethod::RiemannSiegel),
            "oracle" => Ok(ZMethod::Oracle),
            other => Err(format!("unknown method {other:?} (expected rs or oracle)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZEvaluation {
    pub t: f64,
    pub z: f64,
    pub method: ZMethod,
    pub est_error: f64,
    /// `|Im(chi^{-1/2} zeta)|`; zero for the Riemann–Siegel path, which is real by construction.
    pub imag_residue: f64,
}

/// Hardy's function by the requested method.
pub fn hardy_z(t: f64, method: ZMethod) -> Result<ZEvaluation> {
    let arg = CriticalLineArg::new(t)?;
    match method {
        ZMethod::RiemannSiegel => {
            let (z, est_error) = z_riemann_siegel(arg.t())?;
            Ok(ZEvaluation {
                t,
                z,
                method,
                est_error,
                imag_residue: 0.0,
            })
        }
        ZMethod::Oracle => hardy_z_oracle(t, ORACLE_DEFAULT_DIGITS),
    }
}

/// `Z(t) = e^{i theta(t)} zeta(1/2 + it)` with both factors in double-double.
/// Negative `t` is evaluated directly, not folded by symmetry.
pub fn hardy_z_oracle(t: f64, digits: u32) -> Result<ZEvaluation> {
    let arg = CriticalLineArg::new(t)?;
    let zeta = zeta_oracle(arg.s(), digits)?;
    let (sin, cos) = theta_dd(t)?.sin_cos();
    let rot = DdComplex::new(cos, sin) * zeta.extended;
    let z = rot.re.to_f64();
    Ok(ZEvaluation {
        t,
        z,
        method: ZMethod::Oracle,
        est_error: zeta.est_error + 1e-15 * z.abs(),
        imag_residue: rot.im.to_f64().abs(),
    })
}

/// `Z(t)` by the fast path where valid, the oracle below `|t| = 50`.
pub fn z_value(t: f64) -> Result<f64> {
    if t.abs() >= RS_MIN_T {
        Ok(z_riemann_siegel(t)?.0)
    } else {
        Ok(hardy_z_oracle(t, ORACLE_DEFAULT_DIGITS)?.z)
    }
}
