//! Deterministic near-critical scale machinery.
//!
//! Times near `t_c` are carried as offsets `ε = t − t_c`, and almost everything
//! internally as logarithms (`ln ε`, `ln L`, `ln θ`), so that `N` with
//! `ln N ≈ 10¹²` is as easy to handle as `N = 10⁶`. `ln ε = +∞` stands for
//! `t = ∞` (θ = 1, L = 0).

mod backend;
mod maps;
mod schedule;

pub use backend::{Amplitudes, Backend, EmpiricalTables, LogLogTable};
pub use maps::{DerivedConstants, ExponentCheck, FixedPoint};
pub use schedule::{Schedule, ScheduleMode, ScheduleParams, ScheduleStep};

use crate::error::{LabError, Result};
use serde::{Deserialize, Serialize};
use std::ops::{Div, Mul};

/// `c_𝕋 = 2/√3`, the constant in the Ψ maps.
pub const C_T: f64 = crate::lattice::C_T;
/// One-iteration exponent for frozen percolation, 96/5.
pub const A_FP: f64 = 96.0 / 5.0;
/// One-iteration exponent for forest fires, 96/41.
pub const A_FF: f64 = 96.0 / 41.0;
/// Default ratio δ in the time windows of the frozen-percolation schedule.
pub const DELTA: f64 = 0.001;

/// Avalanche constant `𝔫 = 1/ln 𝔞` for frozen percolation.
pub fn n_fp() -> f64 {
    1.0 / A_FP.ln()
}

/// Avalanche constant `𝔫 = 1/ln 𝔞` for forest fires.
pub fn n_ff() -> f64 {
    1.0 / A_FF.ln()
}

/// A positive quantity stored as its natural logarithm.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogScale(pub f64);

impl LogScale {
    pub fn from_value(x: f64) -> Result<Self> {
        if x >= 0.0 {
            Ok(LogScale(x.ln()))
        } else {
            Err(LabError::InvalidParameter(format!("log scale of negative value {x}")))
        }
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    /// The plain value; overflows to ∞ beyond `f64` range.
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn powf(self, k: f64) -> Self {
        LogScale(self.0 * k)
    }

    /// `a + b` via log-sum-exp.
    pub fn add(self, other: Self) -> Self {
        let (hi, lo) = if self.0 >= other.0 { (self.0, other.0) } else { (other.0, self.0) };
        if hi == f64::NEG_INFINITY || hi == f64::INFINITY {
            return LogScale(hi);
        }
        LogScale(hi + (lo - hi).exp().ln_1p())
    }
}

impl Mul for LogScale {
    type Output = LogScale;
    fn mul(self, o: LogScale) -> LogScale {
        LogScale(self.0 + o.0)
    }
}

impl Div for LogScale {
    type Output = LogScale;
    fn div(self, o: LogScale) -> LogScale {
        LogScale(self.0 - o.0)
    }
}

/// The process whose scales are computed, with its parameter in log form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Model {
    /// Frozen percolation with threshold `N = e^{ln_n}`.
    Fp { ln_n: f64 },
    /// Forest fire with ignition rate `ζ = e^{−ln_inv_zeta}`.
    Ff { ln_inv_zeta: f64 },
}

impl Model {
    pub fn fp(n: f64) -> Result<Self> {
        if !(n >= 1.0 && n.is_finite()) {
            return Err(LabError::InvalidParameter(format!("N = {n} must be >= 1")));
        }
        Ok(Model::Fp { ln_n: n.ln() })
    }

    pub fn ff(zeta: f64) -> Result<Self> {
        if !(zeta > 0.0 && zeta < 1.0) {
            return Err(LabError::InvalidParameter(format!("zeta = {zeta} must lie in (0,1)")));
        }
        Ok(Model::Ff { ln_inv_zeta: -zeta.ln() })
    }

    pub fn fp_log(ln_n: f64) -> Result<Self> {
        if !(ln_n >= 0.0 && ln_n.is_finite()) {
            return Err(LabError::InvalidParameter(format!("ln N = {ln_n} must be >= 0")));
        }
        Ok(Model::Fp { ln_n })
    }

    pub fn ff_log(ln_inv_zeta: f64) -> Result<Self> {
        if !(ln_inv_zeta > 0.0 && ln_inv_zeta.is_finite()) {
            return Err(LabError::InvalidParameter(format!("ln(1/zeta) = {ln_inv_zeta} must be > 0")));
        }
        Ok(Model::Ff { ln_inv_zeta })
    }

    /// `ln N` or `ln(1/ζ)`.
    pub fn ln_param(&self) -> f64 {
        match *self {
            Model::Fp { ln_n } => ln_n,
            Model::Ff { ln_inv_zeta } => ln_inv_zeta,
        }
    }

    /// One-iteration exponent `𝔞`.
    pub fn a(&self) -> f64 {
        match self {
            Model::Fp { .. } => A_FP,
            Model::Ff { .. } => A_FF,
        }
    }

    /// `𝔫 = 1/ln 𝔞`.
    pub fn n_const(&self) -> f64 {
        1.0 / self.a().ln()
    }
}

/// Offset `ε = t − t_c` of a time; negative below criticality.
pub fn eps_of(t: f64) -> f64 {
    t - crate::T_C
}
