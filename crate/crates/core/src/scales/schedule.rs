//! The deterministic scale sequences `(r^(i), R^(i))` that drive the avalanche
//! count: each step predicts the next freezing/burning window from the current
//! annulus and shrinks the island around the origin by roughly a power `𝔞`.

use super::{Backend, Model, C_T, DELTA};
use crate::error::{LabError, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleMode {
    /// Every quantity as a logarithm; works for `ln N` up to ~10³⁰⁰.
    LogDomain,
    /// Plain floating point through the time-valued backend maps; for
    /// ordinary parameters only.
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    /// Starting scale `R^(0) = c′ m∞ / (ln param)^α`.
    pub alpha: f64,
    /// `κ₄` of the a-priori circuit bound (FP only).
    pub kappa4: f64,
    /// `δ` of the FP time windows.
    pub delta: f64,
    /// `c′` in the starting scale.
    pub start_const: f64,
    /// `r^(0) / R^(0)`.
    pub r0_ratio: f64,
    pub mode: ScheduleMode,
    pub max_steps: usize,
}

impl ScheduleParams {
    /// Defaults for frozen percolation (α = 0.05).
    pub fn fp() -> Self {
        ScheduleParams {
            alpha: 0.05,
            kappa4: 1.0,
            delta: DELTA,
            start_const: 1.0,
            r0_ratio: 0.5,
            mode: ScheduleMode::LogDomain,
            max_steps: 100_000,
        }
    }

    /// Defaults for forest fires (α = 5, the smallest round value for which
    /// the separation property holds from `ln(1/ζ) = 10³` on).
    pub fn ff() -> Self {
        ScheduleParams { alpha: 5.0, ..Self::fp() }
    }

    pub fn for_model(model: &Model) -> Self {
        match model {
            Model::Fp { .. } => Self::fp(),
            Model::Ff { .. } => Self::ff(),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LabError::InvalidParameter(m));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha = {} must be positive", self.alpha));
        }
        if !(self.kappa4 > 0.0 && self.kappa4.is_finite()) {
            return bad(format!("kappa4 = {} must be positive", self.kappa4));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta = {} must lie in (0,1)", self.delta));
        }
        if !(self.start_const > 0.0 && self.start_const.is_finite()) {
            return bad("start constant must be positive".into());
        }
        if !(self.r0_ratio > 0.0 && self.r0_ratio <= 1.0) {
            return bad(format!("r0 ratio = {} must lie in (0,1]", self.r0_ratio));
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive".into());
        }
        Ok(())
    }
}

/// Forest-fire auxiliary windows (as `ln ε`): double-underlined, double-overlined
/// and the intermediate time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FfWindows {
    pub ln_eps_dul: f64,
    pub ln_eps_dol: f64,
    pub ln_eps_doul: f64,
}

/// One iterate: `ln r^(i)`, `ln R^(i)` and `ln ε` of `t̲^(i)`, `t̄^(i)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleStep {
    pub ln_r: f64,
    pub ln_big_r: f64,
    pub ln_eps_lower: f64,
    pub ln_eps_upper: f64,
    pub ff: Option<FfWindows>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub model: Model,
    pub params: ScheduleParams,
    pub ln_m_inf: f64,
    /// `ln` of the stopping radius (`3 c_𝕋^{−1/2} √N` or `1/√ζ`).
    pub ln_threshold: f64,
    /// Iterates `0..=J+1`.
    pub steps: Vec<ScheduleStep>,
    pub j: usize,
    pub big_j: usize,
    /// `R^(i+1) < r^(i)/10` for every `i ≤ J`.
    pub separation: bool,
}

impl Schedule {
    /// `ln ln` of the model parameter.
    pub fn lnln(&self) -> f64 {
        self.model.ln_param().ln()
    }

    /// `J / ln ln(param)`, the finite-scale prediction of `|F| / ln ln(param)`.
    pub fn j_ratio(&self) -> f64 {
        self.big_j as f64 / self.lnln()
    }
}

struct Step {
    r: f64,
    big_r: f64,
    lower: f64,
    upper: f64,
    ff: Option<FfWindows>,
}

impl Backend {
    pub fn schedule(&self, model: &Model, params: &ScheduleParams) -> Result<Schedule> {
        params.validate()?;
        self.validate()?;
        let lp = model.ln_param();
        if !(lp.ln().ln() >= 1.0) {
            return Err(LabError::InvalidParameter(format!(
                "schedule needs ln ln ln(param) >= 1, got ln(param) = {lp}"
            )));
        }
        let l2 = lp.ln();
        let l3 = l2.ln();
        if let Model::Fp { .. } = model {
            if 4.0 / params.kappa4 * l3 < 1.0 {
                return Err(LabError::InvalidParameter("need (4/kappa4) ln ln ln N >= 1".into()));
            }
        }
        let direct = params.mode == ScheduleMode::Direct;
        if !direct && !self.is_ansatz() {
            return Err(LabError::InvalidParameter("log-domain schedules need the ansatz backend".into()));
        }
        if direct && lp > 300.0 {
            return Err(LabError::InvalidParameter("direct mode is limited to ln(param) <= 300".into()));
        }
        let ln_m_inf = self.t_infinity(model)?.ln_m;
        let ln_threshold = match model {
            Model::Fp { ln_n } => 3f64.ln() - 0.5 * C_T.ln() + 0.5 * ln_n,
            Model::Ff { ln_inv_zeta } => 0.5 * ln_inv_zeta,
        };
        let ln_big_r0 = params.start_const.ln() + ln_m_inf - params.alpha * l2;
        let mut cur = (ln_big_r0 + params.r0_ratio.ln(), ln_big_r0);
        let mut steps = Vec::new();
        let mut separation = true;
        let big_j = loop {
            if steps.len() > params.max_steps {
                return Err(LabError::InvalidParameter("schedule did not terminate within max_steps".into()));
            }
            let s = if direct {
                self.direct_step(model, params, cur.0, cur.1)?
            } else {
                self.log_step(model, params, cur.0, cur.1)?
            };
            let next = (s.r, s.big_r);
            steps.push(ScheduleStep {
                ln_r: cur.0,
                ln_big_r: cur.1,
                ln_eps_lower: s.lower,
                ln_eps_upper: s.upper,
                ff: s.ff,
            });
            if !(next.1 < cur.0 - 10f64.ln()) {
                separation = false;
            }
            if next.1 > ln_m_inf + 50.0 || next.1.is_nan() {
                return Err(LabError::InvalidParameter("schedule scales diverge; alpha too small".into()));
            }
            cur = next;
            if cur.1 < ln_threshold {
                break steps.len() - 1;
            }
        };
        let last = if direct {
            self.direct_step(model, params, cur.0, cur.1)?
        } else {
            self.log_step(model, params, cur.0, cur.1)?
        };
        steps.push(ScheduleStep {
            ln_r: cur.0,
            ln_big_r: cur.1,
            ln_eps_lower: last.lower,
            ln_eps_upper: last.upper,
            ff: last.ff,
        });
        let j = (1..steps.len()).find(|&i| steps[i].ln_r < ln_threshold).expect("r <= R") - 1;
        Ok(Schedule { model: *model, params: *params, ln_m_inf, ln_threshold, steps, j, big_j, separation })
    }

    fn log_step(&self, model: &Model, p: &ScheduleParams, ln_r: f64, ln_big_r: f64) -> Result<Step> {
        let l2 = model.ln_param().ln();
        let l3 = l2.ln();
        match model {
            Model::Fp { .. } => {
                let lower = self.ln_psi(model, ln_r + (0.9 / (1.0 + p.delta)).ln())?;
                let upper = self.ln_psi(model, ln_big_r - (1.0 - p.delta).ln())?;
                Ok(Step {
                    r: self.ln_length(lower)? - 24.0 * l2.ln(),
                    big_r: (4.0 / p.kappa4).ln() + l3.ln() + self.ln_length(upper)?,
                    lower,
                    upper,
                    ff: None,
                })
            }
            Model::Ff { .. } => {
                let lower = self.ln_psi(model, ln_r)?;
                let upper = self.ln_psi(model, ln_big_r)?;
                let w = FfWindows {
                    ln_eps_dul: lower + l2.ln(),
                    ln_eps_dol: upper - 2.0 * l2.ln(),
                    ln_eps_doul: lower - 2.0 * l2.ln(),
                };
                Ok(Step {
                    r: self.ln_length(w.ln_eps_dul)? - 24.0 * l2.ln(),
                    big_r: 4.0 * l3.ln() + self.ln_length(w.ln_eps_dol)?,
                    lower,
                    upper,
                    ff: Some(w),
                })
            }
        }
    }

    /// Same recursion in plain floating point, through the time-valued maps.
    fn direct_step(&self, model: &Model, p: &ScheduleParams, ln_r: f64, ln_big_r: f64) -> Result<Step> {
        let (r, big_r) = (ln_r.exp(), ln_big_r.exp());
        let param = model.ln_param().exp();
        let l2 = model.ln_param().ln();
        let l3 = l2.ln();
        let eps = |t: f64| (t - crate::T_C).ln();
        match model {
            Model::Fp { .. } => {
                let t_lo = self.psi_fp(0.9 / (1.0 + p.delta) * r, param)?;
                let t_hi = self.psi_fp(big_r / (1.0 - p.delta), param)?;
                Ok(Step {
                    r: (self.length(t_lo)? / l2.powi(24)).ln(),
                    big_r: (4.0 / p.kappa4 * l3 * self.length(t_hi)?).ln(),
                    lower: eps(t_lo),
                    upper: eps(t_hi),
                    ff: None,
                })
            }
            Model::Ff { .. } => {
                let zeta = 1.0 / param;
                let t_lo = self.psi_ff(r, zeta)?;
                let t_hi = self.psi_ff(big_r, zeta)?;
                let (e_lo, e_hi) = (t_lo - crate::T_C, t_hi - crate::T_C);
                let t_dul = crate::T_C + l2 * e_lo;
                let t_dol = crate::T_C + e_hi / (l2 * l2);
                Ok(Step {
                    r: (self.length(t_dul)? / l2.powi(24)).ln(),
                    big_r: (l3.powi(4) * self.length(t_dol)?).ln(),
                    lower: e_lo.ln(),
                    upper: e_hi.ln(),
                    ff: Some(FfWindows {
                        ln_eps_dul: eps(t_dul),
                        ln_eps_dol: eps(t_dol),
                        ln_eps_doul: (e_lo / (l2 * l2)).ln(),
                    }),
                })
            }
        }
    }
}
