use super::{Backend, Model, C_T};
use crate::error::{LabError, Result};
use crate::T_C;
use serde::{Deserialize, Serialize};

/// Resolution of the descending `ln ε` scan for fixed points.
const SCAN_STEP: f64 = 1e-3;
const MAX_SCAN_POINTS: usize = 50_000_000;

/// Largest fixed point `t∞` of `t ↦ t̂` and the scale `m∞ = L(t∞)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub ln_eps: f64,
    pub ln_m: f64,
    /// `ln ε` of every sign change found, largest first.
    pub roots: Vec<f64>,
}

impl FixedPoint {
    pub fn eps(&self) -> f64 {
        self.ln_eps.exp()
    }

    pub fn t(&self) -> f64 {
        T_C + self.eps()
    }

    pub fn m(&self) -> f64 {
        self.ln_m.exp()
    }

    /// `t∞^λ = t_c + λ ε∞`.
    pub fn t_lambda(&self, lambda: f64) -> f64 {
        T_C + lambda * self.eps()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub a: f64,
    pub n_const: f64,
    pub ln_eps_inf: f64,
    pub ln_m_inf: f64,
    /// `ln V∞ = ln(m∞² π₁(m∞))`.
    pub ln_v_inf: f64,
    /// FP: `ln(V∞/N)`; FF: `ln(ζ π₁(m∞)/π₄(m∞))`. Both are O(1) by the
    /// asymptotic relations, and exactly `ln c_𝕋`-type constants under the ansatz.
    pub ln_param_ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentCheck {
    /// `L(Ψ(r)) / L(Ψ(R))`.
    pub ratio: f64,
    pub ln_ratio: f64,
    /// `ln ratio / ln(r/R)`; `None` when `r = R`.
    pub exponent: Option<f64>,
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let flo = f(lo)? >= 0.0;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid)? >= 0.0) == flo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

impl Backend {
    /// `ln ε` of `Ψ(R)` given `ln R`; `+∞` where the map is infinite.
    pub fn ln_psi(&self, model: &Model, ln_r: f64) -> Result<f64> {
        match *model {
            Model::Fp { ln_n } => {
                let target = ln_n - C_T.ln() - 2.0 * ln_r;
                if target >= 0.0 {
                    return Ok(f64::INFINITY);
                }
                self.ln_eps_for_theta(target)
            }
            Model::Ff { ln_inv_zeta } => {
                if ln_r == f64::NEG_INFINITY {
                    return Err(LabError::InvalidParameter("psi_ff needs R > 0".into()));
                }
                self.ln_eps_for_theta_eps(ln_inv_zeta - C_T.ln() - 2.0 * ln_r)
            }
        }
    }

    /// `Ψ_N(R)` as a time.
    pub fn psi_fp(&self, r: f64, n: f64) -> Result<f64> {
        Ok(T_C + self.ln_psi(&Model::fp(n)?, r.ln())?.exp())
    }

    /// `Ψ_ζ(R)` as a time.
    pub fn psi_ff(&self, r: f64, zeta: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(LabError::InvalidParameter(format!("R = {r} must be positive")));
        }
        Ok(T_C + self.ln_psi(&Model::ff(zeta)?, r.ln())?.exp())
    }

    /// `ln ε̂` of `t̂ = Ψ(L(t))`.
    pub fn ln_t_hat(&self, model: &Model, ln_eps: f64) -> Result<f64> {
        let ln_l = self.ln_length(ln_eps)?;
        if ln_l == f64::NEG_INFINITY {
            return Ok(f64::INFINITY);
        }
        self.ln_psi(model, ln_l)
    }

    pub fn t_hat(&self, model: &Model, t: f64) -> Result<f64> {
        if !(t > T_C) {
            return Err(LabError::InvalidParameter(format!("t_hat needs t > t_c, got {t}")));
        }
        Ok(T_C + self.ln_t_hat(model, (t - T_C).ln())?.exp())
    }

    /// `ln(g(t)/param)`, whose zeros are the fixed points of `t ↦ t̂`.
    fn fixed_point_gap(&self, model: &Model, x: f64) -> Result<f64> {
        let base = C_T.ln() + 2.0 * self.ln_length(x)? + self.ln_theta(x)?;
        Ok(match model {
            Model::Fp { ln_n } => base - ln_n,
            Model::Ff { ln_inv_zeta } => base + x - ln_inv_zeta,
        })
    }

    /// Largest fixed point of `t ↦ t̂`. The ansatz gap is affine in `ln ε`, so a
    /// bracket plus bisection is exact; tables are scanned downward on a
    /// `10⁻³` grid in `ln ε` and every sign change is refined.
    pub fn t_infinity(&self, model: &Model) -> Result<FixedPoint> {
        self.validate()?;
        let h = |x: f64| self.fixed_point_gap(model, x);
        let roots = match self {
            Backend::Ansatz(_) => {
                let mut hi = 0.0f64;
                let mut k = 0;
                while h(hi)? >= 0.0 {
                    hi = 2.0 * hi + 1.0;
                    k += 1;
                    if k > 1100 {
                        return Err(LabError::NoFixedPoint("gap stays positive".into()));
                    }
                }
                let mut width = 1.0;
                while h(hi - width)? < 0.0 {
                    width *= 2.0;
                    if !width.is_finite() {
                        return Err(LabError::NoFixedPoint("gap stays negative".into()));
                    }
                }
                vec![bisect(h, hi - width, hi)?]
            }
            Backend::Empirical(_) => {
                let (a, b) = self.ln_eps_domain();
                if !(a < b) {
                    return Err(LabError::NoFixedPoint("theta and length tables do not overlap".into()));
                }
                let steps = ((b - a) / SCAN_STEP).ceil() as usize;
                if steps > MAX_SCAN_POINTS {
                    return Err(LabError::InvalidParameter("table range too wide to scan".into()));
                }
                let mut roots = Vec::new();
                let mut x1 = b;
                let mut h1 = h(x1)?;
                for k in 1..=steps {
                    let x0 = (b - k as f64 * SCAN_STEP).max(a);
                    let h0 = h(x0)?;
                    if (h0 >= 0.0) != (h1 >= 0.0) {
                        roots.push(bisect(h, x0, x1)?);
                    }
                    x1 = x0;
                    h1 = h0;
                }
                roots
            }
        };
        let ln_eps = *roots
            .first()
            .ok_or_else(|| LabError::NoFixedPoint("no sign change of c L^2 theta - param in table range".into()))?;
        Ok(FixedPoint { ln_eps, ln_m: self.ln_length(ln_eps)?, roots })
    }

    /// `ln m₁, …, ln m_{k_max}` with `m₁ = √N` (FP) or `1/√ζ` (FF).
    pub fn exceptional_scales(&self, model: &Model, k_max: usize) -> Result<Vec<f64>> {
        if k_max == 0 {
            return Err(LabError::InvalidParameter("k_max must be >= 1".into()));
        }
        let lp = model.ln_param();
        let mut out = vec![0.5 * lp];
        while out.len() < k_max {
            let lm = *out.last().unwrap();
            let next = match model {
                Model::Fp { .. } => 0.5 * (lp - self.ln_pi1(lm)?),
                Model::Ff { .. } => lm + 0.5 * lp + 0.5 * (self.ln_pi4(lm)? - self.ln_pi1(lm)?),
            };
            out.push(next);
        }
        Ok(out)
    }

    /// Fixed point of the exceptional-scale recursion (ansatz only):
    /// `(N/c₁)^{48/91}` for FP, `(c₄/(c₁ζ))^{48/55}` for FF.
    pub fn exceptional_fixed_point(&self, model: &Model) -> Result<f64> {
        let Backend::Ansatz(a) = self else {
            return Err(LabError::InvalidParameter("closed-form fixed point needs the ansatz backend".into()));
        };
        Ok(match *model {
            Model::Fp { ln_n } => (ln_n - a.pi1.ln()) * 48.0 / 91.0,
            Model::Ff { ln_inv_zeta } => (ln_inv_zeta + a.pi4.ln() - a.pi1.ln()) * 48.0 / 55.0,
        })
    }

    pub fn derived_constants(&self, model: &Model) -> Result<DerivedConstants> {
        let fp = self.t_infinity(model)?;
        let lm = fp.ln_m;
        let ln_v_inf = 2.0 * lm + self.ln_pi1(lm)?;
        let ln_param_ratio = match *model {
            Model::Fp { ln_n } => ln_v_inf - ln_n,
            Model::Ff { ln_inv_zeta } => -ln_inv_zeta + self.ln_pi1(lm)? - self.ln_pi4(lm)?,
        };
        Ok(DerivedConstants {
            a: model.a(),
            n_const: model.n_const(),
            ln_eps_inf: fp.ln_eps,
            ln_m_inf: lm,
            ln_v_inf,
            ln_param_ratio,
        })
    }

    /// `L(Ψ(r))/L(Ψ(R))` and the implied exponent (ansatz backend only).
    pub fn iteration_exponent(&self, model: &Model, r: f64, big_r: f64) -> Result<ExponentCheck> {
        if !self.is_ansatz() {
            return Err(LabError::InvalidParameter("exponent check needs the ansatz backend".into()));
        }
        if !(r > 0.0 && r <= big_r) {
            return Err(LabError::InvalidParameter(format!("need 0 < r <= R, got r = {r}, R = {big_r}")));
        }
        let (e_r, e_big) = (self.ln_psi(model, r.ln())?, self.ln_psi(model, big_r.ln())?);
        if e_r == f64::INFINITY {
            return Err(LabError::InvalidParameter(format!("Psi(r) is infinite for r = {r}")));
        }
        let ln_ratio = self.ln_length(e_r)? - self.ln_length(e_big)?;
        let exponent = (r < big_r).then(|| ln_ratio / (r / big_r).ln());
        Ok(ExponentCheck { ratio: ln_ratio.exp(), ln_ratio, exponent })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Amplitudes, EmpiricalTables, LogLogTable, A_FF, A_FP};
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn psi_fp_closed_form() {
        let b = Backend::ansatz();
        let t = b.psi_fp(100.0, 1000.0).unwrap();
        let want = (1000.0 / (C_T * 1e4)).powf(36.0 / 5.0);
        assert_relative_eq!(t - T_C, want, max_relative = 1e-6);
        assert_relative_eq!(want, 2.3e-8, max_relative = 0.05);
        assert_eq!(b.psi_fp((1000.0 / C_T).sqrt(), 1000.0).unwrap(), f64::INFINITY);
        assert!(b.psi_ff(200.0, 1e-3).unwrap() < b.psi_ff(100.0, 1e-3).unwrap());
    }

    #[test]
    fn t_infinity_closed_form() {
        let b = Backend::ansatz();
        let fp = b.t_infinity(&Model::fp(1e6).unwrap()).unwrap();
        let want = (1e6 / C_T).powf(48.0 / 91.0);
        assert_relative_eq!(fp.m(), want, max_relative = 1e-12);
        assert_relative_eq!(fp.m(), 1355.0, max_relative = 1e-3);
        let ff = b.t_infinity(&Model::ff(1e-4).unwrap()).unwrap();
        assert_relative_eq!(ff.m(), (1e4 / C_T).powf(48.0 / 55.0), max_relative = 1e-12);
        assert_relative_eq!(ff.m(), 2730.0, max_relative = 2e-3);
        let that = b.ln_t_hat(&Model::fp(1e6).unwrap(), fp.ln_eps).unwrap();
        assert_relative_eq!(that, fp.ln_eps, max_relative = 1e-12);
    }

    #[test]
    fn exceptional_scales_fp() {
        let b = Backend::ansatz();
        let m = Model::fp(1e6).unwrap();
        let s: Vec<f64> = b.exceptional_scales(&m, 30).unwrap().into_iter().map(f64::exp).collect();
        assert_relative_eq!(s[0], 1000.0, max_relative = 1e-12);
        assert_relative_eq!(s[1], (1e6 * 1000f64.powf(5.0 / 48.0)).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(s[1], 1433.0, max_relative = 1e-3);
        assert!(s.windows(2).all(|w| w[1] >= w[0]));
        let fixed = b.exceptional_fixed_point(&m).unwrap().exp();
        assert!((s[29] - fixed).abs() / fixed < 1e-6);
    }

    #[test]
    fn iteration_exponents() {
        let b = Backend::ansatz();
        let fp = b.iteration_exponent(&Model::fp(1e3).unwrap(), 500.0, 1000.0).unwrap();
        assert_relative_eq!(fp.ratio, 2f64.powf(-96.0 / 5.0), max_relative = 1e-9);
        assert_relative_eq!(fp.exponent.unwrap(), A_FP, max_relative = 1e-9);
        let ff = b.iteration_exponent(&Model::ff(1e-3).unwrap(), 30.0, 700.0).unwrap();
        assert_relative_eq!(ff.exponent.unwrap(), A_FF, max_relative = 1e-9);
        let same = b.iteration_exponent(&Model::fp(1e3).unwrap(), 600.0, 600.0).unwrap();
        assert_eq!(same.ratio, 1.0);
        assert!(b.iteration_exponent(&Model::fp(1e6).unwrap(), 10.0, 2000.0).is_err());
    }

    #[test]
    fn empirical_scan_matches_ansatz() {
        // Tables sampled from the unit ansatz reproduce its fixed point.
        let eps: Vec<f64> = (0..=80).map(|k| 10f64.powf(-8.0 + k as f64 * 0.1)).collect();
        let ns: Vec<f64> = (0..=40).map(|k| 10f64.powf(k as f64 * 0.1)).collect();
        let tab = |xs: &[f64], f: &dyn Fn(f64) -> f64| LogLogTable::new(&xs.iter().map(|&x| (x, f(x))).collect::<Vec<_>>()).unwrap();
        let emp = Backend::Empirical(EmpiricalTables {
            theta: tab(&eps, &|e| e.powf(5.0 / 36.0)),
            length: tab(&eps, &|e| e.powf(-4.0 / 3.0)),
            pi1: tab(&ns, &|n| n.powf(-5.0 / 48.0)),
            pi4: tab(&ns, &|n| n.powf(-1.25)),
        });
        let m = Model::fp(1e6).unwrap();
        let a = Backend::Ansatz(Amplitudes::default()).t_infinity(&m).unwrap();
        let e = emp.t_infinity(&m).unwrap();
        assert_eq!(e.roots.len(), 1);
        assert_relative_eq!(e.ln_m, a.ln_m, max_relative = 1e-9);
        let d = emp.derived_constants(&m).unwrap();
        assert_relative_eq!(d.n_const, 0.3384, max_relative = 1e-3);
        assert!(emp.t_infinity(&Model::fp(1e30).unwrap()).is_err());
    }

    #[test]
    fn derived_constants_values() {
        let b = Backend::ansatz();
        let d = b.derived_constants(&Model::ff(1e-4).unwrap()).unwrap();
        assert_relative_eq!(d.n_const, 1.1754, max_relative = 1e-4);
        let fp = b.t_infinity(&Model::ff(1e-4).unwrap()).unwrap();
        assert_eq!(fp.t_lambda(0.0), T_C);
        // ζ π₁/π₄ at m∞ = (1/(c_𝕋 ζ))^{48/55} is exactly 1/c_𝕋.
        assert_relative_eq!(d.ln_param_ratio, -C_T.ln(), max_relative = 1e-9);
    }
}
