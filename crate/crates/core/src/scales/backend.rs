use crate::error::{LabError, Result};
use crate::{p_of_t, t_of_p, T_C};
use serde::{Deserialize, Serialize};

/// Multiplicative constants of the power-law ansatz (all 1 by convention).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Amplitudes {
    pub theta: f64,
    pub length: f64,
    pub pi1: f64,
    pub pi4: f64,
}

impl Default for Amplitudes {
    fn default() -> Self {
        Amplitudes { theta: 1.0, length: 1.0, pi1: 1.0, pi4: 1.0 }
    }
}

impl Amplitudes {
    fn validate(&self) -> Result<()> {
        for (name, v) in [("theta", self.theta), ("length", self.length), ("pi1", self.pi1), ("pi4", self.pi4)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LabError::InvalidParameter(format!("amplitude {name} = {v} must be positive")));
            }
        }
        Ok(())
    }
}

/// Strictly monotone table of positive values, interpolated linearly in
/// log-log coordinates. Queries outside the tabulated range are refused.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct LogLogTable {
    lx: Vec<f64>,
    ly: Vec<f64>,
}

impl TryFrom<Vec<(f64, f64)>> for LogLogTable {
    type Error = LabError;
    fn try_from(points: Vec<(f64, f64)>) -> Result<Self> {
        LogLogTable::new(&points)
    }
}

impl From<LogLogTable> for Vec<(f64, f64)> {
    fn from(t: LogLogTable) -> Self {
        t.points()
    }
}

impl LogLogTable {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(LabError::InvalidParameter("a table needs at least two points".into()));
        }
        if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
            return Err(LabError::InvalidParameter("table entries must be positive and finite".into()));
        }
        let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
        let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
        if lx.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(LabError::InvalidParameter("table abscissae must be strictly increasing".into()));
        }
        let up = ly.windows(2).all(|w| w[0] < w[1]);
        let down = ly.windows(2).all(|w| w[0] > w[1]);
        if !(up || down) {
            return Err(LabError::InvalidParameter("table values must be strictly monotone".into()));
        }
        Ok(LogLogTable { lx, ly })
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.lx.iter().zip(&self.ly).map(|(x, y)| (x.exp(), y.exp())).collect()
    }

    /// `(ln x_min, ln x_max)`.
    pub fn ln_range(&self) -> (f64, f64) {
        (self.lx[0], *self.lx.last().unwrap())
    }

    fn interp(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
        let increasing = xs[0] < xs[xs.len() - 1];
        let (lo, hi) = if increasing { (xs[0], xs[xs.len() - 1]) } else { (xs[xs.len() - 1], xs[0]) };
        // Tolerate round-off at the end points.
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if !(x >= lo - slack && x <= hi + slack) {
            return None;
        }
        let x = x.clamp(lo, hi);
        let k = if increasing {
            xs.partition_point(|&v| v < x)
        } else {
            xs.partition_point(|&v| v > x)
        };
        if k == 0 {
            return Some(ys[0]);
        }
        let (x0, x1, y0, y1) = (xs[k - 1], xs[k], ys[k - 1], ys[k]);
        Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }

    /// `ln y` at `ln x`.
    pub fn ln_eval(&self, ln_x: f64) -> Result<f64> {
        Self::interp(&self.lx, &self.ly, ln_x)
            .ok_or_else(|| LabError::OutOfRange(format!("x = {:e} outside table", ln_x.exp())))
    }

    /// `ln x` with `ln y(x) = ln_y`.
    pub fn ln_inverse(&self, ln_y: f64) -> Result<f64> {
        Self::interp(&self.ly, &self.lx, ln_y)
            .ok_or_else(|| LabError::OutOfRange(format!("y = {:e} outside table", ln_y.exp())))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.ln_eval(x.ln())?.exp())
    }
}

/// Monte-Carlo tables. `theta` and `length` are keyed by `ε = t − t_c > 0`,
/// `pi1`, `pi4` by the radius `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalTables {
    pub theta: LogLogTable,
    pub length: LogLogTable,
    pub pi1: LogLogTable,
    pub pi4: LogLogTable,
}

impl EmpiricalTables {
    fn validate(&self) -> Result<()> {
        let inc = |t: &LogLogTable| t.ly[0] < t.ly[1];
        if !inc(&self.theta) || inc(&self.length) || inc(&self.pi1) || inc(&self.pi4) {
            return Err(LabError::InvalidParameter(
                "theta must increase; length, pi1, pi4 must decrease".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Backend {
    /// `θ = c_θ ε^{5/36}`, `L = c_L |ε|^{−4/3}`, `π₁ = c₁ n^{−5/48}`, `π₄ = c₄ n^{−5/4}`.
    Ansatz(Amplitudes),
    Empirical(EmpiricalTables),
}

impl Default for Backend {
    fn default() -> Self {
        Backend::Ansatz(Amplitudes::default())
    }
}

impl Backend {
    pub fn ansatz() -> Self {
        Backend::default()
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Backend::Ansatz(a) => a.validate(),
            Backend::Empirical(t) => t.validate(),
        }
    }

    pub fn is_ansatz(&self) -> bool {
        matches!(self, Backend::Ansatz(_))
    }

    /// `ln θ(t_c + ε)`; `ln ε = ±∞` give θ = 0 and θ(∞) = 1.
    pub fn ln_theta(&self, ln_eps: f64) -> Result<f64> {
        if ln_eps == f64::INFINITY {
            return Ok(0.0);
        }
        if ln_eps == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        match self {
            Backend::Ansatz(a) => Ok(a.theta.ln() + 5.0 / 36.0 * ln_eps),
            Backend::Empirical(t) => t.theta.ln_eval(ln_eps),
        }
    }

    /// `ln L(t_c ± ε)`; `L(∞) = 0`, `L(t_c) = ∞`.
    pub fn ln_length(&self, ln_eps: f64) -> Result<f64> {
        if ln_eps == f64::INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        if ln_eps == f64::NEG_INFINITY {
            return Ok(f64::INFINITY);
        }
        match self {
            Backend::Ansatz(a) => Ok(a.length.ln() - 4.0 / 3.0 * ln_eps),
            Backend::Empirical(t) => t.length.ln_eval(ln_eps),
        }
    }

    pub fn ln_pi1(&self, ln_n: f64) -> Result<f64> {
        match self {
            Backend::Ansatz(a) => Ok(a.pi1.ln() - 5.0 / 48.0 * ln_n),
            Backend::Empirical(t) => t.pi1.ln_eval(ln_n),
        }
    }

    pub fn ln_pi4(&self, ln_n: f64) -> Result<f64> {
        match self {
            Backend::Ansatz(a) => Ok(a.pi4.ln() - 5.0 / 4.0 * ln_n),
            Backend::Empirical(t) => t.pi4.ln_eval(ln_n),
        }
    }

    /// `ln ε` with `θ(t_c + ε) = e^{ln_theta}`.
    pub fn ln_eps_for_theta(&self, ln_theta: f64) -> Result<f64> {
        match self {
            Backend::Ansatz(a) => Ok((ln_theta - a.theta.ln()) * 36.0 / 5.0),
            Backend::Empirical(t) => t.theta.ln_inverse(ln_theta),
        }
    }

    /// `ln ε` with `θ(t_c + ε)·ε = e^{ln_target}` (an increasing map of ε).
    pub fn ln_eps_for_theta_eps(&self, ln_target: f64) -> Result<f64> {
        match self {
            Backend::Ansatz(a) => Ok((ln_target - a.theta.ln()) * 36.0 / 41.0),
            Backend::Empirical(t) => {
                let (mut lo, mut hi) = t.theta.ln_range();
                let f = |x: f64| t.theta.ln_eval(x).map(|y| y + x - ln_target);
                if f(lo)? > 0.0 || f(hi)? < 0.0 {
                    return Err(LabError::OutOfRange(format!(
                        "theta*eps = {:e} outside table",
                        ln_target.exp()
                    )));
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid)? < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-15 * (1.0 + hi.abs()) {
                        break;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }

    /// Range of `ln ε` on which both θ and L are available.
    pub fn ln_eps_domain(&self) -> (f64, f64) {
        match self {
            Backend::Ansatz(_) => (f64::NEG_INFINITY, f64::INFINITY),
            Backend::Empirical(t) => {
                let (a0, a1) = t.theta.ln_range();
                let (b0, b1) = t.length.ln_range();
                (a0.max(b0), a1.min(b1))
            }
        }
    }

    /// `θ(t)`: 0 at or below `t_c`.
    pub fn theta(&self, t: f64) -> Result<f64> {
        if t <= T_C {
            return Ok(0.0);
        }
        Ok(self.ln_theta((t - T_C).ln())?.exp())
    }

    /// `L(t)`, symmetric under `p ↦ 1 − p`; `L(t_c) = ∞`, `L(∞) = 0`.
    pub fn length(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(LabError::InvalidParameter(format!("time {t} must be >= 0")));
        }
        let eps = match self {
            Backend::Ansatz(_) => (t - T_C).abs(),
            Backend::Empirical(_) if t < T_C => t_of_p(1.0 - p_of_t(t)) - T_C,
            Backend::Empirical(_) => t - T_C,
        };
        Ok(self.ln_length(eps.ln())?.exp())
    }

    pub fn pi1(&self, n: f64) -> Result<f64> {
        Ok(self.ln_pi1(n.ln())?.exp())
    }

    pub fn pi4(&self, n: f64) -> Result<f64> {
        Ok(self.ln_pi4(n.ln())?.exp())
    }
}
