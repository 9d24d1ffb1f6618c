use crate::error::{CliError, Result};
use avalanche_core::dynamics::FrozenRule;
use avalanche_core::scales::{Backend, Model};
use avalanche_core::{DenseRegion, Region};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    #[default]
    Fp,
    Ffwor,
    Ffwr,
    Impurity,
    Birth,
    EstimatePi1,
    EstimatePi4,
    EstimateTheta,
    EstimateLength,
    ScalesPsi,
    ScalesTInfinity,
    ScalesExceptional,
    ScalesSchedule,
    ScalesConstants,
    VerifyOracle,
    VerifyDuality,
    VerifyInvariants,
    VerifyScales,
}

impl ExperimentKind {
    pub fn is_simulation(self) -> bool {
        use ExperimentKind::*;
        matches!(self, Fp | Ffwor | Ffwr | Impurity | Birth)
    }

    pub fn name(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    }
}

/// `ball:R` or `lozenge:K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RegionSpec {
    Ball(u32),
    Lozenge(u32),
}

impl RegionSpec {
    pub fn region(self) -> Region {
        match self {
            RegionSpec::Ball(n) => Region::ball(n),
            RegionSpec::Lozenge(k) => Region::lozenge(k),
        }
    }

    pub fn dense(self) -> Result<Arc<DenseRegion>> {
        Ok(DenseRegion::shared(self.region())?)
    }
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionSpec::Ball(n) => write!(f, "ball:{n}"),
            RegionSpec::Lozenge(k) => write!(f, "lozenge:{k}"),
        }
    }
}

impl FromStr for RegionSpec {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || CliError::Config(format!("region '{s}': expected ball:<radius> or lozenge:<side>"));
        let (shape, size) = s.split_once(':').ok_or_else(bad)?;
        let size: u32 = size.trim().parse().map_err(|_| bad())?;
        match shape.trim() {
            "ball" => Ok(RegionSpec::Ball(size)),
            "lozenge" if size >= 1 => Ok(RegionSpec::Lozenge(size)),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for RegionSpec {
    type Error = CliError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<RegionSpec> for String {
    fn from(r: RegionSpec) -> Self {
        r.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Fp,
    Ff,
}

/// Everything an experiment needs. Unused fields are ignored by a given kind;
/// all fields are validated before anything runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub region: RegionSpec,
    /// Volume threshold `N`.
    pub threshold: u32,
    pub rule: FrozenRule,
    pub zeta: f64,
    pub p: f64,
    /// Observation time (birth snapshots, impurity density `p(t)`).
    pub t: f64,
    pub horizon: f64,
    pub truncation: Option<f64>,
    pub replicas: u64,
    pub seed: u64,
    pub samples: u64,
    /// Radius `n` for arm estimates.
    pub radius: u32,
    /// Radii `n` of the boxes for `F^{(B_n)}`.
    pub radii: Vec<u32>,
    pub eps_bar: f64,
    /// Scales: which model and its parameter (`N` or `ζ`), or `ln` of it.
    pub model: ModelKind,
    pub param: f64,
    pub ln_param: Option<f64>,
    /// Scales: `r` for `Ψ(r)`.
    pub r: f64,
    pub k_max: usize,
    /// Schedule starting exponent; the model default when absent.
    pub alpha: Option<f64>,
    pub backend: Backend,
    pub audit: bool,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::Fp,
            region: RegionSpec::Ball(32),
            threshold: 100,
            rule: FrozenRule::Original,
            zeta: 0.01,
            p: 0.5,
            t: avalanche_core::T_C,
            horizon: 3.0,
            truncation: None,
            replicas: 1,
            seed: 1,
            samples: 10_000,
            radius: 32,
            radii: Vec::new(),
            eps_bar: 0.1,
            model: ModelKind::Fp,
            param: 1000.0,
            ln_param: None,
            r: 10.0,
            k_max: 10,
            alpha: None,
            backend: Backend::default(),
            audit: false,
            out: None,
        }
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}

impl ExperimentConfig {
    /// Read a TOML (or, by extension, JSON) config file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn model_value(&self) -> Result<Model> {
        let m = match (self.model, self.ln_param) {
            (ModelKind::Fp, Some(l)) => Model::fp_log(l),
            (ModelKind::Ff, Some(l)) => Model::ff_log(l),
            (ModelKind::Fp, None) => Model::fp(self.param),
            (ModelKind::Ff, None) => Model::ff(self.param),
        };
        Ok(m?)
    }

    pub fn validate(&self) -> Result<()> {
        use ExperimentKind::*;
        let prob = |x: f64| (0.0..=1.0).contains(&x);
        check(self.replicas >= 1, || "replicas must be at least 1".into())?;
        match self.kind {
            Fp => check(self.threshold >= 1, || "threshold N must be at least 1".into())?,
            Ffwor | Ffwr => {
                check(self.zeta > 0.0 && self.zeta.is_finite(), || format!("zeta = {} must be positive", self.zeta))?;
                check(self.horizon > 0.0, || format!("horizon = {} must be positive", self.horizon))?;
                check(self.kind == Ffwor || self.horizon.is_finite(), || "ffwr needs a finite horizon".into())?;
                if let Some(t) = self.truncation {
                    check(t >= 0.0, || format!("truncation = {t} must be nonnegative"))?;
                }
            }
            Impurity => {
                check(self.zeta > 0.0 && self.zeta < 1.0, || format!("zeta = {} must lie in (0,1)", self.zeta))?;
                check(self.eps_bar > 0.0 && self.eps_bar < avalanche_core::T_C, || {
                    format!("eps_bar = {} must lie in (0, ln 2)", self.eps_bar)
                })?;
                check(self.t >= 0.0 && self.t.is_finite(), || format!("t = {} must be finite and >= 0", self.t))?;
            }
            Birth => check(self.t >= 0.0 && self.t.is_finite(), || format!("t = {} must be finite and >= 0", self.t))?,
            EstimatePi1 | EstimatePi4 | EstimateTheta | EstimateLength => {
                check(prob(self.p), || format!("p = {} must lie in [0,1]", self.p))?;
                check(self.samples >= 1, || "samples must be at least 1".into())?;
                check(self.kind == EstimateLength || self.radius >= 1, || "radius must be at least 1".into())?;
                check(self.kind != EstimateLength || self.p != 0.5, || "L(1/2) is infinite".into())?;
            }
            ScalesPsi | ScalesTInfinity | ScalesExceptional | ScalesSchedule | ScalesConstants => {
                self.model_value()?;
                check(self.kind != ScalesPsi || self.r > 0.0, || format!("r = {} must be positive", self.r))?;
                check(self.kind != ScalesExceptional || self.k_max >= 1, || "k_max must be at least 1".into())?;
                if let Some(a) = self.alpha {
                    check(a > 0.0, || format!("alpha = {a} must be positive"))?;
                }
            }
            VerifyOracle | VerifyDuality | VerifyInvariants | VerifyScales => {}
        }
        self.backend.validate()?;
        Ok(())
    }
}
