//! Bernoulli percolation with heavy-tailed impurities: each site independently
//! carries a hole (a ball of forced-vacant sites) with a random radius.
//!
//! A radius law here is a law on `{∅} ∪ ℕ`: the hole may be empty (this is how a
//! vacant origin in the sub-critical cluster construction shows up), so the tail
//! `tail(r) = P(hole non-empty, radius ≥ r)` has `tail(0) ≤ 1`.

mod domination;

pub use domination::{
    crossing_stability, default_r_cut, domination_experiment, ff_hole_probability, forest_fire_spec, rho_from_subcritical_cluster,
    DominationOptions, DominationReport, FunctionalComparison, StabilityReport, SubcriticalRadii,
};

use crate::error::{LabError, Result};
use crate::lattice::{ball_size, Annulus, Ball, DenseRegion, Region, SiteCoord};
use crate::percolation::{Configuration, SiteState};
use crate::rng::{Purpose, StreamKey};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

/// `γ = 9/8`, the fixed instantiation of the tail exponent for forest fires.
pub const FF_GAMMA: f64 = 9.0 / 8.0;
/// Holes are sampled for centers whose truncation mass is above this.
pub const PADDING_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HoleProbability {
    Constant(f64),
    PerSite { default: f64, sites: BTreeMap<SiteCoord, f64> },
}

impl HoleProbability {
    pub fn at(&self, v: SiteCoord) -> f64 {
        match self {
            HoleProbability::Constant(p) => *p,
            HoleProbability::PerSite { default, sites } => *sites.get(&v).unwrap_or(default),
        }
    }

    pub fn max(&self) -> f64 {
        match self {
            HoleProbability::Constant(p) => *p,
            HoleProbability::PerSite { default, sites } => sites.values().fold(*default, |a, &b| a.max(b)),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        let good = match self {
            HoleProbability::Constant(p) => ok(*p),
            HoleProbability::PerSite { default, sites } => ok(*default) && sites.values().all(|&p| ok(p)),
        };
        if good {
            Ok(())
        } else {
            Err(LabError::InvalidParameter("hole probabilities must lie in [0,1]".into()))
        }
    }
}

/// Law of the hole radius, as its tail on `0..=max_radius` (zero beyond).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RadiusLaw {
    tail: Vec<f64>,
}

impl TryFrom<Vec<f64>> for RadiusLaw {
    type Error = LabError;
    fn try_from(tail: Vec<f64>) -> Result<Self> {
        RadiusLaw::new(tail)
    }
}

impl From<RadiusLaw> for Vec<f64> {
    fn from(l: RadiusLaw) -> Self {
        l.tail
    }
}

impl RadiusLaw {
    /// `tail[k] = P(non-empty, radius ≥ k)`; must be nonincreasing in `[0,1]`.
    pub fn new(mut tail: Vec<f64>) -> Result<Self> {
        if tail.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(LabError::InvalidParameter("tail values must lie in [0,1]".into()));
        }
        if tail.windows(2).any(|w| w[1] > w[0]) {
            return Err(LabError::InvalidParameter("tail must be nonincreasing".into()));
        }
        while tail.last() == Some(&0.0) {
            tail.pop();
        }
        Ok(RadiusLaw { tail })
    }

    /// All mass on radius `r`.
    pub fn dirac(r: u32) -> Self {
        RadiusLaw { tail: vec![1.0; r as usize + 1] }
    }

    /// From a tail function; fails if the tail is still ≥ 10⁻¹² at `r_max`
    /// (not normalizable within the cap).
    pub fn from_tail_fn(f: impl Fn(u32) -> f64, r_max: u32) -> Result<Self> {
        if f(r_max) >= PADDING_EPS {
            return Err(LabError::InvalidParameter(format!("tail not negligible at r_max = {r_max}")));
        }
        RadiusLaw::new((0..r_max).map(f).collect())
    }

    /// Empirical law; `None` is an empty hole.
    pub fn from_samples(samples: &[Option<u32>]) -> Result<Self> {
        if samples.is_empty() {
            return Err(LabError::Empty("no radius samples".into()));
        }
        let max = samples.iter().flatten().copied().max();
        let Some(max) = max else { return RadiusLaw::new(Vec::new()) };
        let mut counts = vec![0u64; max as usize + 2];
        for r in samples.iter().flatten() {
            counts[*r as usize] += 1;
        }
        let n = samples.len() as f64;
        let mut tail = vec![0.0; max as usize + 1];
        let mut acc = 0u64;
        for k in (0..=max as usize).rev() {
            acc += counts[k];
            tail[k] = acc as f64 / n;
        }
        RadiusLaw::new(tail)
    }

    /// `P(non-empty, radius ≥ r)`.
    pub fn tail(&self, r: u32) -> f64 {
        self.tail.get(r as usize).copied().unwrap_or(0.0)
    }

    pub fn tail_values(&self) -> &[f64] {
        &self.tail
    }

    /// Largest radius with positive mass, if any.
    pub fn max_radius(&self) -> Option<u32> {
        self.tail.len().checked_sub(1).map(|k| k as u32)
    }

    /// `P(radius = r)` for a non-empty hole.
    pub fn mass(&self, r: u32) -> f64 {
        self.tail(r) - self.tail(r + 1)
    }

    /// Inverse-CDF draw from a uniform `u ∈ (0,1)`.
    pub fn sample(&self, u: f64) -> Option<u32> {
        if self.tail.is_empty() || u >= self.tail[0] {
            return None;
        }
        // Largest k with tail[k] > u.
        let k = self.tail.partition_point(|&t| t > u);
        Some(k as u32 - 1)
    }

    /// Two-column `r,tail` CSV.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,tail\n");
        for (r, t) in self.tail.iter().enumerate() {
            let _ = writeln!(s, "{r},{t}");
        }
        s
    }
}

/// Parameters `(c, γ, υ)` of the impurity tail bound
/// `π·tail(r) ≤ (υ/m²)((r∨1)/m)^{γ−2} e^{−cr/m}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionBound {
    pub c: f64,
    pub gamma: f64,
    pub upsilon: f64,
}

impl AssumptionBound {
    pub fn value(&self, m: f64, r: u32) -> f64 {
        bound_shape(m, r, self.c, self.gamma) * self.upsilon
    }
}

/// `(1/m²)((r∨1)/m)^{γ−2} e^{−cr/m}`.
fn bound_shape(m: f64, r: u32, c: f64, gamma: f64) -> f64 {
    let r = r as f64;
    (r.max(1.0) / m).powf(gamma - 2.0) * (-c * r / m).exp() / (m * m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImpuritySpec {
    pub m: f64,
    pub pi: HoleProbability,
    pub radius: RadiusLaw,
    pub bound: Option<AssumptionBound>,
}

impl ImpuritySpec {
    pub fn new(m: f64, pi: HoleProbability, radius: RadiusLaw) -> Self {
        ImpuritySpec { m, pi, radius, bound: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m >= 1.0 && self.m.is_finite()) {
            return Err(LabError::InvalidParameter(format!("m = {} must be >= 1", self.m)));
        }
        self.pi.validate()?;
        if let Some(b) = &self.bound {
            if !(b.gamma > 1.0 && b.gamma < 2.0) || !(b.c > 0.0) || !(b.upsilon >= 0.0) {
                return Err(LabError::InvalidParameter("bound needs gamma in (1,2), c > 0, upsilon >= 0".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hole {
    pub center: SiteCoord,
    pub radius: u32,
}

impl Hole {
    pub fn ball(&self) -> Ball {
        Ball { radius: self.radius, center: self.center }
    }

    pub fn contains(&self, v: SiteCoord) -> bool {
        v.in_ball(self.radius, self.center)
    }

    pub fn sites(&self) -> Vec<SiteCoord> {
        Region::Ball(self.ball()).sites().expect("balls are well-formed")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HoleSet {
    pub holes: Vec<Hole>,
    /// Hole centers were sampled in `B_{ρ+padding}`, `ρ` the region radius.
    pub padding: u32,
    /// Union bound on the probability that an unsampled hole meets the region.
    pub truncation_bound: f64,
}

/// Bernoulli, hole-indicator and hole-radius streams of one replica.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpurityStreams {
    pub bernoulli: StreamKey,
    pub indicator: StreamKey,
    pub radius: StreamKey,
}

impl ImpurityStreams {
    pub fn derive(root: u64, replica: u64) -> Self {
        ImpurityStreams {
            bernoulli: StreamKey::new(root, replica, Purpose::Bernoulli),
            indicator: StreamKey::new(root, replica, Purpose::HoleIndicator),
            radius: StreamKey::new(root, replica, Purpose::HoleRadius),
        }
    }

    pub fn child(&self, k: u64) -> Self {
        ImpurityStreams {
            bernoulli: self.bernoulli.child(k),
            indicator: self.indicator.child(k),
            radius: self.radius.child(k),
        }
    }
}

/// Smallest padding `R` whose union bound
/// `π_max Σ_{k>R} P(radius = k)·|B_{ρ+k}|` is below [`PADDING_EPS`].
fn padding(spec: &ImpuritySpec, rho: u32) -> (u32, f64) {
    let pmax = spec.pi.max();
    let Some(kmax) = spec.radius.max_radius() else { return (0, 0.0) };
    let mut acc = 0.0;
    let mut best = (kmax, 0.0);
    for k in (0..kmax).rev() {
        acc += pmax * spec.radius.mass(k + 1) * ball_size(rho + k + 1) as f64;
        if acc >= PADDING_EPS {
            break;
        }
        best = (k, acc);
    }
    best
}

/// Bernoulli(p) outside the union of holes, vacant inside. With `π = 0` the
/// configuration is bit-for-bit `sample_bernoulli(dense, p, streams.bernoulli)`.
pub fn sample_impurity_percolation(
    dense: &Arc<DenseRegion>,
    p: f64,
    spec: &ImpuritySpec,
    streams: &ImpurityStreams,
) -> Result<(Configuration, HoleSet)> {
    spec.validate()?;
    let mut config = crate::percolation::sample_bernoulli(dense, p, streams.bernoulli)?;
    let holes = sample_holes(dense, spec, streams)?;
    let states = config.states_mut();
    for h in &holes.holes {
        let area = ball_size(h.radius);
        if area as usize > dense.len() {
            for (i, &v) in dense.sites().iter().enumerate() {
                if h.contains(v) {
                    states[i] = SiteState::Vacant;
                }
            }
        } else {
            for v in h.sites() {
                if let Some(i) = dense.index_of(v) {
                    states[i as usize] = SiteState::Vacant;
                }
            }
        }
    }
    Ok((config, holes))
}

/// Non-empty holes whose center lies in the padded ball around the region.
pub fn sample_holes(dense: &DenseRegion, spec: &ImpuritySpec, streams: &ImpurityStreams) -> Result<HoleSet> {
    spec.validate()?;
    let rho = dense.sites().iter().map(|v| v.radius()).max().unwrap_or(0);
    let (pad, truncation_bound) = padding(spec, rho);
    let mut holes = Vec::new();
    if spec.pi.max() > 0.0 && spec.radius.max_radius().is_some() {
        for v in Region::ball(rho + pad).sites()? {
            if streams.indicator.uniform(v, 0) >= spec.pi.at(v) {
                continue;
            }
            let Some(r) = spec.radius.sample(streams.radius.uniform(v, 0)) else { continue };
            // Skip holes that cannot reach the region.
            if v.radius() > rho + r {
                continue;
            }
            holes.push(Hole { center: v, radius: r });
        }
    }
    Ok(HoleSet { holes, padding: pad, truncation_bound })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HoleVariant {
    /// `H(A)`: some hole meets both `∂out B_{n1}(z)` and `∂in B_{n2}(z)`.
    Crossing,
    /// The sub-event that additionally requires `H_v ⊉ B_{n1}(z)` and
    /// `H_v ∩ ∂in B_{2 n2}(z) = ∅`.
    Restricted,
}

fn hole_crosses(h: &Hole, a: &Annulus, variant: HoleVariant) -> bool {
    // Cheap rejection: the hole must reach radius n1+1 and n2 from z.
    let d = h.center.radius_from(a.center);
    if d > h.radius + a.outer || d + h.radius < a.inner {
        return false;
    }
    let (mut inner, mut outer) = (false, false);
    let wide = Annulus { inner: a.inner, outer: 2 * a.outer, center: a.center };
    for v in h.sites() {
        inner |= a.touches_inner(v);
        outer |= a.touches_outer(v);
        if variant == HoleVariant::Restricted && wide.touches_outer(v) {
            return false;
        }
    }
    if !(inner && outer) {
        return false;
    }
    match variant {
        HoleVariant::Crossing => true,
        HoleVariant::Restricted => {
            let inner_ball = Region::Ball(Ball { radius: a.inner, center: a.center });
            !inner_ball.sites().expect("balls are well-formed").into_iter().all(|v| h.contains(v))
        }
    }
}

pub fn detect_crossing_hole(holes: &[Hole], annulus: &Annulus, variant: HoleVariant) -> Result<bool> {
    annulus.validate()?;
    Ok(holes.iter().any(|h| hole_crosses(h, annulus, variant)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub c: f64,
    pub gamma: f64,
    /// Smallest `υ` for which the bound holds on the grid.
    pub upsilon_fit: f64,
    /// Radius where the fit is attained.
    pub argmax_r: u32,
    /// Radii where the spec's own bound (if any) fails.
    pub violations: Vec<u32>,
    /// `υ_fit / (m/m∞)^{9/8}`, the implied constant `c′` of the forest-fire
    /// instantiation, when `m∞` is supplied.
    pub ff_constant: Option<f64>,
}

/// Fit the minimal `υ(m)` over the radius grid `0..=max_radius`.
pub fn check_assumption(spec: &ImpuritySpec, c: f64, gamma: f64, m_inf: Option<f64>) -> Result<AssumptionReport> {
    spec.validate()?;
    if !(gamma > 1.0 && gamma < 2.0) || !(c > 0.0) {
        return Err(LabError::InvalidParameter("need gamma in (1,2) and c > 0".into()));
    }
    let Some(kmax) = spec.radius.max_radius() else {
        return Err(LabError::Empty("radius law has no support: empty grid".into()));
    };
    let pi = spec.pi.max();
    let mut fit = (0.0f64, 0u32);
    let mut violations = Vec::new();
    for r in 0..=kmax {
        let lhs = pi * spec.radius.tail(r);
        let need = lhs / bound_shape(spec.m, r, c, gamma);
        if need > fit.0 {
            fit = (need, r);
        }
        if let Some(b) = &spec.bound {
            if lhs > b.value(spec.m, r) * (1.0 + 1e-12) {
                violations.push(r);
            }
        }
    }
    Ok(AssumptionReport {
        c,
        gamma,
        upsilon_fit: fit.0,
        argmax_r: fit.1,
        violations,
        ff_constant: m_inf.map(|mi| fit.0 / (spec.m / mi).powf(FF_GAMMA)),
    })
}
