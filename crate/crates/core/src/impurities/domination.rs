//! The forest-fire impurity model: hole radii from sub-critical clusters, the
//! crossing-stability check and the monotone-functional domination experiment.

use super::{
    check_assumption, sample_impurity_percolation, HoleProbability, ImpuritySpec, ImpurityStreams, RadiusLaw,
    FF_GAMMA,
};
use crate::dynamics::{run_ffwor, FireParams, Streams};
use crate::error::{LabError, Result};
use crate::lattice::{DenseRegion, Region, SiteCoord};
use crate::percolation::{
    bernoulli_occupied, crossing, label_clusters, sample_bernoulli, Color, Configuration, CrossingDomain, Direction,
    EmbeddedRect, SiteState,
};
use crate::rng::StreamKey;
use crate::scales::Backend;
use crate::stats::Proportion;
use crate::{p_of_t, T_C};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::sync::Arc;

/// Hole probability `t_c ζ e^{t_c ζ}` of the forest-fire impurity model.
pub fn ff_hole_probability(zeta: f64) -> f64 {
    T_C * zeta * (T_C * zeta).exp()
}

/// Radii of the origin's cluster at density `p(τ)`, `τ ~ U[0, t_c − ε̄]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubcriticalRadii {
    pub eps_bar: f64,
    pub r_cut: u32,
    /// `None` when the origin is vacant; truncated samples record `r_cut`.
    pub radii: Vec<Option<u32>>,
    pub truncated: u64,
    pub law: RadiusLaw,
}

/// `rad(C(0))` by on-demand flood fill, stopping once the cluster reaches `r_cut`.
fn cluster_radius(key: StreamKey, p: f64, r_cut: u32) -> (Option<u32>, bool) {
    let o = SiteCoord::ORIGIN;
    if !bernoulli_occupied(key, o, p) {
        return (None, false);
    }
    let mut seen = HashSet::from([o]);
    let mut stack = vec![o];
    let mut rad = 0;
    while let Some(v) = stack.pop() {
        for w in v.neighbors() {
            if !seen.contains(&w) && bernoulli_occupied(key, w, p) {
                rad = rad.max(w.radius());
                if rad >= r_cut {
                    return (Some(r_cut), true);
                }
                seen.insert(w);
                stack.push(w);
            }
        }
    }
    (Some(rad), false)
}

pub fn rho_from_subcritical_cluster(eps_bar: f64, r_cut: u32, samples: u64, key: StreamKey) -> Result<SubcriticalRadii> {
    if !(eps_bar > 0.0 && eps_bar < T_C) {
        return Err(LabError::InvalidParameter(format!("eps_bar = {eps_bar} must lie in (0, t_c)")));
    }
    if r_cut < 1 {
        return Err(LabError::InvalidParameter("r_cut must be >= 1".into()));
    }
    if samples == 0 {
        return Err(LabError::InvalidParameter("need at least one sample".into()));
    }
    let top = T_C - eps_bar;
    let draws: Vec<(Option<u32>, bool)> = (0..samples)
        .into_par_iter()
        .map(|k| cluster_radius(key.child(k), p_of_t(key.scalar(k) * top), r_cut))
        .collect();
    let truncated = draws.iter().filter(|d| d.1).count() as u64;
    let radii: Vec<Option<u32>> = draws.into_iter().map(|d| d.0).collect();
    let law = RadiusLaw::from_samples(&radii)?;
    Ok(SubcriticalRadii { eps_bar, r_cut, radii, truncated, law })
}

/// Default truncation radius `64·L(p(t_c − ε̄))` under the unit ansatz.
pub fn default_r_cut(eps_bar: f64) -> u32 {
    let l = Backend::ansatz().length(T_C - eps_bar).unwrap_or(1.0);
    (64.0 * l).ceil().clamp(1.0, 1e6) as u32
}

/// Forest-fire impurity spec at scale `m`: constant `π = t_c ζ e^{t_c ζ}`.
pub fn forest_fire_spec(m: f64, zeta: f64, law: RadiusLaw) -> ImpuritySpec {
    ImpuritySpec::new(m, HoleProbability::Constant(ff_hole_probability(zeta)), law)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub n: u32,
    pub p: f64,
    pub bernoulli: Proportion,
    pub impurity: Proportion,
    pub upsilon: f64,
    /// The universal constant `C` in `(1 − Cυ)`; not constructive, so chosen.
    pub c_const: f64,
    pub lower_bound: f64,
    pub pass: bool,
}

/// Long-direction crossing of a `2n × n` rectangle centred in `B_n`, with and
/// without impurities (coupled through the same Bernoulli stream), against
/// `(1 − Cυ)·P_p`.
pub fn crossing_stability(
    n: u32,
    p: f64,
    spec: &ImpuritySpec,
    c_const: f64,
    samples: u64,
    root: u64,
) -> Result<StabilityReport> {
    if n == 0 || samples == 0 {
        return Err(LabError::InvalidParameter("need n >= 1 and samples >= 1".into()));
    }
    let upsilon = check_assumption(spec, 1.0, FF_GAMMA, None).map(|r| r.upsilon_fit).unwrap_or(0.0);
    let dense = DenseRegion::shared(Region::ball(n))?;
    let y0 = -i64::from(n / 2);
    let domain = CrossingDomain::Rect(EmbeddedRect::new(-i64::from(n), i64::from(n), y0, y0 + i64::from(n)));
    let hits: Vec<(bool, bool)> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<(bool, bool)> {
            let s = ImpurityStreams::derive(root, i);
            let plain = sample_bernoulli(&dense, p, s.bernoulli)?;
            let (imp, _) = sample_impurity_percolation(&dense, p, spec, &s)?;
            Ok((
                crossing(&plain, &domain, Direction::Horizontal, Color::Occupied)?,
                crossing(&imp, &domain, Direction::Horizontal, Color::Occupied)?,
            ))
        })
        .collect::<Result<_>>()?;
    let bernoulli = Proportion::new(hits.iter().filter(|h| h.0).count() as u64, samples);
    let impurity = Proportion::new(hits.iter().filter(|h| h.1).count() as u64, samples);
    let lower_bound = (1.0 - c_const * upsilon) * bernoulli.estimate();
    let sigma = (bernoulli.std_err().powi(2) + impurity.std_err().powi(2)).sqrt();
    Ok(StabilityReport {
        n,
        p,
        bernoulli,
        impurity,
        upsilon,
        c_const,
        lower_bound,
        pass: impurity.estimate() >= lower_bound - 3.0 * sigma,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationOptions {
    /// Observation time `t ≥ t_c − ε̄`.
    pub t: f64,
    pub eps_bar: f64,
    pub zeta: f64,
    pub samples: u64,
    pub radius_samples: u64,
    pub r_cut: Option<u32>,
}

impl Default for DominationOptions {
    fn default() -> Self {
        DominationOptions { t: T_C, eps_bar: 0.1, zeta: 1e-3, samples: 400, radius_samples: 20_000, r_cut: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalComparison {
    pub name: String,
    pub forest_fire: f64,
    pub impurity: f64,
    pub difference: f64,
    pub sigma: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub n: u32,
    pub options: DominationOptions,
    pub m: f64,
    pub pi: f64,
    pub radius_truncated: u64,
    pub functionals: Vec<FunctionalComparison>,
}

impl DominationReport {
    pub fn pass(&self) -> bool {
        self.functionals.iter().all(|f| f.pass)
    }
}

const FUNCTIONALS: [&str; 4] = ["occupied-fraction", "crossing-wide", "crossing-square", "origin-to-boundary"];

fn functionals(c: &Configuration, n: u32) -> Result<[f64; 4]> {
    let dense = c.dense();
    let frac = c.count(SiteState::Occupied) as f64 / dense.len() as f64;
    let h = (n / 2).max(1);
    let cross = |r: EmbeddedRect| -> Result<f64> {
        Ok(f64::from(u8::from(crossing(c, &CrossingDomain::Rect(r), Direction::Horizontal, Color::Occupied)?)))
    };
    let labels = label_clusters(c, Color::Occupied);
    let o = dense.index_of(SiteCoord::ORIGIN).expect("origin in box");
    let arm = labels
        .cluster_of(o)
        .is_some_and(|id| labels.members(id).iter().any(|&i| dense.on_border(i)));
    Ok([frac, cross(EmbeddedRect::wide(h))?, cross(EmbeddedRect::square(h))?, f64::from(u8::from(arm))])
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = crate::stats::pairwise_sum(xs) / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Compare forest fire with ignitions truncated at `t_c − ε̄`, observed at `t`,
/// against impurity percolation at `p(t)` on `B_n`. The fire should dominate:
/// each functional passes when `FF − impurity ≥ −3σ` (pooled).
pub fn domination_experiment(n: u32, opts: &DominationOptions, root: u64) -> Result<DominationReport> {
    let trunc = T_C - opts.eps_bar;
    if !(opts.eps_bar > 0.0 && opts.eps_bar < T_C) || !(opts.t >= trunc) || !opts.t.is_finite() {
        return Err(LabError::InvalidParameter("need 0 < eps_bar < t_c and finite t >= t_c - eps_bar".into()));
    }
    if n < 2 || opts.samples < 2 {
        return Err(LabError::InvalidParameter("need n >= 2 and samples >= 2".into()));
    }
    let r_cut = opts.r_cut.unwrap_or_else(|| default_r_cut(opts.eps_bar));
    let radii = rho_from_subcritical_cluster(opts.eps_bar, r_cut, opts.radius_samples, StreamKey(root).child(u64::MAX))?;
    let m = Backend::ansatz().length(trunc)?.max(1.0);
    let spec = forest_fire_spec(m, opts.zeta, radii.law.clone());
    let dense: Arc<DenseRegion> = DenseRegion::shared(Region::ball(n))?;
    let mut fire = FireParams::new(opts.zeta, opts.t);
    fire.truncation = Some(trunc);
    let p = p_of_t(opts.t);

    let rows: Vec<([f64; 4], [f64; 4])> = (0..opts.samples)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let ff = run_ffwor(&dense, &fire, &Streams::derive(root, i))?;
            let (imp, _) = sample_impurity_percolation(&dense, p, &spec, &ImpurityStreams::derive(root, i))?;
            Ok((functionals(&ff.final_state, n)?, functionals(&imp, n)?))
        })
        .collect::<Result<_>>()?;

    let functionals = FUNCTIONALS
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let a: Vec<f64> = rows.iter().map(|r| r.0[k]).collect();
            let b: Vec<f64> = rows.iter().map(|r| r.1[k]).collect();
            let ((ma, sa), (mb, sb)) = (mean_and_se(&a), mean_and_se(&b));
            let sigma = (sa * sa + sb * sb).sqrt();
            FunctionalComparison {
                name: name.to_string(),
                forest_fire: ma,
                impurity: mb,
                difference: ma - mb,
                sigma,
                pass: ma - mb >= -3.0 * sigma,
            }
        })
        .collect();
    Ok(DominationReport {
        n,
        options: DominationOptions { r_cut: Some(r_cut), ..opts.clone() },
        m,
        pi: spec.pi.max(),
        radius_truncated: radii.truncated,
        functionals,
    })
}
