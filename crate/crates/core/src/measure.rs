//! Avalanche statistics over event logs: clusters surrounding the origin,
//! disjoint frozen circuits, volume windows and replica aggregation.

use crate::dynamics::{EventKind, EventLog};
use crate::error::{LabError, Result};
use crate::lattice::DenseRegion;
use crate::percolation::{max_disjoint_circuits, Configuration, SurroundChecker};
use crate::scales::{Backend, Model};
use crate::stats::{histogram, Proportion, Summary};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// One frozen or burnt cluster surrounding the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterRecord {
    pub time: f64,
    pub kind: EventKind,
    pub volume: u32,
    /// Smallest and largest `rad` of a member, measured from the origin.
    pub inner_radius: u32,
    pub outer_radius: u32,
    /// The cluster meets `∂in(region)`; "surrounding" is then a finite-box reading.
    pub touches_border: bool,
    /// The member set alone contains a circuit around the origin.
    pub has_circuit: bool,
}

/// Counts of surrounding clusters inside / not inside `B_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxCount {
    pub n: u32,
    pub inside: u32,
    pub outside: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvalancheReport {
    pub clusters: Vec<ClusterRecord>,
    /// `(time, |F_t|)` after each surrounding record.
    pub timeline: Vec<(f64, u32)>,
    pub boxes: Vec<BoxCount>,
    /// Maximum number of disjoint circuits around 0 in the final dead set.
    pub circuits: u32,
    /// Surrounding clusters that contain a circuit themselves.
    pub circuit_bearing: u32,
    /// `|F| / ln ln(param)` for `param = N` or `1/ζ`, when meaningful.
    pub normalized: Option<f64>,
}

impl AvalancheReport {
    /// `|F|`.
    pub fn surrounding(&self) -> u32 {
        self.clusters.len() as u32
    }

    /// Report CSV: one row per surrounding cluster.
    pub fn to_csv(&self, run_id: u64, with_header: bool) -> String {
        let mut s = String::new();
        if with_header {
            s.push_str(REPORT_CSV_HEADER);
            s.push('\n');
        }
        for c in &self.clusters {
            let _ = writeln!(s, "{run_id},{},{},{},{}", c.time, c.volume, c.inner_radius, c.outer_radius);
        }
        s
    }
}

pub const REPORT_CSV_HEADER: &str = "run_id,time,volume,inner_radius,outer_radius";

fn check_log(dense: &DenseRegion, log: &EventLog) -> Result<()> {
    for e in log.iter() {
        let fits = (e.site as usize) < dense.len()
            && dense.site(e.site) == e.coord
            && e.members.iter().all(|&m| (m as usize) < dense.len());
        if !fits {
            return Err(LabError::InvalidParameter(format!(
                "log does not match region: event at {:?} (index {})",
                e.coord, e.site
            )));
        }
    }
    Ok(())
}

/// Collect the Freeze / Burn records of a log that surround the origin.
///
/// `final_state` only fixes the region; `radii` are the `n` for `F^{(B_n)}`;
/// `param` is `N` (frozen) or `1/ζ` (fire) for the normalized count.
pub fn avalanche_stats(
    log: &EventLog,
    final_state: &Configuration,
    radii: &[u32],
    param: Option<f64>,
) -> Result<AvalancheReport> {
    let dense = final_state.dense();
    check_log(dense, log)?;
    let mut checker = SurroundChecker::new(dense.clone())?;
    let origin = checker.origin();
    let mut dead = vec![false; dense.len()];
    let mut own = vec![false; dense.len()];
    let mut clusters = Vec::new();
    let mut timeline = Vec::new();
    let mut inside = vec![0u32; radii.len()];
    let mut circuit_bearing = 0;
    for e in log.iter().filter(|e| matches!(e.kind, EventKind::Freeze | EventKind::Burn)) {
        for &m in &e.members {
            dead[m as usize] = true;
        }
        if e.members.is_empty() || !checker.surrounds(&e.members) {
            continue;
        }
        let rads = e.members.iter().map(|&m| dense.site(m).radius());
        let inner_radius = rads.clone().min().unwrap_or(0);
        let outer_radius = rads.max().unwrap_or(0);
        for (k, &n) in radii.iter().enumerate() {
            inside[k] += u32::from(outer_radius <= n);
        }
        for &m in &e.members {
            own[m as usize] = m != origin;
        }
        let has_circuit = max_disjoint_circuits(dense, &own)? >= 1;
        for &m in &e.members {
            own[m as usize] = false;
        }
        circuit_bearing += u32::from(has_circuit);
        clusters.push(ClusterRecord {
            time: e.time,
            kind: e.kind,
            volume: e.volume,
            inner_radius,
            outer_radius,
            touches_border: e.members.iter().any(|&m| dense.on_border(m)),
            has_circuit,
        });
        timeline.push((e.time, clusters.len() as u32));
    }
    dead[origin as usize] = false;
    let circuits = max_disjoint_circuits(dense, &dead)?;
    let total = clusters.len() as u32;
    let boxes = radii
        .iter()
        .zip(inside)
        .map(|(&n, inside)| BoxCount { n, inside, outside: total - inside })
        .collect();
    let normalized = param.and_then(|x| {
        let ll = x.ln().ln();
        (ll > 0.0 && ll.is_finite()).then(|| f64::from(total) / ll)
    });
    Ok(AvalancheReport { clusters, timeline, boxes, circuits, circuit_bearing, normalized })
}

/// Surrounding burnt clusters with volume in
/// `[V∞ e^{−(ln 1/ζ)^{1−ξ}}, V∞ e^{−(ln 1/ζ)^ξ}]`.
pub fn volume_window_count(report: &AvalancheReport, zeta: f64, xi: f64, backend: &Backend) -> Result<u32> {
    if !(xi > 0.0 && xi <= 0.5) {
        return Err(LabError::InvalidParameter(format!("xi = {xi} must lie in (0, 1/2]")));
    }
    let model = Model::ff(zeta)?;
    let ln_v = backend.derived_constants(&model)?.ln_v_inf;
    let l = model.ln_param();
    let (lo, hi) = (ln_v - l.powf(1.0 - xi), ln_v - l.powf(xi));
    Ok(report
        .clusters
        .iter()
        .filter(|c| c.kind == EventKind::Burn)
        .filter(|c| {
            let lv = f64::from(c.volume).ln();
            lv >= lo && lv <= hi
        })
        .count() as u32)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxSummary {
    pub n: u32,
    pub inside: Summary,
    pub outside: Summary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateSummary {
    pub replicas: usize,
    pub surrounding: Summary,
    pub circuits: Summary,
    pub circuit_bearing: Summary,
    pub normalized: Option<Summary>,
    pub boxes: Vec<BoxSummary>,
    /// Replicas with at least one surrounding cluster (Wilson interval available).
    pub any_surrounding: Proportion,
    /// `histogram[k]` = replicas with `|F| = k`.
    pub histogram: Vec<u64>,
    pub volumes: Option<Summary>,
}

/// Order-independent aggregation of replica reports.
pub fn aggregate(reports: &[AvalancheReport]) -> Result<AggregateSummary> {
    let first = reports.first().ok_or_else(|| LabError::Empty("no reports to aggregate".into()))?;
    let ns: Vec<u32> = first.boxes.iter().map(|b| b.n).collect();
    if reports.iter().any(|r| r.boxes.iter().map(|b| b.n).ne(ns.iter().copied())) {
        return Err(LabError::InvalidParameter("reports use different box radii".into()));
    }
    let col = |f: &dyn Fn(&AvalancheReport) -> f64| -> Summary {
        Summary::of(&reports.iter().map(f).collect::<Vec<_>>()).expect("non-empty")
    };
    let normalized = if reports.iter().all(|r| r.normalized.is_some()) {
        Summary::of(&reports.iter().filter_map(|r| r.normalized).collect::<Vec<_>>())
    } else {
        None
    };
    let boxes = ns
        .iter()
        .enumerate()
        .map(|(k, &n)| BoxSummary {
            n,
            inside: col(&|r| f64::from(r.boxes[k].inside)),
            outside: col(&|r| f64::from(r.boxes[k].outside)),
        })
        .collect();
    let counts: Vec<u64> = reports.iter().map(|r| u64::from(r.surrounding())).collect();
    let volumes: Vec<f64> = reports.iter().flat_map(|r| r.clusters.iter().map(|c| f64::from(c.volume))).collect();
    Ok(AggregateSummary {
        replicas: reports.len(),
        surrounding: col(&|r| f64::from(r.surrounding())),
        circuits: col(&|r| f64::from(r.circuits)),
        circuit_bearing: col(&|r| f64::from(r.circuit_bearing)),
        normalized,
        boxes,
        any_surrounding: Proportion::new(counts.iter().filter(|&&c| c > 0).count() as u64, counts.len() as u64),
        histogram: histogram(&counts),
        volumes: Summary::of(&volumes),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{run_frozen, Event, FrozenParams, FrozenRule, Streams};
    use crate::lattice::{Region, SiteCoord};
    use crate::percolation::SiteState;
    use std::sync::Arc;

    fn ring_event(dense: &DenseRegion, r: u32, time: f64) -> Event {
        let members: Vec<u32> = (0..dense.len() as u32).filter(|&i| dense.site(i).radius() == r).collect();
        Event {
            kind: EventKind::Freeze,
            time,
            site: members[0],
            coord: dense.site(members[0]),
            cluster: Some(members[0]),
            volume: members.len() as u32,
            members,
        }
    }

    #[test]
    fn empty_log() {
        let d = DenseRegion::shared(Region::ball(5)).unwrap();
        let c = Configuration::filled(d, SiteState::Vacant);
        let rep = avalanche_stats(&EventLog::default(), &c, &[2], Some(1e6)).unwrap();
        assert_eq!((rep.surrounding(), rep.circuits), (0, 0));
        assert_eq!(rep.normalized, Some(0.0));
    }

    #[test]
    fn hand_built_rings() {
        let d = DenseRegion::shared(Region::ball(8)).unwrap();
        let c = Configuration::filled(d.clone(), SiteState::Vacant);
        let log = EventLog { events: vec![ring_event(&d, 3, 1.0)] };
        let rep = avalanche_stats(&log, &c, &[2, 3, 8], None).unwrap();
        assert_eq!((rep.surrounding(), rep.circuits, rep.circuit_bearing), (1, 1, 1));
        assert_eq!(rep.clusters[0].inner_radius, 3);
        assert_eq!(
            rep.boxes,
            vec![
                BoxCount { n: 2, inside: 0, outside: 1 },
                BoxCount { n: 3, inside: 1, outside: 0 },
                BoxCount { n: 8, inside: 1, outside: 0 }
            ]
        );
        let log2 = EventLog { events: vec![ring_event(&d, 3, 1.0), ring_event(&d, 5, 2.0)] };
        let rep2 = avalanche_stats(&log2, &c, &[], None).unwrap();
        assert_eq!((rep2.surrounding(), rep2.circuits), (2, 2));
        assert_eq!(rep2.timeline, vec![(1.0, 1), (2.0, 2)]);
        assert!(rep2.to_csv(7, true).lines().nth(2).unwrap().starts_with("7,2,"));
    }

    #[test]
    fn mismatched_log_rejected() {
        let big = DenseRegion::shared(Region::ball(8)).unwrap();
        let small = Configuration::filled(DenseRegion::shared(Region::ball(2)).unwrap(), SiteState::Vacant);
        let log = EventLog { events: vec![ring_event(&big, 5, 1.0)] };
        assert!(avalanche_stats(&log, &small, &[], None).is_err());
    }

    #[test]
    fn frozen_runs_report_consistently() {
        let d: Arc<DenseRegion> = DenseRegion::shared(Region::ball(14)).unwrap();
        let params = FrozenParams { threshold: 40, rule: FrozenRule::Original };
        let mut reports = Vec::new();
        for rep in 0..10 {
            let out = run_frozen(&d, &params, &Streams::derive(2, rep)).unwrap();
            let r = avalanche_stats(&out.log, &out.final_state, &[4, 8, 14], Some(40.0)).unwrap();
            assert!(r.circuits >= r.circuit_bearing);
            assert!(r.boxes.windows(2).all(|w| w[0].inside <= w[1].inside));
            assert!(r.clusters.iter().all(|c| (40..=118).contains(&c.volume)));
            assert!(r.timeline.windows(2).all(|w| w[0].1 < w[1].1 && w[0].0 <= w[1].0));
            assert!(out.log.count(EventKind::Freeze) >= 1);
            reports.push(r);
        }
        let a = aggregate(&reports).unwrap();
        reports.reverse();
        assert_eq!(a, aggregate(&reports).unwrap());
        assert_eq!(a.replicas, 10);
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn volume_windows() {
        let d = DenseRegion::shared(Region::ball(8)).unwrap();
        let c = Configuration::filled(d.clone(), SiteState::Vacant);
        let mut e = ring_event(&d, 3, 1.0);
        e.kind = EventKind::Burn;
        let rep = avalanche_stats(&EventLog { events: vec![e] }, &c, &[], None).unwrap();
        let b = Backend::ansatz();
        // V∞ ≫ 1 at ζ = 10⁻⁸ while the ring has 24 sites.
        assert_eq!(volume_window_count(&rep, 1e-8, 0.25, &b).unwrap(), 0);
        assert!(volume_window_count(&rep, 1e-3, 0.5, &b).unwrap() <= rep.surrounding());
        assert!(volume_window_count(&rep, 1e-3, 0.0, &b).is_err());
    }

    #[test]
    fn origin_member_counts_as_surrounding() {
        let d = DenseRegion::shared(Region::ball(4)).unwrap();
        let c = Configuration::filled(d.clone(), SiteState::Vacant);
        let o = d.index_of(SiteCoord::ORIGIN).unwrap();
        let e = Event {
            kind: EventKind::Freeze,
            time: 0.5,
            site: o,
            coord: SiteCoord::ORIGIN,
            cluster: Some(o),
            volume: 1,
            members: vec![o],
        };
        let rep = avalanche_stats(&EventLog { events: vec![e] }, &c, &[0], None).unwrap();
        assert_eq!((rep.surrounding(), rep.circuits, rep.circuit_bearing), (1, 0, 0));
    }
}
