//! Event-driven engines: pure birth, N-frozen percolation (original and modified
//! boundary rules), forest fires without and with recovery, and a naive
//! flood-fill reference engine used as an oracle.
//!
//! All engines draw their arrivals from the same [`ArrivalSource`], so runs with
//! equal [`Streams`] see exactly the same births and ignitions. Simultaneous
//! arrivals are ordered by dense site index, births before ignitions.
//!
//! Frozen percolation is simulated with a single birth attempt per site: under the
//! original rule a site whose birth is blocked stays adjacent to the same frozen
//! cluster forever, so every later attempt would be blocked too; under the
//! modified rule a site is consumed by its first attempt (occupied or frozen).

mod engine;
mod events;
mod graph;
mod reference;

pub use engine::{run, run_ffwor, run_ffwr, run_frozen};
pub use events::{Event, EventKind, EventLog, CSV_HEADER};
pub use graph::{frozen_law, frozen_on_graph, Graph, GraphOutcome};
pub use reference::run_reference;

use crate::error::{LabError, Result};
use crate::lattice::{DenseRegion, SiteCoord};
use crate::percolation::{Configuration, SiteState};
use crate::rng::{Purpose, StreamKey};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::sync::Arc;

/// Birth and ignition streams of one replica.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Streams {
    pub birth: StreamKey,
    pub ignition: StreamKey,
}

impl Streams {
    pub fn derive(root: u64, replica: u64) -> Self {
        Streams {
            birth: StreamKey::new(root, replica, Purpose::Birth),
            ignition: StreamKey::new(root, replica, Purpose::Ignition),
        }
    }

    /// First birth time of `v`, Exp(1).
    #[inline]
    pub fn birth_time(&self, v: SiteCoord) -> f64 {
        self.birth.exp(v, 0, 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrozenRule {
    Original,
    Modified,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrozenParams {
    /// Volume threshold `N ≥ 1`.
    pub threshold: u32,
    pub rule: FrozenRule,
}

/// Ignitions at `sites` after time `after` are discarded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IgnitionMask {
    pub sites: BTreeSet<SiteCoord>,
    pub after: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FireParams {
    /// Ignition rate per site.
    pub zeta: f64,
    /// Events after the horizon are not processed. `f64::INFINITY` (FFWoR only)
    /// runs until every site is burnt or `max_events` is reached.
    pub horizon: f64,
    /// Ignitions after `T` are discarded (the process `σ^[T]`).
    pub truncation: Option<f64>,
    pub mask: Option<IgnitionMask>,
    pub max_events: Option<u64>,
}

impl FireParams {
    pub fn new(zeta: f64, horizon: f64) -> Self {
        FireParams { zeta, horizon, truncation: None, mask: None, max_events: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "lowercase")]
pub enum Process {
    Frozen(FrozenParams),
    Ffwor(FireParams),
    Ffwr(FireParams),
}

/// Deliberate engine corruption, used to check that the oracle suite detects a
/// broken engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fault {
    /// Skip every `k`-th cluster merge.
    SkipMerge { every: u64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Check every Freeze/Burn member set against a flood fill at event time.
    pub audit: bool,
    pub fault: Option<Fault>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub final_state: Configuration,
    pub log: EventLog,
    /// Set when `max_events` stopped the run early.
    pub truncated: bool,
}

impl Process {
    pub fn validate(&self) -> Result<()> {
        match self {
            Process::Frozen(p) => {
                if p.threshold < 1 {
                    return Err(LabError::InvalidParameter("N must be at least 1".into()));
                }
            }
            Process::Ffwor(f) | Process::Ffwr(f) => {
                if !(f.zeta > 0.0 && f.zeta.is_finite()) {
                    return Err(LabError::InvalidParameter(format!("zeta = {} must be positive", f.zeta)));
                }
                if !(f.horizon > 0.0) {
                    return Err(LabError::InvalidParameter(format!("horizon = {} must be positive", f.horizon)));
                }
                if matches!(self, Process::Ffwr(_)) && !f.horizon.is_finite() {
                    return Err(LabError::InvalidParameter("FFWR needs a finite horizon".into()));
                }
                if f.truncation.is_some_and(|t| !(t >= 0.0)) {
                    return Err(LabError::InvalidParameter("truncation time must be >= 0".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum ArrivalKind {
    Birth = 0,
    Ignite = 1,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Arrival {
    pub time: f64,
    pub site: u32,
    pub kind: ArrivalKind,
    counter: u64,
}

impl Arrival {
    fn key(&self) -> (f64, u32, ArrivalKind) {
        (self.time, self.site, self.kind)
    }
}

impl PartialEq for Arrival {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Arrival {}
impl PartialOrd for Arrival {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Arrival {
    // Reversed: BinaryHeap is a max-heap and we want the earliest arrival.
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.key(), other.key());
        b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)).then(b.2.cmp(&a.2))
    }
}

/// Merged, time-ordered birth and ignition arrivals of one run.
pub(crate) struct ArrivalSource {
    heap: BinaryHeap<Arrival>,
    streams: Streams,
    sites: Arc<DenseRegion>,
    repeat_births: bool,
    zeta: f64,
    horizon: f64,
    ignition_cutoff: f64,
    mask: Vec<bool>,
    mask_after: f64,
}

impl ArrivalSource {
    pub fn new(dense: &Arc<DenseRegion>, process: &Process, streams: &Streams) -> Self {
        let (zeta, horizon, cutoff, repeat, mask, mask_after) = match process {
            Process::Frozen(_) => (0.0, f64::INFINITY, f64::NEG_INFINITY, false, Vec::new(), f64::INFINITY),
            Process::Ffwor(f) | Process::Ffwr(f) => {
                let mut mask = vec![false; dense.len()];
                let mut after = f64::INFINITY;
                if let Some(m) = &f.mask {
                    after = m.after;
                    for v in &m.sites {
                        if let Some(i) = dense.index_of(*v) {
                            mask[i as usize] = true;
                        }
                    }
                }
                let cutoff = f.truncation.unwrap_or(f64::INFINITY).min(f.horizon);
                (f.zeta, f.horizon, cutoff, matches!(process, Process::Ffwr(_)), mask, after)
            }
        };
        let mut src = ArrivalSource {
            heap: BinaryHeap::with_capacity(dense.len() * if zeta > 0.0 { 2 } else { 1 }),
            streams: *streams,
            sites: dense.clone(),
            repeat_births: repeat,
            zeta,
            horizon,
            ignition_cutoff: cutoff,
            mask,
            mask_after,
        };
        for i in 0..dense.len() as u32 {
            src.schedule(ArrivalKind::Birth, i, 0, 0.0);
            if zeta > 0.0 {
                src.schedule(ArrivalKind::Ignite, i, 0, 0.0);
            }
        }
        src
    }

    fn schedule(&mut self, kind: ArrivalKind, site: u32, counter: u64, after: f64) {
        let v = self.sites.site(site);
        let time = match kind {
            ArrivalKind::Birth => after + self.streams.birth.exp(v, counter, 1.0),
            ArrivalKind::Ignite => after + self.streams.ignition.exp(v, counter, self.zeta),
        };
        let limit = match kind {
            ArrivalKind::Birth => self.horizon,
            ArrivalKind::Ignite => {
                let masked = !self.mask.is_empty() && self.mask[site as usize];
                if masked {
                    self.ignition_cutoff.min(self.mask_after)
                } else {
                    self.ignition_cutoff
                }
            }
        };
        if time <= limit {
            self.heap.push(Arrival { time, site, kind, counter });
        }
    }

    pub fn next(&mut self) -> Option<Arrival> {
        let a = self.heap.pop()?;
        match a.kind {
            ArrivalKind::Birth if self.repeat_births => self.schedule(a.kind, a.site, a.counter + 1, a.time),
            ArrivalKind::Ignite => self.schedule(a.kind, a.site, a.counter + 1, a.time),
            _ => {}
        }
        Some(a)
    }
}

/// Coupled snapshots of the pure birth process at the given (sorted) times:
/// site `v` is occupied at `t` iff its first birth time is at most `t`.
pub fn snapshot_birth(dense: &Arc<DenseRegion>, times: &[f64], streams: &Streams) -> Result<Vec<Configuration>> {
    if times.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(LabError::InvalidParameter("snapshot times must be sorted".into()));
    }
    let births: Vec<f64> = dense.sites().iter().map(|&v| streams.birth_time(v)).collect();
    times
        .iter()
        .map(|&t| {
            let states = births
                .iter()
                .map(|&b| if b <= t { SiteState::Occupied } else { SiteState::Vacant })
                .collect();
            Configuration::new(dense.clone(), states)
        })
        .collect()
}

/// Flood-fill cluster of `start` among occupied sites (sorted dense indices).
pub(crate) fn flood_cluster(dense: &DenseRegion, states: &[SiteState], start: u32) -> Vec<u32> {
    let mut seen = vec![false; dense.len()];
    let mut stack = vec![start];
    seen[start as usize] = true;
    let mut out = Vec::new();
    while let Some(i) = stack.pop() {
        out.push(i);
        for &j in dense.neighbors(i) {
            if j != crate::lattice::NONE && !seen[j as usize] && states[j as usize] == SiteState::Occupied {
                seen[j as usize] = true;
                stack.push(j);
            }
        }
    }
    out.sort_unstable();
    out
}
