//! Naive reference engine: no cluster bookkeeping at all, every cluster is
//! recomputed by flood fill when it is needed. Quadratic, meant for small
//! regions and as an oracle for [`super::run`].

use super::{
    flood_cluster, ArrivalKind, ArrivalSource, Event, EventKind, EventLog, FrozenRule, Process, RunOutput, Streams,
};
use crate::error::Result;
use crate::lattice::{DenseRegion, NONE};
use crate::percolation::{Configuration, SiteState};
use std::sync::Arc;

pub fn run_reference(dense: &Arc<DenseRegion>, process: &Process, streams: &Streams) -> Result<RunOutput> {
    process.validate()?;
    let n = dense.len();
    let mut states = vec![SiteState::Vacant; n];
    let mut ever_born = vec![false; n];
    let mut log: Vec<Event> = Vec::new();
    let mut src = ArrivalSource::new(dense, process, streams);
    let (max_events, until_dead) = match process {
        Process::Frozen(_) => (None, false),
        Process::Ffwor(f) => (f.max_events, !f.horizon.is_finite()),
        Process::Ffwr(f) => (f.max_events, false),
    };
    let mut truncated = false;
    let ev = |kind, time, v: u32, cluster: Option<u32>, volume: usize, members: Vec<u32>| Event {
        kind,
        time,
        site: v,
        coord: dense.site(v),
        cluster,
        volume: volume as u32,
        members,
    };
    while let Some(a) = src.next() {
        if until_dead && states.iter().all(|&s| s == SiteState::Dead) {
            break;
        }
        if max_events.is_some_and(|m| log.len() as u64 >= m) {
            truncated = true;
            break;
        }
        let (t, v) = (a.time, a.site);
        let vi = v as usize;
        match (process, a.kind) {
            (Process::Frozen(p), ArrivalKind::Birth) => {
                let dead_nbr = dense.neighbors(v).iter().any(|&j| j != NONE && states[j as usize] == SiteState::Dead);
                if p.rule == FrozenRule::Original && dead_nbr {
                    log.push(ev(EventKind::Blocked, t, v, None, 0, Vec::new()));
                    continue;
                }
                states[vi] = SiteState::Occupied;
                let c = flood_cluster(dense, &states, v);
                let big = c.len() >= p.threshold as usize;
                if p.rule == FrozenRule::Original || !big {
                    log.push(ev(EventKind::Birth, t, v, Some(c[0]), c.len(), Vec::new()));
                }
                if big {
                    for &m in &c {
                        states[m as usize] = SiteState::Dead;
                    }
                    log.push(ev(EventKind::Freeze, t, v, Some(c[0]), c.len(), c));
                }
            }
            (Process::Ffwor(_) | Process::Ffwr(_), ArrivalKind::Birth) => {
                if states[vi] == SiteState::Vacant {
                    states[vi] = SiteState::Occupied;
                    let c = flood_cluster(dense, &states, v);
                    let kind = if ever_born[vi] { EventKind::RecoverBirth } else { EventKind::Birth };
                    ever_born[vi] = true;
                    log.push(ev(kind, t, v, Some(c[0]), c.len(), Vec::new()));
                }
            }
            (_, ArrivalKind::Ignite) => {
                if states[vi] != SiteState::Occupied {
                    log.push(ev(EventKind::Ignite, t, v, None, 0, Vec::new()));
                    continue;
                }
                let c = flood_cluster(dense, &states, v);
                let after = if matches!(process, Process::Ffwr(_)) { SiteState::Vacant } else { SiteState::Dead };
                for &m in &c {
                    states[m as usize] = after;
                }
                log.push(ev(EventKind::Ignite, t, v, Some(c[0]), c.len(), Vec::new()));
                log.push(ev(EventKind::Burn, t, v, Some(c[0]), c.len(), c));
            }
        }
    }
    Ok(RunOutput { final_state: Configuration::new(dense.clone(), states)?, log: EventLog { events: log }, truncated })
}
