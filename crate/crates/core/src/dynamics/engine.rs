//! Union-find engine. Each birth creates a fresh node keyed by its site, so
//! recovered sites (FFWR) never reuse a node and the structure never needs
//! deletion; a burn or freeze enumerates the cluster through the circular member
//! lists in O(volume).

use super::{
    flood_cluster, ArrivalKind, ArrivalSource, Event, EventKind, EventLog, Fault, FireParams, FrozenParams,
    FrozenRule, Process, RunOptions, RunOutput, Streams,
};
use crate::error::{LabError, Result};
use crate::lattice::{DenseRegion, NONE};
use crate::percolation::{Configuration, SiteState};
use crate::union_find::UnionFind;
use std::sync::Arc;

struct Engine<'a> {
    dense: &'a DenseRegion,
    states: Vec<SiteState>,
    uf: UnionFind,
    node_of: Vec<u32>,
    node_site: Vec<u32>,
    born: Vec<bool>,
    dead: usize,
    log: Vec<Event>,
    merges: u64,
    opts: RunOptions,
}

impl<'a> Engine<'a> {
    fn new(dense: &'a DenseRegion, opts: RunOptions) -> Self {
        let n = dense.len();
        Engine {
            dense,
            states: vec![SiteState::Vacant; n],
            uf: UnionFind::new(0),
            node_of: vec![NONE; n],
            node_site: Vec::with_capacity(n),
            born: vec![false; n],
            dead: 0,
            log: Vec::new(),
            merges: 0,
            opts,
        }
    }

    fn push(&mut self, kind: EventKind, time: f64, site: u32, cluster: Option<u32>, volume: u32, members: Vec<u32>) {
        self.log.push(Event { kind, time, site, coord: self.dense.site(site), cluster, volume, members });
    }

    /// Distinct roots of the occupied neighbors of `v`.
    fn neighbor_roots(&mut self, v: u32) -> ([u32; 6], usize) {
        let mut roots = [NONE; 6];
        let mut k = 0;
        for &j in self.dense.neighbors(v) {
            if j != NONE && self.states[j as usize] == SiteState::Occupied {
                let r = self.uf.find(self.node_of[j as usize]);
                if !roots[..k].contains(&r) {
                    roots[k] = r;
                    k += 1;
                }
            }
        }
        (roots, k)
    }

    /// Occupy `v` and merge it with its occupied neighbors; returns the root.
    fn occupy(&mut self, v: u32) -> u32 {
        let node = self.uf.push_keyed(v);
        self.node_site.push(v);
        self.node_of[v as usize] = node;
        self.states[v as usize] = SiteState::Occupied;
        let (roots, k) = self.neighbor_roots(v);
        for &r in &roots[..k] {
            self.merges += 1;
            if let Some(Fault::SkipMerge { every }) = self.opts.fault {
                if every > 0 && self.merges.is_multiple_of(every) {
                    continue;
                }
            }
            self.uf.union(node, r);
        }
        self.uf.find(node)
    }

    fn members_of_root(&self, root: u32) -> Vec<u32> {
        let mut m: Vec<u32> = self.uf.members(root).into_iter().map(|n| self.node_site[n as usize]).collect();
        m.sort_unstable();
        m
    }

    fn audit(&self, start: u32, members: &[u32]) -> Result<()> {
        if self.opts.audit && flood_cluster(self.dense, &self.states, start) != members {
            return Err(LabError::Invariant(format!(
                "cluster of site {start} disagrees with flood fill at event {}",
                self.log.len()
            )));
        }
        Ok(())
    }

    fn frozen_birth(&mut self, p: &FrozenParams, time: f64, v: u32) -> Result<()> {
        let n = p.threshold;
        match p.rule {
            FrozenRule::Original => {
                let blocked = self
                    .dense
                    .neighbors(v)
                    .iter()
                    .any(|&j| j != NONE && self.states[j as usize] == SiteState::Dead);
                if blocked {
                    self.push(EventKind::Blocked, time, v, None, 0, Vec::new());
                    return Ok(());
                }
                let root = self.occupy(v);
                let vol = self.uf.size_of_root(root);
                let id = self.uf.min_of_root(root);
                self.push(EventKind::Birth, time, v, Some(id), vol, Vec::new());
                if vol >= n {
                    if vol > 3 * n - 2 {
                        return Err(LabError::Invariant(format!("frozen volume {vol} exceeds 3N-2 = {}", 3 * n - 2)));
                    }
                    let members = self.members_of_root(root);
                    self.audit(v, &members)?;
                    for &m in &members {
                        self.states[m as usize] = SiteState::Dead;
                    }
                    self.dead += members.len();
                    self.push(EventKind::Freeze, time, v, Some(id), vol, members);
                }
            }
            FrozenRule::Modified => {
                let (roots, k) = self.neighbor_roots(v);
                let total = 1 + roots[..k].iter().map(|&r| self.uf.size_of_root(r)).sum::<u32>();
                if total >= n {
                    let mut members = vec![v];
                    for &r in &roots[..k] {
                        members.extend(self.uf.members(r).into_iter().map(|x| self.node_site[x as usize]));
                    }
                    members.sort_unstable();
                    if self.opts.audit {
                        self.states[v as usize] = SiteState::Occupied;
                        self.audit(v, &members)?;
                    }
                    for &m in &members {
                        self.states[m as usize] = SiteState::Dead;
                    }
                    self.dead += members.len();
                    let id = members[0];
                    self.push(EventKind::Freeze, time, v, Some(id), total, members);
                } else {
                    let root = self.occupy(v);
                    let (vol, id) = (self.uf.size_of_root(root), self.uf.min_of_root(root));
                    self.push(EventKind::Birth, time, v, Some(id), vol, Vec::new());
                }
            }
        }
        Ok(())
    }

    fn fire_birth(&mut self, time: f64, v: u32) {
        if self.states[v as usize] != SiteState::Vacant {
            return;
        }
        let kind = if self.born[v as usize] { EventKind::RecoverBirth } else { EventKind::Birth };
        self.born[v as usize] = true;
        let root = self.occupy(v);
        let (vol, id) = (self.uf.size_of_root(root), self.uf.min_of_root(root));
        self.push(kind, time, v, Some(id), vol, Vec::new());
    }

    fn ignite(&mut self, time: f64, v: u32, recovery: bool) -> Result<()> {
        if self.states[v as usize] != SiteState::Occupied {
            self.push(EventKind::Ignite, time, v, None, 0, Vec::new());
            return Ok(());
        }
        let root = self.uf.find(self.node_of[v as usize]);
        let vol = self.uf.size_of_root(root);
        let id = self.uf.min_of_root(root);
        let members = self.members_of_root(root);
        self.audit(v, &members)?;
        let after = if recovery { SiteState::Vacant } else { SiteState::Dead };
        for &m in &members {
            self.states[m as usize] = after;
            self.node_of[m as usize] = NONE;
        }
        if !recovery {
            self.dead += members.len();
        }
        self.push(EventKind::Ignite, time, v, Some(id), vol, Vec::new());
        self.push(EventKind::Burn, time, v, Some(id), vol, members);
        Ok(())
    }
}

/// Run any process with the optimized engine.
pub fn run(dense: &Arc<DenseRegion>, process: &Process, streams: &Streams, opts: &RunOptions) -> Result<RunOutput> {
    process.validate()?;
    let mut eng = Engine::new(dense, *opts);
    let mut src = ArrivalSource::new(dense, process, streams);
    let (max_events, until_dead) = match process {
        Process::Frozen(_) => (None, false),
        Process::Ffwor(f) => (f.max_events, !f.horizon.is_finite()),
        Process::Ffwr(f) => (f.max_events, false),
    };
    let mut truncated = false;
    while let Some(a) = src.next() {
        if until_dead && eng.dead == dense.len() {
            break;
        }
        if max_events.is_some_and(|m| eng.log.len() as u64 >= m) {
            truncated = true;
            break;
        }
        match (process, a.kind) {
            (Process::Frozen(p), ArrivalKind::Birth) => eng.frozen_birth(p, a.time, a.site)?,
            (Process::Ffwor(_) | Process::Ffwr(_), ArrivalKind::Birth) => eng.fire_birth(a.time, a.site),
            (Process::Ffwor(_), ArrivalKind::Ignite) => eng.ignite(a.time, a.site, false)?,
            (Process::Ffwr(_), ArrivalKind::Ignite) => eng.ignite(a.time, a.site, true)?,
            (Process::Frozen(_), ArrivalKind::Ignite) => unreachable!("frozen percolation has no ignitions"),
        }
    }
    Ok(RunOutput {
        final_state: Configuration::new(dense.clone(), eng.states)?,
        log: EventLog { events: eng.log },
        truncated,
    })
}

/// N-frozen percolation until every birth has been processed.
pub fn run_frozen(dense: &Arc<DenseRegion>, params: &FrozenParams, streams: &Streams) -> Result<RunOutput> {
    run(dense, &Process::Frozen(*params), streams, &RunOptions::default())
}

/// Forest fire without recovery: burnt sites stay dead.
pub fn run_ffwor(dense: &Arc<DenseRegion>, params: &FireParams, streams: &Streams) -> Result<RunOutput> {
    run(dense, &Process::Ffwor(params.clone()), streams, &RunOptions::default())
}

/// Forest fire with recovery: burnt sites become vacant and may be born again.
pub fn run_ffwr(dense: &Arc<DenseRegion>, params: &FireParams, streams: &Streams) -> Result<RunOutput> {
    run(dense, &Process::Ffwr(params.clone()), streams, &RunOptions::default())
}
