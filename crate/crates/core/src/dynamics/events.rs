use crate::lattice::SiteCoord;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Birth,
    Blocked,
    Freeze,
    Ignite,
    Burn,
    RecoverBirth,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Birth => "birth",
            EventKind::Blocked => "blocked",
            EventKind::Freeze => "freeze",
            EventKind::Ignite => "ignite",
            EventKind::Burn => "burn",
            EventKind::RecoverBirth => "recover_birth",
        }
    }
}

/// One log record. `site` is the site that triggered the event (for Freeze, the
/// birth completing the cluster; for Burn, the ignited site). `cluster` is the
/// canonical id (smallest dense index) of the affected cluster after the event's
/// merge, if any. `members` is filled, sorted, for Freeze and Burn only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub time: f64,
    pub site: u32,
    pub coord: SiteCoord,
    pub cluster: Option<u32>,
    pub volume: u32,
    pub members: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub events: Vec<Event>,
}

pub const CSV_HEADER: &str = "event,time,site_x,site_y,cluster_id,volume";

impl EventLog {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Event> {
        self.events.iter()
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    /// Events with `time ≤ t`.
    pub fn prefix_until(&self, t: f64) -> EventLog {
        EventLog { events: self.events.iter().filter(|e| e.time <= t).cloned().collect() }
    }

    /// `event,time,site_x,site_y,cluster_id,volume`, times in shortest
    /// round-trip form, `-1` for a missing cluster.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(32 * (self.events.len() + 1));
        s.push_str(CSV_HEADER);
        s.push('\n');
        for e in &self.events {
            let id = e.cluster.map_or(-1, i64::from);
            let _ = writeln!(s, "{},{},{},{},{},{}", e.kind.as_str(), e.time, e.coord.x, e.coord.y, id, e.volume);
        }
        s
    }

    pub fn write_csv(&self, w: &mut impl io::Write) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}
