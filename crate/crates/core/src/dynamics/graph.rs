//! Frozen percolation on an arbitrary small graph with an explicit birth order,
//! and the exact final-state law obtained by enumerating every order.

use super::{FrozenParams, FrozenRule};
use crate::error::{LabError, Result};
use crate::lattice::{DenseRegion, NONE};
use crate::percolation::SiteState;
use crate::union_find::UnionFind;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
}

impl Graph {
    /// From an undirected edge list on vertices `0..n`.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a == b || a as usize >= n || b as usize >= n {
                return Err(LabError::InvalidParameter(format!("bad edge ({a},{b}) for {n} vertices")));
            }
            if !adj[a as usize].contains(&b) {
                adj[a as usize].push(b);
                adj[b as usize].push(a);
            }
        }
        Ok(Graph { adj })
    }

    /// Path `0 – 1 – … – (n−1)`.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n as u32).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).expect("path edges are valid")
    }

    /// The adjacency graph of a lattice region, vertices in dense order.
    pub fn from_region(dense: &DenseRegion) -> Self {
        let adj = (0..dense.len() as u32)
            .map(|i| dense.neighbors(i).iter().copied().filter(|&j| j != NONE).collect())
            .collect();
        Graph { adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }
}

/// Final configuration and the frozen clusters (each sorted; listed by smallest vertex).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphOutcome {
    pub states: Vec<SiteState>,
    pub frozen: Vec<Vec<u32>>,
}

/// Run frozen percolation with births in `order` (each vertex at most once).
pub fn frozen_on_graph(graph: &Graph, params: &FrozenParams, order: &[u32]) -> Result<GraphOutcome> {
    if params.threshold < 1 {
        return Err(LabError::InvalidParameter("threshold must be >= 1".into()));
    }
    let n = graph.len();
    let mut seen = vec![false; n];
    for &v in order {
        if v as usize >= n || std::mem::replace(&mut seen[v as usize], true) {
            return Err(LabError::InvalidParameter(format!("bad birth order entry {v}")));
        }
    }
    let big = params.threshold as usize;
    let mut states = vec![SiteState::Vacant; n];
    let mut uf = UnionFind::new(n);
    let mut frozen = Vec::new();
    let members = |uf: &mut UnionFind, root: u32, states: &[SiteState]| -> Vec<u32> {
        (0..n as u32).filter(|&u| states[u as usize] != SiteState::Vacant && uf.find(u) == root).collect()
    };
    for &v in order {
        let nb = graph.neighbors(v);
        match params.rule {
            FrozenRule::Original => {
                if nb.iter().any(|&u| states[u as usize] == SiteState::Dead) {
                    continue;
                }
                states[v as usize] = SiteState::Occupied;
                for &u in nb {
                    if states[u as usize] == SiteState::Occupied {
                        uf.union(u, v);
                    }
                }
                let root = uf.find(v);
                if uf.size_of_root(root) as usize >= big {
                    let c = members(&mut uf, root, &states);
                    for &u in &c {
                        states[u as usize] = SiteState::Dead;
                    }
                    frozen.push(c);
                }
            }
            FrozenRule::Modified => {
                let mut roots: Vec<u32> = nb
                    .iter()
                    .filter(|&&u| states[u as usize] == SiteState::Occupied)
                    .map(|&u| uf.find(u))
                    .collect();
                roots.sort_unstable();
                roots.dedup();
                let total = 1 + roots.iter().map(|&r| uf.size_of_root(r) as usize).sum::<usize>();
                states[v as usize] = SiteState::Occupied;
                for &r in &roots {
                    uf.union(r, v);
                }
                if total >= big {
                    let root = uf.find(v);
                    let c = members(&mut uf, root, &states);
                    for &u in &c {
                        states[u as usize] = SiteState::Dead;
                    }
                    frozen.push(c);
                }
            }
        }
    }
    frozen.sort();
    Ok(GraphOutcome { states, frozen })
}

/// Exact law of the final outcome under a uniformly random birth order: counts
/// over all `n!` orders (so `n ≤ 10`).
pub fn frozen_law(graph: &Graph, params: &FrozenParams) -> Result<BTreeMap<GraphOutcome, u64>> {
    let n = graph.len();
    if n > 10 {
        return Err(LabError::InvalidParameter(format!("{n}! orders is too many to enumerate")));
    }
    let mut law = BTreeMap::new();
    let mut order: Vec<u32> = (0..n as u32).collect();
    // Heap's algorithm.
    let mut c = vec![0usize; n];
    *law.entry(frozen_on_graph(graph, params, &order)?).or_insert(0) += 1;
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            *law.entry(frozen_on_graph(graph, params, &order)?).or_insert(0) += 1;
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(law)
}
