//! Static configuration analysis: sampling, cluster labeling, crossings, circuits,
//! arm events, largest clusters and disjoint-circuit counting.

pub mod estimate;
pub mod trilat;

use crate::error::{LabError, Result};
use crate::lattice::{Annulus, Ball, DenseRegion, Region, SiteCoord, NONE};
use crate::rng::StreamKey;
use crate::union_find::UnionFind;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(i8)]
pub enum SiteState {
    Vacant = 0,
    Occupied = 1,
    /// Burnt or frozen, depending on the process.
    Dead = -1,
}

impl SiteState {
    pub fn as_char(self) -> char {
        match self {
            SiteState::Vacant => '.',
            SiteState::Occupied => 'o',
            SiteState::Dead => 'x',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '.' => Some(SiteState::Vacant),
            'o' => Some(SiteState::Occupied),
            'x' => Some(SiteState::Dead),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Occupied,
    Vacant,
}

impl Color {
    #[inline]
    pub fn matches(self, s: SiteState) -> bool {
        match self {
            Color::Occupied => s == SiteState::Occupied,
            Color::Vacant => s == SiteState::Vacant,
        }
    }

    pub fn opposite(self) -> Color {
        match self {
            Color::Occupied => Color::Vacant,
            Color::Vacant => Color::Occupied,
        }
    }
}

/// A nonempty word over `{o, v}` describing the colors of arms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorSequence(Vec<Color>);

impl ColorSequence {
    pub fn new(colors: Vec<Color>) -> Result<Self> {
        if colors.is_empty() {
            return Err(LabError::InvalidParameter("empty color sequence".into()));
        }
        Ok(ColorSequence(colors))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let colors = s
            .chars()
            .map(|c| match c {
                'o' => Ok(Color::Occupied),
                'v' => Ok(Color::Vacant),
                _ => Err(LabError::Parse(format!("bad color '{c}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(colors)
    }

    pub fn colors(&self) -> &[Color] {
        &self.0
    }

    /// Whether the sequence is the alternating four-arm word (up to rotation).
    pub fn is_alternating_four(&self) -> bool {
        self.0.len() == 4 && (0..4).all(|i| self.0[i] != self.0[(i + 1) % 4])
    }
}

/// A region together with a per-site state.
#[derive(Clone, Debug)]
pub struct Configuration {
    dense: Arc<DenseRegion>,
    states: Vec<SiteState>,
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        self.dense.region() == other.dense.region() && self.states == other.states
    }
}

impl Configuration {
    pub fn new(dense: Arc<DenseRegion>, states: Vec<SiteState>) -> Result<Self> {
        if states.len() != dense.len() {
            return Err(LabError::InvalidParameter(format!(
                "{} states for a region of {} sites",
                states.len(),
                dense.len()
            )));
        }
        Ok(Configuration { dense, states })
    }

    pub fn filled(dense: Arc<DenseRegion>, state: SiteState) -> Self {
        let n = dense.len();
        Configuration { dense, states: vec![state; n] }
    }

    pub fn dense(&self) -> &Arc<DenseRegion> {
        &self.dense
    }

    pub fn region(&self) -> &Region {
        self.dense.region()
    }

    pub fn states(&self) -> &[SiteState] {
        &self.states
    }

    pub fn states_mut(&mut self) -> &mut [SiteState] {
        &mut self.states
    }

    pub fn state(&self, i: u32) -> SiteState {
        self.states[i as usize]
    }

    pub fn state_at(&self, v: SiteCoord) -> Option<SiteState> {
        self.dense.index_of(v).map(|i| self.states[i as usize])
    }

    pub fn set_at(&mut self, v: SiteCoord, s: SiteState) -> Result<()> {
        let i = self
            .dense
            .index_of(v)
            .ok_or_else(|| LabError::OutsideRegion(format!("{v:?}")))?;
        self.states[i as usize] = s;
        Ok(())
    }

    pub fn count(&self, s: SiteState) -> usize {
        self.states.iter().filter(|&&x| x == s).count()
    }
}

/// i.i.d. Bernoulli(p) occupation. Site `v` is occupied iff `key.uniform(v, 0) < p`,
/// so the same key gives coupled configurations for every `p` and every region.
pub fn sample_bernoulli(dense: &Arc<DenseRegion>, p: f64, key: StreamKey) -> Result<Configuration> {
    if !(0.0..=1.0).contains(&p) {
        return Err(LabError::InvalidParameter(format!("p = {p} not in [0,1]")));
    }
    let states = dense
        .sites()
        .iter()
        .map(|&v| if bernoulli_occupied(key, v, p) { SiteState::Occupied } else { SiteState::Vacant })
        .collect();
    Ok(Configuration { dense: dense.clone(), states })
}

#[inline]
pub fn bernoulli_occupied(key: StreamKey, v: SiteCoord, p: f64) -> bool {
    key.uniform(v, 0) < p
}

/// Cluster labeling for one color. Cluster ids are canonical: the smallest dense
/// index among the cluster's members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    pub color: Color,
    cluster: Vec<u32>,
    sizes: Vec<u32>,
}

impl Labeling {
    pub fn cluster_of(&self, i: u32) -> Option<u32> {
        let c = self.cluster[i as usize];
        (c != NONE).then_some(c)
    }

    pub fn size(&self, id: u32) -> u32 {
        self.sizes[id as usize]
    }

    /// `(id, size)` for every cluster, by increasing id.
    pub fn clusters(&self) -> Vec<(u32, u32)> {
        self.sizes
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 0)
            .map(|(i, &s)| (i as u32, s))
            .collect()
    }

    pub fn cluster_count(&self) -> usize {
        self.sizes.iter().filter(|&&s| s > 0).count()
    }

    pub fn members(&self, id: u32) -> Vec<u32> {
        (0..self.cluster.len() as u32).filter(|&i| self.cluster[i as usize] == id).collect()
    }

    /// Largest cluster; ties go to the smallest id.
    pub fn largest(&self) -> Option<(u32, u32)> {
        let mut best: Option<(u32, u32)> = None;
        for (i, &s) in self.sizes.iter().enumerate() {
            if s > 0 && best.is_none_or(|(_, b)| s > b) {
                best = Some((i as u32, s));
            }
        }
        best
    }
}

pub fn label_clusters(config: &Configuration, color: Color) -> Labeling {
    let dense = &config.dense;
    let n = dense.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n as u32 {
        if !color.matches(config.states[i as usize]) {
            continue;
        }
        for &j in dense.neighbors(i) {
            if j != NONE && j < i && color.matches(config.states[j as usize]) {
                uf.union(i, j);
            }
        }
    }
    let mut cluster = vec![NONE; n];
    let mut sizes = vec![0u32; n];
    for i in 0..n as u32 {
        if color.matches(config.states[i as usize]) {
            let r = uf.find(i);
            let id = uf.min_of_root(r);
            cluster[i as usize] = id;
            sizes[id as usize] += 1;
        }
    }
    Labeling { color, cluster, sizes }
}

/// Largest occupied cluster `(id, volume)`, `None` for a configuration without
/// occupied sites.
pub fn largest_cluster(config: &Configuration) -> Option<(u32, u32)> {
    label_clusters(config, Color::Occupied).largest()
}

/// BFS over sites with `allowed[i]`, from every allowed source; stops as soon as a
/// target is reached. Returns whether a target was reached and the visited mask.
pub(crate) fn bfs_reaches(
    dense: &DenseRegion,
    allowed: &[bool],
    sources: impl IntoIterator<Item = u32>,
    target: impl Fn(u32) -> bool,
) -> (bool, Vec<bool>) {
    let mut seen = vec![false; dense.len()];
    let mut queue = VecDeque::new();
    for s in sources {
        if allowed[s as usize] && !seen[s as usize] {
            if target(s) {
                seen[s as usize] = true;
                return (true, seen);
            }
            seen[s as usize] = true;
            queue.push_back(s);
        }
    }
    while let Some(i) = queue.pop_front() {
        for &j in dense.neighbors(i) {
            if j != NONE && allowed[j as usize] && !seen[j as usize] {
                seen[j as usize] = true;
                if target(j) {
                    return (true, seen);
                }
                queue.push_back(j);
            }
        }
    }
    (false, seen)
}

/// Exact `y·√3/2 ≥ b`.
#[inline]
pub(crate) fn im_ge(y: i64, b: i64) -> bool {
    match (y >= 0, b > 0) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => 3 * y * y >= 4 * b * b,
        (false, false) => 3 * y * y <= 4 * b * b,
    }
}

#[inline]
pub(crate) fn im_le(y: i64, b: i64) -> bool {
    im_ge(-y, -b)
}

/// Axis-aligned rectangle `[x0,x1] × [y0,y1]` in embedded coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddedRect {
    pub x0: i64,
    pub x1: i64,
    pub y0: i64,
    pub y1: i64,
}

impl EmbeddedRect {
    pub fn new(x0: i64, x1: i64, y0: i64, y1: i64) -> Self {
        EmbeddedRect { x0, x1, y0, y1 }
    }

    /// `[0, 2n] × [0, n]`, the rectangle defining the characteristic length.
    pub fn wide(n: u32) -> Self {
        EmbeddedRect::new(0, 2 * n as i64, 0, n as i64)
    }

    /// `[−n, n]²`, whose sites are exactly `B_n`.
    pub fn square(n: u32) -> Self {
        EmbeddedRect::new(-(n as i64), n as i64, -(n as i64), n as i64)
    }

    #[inline]
    pub fn contains(&self, v: SiteCoord) -> bool {
        let r = v.re2();
        let y = v.y as i64;
        2 * self.x0 <= r && r <= 2 * self.x1 && im_ge(y, self.y0) && im_le(y, self.y1)
    }

    pub fn sites(&self) -> Vec<SiteCoord> {
        let lo = ((2 * self.y0) as f64 / 3f64.sqrt()).floor() as i64 - 1;
        let hi = ((2 * self.y1) as f64 / 3f64.sqrt()).ceil() as i64 + 1;
        let mut out = Vec::new();
        for y in lo..=hi {
            if !(im_ge(y, self.y0) && im_le(y, self.y1)) {
                continue;
            }
            let xl = (2 * self.x0 - y).div_euclid(2) + i64::from((2 * self.x0 - y).rem_euclid(2) != 0);
            let xh = (2 * self.x1 - y).div_euclid(2);
            out.extend((xl..=xh).map(|x| SiteCoord::new(x as i32, y as i32)));
        }
        out
    }

    #[inline]
    pub fn near_left(&self, v: SiteCoord) -> bool {
        v.re2() <= 2 * self.x0 + 2
    }

    #[inline]
    pub fn near_right(&self, v: SiteCoord) -> bool {
        v.re2() >= 2 * self.x1 - 2
    }

    #[inline]
    pub fn near_bottom(&self, v: SiteCoord) -> bool {
        im_le(v.y as i64, self.y0 + 1)
    }

    #[inline]
    pub fn near_top(&self, v: SiteCoord) -> bool {
        im_ge(v.y as i64, self.y1 - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Horizontal,
    Vertical,
}

/// Domain of a crossing event: an embedded rectangle, or the `k×k` lozenge with its
/// lattice sides (left/right `x = 0, k−1`; bottom/top `y = 0, k−1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossingDomain {
    Rect(EmbeddedRect),
    Lozenge(u32),
}

impl CrossingDomain {
    pub fn sites(&self) -> Vec<SiteCoord> {
        match self {
            CrossingDomain::Rect(r) => r.sites(),
            CrossingDomain::Lozenge(k) => Region::lozenge(*k).sites().expect("lozenge is well-formed"),
        }
    }

    #[inline]
    pub fn is_start(&self, v: SiteCoord, dir: Direction) -> bool {
        match (self, dir) {
            (CrossingDomain::Rect(r), Direction::Horizontal) => r.near_left(v),
            (CrossingDomain::Rect(r), Direction::Vertical) => r.near_bottom(v),
            (CrossingDomain::Lozenge(_), Direction::Horizontal) => v.x == 0,
            (CrossingDomain::Lozenge(_), Direction::Vertical) => v.y == 0,
        }
    }

    #[inline]
    pub fn is_end(&self, v: SiteCoord, dir: Direction) -> bool {
        match (self, dir) {
            (CrossingDomain::Rect(r), Direction::Horizontal) => r.near_right(v),
            (CrossingDomain::Rect(r), Direction::Vertical) => r.near_top(v),
            (CrossingDomain::Lozenge(k), Direction::Horizontal) => v.x == *k as i32 - 1,
            (CrossingDomain::Lozenge(k), Direction::Vertical) => v.y == *k as i32 - 1,
        }
    }
}

fn domain_indices(dense: &DenseRegion, sites: &[SiteCoord], what: &str) -> Result<Vec<u32>> {
    sites
        .iter()
        .map(|&v| {
            dense
                .index_of(v)
                .ok_or_else(|| LabError::OutsideRegion(format!("{what} site {v:?} outside region")))
        })
        .collect()
}

/// Whether a `color` path inside the domain joins the two sides for `dir`.
pub fn crossing(config: &Configuration, domain: &CrossingDomain, dir: Direction, color: Color) -> Result<bool> {
    let dense = &config.dense;
    let idx = domain_indices(dense, &domain.sites(), "crossing domain")?;
    let mut allowed = vec![false; dense.len()];
    for &i in &idx {
        allowed[i as usize] = color.matches(config.states[i as usize]);
    }
    let sources = idx.iter().copied().filter(|&i| domain.is_start(dense.site(i), dir));
    Ok(bfs_reaches(dense, &allowed, sources, |i| domain.is_end(dense.site(i), dir)).0)
}

fn annulus_indices(dense: &DenseRegion, a: &Annulus) -> Result<Vec<u32>> {
    let sites = Region::Annulus(*a).sites()?;
    domain_indices(dense, &sites, "annulus")
}

/// Whether a path through `member` sites of the annulus joins `∂out B_{n1}` to
/// `∂in B_{n2}`.
fn crosses_annulus(dense: &DenseRegion, a: &Annulus, idx: &[u32], member: impl Fn(u32) -> bool) -> bool {
    let mut allowed = vec![false; dense.len()];
    for &i in idx {
        allowed[i as usize] = member(i);
    }
    let sources = idx.iter().copied().filter(|&i| a.touches_inner(dense.site(i)));
    bfs_reaches(dense, &allowed, sources, |i| a.touches_outer(dense.site(i))).0
}

/// Whether a `color` circuit in the annulus surrounds its center: equivalently, no
/// path of the other states joins the two boundaries of the annulus.
pub fn has_circuit(config: &Configuration, annulus: &Annulus, color: Color) -> Result<bool> {
    annulus.validate()?;
    let idx = annulus_indices(&config.dense, annulus)?;
    Ok(!crosses_annulus(&config.dense, annulus, &idx, |i| !color.matches(config.states[i as usize])))
}

/// Whether a `color` path joins `∂out B_{n1}` and `∂in B_{n2}`.
pub fn mono_arm(config: &Configuration, annulus: &Annulus, color: Color) -> Result<bool> {
    annulus.validate()?;
    let idx = annulus_indices(&config.dense, annulus)?;
    Ok(crosses_annulus(&config.dense, annulus, &idx, |i| color.matches(config.states[i as usize])))
}

/// Whether the center of `B_n` is pivotal for the occupied left-right crossing of
/// `B_n`, i.e. flipping it changes the crossing outcome.
pub fn pivotal_four_arm(config: &Configuration, n: u32) -> Result<bool> {
    if n == 0 {
        return Err(LabError::InvalidParameter("pivotality needs n >= 1".into()));
    }
    let dense = &config.dense;
    let rect = EmbeddedRect::square(n);
    let idx = domain_indices(dense, &rect.sites(), "ball")?;
    let center = dense
        .index_of(SiteCoord::ORIGIN)
        .ok_or_else(|| LabError::OutsideRegion("center".into()))?;
    let mut allowed = vec![false; dense.len()];
    for &i in &idx {
        allowed[i as usize] = config.states[i as usize] == SiteState::Occupied;
    }
    allowed[center as usize] = false;
    let left = idx.iter().copied().filter(|&i| rect.near_left(dense.site(i)));
    let (crossed, lset) = bfs_reaches(dense, &allowed, left, |i| rect.near_right(dense.site(i)));
    if crossed {
        return Ok(false);
    }
    let right = idx.iter().copied().filter(|&i| rect.near_right(dense.site(i)));
    let (_, rset) = bfs_reaches(dense, &allowed, right, |_| false);
    let c = SiteCoord::ORIGIN;
    let nb = dense.neighbors(center);
    let to_left = rect.near_left(c) || nb.iter().any(|&j| j != NONE && lset[j as usize]);
    let to_right = rect.near_right(c) || nb.iter().any(|&j| j != NONE && rset[j as usize]);
    Ok(to_left && to_right)
}

/// Whether the largest occupied cluster contains both a circuit and a radial
/// crossing of the annulus.
pub fn circuit_and_arm_in_cluster(config: &Configuration, annulus: &Annulus) -> Result<bool> {
    annulus.validate()?;
    let idx = annulus_indices(&config.dense, annulus)?;
    let lab = label_clusters(config, Color::Occupied);
    let Some((id, _)) = lab.largest() else {
        return Ok(false);
    };
    let member = |i: u32| lab.cluster[i as usize] == id;
    let circuit = !crosses_annulus(&config.dense, annulus, &idx, |i| !member(i));
    Ok(circuit && crosses_annulus(&config.dense, annulus, &idx, member))
}

/// Reusable checker for "does this site set surround the origin" in a fixed
/// region. Scratch buffers are stamped, so repeated checks cost O(explored).
#[derive(Clone, Debug)]
pub struct SurroundChecker {
    dense: Arc<DenseRegion>,
    origin: u32,
    ball: Option<Ball>,
    pos_ray: Vec<u32>,
    neg_ray: Vec<u32>,
    member: Vec<u32>,
    seen: Vec<u32>,
    stamp: u32,
    queue: Vec<u32>,
}

impl SurroundChecker {
    pub fn new(dense: Arc<DenseRegion>) -> Result<Self> {
        let origin = dense
            .index_of(SiteCoord::ORIGIN)
            .ok_or_else(|| LabError::OutsideRegion("origin not in region".into()))?;
        let ray = |dx: i32| {
            let mut out = vec![];
            let mut v = SiteCoord::ORIGIN;
            while let Some(i) = dense.index_of(v) {
                out.push(i);
                v = v.offset(dx, 0);
            }
            out
        };
        let (pos_ray, neg_ray) = (ray(1), ray(-1));
        let ball = match dense.region() {
            Region::Ball(b) => Some(*b),
            _ => None,
        };
        let n = dense.len();
        Ok(SurroundChecker {
            dense,
            origin,
            ball,
            pos_ray,
            neg_ray,
            member: vec![0; n],
            seen: vec![0; n],
            stamp: 0,
            queue: Vec::new(),
        })
    }

    pub fn origin(&self) -> u32 {
        self.origin
    }

    fn next_stamp(&mut self) -> u32 {
        if self.stamp == u32::MAX {
            self.member.fill(0);
            self.seen.fill(0);
            self.stamp = 0;
        }
        self.stamp += 1;
        self.stamp
    }

    /// True iff the origin is a member, or every path in the region from the
    /// origin to `∂in(region)` meets the set.
    pub fn surrounds(&mut self, members: &[u32]) -> bool {
        let s = self.next_stamp();
        for &m in members {
            self.member[m as usize] = s;
        }
        if self.member[self.origin as usize] == s {
            return true;
        }
        // Both real half-lines from 0 are paths to the border.
        if !self.pos_ray.iter().any(|&i| self.member[i as usize] == s)
            || !self.neg_ray.iter().any(|&i| self.member[i as usize] == s)
        {
            return false;
        }
        // In a ball, a site outside the set's embedded bounding box can walk
        // monotonically to the border without meeting the set.
        let bbox = self.ball.map(|_| {
            let mut b = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
            for &m in members {
                let v = self.dense.site(m);
                b.0 = b.0.min(v.re2());
                b.1 = b.1.max(v.re2());
                b.2 = b.2.min(v.y as i64);
                b.3 = b.3.max(v.y as i64);
            }
            b
        });
        self.queue.clear();
        self.queue.push(self.origin);
        self.seen[self.origin as usize] = s;
        while let Some(i) = self.queue.pop() {
            if self.dense.on_border(i) {
                return false;
            }
            if let Some(b) = bbox {
                let v = self.dense.site(i);
                let (r, y) = (v.re2(), v.y as i64);
                if r < b.0 || r > b.1 || y < b.2 || y > b.3 {
                    return false;
                }
            }
            for &j in self.dense.neighbors(i) {
                if j != NONE && self.member[j as usize] != s && self.seen[j as usize] != s {
                    self.seen[j as usize] = s;
                    self.queue.push(j);
                }
            }
        }
        true
    }
}

/// Convenience form of [`SurroundChecker::surrounds`] for a coordinate set.
pub fn surrounds_origin(cluster: &BTreeSet<SiteCoord>, region: &Region) -> Result<bool> {
    let dense = DenseRegion::shared(region.clone())?;
    let idx: Vec<u32> = cluster.iter().filter_map(|&v| dense.index_of(v)).collect();
    Ok(SurroundChecker::new(dense)?.surrounds(&idx))
}

/// Whether the site set contains a circuit around the origin that avoids the
/// origin, on the infinite lattice (exterior of the set is free).
pub fn contains_circuit_around_origin(set: &BTreeSet<SiteCoord>) -> bool {
    let mut blockers = set.clone();
    blockers.remove(&SiteCoord::ORIGIN);
    if blockers.is_empty() {
        return false;
    }
    let ext = crate::lattice::exterior_component(&blockers);
    // Flood from 0 through non-blocker sites; escape iff reaching the exterior.
    let mut seen = BTreeSet::from([SiteCoord::ORIGIN]);
    let mut queue = VecDeque::from([SiteCoord::ORIGIN]);
    while let Some(v) = queue.pop_front() {
        if ext.contains(&v) {
            return false;
        }
        for w in v.neighbors() {
            if !blockers.contains(&w) && seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    true
}

/// Maximum number of vertex-disjoint circuits in `S` surrounding the origin, as
/// the minimum number of `S`-sites on a path from the origin out of the region
/// (0/1-weight BFS).
pub fn max_disjoint_circuits(dense: &DenseRegion, in_s: &[bool]) -> Result<u32> {
    let origin = dense
        .index_of(SiteCoord::ORIGIN)
        .ok_or_else(|| LabError::OutsideRegion("origin not in region".into()))?;
    if in_s[origin as usize] {
        return Err(LabError::InvalidParameter("origin belongs to S".into()));
    }
    let mut dist = vec![u32::MAX; dense.len()];
    let mut deque = VecDeque::new();
    dist[origin as usize] = 0;
    deque.push_back(origin);
    while let Some(i) = deque.pop_front() {
        if dense.on_border(i) {
            return Ok(dist[i as usize]);
        }
        for &j in dense.neighbors(i) {
            if j == NONE {
                continue;
            }
            let w = u32::from(in_s[j as usize]);
            let d = dist[i as usize] + w;
            if d < dist[j as usize] {
                dist[j as usize] = d;
                if w == 0 {
                    deque.push_front(j);
                } else {
                    deque.push_back(j);
                }
            }
        }
    }
    unreachable!("the border is reachable from every site of a finite region")
}

/// Coordinate-set form of [`max_disjoint_circuits`].
pub fn max_disjoint_circuits_in(s: &BTreeSet<SiteCoord>, region: &Region) -> Result<u32> {
    let dense = DenseRegion::new(region.clone())?;
    let mut mask = vec![false; dense.len()];
    for v in s {
        if let Some(i) = dense.index_of(*v) {
            mask[i as usize] = true;
        }
    }
    max_disjoint_circuits(&dense, &mask)
}
