//! Integer geometry of the triangular lattice.
//!
//! A site `(x, y)` is the complex number `x + y·e^{iπ/3}`, i.e. the point
//! `(x + y/2, y·√3/2)`. Ball membership is decided with integer arithmetic only:
//! `|Re| ≤ n ⇔ |2x+y| ≤ 2n` and `|Im| ≤ n ⇔ 3y² ≤ 4n²`.

use crate::error::{LabError, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

/// `c_𝕋 = 2/√3`, sites per unit area; the constant used by the Ψ maps.
/// (`B_n` is a square of side `2n`, so `|B_n| ~ 4 c_𝕋 n²`.)
pub const C_T: f64 = 1.154_700_538_379_251_5;

/// Neighbor offsets, in the fixed order used everywhere (neighbor tables, BFS).
pub const NEIGHBOR_OFFSETS: [(i32, i32); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];

/// Sentinel for "no site" in dense tables.
pub const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SiteCoord {
    pub x: i32,
    pub y: i32,
}

impl SiteCoord {
    pub const ORIGIN: SiteCoord = SiteCoord { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        SiteCoord { x, y }
    }

    pub fn neighbors(self) -> [SiteCoord; 6] {
        NEIGHBOR_OFFSETS.map(|(dx, dy)| SiteCoord::new(self.x + dx, self.y + dy))
    }

    pub fn is_adjacent(self, other: SiteCoord) -> bool {
        let (dx, dy) = (other.x - self.x, other.y - self.y);
        NEIGHBOR_OFFSETS.contains(&(dx, dy))
    }

    pub fn offset(self, dx: i32, dy: i32) -> Self {
        SiteCoord::new(self.x + dx, self.y + dy)
    }

    /// Twice the real part, exact.
    #[inline]
    pub fn re2(self) -> i64 {
        2 * self.x as i64 + self.y as i64
    }

    pub fn re(self) -> f64 {
        self.x as f64 + self.y as f64 / 2.0
    }

    pub fn im(self) -> f64 {
        self.y as f64 * 3f64.sqrt() / 2.0
    }

    /// Smallest `n` with `self ∈ B_n` (L∞ radius of the embedded point).
    pub fn radius(self) -> u32 {
        let a = self.re2().unsigned_abs();
        let n1 = a.div_ceil(2);
        let t = 3 * (self.y as i64 * self.y as i64) as u64;
        let s = ceil_sqrt(t);
        let n2 = s.div_ceil(2);
        n1.max(n2) as u32
    }

    pub fn radius_from(self, center: SiteCoord) -> u32 {
        SiteCoord::new(self.x - center.x, self.y - center.y).radius()
    }

    pub fn in_ball(self, n: u32, center: SiteCoord) -> bool {
        let d = SiteCoord::new(self.x - center.x, self.y - center.y);
        let n = n as i64;
        d.re2().abs() <= 2 * n && 3 * (d.y as i64) * (d.y as i64) <= 4 * n * n
    }
}

/// Canonical order: by `y`, then by `x` (row-major, rows bottom to top).
impl Ord for SiteCoord {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for SiteCoord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn ceil_sqrt(t: u64) -> u64 {
    let mut s = (t as f64).sqrt() as u64;
    while s * s > t {
        s -= 1;
    }
    while s * s < t {
        s += 1;
    }
    s
}

/// Largest `d ≥ 0` with `3d² ≤ 4n²`.
fn ball_half_height(n: u32) -> i64 {
    let n = n as i64;
    let mut d = (2.0 * n as f64 / 3f64.sqrt()) as i64 + 1;
    while 3 * d * d > 4 * n * n {
        d -= 1;
    }
    d
}

#[inline]
fn floor_half(a: i64) -> i64 {
    a.div_euclid(2)
}

#[inline]
fn ceil_half(a: i64) -> i64 {
    -(-a).div_euclid(2)
}

/// Inclusive `dx` range of row `dy` of the ball of radius `n`, if non-empty.
fn ball_row(n: u32, dy: i64) -> Option<(i64, i64)> {
    let n = n as i64;
    if 3 * dy * dy > 4 * n * n {
        return None;
    }
    Some((ceil_half(-2 * n - dy), floor_half(2 * n - dy)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ball {
    pub radius: u32,
    pub center: SiteCoord,
}

impl Ball {
    pub fn new(radius: u32) -> Self {
        Ball { radius, center: SiteCoord::ORIGIN }
    }

    pub fn contains(&self, v: SiteCoord) -> bool {
        v.in_ball(self.radius, self.center)
    }
}

/// `B_outer(center) \ B_inner(center)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Annulus {
    pub inner: u32,
    pub outer: u32,
    pub center: SiteCoord,
}

impl Annulus {
    pub fn new(inner: u32, outer: u32) -> Result<Self> {
        let a = Annulus { inner, outer, center: SiteCoord::ORIGIN };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if self.inner >= self.outer {
            return Err(LabError::MalformedRegion(format!(
                "annulus needs inner < outer, got {} >= {}",
                self.inner, self.outer
            )));
        }
        Ok(())
    }

    pub fn contains(&self, v: SiteCoord) -> bool {
        v.in_ball(self.outer, self.center) && !v.in_ball(self.inner, self.center)
    }

    /// `v ∈ ∂out B_inner`: outside the inner ball, adjacent to it.
    pub fn touches_inner(&self, v: SiteCoord) -> bool {
        !v.in_ball(self.inner, self.center)
            && v.neighbors().iter().any(|w| w.in_ball(self.inner, self.center))
    }

    /// `v ∈ ∂in B_outer`: inside the outer ball, adjacent to its complement.
    pub fn touches_outer(&self, v: SiteCoord) -> bool {
        v.in_ball(self.outer, self.center)
            && v.neighbors().iter().any(|w| !w.in_ball(self.outer, self.center))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    Ball(Ball),
    Annulus(Annulus),
    /// `{0 ≤ x < k, 0 ≤ y < k}` in lattice coordinates.
    Lozenge(u32),
    Explicit(BTreeSet<SiteCoord>),
}

impl Region {
    pub fn ball(n: u32) -> Self {
        Region::Ball(Ball::new(n))
    }

    pub fn annulus(inner: u32, outer: u32) -> Result<Self> {
        Ok(Region::Annulus(Annulus::new(inner, outer)?))
    }

    pub fn lozenge(k: u32) -> Self {
        Region::Lozenge(k)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Region::Annulus(a) => a.validate(),
            _ => Ok(()),
        }
    }

    pub fn contains(&self, v: SiteCoord) -> Result<bool> {
        self.validate()?;
        Ok(self.contains_unchecked(v))
    }

    pub(crate) fn contains_unchecked(&self, v: SiteCoord) -> bool {
        match self {
            Region::Ball(b) => b.contains(v),
            Region::Annulus(a) => a.contains(v),
            Region::Lozenge(k) => {
                let k = *k as i32;
                (0..k).contains(&v.x) && (0..k).contains(&v.y)
            }
            Region::Explicit(s) => s.contains(&v),
        }
    }

    /// Rows of the region as `(y, [x_lo, x_hi] segments)`, ascending in `y` and `x`.
    pub fn rows(&self) -> Result<Vec<(i32, Vec<(i32, i32)>)>> {
        self.validate()?;
        let mut rows = Vec::new();
        match self {
            Region::Ball(b) => {
                let h = ball_half_height(b.radius);
                for dy in -h..=h {
                    let (lo, hi) = ball_row(b.radius, dy).expect("row within height");
                    let cx = b.center.x as i64;
                    rows.push(((b.center.y as i64 + dy) as i32, vec![((cx + lo) as i32, (cx + hi) as i32)]));
                }
            }
            Region::Annulus(a) => {
                let h = ball_half_height(a.outer);
                let cx = a.center.x as i64;
                for dy in -h..=h {
                    let (lo, hi) = ball_row(a.outer, dy).expect("row within height");
                    let segs = match ball_row(a.inner, dy) {
                        None => vec![(lo, hi)],
                        Some((ilo, ihi)) => {
                            let mut s = Vec::new();
                            if lo < ilo {
                                s.push((lo, ilo - 1));
                            }
                            if ihi < hi {
                                s.push((ihi + 1, hi));
                            }
                            s
                        }
                    };
                    let segs = segs.into_iter().map(|(l, h)| ((cx + l) as i32, (cx + h) as i32)).collect();
                    rows.push(((a.center.y as i64 + dy) as i32, segs));
                }
            }
            Region::Lozenge(k) => {
                let k = *k as i32;
                for y in 0..k {
                    rows.push((y, vec![(0, k - 1)]));
                }
            }
            Region::Explicit(set) => {
                let mut cur: Option<(i32, Vec<(i32, i32)>)> = None;
                for v in set {
                    match &mut cur {
                        Some((y, segs)) if *y == v.y => {
                            let last = segs.last_mut().expect("non-empty row");
                            if last.1 + 1 == v.x {
                                last.1 = v.x;
                            } else {
                                segs.push((v.x, v.x));
                            }
                        }
                        _ => {
                            if let Some(r) = cur.take() {
                                rows.push(r);
                            }
                            cur = Some((v.y, vec![(v.x, v.x)]));
                        }
                    }
                }
                if let Some(r) = cur {
                    rows.push(r);
                }
            }
        }
        Ok(rows)
    }

    /// All sites in canonical order.
    pub fn sites(&self) -> Result<Vec<SiteCoord>> {
        let mut out = Vec::new();
        for (y, segs) in self.rows()? {
            for (lo, hi) in segs {
                out.extend((lo..=hi).map(|x| SiteCoord::new(x, y)));
            }
        }
        Ok(out)
    }

    pub fn boundary(&self, which: BoundaryKind) -> Result<Boundary> {
        let set: BTreeSet<SiteCoord> = self.sites()?.into_iter().collect();
        Ok(boundary(&set, which))
    }
}

/// Number of sites of `B_n`.
pub fn ball_size(n: u32) -> u64 {
    let h = ball_half_height(n);
    (-h..=h)
        .map(|dy| {
            let (lo, hi) = ball_row(n, dy).expect("row within height");
            (hi - lo + 1) as u64
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Outer,
    Inner,
    OuterExternal,
    InnerExternal,
    EdgeExternal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Boundary {
    Sites(Vec<SiteCoord>),
    Edges(Vec<(SiteCoord, SiteCoord)>),
}

impl Boundary {
    pub fn sites(&self) -> &[SiteCoord] {
        match self {
            Boundary::Sites(s) => s,
            Boundary::Edges(_) => &[],
        }
    }

    pub fn edges(&self) -> &[(SiteCoord, SiteCoord)] {
        match self {
            Boundary::Edges(e) => e,
            Boundary::Sites(_) => &[],
        }
    }
}

/// Sites of `V \ A` in the infinite component of the complement, restricted to the
/// bounding box of `A` padded by two layers.
pub fn exterior_component(set: &BTreeSet<SiteCoord>) -> HashSet<SiteCoord> {
    let mut reached = HashSet::new();
    if set.is_empty() {
        return reached;
    }
    let xmin = set.iter().map(|v| v.x).min().unwrap() - 2;
    let xmax = set.iter().map(|v| v.x).max().unwrap() + 2;
    let ymin = set.iter().map(|v| v.y).min().unwrap() - 2;
    let ymax = set.iter().map(|v| v.y).max().unwrap() + 2;
    let inside = |v: SiteCoord| v.x >= xmin && v.x <= xmax && v.y >= ymin && v.y <= ymax;
    let mut queue = VecDeque::new();
    for x in xmin..=xmax {
        for y in [ymin, ymax] {
            let v = SiteCoord::new(x, y);
            if reached.insert(v) {
                queue.push_back(v);
            }
        }
    }
    for y in ymin..=ymax {
        for x in [xmin, xmax] {
            let v = SiteCoord::new(x, y);
            if reached.insert(v) {
                queue.push_back(v);
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        for w in v.neighbors() {
            if inside(w) && !set.contains(&w) && reached.insert(w) {
                queue.push_back(w);
            }
        }
    }
    reached
}

/// The five boundary operators on a finite site set.
pub fn boundary(set: &BTreeSet<SiteCoord>, which: BoundaryKind) -> Boundary {
    match which {
        BoundaryKind::Outer => {
            let out: BTreeSet<SiteCoord> = set
                .iter()
                .flat_map(|v| v.neighbors())
                .filter(|w| !set.contains(w))
                .collect();
            Boundary::Sites(out.into_iter().collect())
        }
        BoundaryKind::Inner => Boundary::Sites(
            set.iter()
                .copied()
                .filter(|v| v.neighbors().iter().any(|w| !set.contains(w)))
                .collect(),
        ),
        BoundaryKind::OuterExternal => {
            let ext = exterior_component(set);
            let out: BTreeSet<SiteCoord> = set
                .iter()
                .flat_map(|v| v.neighbors())
                .filter(|w| ext.contains(w))
                .collect();
            Boundary::Sites(out.into_iter().collect())
        }
        BoundaryKind::InnerExternal => {
            let ext = exterior_component(set);
            Boundary::Sites(
                set.iter()
                    .copied()
                    .filter(|v| v.neighbors().iter().any(|w| ext.contains(w)))
                    .collect(),
            )
        }
        BoundaryKind::EdgeExternal => {
            let ext = exterior_component(set);
            let mut edges = Vec::new();
            for &v in set {
                for w in v.neighbors() {
                    if ext.contains(&w) {
                        edges.push((v, w));
                    }
                }
            }
            Boundary::Edges(edges)
        }
    }
}

/// A region materialized to dense indices `0..K` in canonical order, with a
/// neighbor table (`NONE` for neighbors outside the region).
#[derive(Clone, Debug)]
pub struct DenseRegion {
    region: Region,
    sites: Vec<SiteCoord>,
    xmin: i32,
    ymin: i32,
    width: usize,
    height: usize,
    grid: Vec<u32>,
    nbrs: Vec<[u32; 6]>,
}

impl DenseRegion {
    pub fn new(region: Region) -> Result<Self> {
        let sites = region.sites()?;
        if sites.len() >= NONE as usize {
            return Err(LabError::MalformedRegion("region too large".into()));
        }
        let (xmin, xmax, ymin, ymax) = if sites.is_empty() {
            (0, -1, 0, -1)
        } else {
            (
                sites.iter().map(|v| v.x).min().unwrap(),
                sites.iter().map(|v| v.x).max().unwrap(),
                sites[0].y,
                sites[sites.len() - 1].y,
            )
        };
        let width = (xmax - xmin + 1) as usize;
        let height = (ymax - ymin + 1) as usize;
        let mut grid = vec![NONE; width * height];
        for (i, v) in sites.iter().enumerate() {
            grid[(v.y - ymin) as usize * width + (v.x - xmin) as usize] = i as u32;
        }
        let mut d = DenseRegion { region, sites, xmin, ymin, width, height, grid, nbrs: Vec::new() };
        d.nbrs = d
            .sites
            .iter()
            .map(|v| v.neighbors().map(|w| d.index_of(w).unwrap_or(NONE)))
            .collect();
        Ok(d)
    }

    pub fn shared(region: Region) -> Result<Arc<Self>> {
        Ok(Arc::new(Self::new(region)?))
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[SiteCoord] {
        &self.sites
    }

    #[inline]
    pub fn site(&self, i: u32) -> SiteCoord {
        self.sites[i as usize]
    }

    #[inline]
    pub fn index_of(&self, v: SiteCoord) -> Option<u32> {
        let dx = v.x.checked_sub(self.xmin)?;
        let dy = v.y.checked_sub(self.ymin)?;
        if dx < 0 || dy < 0 || dx as usize >= self.width || dy as usize >= self.height {
            return None;
        }
        let i = self.grid[dy as usize * self.width + dx as usize];
        (i != NONE).then_some(i)
    }

    #[inline]
    pub fn neighbors(&self, i: u32) -> &[u32; 6] {
        &self.nbrs[i as usize]
    }

    /// Whether site `i` lies in `∂in` of the region.
    #[inline]
    pub fn on_border(&self, i: u32) -> bool {
        self.nbrs[i as usize].contains(&NONE)
    }
}
