//! Monte Carlo estimators for Bernoulli site percolation.
//!
//! Site `v` of sample `s` is occupied iff `key.child(s).uniform(v, 0) < p`, the
//! same rule as [`super::sample_bernoulli`]; configurations are generated on
//! demand so each sample costs only what its explorations touch. Samples run in
//! parallel and are reduced by integer counting, so results do not depend on
//! the number of threads.

use super::{bernoulli_occupied, EmbeddedRect};
use crate::error::{LabError, Result};
use crate::lattice::{DenseRegion, Region, SiteCoord, NONE};
use crate::rng::StreamKey;
use crate::stats::Proportion;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Stamped visited-marks over a lattice-coordinate box.
struct Scratch {
    xmin: i32,
    ymin: i32,
    w: usize,
    h: usize,
    seen: Vec<u32>,
    stamp: u32,
    stack: Vec<SiteCoord>,
    pending: Vec<SiteCoord>,
}

impl Scratch {
    fn new(xmin: i32, xmax: i32, ymin: i32, ymax: i32) -> Self {
        let w = (xmax - xmin + 1) as usize;
        let h = (ymax - ymin + 1) as usize;
        Scratch { xmin, ymin, w, h, seen: vec![0; w * h], stamp: 0, stack: Vec::new(), pending: Vec::new() }
    }

    fn for_ball(n: u32) -> Self {
        let n = n as i32;
        let hy = n + n / 6 + 2;
        let hx = n + hy / 2 + 2;
        Scratch::new(-hx, hx, -hy, hy)
    }

    fn reset(&mut self) {
        if self.stamp == u32::MAX {
            self.seen.fill(0);
            self.stamp = 0;
        }
        self.stamp += 1;
        self.stack.clear();
        self.pending.clear();
    }

    /// Marks `v`; returns `true` if it was not marked before.
    #[inline]
    fn mark(&mut self, v: SiteCoord) -> bool {
        let dx = (v.x - self.xmin) as usize;
        let dy = (v.y - self.ymin) as usize;
        debug_assert!(dx < self.w && dy < self.h, "{v:?} outside scratch box");
        let c = &mut self.seen[dy * self.w + dx];
        if *c == self.stamp {
            false
        } else {
            *c = self.stamp;
            true
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(LabError::InvalidParameter(format!("p = {p} not in [0,1]")));
    }
    Ok(())
}

fn count_parallel<S, I, F>(samples: u64, init: I, f: F) -> Proportion
where
    S: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, u64) -> bool + Sync + Send,
{
    let hits = (0..samples)
        .into_par_iter()
        .map_init(&init, |s, i| u64::from(f(s, i)))
        .sum();
    Proportion::new(hits, samples)
}

/// Whether `v` lies in `∂in B_n` for `n = v.radius()`, i.e. has a neighbor of
/// larger radius.
#[inline]
fn is_rim(v: SiteCoord) -> bool {
    let r = v.radius();
    v.neighbors().iter().any(|w| w.radius() > r)
}

/// One sample of the connection profile: `out[k]` is set iff `0 ↔ ∂in B_{radii[k]}`
/// by an occupied path inside `B_{radii[k]}`. `radii` must be increasing.
fn arm_profile_sample(s: &mut Scratch, key: StreamKey, p: f64, radii: &[u32], out: &mut [bool]) {
    out.fill(false);
    s.reset();
    let o = SiteCoord::ORIGIN;
    if !bernoulli_occupied(key, o, p) {
        return;
    }
    s.mark(o);
    s.pending.push(o);
    for (k, &n) in radii.iter().enumerate() {
        // Release deferred sites that now lie inside B_n.
        let mut keep = Vec::new();
        for v in std::mem::take(&mut s.pending) {
            if v.radius() <= n {
                s.stack.push(v);
            } else {
                keep.push(v);
            }
        }
        s.pending = keep;
        let mut hit = false;
        while let Some(v) = s.stack.pop() {
            if !hit && v.radius() == n && is_rim(v) {
                hit = true;
            }
            for w in v.neighbors() {
                if bernoulli_occupied(key, w, p) && s.mark(w) {
                    if w.radius() <= n {
                        s.stack.push(w);
                    } else {
                        s.pending.push(w);
                    }
                }
            }
        }
        if !hit {
            return;
        }
        out[k] = true;
    }
}

/// `P_p(0 ↔ ∂in B_n)` for every `n` in `radii` (strictly increasing), sharing the
/// explorations between radii.
pub fn one_arm_profile(p: f64, radii: &[u32], samples: u64, key: StreamKey) -> Result<Vec<Proportion>> {
    check_p(p)?;
    if samples == 0 || radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) || radii[0] == 0 {
        return Err(LabError::InvalidParameter("need samples >= 1 and increasing radii >= 1".into()));
    }
    let nmax = *radii.last().unwrap();
    let hits = (0..samples)
        .into_par_iter()
        .map_init(
            || (Scratch::for_ball(nmax + 1), vec![false; radii.len()]),
            |(s, out), i| {
                arm_profile_sample(s, key.child(i), p, radii, out);
                out.iter().map(|&b| u64::from(b)).collect::<Vec<_>>()
            },
        )
        .reduce(|| vec![0; radii.len()], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    Ok(hits.into_iter().map(|h| Proportion::new(h, samples)).collect())
}

/// Monte Carlo estimate of `P_p(0 ↔ ∂in B_n)` (Wilson interval via
/// [`Proportion::wilson95`]).
pub fn estimate_connection(p: f64, n: u32, samples: u64, key: StreamKey) -> Result<Proportion> {
    Ok(one_arm_profile(p, &[n], samples, key)?[0])
}

/// Dense precomputation for repeated analysis of one region.
struct DenseFlags {
    dense: Arc<DenseRegion>,
    start: Vec<bool>,
    end: Vec<bool>,
}

fn dense_bfs(
    d: &DenseFlags,
    occ: &[bool],
    sources: &[bool],
    seen: &mut [bool],
    stack: &mut Vec<u32>,
    target: &[bool],
) -> bool {
    seen.fill(false);
    stack.clear();
    for i in 0..occ.len() {
        if sources[i] && occ[i] {
            if target[i] {
                return true;
            }
            seen[i] = true;
            stack.push(i as u32);
        }
    }
    while let Some(i) = stack.pop() {
        for &j in d.dense.neighbors(i) {
            if j != NONE && occ[j as usize] && !seen[j as usize] {
                if target[j as usize] {
                    return true;
                }
                seen[j as usize] = true;
                stack.push(j);
            }
        }
    }
    false
}

/// `P_p(center of B_n is pivotal for the left-right crossing of B_n)`.
pub fn pivotal_probability(p: f64, n: u32, samples: u64, key: StreamKey) -> Result<Proportion> {
    check_p(p)?;
    if n == 0 || samples == 0 {
        return Err(LabError::InvalidParameter("need n >= 1 and samples >= 1".into()));
    }
    let dense = DenseRegion::shared(Region::ball(n))?;
    let rect = EmbeddedRect::square(n);
    let center = dense.index_of(SiteCoord::ORIGIN).expect("origin in ball");
    let flags = DenseFlags {
        start: dense.sites().iter().map(|&v| rect.near_left(v)).collect(),
        end: dense.sites().iter().map(|&v| rect.near_right(v)).collect(),
        dense,
    };
    let len = flags.dense.len();
    let never = vec![false; len];
    Ok(count_parallel(
        samples,
        || (vec![false; len], vec![false; len], vec![false; len], Vec::new()),
        |(occ, lseen, rseen, stack), i| {
            let k = key.child(i);
            for (o, &v) in occ.iter_mut().zip(flags.dense.sites()) {
                *o = bernoulli_occupied(k, v, p);
            }
            occ[center as usize] = false;
            if dense_bfs(&flags, occ, &flags.start, lseen, stack, &flags.end) {
                return false;
            }
            dense_bfs(&flags, occ, &flags.end, rseen, stack, &never);
            let nb = flags.dense.neighbors(center);
            let left = flags.start[center as usize] || nb.iter().any(|&j| j != NONE && lseen[j as usize]);
            let right = flags.end[center as usize] || nb.iter().any(|&j| j != NONE && rseen[j as usize]);
            left && right
        },
    ))
}

/// Crossing probability of a domain for the given color at density `p`.
pub fn crossing_probability(
    domain: &super::CrossingDomain,
    dir: super::Direction,
    color: super::Color,
    p: f64,
    samples: u64,
    key: StreamKey,
) -> Result<Proportion> {
    check_p(p)?;
    let sites = domain.sites();
    let dense = DenseRegion::shared(Region::Explicit(sites.iter().copied().collect()))?;
    let flags = DenseFlags {
        start: dense.sites().iter().map(|&v| domain.is_start(v, dir)).collect(),
        end: dense.sites().iter().map(|&v| domain.is_end(v, dir)).collect(),
        dense,
    };
    let len = flags.dense.len();
    let want_occ = color == super::Color::Occupied;
    Ok(count_parallel(
        samples,
        || (vec![false; len], vec![false; len], Vec::new()),
        |(occ, seen, stack), i| {
            let k = key.child(i);
            for (o, &v) in occ.iter_mut().zip(flags.dense.sites()) {
                *o = bernoulli_occupied(k, v, p) == want_occ;
            }
            dense_bfs(&flags, occ, &flags.start, seen, stack, &flags.end)
        },
    ))
}

/// `π₁(n1, n2)`: an occupied path in `A_{n1,n2}` joins `∂out B_{n1}` to `∂in B_{n2}`.
pub fn annulus_arm_probability(p: f64, n1: u32, n2: u32, samples: u64, key: StreamKey) -> Result<Proportion> {
    check_p(p)?;
    let a = crate::lattice::Annulus::new(n1, n2)?;
    let dense = DenseRegion::shared(Region::Annulus(a))?;
    let flags = DenseFlags {
        start: dense.sites().iter().map(|&v| a.touches_inner(v)).collect(),
        end: dense.sites().iter().map(|&v| a.touches_outer(v)).collect(),
        dense,
    };
    let len = flags.dense.len();
    Ok(count_parallel(
        samples,
        || (vec![false; len], vec![false; len], Vec::new()),
        |(occ, seen, stack), i| {
            let k = key.child(i);
            for (o, &v) in occ.iter_mut().zip(flags.dense.sites()) {
                *o = bernoulli_occupied(k, v, p);
            }
            dense_bfs(&flags, occ, &flags.start, seen, stack, &flags.end)
        },
    ))
}

/// One sample of the short-direction crossing of `[0,2n] × [0,n]` by sites of the
/// minority color (occupied for `p < 1/2`, vacant for `p > 1/2`).
fn wide_rect_crossing(s: &mut Scratch, key: StreamKey, p: f64, rect: &EmbeddedRect, bottom: &[SiteCoord]) -> bool {
    let occupied_color = p < 0.5;
    let colored = |v: SiteCoord| bernoulli_occupied(key, v, p) == occupied_color;
    s.reset();
    for &v in bottom {
        if colored(v) && s.mark(v) {
            s.stack.push(v);
        }
    }
    while let Some(v) = s.stack.pop() {
        if rect.near_top(v) {
            return true;
        }
        for w in v.neighbors() {
            if rect.contains(w) && colored(w) && s.mark(w) {
                s.stack.push(w);
            }
        }
    }
    false
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LengthOptions {
    pub threshold: f64,
    /// Maximum samples per candidate `n`.
    pub max_samples: u64,
    /// First batch size; batches double until the interval excludes the threshold.
    pub min_samples: u64,
    pub cap: u32,
}

impl Default for LengthOptions {
    fn default() -> Self {
        LengthOptions { threshold: 0.001, max_samples: 100_000, min_samples: 1_000, cap: 1 << 14 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LengthEstimate {
    pub p: f64,
    /// Raw `L̂(p)`, at least 1.
    pub n: u32,
    /// Regularized value: 0 at `p ∈ {0, 1}`.
    pub regularized: u32,
    pub capped: bool,
    /// `(n, crossing probability)` for every candidate examined.
    pub probes: Vec<(u32, Proportion)>,
}

/// `L̂(p)`: the smallest `n` whose estimated short-direction crossing probability
/// of `[0,2n] × [0,n]` is at most the threshold (minority color, so
/// `L̂(p) = L̂(1−p)` in law). Doubling search followed by bisection.
pub fn characteristic_length(p: f64, opts: &LengthOptions, key: StreamKey) -> Result<LengthEstimate> {
    check_p(p)?;
    if p == 0.5 {
        return Err(LabError::InvalidParameter("L(p_c) is infinite".into()));
    }
    if opts.min_samples == 0 || opts.max_samples < opts.min_samples {
        return Err(LabError::InvalidParameter("bad sample bounds".into()));
    }
    let mut probes = Vec::new();
    let below = |n: u32, probes: &mut Vec<(u32, Proportion)>| -> bool {
        let hy = (2 * n + 3) as i32;
        let rect = EmbeddedRect::wide(n);
        let bottom: Vec<SiteCoord> = rect.sites().into_iter().filter(|&v| rect.near_bottom(v)).collect();
        let mut prop = Proportion::default();
        let mut batch = opts.min_samples;
        loop {
            let start = prop.trials;
            let sub = (0..batch)
                .into_par_iter()
                .map_init(
                    || Scratch::new(-hy, 2 * n as i32 + 2, -1, hy),
                    |s, i| u64::from(wide_rect_crossing(s, key.child(start + i), p, &rect, &bottom)),
                )
                .sum();
            prop = prop.merge(Proportion::new(sub, batch));
            let (lo, hi) = prop.wilson95();
            if lo > opts.threshold || hi < opts.threshold || prop.trials >= opts.max_samples {
                break;
            }
            batch = prop.trials.min(opts.max_samples - prop.trials);
        }
        probes.push((n, prop));
        prop.estimate() <= opts.threshold
    };
    if p == 0.0 || p == 1.0 {
        return Ok(LengthEstimate { p, n: 1, regularized: 0, capped: false, probes });
    }
    let mut hi = 1u32;
    while !below(hi, &mut probes) {
        if hi >= opts.cap {
            return Ok(LengthEstimate { p, n: opts.cap, regularized: opts.cap, capped: true, probes });
        }
        hi = (hi * 2).min(opts.cap);
    }
    let mut lo = hi / 2; // crossing probability above threshold at lo (or lo = 0)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if below(mid, &mut probes) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(LengthEstimate { p, n: hi, regularized: hi, capped: false, probes })
}
