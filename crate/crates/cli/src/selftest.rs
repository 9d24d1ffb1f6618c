//! Desk-scale self-tests with fixed seeds. Each suite is a list of named checks;
//! a suite passes when every check not marked as a known gap passes.

use avalanche_core::dynamics::{
    frozen_law, frozen_on_graph, run, run_reference, EventKind, Fault, FireParams, FrozenParams, FrozenRule, Graph,
    Process, RunOptions, Streams,
};
use avalanche_core::measure::{aggregate, avalanche_stats};
use avalanche_core::percolation::estimate::crossing_probability;
use avalanche_core::percolation::{crossing, CrossingDomain, Direction};
use avalanche_core::scales::{n_ff, n_fp, Backend, Model, ScheduleParams, A_FF, A_FP, C_T};
use avalanche_core::{Color, Configuration, DenseRegion, Purpose, Region, SiteCoord, SiteState, StreamKey};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

const SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Oracle,
    Duality,
    Invariants,
    Scales,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Failure is expected and documented; it does not fail the suite.
    pub known_gap: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass || c.known_gap)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let verdict = match (c.pass, c.known_gap) {
                (true, _) => "PASS",
                (false, true) => "FAIL (known gap)",
                (false, false) => "FAIL",
            };
            let _ = writeln!(s, "{verdict:<5} {}: {}", c.name, c.detail);
        }
        let _ = writeln!(
            s,
            "suite {:?}: {} in {:.1}s",
            self.suite,
            if self.pass() { "PASS" } else { "FAIL" },
            self.seconds
        );
        s
    }
}

fn check(name: &str, pass: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), pass, known_gap: false, detail: detail.into() }
}

/// Run one suite. `fault` corrupts the optimized engine (test hook).
pub fn run_suite(suite: Suite, fault: Option<Fault>) -> SuiteReport {
    let start = Instant::now();
    let checks = match suite {
        Suite::Oracle => oracle(fault),
        Suite::Duality => duality(),
        Suite::Invariants => invariants(fault),
        Suite::Scales => scales(),
    };
    SuiteReport { suite, checks, seconds: start.elapsed().as_secs_f64() }
}

fn lozenge(k: u32) -> Arc<DenseRegion> {
    DenseRegion::shared(Region::lozenge(k)).expect("lozenge")
}

fn oracle(fault: Option<Fault>) -> Vec<Check> {
    let opts = RunOptions { audit: false, fault };
    let mut out = Vec::new();

    let params = FrozenParams { threshold: 2, rule: FrozenRule::Original };
    let law = frozen_law(&Graph::path(3), &params).expect("law");
    let counts: Vec<u64> = law.values().copied().collect();
    out.push(check("three-path exact law", counts == [2, 2, 2], format!("order counts {counts:?}")));

    let path = DenseRegion::shared(Region::Explicit((0..3).map(|x| SiteCoord::new(x, 0)).collect())).expect("path");
    let runs = 20_000u64;
    let mut freq: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    for i in 0..runs {
        let r = run(&path, &Process::Frozen(params), &Streams::derive(SEED, i), &opts).expect("run");
        for e in r.log.iter().filter(|e| e.kind == EventKind::Freeze) {
            *freq.entry(e.members.clone()).or_default() += 1;
        }
    }
    let fr: Vec<f64> = freq.values().map(|&k| k as f64 / runs as f64).collect();
    let ok = fr.len() == 3 && fr.iter().all(|f| (f - 1.0 / 3.0).abs() < 0.015);
    out.push(check("three-path Monte Carlo", ok, format!("{fr:.4?} over {runs} runs")));

    // Lattice engine = graph process driven by the birth-time order.
    let mut bad = 0;
    for i in 0..60u64 {
        let k = 3 + (i % 6) as u32;
        let d = lozenge(k);
        let s = Streams::derive(SEED, 1000 + i);
        let fp = FrozenParams { threshold: 2 + (i % 5) as u32, rule: if i % 2 == 0 { FrozenRule::Original } else { FrozenRule::Modified } };
        let r = run(&d, &Process::Frozen(fp), &s, &opts).expect("run");
        let mut order: Vec<u32> = (0..d.len() as u32).collect();
        order.sort_by(|&a, &b| s.birth_time(d.site(a)).total_cmp(&s.birth_time(d.site(b))).then(a.cmp(&b)));
        let g = frozen_on_graph(&Graph::from_region(&d), &fp, &order).expect("graph");
        bad += usize::from(r.final_state.states() != &g.states[..]);
    }
    out.push(check("engine vs graph process", bad == 0, format!("{bad} of 60 instances differ")));

    let mut bad = 0;
    for i in 0..60u64 {
        let d = lozenge(4 + (i % 10) as u32);
        let process = match i % 3 {
            0 => Process::Frozen(FrozenParams { threshold: 2 + (i % 7) as u32, rule: FrozenRule::Original }),
            1 => Process::Ffwor(FireParams::new(0.02 + 0.008 * (i % 50) as f64, 3.0)),
            _ => Process::Ffwr(FireParams::new(0.02 + 0.008 * (i % 50) as f64, 3.0)),
        };
        let s = Streams::derive(SEED, 2000 + i);
        let fast = run(&d, &process, &s, &opts).expect("run");
        let slow = run_reference(&d, &process, &s).expect("reference");
        bad += usize::from(fast.log.to_csv() != slow.log.to_csv());
    }
    out.push(check("engine vs reference event logs", bad == 0, format!("{bad} of 60 logs differ")));
    out
}

fn duality() -> Vec<Check> {
    let mut out = Vec::new();
    for k in 2..=4u32 {
        let d = lozenge(k);
        let dom = CrossingDomain::Lozenge(k);
        let n = d.len();
        let mut fails = 0u64;
        for mask in 0u64..1 << n {
            let states = (0..n).map(|i| if mask >> i & 1 == 1 { SiteState::Occupied } else { SiteState::Vacant }).collect();
            let c = Configuration::new(d.clone(), states).expect("config");
            let lr = crossing(&c, &dom, Direction::Horizontal, Color::Occupied).expect("crossing");
            let tb = crossing(&c, &dom, Direction::Vertical, Color::Vacant).expect("crossing");
            fails += u64::from(lr == tb);
        }
        out.push(check(&format!("exhaustive duality k={k}"), fails == 0, format!("{fails} of {} configurations fail", 1u64 << n)));
    }
    let p = crossing_probability(
        &CrossingDomain::Lozenge(32),
        Direction::Horizontal,
        Color::Occupied,
        0.5,
        20_000,
        StreamKey::new(SEED, 0, Purpose::Bernoulli),
    )
    .expect("estimate");
    let sigma = (0.25 / p.trials as f64).sqrt();
    out.push(check(
        "lozenge crossing at p = 1/2",
        (p.estimate() - 0.5).abs() <= 3.0 * sigma,
        format!("{:.4} (3σ = {:.4})", p.estimate(), 3.0 * sigma),
    ));
    out
}

fn invariants(fault: Option<Fault>) -> Vec<Check> {
    let opts = RunOptions { audit: false, fault };
    let mut out = Vec::new();
    let d = DenseRegion::shared(Region::ball(20)).expect("ball");
    let big_n = 50;
    let mut outside = 0;
    let mut without = 0;
    for rule in [FrozenRule::Original, FrozenRule::Modified] {
        for i in 0..100u64 {
            let r = run(&d, &Process::Frozen(FrozenParams { threshold: big_n, rule }), &Streams::derive(SEED, i), &opts)
                .expect("run");
            let vols: Vec<u32> = r.log.iter().filter(|e| e.kind == EventKind::Freeze).map(|e| e.volume).collect();
            outside += vols.iter().filter(|&&v| v < big_n || v > 3 * big_n - 2).count();
            without += usize::from(vols.is_empty());
        }
    }
    out.push(check(
        "freeze volumes in [N, 3N-2]",
        outside == 0 && without == 0,
        format!("{outside} volumes outside, {without} runs without a freeze"),
    ));

    let mut bad = 0;
    let mut reports = Vec::new();
    for i in 0..40u64 {
        let r = run(&d, &Process::Ffwor(FireParams::new(0.01, 4.0)), &Streams::derive(SEED, 500 + i), &opts).expect("run");
        let mut owner = vec![0u32; d.len()];
        for e in r.log.iter().filter(|e| e.kind == EventKind::Burn) {
            for &m in &e.members {
                owner[m as usize] += 1;
            }
        }
        let partition = (0..d.len()).all(|j| owner[j] == u32::from(r.final_state.state(j as u32) == SiteState::Dead));
        let rep = avalanche_stats(&r.log, &r.final_state, &[5, 10, 20], Some(100.0)).expect("stats");
        let nested = rep.boxes.windows(2).all(|w| w[0].inside <= w[1].inside);
        let timeline = rep.timeline.windows(2).all(|w| w[0].1 <= w[1].1);
        bad += usize::from(!(partition && nested && timeline && rep.circuits >= rep.circuit_bearing));
        reports.push(rep);
    }
    out.push(check("FFWoR burns, boxes, timeline, circuits", bad == 0, format!("{bad} of 40 runs violate an invariant")));

    let forward = aggregate(&reports).expect("aggregate");
    reports.reverse();
    let backward = aggregate(&reports).expect("aggregate");
    let same = serde_json::to_string(&forward).ok() == serde_json::to_string(&backward).ok();
    out.push(check("aggregation order independence", same, "reversed replica order"));
    out
}

fn scales() -> Vec<Check> {
    let b = Backend::ansatz();
    let mut out = Vec::new();
    let got = b.t_infinity(&Model::fp(1e6).expect("model")).map(|f| f.m()).unwrap_or(f64::NAN);
    let want = (1e6 / C_T).powf(48.0 / 91.0);
    out.push(check("m∞(10⁶) closed form", (got / want - 1.0).abs() < 1e-9, format!("{got:.6} vs {want:.6}")));

    for model in [Model::fp(1e6).expect("model"), Model::ff(1e-6).expect("model")] {
        let limit = b.exceptional_fixed_point(&model).unwrap_or(f64::NAN);
        let seq = b.exceptional_scales(&model, 60).unwrap_or_default();
        let at = seq.iter().position(|&lm| ((lm - limit).exp() - 1.0).abs() < 1e-6);
        out.push(check("exceptional scales converge", at.is_some(), format!("{model:?}: step {at:?}")));
    }

    for (model, r, big_r, target) in [
        (Model::fp(1e3).expect("model"), 500.0, 1000.0, A_FP),
        (Model::ff(1e-3).expect("model"), 30.0, 700.0, A_FF),
    ] {
        let e = b.iteration_exponent(&model, r, big_r).ok().and_then(|x| x.exponent).unwrap_or(f64::NAN);
        out.push(check("one-iteration exponent", ((e - target) / target).abs() < 1e-9, format!("{e:.10} vs {target:.10}")));
    }

    for (name, target, ff) in [("FP", n_fp(), false), ("FF", n_ff(), true)] {
        let mut ratios = Vec::new();
        let mut structural = true;
        for k in [3, 6, 9, 12] {
            let lp = 10f64.powi(k);
            let model = if ff { Model::ff_log(lp) } else { Model::fp_log(lp) }.expect("model");
            match b.schedule(&model, &ScheduleParams::for_model(&model)) {
                Ok(s) => {
                    structural &= s.separation && (s.j == s.big_j || s.j + 1 == s.big_j);
                    ratios.push(s.j_ratio());
                }
                Err(_) => structural = false,
            }
        }
        out.push(check(&format!("{name} schedule separation and j"), structural, format!("J/lnln {ratios:.3?}")));
        let dev = ratios.last().map_or(f64::INFINITY, |r| (r - target).abs());
        let mut c = check(&format!("{name} schedule constant"), dev < 0.10, format!("deviation {dev:.3} from {target:.4} at 10¹²"));
        // The forest-fire schedule converges too slowly at the default α (see README).
        c.known_gap = ff;
        out.push(c);
    }
    out
}
