//! Experiment execution. Replicas run in parallel and are collected in index
//! order, so every data file is independent of the thread count.

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::selftest::{self, Suite};
use avalanche_core::dynamics::{run, snapshot_birth, Fault, FireParams, FrozenParams, Process, RunOptions, Streams};
use avalanche_core::impurities::{
    default_r_cut, forest_fire_spec, rho_from_subcritical_cluster, sample_impurity_percolation, ImpurityStreams,
};
use avalanche_core::measure::{aggregate, avalanche_stats, REPORT_CSV_HEADER};
use avalanche_core::percolation::estimate::{
    characteristic_length, estimate_connection, pivotal_probability, LengthOptions,
};
use avalanche_core::percolation::largest_cluster;
use avalanche_core::scales::{n_ff, n_fp, ScheduleParams};
use avalanche_core::{p_of_t, Purpose, SiteState, StreamKey, T_C};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

/// Default output directory of simulations.
pub const DEFAULT_OUT: &str = "avalanche-out";

#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Text for standard output.
    pub stdout: String,
    /// Selftest verdict; `None` for experiments.
    pub pass: Option<bool>,
}

/// Parallelism: the `--threads` flag, capped by `AVALANCHE_THREADS`.
pub fn thread_count(flag: Option<usize>) -> usize {
    let cap = std::env::var("AVALANCHE_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    let want = flag.filter(|&n| n > 0).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    cap.map_or(want, |c| want.min(c))
}

/// Run `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| CliError::Threads(e.to_string()))?;
    Ok(pool.install(f))
}

pub fn run_experiment(cfg: &ExperimentConfig, fault: Option<Fault>) -> Result<Outcome> {
    cfg.validate()?;
    let start = Instant::now();
    let mut manifest = RunManifest::new(cfg);
    use ExperimentKind::*;
    let (files, mut outcome) = match cfg.kind {
        Fp | Ffwor | Ffwr => dynamics(cfg, fault, &mut manifest)?,
        Birth => birth(cfg)?,
        Impurity => impurity(cfg, &mut manifest)?,
        EstimatePi1 | EstimatePi4 | EstimateTheta | EstimateLength => result_files(estimate(cfg)?),
        ScalesPsi | ScalesTInfinity | ScalesExceptional | ScalesSchedule | ScalesConstants => result_files(scales(cfg)?),
        VerifyOracle | VerifyDuality | VerifyInvariants | VerifyScales => {
            let suite = match cfg.kind {
                VerifyOracle => Suite::Oracle,
                VerifyDuality => Suite::Duality,
                VerifyInvariants => Suite::Invariants,
                _ => Suite::Scales,
            };
            let report = selftest::run_suite(suite, fault);
            let pass = report.pass();
            (Vec::new(), Outcome { files: Vec::new(), stdout: report.render(), pass: Some(pass) })
        }
    };
    let out_dir = match (&cfg.out, cfg.kind.is_simulation()) {
        (Some(d), _) => Some(d.clone()),
        (None, true) => Some(PathBuf::from(DEFAULT_OUT)),
        (None, false) => None,
    };
    if let Some(dir) = out_dir {
        if !files.is_empty() {
            std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
            for (name, body) in &files {
                let path = dir.join(name);
                std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
                manifest.files.push(name.clone());
                outcome.files.push(path);
            }
            manifest.wall_time_secs = start.elapsed().as_secs_f64();
            let path = dir.join("manifest.json");
            std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n").map_err(|e| CliError::io(&path, e))?;
            outcome.files.push(path);
        }
    }
    Ok(outcome)
}

type Files = Vec<(String, String)>;

fn result_files(v: Value) -> (Files, Outcome) {
    let text = serde_json::to_string_pretty(&v).unwrap_or_default() + "\n";
    (vec![("result.json".into(), text.clone())], Outcome { stdout: text, ..Default::default() })
}

fn process_of(cfg: &ExperimentConfig) -> Process {
    let mut fire = FireParams::new(cfg.zeta, cfg.horizon);
    fire.truncation = cfg.truncation;
    match cfg.kind {
        ExperimentKind::Fp => Process::Frozen(FrozenParams { threshold: cfg.threshold, rule: cfg.rule }),
        ExperimentKind::Ffwor => Process::Ffwor(fire),
        _ => Process::Ffwr(fire),
    }
}

fn dynamics(cfg: &ExperimentConfig, fault: Option<Fault>, manifest: &mut RunManifest) -> Result<(Files, Outcome)> {
    let dense = cfg.region.dense()?;
    let process = process_of(cfg);
    let opts = RunOptions { audit: cfg.audit, fault };
    // Surrounding-cluster statistics apply to frozen and FFWoR runs.
    let measured = !matches!(process, Process::Ffwr(_));
    let param = match process {
        Process::Frozen(p) => f64::from(p.threshold),
        _ => 1.0 / cfg.zeta,
    };
    let rows = (0..cfg.replicas)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let out = run(&dense, &process, &Streams::derive(cfg.seed, i), &opts)?;
            let report = if measured {
                Some(avalanche_stats(&out.log, &out.final_state, &cfg.radii, Some(param))?)
            } else {
                None
            };
            let mut csv = String::new();
            for line in out.log.to_csv().lines().skip(1) {
                let _ = writeln!(csv, "{i},{line}");
            }
            Ok((csv, report, out.truncated))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut data = format!("replica,{}\n", avalanche_core::dynamics::CSV_HEADER);
    let mut files = Vec::new();
    for (i, (csv, _, truncated)) in rows.iter().enumerate() {
        data.push_str(csv);
        if *truncated {
            manifest.truncated_replicas.push(i as u64);
        }
    }
    files.push(("data.csv".to_string(), data));
    let mut stdout = format!("{} replicas on {} ({} sites)\n", cfg.replicas, cfg.region, dense.len());
    if measured {
        let reports: Vec<_> = rows.into_iter().filter_map(|r| r.1).collect();
        let mut csv = format!("{REPORT_CSV_HEADER}\n");
        for (i, r) in reports.iter().enumerate() {
            csv.push_str(&r.to_csv(i as u64, false));
        }
        files.push(("report.csv".to_string(), csv));
        let summary = aggregate(&reports)?;
        let _ = writeln!(stdout, "mean |F| = {:.4}, mean C_F = {:.4}", summary.surrounding.mean, summary.circuits.mean);
        files.push(("summary.json".to_string(), serde_json::to_string_pretty(&summary)? + "\n"));
    }
    Ok((files, Outcome { stdout, ..Default::default() }))
}

fn birth(cfg: &ExperimentConfig) -> Result<(Files, Outcome)> {
    let dense = cfg.region.dense()?;
    let rows = (0..cfg.replicas)
        .into_par_iter()
        .map(|i| -> Result<String> {
            let c = snapshot_birth(&dense, &[cfg.t], &Streams::derive(cfg.seed, i))?.remove(0);
            let occ = c.count(SiteState::Occupied);
            let largest = largest_cluster(&c).map_or(0, |x| x.1);
            Ok(format!("{i},{},{occ},{:.6},{largest}\n", cfg.t, occ as f64 / dense.len() as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    let data = "replica,t,occupied,occupied_fraction,largest_cluster\n".to_string() + &rows.concat();
    let stdout = format!("{} birth snapshots at t = {} on {}\n", cfg.replicas, cfg.t, cfg.region);
    Ok((vec![("data.csv".into(), data)], Outcome { stdout, ..Default::default() }))
}

fn impurity(cfg: &ExperimentConfig, manifest: &mut RunManifest) -> Result<(Files, Outcome)> {
    let dense = cfg.region.dense()?;
    let key = StreamKey::new(cfg.seed, u64::MAX, Purpose::Tau);
    let radii = rho_from_subcritical_cluster(cfg.eps_bar, default_r_cut(cfg.eps_bar), cfg.samples, key)?;
    let m = cfg.backend.length(T_C - cfg.eps_bar)?.max(1.0);
    let spec = forest_fire_spec(m, cfg.zeta, radii.law.clone());
    let p = p_of_t(cfg.t);
    let rows = (0..cfg.replicas)
        .into_par_iter()
        .map(|i| -> Result<(String, f64)> {
            let (c, holes) = sample_impurity_percolation(&dense, p, &spec, &ImpurityStreams::derive(cfg.seed, i))?;
            let occ = c.count(SiteState::Occupied);
            let largest = largest_cluster(&c).map_or(0, |x| x.1);
            let row = format!("{i},{p},{},{occ},{:.6},{largest}\n", holes.holes.len(), occ as f64 / dense.len() as f64);
            Ok((row, holes.truncation_bound))
        })
        .collect::<Result<Vec<_>>>()?;
    manifest.hole_truncation_bound = rows.iter().map(|r| r.1).reduce(f64::max);
    let data = "replica,p,holes,occupied,occupied_fraction,largest_cluster\n".to_string()
        + &rows.iter().map(|r| r.0.as_str()).collect::<String>();
    let stdout = format!(
        "{} impurity samples on {}: m = {m:.1}, pi = {:.3e}, {} of {} radius samples truncated\n",
        cfg.replicas,
        cfg.region,
        spec.pi.max(),
        radii.truncated,
        cfg.samples
    );
    Ok((vec![("data.csv".into(), data), ("tail.csv".into(), radii.law.to_csv())], Outcome { stdout, ..Default::default() }))
}

fn estimate(cfg: &ExperimentConfig) -> Result<Value> {
    let key = StreamKey::new(cfg.seed, 0, Purpose::Bernoulli);
    let prop = |p: avalanche_core::stats::Proportion, n: u32| {
        let (lo, hi) = p.wilson95();
        json!({ "p": cfg.p, "n": n, "estimate": p.estimate(), "successes": p.successes, "trials": p.trials, "wilson95": [lo, hi] })
    };
    Ok(match cfg.kind {
        ExperimentKind::EstimatePi1 => prop(estimate_connection(cfg.p, cfg.radius, cfg.samples, key)?, cfg.radius),
        ExperimentKind::EstimatePi4 => prop(pivotal_probability(cfg.p, cfg.radius, cfg.samples, key)?, cfg.radius),
        ExperimentKind::EstimateTheta => {
            // θ(p) ≈ P(0 ↔ ∂B_{4L(p)}) above p_c; the given radius otherwise.
            let n = if cfg.p > 0.5 && cfg.p < 1.0 {
                4 * characteristic_length(cfg.p, &LengthOptions::default(), key.child(u64::MAX))?.n
            } else {
                cfg.radius
            };
            prop(estimate_connection(cfg.p, n, cfg.samples, key)?, n)
        }
        _ => {
            let opts = LengthOptions { max_samples: cfg.samples.max(1_000), ..LengthOptions::default() };
            serde_json::to_value(characteristic_length(cfg.p, &opts, key)?)?
        }
    })
}

fn scales(cfg: &ExperimentConfig) -> Result<Value> {
    let b = &cfg.backend;
    let model = cfg.model_value()?;
    Ok(match cfg.kind {
        ExperimentKind::ScalesPsi => {
            let ln_eps = b.ln_psi(&model, cfg.r.ln())?;
            json!({ "model": model, "r": cfg.r, "ln_eps": ln_eps, "t": T_C + ln_eps.exp() })
        }
        ExperimentKind::ScalesTInfinity => {
            let fp = b.t_infinity(&model)?;
            json!({ "model": model, "t_infinity": fp.t(), "m_infinity": fp.m(), "fixed_point": fp })
        }
        ExperimentKind::ScalesExceptional => {
            let ln_m = b.exceptional_scales(&model, cfg.k_max)?;
            let limit = b.exceptional_fixed_point(&model).ok();
            json!({ "model": model, "ln_m": ln_m, "ln_fixed_point": limit })
        }
        ExperimentKind::ScalesSchedule => {
            let mut params = ScheduleParams::for_model(&model);
            if let Some(a) = cfg.alpha {
                params.alpha = a;
            }
            let s = b.schedule(&model, &params)?;
            json!({ "j_ratio": s.j_ratio(), "lnln": s.lnln(), "schedule": s })
        }
        _ => json!({
            "model": model,
            "n_fp": n_fp(),
            "n_ff": n_ff(),
            "derived": b.derived_constants(&model)?,
        }),
    })
}
