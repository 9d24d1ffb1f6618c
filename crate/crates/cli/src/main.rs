use avalanche_core::dynamics::{Fault, FrozenRule};
use avalanche_core::scales::Backend;
use avalanche_lab::config::{ExperimentConfig, ExperimentKind, ModelKind, RegionSpec};
use avalanche_lab::{run_experiment, thread_count, with_threads, CliError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "avalanche-lab", version, about = "Frozen percolation and forest-fire experiments on the triangular lattice")]
struct Cli {
    #[command(subcommand)]
    group: Group,
}

#[derive(Subcommand)]
enum Group {
    /// Run a process on a region and write event / report CSVs.
    Simulate {
        what: SimKind,
        #[command(flatten)]
        flags: Flags,
    },
    /// Monte Carlo estimates of arm probabilities and the characteristic length.
    Estimate {
        what: EstKind,
        #[command(flatten)]
        flags: Flags,
    },
    /// Deterministic scale maps, fixed points and schedules.
    Scales {
        what: ScalesKind,
        #[command(flatten)]
        flags: Flags,
    },
    /// Self-test suites with fixed seeds; nonzero exit on failure.
    Verify {
        what: avalanche_lab::selftest::Suite,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SimKind {
    Fp,
    Ffwor,
    Ffwr,
    Impurity,
    Birth,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstKind {
    Pi1,
    Pi4,
    Theta,
    Length,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalesKind {
    Psi,
    TInfinity,
    Exceptional,
    Schedule,
    Constants,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Original,
    Modified,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Fp,
    Ff,
}

/// Every flag overrides the same-named field of `--config`.
#[derive(Args, Default)]
struct Flags {
    /// TOML (or .json) file with ExperimentConfig fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `ball:<radius>` or `lozenge:<side>`.
    #[arg(long)]
    region: Option<RegionSpec>,
    /// Frozen-percolation volume threshold N.
    #[arg(long)]
    threshold: Option<u32>,
    #[arg(long, value_enum)]
    rule: Option<RuleArg>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Discard ignitions after this time.
    #[arg(long)]
    truncation: Option<f64>,
    #[arg(long)]
    replicas: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<u64>,
    /// Radius n for arm estimates.
    #[arg(long)]
    radius: Option<u32>,
    /// Box radii for F^(B_n), comma separated.
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<u32>>,
    #[arg(long)]
    eps_bar: Option<f64>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    /// N (fp) or ζ (ff).
    #[arg(long)]
    param: Option<f64>,
    /// ln N or ln(1/ζ), for parameters beyond floating point.
    #[arg(long)]
    ln_param: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// JSON file with a scales backend (ansatz amplitudes or empirical tables).
    #[arg(long)]
    backend_file: Option<PathBuf>,
    /// Check every freeze / burn against a flood fill.
    #[arg(long)]
    audit: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; `AVALANCHE_THREADS` caps this.
    #[arg(long)]
    threads: Option<usize>,
    /// Test hook: corrupt the engine by skipping every k-th cluster merge.
    #[arg(long, hide = true)]
    inject_fault: Option<u64>,
}

impl Flags {
    fn build(&self, kind: ExperimentKind) -> Result<ExperimentConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        c.kind = kind;
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f.clone() { c.$f = v; } )* };
        }
        set!(region, threshold, zeta, p, t, horizon, replicas, seed, samples, radius, radii, eps_bar, param, r, k_max);
        if self.truncation.is_some() {
            c.truncation = self.truncation;
        }
        if self.ln_param.is_some() {
            c.ln_param = self.ln_param;
        }
        if self.alpha.is_some() {
            c.alpha = self.alpha;
        }
        if self.out.is_some() {
            c.out = self.out.clone();
        }
        if let Some(rule) = self.rule {
            c.rule = match rule {
                RuleArg::Original => FrozenRule::Original,
                RuleArg::Modified => FrozenRule::Modified,
            };
        }
        if let Some(m) = self.model {
            c.model = match m {
                ModelArg::Fp => ModelKind::Fp,
                ModelArg::Ff => ModelKind::Ff,
            };
        }
        if let Some(path) = &self.backend_file {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            c.backend = serde_json::from_str::<Backend>(&text)?;
        }
        c.audit |= self.audit;
        Ok(c)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, flags) = match &cli.group {
        Group::Simulate { what, flags } => (
            match what {
                SimKind::Fp => ExperimentKind::Fp,
                SimKind::Ffwor => ExperimentKind::Ffwor,
                SimKind::Ffwr => ExperimentKind::Ffwr,
                SimKind::Impurity => ExperimentKind::Impurity,
                SimKind::Birth => ExperimentKind::Birth,
            },
            flags,
        ),
        Group::Estimate { what, flags } => (
            match what {
                EstKind::Pi1 => ExperimentKind::EstimatePi1,
                EstKind::Pi4 => ExperimentKind::EstimatePi4,
                EstKind::Theta => ExperimentKind::EstimateTheta,
                EstKind::Length => ExperimentKind::EstimateLength,
            },
            flags,
        ),
        Group::Scales { what, flags } => (
            match what {
                ScalesKind::Psi => ExperimentKind::ScalesPsi,
                ScalesKind::TInfinity => ExperimentKind::ScalesTInfinity,
                ScalesKind::Exceptional => ExperimentKind::ScalesExceptional,
                ScalesKind::Schedule => ExperimentKind::ScalesSchedule,
                ScalesKind::Constants => ExperimentKind::ScalesConstants,
            },
            flags,
        ),
        Group::Verify { what, flags } => (
            match what {
                avalanche_lab::selftest::Suite::Oracle => ExperimentKind::VerifyOracle,
                avalanche_lab::selftest::Suite::Duality => ExperimentKind::VerifyDuality,
                avalanche_lab::selftest::Suite::Invariants => ExperimentKind::VerifyInvariants,
                avalanche_lab::selftest::Suite::Scales => ExperimentKind::VerifyScales,
            },
            flags,
        ),
    };
    let fault = flags.inject_fault.map(|every| Fault::SkipMerge { every: every.max(1) });
    let result = flags
        .build(kind)
        .and_then(|cfg| with_threads(thread_count(flags.threads), || run_experiment(&cfg, fault))?);
    match result {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            if outcome.pass == Some(false) {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
