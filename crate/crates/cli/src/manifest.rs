use crate::config::ExperimentConfig;
use avalanche_core::rng::derive_seed;
use avalanche_core::Purpose;
use serde::{Deserialize, Serialize};

/// Seed mixing, stated so outputs can be reproduced without this tool.
pub const SEED_DERIVATION: &str = "derive_seed(root, replica, purpose) = mix(mix(mix(root ^ 0x9e3779b97f4a7c15) \
    ^ replica*0xd1b54a32d192ed03) ^ tag*0x8cb92ba72f3d8dd7), mix = SplitMix64 finalizer; \
    tags bernoulli=1 birth=2 ignition=3 hole-indicator=4 hole-radius=5";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicaSeeds {
    pub replica: u64,
    pub bernoulli: u64,
    pub birth: u64,
    pub ignition: u64,
    pub hole_indicator: u64,
    pub hole_radius: u64,
}

impl ReplicaSeeds {
    pub fn derive(root: u64, replica: u64) -> Self {
        ReplicaSeeds {
            replica,
            bernoulli: derive_seed(root, replica, Purpose::Bernoulli),
            birth: derive_seed(root, replica, Purpose::Birth),
            ignition: derive_seed(root, replica, Purpose::Ignition),
            hole_indicator: derive_seed(root, replica, Purpose::HoleIndicator),
            hole_radius: derive_seed(root, replica, Purpose::HoleRadius),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub root_seed: u64,
    pub seed_derivation: String,
    pub replicas: Vec<ReplicaSeeds>,
    /// Files written next to this manifest.
    pub files: Vec<String>,
    /// Replicas stopped early by an event cap.
    pub truncated_replicas: Vec<u64>,
    /// Probability bound for holes left unsampled outside the padding (impurity runs).
    pub hole_truncation_bound: Option<f64>,
    /// The only field that differs between reruns.
    pub wall_time_secs: f64,
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig) -> Self {
        let replicas = if config.kind.is_simulation() { config.replicas } else { 1 };
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            root_seed: config.seed,
            seed_derivation: SEED_DERIVATION.to_string(),
            replicas: (0..replicas).map(|i| ReplicaSeeds::derive(config.seed, i)).collect(),
            files: Vec::new(),
            truncated_replicas: Vec::new(),
            hole_truncation_bound: None,
            wall_time_secs: 0.0,
        }
    }
}
