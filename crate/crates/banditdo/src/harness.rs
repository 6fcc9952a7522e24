//! Experiment harness: named presets, multi-replication execution with
//! paired environment draws, trace persistence, and aggregation.
//!
//! A replication draws one concrete environment from its seed, runs every
//! configured policy on identical feature and label-noise streams, and
//! verifies the pairing by checksum. Replications run in parallel; failed
//! ones are recorded in the manifest and excluded from aggregates.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::EnvParams;
use crate::error::{Error, Result};
use crate::policy::{self, BetaMode, PolicyConfig, PolicyKind, PolicyRun};
use crate::seed::{self, tag};
use crate::trace::{self, AggregateSeries, TraceRow};

fn default_replications() -> usize {
    10
}

/// A full experiment: environment generator, policies, horizon,
/// replication count, and seeding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub env: EnvParams,
    pub policies: Vec<PolicyConfig>,
    #[serde(rename = "T")]
    pub t_rounds: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub master_seed: u64,
    /// Where traces, the aggregate, and the manifest land; defaults to
    /// `runs/<name>`.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads for replication-level parallelism; defaults to the
    /// global thread pool.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    /// Checks ranges and validates every policy against a probe
    /// environment drawn for replication 0.
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidConfig("replications must be >= 1".into()));
        }
        if self.t_rounds < 2 {
            return Err(Error::InvalidConfig("T must be >= 2".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::InvalidConfig("at least one policy required".into()));
        }
        self.env.validate()?;
        let probe = self.env.realize(env_seed(self.master_seed, 0))?;
        for policy in &self.policies {
            policy.validate(&probe, self.t_rounds)?;
        }
        Ok(())
    }

    /// The resolved output directory.
    pub fn resolved_output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("runs").join(&self.name))
    }

    /// Loads a config (or the `config` field of a manifest) from JSON.
    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)?;
        if let Ok(manifest) = serde_json::from_str::<Manifest>(&raw) {
            return Ok(manifest.config);
        }
        Ok(serde_json::from_str(&raw)?)
    }
}

/// The ten built-in experiment names.
pub const PRESET_NAMES: [&str; 10] = [
    "fig4a",
    "fig4b",
    "fig4c",
    "fig4d",
    "fig4e",
    "fig4f",
    "thm1",
    "alg3_finite",
    "alg3_continuous",
    "lemma2",
];

/// Builds one of the named experiment configurations.
///
/// The six `fig4*` presets share the base unit-ball setting and vary one
/// knob each (individuals per round, label-map scale, feature dimension,
/// or noise); `thm1` isolates the pure predict-then-optimize regime with
/// no bandit cost, `lemma2` monitors confidence-ball coverage under the
/// theoretical radius schedule, and the two `alg3_*` presets exercise the
/// exploration variants on action-dependent labels.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    use crate::env::{ActionSetParams, LabelVariant};

    let base_env = |n: usize, m: usize, k_f: f64, sigma_label_sq: f64| EnvParams {
        m,
        d: 5,
        n,
        k_f,
        k_g: None,
        sigma_label_sq,
        sigma_bandit_sq: 1e-4,
        variant: LabelVariant::Base,
        actions: ActionSetParams::UnitBall,
        mu_zero: false,
    };
    let fig = |name: &str, env: EnvParams| ExperimentConfig {
        name: name.to_string(),
        env,
        policies: vec![
            PolicyConfig::new(PolicyKind::Proof),
            PolicyConfig::new(PolicyKind::VanillaOfu),
        ],
        t_rounds: 500,
        replications: 10,
        master_seed: 42,
        output_dir: None,
        workers: None,
    };

    let config = match name {
        "fig4a" => fig("fig4a", base_env(20, 20, 10.0, 0.1)),
        "fig4b" => fig("fig4b", base_env(40, 20, 10.0, 0.1)),
        "fig4c" => fig("fig4c", base_env(20, 20, 100.0, 0.1)),
        "fig4d" => fig("fig4d", base_env(500, 50, 10.0, 0.1)),
        "fig4e" => fig("fig4e", base_env(500, 50, 1.0, 0.1)),
        "fig4f" => fig("fig4f", base_env(500, 50, 10.0, 0.5)),
        "thm1" => {
            let mut env = base_env(4, 30, 1.0, 0.5);
            env.mu_zero = true;
            env.sigma_bandit_sq = 0.0;
            ExperimentConfig {
                name: "thm1".to_string(),
                env,
                policies: vec![PolicyConfig::new(PolicyKind::PtoOnly)],
                t_rounds: 500,
                replications: 10,
                master_seed: 42,
                output_dir: None,
                workers: None,
            }
        }
        "lemma2" => {
            let mut env = base_env(10, 10, 10.0, 0.1);
            env.d = 3;
            let mut proof = PolicyConfig::new(PolicyKind::Proof);
            proof.beta_mode = BetaMode::Theoretical;
            proof.gamma = 0.05;
            ExperimentConfig {
                name: "lemma2".to_string(),
                env,
                policies: vec![proof],
                t_rounds: 200,
                replications: 20,
                master_seed: 42,
                output_dir: None,
                workers: None,
            }
        }
        "alg3_finite" => {
            let env = EnvParams {
                m: 5,
                d: 4,
                n: 20,
                k_f: 10.0,
                k_g: None,
                sigma_label_sq: 0.1,
                sigma_bandit_sq: 1e-4,
                variant: LabelVariant::PerAction,
                actions: ActionSetParams::Finite { count: 4 },
                mu_zero: false,
            };
            let mut explore = PolicyConfig::new(PolicyKind::ProofExploreFinite);
            explore.explore_rounds = Some(171);
            ExperimentConfig {
                name: "alg3_finite".to_string(),
                env,
                policies: vec![explore],
                t_rounds: 400,
                replications: 10,
                master_seed: 42,
                output_dir: None,
                workers: None,
            }
        }
        "alg3_continuous" => {
            let env = EnvParams {
                m: 10,
                d: 3,
                n: 10,
                k_f: 10.0,
                k_g: None,
                sigma_label_sq: 0.1,
                sigma_bandit_sq: 1e-4,
                variant: LabelVariant::Continuous,
                actions: ActionSetParams::UnitBall,
                mu_zero: false,
            };
            ExperimentConfig {
                name: "alg3_continuous".to_string(),
                env,
                policies: vec![PolicyConfig::new(PolicyKind::ProofExploreContinuous)],
                t_rounds: 400,
                replications: 10,
                master_seed: 42,
                output_dir: None,
                workers: None,
            }
        }
        _ => {
            return Err(Error::UnknownPreset {
                name: name.to_string(),
                valid: PRESET_NAMES.join(", "),
            })
        }
    };
    Ok(config)
}

/// One failed replication, kept out of the aggregates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureNote {
    pub replication: usize,
    pub message: String,
}

/// Everything a finished experiment produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub aggregate: AggregateSeries,
    pub trace_paths: Vec<PathBuf>,
    pub aggregate_path: PathBuf,
    pub manifest_path: PathBuf,
    pub failures: Vec<FailureNote>,
    pub replications_completed: usize,
}

impl RunOutcome {
    /// Share of replications that failed.
    pub fn failed_fraction(&self) -> f64 {
        let total = self.replications_completed + self.failures.len();
        if total == 0 {
            return 0.0;
        }
        self.failures.len() as f64 / total as f64
    }
}

/// Status of one replication inside the manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestReplication {
    pub replication: usize,
    pub rep_seed: u64,
    pub env_seed: u64,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub env_checksum: Option<String>,
    pub wall_ms: u64,
    pub traces: Vec<String>,
}

/// Echo of the resolved run, sufficient to reproduce it exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub replications: Vec<ManifestReplication>,
    pub aggregate: String,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let reader = std::io::BufReader::new(File::open(path)?);
        Ok(serde_json::from_reader(reader)?)
    }
}

fn rep_seed(master_seed: u64, replication: usize) -> u64 {
    seed::derive(master_seed, &[tag::REPLICATION, replication as u64])
}

fn env_seed(master_seed: u64, replication: usize) -> u64 {
    seed::derive(rep_seed(master_seed, replication), &[tag::ENV])
}

struct RepOutput {
    runs: Vec<PolicyRun>,
    checksum: u64,
    wall_ms: u64,
}

fn run_replication(config: &ExperimentConfig, replication: usize) -> Result<RepOutput> {
    let start = Instant::now();
    let rep_seed = rep_seed(config.master_seed, replication);
    let spec = config.env.realize(env_seed(config.master_seed, replication))?;
    let mut runs = Vec::with_capacity(config.policies.len());
    for policy in &config.policies {
        runs.push(policy::run_policy(
            &spec,
            config.t_rounds,
            policy,
            replication,
            rep_seed,
        )?);
    }
    let checksum = runs[0].env_checksum;
    if runs.iter().any(|r| r.env_checksum != checksum) {
        return Err(Error::ChecksumMismatch);
    }
    Ok(RepOutput {
        runs,
        checksum,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// Runs every replication of the experiment and persists traces, the
/// aggregate, and a manifest into the output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let out_dir = config.resolved_output_dir();
    std::fs::create_dir_all(&out_dir)?;
    probe_writable(&out_dir)?;

    let reps: Vec<usize> = (0..config.replications).collect();
    let body = |&r: &usize| (r, run_replication(config, r));
    let mut results: Vec<(usize, Result<RepOutput>)> = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?
            .install(|| reps.par_iter().map(body).collect()),
        None => reps.par_iter().map(body).collect(),
    };
    results.sort_by_key(|(r, _)| *r);

    let mut rows: Vec<TraceRow> = Vec::new();
    let mut trace_paths = Vec::new();
    let mut manifest_reps = Vec::new();
    let mut failures = Vec::new();
    let mut completed = 0;
    for (r, result) in results {
        match result {
            Ok(output) => {
                let mut names = Vec::new();
                for run in &output.runs {
                    let file = format!("trace_{}_rep{r:03}.csv", run.policy);
                    let path = out_dir.join(&file);
                    trace::write_trace_csv(&path, run.policy, &run.traces)?;
                    rows.extend(run.traces.iter().map(|t| TraceRow::from_trace(run.policy, t)));
                    trace_paths.push(path);
                    names.push(file);
                }
                manifest_reps.push(ManifestReplication {
                    replication: r,
                    rep_seed: rep_seed(config.master_seed, r),
                    env_seed: env_seed(config.master_seed, r),
                    status: "ok".to_string(),
                    error: None,
                    env_checksum: Some(format!("{:016x}", output.checksum)),
                    wall_ms: output.wall_ms,
                    traces: names,
                });
                completed += 1;
            }
            Err(err) => {
                failures.push(FailureNote {
                    replication: r,
                    message: err.to_string(),
                });
                manifest_reps.push(ManifestReplication {
                    replication: r,
                    rep_seed: rep_seed(config.master_seed, r),
                    env_seed: env_seed(config.master_seed, r),
                    status: "failed".to_string(),
                    error: Some(err.to_string()),
                    env_checksum: None,
                    wall_ms: 0,
                    traces: Vec::new(),
                });
            }
        }
    }

    let aggregate = trace::aggregate(&rows, config.env.n)?;
    let aggregate_path = out_dir.join("aggregate.csv");
    trace::write_aggregate_csv(&aggregate_path, &aggregate)?;

    let manifest = Manifest {
        config: ExperimentConfig {
            output_dir: Some(out_dir.clone()),
            ..config.clone()
        },
        replications: manifest_reps,
        aggregate: "aggregate.csv".to_string(),
    };
    let manifest_path = out_dir.join("manifest.json");
    let mut writer = BufWriter::new(File::create(&manifest_path)?);
    serde_json::to_writer_pretty(&mut writer, &manifest)?;
    writer.write_all(b"\n")?;
    writer.flush()?;

    Ok(RunOutcome {
        aggregate,
        trace_paths,
        aggregate_path,
        manifest_path,
        failures,
        replications_completed: completed,
    })
}

fn probe_writable(dir: &Path) -> Result<()> {
    let probe = dir.join(".write_probe");
    File::create(&probe)
        .and_then(|mut f| f.write_all(b"ok"))
        .and_then(|_| std::fs::remove_file(&probe))?;
    Ok(())
}
