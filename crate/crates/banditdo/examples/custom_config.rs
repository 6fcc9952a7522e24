//! Builds an experiment configuration in code, round-trips it through
//! JSON, runs it, and renders the regret chart.
//!
//! The JSON written here is exactly what `banditdo run --config <file>`
//! accepts, and the manifest the run leaves behind reproduces it.
//!
//! ```sh
//! cargo run --example custom_config
//! ```

use banditdo::env::{ActionSetParams, EnvParams, LabelVariant};
use banditdo::harness::{run_experiment, ExperimentConfig};
use banditdo::plot;
use banditdo::policy::{PolicyConfig, PolicyKind};

fn main() -> banditdo::Result<()> {
    let dir = std::env::temp_dir().join("banditdo-examples/custom_config");
    std::fs::create_dir_all(&dir)?;

    let config = ExperimentConfig {
        name: "custom".to_string(),
        env: EnvParams {
            m: 12,
            d: 4,
            n: 8,
            k_f: 10.0,
            k_g: None,
            sigma_label_sq: 0.2,
            sigma_bandit_sq: 1e-3,
            variant: LabelVariant::Base,
            actions: ActionSetParams::UnitBall,
            mu_zero: false,
        },
        policies: vec![
            PolicyConfig::new(PolicyKind::Proof),
            PolicyConfig::new(PolicyKind::PtoOnly),
            PolicyConfig::new(PolicyKind::VanillaOfu),
        ],
        t_rounds: 120,
        replications: 5,
        master_seed: 99,
        output_dir: Some(dir.join("results")),
        workers: None,
    };

    let config_path = dir.join("custom.json");
    std::fs::write(&config_path, serde_json::to_string_pretty(&config)?)?;
    let reloaded = ExperimentConfig::load(&config_path)?;
    println!("wrote and reloaded {}", config_path.display());

    let outcome = run_experiment(&reloaded)?;
    println!("aggregate: {}", outcome.aggregate_path.display());

    let image = dir.join("regret.svg");
    plot::plot_file(&outcome.aggregate_path, &image)?;
    println!("chart:     {}", image.display());

    for kind in [PolicyKind::Proof, PolicyKind::PtoOnly, PolicyKind::VanillaOfu] {
        let last = outcome.aggregate.policy(kind).last().copied().cloned();
        if let Some(p) = last {
            println!(
                "{:>12}: final avg regret {:.4} +- {:.4}",
                kind.to_string(),
                p.avg_regret_mean,
                p.avg_regret_std
            );
        }
    }
    Ok(())
}
