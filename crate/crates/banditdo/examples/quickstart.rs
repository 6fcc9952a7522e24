//! Smallest end-to-end run: shrink a built-in preset, execute it, and
//! read the aggregate regret curves back.
//!
//! ```sh
//! cargo run --example quickstart
//! ```

use banditdo::harness::{preset, run_experiment};
use banditdo::policy::PolicyKind;

fn main() -> banditdo::Result<()> {
    let mut config = preset("fig4a")?;
    config.t_rounds = 60;
    config.replications = 3;
    config.output_dir = Some(std::env::temp_dir().join("banditdo-examples/quickstart"));

    let outcome = run_experiment(&config)?;
    println!(
        "ran {} ({} replications, horizon {})",
        config.name, config.replications, config.t_rounds
    );
    println!("traces:    {} files", outcome.trace_paths.len());
    println!("aggregate: {}", outcome.aggregate_path.display());
    println!("manifest:  {}", outcome.manifest_path.display());

    println!("\n   t  proof avg regret    ofu avg regret");
    for t in [1, 10, 30, 60] {
        let at = |kind: PolicyKind| {
            outcome
                .aggregate
                .policy(kind)
                .iter()
                .find(|p| p.t == t)
                .map(|p| p.avg_regret_mean)
                .unwrap()
        };
        println!(
            "{t:>4}  {:>16.4}  {:>16.4}",
            at(PolicyKind::Proof),
            at(PolicyKind::VanillaOfu)
        );
    }
    Ok(())
}
