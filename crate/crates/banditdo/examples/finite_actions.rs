//! Explore-then-exploit on a finite action set whose label law depends on
//! the chosen action.
//!
//! When each action has its own label map, nothing is learned about an
//! action until it is tried, so the policy spends an initial phase
//! cycling through the actions round-robin and only then optimizes. The
//! example prints the exploration coverage and the per-phase regret.
//!
//! ```sh
//! cargo run --example finite_actions
//! ```

use banditdo::harness::preset;
use banditdo::policy::run_policy;

fn main() -> banditdo::Result<()> {
    let config = preset("alg3_finite")?;
    let policy = &config.policies[0];
    let explore_rounds = policy.explore_rounds.unwrap();
    let spec = config.env.realize(21)?;
    let run = run_policy(&spec, config.t_rounds, policy, 0, 13)?;

    let counts = run.explore_counts.as_ref().unwrap();
    println!(
        "exploration: {} rounds x {} individuals over {} actions",
        explore_rounds, config.env.n, counts.len()
    );
    println!("coverage per action: {counts:?}");

    let phase_mean = |lo: usize, hi: usize| {
        let rows: Vec<f64> = run
            .traces
            .iter()
            .filter(|r| r.t >= lo && r.t <= hi)
            .map(|r| r.total_regret)
            .collect();
        rows.iter().sum::<f64>() / rows.len() as f64
    };
    let explore = phase_mean(1, explore_rounds);
    let exploit = phase_mean(explore_rounds + 1, config.t_rounds);
    println!("\nmean per-round regret while exploring:  {explore:>9.4}");
    println!("mean per-round regret while exploiting: {exploit:>9.4}");
    println!("ratio: {:.4}", exploit / explore);
    Ok(())
}
