//! Confidence-ball bookkeeping under the theoretical radius schedule.
//!
//! Each individual maintains an ellipsoid that should contain the true
//! bandit cost vector with high probability. The example prints the
//! radius schedule and then measures, across independent replications,
//! how often the truth stayed inside every ball at every round.
//!
//! ```sh
//! cargo run --example confidence_balls
//! ```

use banditdo::harness::preset;
use banditdo::ofu::beta_schedule;
use banditdo::policy::run_policy;

fn main() -> banditdo::Result<()> {
    let config = preset("lemma2")?;
    let (n, d) = (config.env.n, config.env.d);
    let gamma = config.policies[0].gamma;

    println!("theoretical radius beta(t) with n = {n}, d = {d}, gamma = {gamma}:");
    for t in [1, 2, 10, 50, 200] {
        println!("  t = {t:>3}: beta = {:>12.1}", beta_schedule(t, n, d, gamma)?);
    }

    let replications = 10u64;
    let mut fully_contained = 0;
    for rep in 0..replications {
        let spec = config.env.realize(1_000 + rep)?;
        let run = run_policy(&spec, config.t_rounds, &config.policies[0], 0, 2_000 + rep)?;
        if run.traces.iter().all(|r| r.ball_contains_mu) {
            fully_contained += 1;
        }
    }
    println!(
        "\nmu inside every ball at every round: {fully_contained}/{replications} replications"
    );
    Ok(())
}
