//! The continuous action-dependent setting: labels respond linearly to
//! the chosen intervention, actions range over the unit ball.
//!
//! Exploration draws actions uniformly from the ball to make the joint
//! regression identifiable; exploitation then minimizes the estimated
//! quadratic cost with an optimistic bandit correction.
//!
//! ```sh
//! cargo run --example continuous_actions
//! ```

use banditdo::harness::preset;
use banditdo::policy::run_policy;

fn main() -> banditdo::Result<()> {
    let config = preset("alg3_continuous")?;
    let spec = config.env.realize(33)?;
    let run = run_policy(&spec, config.t_rounds, &config.policies[0], 0, 27)?;

    let switch = run
        .traces
        .iter()
        .position(|r| !r.pred_error.is_nan())
        .unwrap()
        + 1;
    println!("exploration ends after round {}", switch - 1);

    println!("\n   t  avg regret (cumulative)");
    for t in [1, switch - 1, switch, switch + 10, 300, 400] {
        println!("{t:>4}  {:>12.5}", run.traces[t - 1].avg_regret_cum);
    }

    let explore_mean = run.traces[..switch - 1]
        .iter()
        .map(|r| r.total_regret)
        .sum::<f64>()
        / (switch - 1) as f64;
    let last: Vec<f64> = run.traces[run.traces.len() - 50..]
        .iter()
        .map(|r| r.total_regret)
        .collect();
    let exploit_mean = last.iter().sum::<f64>() / last.len() as f64;
    println!("\nmean per-round regret, exploration phase: {explore_mean:>8.4}");
    println!("mean per-round regret, last 50 rounds:    {exploit_mean:>8.4}");
    Ok(())
}
