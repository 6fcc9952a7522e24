//! Tracks how fast the label predictions improve as rounds accumulate.
//!
//! Each round adds `n` fresh (feature, label) pairs to the least-squares
//! fit, so the prediction error should decay like `t^(-1/2)`. The example
//! fits a log-log slope over one long trajectory to check.
//!
//! ```sh
//! cargo run --example prediction_error_decay
//! ```

use banditdo::harness::preset;
use banditdo::policy::run_policy;

fn main() -> banditdo::Result<()> {
    let config = preset("fig4a")?;
    let spec = config.env.realize(2)?;
    let run = run_policy(&spec, 500, &config.policies[0], 0, 4)?;

    println!("   t  prediction error");
    for t in [1, 2, 5, 10, 20, 50, 100, 200, 500] {
        println!("{t:>4}  {:>16.5}", run.traces[t - 1].pred_error);
    }

    let points: Vec<(f64, f64)> = run
        .traces
        .iter()
        .filter(|r| r.t >= 10)
        .map(|r| ((r.t as f64).ln(), r.pred_error.ln()))
        .collect();
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    println!("\nlog-log slope over t >= 10: {:.3} (t^(-1/2) predicts -0.5)", num / den);
    Ok(())
}
