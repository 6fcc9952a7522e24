//! Trace and aggregate persistence.
//!
//! One trace CSV holds the per-round rows of a single (policy,
//! replication) pair; an aggregate CSV holds, per policy and round, the
//! mean and sample standard deviation across replications of the average
//! regret, its two cumulative components, and the prediction error. Both
//! formats round-trip losslessly.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::{PolicyKind, RoundTrace};

/// One trace CSV row; the schema is
/// `replication,t,policy,total_regret,opt_regret,bandit_regret,avg_regret_cum,pred_error,ball_contains_mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub replication: usize,
    pub t: usize,
    pub policy: PolicyKind,
    pub total_regret: f64,
    pub opt_regret: f64,
    pub bandit_regret: f64,
    pub avg_regret_cum: f64,
    pub pred_error: f64,
    pub ball_contains_mu: bool,
}

impl TraceRow {
    pub fn from_trace(policy: PolicyKind, trace: &RoundTrace) -> Self {
        TraceRow {
            replication: trace.replication,
            t: trace.t,
            policy,
            total_regret: trace.total_regret,
            opt_regret: trace.opt_regret,
            bandit_regret: trace.bandit_regret,
            avg_regret_cum: trace.avg_regret_cum,
            pred_error: trace.pred_error,
            ball_contains_mu: trace.ball_contains_mu,
        }
    }
}

/// Writes one (policy, replication) trajectory.
pub fn write_trace_csv(path: &Path, policy: PolicyKind, traces: &[RoundTrace]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for trace in traces {
        writer.serialize(TraceRow::from_trace(policy, trace))?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads any trace CSV written by [`write_trace_csv`].
pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let mut reader = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// Mean and standard deviation of one policy at one round, across
/// replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatePoint {
    pub policy: PolicyKind,
    pub t: usize,
    /// Cumulative total regret per round per individual.
    pub avg_regret_mean: f64,
    pub avg_regret_std: f64,
    /// Cumulative optimization component, same normalization.
    pub opt_regret_mean: f64,
    pub opt_regret_std: f64,
    /// Cumulative bandit component, same normalization.
    pub bandit_regret_mean: f64,
    pub bandit_regret_std: f64,
    /// Per-round prediction error; NaN rounds are skipped.
    pub pred_error_mean: f64,
    pub pred_error_std: f64,
    /// Replications aggregated into this point.
    pub replications: usize,
}

/// All aggregate points of one experiment, ordered by policy appearance
/// and round.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AggregateSeries {
    pub points: Vec<AggregatePoint>,
}

impl AggregateSeries {
    /// The points of one policy, in round order.
    pub fn policy(&self, kind: PolicyKind) -> Vec<&AggregatePoint> {
        self.points.iter().filter(|p| p.policy == kind).collect()
    }

    /// The distinct policies, in file order.
    pub fn policies(&self) -> Vec<PolicyKind> {
        let mut out = Vec::new();
        for p in &self.points {
            if !out.contains(&p.policy) {
                out.push(p.policy);
            }
        }
        out
    }
}

/// Aggregates raw trace rows across replications.
///
/// `n` is the per-round individual count, needed to put the cumulative
/// component series on the same per-round-per-individual scale as
/// `avg_regret_cum`. Replications of a policy must cover identical round
/// grids (failed replications are dropped upstream as whole units).
pub fn aggregate(rows: &[TraceRow], n: usize) -> Result<AggregateSeries> {
    if n == 0 {
        return Err(Error::InvalidConfig("n must be positive".into()));
    }
    let mut policies: Vec<PolicyKind> = Vec::new();
    for row in rows {
        if !policies.contains(&row.policy) {
            policies.push(row.policy);
        }
    }

    let mut points = Vec::new();
    for policy in policies {
        let mut reps: Vec<usize> = Vec::new();
        for row in rows.iter().filter(|r| r.policy == policy) {
            if !reps.contains(&row.replication) {
                reps.push(row.replication);
            }
        }
        reps.sort_unstable();

        // Per replication: rows sorted by round, then running sums of the
        // two components.
        let mut series: Vec<Vec<(usize, f64, f64, f64, f64)>> = Vec::new();
        for &rep in &reps {
            let mut rep_rows: Vec<&TraceRow> = rows
                .iter()
                .filter(|r| r.policy == policy && r.replication == rep)
                .collect();
            rep_rows.sort_by_key(|r| r.t);
            let mut cum_opt = 0.0;
            let mut cum_bandit = 0.0;
            let mut out = Vec::with_capacity(rep_rows.len());
            for row in rep_rows {
                cum_opt += row.opt_regret;
                cum_bandit += row.bandit_regret;
                let scale = (row.t * n) as f64;
                out.push((
                    row.t,
                    row.avg_regret_cum,
                    cum_opt / scale,
                    cum_bandit / scale,
                    row.pred_error,
                ));
            }
            series.push(out);
        }
        let grid: Vec<usize> = series[0].iter().map(|p| p.0).collect();
        for s in &series {
            if s.iter().map(|p| p.0).ne(grid.iter().copied()) {
                return Err(Error::InvalidConfig(format!(
                    "replications of policy {policy} cover different rounds"
                )));
            }
        }

        for (idx, &t) in grid.iter().enumerate() {
            let col = |pick: fn(&(usize, f64, f64, f64, f64)) -> f64| -> Vec<f64> {
                series.iter().map(|s| pick(&s[idx])).collect()
            };
            let (avg_mean, avg_std) = mean_std(&col(|p| p.1));
            let (opt_mean, opt_std) = mean_std(&col(|p| p.2));
            let (bandit_mean, bandit_std) = mean_std(&col(|p| p.3));
            let pred: Vec<f64> = col(|p| p.4).into_iter().filter(|v| !v.is_nan()).collect();
            let (pred_mean, pred_std) = if pred.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                mean_std(&pred)
            };
            points.push(AggregatePoint {
                policy,
                t,
                avg_regret_mean: avg_mean,
                avg_regret_std: avg_std,
                opt_regret_mean: opt_mean,
                opt_regret_std: opt_std,
                bandit_regret_mean: bandit_mean,
                bandit_regret_std: bandit_std,
                pred_error_mean: pred_mean,
                pred_error_std: pred_std,
                replications: series.len(),
            });
        }
    }
    Ok(AggregateSeries { points })
}

/// Mean and sample standard deviation; a single value has deviation 0.
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

const AGGREGATE_COLUMNS: [&str; 11] = [
    "policy",
    "t",
    "avg_regret_mean",
    "avg_regret_std",
    "opt_regret_mean",
    "opt_regret_std",
    "bandit_regret_mean",
    "bandit_regret_std",
    "pred_error_mean",
    "pred_error_std",
    "replications",
];

/// Writes the aggregate CSV.
pub fn write_aggregate_csv(path: &Path, series: &AggregateSeries) -> Result<()> {
    let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for point in &series.points {
        writer.serialize(point)?;
    }
    if series.points.is_empty() {
        writer.write_record(AGGREGATE_COLUMNS)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads an aggregate CSV, checking the schema before parsing.
pub fn read_aggregate_csv(path: &Path) -> Result<AggregateSeries> {
    let mut reader = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let headers = reader.headers()?.clone();
    let missing: Vec<&str> = AGGREGATE_COLUMNS
        .iter()
        .filter(|c| !headers.iter().any(|h| h == **c))
        .copied()
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingColumns(missing.join(", ")));
    }
    let mut points = Vec::new();
    for point in reader.deserialize() {
        points.push(point?);
    }
    if points.is_empty() {
        return Err(Error::NoDataRows);
    }
    Ok(AggregateSeries { points })
}
