//! The four decision policies and their per-round regret accounting.
//!
//! Every policy runs the same outer loop: receive an initial dataset under
//! a fixed default action, then per round fit the learner, choose one
//! action per individual, observe labels and the realized total cost, and
//! update state. They differ in what the decision uses:
//!
//! * `proof`: predicted label plus the optimistic bandit term.
//! * `proof_explore_finite` / `proof_explore_continuous`: a uniform
//!   exploration phase, then action-aware predictions plus the optimistic
//!   term.
//! * `vanilla_ofu`: the bandit term alone, ignoring features and labels.
//! * `pto_only`: the predicted label alone, ignoring the bandit cost.
//!
//! Regret is pseudo-regret against the ground-truth parameters, split
//! exactly into an optimization and a bandit component.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::env::{ActionSpace, EnvSpec, EnvStreams};
use crate::error::{Error, Result};
use crate::learner::GramCache;
use crate::ofu::{self, ConfidenceBall, EllipsoidState};
use crate::solver::{self, OptimisticObjective, SolverConfig};

/// Which policy drives the decisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Proof,
    ProofExploreFinite,
    ProofExploreContinuous,
    VanillaOfu,
    PtoOnly,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] = [
        PolicyKind::Proof,
        PolicyKind::ProofExploreFinite,
        PolicyKind::ProofExploreContinuous,
        PolicyKind::VanillaOfu,
        PolicyKind::PtoOnly,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PolicyKind::Proof => "proof",
            PolicyKind::ProofExploreFinite => "proof_explore_finite",
            PolicyKind::ProofExploreContinuous => "proof_explore_continuous",
            PolicyKind::VanillaOfu => "vanilla_ofu",
            PolicyKind::PtoOnly => "pto_only",
        }
    }

    /// Stream key separating policy-dependent randomness within a
    /// replication.
    pub(crate) fn tag(&self) -> u64 {
        match self {
            PolicyKind::Proof => 1,
            PolicyKind::ProofExploreFinite => 2,
            PolicyKind::ProofExploreContinuous => 3,
            PolicyKind::VanillaOfu => 4,
            PolicyKind::PtoOnly => 5,
        }
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown policy {s:?}")))
    }
}

/// Confidence-radius schedule: the theoretical formula or a fixed value
/// (the practical override used by the figure presets).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaMode {
    Theoretical,
    Constant(f64),
}

fn default_gamma() -> f64 {
    0.05
}

fn default_beta_mode() -> BetaMode {
    BetaMode::Constant(1.0)
}

fn default_restarts() -> usize {
    8
}

/// Full configuration of one policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    /// Confidence parameter of the theoretical radius schedule.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_beta_mode")]
    pub beta_mode: BetaMode,
    /// Exploration rounds of the explore variants; derived from the
    /// horizon when absent.
    #[serde(default)]
    pub explore_rounds: Option<usize>,
    /// Share one bandit state across individuals instead of one each.
    #[serde(default)]
    pub pool_bandit_state: bool,
    /// Random restarts of the unit-ball solver.
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

impl PolicyConfig {
    pub fn new(kind: PolicyKind) -> Self {
        PolicyConfig {
            kind,
            gamma: default_gamma(),
            beta_mode: default_beta_mode(),
            explore_rounds: None,
            pool_bandit_state: false,
            restarts: default_restarts(),
        }
    }

    /// Checks the config against the environment and the horizon.
    pub fn validate(&self, spec: &EnvSpec, t_rounds: usize) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "gamma = {} outside (0, 1)",
                self.gamma
            )));
        }
        if let BetaMode::Constant(b) = self.beta_mode {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(Error::InvalidConfig(format!("beta constant {b} invalid")));
            }
        }
        if t_rounds == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        if let Some(r) = self.explore_rounds {
            if !matches!(
                self.kind,
                PolicyKind::ProofExploreFinite | PolicyKind::ProofExploreContinuous
            ) {
                return Err(Error::InvalidConfig(
                    "explore_rounds only applies to the explore variants".into(),
                ));
            }
            if r == 0 || r >= t_rounds {
                return Err(Error::InvalidConfig(format!(
                    "explore_rounds = {r} must lie in [1, T)"
                )));
            }
        }
        match self.kind {
            PolicyKind::Proof => {
                if spec.per_action_f.is_some() || spec.g.is_some() {
                    return Err(Error::InvalidConfig(
                        "proof requires labels independent of the action".into(),
                    ));
                }
            }
            PolicyKind::ProofExploreFinite => {
                if spec.per_action_f.is_none() {
                    return Err(Error::InvalidConfig(
                        "proof_explore_finite requires per-action label maps".into(),
                    ));
                }
            }
            PolicyKind::ProofExploreContinuous => {
                if spec.g.is_none() || spec.action_space.finite_actions().is_some() {
                    return Err(Error::InvalidConfig(
                        "proof_explore_continuous requires an action effect G over the unit ball"
                            .into(),
                    ));
                }
            }
            PolicyKind::VanillaOfu | PolicyKind::PtoOnly => {}
        }
        Ok(())
    }

    fn beta(&self, spec: &EnvSpec, t: usize) -> Result<f64> {
        match self.beta_mode {
            BetaMode::Theoretical => ofu::beta_schedule(t, spec.n, spec.d, self.gamma),
            BetaMode::Constant(b) => Ok(b),
        }
    }
}

/// One row of the per-round accounting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub t: usize,
    pub replication: usize,
    /// Sum over individuals of the ground-truth cost gap to the per-x
    /// optimum.
    pub total_regret: f64,
    /// Label-cost share of the gap.
    pub opt_regret: f64,
    /// Bandit-cost share of the gap.
    pub bandit_regret: f64,
    /// Mean distance between the expected label and the prediction; NaN
    /// for policies or phases without predictions.
    pub pred_error: f64,
    /// Whether the true bandit vector lay inside every individual's
    /// decision-time confidence ball this round.
    pub ball_contains_mu: bool,
    /// Cumulative total regret per round per individual.
    pub avg_regret_cum: f64,
}

/// The full trajectory of one (policy, replication) pair.
#[derive(Debug, Clone)]
pub struct PolicyRun {
    pub policy: PolicyKind,
    pub traces: Vec<RoundTrace>,
    /// Checksum over the policy-independent environment draws, used by the
    /// harness to verify that paired policies saw identical streams.
    pub env_checksum: u64,
    /// Exploration-phase action counts of the finite explore variant.
    pub explore_counts: Option<Vec<usize>>,
}

/// The regret components of one round.
#[derive(Debug, Clone, Copy)]
pub struct RegretParts {
    pub total: f64,
    pub opt: f64,
    pub bandit: f64,
    pub pred_error: f64,
}

/// Computes the round's regret components against the exact per-x optima.
///
/// `opt` compares expected label costs at the chosen and optimal actions,
/// `bandit` the true bandit costs; `total` is their sum, so the
/// decomposition identity holds exactly. `pred_error` averages
/// `norm(E[c | x, w] - c_hat)` when predictions are given and is NaN
/// otherwise.
pub fn regret_accounting(
    spec: &EnvSpec,
    xs: &[DVector<f64>],
    ws: &[DVector<f64>],
    learner_preds: Option<&[DVector<f64>]>,
) -> Result<RegretParts> {
    if xs.len() != ws.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} features for {} actions",
            xs.len(),
            ws.len()
        )));
    }
    if let Some(preds) = learner_preds {
        if preds.len() != xs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} predictions for {} individuals",
                preds.len(),
                xs.len()
            )));
        }
    }
    let mut opt = 0.0;
    let mut bandit = 0.0;
    let mut err_sum = 0.0;
    for i in 0..xs.len() {
        let star = spec.optimal_action(&xs[i])?;
        let mean_chosen = spec.label_mean(&xs[i], &ws[i])?;
        let mean_star = spec.label_mean(&xs[i], &star.w)?;
        opt += mean_chosen.dot(&ws[i]) - mean_star.dot(&star.w);
        bandit += spec.mu.dot(&ws[i]) - spec.mu.dot(&star.w);
        if let Some(preds) = learner_preds {
            err_sum += (mean_chosen - &preds[i]).norm();
        }
    }
    Ok(RegretParts {
        total: opt + bandit,
        opt,
        bandit,
        pred_error: learner_preds.map_or(f64::NAN, |_| err_sum / xs.len() as f64),
    })
}

/// Runs the policy named by `cfg.kind` for `t_rounds` rounds.
pub fn run_policy(
    spec: &EnvSpec,
    t_rounds: usize,
    cfg: &PolicyConfig,
    replication: usize,
    rep_seed: u64,
) -> Result<PolicyRun> {
    match cfg.kind {
        PolicyKind::Proof => run_proof(spec, t_rounds, cfg, replication, rep_seed),
        PolicyKind::ProofExploreFinite | PolicyKind::ProofExploreContinuous => {
            run_proof_explore(spec, t_rounds, cfg, replication, rep_seed)
        }
        PolicyKind::VanillaOfu => run_vanilla_ofu(spec, t_rounds, cfg, replication, rep_seed),
        PolicyKind::PtoOnly => run_pto_only(spec, t_rounds, cfg, replication, rep_seed),
    }
}

/// Predict-then-optimize with the optimistic bandit term.
pub fn run_proof(
    spec: &EnvSpec,
    t_rounds: usize,
    cfg: &PolicyConfig,
    replication: usize,
    rep_seed: u64,
) -> Result<PolicyRun> {
    ensure_kind(cfg, PolicyKind::Proof)?;
    cfg.validate(spec, t_rounds)?;
    let mut streams = EnvStreams::new(rep_seed, cfg.kind.tag(), spec);
    let spanner = ofu::barycentric_spanner(&spec.action_space)?;
    let mut gram = GramCache::new(spec.m, spec.d);
    let (xs0, cs0, _) = initial_round(spec, &mut streams, &spanner[0])?;
    for (x, c) in xs0.iter().zip(&cs0) {
        gram.push(x, c);
    }
    let mut bank = BanditBank::new(&spanner, spec.n, cfg.pool_bandit_state);
    let mut ledger = TraceBuilder::new(replication, spec.n, t_rounds);

    for t in 1..=t_rounds {
        let model = gram.solve(gram.default_ridge())?;
        let xs = streams.round_features(spec, t);
        let beta = cfg.beta(spec, t)?;
        let mut ws = Vec::with_capacity(spec.n);
        let mut preds = Vec::with_capacity(spec.n);
        let mut all_contain = true;
        for (i, x) in xs.iter().enumerate() {
            let c_hat = model.predict(x)?;
            ensure_finite_vec(&c_hat, "label prediction", t)?;
            let ball = bank.state(i).ball(beta);
            all_contain &= ball.contains(&spec.mu);
            let obj = OptimisticObjective {
                c_hat: c_hat.clone(),
                ball,
            };
            let r = match &spec.action_space {
                ActionSpace::UnitBall { .. } => {
                    solver::solve_unit_ball(&obj)
                }
                ActionSpace::Finite { actions } => solver::solve_finite(&obj, actions, None),
            };
            ws.push(r.w);
            preds.push(c_hat);
        }
        let (cs, us) = observe_round(spec, &mut streams, t, &xs, &ws)?;
        for i in 0..spec.n {
            let u_b = us[i] - cs[i].dot(&ws[i]);
            bank.update(i, &ws[i], u_b);
        }
        bank.ensure_finite(t)?;
        for (x, c) in xs.iter().zip(&cs) {
            gram.push(x, c);
        }
        let parts = regret_accounting(spec, &xs, &ws, Some(&preds))?;
        ledger.push(t, parts, all_contain)?;
    }
    Ok(PolicyRun {
        policy: cfg.kind,
        traces: ledger.traces,
        env_checksum: streams.checksum(),
        explore_counts: None,
    })
}

/// Uniform exploration followed by action-aware optimistic exploitation.
pub fn run_proof_explore(
    spec: &EnvSpec,
    t_rounds: usize,
    cfg: &PolicyConfig,
    replication: usize,
    rep_seed: u64,
) -> Result<PolicyRun> {
    if !matches!(
        cfg.kind,
        PolicyKind::ProofExploreFinite | PolicyKind::ProofExploreContinuous
    ) {
        return Err(Error::InvalidConfig(format!(
            "run_proof_explore cannot run policy {}",
            cfg.kind
        )));
    }
    cfg.validate(spec, t_rounds)?;
    let finite = cfg.kind == PolicyKind::ProofExploreFinite;
    let t_explore = match cfg.explore_rounds {
        Some(r) => r,
        None if finite => explore_rounds_finite(
            t_rounds,
            spec.d,
            spec.action_space.finite_actions().map_or(0, <[_]>::len),
        ),
        None => explore_rounds_continuous(t_rounds, spec.m, spec.d),
    };
    if t_explore >= t_rounds {
        return Err(Error::InvalidConfig(format!(
            "derived explore_rounds = {t_explore} reaches the horizon {t_rounds}"
        )));
    }
    if finite {
        let n_actions = spec.action_space.finite_actions().unwrap().len();
        if t_explore * spec.n < n_actions {
            return Err(Error::UnexploredAction);
        }
    }

    let mut streams = EnvStreams::new(rep_seed, cfg.kind.tag(), spec);
    let spanner = ofu::barycentric_spanner(&spec.action_space)?;
    let w0 = spanner[0].clone();
    let n_actions = spec.action_space.finite_actions().map_or(0, <[_]>::len);
    let mut action_grams: Vec<GramCache> = (0..n_actions)
        .map(|_| GramCache::new(spec.m, spec.d))
        .collect();
    let mut joint_gram = GramCache::new(spec.m + spec.d, spec.d);
    let mut stacked = DVector::zeros(spec.m + spec.d);

    let (xs0, cs0, ws0) = initial_round(spec, &mut streams, &w0)?;
    for ((x, c), w) in xs0.iter().zip(&cs0).zip(&ws0) {
        if finite {
            let k = spec.action_space.action_index(w).ok_or(Error::UnknownAction)?;
            action_grams[k].push(x, c);
        } else {
            stack_into(&mut stacked, x, w);
            joint_gram.push(&stacked, c);
        }
    }

    let mut bank = BanditBank::new(&spanner, spec.n, cfg.pool_bandit_state);
    let mut ledger = TraceBuilder::new(replication, spec.n, t_rounds);
    let mut explore_counts = vec![0usize; n_actions];

    for t in 1..=t_rounds {
        let xs = streams.round_features(spec, t);
        let beta = cfg.beta(spec, t)?;
        let exploring = t <= t_explore;
        let mut ws = Vec::with_capacity(spec.n);
        let mut preds: Vec<DVector<f64>> = Vec::with_capacity(spec.n);
        let mut all_contain = true;

        if exploring {
            let mut explore_rng = streams.explore_rng(t);
            for i in 0..spec.n {
                all_contain &= bank.state(i).ball(beta).contains(&spec.mu);
                if finite {
                    let actions = spec.action_space.finite_actions().unwrap();
                    let k = explore_action_index(spec.n, t - 1, i, actions.len());
                    explore_counts[k] += 1;
                    ws.push(actions[k].clone());
                } else {
                    ws.push(uniform_in_ball(spec.d, &mut explore_rng));
                }
            }
        } else if finite {
            let actions = spec.action_space.finite_actions().unwrap();
            let models = action_grams
                .iter()
                .map(|g| {
                    if g.is_empty() {
                        return Err(Error::UnexploredAction);
                    }
                    g.solve(g.default_ridge())
                })
                .collect::<Result<Vec<_>>>()?;
            for (i, x) in xs.iter().enumerate() {
                let per_action: Vec<DVector<f64>> = models
                    .iter()
                    .map(|m| m.predict(x))
                    .collect::<Result<_>>()?;
                for p in &per_action {
                    ensure_finite_vec(p, "label prediction", t)?;
                }
                let ball = bank.state(i).ball(beta);
                all_contain &= ball.contains(&spec.mu);
                let obj = OptimisticObjective {
                    c_hat: DVector::zeros(spec.d),
                    ball,
                };
                let r = solver::solve_finite(&obj, actions, Some(&per_action));
                let k = spec
                    .action_space
                    .action_index(&r.w)
                    .ok_or(Error::UnknownAction)?;
                preds.push(per_action[k].clone());
                ws.push(r.w);
            }
        } else {
            let raw = joint_gram.solve(joint_gram.default_ridge())?;
            let f_hat: DMatrix<f64> = raw.f_hat.columns(0, spec.m).into();
            let g_hat: DMatrix<f64> = raw.f_hat.columns(spec.m, spec.d).into();
            for (i, x) in xs.iter().enumerate() {
                let c_lin = &f_hat * x;
                ensure_finite_vec(&c_lin, "label prediction", t)?;
                let ball = bank.state(i).ball(beta);
                all_contain &= ball.contains(&spec.mu);
                let r = solver::solve_quadratic_optimistic(
                    &c_lin,
                    &g_hat,
                    &ball,
                    &solver_cfg(cfg, streams.solver_seed(t, i)),
                );
                preds.push(&c_lin + &g_hat * &r.w);
                ws.push(r.w);
            }
        }

        let (cs, us) = observe_round(spec, &mut streams, t, &xs, &ws)?;
        for i in 0..spec.n {
            let u_b = us[i] - cs[i].dot(&ws[i]);
            bank.update(i, &ws[i], u_b);
        }
        bank.ensure_finite(t)?;
        for i in 0..spec.n {
            if finite {
                let k = spec
                    .action_space
                    .action_index(&ws[i])
                    .ok_or(Error::UnknownAction)?;
                action_grams[k].push(&xs[i], &cs[i]);
            } else {
                stack_into(&mut stacked, &xs[i], &ws[i]);
                joint_gram.push(&stacked, &cs[i]);
            }
        }
        let parts = regret_accounting(
            spec,
            &xs,
            &ws,
            if exploring { None } else { Some(&preds) },
        )?;
        ledger.push(t, parts, all_contain)?;
    }
    Ok(PolicyRun {
        policy: cfg.kind,
        traces: ledger.traces,
        env_checksum: streams.checksum(),
        explore_counts: finite.then_some(explore_counts),
    })
}

/// Linear-bandit baseline on the total cost, blind to features and labels.
pub fn run_vanilla_ofu(
    spec: &EnvSpec,
    t_rounds: usize,
    cfg: &PolicyConfig,
    replication: usize,
    rep_seed: u64,
) -> Result<PolicyRun> {
    ensure_kind(cfg, PolicyKind::VanillaOfu)?;
    cfg.validate(spec, t_rounds)?;
    let mut streams = EnvStreams::new(rep_seed, cfg.kind.tag(), spec);
    let spanner = ofu::barycentric_spanner(&spec.action_space)?;
    initial_round(spec, &mut streams, &spanner[0])?;
    let mut bank = BanditBank::new(&spanner, spec.n, cfg.pool_bandit_state);
    let mut ledger = TraceBuilder::new(replication, spec.n, t_rounds);
    let zero = DVector::zeros(spec.d);

    for t in 1..=t_rounds {
        let xs = streams.round_features(spec, t);
        let beta = cfg.beta(spec, t)?;
        let mut ws = Vec::with_capacity(spec.n);
        let mut all_contain = true;
        for i in 0..spec.n {
            let ball = bank.state(i).ball(beta);
            all_contain &= ball.contains(&spec.mu);
            let obj = OptimisticObjective {
                c_hat: zero.clone(),
                ball,
            };
            let r = match &spec.action_space {
                ActionSpace::UnitBall { .. } => {
                    solver::solve_unit_ball(&obj)
                }
                ActionSpace::Finite { actions } => solver::solve_finite(&obj, actions, None),
            };
            ws.push(r.w);
        }
        let (_, us) = observe_round(spec, &mut streams, t, &xs, &ws)?;
        for i in 0..spec.n {
            bank.update(i, &ws[i], us[i]);
        }
        bank.ensure_finite(t)?;
        let parts = regret_accounting(spec, &xs, &ws, None)?;
        ledger.push(t, parts, all_contain)?;
    }
    Ok(PolicyRun {
        policy: cfg.kind,
        traces: ledger.traces,
        env_checksum: streams.checksum(),
        explore_counts: None,
    })
}

/// Pure predict-then-optimize, ignoring the bandit cost entirely.
pub fn run_pto_only(
    spec: &EnvSpec,
    t_rounds: usize,
    cfg: &PolicyConfig,
    replication: usize,
    rep_seed: u64,
) -> Result<PolicyRun> {
    ensure_kind(cfg, PolicyKind::PtoOnly)?;
    cfg.validate(spec, t_rounds)?;
    let mut streams = EnvStreams::new(rep_seed, cfg.kind.tag(), spec);
    let spanner = ofu::barycentric_spanner(&spec.action_space)?;
    let mut gram = GramCache::new(spec.m, spec.d);
    let (xs0, cs0, _) = initial_round(spec, &mut streams, &spanner[0])?;
    for (x, c) in xs0.iter().zip(&cs0) {
        gram.push(x, c);
    }
    let mut ledger = TraceBuilder::new(replication, spec.n, t_rounds);

    for t in 1..=t_rounds {
        let model = gram.solve(gram.default_ridge())?;
        let xs = streams.round_features(spec, t);
        let mut ws = Vec::with_capacity(spec.n);
        let mut preds = Vec::with_capacity(spec.n);
        for x in &xs {
            let c_hat = model.predict(x)?;
            ensure_finite_vec(&c_hat, "label prediction", t)?;
            let obj = OptimisticObjective {
                c_hat: c_hat.clone(),
                ball: point_ball(spec.d),
            };
            let r = match &spec.action_space {
                ActionSpace::UnitBall { .. } => {
                    solver::solve_unit_ball(&obj)
                }
                ActionSpace::Finite { actions } => solver::solve_finite(&obj, actions, None),
            };
            ws.push(r.w);
            preds.push(c_hat);
        }
        let cs = streams.round_labels(spec, t, &xs, &ws)?;
        for (x, c) in xs.iter().zip(&cs) {
            gram.push(x, c);
        }
        let parts = regret_accounting(spec, &xs, &ws, Some(&preds))?;
        ledger.push(t, parts, true)?;
    }
    Ok(PolicyRun {
        policy: cfg.kind,
        traces: ledger.traces,
        env_checksum: streams.checksum(),
        explore_counts: None,
    })
}

/// Exploration horizon of the finite variant,
/// `ceil(T^(2/3) (d |W|)^(1/3))`.
pub fn explore_rounds_finite(t_rounds: usize, d: usize, n_actions: usize) -> usize {
    ((t_rounds as f64).powf(2.0 / 3.0) * ((d * n_actions) as f64).cbrt()).ceil() as usize
}

/// Exploration horizon of the continuous variant,
/// `ceil(m^(1/3) d^(2/3) T^(2/3))`.
pub fn explore_rounds_continuous(t_rounds: usize, m: usize, d: usize) -> usize {
    ((m as f64).cbrt() * (d as f64).powf(2.0 / 3.0) * (t_rounds as f64).powf(2.0 / 3.0)).ceil()
        as usize
}

/// Round-robin assignment of the exploration phase, 0-based throughout.
fn explore_action_index(n: usize, t0: usize, i: usize, n_actions: usize) -> usize {
    (n * t0 + i) % n_actions
}

fn ensure_kind(cfg: &PolicyConfig, expected: PolicyKind) -> Result<()> {
    if cfg.kind != expected {
        return Err(Error::InvalidConfig(format!(
            "expected policy {expected}, config says {}",
            cfg.kind
        )));
    }
    Ok(())
}

fn solver_cfg(cfg: &PolicyConfig, seed: u64) -> SolverConfig {
    SolverConfig {
        restarts: cfg.restarts,
        seed,
        ..SolverConfig::default()
    }
}

/// Degenerate ball used by the pure predict-then-optimize policy; a zero
/// radius turns the optimistic solvers into plain linear minimization.
fn point_ball(d: usize) -> ConfidenceBall {
    ConfidenceBall {
        center: DVector::zeros(d),
        a: DMatrix::identity(d, d),
        radius_sq: 0.0,
    }
}

fn ensure_finite_vec(v: &DVector<f64>, what: &'static str, t: usize) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what, t })
    }
}

/// Draws the initial dataset: `n` individuals under the default action.
#[allow(clippy::type_complexity)]
fn initial_round(
    spec: &EnvSpec,
    streams: &mut EnvStreams,
    w0: &DVector<f64>,
) -> Result<(Vec<DVector<f64>>, Vec<DVector<f64>>, Vec<DVector<f64>>)> {
    let xs = streams.round_features(spec, 0);
    let ws = vec![w0.clone(); spec.n];
    let cs = streams.round_labels(spec, 0, &xs, &ws)?;
    Ok((xs, cs, ws))
}

/// Observes labels and realized total costs for the committed actions.
fn observe_round(
    spec: &EnvSpec,
    streams: &mut EnvStreams,
    t: usize,
    xs: &[DVector<f64>],
    ws: &[DVector<f64>],
) -> Result<(Vec<DVector<f64>>, Vec<f64>)> {
    let cs = streams.round_labels(spec, t, xs, ws)?;
    let mut rng = streams.bandit_rng(t);
    let mut us = Vec::with_capacity(ws.len());
    for (c, w) in cs.iter().zip(ws) {
        let (u_total, _, _) = spec.realized_cost(c, w, &mut rng);
        if !u_total.is_finite() {
            return Err(Error::NonFinite {
                what: "realized cost",
                t,
            });
        }
        us.push(u_total);
    }
    Ok((cs, us))
}

fn stack_into(out: &mut DVector<f64>, x: &DVector<f64>, w: &DVector<f64>) {
    out.rows_mut(0, x.len()).copy_from(x);
    out.rows_mut(x.len(), w.len()).copy_from(w);
}

fn uniform_in_ball(d: usize, rng: &mut impl Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            let radius = rng.random_range(0.0..1.0_f64).powf(1.0 / d as f64);
            return v * (radius / norm);
        }
    }
}

/// Per-individual (or pooled) confidence-ball states.
struct BanditBank {
    states: Vec<EllipsoidState>,
    pooled: bool,
}

impl BanditBank {
    fn new(spanner: &[DVector<f64>], n: usize, pooled: bool) -> Self {
        let count = if pooled { 1 } else { n };
        BanditBank {
            states: (0..count).map(|_| EllipsoidState::init(spanner)).collect(),
            pooled,
        }
    }

    fn state(&self, i: usize) -> &EllipsoidState {
        &self.states[if self.pooled { 0 } else { i }]
    }

    fn update(&mut self, i: usize, w: &DVector<f64>, u: f64) {
        let k = if self.pooled { 0 } else { i };
        self.states[k].update(w, u);
    }

    fn ensure_finite(&self, t: usize) -> Result<()> {
        for st in &self.states {
            if !st.mu_hat.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite {
                    what: "bandit state",
                    t,
                });
            }
        }
        Ok(())
    }
}

/// Accumulates trace rows and the running average regret.
struct TraceBuilder {
    replication: usize,
    n: usize,
    cum_total: f64,
    traces: Vec<RoundTrace>,
}

impl TraceBuilder {
    fn new(replication: usize, n: usize, t_rounds: usize) -> Self {
        TraceBuilder {
            replication,
            n,
            cum_total: 0.0,
            traces: Vec::with_capacity(t_rounds),
        }
    }

    fn push(&mut self, t: usize, parts: RegretParts, ball_contains_mu: bool) -> Result<()> {
        for (what, v) in [
            ("total regret", parts.total),
            ("optimization regret", parts.opt),
            ("bandit regret", parts.bandit),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite { what, t });
            }
        }
        self.cum_total += parts.total;
        self.traces.push(RoundTrace {
            t,
            replication: self.replication,
            total_regret: parts.total,
            opt_regret: parts.opt,
            bandit_regret: parts.bandit,
            pred_error: parts.pred_error,
            ball_contains_mu,
            avg_regret_cum: self.cum_total / ((t * self.n) as f64),
        });
        Ok(())
    }
}
