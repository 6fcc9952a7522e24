//! Synthetic linear environments: the ground-truth generative model, cost
//! realization, and the optimal-action oracle used for regret accounting.
//!
//! An [`EnvSpec`] holds the parameters the simulator knows but policies do
//! not: the linear label map `F` (or per-action maps, or an additional
//! action effect `G`), the bandit cost vector `mu`, the noise scales, and
//! the feasible action set. Labels follow `c = F x + eps` in the base
//! setting, `c = F_w x + eps` when the label law depends on a discrete
//! action, and `c = F x + G w + eps` in the continuous action-dependent
//! setting. Features are `x ~ N(0, feature_cov)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{self, tag, Fnv64};
use crate::solver;

/// Feasible action set; every action lies in the closed unit l2-ball.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSpace {
    /// The full unit l2-ball in dimension `d`.
    UnitBall { d: usize },
    /// An explicit finite set of actions.
    Finite {
        #[serde(with = "json::dvec_list")]
        actions: Vec<DVector<f64>>,
    },
}

impl ActionSpace {
    /// Action dimension.
    pub fn dim(&self) -> usize {
        match self {
            ActionSpace::UnitBall { d } => *d,
            ActionSpace::Finite { actions } => actions.first().map_or(0, |w| w.len()),
        }
    }

    /// The explicit action list, when finite.
    pub fn finite_actions(&self) -> Option<&[DVector<f64>]> {
        match self {
            ActionSpace::UnitBall { .. } => None,
            ActionSpace::Finite { actions } => Some(actions),
        }
    }

    /// Index of `w` in the finite set via exact componentwise match.
    pub fn action_index(&self, w: &DVector<f64>) -> Option<usize> {
        self.finite_actions()?.iter().position(|a| a == w)
    }

    /// Checks the unit-ball bound and, for finite sets, shape consistency.
    pub fn validate(&self) -> Result<()> {
        if let ActionSpace::Finite { actions } = self {
            if actions.is_empty() {
                return Err(Error::InvalidConfig("empty finite action set".into()));
            }
            let d = actions[0].len();
            for (k, w) in actions.iter().enumerate() {
                if w.len() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "action {k} has length {}, expected {d}",
                        w.len()
                    )));
                }
                if w.norm() > 1.0 + 1e-9 {
                    return Err(Error::InvalidConfig(format!(
                        "action {k} lies outside the unit ball (norm {})",
                        w.norm()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Ground-truth optimal action for one feature vector.
#[derive(Debug, Clone)]
pub struct OptimalAction {
    pub w: DVector<f64>,
    pub expected_cost: f64,
    /// True when the objective was identically zero over the ball and the
    /// returned direction is an arbitrary unit vector.
    pub degenerate: bool,
}

/// Ground-truth generative model, hidden from policies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvSpec {
    /// Feature dimension.
    pub m: usize,
    /// Label and action dimension.
    pub d: usize,
    /// Individuals per round.
    pub n: usize,
    /// Linear label map of the base and continuous settings.
    #[serde(rename = "F", with = "json::dmat")]
    pub f: DMatrix<f64>,
    /// Action effect of the continuous setting, when present.
    #[serde(rename = "G", default, with = "json::dmat_opt", skip_serializing_if = "Option::is_none")]
    pub g: Option<DMatrix<f64>>,
    /// Bandit cost vector; `norm(mu) <= 1` keeps the bandit cost in [-1, 1].
    #[serde(with = "json::dvec")]
    pub mu: DVector<f64>,
    /// Label noise standard deviation.
    pub sigma_label: f64,
    /// Bandit noise standard deviation.
    pub sigma_bandit: f64,
    pub action_space: ActionSpace,
    /// Per-action label maps, when the label law depends on a discrete action.
    #[serde(rename = "per_action_F", default, with = "json::dmat_list_opt", skip_serializing_if = "Option::is_none")]
    pub per_action_f: Option<Vec<DMatrix<f64>>>,
    /// Feature covariance (symmetric positive definite).
    #[serde(with = "json::dmat")]
    pub feature_cov: DMatrix<f64>,
}

impl EnvSpec {
    /// Checks dimension consistency and the model invariants.
    pub fn validate(&self) -> Result<()> {
        if self.f.nrows() != self.d || self.f.ncols() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "F is {}x{}, expected {}x{}",
                self.f.nrows(),
                self.f.ncols(),
                self.d,
                self.m
            )));
        }
        if self.mu.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "mu has length {}, expected {}",
                self.mu.len(),
                self.d
            )));
        }
        if self.mu.norm() > 1.0 + 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "norm(mu) = {} exceeds 1",
                self.mu.norm()
            )));
        }
        if self.sigma_label < 0.0 || self.sigma_bandit < 0.0 {
            return Err(Error::InvalidConfig("negative noise scale".into()));
        }
        self.action_space.validate()?;
        if self.action_space.dim() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "action space has dimension {}, expected {}",
                self.action_space.dim(),
                self.d
            )));
        }
        if self.g.is_some() && self.per_action_f.is_some() {
            return Err(Error::InvalidConfig(
                "G and per_action_F are mutually exclusive".into(),
            ));
        }
        if let Some(g) = &self.g {
            if g.nrows() != self.d || g.ncols() != self.d {
                return Err(Error::DimensionMismatch(format!(
                    "G is {}x{}, expected {}x{}",
                    g.nrows(),
                    g.ncols(),
                    self.d,
                    self.d
                )));
            }
        }
        if let Some(maps) = &self.per_action_f {
            let n_actions = self
                .action_space
                .finite_actions()
                .ok_or_else(|| {
                    Error::InvalidConfig("per_action_F requires a finite action space".into())
                })?
                .len();
            if maps.len() != n_actions {
                return Err(Error::DimensionMismatch(format!(
                    "per_action_F has {} maps for {} actions",
                    maps.len(),
                    n_actions
                )));
            }
            for (k, fk) in maps.iter().enumerate() {
                if fk.nrows() != self.d || fk.ncols() != self.m {
                    return Err(Error::DimensionMismatch(format!(
                        "per_action_F[{k}] is {}x{}, expected {}x{}",
                        fk.nrows(),
                        fk.ncols(),
                        self.d,
                        self.m
                    )));
                }
            }
        }
        if self.feature_cov.nrows() != self.m || self.feature_cov.ncols() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "feature_cov is {}x{}, expected {}x{}",
                self.feature_cov.nrows(),
                self.feature_cov.ncols(),
                self.m,
                self.m
            )));
        }
        if self.feature_cov.clone().cholesky().is_none() {
            return Err(Error::InvalidConfig(
                "feature_cov is not positive definite".into(),
            ));
        }
        Ok(())
    }

    /// Draws `count` i.i.d. features from `N(0, feature_cov)`.
    pub fn generate_features(&self, count: usize, rng: &mut impl Rng) -> Vec<DVector<f64>> {
        let chol = self
            .feature_cov
            .clone()
            .cholesky()
            .expect("feature_cov validated as positive definite");
        let l = chol.l();
        (0..count)
            .map(|_| {
                let z = DVector::from_fn(self.m, |_, _| rng.sample::<f64, _>(StandardNormal));
                &l * z
            })
            .collect()
    }

    /// Expected label given the feature and the action.
    pub fn label_mean(&self, x: &DVector<f64>, w: &DVector<f64>) -> Result<DVector<f64>> {
        if let Some(maps) = &self.per_action_f {
            let k = self
                .action_space
                .action_index(w)
                .ok_or(Error::UnknownAction)?;
            return Ok(&maps[k] * x);
        }
        if let Some(g) = &self.g {
            return Ok(&self.f * x + g * w);
        }
        Ok(&self.f * x)
    }

    /// Draws one label per (feature, action) pair.
    pub fn sample_labels(
        &self,
        xs: &[DVector<f64>],
        ws: &[DVector<f64>],
        rng: &mut impl Rng,
    ) -> Result<Vec<DVector<f64>>> {
        if xs.len() != ws.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} features for {} actions",
                xs.len(),
                ws.len()
            )));
        }
        xs.iter()
            .zip(ws)
            .map(|(x, w)| {
                let mut c = self.label_mean(x, w)?;
                for v in c.iter_mut() {
                    *v += self.sigma_label * rng.sample::<f64, _>(StandardNormal);
                }
                Ok(c)
            })
            .collect()
    }

    /// Realized cost of playing `w` against label `c`.
    ///
    /// Returns `(u_total, u_o, u_b)` with `u_o = c' w` and
    /// `u_b = mu' w + eta`. An agent that observes `u_total` and `c` can
    /// reconstruct `u_b = u_total - c' w`, which the bandit state updates
    /// rely on.
    pub fn realized_cost(
        &self,
        c: &DVector<f64>,
        w: &DVector<f64>,
        rng: &mut impl Rng,
    ) -> (f64, f64, f64) {
        let u_o = c.dot(w);
        let eta = self.sigma_bandit * rng.sample::<f64, _>(StandardNormal);
        let u_b = self.mu.dot(w) + eta;
        (u_o + u_b, u_o, u_b)
    }

    /// Expected total cost of playing `w` on feature `x`.
    pub fn expected_cost(&self, x: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
        Ok((self.label_mean(x, w)? + &self.mu).dot(w))
    }

    /// Minimizes the expected total cost over the action space.
    ///
    /// Unit ball, base setting: the closed form `w* = -v / norm(v)` with
    /// `v = F x + mu`. Finite sets: exact enumeration, lowest index on
    /// ties. Unit ball with an action effect `G`: the exact trust-region
    /// solution of the quadratic objective.
    pub fn optimal_action(&self, x: &DVector<f64>) -> Result<OptimalAction> {
        match &self.action_space {
            ActionSpace::Finite { actions } => {
                let mut best: Option<(usize, f64)> = None;
                for (k, w) in actions.iter().enumerate() {
                    let cost = self.expected_cost(x, w)?;
                    if best.is_none_or(|(_, c)| cost < c) {
                        best = Some((k, cost));
                    }
                }
                let (k, expected_cost) = best.expect("validated as nonempty");
                Ok(OptimalAction {
                    w: actions[k].clone(),
                    expected_cost,
                    degenerate: false,
                })
            }
            ActionSpace::UnitBall { d } => {
                if let Some(g) = &self.g {
                    let r = solver::solve_quadratic_ball(&(&self.f * x), g, &self.mu);
                    return Ok(OptimalAction {
                        w: r.w,
                        expected_cost: r.value,
                        degenerate: false,
                    });
                }
                let v = &self.f * x + &self.mu;
                let norm = v.norm();
                if norm <= 1e-12 {
                    let mut w = DVector::zeros(*d);
                    w[0] = 1.0;
                    let expected_cost = v.dot(&w);
                    return Ok(OptimalAction {
                        w,
                        expected_cost,
                        degenerate: true,
                    });
                }
                Ok(OptimalAction {
                    w: -&v / norm,
                    expected_cost: -norm,
                    degenerate: false,
                })
            }
        }
    }
}

/// One observed (feature, label, action) triple with its round and
/// individual indices.
#[derive(Debug, Clone)]
pub struct Record {
    pub x: DVector<f64>,
    pub c: DVector<f64>,
    pub w: DVector<f64>,
    pub t: usize,
    pub i: usize,
}

/// Append-only pool of records accumulated across rounds.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    records: Vec<Record>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Which label law the environment follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelVariant {
    /// `c = F x + eps`, independent of the action.
    Base,
    /// `c = F_w x + eps` with a distinct map per discrete action.
    PerAction,
    /// `c = F x + G w + eps` over the unit ball.
    Continuous,
}

/// How to build the action set when realizing an environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSetParams {
    UnitBall,
    /// `count` actions: the standard basis followed by random unit vectors.
    Finite { count: usize },
}

/// Generation parameters from which one concrete [`EnvSpec`] is drawn per
/// replication.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvParams {
    pub m: usize,
    pub d: usize,
    pub n: usize,
    /// Exact l1 operator norm (maximum absolute row sum) of the drawn `F`.
    pub k_f: f64,
    /// Norm bound for `G` in the continuous variant; defaults to `k_f`.
    #[serde(default)]
    pub k_g: Option<f64>,
    /// Label noise variance.
    pub sigma_label_sq: f64,
    /// Bandit noise variance.
    pub sigma_bandit_sq: f64,
    pub variant: LabelVariant,
    pub actions: ActionSetParams,
    /// Force `mu = 0` (the pure predict-then-optimize regime).
    #[serde(default)]
    pub mu_zero: bool,
}

impl EnvParams {
    /// Basic range and consistency checks, independent of any draw.
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.d == 0 || self.n == 0 {
            return Err(Error::InvalidConfig("m, d, n must be positive".into()));
        }
        if self.k_f < 0.0 {
            return Err(Error::InvalidConfig("k_f must be nonnegative".into()));
        }
        if self.sigma_label_sq < 0.0 || self.sigma_bandit_sq < 0.0 {
            return Err(Error::InvalidConfig("negative noise variance".into()));
        }
        match (self.variant, self.actions) {
            (LabelVariant::PerAction, ActionSetParams::UnitBall) => Err(Error::InvalidConfig(
                "the per-action variant needs a finite action set".into(),
            )),
            (LabelVariant::Continuous, ActionSetParams::Finite { .. }) => {
                Err(Error::InvalidConfig(
                    "the continuous variant needs the unit-ball action set".into(),
                ))
            }
            (_, ActionSetParams::Finite { count }) if count < self.d => {
                Err(Error::InvalidConfig(format!(
                    "{count} actions cannot span dimension {}",
                    self.d
                )))
            }
            _ => Ok(()),
        }
    }

    /// Draws one concrete environment.
    ///
    /// Draw order is fixed (F, then mu, then finite-set extras, then the
    /// variant-specific maps) so a given seed always yields the same
    /// environment regardless of variant-independent settings.
    pub fn realize(&self, env_seed: u64) -> Result<EnvSpec> {
        self.validate()?;
        let mut rng = seed::rng(env_seed);
        let f = draw_scaled_map(self.d, self.m, self.k_f, &mut rng);
        let mu = if self.mu_zero {
            DVector::zeros(self.d)
        } else {
            let dir = random_unit_vector(self.d, &mut rng);
            dir * rng.random_range(0.5..1.0)
        };
        let action_space = match self.actions {
            ActionSetParams::UnitBall => ActionSpace::UnitBall { d: self.d },
            ActionSetParams::Finite { count } => {
                let mut actions: Vec<DVector<f64>> = (0..self.d)
                    .map(|k| {
                        let mut e = DVector::zeros(self.d);
                        e[k] = 1.0;
                        e
                    })
                    .collect();
                for _ in self.d..count {
                    actions.push(random_unit_vector(self.d, &mut rng));
                }
                ActionSpace::Finite { actions }
            }
        };
        let per_action_f = match self.variant {
            LabelVariant::PerAction => {
                let count = action_space.finite_actions().expect("validated").len();
                Some(
                    (0..count)
                        .map(|_| draw_scaled_map(self.d, self.m, self.k_f, &mut rng))
                        .collect(),
                )
            }
            _ => None,
        };
        let g = match self.variant {
            LabelVariant::Continuous => Some(draw_scaled_map(
                self.d,
                self.d,
                self.k_g.unwrap_or(self.k_f),
                &mut rng,
            )),
            _ => None,
        };
        let spec = EnvSpec {
            m: self.m,
            d: self.d,
            n: self.n,
            f,
            g,
            mu,
            sigma_label: self.sigma_label_sq.sqrt(),
            sigma_bandit: self.sigma_bandit_sq.sqrt(),
            action_space,
            per_action_f,
            feature_cov: DMatrix::identity(self.m, self.m),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Uniform entries in [-1, 1), rescaled so the maximum absolute row sum
/// equals `bound` exactly.
fn draw_scaled_map(rows: usize, cols: usize, bound: f64, rng: &mut impl Rng) -> DMatrix<f64> {
    let mut f = DMatrix::from_row_iterator(
        rows,
        cols,
        (0..rows * cols).map(|_| rng.random_range(-1.0f64..1.0)),
    );
    let max_row_sum = f
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(f64::MIN, f64::max);
    f *= bound / max_row_sum;
    f
}

fn random_unit_vector(d: usize, rng: &mut impl Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Per-(replication, policy) random streams.
///
/// Features and label noise are keyed only by (replication, round), so
/// every policy within a replication consumes identical draws; bandit
/// noise, exploration draws, and solver restarts are additionally keyed by
/// the policy tag. A running checksum over the shared draws lets the
/// harness verify the pairing.
pub struct EnvStreams {
    rep_seed: u64,
    policy_tag: u64,
    checksum: Fnv64,
}

impl EnvStreams {
    pub fn new(rep_seed: u64, policy_tag: u64, spec: &EnvSpec) -> Self {
        let mut checksum = Fnv64::new();
        for &v in spec.f.iter() {
            checksum.write_f64(v);
        }
        if let Some(g) = &spec.g {
            for &v in g.iter() {
                checksum.write_f64(v);
            }
        }
        if let Some(maps) = &spec.per_action_f {
            for fk in maps {
                for &v in fk.iter() {
                    checksum.write_f64(v);
                }
            }
        }
        for &v in spec.mu.iter() {
            checksum.write_f64(v);
        }
        EnvStreams {
            rep_seed,
            policy_tag,
            checksum,
        }
    }

    /// The `n` feature vectors of round `t` (round 0 is the initial dataset).
    pub fn round_features(&mut self, spec: &EnvSpec, t: usize) -> Vec<DVector<f64>> {
        let mut rng = seed::rng(seed::derive(self.rep_seed, &[tag::FEATURES, t as u64]));
        let xs = spec.generate_features(spec.n, &mut rng);
        for x in &xs {
            for &v in x.iter() {
                self.checksum.write_f64(v);
            }
        }
        xs
    }

    /// Labels of round `t` under the chosen actions.
    ///
    /// The noise stream depends only on (replication, round), so policies
    /// that choose different actions still face the same label noise.
    pub fn round_labels(
        &mut self,
        spec: &EnvSpec,
        t: usize,
        xs: &[DVector<f64>],
        ws: &[DVector<f64>],
    ) -> Result<Vec<DVector<f64>>> {
        let mut rng = seed::rng(seed::derive(self.rep_seed, &[tag::LABEL_NOISE, t as u64]));
        let cs = spec.sample_labels(xs, ws, &mut rng)?;
        for ((c, x), w) in cs.iter().zip(xs).zip(ws) {
            let eps = c - spec.label_mean(x, w)?;
            for &v in eps.iter() {
                self.checksum.write_f64(v);
            }
        }
        Ok(cs)
    }

    /// Bandit noise generator of round `t`, keyed by policy.
    pub fn bandit_rng(&self, t: usize) -> ChaCha12Rng {
        seed::rng(seed::derive(
            self.rep_seed,
            &[tag::BANDIT_NOISE, self.policy_tag, t as u64],
        ))
    }

    /// Exploration-phase action generator of round `t`, keyed by policy.
    pub fn explore_rng(&self, t: usize) -> ChaCha12Rng {
        seed::rng(seed::derive(
            self.rep_seed,
            &[tag::EXPLORE, self.policy_tag, t as u64],
        ))
    }

    /// Seed for the solver restarts of individual `i` in round `t`.
    pub fn solver_seed(&self, t: usize, i: usize) -> u64 {
        seed::derive(
            self.rep_seed,
            &[tag::SOLVER, self.policy_tag, t as u64, i as u64],
        )
    }

    /// Checksum over the policy-independent draws consumed so far.
    pub fn checksum(&self) -> u64 {
        self.checksum.finish()
    }
}

/// Serde glue mapping nalgebra types to plain JSON arrays (matrices as
/// row-major nested arrays).
pub(crate) mod json {
    use nalgebra::{DMatrix, DVector};
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn mat_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
        m.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn rows_to_mat<E: serde::de::Error>(rows: Vec<Vec<f64>>) -> Result<DMatrix<f64>, E> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if nrows == 0 || ncols == 0 {
            return Err(E::custom("matrix must be non-empty"));
        }
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(E::custom("matrix rows have unequal lengths"));
        }
        Ok(DMatrix::from_row_iterator(
            nrows,
            ncols,
            rows.into_iter().flatten(),
        ))
    }

    pub mod dmat {
        use super::*;

        pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
            mat_to_rows(m).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
            rows_to_mat(Vec::<Vec<f64>>::deserialize(d)?)
        }
    }

    pub mod dmat_opt {
        use super::*;

        pub fn serialize<S: Serializer>(
            m: &Option<DMatrix<f64>>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            m.as_ref().map(mat_to_rows).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<DMatrix<f64>>, D::Error> {
            Option::<Vec<Vec<f64>>>::deserialize(d)?
                .map(rows_to_mat)
                .transpose()
        }
    }

    pub mod dmat_list_opt {
        use super::*;

        pub fn serialize<S: Serializer>(
            m: &Option<Vec<DMatrix<f64>>>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            m.as_ref()
                .map(|mats| mats.iter().map(mat_to_rows).collect::<Vec<_>>())
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<Vec<DMatrix<f64>>>, D::Error> {
            Option::<Vec<Vec<Vec<f64>>>>::deserialize(d)?
                .map(|mats| mats.into_iter().map(rows_to_mat).collect())
                .transpose()
        }
    }

    pub mod dvec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &DVector<f64>, s: S) -> Result<S::Ok, S::Error> {
            v.iter().copied().collect::<Vec<f64>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DVector<f64>, D::Error> {
            Ok(DVector::from_vec(Vec::<f64>::deserialize(d)?))
        }
    }

    pub mod dvec_list {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[DVector<f64>], s: S) -> Result<S::Ok, S::Error> {
            v.iter()
                .map(|w| w.iter().copied().collect::<Vec<f64>>())
                .collect::<Vec<_>>()
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Vec<DVector<f64>>, D::Error> {
            let lists = Vec::<Vec<f64>>::deserialize(d)?;
            if lists.is_empty() {
                return Err(D::Error::custom("action list must be non-empty"));
            }
            Ok(lists.into_iter().map(DVector::from_vec).collect())
        }
    }
}
