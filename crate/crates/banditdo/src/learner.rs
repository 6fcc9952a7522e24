//! Least-squares label prediction, retrained each round on the full
//! accumulated dataset.
//!
//! Three flavors cover the three environment variants: a single linear map
//! ([`OlsModel`]), one map per discrete action ([`PerActionOls`]), and a
//! joint map over the stacked regressor `[x; w]` ([`JointOlsModel`]).
//! Fitting solves the normal equations through a Cholesky factorization; a
//! vanishing ridge (`1e-8 * trace(X'X) / m` by default) keeps early
//! rank-deficient rounds solvable without moving the large-sample limit.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::env::{ActionSpace, Dataset, EnvSpec};
use crate::error::{Error, Result};

/// Ridge fraction applied to the average diagonal of the Gram matrix.
const DEFAULT_RIDGE_FRACTION: f64 = 1e-8;

/// Accumulated normal equations `X'X` and `X'C`.
///
/// Rebuilding the Gram matrices from scratch every round costs
/// `O(n t m^2)`; pushing only the new round's records keeps the per-round
/// cost at `O(n m^2)`. Accumulation order matches a fresh left-to-right
/// pass over the dataset, so the two routes agree bitwise.
#[derive(Debug, Clone)]
pub struct GramCache {
    xtx: DMatrix<f64>,
    xtc: DMatrix<f64>,
    count: usize,
}

impl GramCache {
    pub fn new(m: usize, d: usize) -> Self {
        GramCache {
            xtx: DMatrix::zeros(m, m),
            xtc: DMatrix::zeros(m, d),
            count: 0,
        }
    }

    pub fn push(&mut self, x: &DVector<f64>, c: &DVector<f64>) {
        self.xtx.ger(1.0, x, x, 1.0);
        self.xtc.ger(1.0, x, c, 1.0);
        self.count += 1;
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Ridge used when the caller does not pin one explicitly.
    pub fn default_ridge(&self) -> f64 {
        DEFAULT_RIDGE_FRACTION * self.xtx.trace() / self.xtx.nrows() as f64
    }

    /// Solves `(X'X + ridge_eps I) Z = X'C` and returns `F_hat = Z'`.
    pub fn solve(&self, ridge_eps: f64) -> Result<OlsModel> {
        if self.count == 0 {
            return Err(Error::NoDataRows);
        }
        let m = self.xtx.nrows();
        let mut gram = self.xtx.clone();
        for k in 0..m {
            gram[(k, k)] += ridge_eps;
        }
        let chol = gram.cholesky().ok_or(Error::SingularDesign)?;
        let f_hat = chol.solve(&self.xtc).transpose();
        if f_hat.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularDesign);
        }
        Ok(OlsModel {
            f_hat,
            n_train: self.count,
            ridge_eps,
        })
    }
}

/// A fitted linear label model `c_hat = F_hat x`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct OlsModel {
    /// Estimated `d x m` map.
    #[serde(rename = "F_hat", with = "crate::env::json::dmat")]
    pub f_hat: DMatrix<f64>,
    pub n_train: usize,
    pub ridge_eps: f64,
}

impl OlsModel {
    pub fn predict(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.f_hat.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "feature has length {}, model expects {}",
                x.len(),
                self.f_hat.ncols()
            )));
        }
        Ok(&self.f_hat * x)
    }
}

/// A fitted joint model `c_hat = FG_hat [x; w]`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct JointOlsModel {
    /// Estimated `d x (m + d)` map over the stacked regressor.
    #[serde(rename = "FG_hat", with = "crate::env::json::dmat")]
    pub fg_hat: DMatrix<f64>,
    pub n_train: usize,
    pub ridge_eps: f64,
    m: usize,
}

impl JointOlsModel {
    pub fn predict(&self, x: &DVector<f64>, w: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.m || w.len() != self.fg_hat.ncols() - self.m {
            return Err(Error::DimensionMismatch(format!(
                "regressor has length {}+{}, model expects {}+{}",
                x.len(),
                w.len(),
                self.m,
                self.fg_hat.ncols() - self.m
            )));
        }
        Ok(self.f_block() * x + self.g_block() * w)
    }

    /// The columns of `FG_hat` acting on the feature.
    pub fn f_block(&self) -> DMatrix<f64> {
        self.fg_hat.columns(0, self.m).into()
    }

    /// The columns of `FG_hat` acting on the action.
    pub fn g_block(&self) -> DMatrix<f64> {
        self.fg_hat
            .columns(self.m, self.fg_hat.ncols() - self.m)
            .into()
    }
}

/// One OLS model per discrete action, each fit on its own records.
#[derive(Debug, Clone)]
pub struct PerActionOls {
    pub models: BTreeMap<usize, OlsModel>,
    pub counts: BTreeMap<usize, usize>,
}

impl PerActionOls {
    pub fn model(&self, action_index: usize) -> Result<&OlsModel> {
        self.models
            .get(&action_index)
            .ok_or(Error::UnexploredAction)
    }

    pub fn predict(&self, action_index: usize, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.model(action_index)?.predict(x)
    }
}

/// Fits the single-map model with the default vanishing ridge.
pub fn fit_ols(dataset: &Dataset) -> Result<OlsModel> {
    fit_ols_with(dataset, None)
}

/// Fits the single-map model; `ridge_eps = Some(0.0)` is pure OLS and
/// fails with "singular design" on rank-deficient data.
pub fn fit_ols_with(dataset: &Dataset, ridge_eps: Option<f64>) -> Result<OlsModel> {
    let first = dataset.records().first().ok_or(Error::NoDataRows)?;
    let mut cache = GramCache::new(first.x.len(), first.c.len());
    for r in dataset.records() {
        cache.push(&r.x, &r.c);
    }
    let eps = ridge_eps.unwrap_or_else(|| cache.default_ridge());
    cache.solve(eps)
}

/// Fits one model per action of a finite action space.
pub fn fit_per_action(dataset: &Dataset, space: &ActionSpace) -> Result<PerActionOls> {
    fit_per_action_with(dataset, space, None)
}

pub fn fit_per_action_with(
    dataset: &Dataset,
    space: &ActionSpace,
    ridge_eps: Option<f64>,
) -> Result<PerActionOls> {
    let actions = space
        .finite_actions()
        .ok_or_else(|| Error::InvalidConfig("per-action fit requires a finite action space".into()))?;
    let first = dataset.records().first().ok_or(Error::NoDataRows)?;
    let mut caches: Vec<GramCache> = (0..actions.len())
        .map(|_| GramCache::new(first.x.len(), first.c.len()))
        .collect();
    for r in dataset.records() {
        let k = space.action_index(&r.w).ok_or(Error::UnknownAction)?;
        caches[k].push(&r.x, &r.c);
    }
    let mut models = BTreeMap::new();
    let mut counts = BTreeMap::new();
    for (k, cache) in caches.iter().enumerate() {
        if cache.is_empty() {
            return Err(Error::UnexploredAction);
        }
        let eps = ridge_eps.unwrap_or_else(|| cache.default_ridge());
        models.insert(k, cache.solve(eps)?);
        counts.insert(k, cache.len());
    }
    Ok(PerActionOls { models, counts })
}

/// Fits the joint model on the stacked regressor `[x; w]`.
pub fn fit_joint(dataset: &Dataset) -> Result<JointOlsModel> {
    fit_joint_with(dataset, None)
}

pub fn fit_joint_with(dataset: &Dataset, ridge_eps: Option<f64>) -> Result<JointOlsModel> {
    let first = dataset.records().first().ok_or(Error::NoDataRows)?;
    let m = first.x.len();
    let d = first.c.len();
    let mut cache = GramCache::new(m + d, d);
    let mut z = DVector::zeros(m + d);
    for r in dataset.records() {
        z.rows_mut(0, m).copy_from(&r.x);
        z.rows_mut(m, d).copy_from(&r.w);
        cache.push(&z, &r.c);
    }
    let eps = ridge_eps.unwrap_or_else(|| cache.default_ridge());
    let model = cache.solve(eps)?;
    Ok(JointOlsModel {
        fg_hat: model.f_hat,
        n_train: model.n_train,
        ridge_eps: model.ridge_eps,
        m,
    })
}

/// Monte Carlo estimate of `E_x || F x - F_hat x ||_2` over fresh features.
pub fn prediction_error(
    model: &OlsModel,
    spec: &EnvSpec,
    n_eval: usize,
    rng: &mut impl Rng,
) -> f64 {
    prediction_error_of_map(&model.f_hat, spec, n_eval, rng)
}

/// Same estimate for a bare map, reused for the F-block of a joint model.
pub fn prediction_error_of_map(
    f_hat: &DMatrix<f64>,
    spec: &EnvSpec,
    n_eval: usize,
    rng: &mut impl Rng,
) -> f64 {
    let diff = &spec.f - f_hat;
    let xs = spec.generate_features(n_eval, rng);
    xs.iter().map(|x| (&diff * x).norm()).sum::<f64>() / n_eval as f64
}
