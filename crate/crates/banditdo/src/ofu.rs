//! Per-individual optimism-in-face-of-uncertainty bandit state: the
//! barycentric-spanner initialization, the design matrix `A`, the running
//! estimate `mu_hat`, the confidence-ball radius schedule, and the
//! membership test.

use nalgebra::{DMatrix, DVector};

use crate::env::ActionSpace;
use crate::error::{Error, Result};

/// Absolute slack in the confidence-ball membership test, covering
/// floating-point error in the quadratic form.
pub const CONTAINS_SLACK: f64 = 1e-12;

/// Finds `d` actions whose span represents every action with bounded
/// coefficients, used to initialize `A` so the ellipsoid starts
/// well-conditioned.
///
/// The unit ball admits the standard basis as an exact spanner. Finite
/// sets get a C-approximate spanner (C = 2) by determinant-maximization
/// swaps: start from any maximal-rank subset, then replace a member
/// whenever some action more than doubles the absolute determinant.
pub fn barycentric_spanner(space: &ActionSpace) -> Result<Vec<DVector<f64>>> {
    let d = space.dim();
    let actions = match space {
        ActionSpace::UnitBall { .. } => {
            return Ok((0..d)
                .map(|k| {
                    let mut e = DVector::zeros(d);
                    e[k] = 1.0;
                    e
                })
                .collect());
        }
        ActionSpace::Finite { actions } => actions,
    };

    let mut basis: Vec<usize> = Vec::with_capacity(d);
    for (k, _) in actions.iter().enumerate() {
        if basis.len() == d {
            break;
        }
        let mut trial = basis.clone();
        trial.push(k);
        if rank_of(actions, &trial) == trial.len() {
            basis.push(k);
        }
    }
    if basis.len() < d {
        return Err(Error::DegenerateActionSet);
    }

    loop {
        let current = det_of(actions, &basis).abs();
        let mut swapped = false;
        'search: for j in 0..d {
            for k in 0..actions.len() {
                let mut trial = basis.clone();
                trial[j] = k;
                if det_of(actions, &trial).abs() > 2.0 * current {
                    basis = trial;
                    swapped = true;
                    break 'search;
                }
            }
        }
        if !swapped {
            return Ok(basis.iter().map(|&k| actions[k].clone()).collect());
        }
    }
}

fn columns(actions: &[DVector<f64>], idx: &[usize]) -> DMatrix<f64> {
    let d = actions[0].len();
    DMatrix::from_fn(d, idx.len(), |r, c| actions[idx[c]][r])
}

fn rank_of(actions: &[DVector<f64>], idx: &[usize]) -> usize {
    columns(actions, idx).rank(1e-10)
}

fn det_of(actions: &[DVector<f64>], idx: &[usize]) -> f64 {
    columns(actions, idx).determinant()
}

/// Confidence-ball radius at round `t` (1-based) for `n` individuals,
/// action dimension `d`, and confidence parameter `gamma`.
///
/// `beta = max(128 d ln(t) ln(n t^2 / gamma), ((8/3) ln(n t^2 / gamma))^2)`,
/// with natural logarithms.
pub fn beta_schedule(t: usize, n: usize, d: usize, gamma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&gamma) || gamma == 0.0 {
        return Err(Error::InvalidConfig(format!(
            "gamma = {gamma} outside (0, 1)"
        )));
    }
    if t == 0 {
        return Err(Error::InvalidConfig("beta_schedule needs t >= 1".into()));
    }
    let t_f = t as f64;
    let log_conf = ((n as f64) * t_f * t_f / gamma).ln();
    let first = 128.0 * (d as f64) * t_f.ln() * log_conf;
    let second = (8.0 / 3.0 * log_conf).powi(2);
    Ok(first.max(second))
}

/// Linear-bandit regression state of one individual.
///
/// Maintains `A = sum of b_j b_j' + sum of w w'` over the spanner and all
/// played actions, the accumulator `s = sum of u_b w`, and the estimate
/// `mu_hat = A^-1 s`.
#[derive(Debug, Clone)]
pub struct EllipsoidState {
    pub a: DMatrix<f64>,
    pub s: DVector<f64>,
    pub mu_hat: DVector<f64>,
    /// Number of updates applied.
    pub t_local: usize,
}

impl EllipsoidState {
    /// Initializes `A` from the spanner Gram matrix, with `s = mu_hat = 0`.
    pub fn init(spanner: &[DVector<f64>]) -> Self {
        let d = spanner[0].len();
        let mut a = DMatrix::zeros(d, d);
        for b in spanner {
            a.ger(1.0, b, b, 1.0);
        }
        EllipsoidState {
            a,
            s: DVector::zeros(d),
            mu_hat: DVector::zeros(d),
            t_local: 0,
        }
    }

    /// Rank-one update after observing bandit cost `u_b` under action `w`.
    pub fn update(&mut self, w: &DVector<f64>, u_b: f64) {
        self.a.ger(1.0, w, w, 1.0);
        self.s.axpy(u_b, w, 1.0);
        self.mu_hat = self
            .a
            .clone()
            .cholesky()
            .expect("A stays positive definite under rank-one updates")
            .solve(&self.s);
        self.t_local += 1;
    }

    /// The confidence ball centered at the current estimate.
    pub fn ball(&self, radius_sq: f64) -> ConfidenceBall {
        ConfidenceBall {
            center: self.mu_hat.clone(),
            a: self.a.clone(),
            radius_sq,
        }
    }
}

/// Ellipsoid `{nu : (nu - center)' A (nu - center) <= radius_sq}`.
#[derive(Debug, Clone)]
pub struct ConfidenceBall {
    pub center: DVector<f64>,
    pub a: DMatrix<f64>,
    pub radius_sq: f64,
}

impl ConfidenceBall {
    /// Membership test with absolute slack [`CONTAINS_SLACK`].
    pub fn contains(&self, nu: &DVector<f64>) -> bool {
        let diff = nu - &self.center;
        let quad = diff.dot(&(&self.a * &diff));
        quad <= self.radius_sq + CONTAINS_SLACK
    }
}
