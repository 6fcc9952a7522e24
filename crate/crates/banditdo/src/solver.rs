//! Optimization subproblems of the decision loop: the inner minimization
//! over a confidence ellipsoid (closed form), the outer minimization over
//! the action space (an exact trust-region reduction over the unit ball,
//! or exact enumeration over a finite set), and the trust-region
//! subproblem used both as the continuous-action benchmark and as the
//! building block of the quadratic-plus-ellipsoid objective.
//!
//! All solvers are pure functions and deterministic: random restarts come
//! from an explicit seed, and ties break toward the first candidate (or
//! lowest action index).

use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::ofu::ConfidenceBall;
use crate::seed;

/// Which routine produced a [`SolveResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    ClosedForm,
    Enumeration,
    Multistart,
    TrustRegion,
}

impl std::fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveMethod::ClosedForm => "closed_form",
            SolveMethod::Enumeration => "enumeration",
            SolveMethod::Multistart => "multistart",
            SolveMethod::TrustRegion => "trust_region",
        })
    }
}

/// Solution of one outer minimization.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub w: DVector<f64>,
    /// Objective value `(c_hat + nu)' w` at the solution.
    pub value: f64,
    /// The optimistic `nu` attaining the inner minimum at `w`.
    pub nu: DVector<f64>,
    pub method: SolveMethod,
    pub n_restarts_used: usize,
}

/// Knobs of the multistart quadratic-plus-ellipsoid solver.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Random restarts added to the deterministic candidate starts.
    pub restarts: usize,
    /// Seed of the restart stream.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            restarts: 8,
            seed: 0,
        }
    }
}

/// The optimistic objective of one individual: predicted label plus a
/// confidence ball for the bandit cost vector.
#[derive(Debug, Clone)]
pub struct OptimisticObjective {
    pub c_hat: DVector<f64>,
    pub ball: ConfidenceBall,
}

/// Minimizes `nu' w` over the confidence ellipsoid, in closed form.
///
/// The minimum is `center' w - sqrt(radius_sq) * sqrt(w' A^-1 w)`, attained
/// at `nu* = center - sqrt(radius_sq) A^-1 w / sqrt(w' A^-1 w)`. At `w = 0`
/// the value is 0 by continuity and `nu*` is the center.
pub fn inner_min(ball: &ConfidenceBall, w: &DVector<f64>) -> (f64, DVector<f64>) {
    let sr = ball.radius_sq.sqrt();
    if sr == 0.0 || w.norm() == 0.0 {
        return (ball.center.dot(w), ball.center.clone());
    }
    let chol = ball
        .a
        .clone()
        .cholesky()
        .expect("confidence matrix is positive definite");
    let mut ainv_w = w.clone();
    chol.solve_mut(&mut ainv_w);
    let qf = w.dot(&ainv_w);
    if qf <= 0.0 {
        return (ball.center.dot(w), ball.center.clone());
    }
    let root = qf.sqrt();
    let nu = &ball.center - ainv_w * (sr / root);
    (ball.center.dot(w) - sr * root, nu)
}

/// Minimizes `(c_hat + nu)' w` jointly over the unit ball and the
/// confidence ellipsoid.
///
/// For fixed `nu` the best action is the closed form
/// `w = -(c_hat + nu) / ||c_hat + nu||` with value `-||c_hat + nu||`, so
/// swapping the two minimizations reduces the bilinear problem to
/// maximizing `||c_hat + nu||` over the ellipsoid alone: a trust-region
/// subproblem in the eigenbasis of `A`, solved exactly. A zero radius
/// keeps the linear closed form.
pub fn solve_unit_ball(obj: &OptimisticObjective) -> SolveResult {
    let d = obj.c_hat.len();
    let v = &obj.c_hat + &obj.ball.center;
    if obj.ball.radius_sq == 0.0 {
        let norm = v.norm();
        let w = if norm > 1e-12 {
            -&v / norm
        } else {
            let mut e = DVector::zeros(d);
            e[0] = 1.0;
            e
        };
        let value = v.dot(&w);
        return SolveResult {
            w,
            value,
            nu: obj.ball.center.clone(),
            method: SolveMethod::ClosedForm,
            n_restarts_used: 0,
        };
    }

    // Parametrize the ellipsoid as nu = center + sqrt(beta) A^-1/2 p with
    // ||p|| <= 1; maximizing ||v + sqrt(beta) A^-1/2 p||^2 then minimizes
    // the quadratic -beta p'A^-1 p - 2 sqrt(beta) (A^-1/2 v)' p.
    let beta = obj.ball.radius_sq;
    let sr = beta.sqrt();
    let eig_a = obj.ball.a.clone().symmetric_eigen();
    let lam = &eig_a.eigenvalues;
    let qt_v = eig_a.eigenvectors.transpose() * &v;
    let h_eig = SymmetricEigen {
        eigenvectors: eig_a.eigenvectors.clone(),
        eigenvalues: DVector::from_fn(d, |k, _| -beta / lam[k]),
    };
    let b = &eig_a.eigenvectors
        * DVector::from_fn(d, |k, _| -2.0 * sr * qt_v[k] / lam[k].sqrt());
    let p = trs_minimize(&h_eig, &b);
    let qt_p = eig_a.eigenvectors.transpose() * &p;
    let y = &eig_a.eigenvectors * DVector::from_fn(d, |k, _| sr * qt_p[k] / lam[k].sqrt());

    let r_vec = &v + &y;
    let rnorm = r_vec.norm();
    let w = if rnorm > 1e-12 {
        -&r_vec / rnorm
    } else {
        let mut e = DVector::zeros(d);
        e[0] = 1.0;
        e
    };
    let (inner, nu) = inner_min(&obj.ball, &w);
    let value = obj.c_hat.dot(&w) + inner;
    SolveResult {
        w,
        value,
        nu,
        method: SolveMethod::TrustRegion,
        n_restarts_used: 0,
    }
}

/// Minimizes the optimistic objective over an explicit action list.
///
/// With `per_action_c_hat` present, each action is scored with its own
/// predicted label (the action-dependent setting); otherwise the shared
/// `c_hat` applies. Exact enumeration; ties break to the lowest index.
pub fn solve_finite(
    obj: &OptimisticObjective,
    actions: &[DVector<f64>],
    per_action_c_hat: Option<&[DVector<f64>]>,
) -> SolveResult {
    assert!(!actions.is_empty(), "action list must be non-empty");
    if let Some(preds) = per_action_c_hat {
        assert_eq!(preds.len(), actions.len(), "one prediction per action");
    }
    let chol = obj
        .ball
        .a
        .clone()
        .cholesky()
        .expect("confidence matrix is positive definite");
    let sr = obj.ball.radius_sq.sqrt();
    let mut buf = DVector::zeros(actions[0].len());
    let mut best_k = 0;
    let mut best_val = f64::INFINITY;
    for (k, w) in actions.iter().enumerate() {
        let c_k = per_action_c_hat.map_or(&obj.c_hat, |preds| &preds[k]);
        buf.copy_from(w);
        chol.solve_mut(&mut buf);
        let qf = w.dot(&buf).max(0.0);
        let val = c_k.dot(w) + obj.ball.center.dot(w) - sr * qf.sqrt();
        if val < best_val {
            best_val = val;
            best_k = k;
        }
    }
    let w = actions[best_k].clone();
    let c_best = per_action_c_hat.map_or(&obj.c_hat, |preds| &preds[best_k]);
    let (inner, nu) = inner_min(&obj.ball, &w);
    let value = c_best.dot(&w) + inner;
    SolveResult {
        w,
        value,
        nu,
        method: SolveMethod::Enumeration,
        n_restarts_used: 0,
    }
}

/// Minimizes `(F_x + G w + mu)' w = w' sym(G) w + (F_x + mu)' w` over the
/// unit ball: the trust-region subproblem, solved exactly through the
/// eigendecomposition of the symmetric part (interior, boundary, and hard
/// cases).
pub fn solve_quadratic_ball(
    f_x: &DVector<f64>,
    g: &DMatrix<f64>,
    mu: &DVector<f64>,
) -> SolveResult {
    let h = (g + g.transpose()) * 0.5;
    let eig = h.symmetric_eigen();
    let b = f_x + mu;
    let w = trs_minimize(&eig, &b);
    let nu = g * &w;
    let value = (&b + &nu).dot(&w);
    SolveResult {
        w,
        value,
        nu,
        method: SolveMethod::TrustRegion,
        n_restarts_used: 0,
    }
}

/// Minimizes `w' sym(G_hat) w + (c_lin + center)' w - sqrt(radius_sq)
/// ||w||_{A^-1}` over the unit ball: the optimistic objective of the
/// continuous action-dependent setting.
///
/// The ellipsoid-support term is concave, so each start runs a
/// majorize-minimize loop: linearize the support term at the current
/// iterate and solve the resulting exact trust-region subproblem, which
/// decreases the true objective monotonically. Multistart over the
/// zero-radius solution, `-v/||v||`, and random unit vectors.
pub fn solve_quadratic_optimistic(
    c_lin: &DVector<f64>,
    g_hat: &DMatrix<f64>,
    ball: &ConfidenceBall,
    cfg: &SolverConfig,
) -> SolveResult {
    let d = c_lin.len();
    let h = (g_hat + g_hat.transpose()) * 0.5;
    let eig = h.clone().symmetric_eigen();
    let chol = ball
        .a
        .clone()
        .cholesky()
        .expect("confidence matrix is positive definite");
    let sr = ball.radius_sq.sqrt();
    let v = c_lin + &ball.center;

    let mut buf = DVector::zeros(d);
    let mut value_of = |w: &DVector<f64>| -> f64 {
        buf.copy_from(w);
        chol.solve_mut(&mut buf);
        w.dot(&(&h * w)) + v.dot(w) - sr * w.dot(&buf).max(0.0).sqrt()
    };

    let mut starts: Vec<DVector<f64>> = Vec::with_capacity(2 * d + cfg.restarts + 2);
    starts.push(trs_minimize(&eig, &v));
    let vnorm = v.norm();
    if vnorm > 1e-12 {
        starts.push(-&v / vnorm);
    }
    for k in 0..d {
        let e: DVector<f64> = eig.eigenvectors.column(k).into();
        starts.push(-&e);
        starts.push(e);
    }
    let mut rng = seed::rng(cfg.seed);
    for _ in 0..cfg.restarts {
        starts.push(random_unit_vector(d, &mut rng));
    }

    let n_restarts_used = starts.len();
    let mut best_w = starts[0].clone();
    let mut best_val = f64::INFINITY;
    for start in &starts {
        let mut w = start.clone();
        let mut val = value_of(&w);
        for _ in 0..60 {
            let mut lin = v.clone();
            let mut ainv_w = w.clone();
            chol.solve_mut(&mut ainv_w);
            let qf = w.dot(&ainv_w);
            if sr > 0.0 && qf > 1e-24 {
                lin.axpy(-sr / qf.sqrt(), &ainv_w, 1.0);
            }
            let w_next = trs_minimize(&eig, &lin);
            let val_next = value_of(&w_next);
            if val_next >= val - 1e-12 {
                break;
            }
            w = w_next;
            val = val_next;
        }
        if val < best_val {
            best_val = val;
            best_w = w;
        }
    }

    let (_, nu) = inner_min(ball, &best_w);
    let value = (c_lin + g_hat * &best_w + &nu).dot(&best_w);
    SolveResult {
        w: best_w,
        value,
        nu,
        method: SolveMethod::Multistart,
        n_restarts_used,
    }
}

/// Exact minimizer of `w' H w + b' w` over the unit ball, given the
/// eigendecomposition of `H`.
///
/// Standard secular-equation treatment: try the interior stationary point
/// when `H` is positive definite; otherwise find the boundary multiplier
/// `nu` with `sum b_k^2 / (2 lambda_k + nu)^2 = 1` by safeguarded
/// bisection, handling the hard case (no component along the minimal
/// eigenspace) by adding a minimal-eigenvector direction.
fn trs_minimize(eig: &SymmetricEigen<f64, Dyn>, b: &DVector<f64>) -> DVector<f64> {
    let lam = &eig.eigenvalues;
    let q = &eig.eigenvectors;
    let d = lam.len();
    let bt = q.transpose() * b;
    let lam_min = lam.min();

    if lam_min > 0.0 {
        let wt = DVector::from_fn(d, |k, _| -bt[k] / (2.0 * lam[k]));
        if wt.norm() <= 1.0 {
            return q * wt;
        }
    }

    let lo = (-2.0 * lam_min).max(0.0);
    let scale = lam.iter().fold(1.0_f64, |a, &x| a.max(x.abs()));
    let group_eps = 1e-10 * scale;
    let phi = |nu: f64| -> f64 {
        let mut total = 0.0;
        for k in 0..d {
            let denom = 2.0 * lam[k] + nu;
            if bt[k] == 0.0 {
                continue;
            }
            if denom.abs() < 1e-300 {
                return f64::INFINITY;
            }
            total += (bt[k] / denom).powi(2);
        }
        total
    };

    if lo > 0.0 {
        let b_norm_sq = bt.norm_squared();
        let min_energy: f64 = (0..d)
            .filter(|&k| (2.0 * lam[k] + lo).abs() <= group_eps)
            .map(|k| bt[k] * bt[k])
            .sum();
        if min_energy <= 1e-24 * b_norm_sq.max(1.0) {
            let rest: f64 = (0..d)
                .filter(|&k| (2.0 * lam[k] + lo).abs() > group_eps)
                .map(|k| (bt[k] / (2.0 * lam[k] + lo)).powi(2))
                .sum();
            if rest < 1.0 {
                let tau = (1.0 - rest).sqrt();
                let mut wt = DVector::zeros(d);
                let mut placed = false;
                for k in 0..d {
                    if (2.0 * lam[k] + lo).abs() <= group_eps {
                        if !placed {
                            wt[k] = tau;
                            placed = true;
                        }
                    } else {
                        wt[k] = -bt[k] / (2.0 * lam[k] + lo);
                    }
                }
                return q * wt;
            }
        }
    }

    let mut hi = lo + 1.0;
    while phi(hi) > 1.0 && hi < 1e300 {
        hi = lo + (hi - lo) * 2.0;
    }
    let mut a = lo;
    let mut c = hi;
    for _ in 0..200 {
        let mid = 0.5 * (a + c);
        if phi(mid) > 1.0 {
            a = mid;
        } else {
            c = mid;
        }
    }
    let nu = c;
    let wt = DVector::from_fn(d, |k, _| {
        let denom = 2.0 * lam[k] + nu;
        if denom.abs() < 1e-300 {
            0.0
        } else {
            -bt[k] / denom
        }
    });
    q * wt
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

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ball(center: Vec<f64>, a: DMatrix<f64>, radius_sq: f64) -> ConfidenceBall {
        ConfidenceBall {
            center: DVector::from_vec(center),
            a,
            radius_sq,
        }
    }

    fn random_spd(d: usize, rng: &mut impl Rng) -> DMatrix<f64> {
        let m = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        m.transpose() * &m + DMatrix::identity(d, d) * 0.1
    }

    /// Uniform draw from the ellipsoid `(nu - center)' A (nu - center) <= r`.
    fn sample_in_ball(b: &ConfidenceBall, rng: &mut impl Rng) -> DVector<f64> {
        let d = b.center.len();
        let dir = random_unit_vector(d, rng) * rng.random_range(0.0..1.0_f64);
        let eig = b.a.clone().symmetric_eigen();
        let mut scaled = DVector::zeros(d);
        for k in 0..d {
            let col: DVector<f64> = eig.eigenvectors.column(k).into();
            scaled += col * (dir[k] / eig.eigenvalues[k].sqrt());
        }
        &b.center + scaled * b.radius_sq.sqrt()
    }

    #[test]
    fn inner_min_unit_ball_support() {
        let b = ball(vec![0.0, 0.0], DMatrix::identity(2, 2), 1.0);
        let (value, nu) = inner_min(&b, &DVector::from_vec(vec![1.0, 0.0]));
        assert_relative_eq!(value, -1.0, epsilon = 1e-12);
        assert_relative_eq!(nu, DVector::from_vec(vec![-1.0, 0.0]), epsilon = 1e-12);
    }

    #[test]
    fn inner_min_stretched_ellipsoid() {
        let b = ball(vec![1.0, 0.0], DMatrix::identity(2, 2) * 2.0, 4.0);
        let (value, nu) = inner_min(&b, &DVector::from_vec(vec![0.0, 1.0]));
        assert_relative_eq!(value, -2.0_f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(nu[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(nu[1], -(2.0_f64.sqrt()), epsilon = 1e-12);
    }

    #[test]
    fn inner_min_degenerate_radius_returns_center() {
        let b = ball(vec![0.3, -0.7], DMatrix::identity(2, 2), 0.0);
        for w in [
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![-0.6, 0.8]),
        ] {
            let (value, nu) = inner_min(&b, &w);
            assert_relative_eq!(value, b.center.dot(&w), epsilon = 1e-12);
            assert_eq!(nu, b.center);
        }
    }

    #[test]
    fn inner_min_zero_action() {
        let b = ball(vec![0.3, -0.7], DMatrix::identity(2, 2), 2.0);
        let (value, nu) = inner_min(&b, &DVector::zeros(2));
        assert_eq!(value, 0.0);
        assert_eq!(nu, b.center);
    }

    #[test]
    fn inner_min_lower_bounds_sampled_members() {
        let mut rng = seed::rng(301);
        for _ in 0..20 {
            let d = rng.random_range(2..5);
            let b = ConfidenceBall {
                center: DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)),
                a: random_spd(d, &mut rng),
                radius_sq: rng.random_range(0.1..4.0),
            };
            let w = random_unit_vector(d, &mut rng);
            let (value, nu_star) = inner_min(&b, &w);
            assert!(b.contains(&nu_star), "nu* must lie in the ball");
            for _ in 0..1000 {
                let nu = sample_in_ball(&b, &mut rng);
                assert!(nu.dot(&w) >= value - 1e-9);
            }
        }
    }

    #[test]
    fn unit_ball_zero_radius_is_the_linear_closed_form() {
        let obj = OptimisticObjective {
            c_hat: DVector::from_vec(vec![3.0, 4.0]),
            ball: ball(vec![0.0, 0.0], DMatrix::identity(2, 2), 0.0),
        };
        let r = solve_unit_ball(&obj);
        assert_eq!(r.method, SolveMethod::ClosedForm);
        assert_relative_eq!(r.w[0], -0.6, epsilon = 1e-12);
        assert_relative_eq!(r.w[1], -0.8, epsilon = 1e-12);
        assert_relative_eq!(r.value, -5.0, epsilon = 1e-9);
    }

    #[test]
    fn unit_ball_pure_exploration_tie() {
        let obj = OptimisticObjective {
            c_hat: DVector::zeros(2),
            ball: ball(vec![0.0, 0.0], DMatrix::identity(2, 2), 1.0),
        };
        let r = solve_unit_ball(&obj);
        assert_relative_eq!(r.value, -1.0, epsilon = 1e-9);
        assert_relative_eq!(r.w.norm(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn unit_ball_one_dimensional_sign_choice() {
        let obj = OptimisticObjective {
            c_hat: DVector::from_vec(vec![0.5]),
            ball: ball(vec![0.0], DMatrix::from_vec(1, 1, vec![4.0]), 1.0),
        };
        let r = solve_unit_ball(&obj);
        assert_relative_eq!(r.w[0], -1.0, epsilon = 1e-9);
        assert_relative_eq!(r.value, -1.0, epsilon = 1e-9);
    }

    #[test]
    fn unit_ball_result_lower_bounds_random_directions() {
        let mut rng = seed::rng(302);
        for trial in 0..10 {
            let d = 4;
            let obj = OptimisticObjective {
                c_hat: DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)),
                ball: ConfidenceBall {
                    center: DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)),
                    a: random_spd(d, &mut rng),
                    radius_sq: rng.random_range(0.0..2.0),
                },
            };
            let r = solve_unit_ball(&obj);
            let v = &obj.c_hat + &obj.ball.center;
            let chol = obj.ball.a.clone().cholesky().unwrap();
            for _ in 0..1000 {
                let w = random_unit_vector(d, &mut rng);
                let mut buf = w.clone();
                chol.solve_mut(&mut buf);
                let g = v.dot(&w) - obj.ball.radius_sq.sqrt() * w.dot(&buf).sqrt();
                assert!(
                    r.value <= g + 1e-9,
                    "trial {trial}: solver value {} beaten by sample {g}",
                    r.value
                );
            }
        }
    }

    #[test]
    fn unit_ball_matches_dense_angular_sweep_in_2d() {
        let mut rng = seed::rng(303);
        for _ in 0..5 {
            let obj = OptimisticObjective {
                c_hat: DVector::from_fn(2, |_, _| rng.sample::<f64, _>(StandardNormal)),
                ball: ConfidenceBall {
                    center: DVector::from_fn(2, |_, _| rng.sample::<f64, _>(StandardNormal)),
                    a: random_spd(2, &mut rng),
                    radius_sq: rng.random_range(0.1..2.0),
                },
            };
            let r = solve_unit_ball(&obj);
            let v = &obj.c_hat + &obj.ball.center;
            let chol = obj.ball.a.clone().cholesky().unwrap();
            let mut sweep_min = f64::INFINITY;
            for k in 0..10_000 {
                let theta = 2.0 * std::f64::consts::PI * (k as f64) / 10_000.0;
                let w = DVector::from_vec(vec![theta.cos(), theta.sin()]);
                let mut buf = w.clone();
                chol.solve_mut(&mut buf);
                sweep_min = sweep_min
                    .min(v.dot(&w) - obj.ball.radius_sq.sqrt() * w.dot(&buf).sqrt());
            }
            assert!(
                r.value <= sweep_min + 1e-6,
                "solver {} vs sweep {} (gap {:.3e})",
                r.value,
                sweep_min,
                r.value - sweep_min
            );
        }
    }

    #[test]
    fn unit_ball_is_deterministic() {
        let mut rng = seed::rng(304);
        let obj = OptimisticObjective {
            c_hat: DVector::from_fn(3, |_, _| rng.sample::<f64, _>(StandardNormal)),
            ball: ConfidenceBall {
                center: DVector::from_fn(3, |_, _| rng.sample::<f64, _>(StandardNormal)),
                a: random_spd(3, &mut rng),
                radius_sq: 1.3,
            },
        };
        let r1 = solve_unit_ball(&obj);
        let r2 = solve_unit_ball(&obj);
        assert_eq!(r1.w, r2.w);
        assert_eq!(r1.value, r2.value);
        assert_eq!(r1.method, SolveMethod::TrustRegion);
    }

    #[test]
    fn finite_enumeration_matches_independent_inner_minimization() {
        let mut rng = seed::rng(305);
        for _ in 0..50 {
            let d = 3;
            let n_actions = rng.random_range(2..8);
            let actions: Vec<DVector<f64>> = (0..n_actions)
                .map(|_| random_unit_vector(d, &mut rng) * rng.random_range(0.2..1.0_f64))
                .collect();
            let obj = OptimisticObjective {
                c_hat: DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)),
                ball: ConfidenceBall {
                    center: DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)),
                    a: random_spd(d, &mut rng),
                    radius_sq: rng.random_range(0.0..2.0),
                },
            };
            let r = solve_finite(&obj, &actions, None);
            let mut oracle_k = 0;
            let mut oracle_val = f64::INFINITY;
            for (k, w) in actions.iter().enumerate() {
                let (inner, _) = inner_min(&obj.ball, w);
                let val = obj.c_hat.dot(w) + inner;
                if val < oracle_val {
                    oracle_val = val;
                    oracle_k = k;
                }
            }
            assert_eq!(r.w, actions[oracle_k]);
            assert_relative_eq!(r.value, oracle_val, epsilon = 1e-12);
        }
    }

    #[test]
    fn finite_ties_break_to_the_lowest_index() {
        let w = DVector::from_vec(vec![0.5, 0.5]);
        let actions = vec![w.clone(), w.clone()];
        let obj = OptimisticObjective {
            c_hat: DVector::from_vec(vec![1.0, 0.0]),
            ball: ball(vec![0.0, 0.0], DMatrix::identity(2, 2), 1.0),
        };
        let r = solve_finite(&obj, &actions, None);
        assert_eq!(r.w, actions[0]);
    }

    #[test]
    fn finite_uses_per_action_predictions_when_supplied() {
        let e1 = DVector::from_vec(vec![1.0, 0.0]);
        let e2 = DVector::from_vec(vec![0.0, 1.0]);
        let obj = OptimisticObjective {
            c_hat: DVector::zeros(2),
            ball: ball(vec![0.0, 0.0], DMatrix::identity(2, 2), 0.0),
        };
        let preds = vec![
            DVector::from_vec(vec![0.3, 0.0]),
            DVector::from_vec(vec![0.0, -0.2]),
        ];
        let r = solve_finite(&obj, &[e1, e2.clone()], Some(&preds));
        assert_eq!(r.w, e2);
        assert_relative_eq!(r.value, -0.2, epsilon = 1e-12);
    }

    #[test]
    fn quadratic_ball_reduces_to_linear_when_g_is_zero() {
        let f_x = DVector::from_vec(vec![3.0, 4.0]);
        let r = solve_quadratic_ball(&f_x, &DMatrix::zeros(2, 2), &DVector::zeros(2));
        assert_relative_eq!(r.w[0], -0.6, epsilon = 1e-9);
        assert_relative_eq!(r.w[1], -0.8, epsilon = 1e-9);
        assert_relative_eq!(r.value, -5.0, epsilon = 1e-9);
        assert_eq!(r.method, SolveMethod::TrustRegion);
    }

    #[test]
    fn quadratic_ball_interior_minimum() {
        let r = solve_quadratic_ball(
            &DVector::zeros(2),
            &DMatrix::identity(2, 2),
            &DVector::zeros(2),
        );
        assert_relative_eq!(r.w.norm(), 0.0, epsilon = 1e-9);
        assert_relative_eq!(r.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn quadratic_ball_concave_case_reaches_the_sphere() {
        let r = solve_quadratic_ball(
            &DVector::zeros(2),
            &(-DMatrix::identity(2, 2)),
            &DVector::zeros(2),
        );
        assert_relative_eq!(r.w.norm(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(r.value, -1.0, epsilon = 1e-9);
    }

    #[test]
    fn quadratic_ball_hard_case() {
        // sym(G) = diag(-2, 1) and b orthogonal to the minimal eigenspace.
        let g = DMatrix::from_row_slice(2, 2, &[-2.0, 0.0, 0.0, 1.0]);
        let f_x = DVector::from_vec(vec![0.0, 0.1]);
        let r = solve_quadratic_ball(&f_x, &g, &DVector::zeros(2));
        assert_relative_eq!(r.w.norm(), 1.0, epsilon = 1e-9);
        let expected_w2: f64 = -0.1 / 6.0;
        let expected_w1 = (1.0 - expected_w2 * expected_w2).sqrt();
        assert_relative_eq!(r.w[0].abs(), expected_w1, epsilon = 1e-9);
        assert_relative_eq!(r.w[1], expected_w2, epsilon = 1e-9);
        let expected_value =
            -2.0 * expected_w1 * expected_w1 + expected_w2 * expected_w2 + 0.1 * expected_w2;
        assert_relative_eq!(r.value, expected_value, epsilon = 1e-9);
    }

    #[test]
    fn quadratic_ball_beats_dense_sampling() {
        let mut rng = seed::rng(306);
        for _ in 0..5 {
            let d = 3;
            let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
            let f_x = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
            let mu = DVector::from_fn(d, |_, _| 0.3 * rng.sample::<f64, _>(StandardNormal));
            let r = solve_quadratic_ball(&f_x, &g, &mu);
            let h = (&g + g.transpose()) * 0.5;
            let b = &f_x + &mu;
            let mut sample_min = f64::INFINITY;
            for _ in 0..100_000 {
                let w = random_unit_vector(d, &mut rng) * rng.random_range(0.0..1.0_f64);
                sample_min = sample_min.min(w.dot(&(&h * &w)) + b.dot(&w));
            }
            assert!(
                r.value <= sample_min + 1e-3,
                "solver {} vs sampled {}",
                r.value,
                sample_min
            );
        }
    }

    #[test]
    fn quadratic_optimistic_with_zero_radius_matches_the_exact_subproblem() {
        let mut rng = seed::rng(307);
        for _ in 0..10 {
            let d = 3;
            let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
            let c_lin = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
            let center = DVector::from_fn(d, |_, _| 0.2 * rng.sample::<f64, _>(StandardNormal));
            let b = ConfidenceBall {
                center: center.clone(),
                a: random_spd(d, &mut rng),
                radius_sq: 0.0,
            };
            let opt = solve_quadratic_optimistic(&c_lin, &g, &b, &SolverConfig::default());
            let exact = solve_quadratic_ball(&(&c_lin + &center), &g, &DVector::zeros(d));
            assert_relative_eq!(opt.value, exact.value, epsilon = 1e-6);
        }
    }

    #[test]
    fn quadratic_optimistic_lower_bounds_dense_sampling() {
        let mut rng = seed::rng(308);
        for _ in 0..5 {
            let d = 3;
            let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
            let c_lin = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
            let b = ConfidenceBall {
                center: DVector::from_fn(d, |_, _| 0.3 * rng.sample::<f64, _>(StandardNormal)),
                a: random_spd(d, &mut rng),
                radius_sq: rng.random_range(0.1..1.5),
            };
            let r = solve_quadratic_optimistic(&c_lin, &g, &b, &SolverConfig::default());
            let h = (&g + g.transpose()) * 0.5;
            let v = &c_lin + &b.center;
            let chol = b.a.clone().cholesky().unwrap();
            let sr = b.radius_sq.sqrt();
            let mut sample_min = f64::INFINITY;
            for _ in 0..20_000 {
                let w = random_unit_vector(d, &mut rng) * rng.random_range(0.0..1.0_f64);
                let mut buf = w.clone();
                chol.solve_mut(&mut buf);
                let val = w.dot(&(&h * &w)) + v.dot(&w) - sr * w.dot(&buf).max(0.0).sqrt();
                sample_min = sample_min.min(val);
            }
            assert!(
                r.value <= sample_min + 1e-3,
                "solver {} vs sampled {}",
                r.value,
                sample_min
            );
        }
    }

    #[test]
    fn solve_results_keep_w_feasible_and_value_consistent() {
        let mut rng = seed::rng(309);
        for _ in 0..20 {
            let d = 4;
            let obj = OptimisticObjective {
                c_hat: DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)),
                ball: ConfidenceBall {
                    center: DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)),
                    a: random_spd(d, &mut rng),
                    radius_sq: rng.random_range(0.0..2.0),
                },
            };
            let r = solve_unit_ball(&obj);
            assert!(r.w.norm() <= 1.0 + 1e-9);
            assert!(obj.ball.contains(&r.nu));
            assert_relative_eq!(
                r.value,
                (&obj.c_hat + &r.nu).dot(&r.w),
                epsilon = 1e-9
            );
        }
    }
}
