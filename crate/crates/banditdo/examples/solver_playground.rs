//! The optimization subproblems in isolation, on one hand-built instance.
//!
//! All solvers minimize an optimistic cost: the predicted label plus the
//! most favorable bandit vector inside a confidence ellipsoid. Over the
//! unit ball the minimax problem reduces to an exact trust-region
//! subproblem; over a finite set it is exact enumeration; with a zero
//! radius the answer is closed-form.
//!
//! ```sh
//! cargo run --example solver_playground
//! ```

use banditdo::ofu::ConfidenceBall;
use banditdo::solver::{solve_finite, solve_quadratic_ball, solve_unit_ball, OptimisticObjective};
use nalgebra::{DMatrix, DVector};

fn main() {
    let c_hat = DVector::from_vec(vec![1.0, -2.0, 0.5]);
    let ball = ConfidenceBall {
        center: DVector::from_vec(vec![0.2, 0.1, -0.3]),
        a: DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 9.0, 16.0])),
        radius_sq: 1.0,
    };
    let obj = OptimisticObjective {
        c_hat: c_hat.clone(),
        ball: ball.clone(),
    };

    let res = solve_unit_ball(&obj);
    println!("unit ball     [{}]", res.method);
    println!("  w     = {:?}", res.w.as_slice());
    println!("  value = {:.6}", res.value);

    let actions: Vec<DVector<f64>> = (0..3)
        .map(|k| DVector::from_fn(3, |i, _| if i == k { 1.0 } else { 0.0 }))
        .collect();
    let res = solve_finite(&obj, &actions, None);
    println!("\nbasis actions [{}]", res.method);
    println!("  w     = {:?}", res.w.as_slice());
    println!("  value = {:.6}", res.value);

    let mut certain = obj.clone();
    certain.ball.radius_sq = 0.0;
    let res = solve_unit_ball(&certain);
    println!("\nzero radius   [{}]", res.method);
    println!("  value = {:.6}  (equals -|c_hat + center| = {:.6})",
        res.value,
        -(&c_hat + &ball.center).norm()
    );

    let g = DMatrix::from_row_slice(3, 3, &[0.5, 0.2, 0.0, 0.2, -1.0, 0.1, 0.0, 0.1, 0.3]);
    let res = solve_quadratic_ball(&c_hat, &g, &ball.center);
    println!("\nquadratic     [{}]", res.method);
    println!("  w     = {:?}", res.w.as_slice());
    println!("  value = {:.6}", res.value);
}
