//! Cross-checks between the closed-form solver, coordinate descent and the
//! proximal-gradient oracle.

use paretofit::linalg::{norm2, sub};
use paretofit::rng::CounterRng;
use paretofit::solvers::{
    coordinate_descent_l1, kkt_violation_l1, lasso, mixture_quadratic_minimizer,
    proximal_gradient_l1, EIGEN_CLIP,
};
use paretofit::{
    datagen, grad_objective, Mat, ObjectiveTuple, PenalizedQuadratic, QuadraticObjective,
    SimplexWeights, SolverSettings,
};

fn random_psd(d: usize, rng: &mut CounterRng) -> Mat {
    let extra = d + 2 + (d / 2);
    let x = Mat::from_fn(extra, d, |_, _| rng.normal());
    x.gram(1.0 / extra as f64)
}

#[test]
fn mixture_minimizer_is_stationary_on_random_instances() {
    let mut rng = CounterRng::new(100, "solver-stationarity");
    for trial in 0..100 {
        let d = 2 + rng.below(49); // up to 50
        let k = 1 + rng.below(4);
        let objs: Vec<QuadraticObjective> = (0..k)
            .map(|_| {
                QuadraticObjective::new(random_psd(d, &mut rng), rng.normal_vec(d), 0.0).unwrap()
            })
            .collect();
        let tuple = ObjectiveTuple::new(objs).unwrap();
        let lambda =
            SimplexWeights::normalized((0..k).map(|_| 0.05 + rng.uniform()).collect()).unwrap();
        let theta = mixture_quadratic_minimizer(&tuple, &lambda).unwrap();
        let mut grad = vec![0.0; d];
        for (j, obj) in tuple.iter().enumerate() {
            let g = grad_objective(&theta, obj).unwrap();
            for (gi, gj) in grad.iter_mut().zip(&g) {
                *gi += lambda.get(j) * gj;
            }
        }
        let bound = 1e-8 * (1.0 + norm2(&theta));
        assert!(
            norm2(&grad) <= bound,
            "trial {trial}: gradient norm {} > {bound}",
            norm2(&grad)
        );
    }
}

#[test]
fn coordinate_descent_matches_proximal_gradient_on_fifty_instances() {
    let mut rng = CounterRng::new(21, "solver-cd-vs-pg");
    let settings = SolverSettings::default();
    let oracle = SolverSettings {
        tol: 1e-12,
        ..settings
    };
    for trial in 0..50 {
        let d = 2 + rng.below(49);
        let a = random_psd(d, &mut rng);
        let linear = rng.normal_vec(d);
        let alpha = 0.01 + rng.uniform();
        let problem = PenalizedQuadratic::new(a, linear, alpha).unwrap();
        let cd = coordinate_descent_l1(&problem, &vec![0.0; d], &settings).unwrap();
        let pg = proximal_gradient_l1(&problem, &vec![0.0; d], &oracle).unwrap();
        assert!(
            cd.converged && pg.converged,
            "trial {trial} did not converge"
        );
        let gap = (problem.objective(&cd.solution) - problem.objective(&pg.solution)).abs();
        assert!(gap <= 1e-8, "trial {trial}: objective gap {gap}");
        let kkt = kkt_violation_l1(&problem, &cd.solution);
        assert!(
            kkt <= 10.0 * settings.tol,
            "trial {trial}: KKT violation {kkt}"
        );
    }
}

#[test]
fn unpenalized_coordinate_descent_matches_direct_solve() {
    let mut rng = CounterRng::new(33, "solver-cd-vs-solve");
    let settings = SolverSettings::default();
    for trial in 0..50 {
        let d = 2 + rng.below(30);
        let n = d + 5 + rng.below(20);
        let x = Mat::from_fn(n, d, |_, _| rng.normal());
        let y: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let run = lasso(&x, &y, 0.0, &settings).unwrap();
        let gram = x.gram(1.0 / n as f64);
        let mut linear = x.tr_matvec(&y);
        for v in &mut linear {
            *v /= n as f64;
        }
        let direct = gram.solve_sym(&linear, EIGEN_CLIP);
        let err = norm2(&sub(&run.solution, &direct));
        assert!(err <= 1e-8, "trial {trial}: deviation {err}");
    }
}

#[test]
fn lasso_error_bound_on_fixed_designs() {
    // Fixed design with condition bound gamma, 1-sparse truth, noise 0.5:
    // the estimation error stays within 3 gamma alpha for the prescribed
    // penalty on at least 18 of 20 seeds.
    let (d, n, gamma, sigma) = (40usize, 60usize, 2.0f64, 0.5f64);
    let alpha = 6.0 * gamma * sigma * (2.0 * (d as f64).ln() / n as f64).sqrt();
    let settings = SolverSettings::default();
    let mut hits = 0;
    for seed in 0..20u64 {
        let x = datagen::fixed_design_matrix(d, n, gamma, 7000 + seed).unwrap();
        let beta = datagen::random_sparse_vector(d, 1, 7100 + seed).unwrap();
        let mut rng = CounterRng::new(seed, "lasso-bound-noise");
        let mut y = x.matvec(&beta);
        for v in &mut y {
            *v += sigma * rng.normal();
        }
        let run = lasso(&x, &y, alpha, &settings).unwrap();
        let err = norm2(&sub(&run.solution, &beta));
        if err <= 3.0 * gamma * alpha {
            hits += 1;
        }
    }
    assert!(hits >= 18, "bound held on only {hits}/20 seeds");
}

#[test]
fn proximal_gradient_handles_scalar_and_identity_cases() {
    let settings = SolverSettings {
        tol: 1e-12,
        ..SolverSettings::default()
    };
    let p = PenalizedQuadratic::new(Mat::identity(1), vec![2.0], 1.0).unwrap();
    let run = proximal_gradient_l1(&p, &[0.0], &settings).unwrap();
    assert!((run.solution[0] - 1.5).abs() < 1e-9);

    let mut rng = CounterRng::new(4, "solver-pg-ident");
    let v = rng.normal_vec(6);
    let p = PenalizedQuadratic::new(Mat::identity(6), v.clone(), 0.0).unwrap();
    let run = proximal_gradient_l1(&p, &vec![0.0; 6], &settings).unwrap();
    assert!(norm2(&sub(&run.solution, &v)) < 1e-9);
}
