//! Acceptance suite: construction identities, solver equivalences,
//! inequality suites with computed constants, hypervolume oracles, the
//! worst-case separation experiment, both synthetic trend experiments,
//! hypernetwork fidelity and experiment determinism.
//!
//! Each criterion prints one `ACCEPTANCE <n> ... PASS` line (visible with
//! `--nocapture`) and asserts its stated tolerances and runtime budget.

use std::time::Instant;

use paretofit::datagen::{self, SyntheticInstance};
use paretofit::estimators::{self, ObjectiveDataset, ParameterEstimate};
use paretofit::experiments::{
    self, results_csv, AdversarialConfig, FairnessConfig, FairnessSource, FrontCompareConfig,
    HvReportConfig, MethodName, PenaltyConfig, SolverConfig, SynthSweepConfig, TrainConfig,
};
use paretofit::linalg::{norm2, sub};
use paretofit::metrics::{
    estimation_error, excess_scalarized, hypervolume_degradation_bound, hypervolume_exact_2d,
    hypervolume_mc, FrontPoint, HypervolumeSpec,
};
use paretofit::pareto_set::{train_hypernet_two_stage, Hypernetwork, SimplexGrid, TrainSettings};
use paretofit::rng::CounterRng;
use paretofit::solvers::{
    coordinate_descent_l1, kkt_violation_l1, mixture_quadratic_minimizer, proximal_gradient_l1,
    EIGEN_CLIP,
};
use paretofit::{
    eval_objective, eval_scalarized, regularity_of, Mat, ObjectiveTuple, PenalizedQuadratic,
    QuadraticObjective, ScalarizationKind, SimplexWeights, SolverSettings,
};

fn report(number: usize, name: &str, start: Instant, budget_secs: f64) {
    let elapsed = start.elapsed().as_secs_f64();
    println!("ACCEPTANCE {number:02} {name}: PASS ({elapsed:.2}s, budget {budget_secs}s)");
    assert!(
        elapsed < budget_secs,
        "criterion {number} exceeded its {budget_secs}s budget: {elapsed:.2}s"
    );
}

fn random_psd(d: usize, rng: &mut CounterRng) -> Mat {
    let m = d + 3;
    Mat::from_fn(m, d, |_, _| rng.normal()).gram(1.0 / m as f64)
}

/// Criterion 1: both worst-case constructions satisfy their defining
/// identities to 1e-10 on 200 random draws.
#[test]
fn acceptance_01_construction_identities() {
    let start = Instant::now();
    let mut rng = CounterRng::new(1, "acceptance-constructions");
    for trial in 0..200 {
        let d = 2 + rng.below(29);
        // Adversarial pair.
        let mut v = rng.normal_vec(d);
        let scale = 0.98 * rng.uniform() / norm2(&v);
        for x in &mut v {
            *x *= scale;
        }
        let lambda = SimplexWeights::pair(0.02 + 0.96 * rng.uniform()).unwrap();
        let gamma = 1.05 + 6.0 * rng.uniform();
        let inst = datagen::adversarial_instance(&v, &lambda, gamma).unwrap();
        let mut mix = inst.sigma1.clone();
        mix.scale(lambda.get(0));
        mix.add_scaled(&inst.sigma2, lambda.get(1));
        mix.add_scaled(&Mat::identity(d), -1.0);
        assert!(
            mix.frob_norm() <= 1e-10,
            "trial {trial}: weighted covariances deviate from identity by {}",
            mix.frob_norm()
        );
        let tuple = ObjectiveTuple::new(vec![
            QuadraticObjective::new(inst.sigma1.clone(), inst.beta1.clone(), 0.0).unwrap(),
            QuadraticObjective::new(inst.sigma2.clone(), inst.beta2.clone(), 0.0).unwrap(),
        ])
        .unwrap();
        let theta = mixture_quadratic_minimizer(&tuple, &lambda).unwrap();
        let dev = norm2(&sub(&theta, &v));
        assert!(dev <= 1e-10, "trial {trial}: minimizer off target by {dev}");

        // Rank-two necessity pair.
        let beta = {
            let mut b = rng.normal_vec(d);
            let n = norm2(&b);
            for x in &mut b {
                *x /= n;
            }
            b
        };
        let mut w = rng.normal_vec(d);
        let scale = 0.25 * rng.uniform() / norm2(&w);
        for x in &mut w {
            *x *= scale;
        }
        let (s1, s2) = datagen::necessity_instance(&w, &beta).unwrap();
        let mut a = s1.clone();
        a.add_scaled(&Mat::identity(d), -1.0);
        let av = a.matvec(&beta);
        assert!(
            norm2(&sub(&av, &w)) <= 1e-10,
            "trial {trial}: A(v) beta misses v"
        );
        let neg: Vec<f64> = beta.iter().map(|x| -x).collect();
        let tuple = ObjectiveTuple::new(vec![
            QuadraticObjective::new(s1, beta.clone(), 0.0).unwrap(),
            QuadraticObjective::new(s2, neg, 0.0).unwrap(),
        ])
        .unwrap();
        let theta =
            mixture_quadratic_minimizer(&tuple, &SimplexWeights::pair(0.5).unwrap()).unwrap();
        assert!(
            norm2(&sub(&theta, &w)) <= 1e-10,
            "trial {trial}: necessity minimizer off target"
        );
    }
    report(1, "construction identities", start, 5.0);
}

/// Criterion 2: coordinate descent and proximal gradient agree to 1e-8 in
/// objective value on 50 instances; unpenalized coordinate descent matches
/// the direct linear solve; converged runs satisfy the KKT check.
#[test]
fn acceptance_02_solver_equivalence() {
    let start = Instant::now();
    let mut rng = CounterRng::new(2, "acceptance-solvers");
    let settings = SolverSettings::default();
    let oracle = SolverSettings {
        tol: 1e-12,
        ..settings
    };
    for trial in 0..50 {
        let d = 2 + rng.below(49);
        // Eigenvalue-boxed draws keep the argmin comparison well posed.
        let a = datagen::random_covariance(d, 0.3, 3.0, rng.next_u64()).unwrap();
        let linear = rng.normal_vec(d);
        let alpha = 0.01 + rng.uniform();
        let problem = PenalizedQuadratic::new(a.clone(), linear.clone(), alpha).unwrap();
        let cd = coordinate_descent_l1(&problem, &vec![0.0; d], &settings).unwrap();
        let pg = proximal_gradient_l1(&problem, &vec![0.0; d], &oracle).unwrap();
        assert!(
            cd.converged && pg.converged,
            "trial {trial} non-convergence"
        );
        let gap = (problem.objective(&cd.solution) - problem.objective(&pg.solution)).abs();
        assert!(gap <= 1e-8, "trial {trial}: objective gap {gap}");
        assert!(
            kkt_violation_l1(&problem, &cd.solution) <= 10.0 * settings.tol,
            "trial {trial}: KKT violation"
        );
        // Unpenalized route against the eigen solve.
        let free = PenalizedQuadratic::new(a.clone(), linear.clone(), 0.0).unwrap();
        let run = coordinate_descent_l1(&free, &vec![0.0; d], &settings).unwrap();
        let direct = a.solve_sym(&linear, EIGEN_CLIP);
        let dev = norm2(&sub(&run.solution, &direct));
        assert!(dev <= 1e-8, "trial {trial}: direct-solve deviation {dev}");
        assert!(
            kkt_violation_l1(&free, &run.solution) <= 10.0 * settings.tol,
            "trial {trial}: unpenalized KKT violation"
        );
    }
    report(2, "solver equivalence", start, 30.0);
}

fn random_instance_with_constants(
    rng: &mut CounterRng,
    grid: &[SimplexWeights],
) -> (ObjectiveTuple, Vec<Vec<f64>>, Vec<Mat>) {
    let d = 4 + rng.below(37); // up to 40
    let eig_lo = 0.3 + 0.4 * rng.uniform();
    let eig_hi = eig_lo + 0.2 + 1.5 * rng.uniform();
    let seed = rng.next_u64();
    let mut betas = Vec::new();
    let mut covs = Vec::new();
    let mut objs = Vec::new();
    for k in 0..2u64 {
        let beta = datagen::random_sparse_vector_lane(d, 1 + (d / 4), seed, k).unwrap();
        let cov = datagen::random_covariance_lane(d, eig_lo, eig_hi, seed, k).unwrap();
        objs.push(QuadraticObjective::new(cov.clone(), beta.clone(), 0.25).unwrap());
        betas.push(beta);
        covs.push(cov);
    }
    let _ = grid;
    (ObjectiveTuple::new(objs).unwrap(), betas, covs)
}

/// Criterion 3: the strong-convexity propagation bound with explicitly
/// computed constants holds with zero violations over 100 perturbed
/// two-objective instances.
#[test]
fn acceptance_03_propagation_bound_suite() {
    let start = Instant::now();
    let mut rng = CounterRng::new(3, "acceptance-thm-bound");
    let grid: Vec<SimplexWeights> = (0..11)
        .map(|i| SimplexWeights::pair(i as f64 / 10.0).unwrap())
        .collect();
    let mut violations = 0usize;
    for _trial in 0..100 {
        let (tuple, betas, covs) = random_instance_with_constants(&mut rng, &grid);
        let d = tuple.dim();
        let constants = regularity_of(&tuple, &grid).unwrap();
        // Perturb coefficients freely and covariances by a PSD bump, so the
        // constants computed on the true tuple keep their meaning for the
        // perturbed parameters.
        let mut estimates = Vec::new();
        let mut param_errors = Vec::new();
        for k in 0..2 {
            let mut delta = rng.normal_vec(d);
            let scale = 0.3 * rng.uniform() / norm2(&delta);
            for v in &mut delta {
                *v *= scale;
            }
            let beta_hat: Vec<f64> = betas[k].iter().zip(&delta).map(|(b, z)| b + z).collect();
            let mut u = rng.normal_vec(d);
            let un = norm2(&u);
            for x in &mut u {
                *x /= un;
            }
            let eps = 0.2 * rng.uniform();
            let mut cov_hat = covs[k].clone();
            cov_hat.add_scaled(&Mat::outer(&u, &u, 1.0), eps);
            let mut dev = cov_hat.clone();
            dev.add_scaled(&covs[k], -1.0);
            param_errors.push(norm2(&sub(&beta_hat, &betas[k])) + dev.spectral_norm_sym());
            estimates.push(ParameterEstimate {
                beta_hat,
                cov_hat,
                mu_hat: None,
                noise_var: 0.0,
            });
        }
        for lambda in &grid {
            let star = mixture_quadratic_minimizer(&tuple, lambda).unwrap();
            let two_stage = estimators::two_stage(&estimates, lambda, &[0.0, 0.0]).unwrap();
            let lhs = estimation_error(&two_stage, &star).unwrap();
            let weighted: f64 = param_errors
                .iter()
                .enumerate()
                .map(|(k, e)| lambda.get(k) * e)
                .sum();
            let rhs = constants.lipschitz_param / constants.scalarized_convexity(lambda) * weighted;
            if lhs > rhs + 1e-9 {
                violations += 1;
            }
        }
    }
    assert_eq!(violations, 0, "{violations} bound violations");
    report(3, "propagation bound suite", start, 30.0);
}

/// Criterion 4: the three smoothness-based degradation inequalities hold on
/// 100 perturbed instances, with the front bound evaluated through exact
/// two-objective hypervolumes at `r = 2 max |front|_inf`.
#[test]
fn acceptance_04_degradation_suite() {
    let start = Instant::now();
    let mut rng = CounterRng::new(4, "acceptance-degradation");
    let grid: Vec<SimplexWeights> = (0..11)
        .map(|i| SimplexWeights::pair(i as f64 / 10.0).unwrap())
        .collect();
    for trial in 0..100 {
        let (tuple, _, _) = random_instance_with_constants(&mut rng, &grid);
        let d = tuple.dim();
        let constants = regularity_of(&tuple, &grid).unwrap();
        let mut theta_hats = Vec::new();
        let mut sup = 0.0f64;
        for lambda in &grid {
            let star = mixture_quadratic_minimizer(&tuple, lambda).unwrap();
            for v in tuple.values(&star).unwrap() {
                sup = sup.max(v);
            }
            let mut delta = rng.normal_vec(d);
            let scale = 0.05 / norm2(&delta);
            for v in &mut delta {
                *v *= scale;
            }
            let theta: Vec<f64> = star.iter().zip(&delta).map(|(s, z)| s + z).collect();
            // Item 1: excess against the weighted-smoothness bound.
            let excess = excess_scalarized(&theta, &tuple, lambda, ScalarizationKind::Linear)
                .unwrap()
                .value;
            let item1 = 0.5 * constants.scalarized_smoothness(lambda) * 0.05 * 0.05;
            assert!(
                excess <= item1 + 1e-10,
                "trial {trial}: item 1 violated ({excess} > {item1})"
            );
            // Item 2: per-objective degradation.
            for (k, obj) in tuple.iter().enumerate() {
                let degradation =
                    eval_objective(&theta, obj).unwrap() - eval_objective(&star, obj).unwrap();
                let item2 = constants.grad_sup[k] * 0.05 + 0.5 * constants.smoothness[k] * 0.0025;
                assert!(
                    degradation <= item2 + 1e-10,
                    "trial {trial}: item 2 violated for objective {k}"
                );
            }
            theta_hats.push(theta);
        }
        // Item 3: hypervolume degradation bound at the reference point
        // pinned by the front sup-norm.
        let r = 2.0 * sup;
        let reportout = hypervolume_degradation_bound(&tuple, &grid, &theta_hats, r).unwrap();
        assert!(
            reportout.holds,
            "trial {trial}: hypervolume bound violated (lhs {} < rhs {})",
            reportout.lhs, reportout.rhs
        );
    }
    report(4, "degradation suite", start, 60.0);
}

/// Criterion 5: Monte-Carlo hypervolume at 1e6 samples lands within 2% of
/// the exact sweep on five fixed fronts, and the exact sweep matches a
/// 2000x2000 rasterization within 2e-3.
#[test]
fn acceptance_05_hypervolume_oracle() {
    let start = Instant::now();
    let fronts: Vec<Vec<FrontPoint>> = vec![
        vec![FrontPoint::new(vec![0.0, 0.0]).unwrap()],
        vec![FrontPoint::new(vec![0.5, 0.5]).unwrap()],
        vec![
            FrontPoint::new(vec![0.2, 0.8]).unwrap(),
            FrontPoint::new(vec![0.5, 0.5]).unwrap(),
            FrontPoint::new(vec![0.8, 0.2]).unwrap(),
        ],
        vec![
            FrontPoint::new(vec![0.1, 0.9]).unwrap(),
            FrontPoint::new(vec![0.3, 0.4]).unwrap(),
            FrontPoint::new(vec![0.35, 0.35]).unwrap(),
            FrontPoint::new(vec![0.9, 0.05]).unwrap(),
        ],
        vec![
            FrontPoint::new(vec![0.05, 0.6]).unwrap(),
            FrontPoint::new(vec![0.6, 0.05]).unwrap(),
            FrontPoint::new(vec![0.4, 0.2]).unwrap(),
            FrontPoint::new(vec![0.2, 0.4]).unwrap(),
            FrontPoint::new(vec![0.7, 0.7]).unwrap(),
        ],
    ];
    for (i, front) in fronts.iter().enumerate() {
        let exact = hypervolume_exact_2d(front, 1.0).unwrap();
        // Rasterization oracle on cell centers.
        let cells = 2000usize;
        let mut covered = 0usize;
        for ix in 0..cells {
            let x = (ix as f64 + 0.5) / cells as f64;
            for iy in 0..cells {
                let y = (iy as f64 + 0.5) / cells as f64;
                if front
                    .iter()
                    .any(|p| p.values()[0] <= x && p.values()[1] <= y)
                {
                    covered += 1;
                }
            }
        }
        let raster = covered as f64 / (cells * cells) as f64;
        assert!(
            (raster - exact).abs() <= 2e-3,
            "front {i}: rasterization {raster} vs exact {exact}"
        );
        let mc = hypervolume_mc(
            front,
            &HypervolumeSpec {
                reference: 1.0,
                samples: 1_000_000,
                seed: 41 + i as u64,
            },
        )
        .unwrap();
        assert!(
            (mc - exact).abs() <= 0.02 * exact.max(1e-9),
            "front {i}: MC {mc} vs exact {exact}"
        );
    }
    report(5, "hypervolume oracle", start, 60.0);
}

/// Criterion 6: on worst-case covariance instances the two-stage median
/// squared error is at most a third of the best-penalty directly
/// regularized error over 20 seeds; with zero noise the two-stage recovery
/// is exact to 1e-8.
#[test]
fn acceptance_06_separation_experiment() {
    let start = Instant::now();
    let cfg = AdversarialConfig {
        base_seed: 500,
        ..AdversarialConfig::default()
    };
    let out = experiments::run_adversarial_contrast(&cfg).unwrap();
    let median_ts = out.summary["median_sq_error_two_stage"].as_f64().unwrap();
    let median_dr = out.summary["median_sq_error_direct_best_alpha"]
        .as_f64()
        .unwrap();
    assert!(
        median_ts <= median_dr / 3.0,
        "two-stage median {median_ts} not below a third of direct {median_dr}"
    );
    // Noiseless recovery.
    let noiseless = AdversarialConfig {
        noise_sd: 0.0,
        repeats: 3,
        base_seed: 900,
        ..AdversarialConfig::default()
    };
    let out = experiments::run_adversarial_contrast(&noiseless).unwrap();
    for row in out
        .rows
        .iter()
        .filter(|r| r.method == "two_stage" && r.metric == "sq_error")
    {
        assert!(
            row.value <= 1e-8,
            "seed {}: noiseless two-stage error {}",
            row.seed,
            row.value
        );
    }
    report(6, "separation experiment", start, 180.0);
}

/// Criterion 7: the sparsity-by-unlabeled sweep shows the predicted trends:
/// mean log-excess decreases in the unlabeled count and increases in the
/// sparsity (Spearman thresholds -0.5 / +0.5).
#[test]
fn acceptance_07_sweep_trend() {
    let start = Instant::now();
    let cfg = SynthSweepConfig {
        base_seed: 1000,
        ..SynthSweepConfig::default()
    };
    let out = experiments::run_synth_sweep(&cfg).unwrap();
    let vs_unlabeled = out.summary["spearman_vs_unlabeled"].as_f64().unwrap();
    let vs_sparsity = out.summary["spearman_vs_sparsity"].as_f64().unwrap();
    assert!(
        vs_unlabeled <= -0.5,
        "Spearman against unlabeled count is {vs_unlabeled}"
    );
    assert!(
        vs_sparsity >= 0.5,
        "Spearman against sparsity is {vs_sparsity}"
    );
    report(7, "sweep trend", start, 180.0);
}

/// Criterion 8: on the front comparison the two-stage mean excess is
/// strictly below direct regularization at equal weights and within 10% at
/// both endpoints.
#[test]
fn acceptance_08_front_compare_trend() {
    let start = Instant::now();
    let cfg = FrontCompareConfig {
        lambda_grid_size: 11, // includes (1/2, 1/2) exactly
        methods: vec![MethodName::TwoStage, MethodName::DirectRegularized],
        base_seed: 2000,
        ..FrontCompareConfig::default()
    };
    let out = experiments::run_front_compare(&cfg).unwrap();
    let curves = &out.summary["mean_excess"];
    let ts: Vec<f64> = curves["two_stage"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let dr: Vec<f64> = curves["direct_regularized"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let mid = 5usize; // lambda = (1/2, 1/2) on the 11-point grid
    assert!(
        ts[mid] < dr[mid],
        "two-stage mean excess {} not below direct {} at equal weights",
        ts[mid],
        dr[mid]
    );
    for idx in [0usize, 10usize] {
        let gap = (ts[idx] - dr[idx]).abs();
        let scale = ts[idx].abs().max(dr[idx].abs()).max(1e-12);
        assert!(
            gap <= 0.10 * scale,
            "endpoint {idx}: |{} - {}| exceeds 10%",
            ts[idx],
            dr[idx]
        );
    }
    report(8, "front comparison trend", start, 300.0);
}

/// Criterion 9: a 2000-step hypernetwork reproduces the closed-form
/// two-stage map within 10% mean relative error on a 21-point grid, and the
/// hand-written backward pass matches finite differences to 1e-4 relative
/// on 20 weight configurations.
#[test]
fn acceptance_09_hypernetwork_fidelity() {
    let start = Instant::now();
    let (d, k) = (5usize, 2usize);
    let mut rng = CounterRng::new(59, "acceptance-hypernet");
    let estimates: Vec<ParameterEstimate> = (0..k)
        .map(|_| ParameterEstimate {
            beta_hat: rng.normal_vec(d),
            cov_hat: random_psd(d, &mut rng),
            mu_hat: None,
            noise_var: 0.0,
        })
        .collect();
    let settings = TrainSettings {
        steps: 2000,
        seed: 59,
        ..TrainSettings::default()
    };
    let net = train_hypernet_two_stage(&estimates, &settings).unwrap();
    let grid = SimplexGrid::equispaced_pair(21).unwrap();
    let mut err_sum = 0.0;
    let mut ref_sum = 0.0;
    for lambda in grid.points() {
        let target = estimators::two_stage(&estimates, lambda, &[0.0, 0.0]).unwrap();
        let approx = net.forward(lambda).unwrap();
        err_sum += norm2(&sub(&approx, &target));
        ref_sum += norm2(&target);
    }
    let rel = err_sum / ref_sum;
    assert!(rel <= 0.10, "mean relative fidelity error {rel}");

    // Backward pass against central differences.
    let tuple = ObjectiveTuple::new(
        estimates
            .iter()
            .map(|e| QuadraticObjective::new(e.cov_hat.clone(), e.beta_hat.clone(), 0.0).unwrap())
            .collect(),
    )
    .unwrap();
    let loss = |net: &Hypernetwork, lambda: &SimplexWeights| -> f64 {
        let h = net.forward(lambda).unwrap();
        eval_scalarized(&h, &tuple, lambda, ScalarizationKind::Linear).unwrap()
    };
    let h_step = 1e-4;
    for config in 0..20u64 {
        let probe = Hypernetwork::init(k, 16, d, 7000 + config);
        let lambda = SimplexWeights::pair(0.05 + 0.9 * (config as f64 / 19.0)).unwrap();
        let out = probe.forward(&lambda).unwrap();
        let mut g_out = vec![0.0; d];
        for (j, obj) in tuple.iter().enumerate() {
            let diff: Vec<f64> = out.iter().zip(obj.center()).map(|(a, b)| a - b).collect();
            let qd = obj.quad().matvec(&diff);
            for (g, q) in g_out.iter_mut().zip(&qd) {
                *g += 2.0 * lambda.get(j) * q;
            }
        }
        let analytic = probe.backward(lambda.as_slice(), &g_out);
        for p in 0..probe.params().len() {
            let mut up = probe.clone();
            up.params_mut()[p] += h_step;
            let mut dn = probe.clone();
            dn.params_mut()[p] -= h_step;
            let fd = (loss(&up, &lambda) - loss(&dn, &lambda)) / (2.0 * h_step);
            assert!(
                (analytic[p] - fd).abs() <= 1e-4 * fd.abs().max(1.0),
                "config {config}, parameter {p}: {} vs {fd}",
                analytic[p]
            );
        }
    }
    report(9, "hypernetwork fidelity", start, 120.0);
}

/// Criterion 10: every experiment kind is a pure function of its config —
/// rerunning produces byte-identical results.csv.
#[test]
fn acceptance_10_determinism() {
    let start = Instant::now();
    let sweep = SynthSweepConfig {
        dim: 12,
        n_labeled: 10,
        sparsity_values: vec![2, 6],
        unlabeled_values: vec![10, 30],
        repeats: 2,
        base_seed: 42,
        ..SynthSweepConfig::default()
    };
    let a = results_csv(&experiments::run_synth_sweep(&sweep).unwrap());
    let b = results_csv(&experiments::run_synth_sweep(&sweep).unwrap());
    assert_eq!(a, b, "synth_sweep results differ between reruns");

    let front = FrontCompareConfig {
        dim: 10,
        n_labeled: 8,
        n_unlabeled: 12,
        sparsity: 1,
        repeats: 2,
        base_seed: 43,
        lambda_grid_size: 4,
        train: TrainConfig {
            steps: 60,
            hidden: 16,
            ..TrainConfig::default()
        },
        ..FrontCompareConfig::default()
    };
    let a = results_csv(&experiments::run_front_compare(&front).unwrap());
    let b = results_csv(&experiments::run_front_compare(&front).unwrap());
    assert_eq!(a, b, "front_compare results differ between reruns");

    let fairness = FairnessConfig {
        source: FairnessSource::Synthetic {
            dim: 15,
            sparsity: 2,
            n_labeled: 25,
            n_unlabeled: 40,
            mu_norm: 0.5,
            mu_overlap: 0.5,
            noise_sd: 0.5,
            test_size: 100,
        },
        repeats: 2,
        base_seed: 44,
        lambda_grid_size: 3,
        min_risk_weight: 0.05,
        risk_scale_one_over_n: false,
        classification_threshold: 0.5,
        penalty: PenaltyConfig::Validated,
        solver: SolverConfig::default(),
    };
    let a = results_csv(&experiments::run_fairness(&fairness).unwrap());
    let b = results_csv(&experiments::run_fairness(&fairness).unwrap());
    assert_eq!(a, b, "fairness_run results differ between reruns");

    let adversarial = AdversarialConfig {
        dim: 8,
        n_labeled: 12,
        repeats: 2,
        base_seed: 45,
        ..AdversarialConfig::default()
    };
    let a = results_csv(&experiments::run_adversarial_contrast(&adversarial).unwrap());
    let b = results_csv(&experiments::run_adversarial_contrast(&adversarial).unwrap());
    assert_eq!(a, b, "adversarial_contrast results differ between reruns");

    let hv = HvReportConfig {
        repeats: 2,
        base_seed: 46,
        mc_samples: 20_000,
        ..HvReportConfig::default()
    };
    let a = results_csv(&experiments::run_hv_report(&hv).unwrap());
    let b = results_csv(&experiments::run_hv_report(&hv).unwrap());
    assert_eq!(a, b, "hv_report results differ between reruns");
    report(10, "determinism", start, 120.0);
}
