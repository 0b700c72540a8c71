mod common;

use proptest::prelude::*;
use wlasso_hpo::benchgen::compute_lambda_max;
use wlasso_hpo::lasso::{
    duality_gap, primal_objective, soft_threshold, solve_wlasso, Dataset, PenaltyVector, SolverConfig,
};

use common::*;

#[test]
fn orthogonal_closed_form() {
    let mut r = rng(1);
    for _ in 0..10 {
        let ds = orthogonal_dataset(&mut r, 64, 16);
        let lam = PenaltyVector::new(uniform(&mut r, -3.0, 1.0, 16)).unwrap();
        let sol = solve_wlasso(&ds, &lam, &SolverConfig::new(1e-14)).unwrap();
        for j in 0..16 {
            let expect = soft_threshold(ds.col_dot(j, ds.y()) / 64.0, lam.as_slice()[j].exp());
            assert!((sol.beta[j] - expect).abs() <= 1e-8, "coordinate {j}");
        }
        assert!(sol.gap <= 1e-10);
    }
}

#[test]
fn hand_example_objective_and_gap() {
    let ds = Dataset::from_rows("e", &[vec![1.0, 0.0], vec![0.0, 1.0]], vec![2.0, 4.0]).unwrap();
    let zero_pen = PenaltyVector::new(vec![0.0, 0.0]).unwrap();
    assert!((primal_objective(&ds, &zero_pen, &[1.0, 1.0]).unwrap() - 4.5).abs() < 1e-15);
    let lm = compute_lambda_max(&ds).unwrap();
    let at_max = PenaltyVector::uniform(lm, 2).unwrap();
    assert!(duality_gap(&ds, &at_max, &[0.0, 0.0]).unwrap() <= 1e-10);
    let sol = solve_wlasso(&ds, &at_max, &SolverConfig::default()).unwrap();
    assert_eq!(sol.beta, vec![0.0, 0.0]);
}

#[test]
fn objective_non_increasing_across_passes() {
    let mut r = rng(2);
    let ds = random_dataset(&mut r, 30, 50);
    let lm = compute_lambda_max(&ds).unwrap();
    let lam = PenaltyVector::new(uniform(&mut r, lm - 4.0, lm - 1.0, 50)).unwrap();
    let mut prev = f64::INFINITY;
    for passes in 1..=40 {
        let cfg = SolverConfig::new(1e-14).with_max_passes(passes);
        let sol = solve_wlasso(&ds, &lam, &cfg).unwrap();
        assert!(sol.primal <= prev + 1e-12, "pass {passes}: {} > {prev}", sol.primal);
        prev = sol.primal;
    }
}

#[test]
fn warm_start_from_optimum_stops_immediately() {
    let mut r = rng(3);
    let ds = random_dataset(&mut r, 25, 12);
    let lm = compute_lambda_max(&ds).unwrap();
    let lam = PenaltyVector::uniform(lm - 2.0, 12).unwrap();
    let cold = solve_wlasso(&ds, &lam, &SolverConfig::new(1e-10)).unwrap();
    let warm = solve_wlasso(&ds, &lam, &SolverConfig::new(1e-6).with_warm_start(cold.beta.clone())).unwrap();
    assert_eq!(warm.n_passes, 0);
    assert_eq!(warm.beta, cold.beta);
}

#[test]
fn max_passes_is_flagged() {
    let mut r = rng(4);
    let ds = random_dataset(&mut r, 20, 40);
    let lam = PenaltyVector::uniform(compute_lambda_max(&ds).unwrap() - 5.0, 40).unwrap();
    let cfg = SolverConfig::new(1e-14).with_max_passes(2);
    let sol = solve_wlasso(&ds, &lam, &cfg).unwrap();
    assert_eq!(sol.n_passes, 2);
    assert!(sol.hit_max_passes(&cfg));
}

#[test]
fn sparse_and_dense_agree() {
    let mut r = rng(5);
    let ds = random_dataset(&mut r, 20, 8);
    let dense_rows: Vec<Vec<f64>> = (0..20)
        .map(|i| (0..8).map(|j| if (i + j) % 3 == 0 { 0.0 } else { ds.column(j).nth(i).unwrap().1 }).collect())
        .collect();
    let dense = Dataset::from_rows("d", &dense_rows, ds.y().to_vec()).unwrap();
    let mut indptr = vec![0];
    let (mut idx, mut vals) = (vec![], vec![]);
    for j in 0..8 {
        for (i, row) in dense_rows.iter().enumerate() {
            if row[j] != 0.0 {
                idx.push(i);
                vals.push(row[j]);
            }
        }
        indptr.push(idx.len());
    }
    let sparse = Dataset::from_csc("s", 20, 8, indptr, idx, vals, ds.y().to_vec()).unwrap();
    let lam = PenaltyVector::uniform(compute_lambda_max(&dense).unwrap() - 1.5, 8).unwrap();
    let a = solve_wlasso(&dense, &lam, &SolverConfig::new(1e-12)).unwrap();
    let b = solve_wlasso(&sparse, &lam, &SolverConfig::new(1e-12)).unwrap();
    for (x, y) in a.beta.iter().zip(&b.beta) {
        assert!((x - y).abs() < 1e-9);
    }
}

fn instance() -> impl Strategy<Value = (u64, usize, usize, f64)> {
    (any::<u64>(), 3usize..20, 1usize..15, 0.0f64..5.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gap_is_nonnegative((seed, n, d, shift) in instance()) {
        let mut r = rng(seed);
        let ds = random_dataset(&mut r, n, d);
        let lm = compute_lambda_max(&ds).unwrap();
        let lam = PenaltyVector::new(uniform(&mut r, lm - shift - 1.0, lm - shift, d)).unwrap();
        let beta = gaussian(&mut r, d);
        prop_assert!(duality_gap(&ds, &lam, &beta).unwrap() >= -1e-12);
        let sol = solve_wlasso(&ds, &lam, &SolverConfig::new(1e-6)).unwrap();
        prop_assert!(sol.gap >= -1e-12);
        prop_assert!(sol.n_passes == 10_000 || sol.gap <= 1e-6 * ds.y_norm_sq() / n as f64);
    }

    #[test]
    fn support_matches_nonzeros((seed, n, d, shift) in instance()) {
        let mut r = rng(seed);
        let ds = random_dataset(&mut r, n, d);
        let lm = compute_lambda_max(&ds).unwrap();
        let lam = PenaltyVector::uniform(lm - shift, d).unwrap();
        let sol = solve_wlasso(&ds, &lam, &SolverConfig::new(1e-8)).unwrap();
        let nz: Vec<usize> = (0..d).filter(|&j| sol.beta[j] != 0.0).collect();
        prop_assert_eq!(nz, sol.support);
    }

    #[test]
    fn permutation_equivariance((seed, n, d, shift) in instance()) {
        let mut r = rng(seed);
        let ds = random_dataset(&mut r, n, d);
        let lm = compute_lambda_max(&ds).unwrap();
        let lam = uniform(&mut r, lm - shift - 1.0, lm - shift, d);
        let mut perm: Vec<usize> = (0..d).collect();
        perm.reverse();
        perm.rotate_left(seed as usize % d);
        let pds = ds.permute_columns(&perm).unwrap();
        let plam: Vec<f64> = perm.iter().map(|&j| lam[j]).collect();
        let cfg = SolverConfig::new(1e-12);
        let a = solve_wlasso(&ds, &PenaltyVector::new(lam).unwrap(), &cfg).unwrap();
        let b = solve_wlasso(&pds, &PenaltyVector::new(plam).unwrap(), &cfg).unwrap();
        prop_assume!(!a.hit_max_passes(&cfg) && !b.hit_max_passes(&cfg));
        prop_assert!((a.primal - b.primal).abs() <= 1e-10 * (1.0 + a.primal.abs()));
        let mut mapped: Vec<usize> = b.support.iter().map(|&k| perm[k]).collect();
        mapped.sort_unstable();
        let stable = a.beta.iter().all(|v| *v == 0.0 || v.abs() > 1e-6);
        if stable {
            prop_assert_eq!(mapped, a.support.clone());
        }
    }

    #[test]
    fn scaling_identity((seed, n, d, shift) in instance(), c in 0.1f64..10.0) {
        let mut r = rng(seed);
        let ds = random_dataset(&mut r, n, d);
        let lam = uniform(&mut r, -shift - 1.0, -shift, d);
        let beta = gaussian(&mut r, d);
        let scaled_y: Vec<f64> = ds.y().iter().map(|v| c * v).collect();
        let sds = ds.with_target(scaled_y).unwrap();
        let cb: Vec<f64> = beta.iter().map(|b| c * b).collect();
        let shifted: Vec<f64> = lam.iter().map(|l| l - c.ln()).collect();
        let lhs = primal_objective(&sds, &PenaltyVector::new(lam).unwrap(), &cb).unwrap();
        let rhs = c * c * primal_objective(&ds, &PenaltyVector::new(shifted).unwrap(), &beta).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn lambda_max_gives_zero((seed, n, d, _s) in instance()) {
        let mut r = rng(seed);
        let ds = random_dataset(&mut r, n, d);
        let lam = PenaltyVector::uniform(compute_lambda_max(&ds).unwrap(), d).unwrap();
        let sol = solve_wlasso(&ds, &lam, &SolverConfig::new(1e-4)).unwrap();
        prop_assert!(sol.beta.iter().all(|b| *b == 0.0));
    }
}
