mod common;

use proptest::prelude::*;
use wlasso_hpo::benchgen::{BoundsKind, SyntheticSpec};
use wlasso_hpo::criteria::{cv_loss, make_folds, CvConfig, CvProblem};
use wlasso_hpo::lasso::{soft_threshold, Dataset, PenaltyVector};
use wlasso_hpo::Benchmark;

fn two_folds() -> CvConfig {
    CvConfig {
        k_folds: 2,
        ..CvConfig::default()
    }
}

#[test]
fn zero_model_cv_is_mean_square_target() {
    let ds = Dataset::from_rows("z", &[vec![1.0], vec![-1.0], vec![0.5], vec![2.0]], vec![1.0, 2.0, 3.0, 4.0])
        .unwrap();
    let v = cv_loss(&ds, &PenaltyVector::uniform(10.0, 1).unwrap(), &two_folds()).unwrap();
    assert_eq!(v.loss, 7.5);
    assert_eq!(v.per_fold.len(), 2);
}

#[test]
fn single_feature_hand_oracle() {
    let x = [1.0, -2.0, 0.5, 3.0, -1.0, 2.0];
    let y = [1.5, -3.0, 1.0, 5.0, -0.5, 2.5];
    let rows: Vec<Vec<f64>> = x.iter().map(|v| vec![*v]).collect();
    let ds = Dataset::from_rows("one", &rows, y.to_vec()).unwrap();
    let cfg = CvConfig {
        tol: 1e-14,
        ..two_folds()
    };
    let lam = 0.1f64.ln();
    let got = cv_loss(&ds, &PenaltyVector::uniform(lam, 1).unwrap(), &cfg).unwrap();

    let folds = make_folds(6, &cfg).unwrap();
    let mut expect = 0.0;
    for f in &folds {
        let nt = f.train.len() as f64;
        let xy: f64 = f.train.iter().map(|&i| x[i] * y[i]).sum();
        let xx: f64 = f.train.iter().map(|&i| x[i] * x[i]).sum();
        let beta = soft_threshold(xy / nt, lam.exp()) / (xx / nt);
        let mse: f64 = f.val.iter().map(|&i| (y[i] - x[i] * beta).powi(2)).sum::<f64>() / f.val.len() as f64;
        expect += mse / folds.len() as f64;
    }
    assert!((got.loss - expect).abs() < 1e-12, "{} vs {expect}", got.loss);
}

#[test]
fn fold_assignment_is_seeded() {
    let a = make_folds(23, &CvConfig::default()).unwrap();
    assert_eq!(a, make_folds(23, &CvConfig::default()).unwrap());
    let other = CvConfig {
        fold_seed: 9,
        ..CvConfig::default()
    };
    assert_ne!(a, make_folds(23, &other).unwrap());
    assert!(make_folds(3, &CvConfig::default()).is_err());
}

#[test]
fn scaled_truth_is_one() {
    for name in ["synt_simple", "synt_medium_noisy"] {
        let b = Benchmark::preset(name).unwrap();
        let v = b.evaluate_fixed(b.beta_true().unwrap()).unwrap();
        assert_eq!(v.objective(), 1.0);
    }
}

#[test]
fn scaling_disabled_for_exact_fit() {
    let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, (i * i) as f64 % 7.0]).collect();
    let beta = vec![0.5, -1.0];
    let y: Vec<f64> = rows.iter().map(|r| r[0] * beta[0] + r[1] * beta[1]).collect();
    let ds = Dataset::from_rows("exact", &rows, y).unwrap();
    let b = Benchmark::from_dataset("exact", ds, BoundsKind::Synthetic, Some(beta.clone()), CvConfig::default())
        .unwrap();
    let v = b.evaluate_fixed(&beta).unwrap();
    assert!(v.scaled.is_none());
    assert_eq!(v.objective(), v.loss);
}

#[test]
fn evaluation_is_pure() {
    let b = Benchmark::synthetic("p", &SyntheticSpec::new(30, 20, 2)).unwrap();
    let z = vec![0.3; 20];
    let a = b.evaluate_point(&z, wlasso_hpo::Fidelity::Discrete(2)).unwrap();
    let c = b.evaluate_point(&z, wlasso_hpo::Fidelity::Discrete(2)).unwrap();
    assert_eq!(a.value.loss.to_bits(), c.value.loss.to_bits());
    assert_eq!(a.value.cost, c.value.cost);
}

proptest! {
    #[test]
    fn folds_partition_rows(n in 2usize..200, k in 2usize..12, seed in any::<u64>()) {
        prop_assume!(k <= n);
        let cfg = CvConfig { k_folds: k, fold_seed: seed, tol: 1e-4 };
        let folds = make_folds(n, &cfg).unwrap();
        prop_assert_eq!(folds.len(), k);
        let mut seen = vec![0usize; n];
        for (i, f) in folds.iter().enumerate() {
            let expect = n / k + usize::from(i < n % k);
            prop_assert_eq!(f.val.len(), expect);
            prop_assert_eq!(f.train.len() + f.val.len(), n);
            for &r in &f.val {
                seen[r] += 1;
            }
            for &r in &f.train {
                prop_assert!(!f.val.contains(&r));
            }
        }
        prop_assert!(seen.iter().all(|c| *c == 1));
    }

    #[test]
    fn problem_matches_direct_loss(seed in 0u64..1000) {
        let spec = SyntheticSpec::new(25, 10, 2).with_seed(seed);
        let b = Benchmark::synthetic("p", &spec).unwrap();
        let (lo, hi) = b.bounds();
        let lam = PenaltyVector::uniform(0.5 * (lo + hi), 10).unwrap();
        let direct = cv_loss(b.dataset(), &lam, &CvConfig::default()).unwrap();
        let via = CvProblem::new(b.dataset(), &CvConfig::default()).unwrap().evaluate(&lam, 1e-4, None).unwrap();
        prop_assert_eq!(direct.loss.to_bits(), via.value.loss.to_bits());
    }
}
