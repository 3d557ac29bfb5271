use fusemt::mlcore::{gbr_fit_with_history, ols_fit, rf_fit, ridge_fit, EnsembleParams, Row};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn problem(n: std::ops::Range<usize>) -> impl Strategy<Value = (Vec<Row>, Vec<f64>)> {
    n.prop_flat_map(|n| {
        (
            proptest::collection::vec(proptest::array::uniform4(0.0f64..1.0), n),
            proptest::collection::vec(0.0f64..100.0, n),
        )
    })
}

fn stationarity(x: &[Row], y: &[f64], w: &[f64; 4], b: f64, lambda: f64) -> f64 {
    let mut g = [0.0; 4];
    for (row, t) in x.iter().zip(y) {
        let resid = t - b - row.iter().zip(w).map(|(a, c)| a * c).sum::<f64>();
        for j in 0..4 {
            g[j] += row[j] * resid;
        }
    }
    (0..4).map(|j| (g[j] - lambda * w[j]).powi(2)).sum::<f64>().sqrt()
}

fn shuffled(x: &[Row], y: &[f64], seed: u64) -> (Vec<Row>, Vec<f64>) {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    (idx.iter().map(|&i| x[i]).collect(), idx.iter().map(|&i| y[i]).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ridge_is_stationary((x, y) in problem(5..80), lambda in 0.0f64..10.0) {
        let m = ridge_fit(&x, &y, lambda).unwrap();
        let n = x.len() as f64;
        let intercept_grad: f64 = x.iter().zip(&y)
            .map(|(r, t)| t - m.predict_row(r))
            .sum();
        prop_assert!(stationarity(&x, &y, &m.weights, m.intercept, lambda) <= 1e-6 * n);
        prop_assert!(intercept_grad.abs() <= 1e-6 * n);
    }

    #[test]
    fn ridge_without_penalty_is_ols((x, y) in problem(20..80)) {
        let ols = ols_fit(&x, &y).unwrap();
        let ridge = ridge_fit(&x, &y, 0.0).unwrap();
        for (a, b) in ols.weights.iter().zip(&ridge.weights) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
        prop_assert!((ols.intercept - ridge.intercept).abs() <= 1e-8);
    }

    #[test]
    fn ensembles_ignore_row_order((x, y) in problem(10..40), seed in any::<u64>(), perm in any::<u64>()) {
        let (xs, ys) = shuffled(&x, &y, perm);
        let rf = EnsembleParams { n_trees: 8, max_features: 2, ..EnsembleParams::random_forest() };
        prop_assert_eq!(rf_fit(&x, &y, &rf, seed).unwrap(), rf_fit(&xs, &ys, &rf, seed).unwrap());
        let gb = EnsembleParams { n_trees: 8, ..EnsembleParams::gradient_boosting() };
        let a = gbr_fit_with_history(&x, &y, &gb, seed).unwrap();
        let b = gbr_fit_with_history(&xs, &ys, &gb, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn boosting_never_increases_training_error((x, y) in problem(10..60), lr in 0.01f64..1.0) {
        let params = EnsembleParams { n_trees: 30, learning_rate: lr, ..EnsembleParams::gradient_boosting() };
        let (_, history) = gbr_fit_with_history(&x, &y, &params, 3).unwrap();
        for pair in history.windows(2) {
            prop_assert!(pair[1] <= pair[0] * (1.0 + 1e-12) + 1e-12, "{:?}", pair);
        }
    }

    #[test]
    fn predictions_stay_in_target_hull((x, y) in problem(10..40)) {
        let rf = rf_fit(&x, &y, &EnsembleParams { n_trees: 10, ..EnsembleParams::random_forest() }, 1).unwrap();
        let lo = y.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for row in &x {
            let p = rf.predict_row(row);
            prop_assert!(p >= lo - 1e-9 && p <= hi + 1e-9);
        }
    }
}
