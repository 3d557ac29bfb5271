use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::{check_xy, FeatureVector, MlError, Result, Row, N_FEATURES};

/// Smallest-to-largest eigenvalue ratio of the centered Gram matrix below
/// which OLS refuses to fit.
const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Semantic,
    Fluency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: [f64; N_FEATURES],
    pub intercept: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
}

impl LinearModel {
    pub fn constant(value: f64) -> Self {
        Self {
            weights: [0.0; N_FEATURES],
            intercept: value,
            target: None,
        }
    }

    pub fn with_target(mut self, target: Target) -> Self {
        self.target = Some(target);
        self
    }

    pub fn predict_row(&self, x: &Row) -> f64 {
        self.weights.iter().zip(x).fold(self.intercept, |acc, (w, v)| acc + w * v)
    }

    pub fn predict(&self, x: &FeatureVector) -> f64 {
        self.predict_row(&x.to_array())
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.intercept.is_finite() && self.weights.iter().all(|w| w.is_finite())
    }
}

struct Centered {
    gram: Matrix4<f64>,
    xty: Vector4<f64>,
    x_mean: Vector4<f64>,
    y_mean: f64,
}

fn center(x: &[Row], y: &[f64]) -> Centered {
    let n = x.len() as f64;
    let mut x_mean = Vector4::zeros();
    for row in x {
        x_mean += Vector4::from(*row);
    }
    x_mean /= n;
    let y_mean = y.iter().sum::<f64>() / n;
    let mut gram = Matrix4::zeros();
    let mut xty = Vector4::zeros();
    for (row, &target) in x.iter().zip(y) {
        let xc = Vector4::from(*row) - x_mean;
        gram += xc * xc.transpose();
        xty += xc * (target - y_mean);
    }
    Centered {
        gram,
        xty,
        x_mean,
        y_mean,
    }
}

fn solve(c: &Centered, lambda: f64) -> Result<LinearModel> {
    let a = c.gram + Matrix4::identity() * lambda;
    let w = match a.cholesky() {
        Some(chol) => chol.solve(&c.xty),
        None => a
            .lu()
            .solve(&c.xty)
            .ok_or(MlError::NonFinite("linear solution"))?,
    };
    let model = LinearModel {
        weights: w.into(),
        intercept: c.y_mean - w.dot(&c.x_mean),
        target: None,
    };
    if !model.is_finite() {
        return Err(MlError::NonFinite("linear solution"));
    }
    Ok(model)
}

/// Ordinary least squares with an intercept.
pub fn ols_fit(x: &[Row], y: &[f64]) -> Result<LinearModel> {
    check_xy("ordinary least squares", x, y, 5)?;
    let c = center(x, y);
    let eig = c.gram.symmetric_eigenvalues();
    let max = eig.max();
    let min = eig.min();
    let condition = if max > 0.0 { min / max } else { 0.0 };
    if condition.is_nan() || condition <= RANK_TOLERANCE {
        return Err(MlError::RankDeficient { condition });
    }
    solve(&c, 0.0)
}

/// Ridge regression; the intercept is not penalized.
pub fn ridge_fit(x: &[Row], y: &[f64], lambda: f64) -> Result<LinearModel> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(MlError::InvalidParam(format!("ridge lambda must be finite and non-negative, got {lambda}")));
    }
    check_xy("ridge regression", x, y, 2)?;
    solve(&center(x, y), lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rows(rng: &mut ChaCha8Rng, n: usize) -> Vec<Row> {
        (0..n).map(|_| std::array::from_fn(|_| rng.random::<f64>())).collect()
    }

    #[test]
    fn exact_linear_data_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_rows(&mut rng, 30);
        let w = [0.3, 0.2, 0.4, 0.1];
        let y: Vec<f64> = x.iter().map(|r| r.iter().zip(&w).map(|(a, b)| a * b).sum()).collect();
        let m = ols_fit(&x, &y).unwrap();
        for (got, want) in m.weights.iter().zip(&w) {
            assert!((got - want).abs() < 1e-8);
        }
        assert!(m.intercept.abs() < 1e-8);
    }

    #[test]
    fn preconditions() {
        assert!(matches!(ols_fit(&[[0.0; 4]], &[1.0]), Err(MlError::TooFewRows { need: 5, got: 1, .. })));
        assert!(matches!(ols_fit(&[[0.0; 4]; 5], &[1.0; 4]), Err(MlError::LengthMismatch { .. })));
        assert!(ridge_fit(&[[0.0; 4]; 3], &[1.0; 3], -1.0).is_err());
        assert!(ridge_fit(&[[0.0; 4]], &[1.0], 1.0).is_err());
    }

    #[test]
    fn collinear_columns_are_rank_deficient_but_ridge_fits() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x: Vec<Row> = random_rows(&mut rng, 20)
            .into_iter()
            .map(|[a, b, c, _]| [a, b, c, a + b])
            .collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] - r[2]).collect();
        let err = ols_fit(&x, &y).unwrap_err();
        assert!(matches!(err, MlError::RankDeficient { .. }));
        assert!(err.to_string().contains("ridge"));
        assert!(ridge_fit(&x, &y, 1.0).unwrap().is_finite());
    }

    #[test]
    fn constant_features_predict_mean() {
        let x = vec![[0.5; 4]; 6];
        let y = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let m = ridge_fit(&x, &y, 1.0).unwrap();
        assert_eq!(m.weights, [0.0; 4]);
        assert_eq!(m.intercept, 3.5);
    }

    #[test]
    fn heavy_shrinkage() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_rows(&mut rng, 100);
        let y: Vec<f64> = x.iter().map(|r| 3.0 * r[0] - 2.0 * r[3] + rng.random::<f64>()).collect();
        let m = ridge_fit(&x, &y, 1e6).unwrap();
        assert!(m.weights.iter().all(|w| w.abs() < 1e-3));
    }

    #[test]
    fn constant_model_predicts_intercept() {
        let m = LinearModel::constant(50.0);
        assert_eq!(m.predict(&FeatureVector::from_array([0.3, 0.9, 0.1, 0.0])), 50.0);
    }
}
