use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_xy, FeatureVector, MlError, RegressionTree, Result, Row, TreeParams, N_FEATURES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    RandomForest,
    GradientBoosting,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features tried per split (random forest only).
    pub max_features: usize,
    /// Resample rows with replacement for every tree (random forest only).
    pub bootstrap: bool,
    /// Shrinkage applied to each stage (gradient boosting only).
    pub learning_rate: f64,
}

impl EnsembleParams {
    pub fn random_forest() -> Self {
        Self {
            n_trees: 100,
            max_depth: Some(6),
            min_leaf: 2,
            max_features: N_FEATURES,
            bootstrap: true,
            learning_rate: 1.0,
        }
    }

    pub fn gradient_boosting() -> Self {
        Self {
            n_trees: 100,
            max_depth: Some(3),
            min_leaf: 1,
            max_features: N_FEATURES,
            bootstrap: false,
            learning_rate: 0.1,
        }
    }

    fn tree_params(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_leaf: self.min_leaf,
            max_features: self.max_features,
        }
    }

    fn check(&self, kind: EnsembleKind) -> Result<()> {
        if self.min_leaf == 0 {
            return Err(MlError::InvalidParam("min_leaf must be at least 1".into()));
        }
        if !(1..=N_FEATURES).contains(&self.max_features) {
            return Err(MlError::InvalidParam(format!(
                "max_features must be in 1..={N_FEATURES}, got {}",
                self.max_features
            )));
        }
        match kind {
            EnsembleKind::RandomForest if self.n_trees == 0 => {
                Err(MlError::InvalidParam("a random forest needs at least one tree".into()))
            }
            EnsembleKind::GradientBoosting if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) => {
                Err(MlError::InvalidParam(format!(
                    "learning_rate must be positive, got {}",
                    self.learning_rate
                )))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeEnsemble {
    pub kind: EnsembleKind,
    pub params: EnsembleParams,
    pub seed: u64,
    /// Starting value for gradient boosting; zero for random forests.
    pub base_prediction: f64,
    pub trees: Vec<RegressionTree>,
}

impl TreeEnsemble {
    pub fn predict_row(&self, x: &Row) -> f64 {
        match self.kind {
            EnsembleKind::RandomForest => {
                self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
            }
            EnsembleKind::GradientBoosting => {
                let lr = self.params.learning_rate;
                self.trees.iter().fold(self.base_prediction, |acc, t| acc + lr * t.predict(x))
            }
        }
    }

    pub fn predict(&self, x: &FeatureVector) -> f64 {
        self.predict_row(&x.to_array())
    }

    pub(crate) fn validate(&self) -> Result<(), String> {
        self.params.check(self.kind).map_err(|e| e.to_string())?;
        if self.trees.len() != self.params.n_trees {
            return Err(format!(
                "ensemble declares {} trees but stores {}",
                self.params.n_trees,
                self.trees.len()
            ));
        }
        if !self.base_prediction.is_finite() {
            return Err("non-finite base prediction".into());
        }
        for (i, tree) in self.trees.iter().enumerate() {
            tree.validate().map_err(|e| format!("tree {i}: {e}"))?;
        }
        Ok(())
    }
}

/// Sorts rows lexicographically by features, then target, so that fitting
/// never depends on the order rows were supplied in.
fn canonical(x: &[Row], y: &[f64]) -> (Vec<Row>, Vec<f64>) {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| {
        x[a].iter()
            .zip(&x[b])
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(y[a].total_cmp(&y[b]))
    });
    (idx.iter().map(|&i| x[i]).collect(), idx.iter().map(|&i| y[i]).collect())
}

/// Random forest regression.
///
/// Resampling schedule: rows are put in canonical order, then one ChaCha8
/// stream seeded with `seed` is consumed tree by tree. For each tree it
/// first yields `n` bootstrap indices in `0..n` (when bootstrapping), then
/// one feature subset per split node in depth-first, left-first order
/// (only when `max_features < 4`).
pub fn rf_fit(x: &[Row], y: &[f64], params: &EnsembleParams, seed: u64) -> Result<TreeEnsemble> {
    check_xy("random forest", x, y, 10)?;
    params.check(EnsembleKind::RandomForest)?;
    let (x, y) = canonical(x, y);
    let n = x.len();
    let tree_params = params.tree_params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trees = (0..params.n_trees)
        .map(|_| {
            let rows: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            RegressionTree::fit(&x, &y, rows, &tree_params, &mut rng)
        })
        .collect();
    Ok(TreeEnsemble {
        kind: EnsembleKind::RandomForest,
        params: *params,
        seed,
        base_prediction: 0.0,
        trees,
    })
}

/// Gradient boosting on squared error, starting from `mean(y)`.
///
/// Every stage sees all rows in canonical order. The seed is only consumed
/// for feature subsets when `max_features < 4`.
pub fn gbr_fit(x: &[Row], y: &[f64], params: &EnsembleParams, seed: u64) -> Result<TreeEnsemble> {
    gbr_fit_with_history(x, y, params, seed).map(|(model, _)| model)
}

/// [`gbr_fit`] that also returns the training MSE before any tree and after
/// each stage (`n_trees + 1` values).
pub fn gbr_fit_with_history(
    x: &[Row],
    y: &[f64],
    params: &EnsembleParams,
    seed: u64,
) -> Result<(TreeEnsemble, Vec<f64>)> {
    check_xy("gradient boosting", x, y, 10)?;
    params.check(EnsembleKind::GradientBoosting)?;
    let (x, y) = canonical(x, y);
    let n = x.len();
    let base = y.iter().sum::<f64>() / n as f64;
    let tree_params = params.tree_params();
    let lr = params.learning_rate;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = vec![base; n];
    let mse = |current: &[f64]| current.iter().zip(&y).map(|(f, t)| (t - f).powi(2)).sum::<f64>() / n as f64;
    let mut history = vec![mse(&current)];
    let mut trees = Vec::with_capacity(params.n_trees);
    for _ in 0..params.n_trees {
        let residuals: Vec<f64> = y.iter().zip(&current).map(|(t, f)| t - f).collect();
        let tree = RegressionTree::fit(&x, &residuals, (0..n).collect(), &tree_params, &mut rng);
        for (f, row) in current.iter_mut().zip(&x) {
            *f += lr * tree.predict(row);
        }
        history.push(mse(&current));
        trees.push(tree);
    }
    let model = TreeEnsemble {
        kind: EnsembleKind::GradientBoosting,
        params: *params,
        seed,
        base_prediction: base,
        trees,
    };
    if !model.base_prediction.is_finite() || history.iter().any(|v| !v.is_finite()) {
        return Err(MlError::NonFinite("gradient boosting"));
    }
    Ok((model, history))
}
