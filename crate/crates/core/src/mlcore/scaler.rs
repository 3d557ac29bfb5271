use serde::{Deserialize, Serialize};

use super::{FeatureVector, MlError, Result, N_FEATURES};

/// Per-column Min-Max scaling fitted on training features.
///
/// A constant column maps to `0`. Values outside the fitted range are
/// clamped, so the output is always in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub mins: [f64; N_FEATURES],
    pub maxs: [f64; N_FEATURES],
}

impl MinMaxScaler {
    pub fn apply(&self, x: &FeatureVector) -> FeatureVector {
        let raw = x.to_array();
        let mut out = [0.0; N_FEATURES];
        for i in 0..N_FEATURES {
            let span = self.maxs[i] - self.mins[i];
            out[i] = if span > 0.0 {
                ((raw[i] - self.mins[i]) / span).clamp(0.0, 1.0)
            } else {
                0.0
            };
        }
        FeatureVector::from_array(out)
    }
}

pub fn minmax_fit(rows: &[FeatureVector]) -> Result<MinMaxScaler> {
    if rows.len() < 2 {
        return Err(MlError::TooFewRows {
            what: "min-max scaling",
            need: 2,
            got: rows.len(),
        });
    }
    let mut mins = [f64::INFINITY; N_FEATURES];
    let mut maxs = [f64::NEG_INFINITY; N_FEATURES];
    for row in rows {
        for (i, v) in row.to_array().into_iter().enumerate() {
            if !v.is_finite() {
                return Err(MlError::NonFinite("features"));
            }
            mins[i] = mins[i].min(v);
            maxs[i] = maxs[i].max(v);
        }
    }
    Ok(MinMaxScaler { mins, maxs })
}

pub fn minmax_apply(scaler: &MinMaxScaler, x: &FeatureVector) -> FeatureVector {
    scaler.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(a: [f64; 4]) -> FeatureVector {
        FeatureVector::from_array(a)
    }

    #[test]
    fn column_examples() {
        let rows = [fv([0.0, 3.0, 0.0, 0.2]), fv([5.0, 3.0, 0.0, 0.4]), fv([10.0, 3.0, 0.0, 0.6])];
        let scaler = minmax_fit(&rows).unwrap();
        let scaled: Vec<[f64; 4]> = rows.iter().map(|r| minmax_apply(&scaler, r).to_array()).collect();
        assert_eq!(scaled.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
        // constant columns map to zero
        assert!(scaled.iter().all(|r| r[1] == 0.0 && r[2] == 0.0));
        // out-of-range test values clamp
        assert_eq!(scaler.apply(&fv([12.0, 0.0, 0.0, 0.0])).lexical, 1.0);
        assert_eq!(scaler.apply(&fv([-1.0, 0.0, 0.0, 0.0])).lexical, 0.0);
    }

    #[test]
    fn fit_needs_two_rows() {
        assert!(matches!(minmax_fit(&[]), Err(MlError::TooFewRows { got: 0, .. })));
        assert!(minmax_fit(&[fv([0.0; 4])]).is_err());
    }

    proptest! {
        #[test]
        fn output_in_unit_box(
            rows in proptest::collection::vec(proptest::array::uniform4(-5.0f64..5.0), 2..20),
            probe in proptest::array::uniform4(-50.0f64..50.0),
        ) {
            let rows: Vec<_> = rows.into_iter().map(fv).collect();
            let scaler = minmax_fit(&rows).unwrap();
            for x in rows.iter().chain(std::iter::once(&fv(probe))) {
                prop_assert!(scaler.apply(x).to_array().iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }
    }
}
