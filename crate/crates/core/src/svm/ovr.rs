use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::smo::{train_binary, TrainedBinarySvm};
use crate::error::{Error, Result};
use crate::kernels::GramMatrix;

/// One binary model per class, each separating that class from the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneVsRestSvm {
    /// Distinct training labels in ascending order.
    pub classes: Vec<usize>,
    pub models: Vec<TrainedBinarySvm>,
}

impl OneVsRestSvm {
    /// Decision value of every class model for one sample.
    pub fn decision_values(&self, k_row: &[f64]) -> Result<Vec<f64>> {
        self.models.iter().map(|m| m.decision_value(k_row)).collect()
    }
}

/// Trains one model per distinct label with box bound `zeta`.
pub fn train_ovr(k: &GramMatrix, labels: &[usize], zeta: f64) -> Result<OneVsRestSvm> {
    if labels.len() != k.len() {
        return Err(Error::input(format!(
            "{} labels for a {n}x{n} Gram matrix",
            labels.len(),
            n = k.len()
        )));
    }
    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Training("at least two classes are needed".into()));
    }
    let models = classes
        .par_iter()
        .map(|&c| {
            let y: Vec<i8> = labels.iter().map(|&l| if l == c { 1 } else { -1 }).collect();
            train_binary(k, &y, zeta)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OneVsRestSvm { classes, models })
}

/// Predicts the class with the largest decision value; on a tie the class
/// that comes first wins. `k_rows[s][i]` is the kernel value between test
/// sample `s` and training sample `i`.
pub fn predict_ovr(model: &OneVsRestSvm, k_rows: &[Vec<f64>]) -> Result<Vec<usize>> {
    k_rows
        .iter()
        .map(|row| {
            let values = model.decision_values(row)?;
            let mut best = 0;
            for (c, v) in values.iter().enumerate() {
                if *v > values[best] {
                    best = c;
                }
            }
            Ok(model.classes[best])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rbf_gram(x: &[f64]) -> GramMatrix {
        let n = x.len();
        let v = (0..n * n)
            .map(|c| (-(x[c / n] - x[c % n]).powi(2)).exp())
            .collect();
        GramMatrix::from_values(n, v).unwrap()
    }

    #[test]
    fn three_clusters() {
        let x = [0.0, 0.1, 0.2, 5.0, 5.1, 5.2, 10.0, 10.1, 10.2];
        let labels = [7, 7, 7, 3, 3, 3, 9, 9, 9];
        let g = rbf_gram(&x);
        let m = train_ovr(&g, &labels, 10.0).unwrap();
        assert_eq!(m.classes, vec![3, 7, 9]);
        let rows: Vec<Vec<f64>> = (0..x.len()).map(|i| g.row(i).to_vec()).collect();
        assert_eq!(predict_ovr(&m, &rows).unwrap(), labels.to_vec());
    }

    #[test]
    fn two_classes_agree_with_binary_model() {
        let x = [0.0, 0.4, 0.9, 2.0, 2.5, 3.1];
        let labels = [0, 0, 0, 1, 1, 1];
        let g = rbf_gram(&x);
        let m = train_ovr(&g, &labels, 1.0).unwrap();
        let y: Vec<i8> = labels.iter().map(|&l| if l == 0 { 1 } else { -1 }).collect();
        let binary = train_binary(&g, &y, 1.0).unwrap();
        for probe in [-1.0, 0.5, 1.4, 1.6, 2.7, 4.0] {
            let row: Vec<f64> = x.iter().map(|xi: &f64| (-(xi - probe).powi(2)).exp()).collect();
            let expected = if binary.predict(&row).unwrap() == 1 { 0 } else { 1 };
            assert_eq!(predict_ovr(&m, &[row]).unwrap(), vec![expected]);
        }
    }

    #[test]
    fn constant_gram_ties_go_to_the_first_class() {
        let g = GramMatrix::from_values(4, vec![1.0; 16]).unwrap();
        let m = train_ovr(&g, &[2, 2, 5, 5], 1.0).unwrap();
        assert_eq!(predict_ovr(&m, &[vec![1.0; 4]]).unwrap(), vec![2]);
    }

    #[test]
    fn single_class_is_rejected() {
        let g = GramMatrix::from_values(2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(train_ovr(&g, &[1, 1], 1.0), Err(Error::Training(_))));
    }
}
