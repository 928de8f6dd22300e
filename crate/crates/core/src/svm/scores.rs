use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How per-class f1 values are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum F1Average {
    /// Unweighted mean over classes.
    #[default]
    Macro,
    /// Mean weighted by the number of true samples per class.
    Weighted,
    /// The f1 of one class only.
    Binary { positive: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub accuracy: f64,
    pub f1: f64,
}

/// f1 of class `c` against the rest; zero when it has no true positive.
fn class_f1(y_true: &[usize], y_pred: &[usize], c: usize) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t == c, p == c) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    if tp == 0 {
        return 0.0;
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Accuracy and f1 of a prediction. Classes are those appearing in either
/// sequence.
pub fn scores(y_true: &[usize], y_pred: &[usize], average: F1Average) -> Result<Scores> {
    if y_true.len() != y_pred.len() {
        return Err(Error::input(format!(
            "{} true labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::input("cannot score an empty prediction"));
    }
    let n = y_true.len() as f64;
    let correct = y_true.iter().zip(y_pred).filter(|(t, p)| t == p).count();
    let mut classes: Vec<usize> = y_true.iter().chain(y_pred).copied().collect();
    classes.sort_unstable();
    classes.dedup();
    let f1 = match average {
        F1Average::Binary { positive } => class_f1(y_true, y_pred, positive),
        F1Average::Macro => {
            classes.iter().map(|&c| class_f1(y_true, y_pred, c)).sum::<f64>() / classes.len() as f64
        }
        F1Average::Weighted => {
            classes
                .iter()
                .map(|&c| {
                    let support = y_true.iter().filter(|&&t| t == c).count() as f64;
                    support * class_f1(y_true, y_pred, c)
                })
                .sum::<f64>()
                / n
        }
    };
    Ok(Scores {
        accuracy: correct as f64 / n,
        f1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect() {
        let y = [0, 1, 2, 1];
        for avg in [F1Average::Macro, F1Average::Weighted, F1Average::Binary { positive: 1 }] {
            assert_eq!(scores(&y, &y, avg).unwrap(), Scores { accuracy: 1.0, f1: 1.0 });
        }
    }

    #[test]
    fn binary_hand_example() {
        // TP = 2, TN = 3, FP = 1, FN = 0 with class 1 positive
        let y_true = [1, 1, 0, 0, 0, 0];
        let y_pred = [1, 1, 1, 0, 0, 0];
        let s = scores(&y_true, &y_pred, F1Average::Binary { positive: 1 }).unwrap();
        assert!((s.accuracy - 5.0 / 6.0).abs() < 1e-15);
        assert!((s.f1 - 0.8).abs() < 1e-15);
    }

    #[test]
    fn constant_prediction() {
        let s = scores(&[0, 0, 1, 1], &[0, 0, 0, 0], F1Average::Macro).unwrap();
        assert_eq!(s.accuracy, 0.5);
        // class 0: p = 1/2, r = 1, f1 = 2/3; class 1: no true positive
        assert!((s.f1 - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn weighted_uses_support() {
        let s = scores(&[0, 0, 0, 1], &[0, 0, 0, 0], F1Average::Weighted).unwrap();
        let f0 = 2.0 * 0.75 / 1.75;
        assert!((s.f1 - 0.75 * f0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(scores(&[], &[], F1Average::Macro).is_err());
        assert!(scores(&[1], &[1, 2], F1Average::Macro).is_err());
    }
}
