use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ovr::{predict_ovr, train_ovr, OneVsRestSvm};
use super::scores::{scores, F1Average, Scores};
use crate::error::{Error, Result};
use crate::kernels::GramMatrix;

/// Box bounds `10^j`, `j = −3..=3`.
pub fn default_zetas() -> Vec<f64> {
    (-3..=3).map(|j| 10f64.powi(j)).collect()
}

fn class_members(labels: &[usize]) -> Vec<(usize, Vec<usize>)> {
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    classes
        .into_iter()
        .map(|c| (c, (0..labels.len()).filter(|&i| labels[i] == c).collect()))
        .collect()
}

/// Assigns every sample to one of `n_folds` folds so that each class is
/// spread as evenly as possible. Classes are visited in ascending order,
/// their members shuffled with the seeded generator and dealt round-robin,
/// continuing where the previous class stopped.
pub fn stratified_folds(labels: &[usize], n_folds: usize, seed: u64) -> Result<Vec<usize>> {
    if n_folds < 2 {
        return Err(Error::input(format!("need at least 2 folds, got {n_folds}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold = vec![0; labels.len()];
    let mut next = 0;
    for (c, mut members) in class_members(labels) {
        if members.len() < n_folds {
            return Err(Error::input(format!(
                "class {c} has {} samples, fewer than the {n_folds} folds; \
                 some fold would lose it entirely",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for i in members {
            fold[i] = next % n_folds;
            next += 1;
        }
    }
    Ok(fold)
}

/// Stratified random split; each class contributes `round(fraction·count)`
/// samples to the training part, but at least one to each part when it has
/// two or more. Both index lists are ascending.
pub fn stratified_split(
    labels: &[usize],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::input(format!(
            "training fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (_, mut members) in class_members(labels) {
        members.shuffle(&mut rng);
        let m = members.len();
        let mut k = (train_fraction * m as f64).round() as usize;
        if m >= 2 {
            k = k.clamp(1, m - 1);
        }
        train.extend_from_slice(&members[..k]);
        test.extend_from_slice(&members[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Result of training on `train` and predicting `test`.
#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub model: OneVsRestSvm,
    pub predictions: Vec<usize>,
    pub scores: Scores,
}

/// Trains on the `train × train` block and predicts from the `test × train`
/// block; no other entry of `k` is read.
pub fn evaluate_split(
    k: &GramMatrix,
    labels: &[usize],
    train: &[usize],
    test: &[usize],
    zeta: f64,
    average: F1Average,
) -> Result<SplitOutcome> {
    let sub = k.submatrix(train);
    let train_labels: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
    let model = train_ovr(&sub, &train_labels, zeta)?;
    let predictions = predict_ovr(&model, &k.block(test, train))?;
    let truth: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
    let scores = scores(&truth, &predictions, average)?;
    Ok(SplitOutcome {
        model,
        predictions,
        scores,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub n_folds: usize,
    pub seed: u64,
    pub zetas: Vec<f64>,
    #[serde(default)]
    pub f1_average: F1Average,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            n_folds: 5,
            seed: 0,
            zetas: default_zetas(),
            f1_average: F1Average::Macro,
        }
    }
}

/// Scores of one grid point over all folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult<P> {
    pub params: P,
    pub zeta: f64,
    pub fold_accuracy: Vec<f64>,
    pub fold_f1: Vec<f64>,
    pub mean_accuracy: f64,
    pub mean_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport<P> {
    /// Kernel parameters in the outer loop, box bounds in the inner loop.
    pub grid: Vec<GridResult<P>>,
    /// Index into `grid` of the selected configuration.
    pub selected: usize,
    /// Wall-clock seconds spent, Gram matrices included.
    pub validation_seconds: f64,
}

impl<P> CvReport<P> {
    pub fn best(&self) -> &GridResult<P> {
        &self.grid[self.selected]
    }
}

/// Grid search by stratified k-fold cross-validation.
///
/// For every kernel parameter `gram_for` produces the Gram matrix over all
/// samples; each fold trains on the sub-Gram of the other folds and scores
/// the held-out one. The grid point with the largest mean accuracy wins;
/// ties go to the smaller box bound, then to the earlier kernel parameter.
pub fn cross_validate<P, F>(
    params: &[P],
    gram_for: F,
    labels: &[usize],
    cfg: &CvConfig,
) -> Result<CvReport<P>>
where
    P: Clone + Sync,
    F: Fn(&P) -> Result<GramMatrix>,
{
    if params.is_empty() || cfg.zetas.is_empty() {
        return Err(Error::input("the hyperparameter grid is empty"));
    }
    let start = Instant::now();
    let folds = stratified_folds(labels, cfg.n_folds, cfg.seed)?;
    let splits: Vec<(Vec<usize>, Vec<usize>)> = (0..cfg.n_folds)
        .map(|f| {
            let (held, rest): (Vec<usize>, Vec<usize>) =
                (0..labels.len()).partition(|&i| folds[i] == f);
            (rest, held)
        })
        .collect();

    let mut grid = Vec::new();
    for p in params {
        let k = gram_for(p)?;
        if k.len() != labels.len() {
            return Err(Error::input(format!(
                "Gram matrix has {} rows for {} labels",
                k.len(),
                labels.len()
            )));
        }
        let jobs: Vec<(usize, usize)> = (0..cfg.zetas.len())
            .flat_map(|z| (0..cfg.n_folds).map(move |f| (z, f)))
            .collect();
        let outcomes = jobs
            .par_iter()
            .map(|&(z, f)| {
                let (train, test) = &splits[f];
                evaluate_split(&k, labels, train, test, cfg.zetas[z], cfg.f1_average)
                    .map(|o| o.scores)
            })
            .collect::<Result<Vec<Scores>>>()?;
        for (z, chunk) in outcomes.chunks(cfg.n_folds).enumerate() {
            let fold_accuracy: Vec<f64> = chunk.iter().map(|s| s.accuracy).collect();
            let fold_f1: Vec<f64> = chunk.iter().map(|s| s.f1).collect();
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            grid.push(GridResult {
                params: p.clone(),
                zeta: cfg.zetas[z],
                mean_accuracy: mean(&fold_accuracy),
                mean_f1: mean(&fold_f1),
                fold_accuracy,
                fold_f1,
            });
        }
    }

    let nz = cfg.zetas.len();
    let mut selected = 0;
    for (idx, g) in grid.iter().enumerate().skip(1) {
        let b = &grid[selected];
        let better = g.mean_accuracy > b.mean_accuracy
            || (g.mean_accuracy == b.mean_accuracy
                && (g.zeta < b.zeta || (g.zeta == b.zeta && idx / nz < selected / nz)));
        if better {
            selected = idx;
        }
    }
    Ok(CvReport {
        grid,
        selected,
        validation_seconds: start.elapsed().as_secs_f64(),
    })
}
