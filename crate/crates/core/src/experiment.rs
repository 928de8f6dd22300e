//! Orbit datasets and the classification protocol.
//!
//! A run repeats, for a configured number of times: a stratified random
//! split into training and test samples, a k-fold grid search on the
//! training part, retraining with the selected configuration and scoring on
//! the test part. Every kernel and scaling in the configuration sees the
//! same splits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::PersistenceDiagram;
use crate::error::{Error, Result};
use crate::geometry::{linked_twisted_orbit, pairwise_distances, OrbitParams, PointCloud};
use crate::io::{self, DiagramSet, Manifest, ManifestEntry};
use crate::kernels::{
    gram_matrix, median_heuristic, pwg_bandwidth, sliced_distances, sw_gram_from_distances,
    DiagramKernel, GramMatrix, KernelKind,
};
use crate::persistence::{
    build_rips_filtration_with, compute_persistence, diagrams_from_pairs, EssentialPolicy,
    RipsOptions, Threshold, DEFAULT_SIMPLEX_CAP,
};
use crate::svm::{
    cross_validate, default_zetas, evaluate_split, stratified_split, CvConfig, CvReport, F1Average,
};
use crate::vspk::{Auxiliary, Scaling, ScalingFunction};

/// Twist parameters of the five orbit classes.
pub const DEFAULT_ORBIT_LABELS: [f64; 5] = [2.5, 3.5, 4.0, 4.1, 4.3];

/// A seeded set of linked twisted map orbits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitDataset {
    pub labels: Vec<f64>,
    pub orbits_per_label: usize,
    pub points_per_orbit: usize,
    pub seed: u64,
}

impl Default for OrbitDataset {
    fn default() -> Self {
        OrbitDataset {
            labels: DEFAULT_ORBIT_LABELS.to_vec(),
            orbits_per_label: 20,
            points_per_orbit: 300,
            seed: 0,
        }
    }
}

impl OrbitDataset {
    /// Starting points, drawn label by label from one seeded generator.
    pub fn starts(&self) -> Result<Vec<OrbitParams>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(self.labels.len() * self.orbits_per_label);
        for &r in &self.labels {
            for _ in 0..self.orbits_per_label {
                out.push(OrbitParams::random_start(&mut rng, r, self.points_per_orbit)?);
            }
        }
        Ok(out)
    }
}

/// How diagrams are computed from point clouds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagramOptions {
    pub threshold: Threshold,
    pub essential: EssentialPolicy,
    pub simplex_cap: usize,
}

impl Default for DiagramOptions {
    fn default() -> Self {
        DiagramOptions {
            threshold: Threshold::Enclosing,
            essential: EssentialPolicy::Drop,
            simplex_cap: DEFAULT_SIMPLEX_CAP,
        }
    }
}

/// Rips persistence diagrams of `cloud`, one per entry of `dims`.
pub fn diagrams_of_cloud(
    cloud: &PointCloud,
    dims: &[usize],
    opts: &DiagramOptions,
) -> Result<Vec<PersistenceDiagram>> {
    let max_dim = dims.iter().copied().max().unwrap_or(0);
    let dm = pairwise_distances(cloud)?;
    let f = build_rips_filtration_with(
        &dm,
        &RipsOptions {
            max_dim,
            threshold: opts.threshold,
            simplex_cap: opts.simplex_cap,
        },
    )?;
    let pairs = compute_persistence(&f);
    dims.iter()
        .map(|&r| diagrams_from_pairs(&pairs, r, opts.essential))
        .collect()
}

/// An orbit and its H1 diagram, or the reason it could not be computed.
#[derive(Debug, Clone)]
pub struct OrbitSample {
    pub params: OrbitParams,
    pub diagram: std::result::Result<PersistenceDiagram, String>,
}

/// Class name of an orbit label, e.g. `4.1` or `4`.
pub fn orbit_label_name(r: f64) -> String {
    format!("{r}")
}

/// Generates every orbit of `ds` and its full H1 diagram. Failures are
/// recorded per sample and do not stop the others.
pub fn generate_orbit_samples(ds: &OrbitDataset, opts: &DiagramOptions) -> Result<Vec<OrbitSample>> {
    let starts = ds.starts()?;
    Ok(starts
        .into_par_iter()
        .map(|params| {
            let diagram = linked_twisted_orbit(&params)
                .and_then(|c| diagrams_of_cloud(&c, &[1], opts))
                .map(|mut v| v.remove(0))
                .map_err(|e| e.to_string());
            OrbitSample { params, diagram }
        })
        .collect())
}

/// Writes one diagram file per sample plus `manifest.json` and `orbits.json`.
/// With `top_k` only the `k` most persistent points of each diagram are
/// written.
pub fn write_orbit_samples(samples: &[OrbitSample], dir: &Path, top_k: Option<usize>) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let mut manifest = Manifest::default();
    for (i, s) in samples.iter().enumerate() {
        let file = format!("orbit_{i:04}.csv");
        let label = orbit_label_name(s.params.r);
        let error = match &s.diagram {
            Ok(d) => {
                let d = top_k.map_or_else(|| d.clone(), |k| d.top_k(k));
                io::write_diagram(&dir.join(&file), &d)?;
                None
            }
            Err(e) => {
                warn!("{file}: {e}");
                Some(e.clone())
            }
        };
        manifest.entries.push(ManifestEntry {
            file,
            label,
            dim: 1,
            error,
        });
    }
    manifest.write(dir)?;
    let params: Vec<OrbitParams> = samples.iter().map(|s| s.params).collect();
    let mut text = serde_json::to_string_pretty(&params)?;
    text.push('\n');
    fs::write(dir.join("orbits.json"), text)?;
    Ok(manifest)
}

/// Usable orbit samples as a diagram set, in generation order.
pub fn orbit_diagram_set(samples: &[OrbitSample]) -> DiagramSet {
    let mut names = Vec::new();
    let mut diagrams = Vec::new();
    let mut labels = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        match &s.diagram {
            Ok(d) => {
                names.push(format!("orbit_{i:04}.csv"));
                diagrams.push(d.clone());
                labels.push(orbit_label_name(s.params.r));
            }
            Err(e) => warn!("orbit {i} skipped: {e}"),
        }
    }
    DiagramSet::new(names, diagrams, &labels)
}

/// `10^j` for `j` in `lo..=hi`.
fn decades(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|j| 10f64.powi(j)).collect()
}

pub fn default_pss_sigmas() -> Vec<f64> {
    let mut v = decades(-3, 3);
    v.extend(decades(-3, 2).into_iter().map(|x| 5.0 * x));
    v
}

pub fn default_pwg_values() -> Vec<f64> {
    decades(-2, 2)
}

pub fn default_sw_factors() -> Vec<f64> {
    vec![0.01, 0.1, 1.0, 10.0, 100.0]
}

fn default_delta() -> u32 {
    10
}

fn default_slices() -> usize {
    10
}

/// A kernel family with its search grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kernel", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelGrid {
    Pss {
        #[serde(default = "default_pss_sigmas")]
        sigmas: Vec<f64>,
    },
    /// The bandwidth of the underlying Gaussian is the median pairwise
    /// distance between all training points unless given.
    Pwg {
        #[serde(default = "default_pwg_values")]
        cs: Vec<f64>,
        #[serde(default = "default_pwg_values")]
        taus: Vec<f64>,
        #[serde(default = "default_delta")]
        delta: u32,
        #[serde(default)]
        bandwidth: Option<f64>,
    },
    /// `sigmas` default to `sigma_factors` times the median pairwise sliced
    /// distance on the training set.
    Sw {
        #[serde(default = "default_slices")]
        n_slices: usize,
        #[serde(default = "default_sw_factors")]
        sigma_factors: Vec<f64>,
        #[serde(default)]
        sigmas: Option<Vec<f64>>,
    },
}

impl KernelGrid {
    pub fn pss() -> Self {
        KernelGrid::Pss {
            sigmas: default_pss_sigmas(),
        }
    }

    pub fn pwg() -> Self {
        KernelGrid::Pwg {
            cs: default_pwg_values(),
            taus: default_pwg_values(),
            delta: default_delta(),
            bandwidth: None,
        }
    }

    pub fn sw() -> Self {
        KernelGrid::Sw {
            n_slices: default_slices(),
            sigma_factors: default_sw_factors(),
            sigmas: None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelGrid::Pss { .. } => "PSS",
            KernelGrid::Pwg { .. } => "PWG",
            KernelGrid::Sw { .. } => "SW",
        }
    }
}

/// Where the samples come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Dataset {
    Orbits(OrbitDataset),
    /// A directory with `manifest.json` and diagram files.
    Directory(PathBuf),
}

/// Everything a classification run needs. Every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: Dataset,
    pub diagrams: DiagramOptions,
    /// Keep only the `k` most persistent points before the kernel. The
    /// compressing scaling instead works on the full diagram, since it
    /// summarises the discarded points.
    pub top_k: Option<usize>,
    pub kernels: Vec<KernelGrid>,
    /// `null` stands for the unscaled kernel.
    pub scalings: Vec<Option<ScalingFunction>>,
    pub train_fraction: f64,
    pub n_folds: usize,
    pub repetitions: usize,
    pub zetas: Vec<f64>,
    pub f1_average: F1Average,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: Dataset::Orbits(OrbitDataset::default()),
            diagrams: DiagramOptions::default(),
            top_k: Some(10),
            kernels: vec![KernelGrid::pss(), KernelGrid::pwg(), KernelGrid::sw()],
            scalings: vec![
                None,
                Some(ScalingFunction::augment(Auxiliary::Persistence)),
                Some(ScalingFunction::compress(10, Auxiliary::Persistence)),
            ],
            train_fraction: 0.7,
            n_folds: 5,
            repetitions: 3,
            zetas: default_zetas(),
            f1_average: F1Average::Macro,
            seed: 0,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::input("train_fraction must lie in (0, 1)"));
        }
        if self.n_folds < 2 {
            return Err(Error::input("n_folds must be at least 2"));
        }
        if self.repetitions == 0 {
            return Err(Error::input("repetitions must be at least 1"));
        }
        if self.kernels.is_empty() || self.scalings.is_empty() || self.zetas.is_empty() {
            return Err(Error::input("kernels, scalings and zetas must be non-empty"));
        }
        if let Some(0) = self.top_k {
            return Err(Error::input("top_k must be at least 1"));
        }
        for s in self.scalings.iter().flatten() {
            if s.scaling == (Scaling::Compress { rho: 0 }) {
                return Err(Error::input("rho must be at least 1"));
            }
        }
        if let Dataset::Orbits(o) = &self.dataset {
            if o.labels.is_empty() || o.points_per_orbit == 0 {
                return Err(Error::input("the orbit dataset is empty"));
            }
            if o.orbits_per_label < self.n_folds {
                return Err(Error::input(format!(
                    "{} orbits per label cannot fill {} folds",
                    o.orbits_per_label, self.n_folds
                )));
            }
        }
        Ok(())
    }

    /// Loads or generates the samples.
    pub fn load_dataset(&self) -> Result<DiagramSet> {
        match &self.dataset {
            Dataset::Orbits(o) => Ok(orbit_diagram_set(&generate_orbit_samples(o, &self.diagrams)?)),
            Dataset::Directory(dir) => io::load_diagram_set(dir),
        }
    }
}

fn scaling_names(s: &Option<ScalingFunction>) -> (String, String) {
    match s {
        None => ("none".into(), "-".into()),
        Some(f) => {
            let scaling = match f.scaling {
                Scaling::Augment => "augment".to_string(),
                Scaling::Compress { rho } => format!("compress({rho})"),
            };
            let centre = match f.auxiliary {
                Auxiliary::UniformMass => "mass",
                Auxiliary::Persistence => "persistence",
            };
            (scaling, centre.into())
        }
    }
}

/// Diagrams as the kernel sees them: reduced to the top `k` points unless
/// the scaling compresses, then scaled.
pub fn kernel_inputs(
    diagrams: &[PersistenceDiagram],
    top_k: Option<usize>,
    scaling: &Option<ScalingFunction>,
) -> Vec<PersistenceDiagram> {
    diagrams
        .par_iter()
        .map(|d| {
            let compress = matches!(scaling.map(|s| s.scaling), Some(Scaling::Compress { .. }));
            let reduced = match top_k {
                Some(k) if !compress => d.top_k(k),
                _ => d.clone(),
            };
            match scaling {
                Some(s) => s.apply(&reduced),
                None => reduced,
            }
        })
        .collect()
}

fn off_diagonal(n: usize, m: &[f64]) -> Vec<f64> {
    (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| m[i * n + j]))
        .collect()
}

/// Candidate kernels of a grid, given the (scaled) training diagrams.
fn grid_params(grid: &KernelGrid, train: &[PersistenceDiagram]) -> Result<Vec<KernelKind>> {
    Ok(match grid {
        KernelGrid::Pss { sigmas } => sigmas.iter().map(|&sigma| KernelKind::Pss { sigma }).collect(),
        KernelGrid::Pwg {
            cs,
            taus,
            delta,
            bandwidth,
        } => {
            let bandwidth = match bandwidth {
                Some(b) => *b,
                None => pwg_bandwidth(train)?,
            };
            cs.iter()
                .flat_map(|&c| {
                    taus.iter().map(move |&tau| KernelKind::Pwg {
                        bandwidth,
                        c,
                        delta: *delta,
                        tau,
                    })
                })
                .collect()
        }
        KernelGrid::Sw {
            n_slices,
            sigma_factors,
            sigmas,
        } => {
            let sigmas = match sigmas {
                Some(s) => s.clone(),
                None => {
                    let d = sliced_distances(train, *n_slices);
                    let med = median_heuristic(&off_diagonal(train.len(), &d))?;
                    sigma_factors.iter().map(|f| f * med).collect()
                }
            };
            sigmas
                .into_iter()
                .map(|sigma| KernelKind::Sw {
                    sigma,
                    n_slices: *n_slices,
                })
                .collect()
        }
    })
}

/// Gram matrix of an unscaled kernel, reusing sliced distances when given.
fn gram_of(kind: &KernelKind, diagrams: &[PersistenceDiagram], sw: Option<&[f64]>) -> Result<GramMatrix> {
    match (kind, sw) {
        (KernelKind::Sw { sigma, .. }, Some(d)) => sw_gram_from_distances(diagrams.len(), d, *sigma),
        _ => gram_matrix(&DiagramKernel::new(*kind)?, diagrams),
    }
}

/// Outcome of a grid search on a training set.
#[derive(Debug, Clone)]
pub struct Validation {
    pub kernel: KernelKind,
    pub zeta: f64,
    pub cv_accuracy: f64,
    /// Wall-clock seconds: scaling, grid set-up, Gram matrices and CV.
    pub seconds: f64,
}

/// Grid search for one kernel family and scaling on `train_raw`. The
/// reported time covers scaling, grid set-up, Gram matrices and CV.
pub fn cross_validate_grid(
    grid: &KernelGrid,
    scaling: &Option<ScalingFunction>,
    top_k: Option<usize>,
    train_raw: &[PersistenceDiagram],
    train_labels: &[usize],
    cv: &CvConfig,
) -> Result<CvReport<KernelKind>> {
    let start = Instant::now();
    let train = kernel_inputs(train_raw, top_k, scaling);
    let params = grid_params(grid, &train)?;
    let sw = match grid {
        KernelGrid::Sw { n_slices, .. } => Some(sliced_distances(&train, *n_slices)),
        _ => None,
    };
    let mut report = cross_validate(&params, |k| gram_of(k, &train, sw.as_deref()), train_labels, cv)?;
    report.validation_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}


fn validate_kernel(
    grid: &KernelGrid,
    scaling: &Option<ScalingFunction>,
    top_k: Option<usize>,
    train_raw: &[PersistenceDiagram],
    train_labels: &[usize],
    cv: &CvConfig,
) -> Result<Validation> {
    let report = cross_validate_grid(grid, scaling, top_k, train_raw, train_labels, cv)?;
    let best = report.best();
    Ok(Validation {
        kernel: best.params,
        zeta: best.zeta,
        cv_accuracy: best.mean_accuracy,
        seconds: report.validation_seconds,
    })
}

/// One repetition of one table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub repetition: usize,
    pub accuracy: f64,
    pub f1: f64,
    pub kernel: KernelKind,
    pub zeta: f64,
    pub cv_accuracy: f64,
    #[serde(skip)]
    pub validation_seconds: f64,
    #[serde(skip)]
    pub test_indices: Vec<usize>,
    #[serde(skip)]
    pub predictions: Vec<usize>,
}

/// A kernel with one scaling, over all repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub kernel: String,
    pub scaling: String,
    pub centre: String,
    pub accuracy: f64,
    pub f1: f64,
    pub accuracy_std: f64,
    pub runs: Vec<RunResult>,
}

impl ReportRow {
    pub fn validation_seconds(&self) -> f64 {
        self.runs.iter().map(|r| r.validation_seconds).sum::<f64>() / self.runs.len() as f64
    }

    fn file_stem(&self) -> String {
        format!("{}_{}_{}", self.kernel, self.scaling, self.centre)
            .to_lowercase()
            .replace(['(', ')'], "")
            .replace('-', "none")
    }
}

/// Results of a run. Serialised without timings, so equal seeds give equal
/// bytes; timings are written separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub classes: Vec<String>,
    pub n_samples: usize,
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn row(&self, kernel: &str, scaling: &str) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.kernel == kernel && r.scaling == scaling)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Human-readable table, validation times included.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<6} {:<14} {:<12} {:>9} {:>9} {:>20}",
            "kernel", "scaling", "centre", "accuracy", "f1", "validation time (s)"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<6} {:<14} {:<12} {:>9.3} {:>9.3} {:>20.2}",
                r.kernel,
                r.scaling,
                r.centre,
                r.accuracy,
                r.f1,
                r.validation_seconds()
            );
        }
        out
    }

    /// Per-run scores, one line per repetition and row.
    pub fn scores_csv(&self) -> String {
        let mut out = String::from("kernel,scaling,centre,repetition,accuracy,f1\n");
        for r in &self.rows {
            for run in &r.runs {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.kernel, r.scaling, r.centre, run.repetition, run.accuracy, run.f1
                );
            }
        }
        out
    }

    /// Writes `report.json`, `report.txt`, `scores.csv`, `timings.json` and
    /// one predictions file per row and repetition.
    pub fn write(&self, dir: &Path, set: &DiagramSet) -> Result<()> {
        fs::create_dir_all(dir.join("predictions"))?;
        fs::write(dir.join("report.json"), self.to_json()?)?;
        fs::write(dir.join("report.txt"), self.table())?;
        fs::write(dir.join("scores.csv"), self.scores_csv())?;
        let timings: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                serde_json::json!({
                    "kernel": r.kernel,
                    "scaling": r.scaling,
                    "centre": r.centre,
                    "validation_seconds": r.runs.iter().map(|x| x.validation_seconds).collect::<Vec<_>>(),
                    "mean_validation_seconds": r.validation_seconds(),
                })
            })
            .collect();
        fs::write(
            dir.join("timings.json"),
            serde_json::to_string_pretty(&timings)? + "\n",
        )?;
        for r in &self.rows {
            for run in &r.runs {
                let ids: Vec<String> = run.test_indices.iter().map(|&i| set.names[i].clone()).collect();
                let truth: Vec<String> = run
                    .test_indices
                    .iter()
                    .map(|&i| set.classes[set.labels[i]].clone())
                    .collect();
                let pred: Vec<String> = run.predictions.iter().map(|&c| set.classes[c].clone()).collect();
                let path = dir
                    .join("predictions")
                    .join(format!("{}_rep{}.csv", r.file_stem(), run.repetition));
                io::write_predictions(&path, &ids, &truth, &pred)?;
            }
        }
        Ok(())
    }
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Runs the protocol on `set` for every kernel and scaling of `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig, set: &DiagramSet) -> Result<ExperimentReport> {
    cfg.validate()?;
    if set.classes.len() < 2 {
        return Err(Error::input("at least two classes are needed"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let seeds: Vec<u64> = (0..cfg.repetitions).map(|_| rng.next_u64()).collect();
    let splits = seeds
        .iter()
        .map(|&s| stratified_split(&set.labels, cfg.train_fraction, s))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for grid in &cfg.kernels {
        for scaling in &cfg.scalings {
            let (scaling_name, centre) = scaling_names(scaling);
            let all_inputs = kernel_inputs(&set.diagrams, cfg.top_k, scaling);
            let mut runs = Vec::new();
            for (rep, (train, test)) in splits.iter().enumerate() {
                let train_raw: Vec<PersistenceDiagram> =
                    train.iter().map(|&i| set.diagrams[i].clone()).collect();
                let train_labels: Vec<usize> = train.iter().map(|&i| set.labels[i]).collect();
                let cv = CvConfig {
                    n_folds: cfg.n_folds,
                    seed: seeds[rep],
                    zetas: cfg.zetas.clone(),
                    f1_average: cfg.f1_average,
                };
                let v = validate_kernel(grid, scaling, cfg.top_k, &train_raw, &train_labels, &cv)?;
                let sw = match v.kernel {
                    KernelKind::Sw { n_slices, .. } => Some(sliced_distances(&all_inputs, n_slices)),
                    _ => None,
                };
                let k = gram_of(&v.kernel, &all_inputs, sw.as_deref())?;
                let outcome = evaluate_split(&k, &set.labels, train, test, v.zeta, cfg.f1_average)?;
                info!(
                    "{} {} {} run {rep}: accuracy {:.3}, f1 {:.3}, validation {:.2}s",
                    grid.name(),
                    scaling_name,
                    centre,
                    outcome.scores.accuracy,
                    outcome.scores.f1,
                    v.seconds
                );
                runs.push(RunResult {
                    repetition: rep,
                    accuracy: outcome.scores.accuracy,
                    f1: outcome.scores.f1,
                    kernel: v.kernel,
                    zeta: v.zeta,
                    cv_accuracy: v.cv_accuracy,
                    validation_seconds: v.seconds,
                    test_indices: test.clone(),
                    predictions: outcome.predictions,
                });
            }
            let (accuracy, accuracy_std) = mean_std(&runs.iter().map(|r| r.accuracy).collect::<Vec<_>>());
            let (f1, _) = mean_std(&runs.iter().map(|r| r.f1).collect::<Vec<_>>());
            rows.push(ReportRow {
                kernel: grid.name().into(),
                scaling: scaling_name,
                centre,
                accuracy,
                f1,
                accuracy_std,
                runs,
            });
        }
    }
    Ok(ExperimentReport {
        classes: set.classes.clone(),
        n_samples: set.len(),
        rows,
    })
}
