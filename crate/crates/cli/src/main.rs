//! `vspk`: persistence diagrams, persistence kernels and kernel SVM
//! experiments from the command line.
//!
//! Exit codes: 0 on success, 1 on input errors, 2 on computation errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vspk::experiment::{
    cross_validate_grid, diagrams_of_cloud, generate_orbit_samples, run_experiment,
    write_orbit_samples, Dataset, DiagramOptions, ExperimentConfig, KernelGrid, OrbitDataset,
};
use vspk::geometry::{pairwise_distances, PointCloud};
use vspk::io::{self, Manifest, ManifestEntry};
use vspk::kernels::{gram_matrix, pwg_bandwidth, DiagramKernel, KernelKind};
use vspk::persistence::{
    betti_from_pairs, betti_number_oracle, build_rips_filtration, compute_persistence, Threshold,
};
use vspk::svm::CvConfig;
use vspk::vspk::{Auxiliary, ScalingFunction};
use vspk::{Error, Result};

#[derive(Parser)]
#[command(name = "vspk", version, about = "Persistence kernels and kernel SVM experiments")]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Log progress (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    /// Root directory for outputs whose path is not given explicitly.
    #[arg(long, global = true, env = "VSPK_OUTPUT_ROOT", default_value = "vspk-out")]
    output_root: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate linked twisted map orbits and their H1 diagrams.
    GenerateOrbits(GenerateArgs),
    /// Compute Rips persistence diagrams of CSV point clouds.
    ComputeDiagrams(DiagramArgs),
    /// Write the Gram matrix of a diagram set.
    Gram(GramArgs),
    /// Grid search by k-fold cross-validation on a diagram set.
    CrossValidate(CvArgs),
    /// Repeated split, cross-validation and test scoring.
    RunExperiment(ExperimentArgs),
    /// Compare diagram-derived Betti numbers with a brute-force rank computation.
    OracleCheck(OracleArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON experiment configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Seed for every random choice.
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p)?;
                serde_json::from_str(&text).map_err(|e| Error::Parse {
                    path: p.clone(),
                    message: e.to_string(),
                })?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
            if let Dataset::Orbits(o) = &mut cfg.dataset {
                o.seed = s;
            }
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct OrbitArgs {
    /// Twist parameters, one class each.
    #[arg(long, value_delimiter = ',')]
    labels: Option<Vec<f64>>,

    #[arg(long)]
    orbits_per_label: Option<usize>,

    #[arg(long)]
    points: Option<usize>,
}

impl OrbitArgs {
    fn apply(&self, o: &mut OrbitDataset) {
        if let Some(l) = &self.labels {
            o.labels = l.clone();
        }
        if let Some(n) = self.orbits_per_label {
            o.orbits_per_label = n;
        }
        if let Some(n) = self.points {
            o.points_per_orbit = n;
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    config: ConfigArgs,

    #[command(flatten)]
    orbits: OrbitArgs,

    /// Keep only the k most persistent points of each diagram.
    #[arg(long)]
    top_k: Option<usize>,

    /// Output directory [default: <output-root>/orbits].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThresholdArg {
    Enclosing,
    None,
}

#[derive(Args)]
struct DiagramArgs {
    /// Directory of CSV point clouds, one point per row, no header.
    #[arg(long)]
    input: PathBuf,

    /// CSV file with header `file,label`.
    #[arg(long)]
    labels: Option<PathBuf>,

    /// Homology dimensions to write.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    dims: Vec<usize>,

    /// Largest edge length kept.
    #[arg(long, conflicts_with = "threshold_rule")]
    threshold: Option<f64>,

    /// Threshold rule when no value is given.
    #[arg(long, value_enum, default_value = "enclosing")]
    threshold_rule: ThresholdArg,

    /// Output directory [default: <output-root>/diagrams].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum KernelArg {
    Pss,
    Pwg,
    Sw,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ScalingArg {
    None,
    Augment,
    Compress,
}

#[derive(Clone, Copy, ValueEnum)]
enum AuxArg {
    Mass,
    Persistence,
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long, value_enum, default_value = "none")]
    scaling: ScalingArg,

    /// Points kept by the compressing scaling.
    #[arg(long, default_value_t = 10)]
    rho: usize,

    /// Weighting of the added centre.
    #[arg(long, value_enum, default_value = "persistence")]
    aux: AuxArg,
}

impl ScalingArgs {
    fn get(&self) -> Result<Option<ScalingFunction>> {
        let aux = match self.aux {
            AuxArg::Mass => Auxiliary::UniformMass,
            AuxArg::Persistence => Auxiliary::Persistence,
        };
        Ok(match self.scaling {
            ScalingArg::None => None,
            ScalingArg::Augment => Some(ScalingFunction::augment(aux)),
            ScalingArg::Compress => {
                if self.rho == 0 {
                    return Err(Error::InvalidInput("--rho must be at least 1".into()));
                }
                Some(ScalingFunction::compress(self.rho, aux))
            }
        })
    }
}

#[derive(Args)]
struct GramArgs {
    /// Directory with manifest.json and diagram files.
    #[arg(long)]
    diagrams: PathBuf,

    #[arg(long, value_enum)]
    kernel: KernelArg,

    /// PSS or SW bandwidth.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,

    /// PWG Gaussian bandwidth [default: median pairwise point distance].
    #[arg(long)]
    bandwidth: Option<f64>,

    #[arg(long, default_value_t = 1.0)]
    c: f64,

    #[arg(long, default_value_t = 10)]
    delta: u32,

    #[arg(long, default_value_t = 1.0)]
    tau: f64,

    /// Directions of the sliced distance.
    #[arg(long, default_value_t = 10)]
    slices: usize,

    #[command(flatten)]
    scaling: ScalingArgs,

    /// Keep only the k most persistent points (ignored when compressing).
    #[arg(long)]
    top_k: Option<usize>,

    /// Output CSV; the sidecar goes next to it [default: <output-root>/gram.csv].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CvArgs {
    #[arg(long)]
    diagrams: PathBuf,

    #[arg(long, value_enum)]
    kernel: KernelArg,

    #[command(flatten)]
    scaling: ScalingArgs,

    #[arg(long)]
    top_k: Option<usize>,

    #[arg(long, default_value_t = 5)]
    folds: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output JSON [default: <output-root>/cv_report.json].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    config: ConfigArgs,

    #[command(flatten)]
    orbits: OrbitArgs,

    /// Use the diagrams in this directory instead of generating orbits.
    #[arg(long)]
    diagrams: Option<PathBuf>,

    #[arg(long, value_enum, value_delimiter = ',')]
    kernels: Option<Vec<KernelArg>>,

    #[arg(long)]
    repetitions: Option<usize>,

    #[arg(long)]
    folds: Option<usize>,

    #[arg(long)]
    top_k: Option<usize>,

    /// Output directory [default: config value or <output-root>/experiment].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// CSV point cloud; at most 12 points.
    #[arg(long, conflicts_with = "random")]
    cloud: Option<PathBuf>,

    /// Check this many uniformly random points in the unit square instead.
    #[arg(long)]
    random: Option<usize>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Highest homology dimension compared.
    #[arg(long, default_value_t = 1)]
    max_dim: usize,
}

fn kernel_grid(k: KernelArg) -> KernelGrid {
    match k {
        KernelArg::Pss => KernelGrid::pss(),
        KernelArg::Pwg => KernelGrid::pwg(),
        KernelArg::Sw => KernelGrid::sw(),
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn generate(root: &Path, a: &GenerateArgs) -> Result<()> {
    let cfg = a.config.load()?;
    let mut orbits = match cfg.dataset {
        Dataset::Orbits(o) => o,
        Dataset::Directory(_) => OrbitDataset::default(),
    };
    a.orbits.apply(&mut orbits);
    if orbits.labels.is_empty() || orbits.points_per_orbit == 0 {
        return Err(Error::InvalidInput("nothing to generate".into()));
    }
    if a.top_k == Some(0) {
        return Err(Error::InvalidInput("--top-k must be at least 1".into()));
    }
    let out = a.out.clone().unwrap_or_else(|| root.join("orbits"));
    let samples = generate_orbit_samples(&orbits, &cfg.diagrams)?;
    let manifest = write_orbit_samples(&samples, &out, a.top_k)?;
    let failed = manifest.entries.iter().filter(|e| e.error.is_some()).count();
    println!(
        "wrote {} diagrams to {} ({failed} flagged)",
        manifest.entries.len() - failed,
        out.display()
    );
    Ok(())
}

fn read_labels(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("file,label") {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            message: "expected the header `file,label`".into(),
        });
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.split_once(',')
                .map(|(f, lab)| (f.trim().to_string(), lab.trim().to_string()))
                .ok_or_else(|| Error::Parse {
                    path: path.to_path_buf(),
                    message: format!("line {}: expected `file,label`", i + 2),
                })
        })
        .collect()
}

fn compute_diagrams(root: &Path, a: &DiagramArgs) -> Result<()> {
    let out = a.out.clone().unwrap_or_else(|| root.join("diagrams"));
    fs::create_dir_all(&out)?;
    let labels = match &a.labels {
        Some(p) => read_labels(p)?,
        None => Vec::new(),
    };
    let mut files: Vec<PathBuf> = fs::read_dir(&a.input)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    if files.is_empty() {
        warn!("no CSV files in {}", a.input.display());
    }
    let opts = DiagramOptions {
        threshold: match (a.threshold, a.threshold_rule) {
            (Some(t), _) => Threshold::At(t),
            (None, ThresholdArg::Enclosing) => Threshold::Enclosing,
            (None, ThresholdArg::None) => Threshold::Unbounded,
        },
        ..DiagramOptions::default()
    };
    let mut manifest = Manifest::default();
    for path in &files {
        let name = path.file_name().unwrap_or_default().to_string_lossy().to_string();
        let stem = path.file_stem().unwrap_or_default().to_string_lossy().to_string();
        let label = labels
            .iter()
            .find(|(f, _)| *f == name || *f == stem)
            .map(|(_, l)| l.clone())
            .unwrap_or_default();
        let result = io::read_point_cloud(path).and_then(|c| diagrams_of_cloud(&c, &a.dims, &opts));
        for (k, &dim) in a.dims.iter().enumerate() {
            let file = format!("{stem}_h{dim}.csv");
            let error = match &result {
                Ok(ds) => {
                    io::write_diagram(&out.join(&file), &ds[k])?;
                    None
                }
                Err(e) => {
                    warn!("{}: {e}", path.display());
                    Some(e.to_string())
                }
            };
            manifest.entries.push(ManifestEntry {
                file,
                label: label.clone(),
                dim,
                error,
            });
        }
    }
    manifest.write(&out)?;
    println!("wrote {} entries to {}", manifest.entries.len(), out.display());
    Ok(())
}

fn gram(root: &Path, a: &GramArgs) -> Result<()> {
    let set = io::load_diagram_set(&a.diagrams)?;
    if set.is_empty() {
        return Err(Error::InvalidInput("the diagram set is empty".into()));
    }
    let scaling = a.scaling.get()?;
    let compress = a.scaling.scaling == ScalingArg::Compress;
    let inputs: Vec<_> = match a.top_k {
        Some(k) if !compress => set.diagrams.iter().map(|d| d.top_k(k)).collect(),
        _ => set.diagrams.clone(),
    };
    let kind = match a.kernel {
        KernelArg::Pss => KernelKind::Pss { sigma: a.sigma },
        KernelArg::Sw => KernelKind::Sw {
            sigma: a.sigma,
            n_slices: a.slices,
        },
        KernelArg::Pwg => {
            let bandwidth = match a.bandwidth {
                Some(b) => b,
                None => {
                    let scaled: Vec<_> = inputs
                        .iter()
                        .map(|d| scaling.map_or_else(|| d.clone(), |s| s.apply(d)))
                        .collect();
                    pwg_bandwidth(&scaled)?
                }
            };
            KernelKind::Pwg {
                bandwidth,
                c: a.c,
                delta: a.delta,
                tau: a.tau,
            }
        }
    };
    let mut kernel = DiagramKernel::new(kind)?;
    if let Some(s) = scaling {
        kernel = kernel.with_scaling(s);
    }
    let k = gram_matrix(&kernel, &inputs)?;
    let out = a.out.clone().unwrap_or_else(|| root.join("gram.csv"));
    if let Some(parent) = out.parent() {
        fs::create_dir_all(parent)?;
    }
    io::write_gram(&out, &k, &set.names)?;
    println!("wrote {n}x{n} Gram matrix to {}", out.display(), n = k.len());
    Ok(())
}

fn cross_validate(root: &Path, a: &CvArgs) -> Result<()> {
    let set = io::load_diagram_set(&a.diagrams)?;
    let cv = CvConfig {
        n_folds: a.folds,
        seed: a.seed,
        ..CvConfig::default()
    };
    let report = cross_validate_grid(
        &kernel_grid(a.kernel),
        &a.scaling.get()?,
        a.top_k,
        &set.diagrams,
        &set.labels,
        &cv,
    )?;
    let out = a.out.clone().unwrap_or_else(|| root.join("cv_report.json"));
    write_json(&out, &report)?;
    let best = report.best();
    println!(
        "selected {:?} with zeta {} (mean accuracy {:.3}, {:.2}s); report in {}",
        best.params,
        best.zeta,
        best.mean_accuracy,
        report.validation_seconds,
        out.display()
    );
    Ok(())
}

fn experiment(root: &Path, a: &ExperimentArgs) -> Result<()> {
    let mut cfg = a.config.load()?;
    if let Some(d) = &a.diagrams {
        cfg.dataset = Dataset::Directory(d.clone());
    }
    if let Dataset::Orbits(o) = &mut cfg.dataset {
        a.orbits.apply(o);
    }
    if let Some(k) = &a.kernels {
        cfg.kernels = k.iter().map(|&k| kernel_grid(k)).collect();
    }
    if let Some(r) = a.repetitions {
        cfg.repetitions = r;
    }
    if let Some(f) = a.folds {
        cfg.n_folds = f;
    }
    if a.top_k.is_some() {
        cfg.top_k = a.top_k;
    }
    if let Some(o) = &a.out {
        cfg.output_dir = Some(o.clone());
    }
    cfg.validate()?;
    let out = cfg.output_dir.clone().unwrap_or_else(|| root.join("experiment"));
    let set = cfg.load_dataset()?;
    info!("{} samples in {} classes", set.len(), set.classes.len());
    let report = run_experiment(&cfg, &set)?;
    write_json(&out.join("config.json"), &cfg)?;
    report.write(&out, &set)?;
    print!("{}", report.table());
    println!("results in {}", out.display());
    Ok(())
}

fn oracle_check(a: &OracleArgs) -> Result<()> {
    let cloud = match (&a.cloud, a.random) {
        (Some(p), _) => io::read_point_cloud(p)?,
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            PointCloud::new((0..n).map(|_| vec![rng.random(), rng.random()]).collect())?
        }
        (None, None) => return Err(Error::InvalidInput("give --cloud or --random".into())),
    };
    let dm = pairwise_distances(&cloud)?;
    let pairs = compute_persistence(&build_rips_filtration(&dm, a.max_dim, Threshold::Unbounded)?);
    let mut radii = vec![0.0];
    for i in 0..dm.len() {
        for j in 0..i {
            let d = dm.get(i, j);
            radii.extend([d - 1e-6, d, d + 1e-6]);
        }
    }
    let mut checked = 0;
    for &eps in &radii {
        for r in 0..=a.max_dim {
            let (from_pairs, oracle) = (betti_from_pairs(&pairs, eps, r), betti_number_oracle(&dm, eps, r)?);
            if from_pairs != oracle {
                return Err(Error::Computation(format!(
                    "dimension {r} at radius {eps}: diagram gives {from_pairs}, rank oracle gives {oracle}"
                )));
            }
            checked += 1;
        }
    }
    println!("{checked} Betti numbers agree ({} radii, dimensions 0..={})", radii.len(), a.max_dim);
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("--jobs: {e}")))?;
    }
    let root = &cli.output_root;
    match &cli.command {
        Command::GenerateOrbits(a) => generate(root, a),
        Command::ComputeDiagrams(a) => compute_diagrams(root, a),
        Command::Gram(a) => gram(root, a),
        Command::CrossValidate(a) => cross_validate(root, a),
        Command::RunExperiment(a) => experiment(root, a),
        Command::OracleCheck(a) => oracle_check(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 1 } else { 2 })
        }
    }
}
