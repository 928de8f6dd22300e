//! Persistence kernels and Gram matrices.
//!
//! Three kernels on diagrams are implemented:
//!
//! * persistence scale space ([`pss_kernel`]), the heat-diffusion kernel with
//!   the mirror-image correction at the diagonal;
//! * persistence weighted Gaussian ([`pwg_kernel`]), a Gaussian on the
//!   distance between weighted kernel mean embeddings;
//! * sliced Wasserstein ([`sw_kernel`]), a Gaussian-type kernel on the
//!   sliced distance.
//!
//! Every kernel is exactly symmetric: arguments are put in a canonical order
//! before summation, so `k(a, b)` and `k(b, a)` agree to the last bit.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagram::{DiagramPoint, PersistenceDiagram, SlicedProjections};
use crate::error::{Error, Result};
use crate::vspk::ScalingFunction;

/// A base kernel and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    Pss {
        sigma: f64,
    },
    /// `bandwidth` is the width of the underlying Gaussian, `c` and `delta`
    /// shape the weight `arctan(c·(d−b)^delta)`, `tau` the outer Gaussian.
    Pwg {
        bandwidth: f64,
        c: f64,
        delta: u32,
        tau: f64,
    },
    Sw {
        sigma: f64,
        n_slices: usize,
    },
}

impl KernelKind {
    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::Pss { .. } => "pss",
            KernelKind::Pwg { .. } => "pwg",
            KernelKind::Sw { .. } => "sw",
        }
    }
}

/// A kernel on persistence diagrams, optionally precomposed with a scaling map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramKernel {
    kind: KernelKind,
    #[serde(default)]
    scaling: Option<ScalingFunction>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::input(format!("{name} must be positive and finite, got {v}")))
    }
}

impl DiagramKernel {
    pub fn new(kind: KernelKind) -> Result<Self> {
        let k = DiagramKernel {
            kind,
            scaling: None,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn pss(sigma: f64) -> Result<Self> {
        Self::new(KernelKind::Pss { sigma })
    }

    pub fn pwg(bandwidth: f64, c: f64, delta: u32, tau: f64) -> Result<Self> {
        Self::new(KernelKind::Pwg {
            bandwidth,
            c,
            delta,
            tau,
        })
    }

    pub fn sw(sigma: f64, n_slices: usize) -> Result<Self> {
        Self::new(KernelKind::Sw { sigma, n_slices })
    }

    /// Checks every parameter; needed after deserialization.
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            KernelKind::Pss { sigma } => positive("sigma", sigma),
            KernelKind::Pwg {
                bandwidth,
                c,
                delta,
                tau,
            } => {
                positive("bandwidth", bandwidth)?;
                positive("c", c)?;
                positive("tau", tau)?;
                if delta == 0 {
                    return Err(Error::input("delta must be a positive integer"));
                }
                Ok(())
            }
            KernelKind::Sw { sigma, n_slices } => {
                positive("sigma", sigma)?;
                if n_slices == 0 {
                    return Err(Error::input("n_slices must be at least 1"));
                }
                Ok(())
            }
        }?;
        if let Some(crate::vspk::Scaling::Compress { rho: 0 }) = self.scaling.map(|s| s.scaling) {
            return Err(Error::input("rho must be at least 1"));
        }
        Ok(())
    }

    /// The same kernel evaluated on `Ψ(D1), Ψ(D2)`. Replaces any earlier scaling.
    pub fn with_scaling(self, s: ScalingFunction) -> Self {
        DiagramKernel {
            scaling: Some(s),
            ..self
        }
    }

    pub fn without_scaling(self) -> Self {
        DiagramKernel {
            scaling: None,
            ..self
        }
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn scaling(&self) -> Option<ScalingFunction> {
        self.scaling
    }

    fn scale(&self, d: &PersistenceDiagram) -> PersistenceDiagram {
        match &self.scaling {
            Some(s) => s.apply(d),
            None => d.clone(),
        }
    }

    /// `k(D1, D2)`, scaling both arguments first if a scaling is set.
    pub fn evaluate(&self, d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> f64 {
        let (a, b) = (self.scale(d1), self.scale(d2));
        match self.kind {
            KernelKind::Pss { sigma } => pss_kernel(&a, &b, sigma),
            KernelKind::Pwg {
                bandwidth,
                c,
                delta,
                tau,
            } => pwg_kernel(&a, &b, bandwidth, c, delta, tau),
            KernelKind::Sw { sigma, n_slices } => sw_kernel(&a, &b, sigma, n_slices),
        }
    }
}

fn cmp_diagrams(a: &PersistenceDiagram, b: &PersistenceDiagram) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        a.points()
            .iter()
            .zip(b.points())
            .map(|(p, q)| p.birth.total_cmp(&q.birth).then(p.death.total_cmp(&q.death)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

fn canonical<'a>(
    a: &'a PersistenceDiagram,
    b: &'a PersistenceDiagram,
) -> (&'a PersistenceDiagram, &'a PersistenceDiagram) {
    if cmp_diagrams(a, b).is_gt() {
        (b, a)
    } else {
        (a, b)
    }
}

fn sq_dist(x: &DiagramPoint, y: &DiagramPoint) -> f64 {
    let (db, dd) = (x.birth - y.birth, x.death - y.death);
    db * db + dd * dd
}

/// Persistence scale space kernel
/// `(1/(8πσ)) Σ_{y∈D1, z∈D2} exp(−‖y−z‖²/(8σ)) − exp(−‖y−z̄‖²/(8σ))`,
/// where `z̄` swaps birth and death. Zero when either diagram is empty.
pub fn pss_kernel(d1: &PersistenceDiagram, d2: &PersistenceDiagram, sigma: f64) -> f64 {
    let (a, b) = canonical(d1, d2);
    let scale = 8.0 * sigma;
    let mut sum = 0.0;
    for y in a.points() {
        for z in b.points() {
            let mirrored = DiagramPoint::new(z.death, z.birth);
            sum += (-sq_dist(y, z) / scale).exp() - (-sq_dist(y, &mirrored) / scale).exp();
        }
    }
    sum / (8.0 * PI * sigma)
}

fn arctan_weight(p: &DiagramPoint, c: f64, delta: u32) -> f64 {
    (c * p.persistence().powi(delta as i32)).atan()
}

/// Inner product of the weighted embeddings:
/// `Σ_{x∈D1} Σ_{y∈D2} ω(x) ω(y) exp(−‖x−y‖²/(2ρ²))` with `ω = arctan(C·(d−b)^δ)`.
pub fn pwg_embedding_inner(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    bandwidth: f64,
    c: f64,
    delta: u32,
) -> f64 {
    let (a, b) = canonical(d1, d2);
    let wb: Vec<f64> = b.points().iter().map(|p| arctan_weight(p, c, delta)).collect();
    let denom = 2.0 * bandwidth * bandwidth;
    let mut sum = 0.0;
    for x in a.points() {
        let wx = arctan_weight(x, c, delta);
        for (y, wy) in b.points().iter().zip(&wb) {
            sum += wx * wy * (-sq_dist(x, y) / denom).exp();
        }
    }
    sum
}

fn pwg_from_inners(i11: f64, i22: f64, i12: f64, tau: f64) -> f64 {
    let dist_sq = (i11 + i22 - 2.0 * i12).max(0.0);
    (-dist_sq / (2.0 * tau * tau)).exp()
}

/// Persistence weighted Gaussian kernel `exp(−‖E(D1) − E(D2)‖² / (2τ²))`.
pub fn pwg_kernel(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    bandwidth: f64,
    c: f64,
    delta: u32,
    tau: f64,
) -> f64 {
    let inner = |a, b| pwg_embedding_inner(a, b, bandwidth, c, delta);
    pwg_from_inners(inner(d1, d1), inner(d2, d2), inner(d1, d2), tau)
}

/// Sliced Wasserstein kernel value for a precomputed distance.
pub fn sw_from_distance(distance: f64, sigma: f64) -> f64 {
    (-distance / (2.0 * sigma * sigma)).exp()
}

/// Sliced Wasserstein kernel `exp(−SW(D1, D2) / (2σ²))`.
pub fn sw_kernel(d1: &PersistenceDiagram, d2: &PersistenceDiagram, sigma: f64, n_slices: usize) -> f64 {
    let d = crate::diagram::sliced_wasserstein_distance(d1, d2, n_slices);
    sw_from_distance(d, sigma)
}

/// `k(x,x) + k(y,y) − 2k(x,y)`, clamped at zero. No square root is taken.
pub fn induced_distance(k: &DiagramKernel, d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> f64 {
    (k.evaluate(d1, d1) + k.evaluate(d2, d2) - 2.0 * k.evaluate(d1, d2)).max(0.0)
}

/// Where a Gram matrix came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramProvenance {
    pub kernel: DiagramKernel,
    /// SHA-256 of the diagram set, see [`diagram_set_hash`].
    pub diagram_set: String,
}

/// A dense symmetric matrix of kernel values, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    values: Vec<f64>,
    provenance: Option<GramProvenance>,
}

impl GramMatrix {
    /// Checks the shape, finiteness and exact symmetry.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::input(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                values.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let v = values[i * n + j];
                if !v.is_finite() {
                    return Err(Error::NonFiniteKernel { i, j });
                }
                if v != values[j * n + i] {
                    return Err(Error::input(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(GramMatrix {
            n,
            values,
            provenance: None,
        })
    }

    pub fn with_provenance(mut self, p: GramProvenance) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn provenance(&self) -> Option<&GramProvenance> {
        self.provenance.as_ref()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// The principal submatrix on `idx`, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> GramMatrix {
        let values = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| self.get(i, j)))
            .collect();
        GramMatrix {
            n: idx.len(),
            values,
            provenance: None,
        }
    }

    /// Kernel values between each of `rows` and each of `cols`.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<f64>> {
        rows.iter()
            .map(|&i| cols.iter().map(|&j| self.get(i, j)).collect())
            .collect()
    }

    /// Smallest eigenvalue, from a dense symmetric eigendecomposition.
    pub fn min_eigenvalue(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let m = DMatrix::from_row_slice(self.n, self.n, &self.values);
        m.symmetric_eigenvalues().min()
    }

    /// Whether every eigenvalue is at least `−tol·max(1, trace)`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol * self.trace().max(1.0)
    }
}

/// SHA-256 over the dimension and points of every diagram, in order.
pub fn diagram_set_hash(diagrams: &[PersistenceDiagram]) -> String {
    let mut h = Sha256::new();
    h.update((diagrams.len() as u64).to_le_bytes());
    for d in diagrams {
        h.update((d.dim() as u64).to_le_bytes());
        h.update((d.len() as u64).to_le_bytes());
        for p in d.points() {
            h.update(p.birth.to_le_bytes());
            h.update(p.death.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

fn upper_cells(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
}

fn fill_symmetric(n: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Result<Vec<f64>> {
    let cells = upper_cells(n);
    let upper: Vec<f64> = cells.par_iter().map(|&(i, j)| f(i, j)).collect();
    let mut values = vec![0.0; n * n];
    for (&(i, j), &v) in cells.iter().zip(&upper) {
        if !v.is_finite() {
            return Err(Error::NonFiniteKernel { i, j });
        }
        values[i * n + j] = v;
        values[j * n + i] = v;
    }
    Ok(values)
}

/// `K[i][j] = k(Dᵢ, Dⱼ)`.
///
/// The scaling map, sliced projections and PWG self-inners are computed once
/// per diagram before the cells are filled in parallel; each cell equals
/// [`DiagramKernel::evaluate`] on the same pair bit for bit.
pub fn gram_matrix(k: &DiagramKernel, diagrams: &[PersistenceDiagram]) -> Result<GramMatrix> {
    k.validate()?;
    if diagrams.is_empty() {
        return Err(Error::input("cannot build a Gram matrix of no diagrams"));
    }
    let scaled: Vec<PersistenceDiagram> = diagrams.par_iter().map(|d| k.scale(d)).collect();
    let n = scaled.len();
    let values = match k.kind {
        KernelKind::Pss { sigma } => fill_symmetric(n, |i, j| pss_kernel(&scaled[i], &scaled[j], sigma))?,
        KernelKind::Pwg {
            bandwidth,
            c,
            delta,
            tau,
        } => {
            let inner = |a, b| pwg_embedding_inner(a, b, bandwidth, c, delta);
            let selfs: Vec<f64> = scaled.par_iter().map(|d| inner(d, d)).collect();
            fill_symmetric(n, |i, j| {
                pwg_from_inners(selfs[i], selfs[j], inner(&scaled[i], &scaled[j]), tau)
            })?
        }
        KernelKind::Sw { sigma, n_slices } => {
            let dist = sliced_distances(&scaled, n_slices);
            fill_symmetric(n, |i, j| sw_from_distance(dist[i * n + j], sigma))?
        }
    };
    Ok(GramMatrix {
        n,
        values,
        provenance: Some(GramProvenance {
            kernel: *k,
            diagram_set: diagram_set_hash(diagrams),
        }),
    })
}

/// All pairwise sliced Wasserstein distances, row-major.
pub fn sliced_distances(diagrams: &[PersistenceDiagram], n_slices: usize) -> Vec<f64> {
    let proj: Vec<SlicedProjections> = diagrams
        .par_iter()
        .map(|d| SlicedProjections::new(d, n_slices))
        .collect();
    let n = diagrams.len();
    let cells = upper_cells(n);
    let upper: Vec<f64> = cells
        .par_iter()
        .map(|&(i, j)| if i == j { 0.0 } else { proj[i].distance(&proj[j]) })
        .collect();
    let mut out = vec![0.0; n * n];
    for (&(i, j), &v) in cells.iter().zip(&upper) {
        out[i * n + j] = v;
        out[j * n + i] = v;
    }
    out
}

/// SW Gram matrix from a precomputed distance matrix; lets a bandwidth grid
/// reuse one set of distances.
pub fn sw_gram_from_distances(n: usize, distances: &[f64], sigma: f64) -> Result<GramMatrix> {
    positive("sigma", sigma)?;
    GramMatrix::from_values(n, distances.iter().map(|&d| sw_from_distance(d, sigma)).collect())
}

/// Median of the positive entries; mean of the middle two for an even count.
pub fn median_heuristic(values: &[f64]) -> Result<f64> {
    let mut pos: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0).collect();
    if pos.is_empty() {
        return Err(Error::input("median heuristic needs at least one positive value"));
    }
    pos.sort_by(f64::total_cmp);
    let m = pos.len();
    Ok(if m % 2 == 1 {
        pos[m / 2]
    } else {
        (pos[m / 2 - 1] + pos[m / 2]) / 2.0
    })
}

/// Points used by [`pwg_bandwidth`] at most; larger pools are thinned by a
/// fixed stride.
pub const BANDWIDTH_MAX_POINTS: usize = 2000;

/// Median of the pairwise Euclidean distances between all points pooled from
/// `diagrams`.
pub fn pwg_bandwidth(diagrams: &[PersistenceDiagram]) -> Result<f64> {
    let pooled: Vec<DiagramPoint> = diagrams.iter().flat_map(|d| d.points().iter().copied()).collect();
    let stride = pooled.len().div_ceil(BANDWIDTH_MAX_POINTS).max(1);
    let pts: Vec<DiagramPoint> = pooled.into_iter().step_by(stride).collect();
    let dists: Vec<f64> = (0..pts.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let pts = &pts;
            (0..i).map(move |j| sq_dist(&pts[i], &pts[j]).sqrt())
        })
        .collect();
    median_heuristic(&dists)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vspk::{Auxiliary, ScalingFunction};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn diag(pairs: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::from_pairs(1, pairs).unwrap()
    }

    #[test]
    fn pss_golden() {
        let d = diag(&[(0.0, 1.0)]);
        let expected = (1.0 - (-0.25f64).exp()) / (8.0 * PI);
        assert!((pss_kernel(&d, &d, 1.0) - expected).abs() < 1e-12);
        assert_eq!(pss_kernel(&d, &diag(&[]), 1.0), 0.0);
    }

    #[test]
    fn pwg_golden() {
        let a = diag(&[(0.0, 1.0)]);
        let b = diag(&[(0.0, 3.0)]);
        let quarter_pi = PI / 4.0;
        assert!((pwg_embedding_inner(&a, &a, 0.7, 1.0, 1) - quarter_pi * quarter_pi).abs() < 1e-12);
        let expected = quarter_pi * 3f64.atan() * (-1f64).exp();
        assert!((pwg_embedding_inner(&a, &b, 2f64.sqrt(), 1.0, 1) - expected).abs() < 1e-12);
        assert_eq!(pwg_kernel(&a, &a, 1.0, 1.0, 1, 1.0), 1.0);
        assert_eq!(pwg_kernel(&diag(&[]), &diag(&[]), 1.0, 1.0, 1, 1.0), 1.0);
        let tau = 0.5;
        assert_relative_eq!(
            pwg_kernel(&a, &diag(&[]), 1.0, 1.0, 1, tau),
            (-(quarter_pi * quarter_pi) / (2.0 * tau * tau)).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn sw_identical_is_one() {
        let a = diag(&[(0.0, 1.0), (0.2, 0.9)]);
        assert_eq!(sw_kernel(&a, &a, 1.0, 10), 1.0);
    }

    #[test]
    fn median_examples() {
        assert_eq!(median_heuristic(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert_eq!(median_heuristic(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 2.5);
        assert_eq!(median_heuristic(&[0.0, 0.0, 5.0]).unwrap(), 5.0);
        assert!(median_heuristic(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DiagramKernel::pss(0.0).is_err());
        assert!(DiagramKernel::pwg(1.0, 1.0, 0, 1.0).is_err());
        assert!(DiagramKernel::sw(1.0, 0).is_err());
        assert!(DiagramKernel::sw(f64::NAN, 10).is_err());
    }

    #[test]
    fn small_grams() {
        let k = DiagramKernel::pss(0.5).unwrap();
        let d = diag(&[(0.1, 0.8), (0.3, 0.5)]);
        let g = gram_matrix(&k, std::slice::from_ref(&d)).unwrap();
        assert_eq!(g.values(), &[k.evaluate(&d, &d)]);
        let g = gram_matrix(&k, &[d.clone(), d.clone(), d.clone()]).unwrap();
        assert!(g.values().iter().all(|&v| v == g.get(0, 0)));
        assert!(gram_matrix(&k, &[]).is_err());
    }

    #[test]
    fn submatrix_and_block() {
        let g = GramMatrix::from_values(3, vec![1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0]).unwrap();
        assert_eq!(g.submatrix(&[2, 0]).values(), &[6.0, 3.0, 3.0, 1.0]);
        assert_eq!(g.block(&[1], &[0, 2]), vec![vec![2.0, 5.0]]);
        assert!(GramMatrix::from_values(2, vec![1.0, 2.0, 3.0, 1.0]).is_err());
    }

    fn arb_diagram(max: usize) -> impl Strategy<Value = PersistenceDiagram> {
        prop::collection::vec((0.0..1.0f64, 0.01..1.0f64), 0..=max)
            .prop_map(|v| diag(&v.into_iter().map(|(b, p)| (b, b + p)).collect::<Vec<_>>()))
    }

    fn kernels() -> Vec<DiagramKernel> {
        vec![
            DiagramKernel::pss(0.1).unwrap(),
            DiagramKernel::pwg(0.3, 1.0, 2, 0.5).unwrap(),
            DiagramKernel::sw(0.5, 10).unwrap(),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn kernels_are_exactly_symmetric(a in arb_diagram(8), b in arb_diagram(8)) {
            for k in kernels() {
                prop_assert_eq!(k.evaluate(&a, &b), k.evaluate(&b, &a));
                let d = induced_distance(&k, &a, &b);
                prop_assert!(d >= 0.0);
                prop_assert_eq!(d, induced_distance(&k, &b, &a));
                prop_assert_eq!(induced_distance(&k, &a, &a), 0.0);
            }
        }

        #[test]
        fn sw_kernel_in_unit_interval(a in arb_diagram(8), b in arb_diagram(8)) {
            let v = sw_kernel(&a, &b, 0.3, 10);
            prop_assert!(v > 0.0 && v <= 1.0);
        }

        #[test]
        fn gram_cells_match_evaluate(ds in prop::collection::vec(arb_diagram(6), 1..8)) {
            for k in kernels() {
                for k in [k, k.with_scaling(ScalingFunction::compress(2, Auxiliary::Persistence))] {
                    let g = gram_matrix(&k, &ds).unwrap();
                    for i in 0..ds.len() {
                        for j in 0..ds.len() {
                            prop_assert_eq!(g.get(i, j), k.evaluate(&ds[i], &ds[j]));
                        }
                    }
                }
            }
        }

        #[test]
        fn grams_are_psd(ds in prop::collection::vec(arb_diagram(6), 2..20)) {
            for k in kernels() {
                prop_assert!(gram_matrix(&k, &ds).unwrap().is_psd(1e-8));
            }
        }

        #[test]
        fn pss_is_lipschitz_under_small_shifts(
            a in arb_diagram(5), c in arb_diagram(5), shift in 1e-4..1e-2f64
        ) {
            // moving every point by `shift` changes W1 by at most |a|·shift and
            // the kernel by a bounded multiple of that
            let moved = diag(&a.points().iter().map(|p| (p.birth + shift, p.death + shift)).collect::<Vec<_>>());
            let sigma = 0.1;
            let dk = (pss_kernel(&a, &c, sigma) - pss_kernel(&moved, &c, sigma)).abs();
            let w1 = crate::diagram::wasserstein_distance(&a, &moved, 1.0);
            prop_assert!(dk <= 10.0 / sigma * w1 + 1e-15, "{} vs {}", dk, w1);
        }
    }
}
