use std::cmp::Ordering;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering as AtomicOrdering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::geometry::DistanceMatrix;

pub type Vertices = SmallVec<[u32; 4]>;

/// Default bound on the number of simplices a filtration may hold.
pub const DEFAULT_SIMPLEX_CAP: usize = 50_000_000;

/// A simplex together with the radius at which it enters the filtration.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    vertices: Vertices,
    radius: f64,
}

impl Simplex {
    /// `vertices` must be strictly increasing.
    pub fn new(vertices: &[u32], radius: f64) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::input("a simplex needs at least one vertex"));
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input(format!(
                "simplex vertices {vertices:?} are not strictly increasing"
            )));
        }
        if radius.is_nan() || radius < 0.0 {
            return Err(Error::input(format!("simplex radius {radius} is negative")));
        }
        Ok(Simplex {
            vertices: SmallVec::from_slice(vertices),
            radius,
        })
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Iterates the codimension-one faces; face `k` omits vertex `k`.
    pub fn faces(&self) -> impl Iterator<Item = Vertices> + '_ {
        let n = self.vertices.len();
        let k_range = if n > 1 { 0..n } else { 0..0 };
        k_range.map(move |k| {
            self.vertices
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &v)| v)
                .collect()
        })
    }
}

/// Filtration order: radius, then dimension, then lexicographic vertices.
fn filtration_order(a: &Simplex, b: &Simplex) -> Ordering {
    a.radius
        .total_cmp(&b.radius)
        .then(a.vertices.len().cmp(&b.vertices.len()))
        .then_with(|| a.vertices.cmp(&b.vertices))
}

/// Upper bound on simplex radii.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// Keep every simplex.
    Unbounded,
    /// Keep simplices of diameter at most the given value.
    At(f64),
    /// Keep simplices up to [`DistanceMatrix::enclosing_radius`]; no homology
    /// in positive dimension is created past it.
    #[default]
    Enclosing,
}

impl Threshold {
    fn resolve(self, dm: &DistanceMatrix) -> Result<f64> {
        match self {
            Threshold::Unbounded => Ok(f64::INFINITY),
            Threshold::At(t) if t > 0.0 => Ok(t),
            Threshold::At(t) => Err(Error::input(format!("threshold must be positive, got {t}"))),
            Threshold::Enclosing => Ok(dm.enclosing_radius()),
        }
    }
}

/// A simplicial filtration: simplices listed so that every face precedes its
/// cofaces.
#[derive(Debug, Clone)]
pub struct Filtration {
    simplices: Vec<Simplex>,
    max_dim: usize,
    threshold: f64,
}

impl Filtration {
    /// Wraps an explicit simplex list, checking that it is closed under
    /// taking faces, that faces come first and never enter later than their
    /// cofaces. `max_dim` is the top homology dimension of interest;
    /// simplices of dimension `max_dim + 1` are allowed.
    pub fn from_simplices(simplices: Vec<Simplex>, max_dim: usize) -> Result<Self> {
        let mut seen: std::collections::HashMap<Vertices, f64> =
            std::collections::HashMap::with_capacity(simplices.len());
        let mut threshold = 0.0f64;
        for s in &simplices {
            if s.dim() > max_dim + 1 {
                return Err(Error::input(format!(
                    "simplex {:?} exceeds dimension {}",
                    s.vertices(),
                    max_dim + 1
                )));
            }
            for face in s.faces() {
                match seen.get(&face) {
                    Some(&r) if r <= s.radius => {}
                    Some(_) => {
                        return Err(Error::input(format!(
                            "face {face:?} enters after its coface {:?}",
                            s.vertices()
                        )))
                    }
                    None => {
                        return Err(Error::input(format!(
                            "face {face:?} of {:?} is missing or listed later",
                            s.vertices()
                        )))
                    }
                }
            }
            if seen.insert(s.vertices.clone(), s.radius).is_some() {
                return Err(Error::input(format!("simplex {:?} listed twice", s.vertices())));
            }
            threshold = threshold.max(s.radius);
        }
        Ok(Filtration {
            simplices,
            max_dim,
            threshold,
        })
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// Largest radius admitted when the filtration was built.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn into_simplices(self) -> Vec<Simplex> {
        self.simplices
    }
}

/// Options for [`build_rips_filtration_with`].
#[derive(Debug, Clone, Copy)]
pub struct RipsOptions {
    pub max_dim: usize,
    pub threshold: Threshold,
    pub simplex_cap: usize,
}

impl Default for RipsOptions {
    fn default() -> Self {
        RipsOptions {
            max_dim: 1,
            threshold: Threshold::default(),
            simplex_cap: DEFAULT_SIMPLEX_CAP,
        }
    }
}

/// Vietoris–Rips filtration up to dimension `max_dim + 1`, so that classes
/// in dimension `max_dim` can die.
pub fn build_rips_filtration(
    dm: &DistanceMatrix,
    max_dim: usize,
    threshold: Threshold,
) -> Result<Filtration> {
    build_rips_filtration_with(
        dm,
        &RipsOptions {
            max_dim,
            threshold,
            ..RipsOptions::default()
        },
    )
}

pub fn build_rips_filtration_with(dm: &DistanceMatrix, opts: &RipsOptions) -> Result<Filtration> {
    let threshold = opts.threshold.resolve(dm)?;
    let n = dm.len();
    if n > u32::MAX as usize {
        return Err(Error::input("too many points"));
    }
    let top = opts.max_dim + 1;

    // higher-indexed neighbours within the threshold
    let neighbours: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            (i + 1..n)
                .filter(|&j| dm.get(i, j) <= threshold)
                .map(|j| j as u32)
                .collect()
        })
        .collect();

    let count = AtomicUsize::new(n);
    let overflow = AtomicBool::new(false);
    if n > opts.simplex_cap {
        return Err(Error::TooManySimplices {
            cap: opts.simplex_cap,
        });
    }

    let mut simplices: Vec<Simplex> = (0..n as u32)
        .into_par_iter()
        .flat_map_iter(|v| {
            let mut out = vec![Simplex {
                vertices: SmallVec::from_slice(&[v]),
                radius: 0.0,
            }];
            let mut stack = Vertices::new();
            stack.push(v);
            extend_cliques(
                dm,
                &neighbours,
                &mut stack,
                &neighbours[v as usize],
                0.0,
                top,
                &mut out,
                &count,
                &overflow,
                opts.simplex_cap,
            );
            out
        })
        .collect();

    if overflow.load(AtomicOrdering::Relaxed) {
        return Err(Error::TooManySimplices {
            cap: opts.simplex_cap,
        });
    }
    simplices.par_sort_unstable_by(filtration_order);
    Ok(Filtration {
        simplices,
        max_dim: opts.max_dim,
        threshold,
    })
}

#[allow(clippy::too_many_arguments)]
fn extend_cliques(
    dm: &DistanceMatrix,
    neighbours: &[Vec<u32>],
    clique: &mut Vertices,
    candidates: &[u32],
    diameter: f64,
    top: usize,
    out: &mut Vec<Simplex>,
    count: &AtomicUsize,
    overflow: &AtomicBool,
    cap: usize,
) {
    if clique.len() > top || overflow.load(AtomicOrdering::Relaxed) {
        return;
    }
    for (k, &w) in candidates.iter().enumerate() {
        let diam = clique
            .iter()
            .map(|&u| dm.get(u as usize, w as usize))
            .fold(diameter, f64::max);
        if count.fetch_add(1, AtomicOrdering::Relaxed) + 1 > cap {
            overflow.store(true, AtomicOrdering::Relaxed);
            return;
        }
        clique.push(w);
        out.push(Simplex {
            vertices: clique.clone(),
            radius: diam,
        });
        if clique.len() <= top {
            // common higher neighbours of the enlarged clique
            let next: Vec<u32> = candidates[k + 1..]
                .iter()
                .copied()
                .filter(|x| neighbours[w as usize].binary_search(x).is_ok())
                .collect();
            if !next.is_empty() {
                extend_cliques(
                    dm, neighbours, clique, &next, diam, top, out, count, overflow, cap,
                );
            }
        }
        clique.pop();
    }
}
