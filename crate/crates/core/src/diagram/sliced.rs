use std::f64::consts::{FRAC_PI_2, PI};

use super::PersistenceDiagram;

/// Sorted projections of one diagram onto a fixed set of directions.
///
/// Directions are the midpoints `θ_k = −π/2 + (k + ½)·π/n`, `k = 0..n`.
/// For each direction the cache keeps the sorted projections of the points
/// and, separately, of their diagonal projections `((b+d)/2, (b+d)/2)`.
/// Distances between two caches then only need linear merges, so a Gram
/// matrix sorts each diagram once rather than once per pair.
#[derive(Debug, Clone)]
pub struct SlicedProjections {
    n_slices: usize,
    len: usize,
    points: Vec<f64>,
    diagonal: Vec<f64>,
}

/// The `k`-th of `n` midpoint directions as `(cos θ, sin θ)`.
pub(crate) fn direction(k: usize, n: usize) -> (f64, f64) {
    let theta = -FRAC_PI_2 + (k as f64 + 0.5) * PI / n as f64;
    (theta.cos(), theta.sin())
}

impl SlicedProjections {
    pub fn new(d: &PersistenceDiagram, n_slices: usize) -> Self {
        assert!(n_slices >= 1, "at least one slice is needed");
        let len = d.len();
        let mut points = Vec::with_capacity(n_slices * len);
        let mut diagonal = Vec::with_capacity(n_slices * len);
        for k in 0..n_slices {
            let (c, s) = direction(k, n_slices);
            let start = points.len();
            points.extend(d.points().iter().map(|p| p.birth * c + p.death * s));
            points[start..].sort_by(f64::total_cmp);
            diagonal.extend(d.points().iter().map(|p| {
                let m = (p.birth + p.death) / 2.0;
                m * c + m * s
            }));
            diagonal[start..].sort_by(f64::total_cmp);
        }
        SlicedProjections {
            n_slices,
            len,
            points,
            diagonal,
        }
    }

    pub fn n_slices(&self) -> usize {
        self.n_slices
    }

    fn slice(&self, k: usize) -> (&[f64], &[f64]) {
        let r = k * self.len..(k + 1) * self.len;
        (&self.points[r.clone()], &self.diagonal[r])
    }

    /// Sliced Wasserstein distance to another cache with the same slices.
    pub fn distance(&self, other: &SlicedProjections) -> f64 {
        assert_eq!(self.n_slices, other.n_slices, "slice counts differ");
        let mut total = 0.0;
        for k in 0..self.n_slices {
            let (p1, q1) = self.slice(k);
            let (p2, q2) = other.slice(k);
            // V1 = P1 ∪ Δ(P2), V2 = P2 ∪ Δ(P1), compared in sorted order
            let mut v1 = Merge::new(p1, q2);
            let mut v2 = Merge::new(p2, q1);
            let mut sum = 0.0;
            while let (Some(x), Some(y)) = (v1.next(), v2.next()) {
                sum += (x - y).abs();
            }
            total += sum;
        }
        total / self.n_slices as f64
    }
}

/// Merges two sorted slices.
struct Merge<'a> {
    a: &'a [f64],
    b: &'a [f64],
}

impl<'a> Merge<'a> {
    fn new(a: &'a [f64], b: &'a [f64]) -> Self {
        Merge { a, b }
    }
}

impl Iterator for Merge<'_> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let take_a = match (self.a.first(), self.b.first()) {
            (None, None) => return None,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some(x), Some(y)) => x <= y,
        };
        let side = if take_a { &mut self.a } else { &mut self.b };
        let (first, rest) = side.split_first()?;
        *side = rest;
        Some(*first)
    }
}

/// Sliced Wasserstein distance, averaged over `n_slices` midpoint directions.
///
/// The mean over directions stands in for the normalised integral over the
/// half-circle; any other fixed normalisation differs by a constant factor.
pub fn sliced_wasserstein_distance(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    n_slices: usize,
) -> f64 {
    SlicedProjections::new(d1, n_slices).distance(&SlicedProjections::new(d2, n_slices))
}
