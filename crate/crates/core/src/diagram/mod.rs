//! Persistence diagrams and the distances between them.
//!
//! A diagram stores only its off-diagonal points. The diagonal
//! `{(z, z)}`, which every diagram contains with infinite multiplicity, is
//! handled analytically: the matching distances let any point pair with its
//! nearest diagonal point, and the sliced distance augments each diagram with
//! the diagonal projections of the other.

mod matching;
mod sliced;

pub use matching::{bottleneck_distance, linear_assignment, wasserstein_distance};
pub use sliced::{sliced_wasserstein_distance, SlicedProjections};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A birth–death pair strictly above the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    pub birth: f64,
    pub death: f64,
}

impl DiagramPoint {
    pub const fn new(birth: f64, death: f64) -> Self {
        DiagramPoint { birth, death }
    }

    pub fn persistence(&self) -> f64 {
        persistence(*self)
    }

    /// Sup-norm distance to the nearest diagonal point, i.e. half the persistence.
    pub fn diagonal_distance(&self) -> f64 {
        (self.death - self.birth) / 2.0
    }

    pub(crate) fn chebyshev(&self, other: &DiagramPoint) -> f64 {
        (self.birth - other.birth)
            .abs()
            .max((self.death - other.death).abs())
    }
}

/// `death − birth`.
pub fn persistence(p: DiagramPoint) -> f64 {
    p.death - p.birth
}

/// The off-diagonal part of a persistence diagram in one homology dimension.
/// Points are a multiset: repeats are allowed and order is preserved.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    dim: usize,
    points: Vec<DiagramPoint>,
}

impl PersistenceDiagram {
    /// Checks `0 <= birth < death < inf` for every point.
    pub fn new(dim: usize, points: Vec<DiagramPoint>) -> Result<Self> {
        for p in &points {
            if !(p.birth >= 0.0 && p.birth < p.death && p.death.is_finite()) {
                return Err(Error::input(format!(
                    "({}, {}) is not a finite point strictly above the diagonal",
                    p.birth, p.death
                )));
            }
        }
        Ok(PersistenceDiagram { dim, points })
    }

    pub fn from_pairs(dim: usize, pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            dim,
            pairs.iter().map(|&(b, d)| DiagramPoint::new(b, d)).collect(),
        )
    }

    pub fn empty(dim: usize) -> Self {
        PersistenceDiagram {
            dim,
            points: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The `k` most persistent points, ties broken by smaller birth and then
    /// by position; survivors keep their original order.
    pub fn top_k(&self, k: usize) -> PersistenceDiagram {
        let (kept, _) = self.split_most_persistent(k);
        kept
    }

    /// Splits into the `k` most persistent points and the rest, both in
    /// original order.
    pub fn split_most_persistent(&self, k: usize) -> (PersistenceDiagram, PersistenceDiagram) {
        let mut order: Vec<usize> = (0..self.points.len()).collect();
        order.sort_by(|&a, &b| {
            let (pa, pb) = (&self.points[a], &self.points[b]);
            pb.persistence()
                .total_cmp(&pa.persistence())
                .then(pa.birth.total_cmp(&pb.birth))
                .then(a.cmp(&b))
        });
        let mut keep = vec![false; self.points.len()];
        for &i in order.iter().take(k) {
            keep[i] = true;
        }
        let (mut kept, mut rest) = (Vec::new(), Vec::new());
        for (p, k) in self.points.iter().zip(keep) {
            if k {
                kept.push(*p);
            } else {
                rest.push(*p);
            }
        }
        (
            PersistenceDiagram {
                dim: self.dim,
                points: kept,
            },
            PersistenceDiagram {
                dim: self.dim,
                points: rest,
            },
        )
    }

    /// Appends a point; used by the scaling maps.
    pub(crate) fn push(&mut self, p: DiagramPoint) {
        self.points.push(p);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn persistence_examples() {
        assert_eq!(persistence(DiagramPoint::new(0.0, 1.0)), 1.0);
        assert_eq!(
            persistence(DiagramPoint::new(1.0, 2f64.sqrt())),
            2f64.sqrt() - 1.0
        );
        let p = persistence(DiagramPoint::new(2.5, 2.5 + 1e-9));
        assert!((p - 1e-9).abs() < 1e-15);
    }

    #[test]
    fn rejects_points_on_or_below_diagonal() {
        assert!(PersistenceDiagram::from_pairs(1, &[(1.0, 1.0)]).is_err());
        assert!(PersistenceDiagram::from_pairs(1, &[(1.0, 0.5)]).is_err());
        assert!(PersistenceDiagram::from_pairs(1, &[(-1.0, 0.5)]).is_err());
        assert!(PersistenceDiagram::from_pairs(1, &[(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn top_k_breaks_ties_by_birth() {
        let d = PersistenceDiagram::from_pairs(1, &[(2.0, 3.0), (0.0, 5.0), (1.0, 2.0), (0.5, 1.5)])
            .unwrap();
        let top = d.top_k(2);
        assert_eq!(top.points(), &[DiagramPoint::new(0.0, 5.0), DiagramPoint::new(0.5, 1.5)]);
        assert_eq!(d.top_k(10), d);
    }
}
