//! Vietoris–Rips filtrations and their persistence pairs.
//!
//! The pipeline is
//!
//! 1. [`build_rips_filtration`]: enumerate every simplex of dimension up to
//!    `max_dim + 1` whose diameter is within the threshold, sorted by
//!    (radius, dimension, vertices);
//! 2. [`compute_persistence`]: reduce over Z/2, by union–find in dimension
//!    zero and by coboundary reduction with clearing above;
//! 3. [`diagrams_from_pairs`]: pick one homology dimension and decide what
//!    to do with classes that never die.
//!
//! The filtration is continuous: every pairwise distance is a critical
//! value, so births and deaths are exact distances from the input matrix.

mod filtration;
mod oracle;
mod reduction;

pub use filtration::{
    build_rips_filtration, build_rips_filtration_with, Filtration, RipsOptions, Simplex,
    Threshold, DEFAULT_SIMPLEX_CAP,
};
pub use oracle::{betti_number_oracle, ORACLE_MAX_POINTS};
pub use reduction::{compute_persistence, compute_persistence_homology};

use serde::{Deserialize, Serialize};

use crate::diagram::{DiagramPoint, PersistenceDiagram};
use crate::error::{Error, Result};

/// A homology class of dimension `dim`, born at `birth` and dying at `death`
/// (infinite for essential classes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn new(dim: usize, birth: f64, death: f64) -> Self {
        PersistencePair { dim, birth, death }
    }

    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }

    /// Whether the class is alive in the complex at radius `eps`.
    pub fn alive_at(&self, eps: f64) -> bool {
        self.birth <= eps && eps < self.death
    }
}

/// What to do with classes that never die.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EssentialPolicy {
    #[default]
    Drop,
    /// Replace the infinite death by the given finite value.
    Cap(f64),
}

/// Selects the dimension-`r` pairs as a persistence diagram.
pub fn diagrams_from_pairs(
    pairs: &[PersistencePair],
    r: usize,
    essential: EssentialPolicy,
) -> Result<PersistenceDiagram> {
    let mut points = Vec::new();
    for p in pairs.iter().filter(|p| p.dim == r) {
        let death = match (p.is_essential(), essential) {
            (false, _) => p.death,
            (true, EssentialPolicy::Drop) => continue,
            (true, EssentialPolicy::Cap(cap)) => {
                if !(cap > p.birth && cap.is_finite()) {
                    return Err(Error::input(format!(
                        "cap {cap} does not exceed the birth {} of an essential class",
                        p.birth
                    )));
                }
                cap
            }
        };
        points.push(DiagramPoint::new(p.birth, death));
    }
    PersistenceDiagram::new(r, points)
}

/// Number of dimension-`r` classes alive at radius `eps`.
pub fn betti_from_pairs(pairs: &[PersistencePair], eps: f64, r: usize) -> usize {
    pairs.iter().filter(|p| p.dim == r && p.alive_at(eps)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{pairwise_distances, DistanceMatrix, PointCloud};
    use proptest::prelude::*;

    fn cloud(points: &[[f64; 2]]) -> DistanceMatrix {
        pairwise_distances(&PointCloud::new(points.iter().map(|p| p.to_vec()).collect()).unwrap())
            .unwrap()
    }

    fn square() -> DistanceMatrix {
        cloud(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    }

    fn pairs_of(dm: &DistanceMatrix, max_dim: usize, t: Threshold) -> Vec<PersistencePair> {
        compute_persistence(&build_rips_filtration(dm, max_dim, t).unwrap())
    }

    #[test]
    fn two_points_merge_once() {
        let dm = DistanceMatrix::from_full(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let pairs = pairs_of(&dm, 0, Threshold::Unbounded);
        assert_eq!(
            pairs,
            vec![
                PersistencePair::new(0, 0.0, 1.0),
                PersistencePair::new(0, 0.0, f64::INFINITY)
            ]
        );
    }

    #[test]
    fn unit_square_pairs() {
        let pairs = pairs_of(&square(), 1, Threshold::Unbounded);
        let h0: Vec<_> = pairs.iter().filter(|p| p.dim == 0).collect();
        let h1: Vec<_> = pairs.iter().filter(|p| p.dim == 1).collect();
        assert_eq!(h0.len(), 4);
        assert_eq!(h0.iter().filter(|p| p.death == 1.0).count(), 3);
        assert!(h0[3].is_essential());
        assert_eq!(h1.len(), 1);
        assert_eq!((h1[0].birth, h1[0].death), (1.0, 2f64.sqrt()));
    }

    #[test]
    fn collinear_points_have_no_cycle() {
        let dm = cloud(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        let pairs = pairs_of(&dm, 1, Threshold::Unbounded);
        assert!(pairs.iter().all(|p| p.dim == 0));
    }

    #[test]
    fn square_diagrams() {
        let pairs = pairs_of(&square(), 1, Threshold::Unbounded);
        let h1 = diagrams_from_pairs(&pairs, 1, EssentialPolicy::Drop).unwrap();
        assert_eq!(h1.points(), &[DiagramPoint::new(1.0, 2f64.sqrt())]);
        let h0 = diagrams_from_pairs(&pairs, 0, EssentialPolicy::Drop).unwrap();
        assert_eq!(h0.points(), &[DiagramPoint::new(0.0, 1.0); 3]);
        let capped = diagrams_from_pairs(&pairs, 0, EssentialPolicy::Cap(10.0)).unwrap();
        assert_eq!(capped.len(), 4);
        assert_eq!(capped.points()[3], DiagramPoint::new(0.0, 10.0));
        assert!(diagrams_from_pairs(&pairs, 0, EssentialPolicy::Cap(0.0)).is_err());
    }

    #[test]
    fn small_threshold_kills_cycles() {
        let pairs = pairs_of(&square(), 1, Threshold::At(0.5));
        assert!(pairs.iter().all(|p| p.dim == 0 && p.is_essential()));
        assert_eq!(pairs.len(), 4);
    }

    #[test]
    fn regular_tetrahedron_leaves_no_higher_pairs() {
        // vertices of a regular tetrahedron: all edges equal, so the cavity
        // is born and filled at the same radius and leaves no pair
        let c = PointCloud::new(vec![
            vec![1.0, 1.0, 1.0],
            vec![1.0, -1.0, -1.0],
            vec![-1.0, 1.0, -1.0],
            vec![-1.0, -1.0, 1.0],
        ])
        .unwrap();
        let dm = pairwise_distances(&c).unwrap();
        let pairs = pairs_of(&dm, 2, Threshold::Unbounded);
        assert!(pairs.iter().all(|p| p.dim == 0));
    }

    fn critical_radii(dm: &DistanceMatrix) -> Vec<f64> {
        let mut out = vec![0.0];
        for i in 0..dm.len() {
            for j in 0..i {
                let d = dm.get(i, j);
                out.extend([d - 1e-6, d, d + 1e-6]);
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn pairs_match_rank_oracle(
            pts in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 2), 3..8)
        ) {
            let dm = pairwise_distances(&PointCloud::new(pts).unwrap()).unwrap();
            let pairs = pairs_of(&dm, 2, Threshold::Enclosing);
            for eps in critical_radii(&dm) {
                for r in 0..=2 {
                    prop_assert_eq!(
                        betti_from_pairs(&pairs, eps, r),
                        betti_number_oracle(&dm, eps, r).unwrap(),
                        "r = {}, eps = {}", r, eps
                    );
                }
            }
        }

        #[test]
        fn equal_radius_blocks_can_be_permuted(
            pts in prop::collection::vec(prop::collection::vec(0u8..3, 2), 3..7),
            seed in any::<u64>()
        ) {
            // integer grid points produce many equal distances
            let mut pts: Vec<Vec<f64>> =
                pts.into_iter().map(|p| p.into_iter().map(f64::from).collect()).collect();
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            pts.dedup();
            let dm = pairwise_distances(&PointCloud::new(pts).unwrap()).unwrap();
            let f = build_rips_filtration(&dm, 1, Threshold::Unbounded).unwrap();
            let reference = compute_persistence(&f);

            // shuffle within each radius block, then restore faces-first by
            // a stable sort on dimension inside the block
            use rand::{seq::SliceRandom, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut simplices = f.into_simplices();
            let mut start = 0;
            while start < simplices.len() {
                let r = simplices[start].radius();
                let end = start + simplices[start..].iter().take_while(|s| s.radius() == r).count();
                simplices[start..end].shuffle(&mut rng);
                simplices[start..end].sort_by_key(|s| s.dim());
                start = end;
            }
            let shuffled = Filtration::from_simplices(simplices, 1).unwrap();
            prop_assert_eq!(compute_persistence(&shuffled), reference);
        }

        #[test]
        fn cohomology_matches_homology(
            pts in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 3), 3..14),
            max_dim in 0usize..3
        ) {
            let dm = pairwise_distances(&PointCloud::new(pts).unwrap()).unwrap();
            let f = build_rips_filtration(&dm, max_dim, Threshold::Unbounded).unwrap();
            prop_assert_eq!(compute_persistence(&f), compute_persistence_homology(&f));
        }
    }
}
