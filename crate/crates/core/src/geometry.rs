//! Point clouds, the distances between them, and the linked twisted map.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite set of points in `R^v`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud from a list of points, checking that every point has
    /// the same dimension and only finite coordinates.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let mut coords = Vec::with_capacity(dim * points.len());
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::input(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    /// Builds a cloud from row-major coordinates.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if !coords.is_empty() && dim == 0 {
            return Err(Error::input("points must have dimension at least 1"));
        }
        if dim > 0 && !coords.len().is_multiple_of(dim) {
            return Err(Error::input(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(k) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::input(format!(
                "point {} has a non-finite coordinate",
                k / dim
            )));
        }
        Ok(PointCloud { dim, coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Ambient dimension `v`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim.max(1))
    }
}

/// Dense symmetric matrix of pairwise distances with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Wraps a precomputed row-major `n × n` matrix, e.g. geodesic distances.
    pub fn from_full(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::input(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::input(format!("diagonal entry {i} is not zero")));
            }
            for j in 0..i {
                let a = entries[i * n + j];
                if !(a.is_finite() && a >= 0.0) {
                    return Err(Error::input(format!(
                        "entry ({i}, {j}) is not a finite nonnegative number"
                    )));
                }
                if a != entries[j * n + i] {
                    return Err(Error::input(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(DistanceMatrix { n, entries })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Radius past which the Rips complex is a cone: the smallest, over all
    /// points, of the largest distance to any other point.
    pub fn enclosing_radius(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().copied().fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Euclidean distances between all pairs of points.
pub fn pairwise_distances(cloud: &PointCloud) -> Result<DistanceMatrix> {
    if cloud.is_empty() {
        return Err(Error::input("point cloud is empty"));
    }
    let n = cloud.len();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        let p = cloud.point(i);
        for j in 0..i {
            let q = cloud.point(j);
            let d = p
                .iter()
                .zip(q)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix { n, entries })
}

fn chebyshev(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn directed_hausdorff(from: &PointCloud, to: &PointCloud) -> f64 {
    from.points()
        .map(|p| {
            to.points()
                .map(|q| chebyshev(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Hausdorff distance between two clouds, with the sup-norm as ground metric.
pub fn hausdorff_distance(x: &PointCloud, y: &PointCloud) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::input("Hausdorff distance needs two non-empty clouds"));
    }
    if x.dim() != y.dim() {
        return Err(Error::input(format!(
            "clouds live in different dimensions ({} and {})",
            x.dim(),
            y.dim()
        )));
    }
    Ok(directed_hausdorff(x, y).max(directed_hausdorff(y, x)))
}

/// Starting point and twist parameter of a linked twisted map orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitParams {
    pub x0: f64,
    pub y0: f64,
    pub r: f64,
    pub n_points: usize,
}

impl OrbitParams {
    pub fn new(x0: f64, y0: f64, r: f64, n_points: usize) -> Result<Self> {
        let params = OrbitParams { x0, y0, r, n_points };
        params.validate()?;
        Ok(params)
    }

    /// Draws a starting point uniformly from the unit square.
    pub fn random_start<R: Rng + ?Sized>(rng: &mut R, r: f64, n_points: usize) -> Result<Self> {
        let x0 = rng.random::<f64>();
        let y0 = rng.random::<f64>();
        Self::new(x0, y0, r, n_points)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.x0) || !(0.0..=1.0).contains(&self.y0) {
            return Err(Error::input(format!(
                "starting point ({}, {}) is outside the unit square",
                self.x0, self.y0
            )));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::input(format!("r must be positive, got {}", self.r)));
        }
        if self.n_points == 0 {
            return Err(Error::input("an orbit needs at least one point"));
        }
        Ok(())
    }
}

/// `t mod 1`, always in `[0, 1)`.
fn frac(t: f64) -> f64 {
    let f = t - t.floor();
    // t slightly below an integer can round up to exactly 1.0
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Iterates the linked twisted map from `(x0, y0)`.
///
/// The x-coordinate is updated first; the y-update then uses the new x:
///
/// ```text
/// x' = x + r y (1 - y)   mod 1
/// y' = y + r x' (1 - x') mod 1
/// ```
///
/// The returned cloud holds exactly `n_points` points, the first being
/// `(frac(x0), frac(y0))`.
pub fn linked_twisted_orbit(params: &OrbitParams) -> Result<PointCloud> {
    params.validate()?;
    let mut coords = Vec::with_capacity(2 * params.n_points);
    let (mut x, mut y) = (frac(params.x0), frac(params.y0));
    for _ in 0..params.n_points {
        coords.push(x);
        coords.push(y);
        x = frac(x + params.r * y * (1.0 - y));
        y = frac(y + params.r * x * (1.0 - x));
    }
    PointCloud::from_flat(2, coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cloud(points: &[[f64; 2]]) -> PointCloud {
        PointCloud::new(points.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn single_point_distance_matrix() {
        let dm = pairwise_distances(&cloud(&[[1.0, 2.0]])).unwrap();
        assert_eq!(dm.len(), 1);
        assert_eq!(dm.get(0, 0), 0.0);
    }

    #[test]
    fn three_four_five() {
        let dm = pairwise_distances(&cloud(&[[0.0, 0.0], [3.0, 4.0]])).unwrap();
        assert_eq!(dm.get(0, 1), 5.0);
        assert_eq!(dm.get(1, 0), 5.0);
    }

    #[test]
    fn right_triangle_distances() {
        let dm = pairwise_distances(&cloud(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])).unwrap();
        assert_eq!(dm.get(0, 1), 1.0);
        assert_eq!(dm.get(0, 2), 1.0);
        assert_eq!(dm.get(1, 2), 2f64.sqrt());
    }

    #[test]
    fn rejects_bad_clouds() {
        assert!(PointCloud::new(vec![vec![0.0, f64::NAN]]).is_err());
        assert!(PointCloud::new(vec![vec![0.0, 1.0], vec![1.0]]).is_err());
        let empty = PointCloud::new(vec![]).unwrap();
        assert!(pairwise_distances(&empty).is_err());
    }

    #[test]
    fn from_full_validates() {
        assert!(DistanceMatrix::from_full(2, vec![0.0, 1.0, 1.0, 0.0]).is_ok());
        assert!(DistanceMatrix::from_full(2, vec![0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(DistanceMatrix::from_full(2, vec![1.0, 1.0, 1.0, 0.0]).is_err());
        assert!(DistanceMatrix::from_full(2, vec![0.0, -1.0, -1.0, 0.0]).is_err());
    }

    #[test]
    fn hausdorff_examples() {
        let x = cloud(&[[0.0, 0.0], [1.0, 0.0]]);
        assert_eq!(hausdorff_distance(&x, &x).unwrap(), 0.0);
        assert_eq!(
            hausdorff_distance(&cloud(&[[0.0, 0.0]]), &cloud(&[[3.0, 4.0]])).unwrap(),
            4.0
        );
        assert_eq!(hausdorff_distance(&x, &cloud(&[[0.0, 0.0]])).unwrap(), 1.0);
        let empty = PointCloud::new(vec![]).unwrap();
        assert!(hausdorff_distance(&x, &empty).is_err());
    }

    #[test]
    fn orbit_fixed_point() {
        let orbit = linked_twisted_orbit(&OrbitParams::new(0.0, 0.0, 4.3, 50).unwrap()).unwrap();
        assert_eq!(orbit.len(), 50);
        assert!(orbit.points().all(|p| p == [0.0, 0.0]));
    }

    #[test]
    fn orbit_first_iterate() {
        let orbit = linked_twisted_orbit(&OrbitParams::new(0.5, 0.5, 2.5, 2).unwrap()).unwrap();
        assert_eq!(orbit.point(0), &[0.5, 0.5]);
        assert_eq!(orbit.point(1), &[0.125, 0.7734375]);
    }

    #[test]
    fn orbit_params_validation() {
        assert!(OrbitParams::new(1.5, 0.0, 1.0, 10).is_err());
        assert!(OrbitParams::new(0.5, 0.5, 0.0, 10).is_err());
        assert!(OrbitParams::new(0.5, 0.5, 1.0, 0).is_err());
    }

    #[test]
    fn frac_stays_below_one() {
        assert_eq!(frac(-1e-20), 0.0);
        assert_eq!(frac(1.0), 0.0);
        assert_eq!(frac(2.25), 0.25);
    }

    fn arb_cloud() -> impl Strategy<Value = PointCloud> {
        prop::collection::vec(prop::collection::vec(-10.0..10.0f64, 3), 1..12)
            .prop_map(|pts| PointCloud::new(pts).unwrap())
    }

    proptest! {
        #[test]
        fn distance_matrix_is_a_metric(c in arb_cloud()) {
            let dm = pairwise_distances(&c).unwrap();
            let n = dm.len();
            for i in 0..n {
                prop_assert_eq!(dm.get(i, i), 0.0);
                for j in 0..n {
                    prop_assert_eq!(dm.get(i, j), dm.get(j, i));
                    for k in 0..n {
                        prop_assert!(dm.get(i, k) <= dm.get(i, j) + dm.get(j, k) + 1e-12);
                    }
                }
            }
        }

        #[test]
        fn hausdorff_symmetric_and_zero_on_self(a in arb_cloud(), b in arb_cloud()) {
            let ab = hausdorff_distance(&a, &b).unwrap();
            prop_assert_eq!(ab, hausdorff_distance(&b, &a).unwrap());
            prop_assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
            if ab == 0.0 {
                // every point of one cloud occurs in the other
                for p in a.points() {
                    prop_assert!(b.points().any(|q| q == p));
                }
            }
        }

        #[test]
        fn orbits_are_deterministic_and_in_unit_square(
            x0 in 0.0..=1.0f64, y0 in 0.0..=1.0f64, r in 0.1..6.0f64
        ) {
            let params = OrbitParams::new(x0, y0, r, 200).unwrap();
            let a = linked_twisted_orbit(&params).unwrap();
            let b = linked_twisted_orbit(&params).unwrap();
            prop_assert_eq!(&a, &b);
            for p in a.points() {
                prop_assert!((0.0..1.0).contains(&p[0]) && (0.0..1.0).contains(&p[1]));
            }
        }
    }
}
