use super::{DiagramPoint, PersistenceDiagram};

/// Minimum-cost perfect matching on a square cost matrix (row-major).
///
/// Shortest augmenting paths with dual potentials, `O(n³)`. Returns the
/// column assigned to each row and the total cost.
pub fn linear_assignment(n: usize, cost: &[f64]) -> (Vec<usize>, f64) {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    // 1-based with a virtual column 0, following the classical formulation
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut min_to = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if reduced < min_to[j] {
                    min_to[j] = reduced;
                    way[j] = j0;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[row_of[j] - 1] = j - 1;
    }
    let total = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i * n + j])
        .sum();
    (assignment, total)
}

/// p-Wasserstein distance with the sup-norm as ground metric.
///
/// Each diagram is augmented with one diagonal slot per point of the other.
/// A point matched to a diagonal slot pays its distance to the diagonal;
/// two diagonal slots match for free. The resulting square assignment
/// problem is solved exactly.
pub fn wasserstein_distance(d1: &PersistenceDiagram, d2: &PersistenceDiagram, p: f64) -> f64 {
    assert!(p >= 1.0 && p.is_finite(), "p must be finite and at least 1");
    let (a, b) = (d1.points(), d2.points());
    let (m1, m2) = (a.len(), b.len());
    let n = m1 + m2;
    if n == 0 {
        return 0.0;
    }
    let mut raw = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            raw[i * n + j] = match (i < m1, j < m2) {
                (true, true) => a[i].chebyshev(&b[j]),
                (true, false) => a[i].diagonal_distance(),
                (false, true) => b[j].diagonal_distance(),
                (false, false) => 0.0,
            };
        }
    }
    // normalise before raising to p so large exponents neither overflow nor underflow
    let scale = raw.iter().copied().fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let cost: Vec<f64> = raw.iter().map(|c| (c / scale).powf(p)).collect();
    let (_, total) = linear_assignment(n, &cost);
    scale * total.max(0.0).powf(1.0 / p)
}

/// Bipartite graph of the augmented matching problem at a cost bound.
struct AugmentedGraph<'a> {
    a: &'a [DiagramPoint],
    b: &'a [DiagramPoint],
    bound: f64,
}

impl AugmentedGraph<'_> {
    // left: a-points then diagonal slots for b; right: b-points then slots for a
    fn neighbours(&self, left: usize, mut f: impl FnMut(usize) -> bool) -> bool {
        let (m1, m2) = (self.a.len(), self.b.len());
        if left < m1 {
            let x = &self.a[left];
            for (j, y) in self.b.iter().enumerate() {
                if x.chebyshev(y) <= self.bound && f(j) {
                    return true;
                }
            }
            x.diagonal_distance() <= self.bound && f(m2 + left)
        } else {
            let k = left - m1;
            if self.b[k].diagonal_distance() <= self.bound && f(k) {
                return true;
            }
            (0..m1).any(|i| f(m2 + i))
        }
    }

    fn has_perfect_matching(&self) -> bool {
        let n = self.a.len() + self.b.len();
        let mut match_of_right = vec![usize::MAX; n];
        for left in 0..n {
            let mut seen = vec![false; n];
            if !self.augment(left, &mut seen, &mut match_of_right) {
                return false;
            }
        }
        true
    }

    fn augment(&self, left: usize, seen: &mut [bool], match_of_right: &mut [usize]) -> bool {
        self.neighbours(left, |right| {
            if seen[right] {
                return false;
            }
            seen[right] = true;
            if match_of_right[right] == usize::MAX
                || self.augment(match_of_right[right], seen, match_of_right)
            {
                match_of_right[right] = left;
                true
            } else {
                false
            }
        })
    }
}

/// Bottleneck distance with the sup-norm as ground metric.
///
/// The optimum is one of the point-to-point distances or half-persistences,
/// so a binary search over those candidates, each tested for a perfect
/// matching by augmenting paths, gives the exact value.
pub fn bottleneck_distance(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> f64 {
    let (a, b) = (d1.points(), d2.points());
    let mut candidates: Vec<f64> = a
        .iter()
        .flat_map(|x| b.iter().map(move |y| x.chebyshev(y)))
        .chain(a.iter().chain(b).map(DiagramPoint::diagonal_distance))
        .chain(std::iter::once(0.0))
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let feasible = |bound: f64| AugmentedGraph { a, b, bound }.has_perfect_matching();
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}
