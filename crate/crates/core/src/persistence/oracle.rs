//! Brute-force Betti numbers of a single Rips complex.
//!
//! This shares no code with the filtration builder or the reduction: it
//! enumerates vertex subsets directly, assembles dense boundary matrices and
//! takes ranks by Gaussian elimination. The cost is exponential in the number
//! of points, so it is only meant to cross-check small examples.

use crate::error::{Error, Result};
use crate::geometry::DistanceMatrix;

/// Largest cloud the oracle accepts.
pub const ORACLE_MAX_POINTS: usize = 12;

/// All `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Simplices with `k` vertices present in the complex at radius `eps`.
fn simplices_at(dm: &DistanceMatrix, eps: f64, k: usize) -> Vec<Vec<usize>> {
    subsets(dm.len(), k)
        .into_iter()
        .filter(|s| {
            s.iter()
                .enumerate()
                .all(|(a, &u)| s[a + 1..].iter().all(|&v| dm.get(u, v) <= eps))
        })
        .collect()
}

/// Rank over Z/2 of a matrix whose rows are bitsets.
fn rank_gf2(mut rows: Vec<Vec<u64>>) -> usize {
    let width = rows.first().map_or(0, Vec::len) * 64;
    let mut rank = 0;
    for bit in 0..width {
        let (word, mask) = (bit / 64, 1u64 << (bit % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][word] & mask != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[word] & mask != 0 {
                row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of the boundary map from `k`-vertex simplices to `(k-1)`-vertex ones.
fn boundary_rank(high: &[Vec<usize>], low: &[Vec<usize>]) -> usize {
    if high.is_empty() || low.is_empty() {
        return 0;
    }
    let words = low.len().div_ceil(64);
    let rows = high
        .iter()
        .map(|s| {
            let mut row = vec![0u64; words];
            for (c, f) in low.iter().enumerate() {
                // f is a face of s iff it is s minus one vertex
                if f.iter().all(|v| s.contains(v)) {
                    row[c / 64] |= 1 << (c % 64);
                }
            }
            row
        })
        .collect();
    rank_gf2(rows)
}

/// `β_r` of the Rips complex at radius `eps`: `dim C_r − rank ∂_r − rank ∂_{r+1}`.
pub fn betti_number_oracle(dm: &DistanceMatrix, eps: f64, r: usize) -> Result<usize> {
    if dm.len() > ORACLE_MAX_POINTS {
        return Err(Error::input(format!(
            "the rank oracle handles at most {ORACLE_MAX_POINTS} points, got {}",
            dm.len()
        )));
    }
    let chains = simplices_at(dm, eps, r + 1);
    let rank_r = if r == 0 {
        0
    } else {
        boundary_rank(&chains, &simplices_at(dm, eps, r))
    };
    let rank_r1 = boundary_rank(&simplices_at(dm, eps, r + 2), &chains);
    Ok(chains.len() - rank_r - rank_r1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{pairwise_distances, PointCloud};

    fn square() -> DistanceMatrix {
        let c = PointCloud::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        pairwise_distances(&c).unwrap()
    }

    #[test]
    fn square_cycle() {
        assert_eq!(betti_number_oracle(&square(), 1.2, 1).unwrap(), 1);
        assert_eq!(betti_number_oracle(&square(), 1.5, 1).unwrap(), 0);
        assert_eq!(betti_number_oracle(&square(), 0.5, 1).unwrap(), 0);
    }

    #[test]
    fn square_components() {
        assert_eq!(betti_number_oracle(&square(), 1.5, 0).unwrap(), 1);
        assert_eq!(betti_number_oracle(&square(), 0.0, 0).unwrap(), 4);
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(rank_gf2(vec![vec![0b011], vec![0b110], vec![0b101]]), 2);
        assert_eq!(rank_gf2(vec![vec![0b001], vec![0b010]]), 2);
        assert_eq!(rank_gf2(vec![]), 0);
    }

    #[test]
    fn rejects_large_clouds() {
        let n = ORACLE_MAX_POINTS + 1;
        let dm = DistanceMatrix::from_full(n, vec![0.0; n * n]).unwrap();
        assert!(betti_number_oracle(&dm, 1.0, 0).is_err());
    }
}
