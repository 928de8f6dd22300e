use std::collections::HashMap;

use super::filtration::{Filtration, Vertices};
use super::PersistencePair;

const NONE: u32 = u32::MAX;

/// Maps a face (by its vertices) to its position in the filtration.
struct FaceIndex {
    vertex: Vec<u32>,
    edge_dense: Option<(usize, Vec<u32>)>,
    sparse: HashMap<Vertices, u32>,
}

// n*n edge table stays under 64 MiB
const DENSE_EDGE_LIMIT: usize = 4096;

impl FaceIndex {
    fn new(f: &Filtration) -> Self {
        let n_vertices = f
            .simplices()
            .iter()
            .filter(|s| s.dim() == 0)
            .map(|s| s.vertices()[0] as usize + 1)
            .max()
            .unwrap_or(0);
        let mut vertex = vec![NONE; n_vertices];
        let mut edge_dense = (n_vertices <= DENSE_EDGE_LIMIT)
            .then(|| (n_vertices, vec![NONE; n_vertices * n_vertices]));
        let mut sparse = HashMap::new();
        let top = f.simplices().iter().map(|s| s.dim()).max().unwrap_or(0);
        for (pos, s) in f.simplices().iter().enumerate() {
            // the top dimension is never a face
            if s.dim() == top && top > 0 {
                continue;
            }
            let v = s.vertices();
            match (v.len(), edge_dense.as_mut()) {
                (1, _) => vertex[v[0] as usize] = pos as u32,
                (2, Some((n, table))) => table[v[0] as usize * *n + v[1] as usize] = pos as u32,
                _ => {
                    sparse.insert(Vertices::from_slice(v), pos as u32);
                }
            }
        }
        FaceIndex {
            vertex,
            edge_dense,
            sparse,
        }
    }

    fn get(&self, face: &[u32]) -> u32 {
        match (face.len(), &self.edge_dense) {
            (1, _) => self.vertex[face[0] as usize],
            (2, Some((n, table))) => table[face[0] as usize * n + face[1] as usize],
            _ => self.sparse.get(face).copied().unwrap_or(NONE),
        }
    }
}

/// Adds `other` into `col` over Z/2; both are sorted ascending.
fn add_into(col: &mut Vec<u32>, other: &[u32], scratch: &mut Vec<u32>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < col.len() && j < other.len() {
        match col[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                scratch.push(col[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&col[i..]);
    scratch.extend_from_slice(&other[j..]);
    std::mem::swap(col, scratch);
}

fn sort_pairs(pairs: &mut [PersistencePair]) {
    pairs.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then(a.birth.total_cmp(&b.birth))
            .then(a.death.total_cmp(&b.death))
    });
}

/// Cofaces of every simplex, in filtration order, as a compressed table.
struct Cofaces {
    offsets: Vec<usize>,
    entries: Vec<u32>,
}

impl Cofaces {
    fn new(f: &Filtration, index: &FaceIndex, max_dim: usize) -> Self {
        let simplices = f.simplices();
        let n = simplices.len();
        // only cofaces of dimensions 2..=max_dim+1 are ever read
        let wanted = |dim: usize| dim >= 2 && dim <= max_dim + 1;
        let mut counts = vec![0usize; n + 1];
        let mut faces: Vec<u32> = Vec::new();
        for s in simplices.iter().filter(|s| wanted(s.dim())) {
            for face in s.faces() {
                let row = index.get(&face);
                debug_assert!(row != NONE, "face {face:?} missing from filtration");
                counts[row as usize + 1] += 1;
                faces.push(row);
            }
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts;
        let mut fill = offsets.clone();
        let mut entries = vec![0u32; faces.len()];
        let mut k = 0;
        for (pos, s) in simplices.iter().enumerate() {
            if !wanted(s.dim()) {
                continue;
            }
            for _ in 0..=s.dim() {
                let row = faces[k] as usize;
                entries[fill[row]] = pos as u32;
                fill[row] += 1;
                k += 1;
            }
        }
        Cofaces { offsets, entries }
    }

    fn of(&self, pos: usize) -> &[u32] {
        &self.entries[self.offsets[pos]..self.offsets[pos + 1]]
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

/// A reduced column: either an untouched coboundary or an owned sum.
enum Column {
    Coboundary(u32),
    Owned(Vec<u32>),
}

/// Persistence pairs of a filtration over the two-element field.
///
/// Dimension zero is handled by union–find with the elder rule. Higher
/// dimensions reduce the coboundary matrix: columns are the `d`-simplices
/// in reverse filtration order, the pivot of a column is its earliest
/// coface. Simplices that killed a class one dimension below are skipped
/// (clearing), and a column whose earliest coface is still free is paired
/// without being copied. Pairs of zero persistence are dropped; simplices of
/// dimension at most `max_dim` that stay unpaired give essential pairs.
///
/// The result is sorted by dimension, birth and death and agrees with
/// [`compute_persistence_homology`].
pub fn compute_persistence(f: &Filtration) -> Vec<PersistencePair> {
    let simplices = f.simplices();
    let n = simplices.len();
    if n == 0 {
        return Vec::new();
    }
    let max_dim = f.max_dim();
    let index = FaceIndex::new(f);
    let mut pairs = Vec::new();
    let mut cleared = vec![false; n];

    let mut parent: Vec<u32> = (0..index.vertex.len() as u32).collect();
    for (pos, s) in simplices.iter().enumerate().filter(|(_, s)| s.dim() == 1) {
        let v = s.vertices();
        let (a, b) = (find(&mut parent, v[0]), find(&mut parent, v[1]));
        if a == b {
            continue;
        }
        // the root entering later dies; the elder survives as root
        let (elder, younger) = if index.vertex[a as usize] < index.vertex[b as usize] {
            (a, b)
        } else {
            (b, a)
        };
        parent[younger as usize] = elder;
        cleared[pos] = true;
        let birth = simplices[index.vertex[younger as usize] as usize].radius();
        if s.radius() > birth {
            pairs.push(PersistencePair::new(0, birth, s.radius()));
        }
    }
    for v in 0..parent.len() as u32 {
        if index.vertex[v as usize] != NONE && find(&mut parent, v) == v {
            let birth = simplices[index.vertex[v as usize] as usize].radius();
            pairs.push(PersistencePair::new(0, birth, f64::INFINITY));
        }
    }

    if max_dim >= 1 {
        let cofaces = Cofaces::new(f, &index, max_dim);
        let mut pivot_of_row = vec![NONE; n];
        let mut columns: Vec<Column> = Vec::new();
        let mut col = Vec::new();
        let mut scratch = Vec::new();
        for dim in 1..=max_dim {
            for (j, s) in simplices.iter().enumerate().rev() {
                if s.dim() != dim || cleared[j] {
                    continue;
                }
                let cob = cofaces.of(j);
                let first = cob.first().copied();
                let pivot = match first {
                    Some(row) if pivot_of_row[row as usize] == NONE => {
                        pivot_of_row[row as usize] = columns.len() as u32;
                        columns.push(Column::Coboundary(j as u32));
                        Some(row)
                    }
                    None => None,
                    Some(_) => {
                        col.clear();
                        col.extend_from_slice(cob);
                        while let Some(&low) = col.first() {
                            let p = pivot_of_row[low as usize];
                            if p == NONE {
                                break;
                            }
                            let other = match &columns[p as usize] {
                                Column::Coboundary(c) => cofaces.of(*c as usize),
                                Column::Owned(v) => v.as_slice(),
                            };
                            add_into(&mut col, other, &mut scratch);
                        }
                        let low = col.first().copied();
                        if let Some(row) = low {
                            pivot_of_row[row as usize] = columns.len() as u32;
                            columns.push(Column::Owned(std::mem::take(&mut col)));
                        }
                        low
                    }
                };
                match pivot {
                    Some(row) => {
                        let row = row as usize;
                        cleared[row] = true;
                        let (birth, death) = (s.radius(), simplices[row].radius());
                        if death > birth {
                            pairs.push(PersistencePair::new(dim, birth, death));
                        }
                    }
                    None => pairs.push(PersistencePair::new(dim, s.radius(), f64::INFINITY)),
                }
            }
        }
    }
    sort_pairs(&mut pairs);
    pairs
}

/// Persistence pairs by reduction of the boundary matrix.
///
/// This is the textbook route and is kept alongside
/// [`compute_persistence`] as an independent check; it is much slower on
/// Rips filtrations because every non-killing top simplex must be reduced
/// to zero. Columns are reduced dimension by dimension from the top down. When a column of dimension `k` ends with lowest entry `j`,
/// simplex `j` is paired with it and column `j` is cleared without being
/// reduced: it would reduce to zero anyway. Pairs of zero persistence are
/// dropped. Creators of dimension at most `max_dim` that are never paired
/// give essential pairs with infinite death.
///
/// The result is sorted by dimension, birth and death.
pub fn compute_persistence_homology(f: &Filtration) -> Vec<PersistencePair> {
    let simplices = f.simplices();
    let n = simplices.len();
    if n == 0 {
        return Vec::new();
    }
    let index = FaceIndex::new(f);
    let top = simplices.iter().map(|s| s.dim()).max().unwrap_or(0);

    let mut by_dim: Vec<Vec<u32>> = vec![Vec::new(); top + 1];
    for (pos, s) in simplices.iter().enumerate() {
        by_dim[s.dim()].push(pos as u32);
    }

    // pivot row -> position in `reduced`
    let mut pivot_of_row = vec![NONE; n];
    let mut reduced: Vec<Vec<u32>> = Vec::new();
    let mut cleared = vec![false; n];
    let mut paired = vec![false; n];
    let mut pairs = Vec::new();

    let mut col = Vec::new();
    let mut scratch = Vec::new();
    for dim in (1..=top).rev() {
        for &j in &by_dim[dim] {
            let j = j as usize;
            if cleared[j] {
                continue;
            }
            col.clear();
            for face in simplices[j].faces() {
                let row = index.get(&face);
                debug_assert!(row != NONE, "face {face:?} missing from filtration");
                col.push(row);
            }
            col.sort_unstable();
            while let Some(&low) = col.last() {
                let p = pivot_of_row[low as usize];
                if p == NONE {
                    break;
                }
                add_into(&mut col, &reduced[p as usize], &mut scratch);
            }
            if let Some(&low) = col.last() {
                let low = low as usize;
                pivot_of_row[low] = reduced.len() as u32;
                reduced.push(std::mem::take(&mut col));
                cleared[low] = true;
                paired[low] = true;
                paired[j] = true;
                let (birth, death) = (simplices[low].radius(), simplices[j].radius());
                if death > birth {
                    pairs.push(PersistencePair::new(dim - 1, birth, death));
                }
            }
        }
    }

    for (pos, s) in simplices.iter().enumerate() {
        // every killer is paired, so an unpaired simplex is a creator that never dies
        if !paired[pos] && s.dim() <= f.max_dim() {
            pairs.push(PersistencePair::new(s.dim(), s.radius(), f64::INFINITY));
        }
    }
    sort_pairs(&mut pairs);
    pairs
}
