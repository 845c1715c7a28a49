//! Symmetric degree normalization `D^{-1/2}(A + I)D^{-1/2}` over weighted,
//! optionally pruned, undirected edges.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::csr::CsrMatrix;
use crate::error::{numeric, Error, Result};
use crate::graph::GraphDataset;
use crate::sparsify::PruneMask;

/// Marks a stored entry as the self-loop rather than an edge.
pub const SELF_LOOP: u32 = u32::MAX;

/// Normalized adjacency in CSR form.
///
/// Every row stores its self-loop plus one entry per surviving neighbor. Each
/// stored entry remembers which undirected edge produced it, which is what
/// lets edge gradients flow back to the per-edge trainable values.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedAdjacency {
    matrix: CsrMatrix,
    entry_edge: Vec<u32>,
    degrees: Vec<f64>,
    num_edges: usize,
}

impl NormalizedAdjacency {
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn num_nodes(&self) -> usize {
        self.matrix.rows()
    }

    /// Undirected edge count `M` of the graph the values came from (before
    /// pruning).
    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    /// Stored directed entries, self-loops included.
    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    /// Edge index behind each stored entry, [`SELF_LOOP`] for the diagonal.
    pub fn entry_edge(&self) -> &[u32] {
        &self.entry_edge
    }

    /// `1 + Σ |v|` over surviving incident edges.
    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }
}

/// Builds the normalized adjacency of `ds` with one value per undirected edge.
/// Edges whose `keep` bit is false are left out of the structure entirely.
pub fn normalize_adjacency(
    ds: &GraphDataset,
    edge_values: &[f64],
    keep: Option<&PruneMask>,
) -> Result<NormalizedAdjacency> {
    normalize_edges(ds.num_nodes(), ds.edges(), edge_values, keep.map(|m| m.bits()))
}

/// As [`normalize_adjacency`] over a bare canonical edge list.
pub fn normalize_edges(
    num_nodes: usize,
    edges: &[(u32, u32)],
    edge_values: &[f64],
    keep: Option<&[bool]>,
) -> Result<NormalizedAdjacency> {
    let m = edges.len();
    if edge_values.len() != m {
        return Err(Error::Contract(format!("{} edge values for {m} edges", edge_values.len())));
    }
    if let Some(k) = keep {
        if k.len() != m {
            return Err(Error::Contract(format!("edge mask of length {} for {m} edges", k.len())));
        }
    }
    if edge_values.iter().any(|v| !v.is_finite()) {
        return Err(numeric("edge values"));
    }
    let kept = |e: usize| keep.is_none_or(|k| k[e]);

    let mut degrees = vec![1.0f64; num_nodes];
    let mut counts = vec![1usize; num_nodes];
    for (e, &(i, j)) in edges.iter().enumerate() {
        if !kept(e) {
            continue;
        }
        let a = edge_values[e].abs();
        degrees[i as usize] += a;
        degrees[j as usize] += a;
        counts[i as usize] += 1;
        counts[j as usize] += 1;
    }

    let mut row_ptr = Vec::with_capacity(num_nodes + 1);
    row_ptr.push(0usize);
    for c in &counts {
        row_ptr.push(row_ptr.last().unwrap() + c);
    }
    let nnz = *row_ptr.last().unwrap();
    let mut slots: Vec<(u32, u32)> = vec![(0, 0); nnz];
    let mut cursor: Vec<usize> = row_ptr[..num_nodes].to_vec();
    for (r, cur) in cursor.iter_mut().enumerate() {
        slots[*cur] = (r as u32, SELF_LOOP);
        *cur += 1;
    }
    for (e, &(i, j)) in edges.iter().enumerate() {
        if !kept(e) {
            continue;
        }
        slots[cursor[i as usize]] = (j, e as u32);
        cursor[i as usize] += 1;
        slots[cursor[j as usize]] = (i, e as u32);
        cursor[j as usize] += 1;
    }

    let mut col_idx = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    let mut entry_edge = Vec::with_capacity(nnz);
    for r in 0..num_nodes {
        let row = &mut slots[row_ptr[r]..row_ptr[r + 1]];
        row.sort_unstable_by_key(|&(c, _)| c);
        for &(c, e) in row.iter() {
            let (v, dc) =
                if e == SELF_LOOP { (1.0, degrees[r]) } else { (edge_values[e as usize], degrees[c as usize]) };
            // d_r * d_c is commutative in IEEE arithmetic, so (r, c) and (c, r)
            // come out bitwise equal.
            values.push(v / libm::sqrt(degrees[r] * dc));
            col_idx.push(c);
            entry_edge.push(e);
        }
    }
    Ok(NormalizedAdjacency {
        matrix: CsrMatrix::new(num_nodes, num_nodes, row_ptr, col_idx, values),
        entry_edge,
        degrees,
        num_edges: m,
    })
}
