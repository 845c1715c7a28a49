//! Citation-graph style datasets: undirected edges, node features, labels and
//! fixed train/val/test splits.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::csr::CsrMatrix;
use crate::error::{Error, Result};

/// Boolean node masks for the three splits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splits {
    pub train: Vec<bool>,
    pub val: Vec<bool>,
    pub test: Vec<bool>,
}

impl Splits {
    pub fn count(mask: &[bool]) -> usize {
        mask.iter().filter(|&&b| b).count()
    }
}

/// An undirected node-classification graph.
///
/// Edges are stored once as `(i, j)` with `i < j`, sorted and duplicate free.
/// Features are kept in the `f32` precision of the on-disk format and widened
/// when a feature matrix is built for training.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphDataset {
    name: String,
    num_nodes: usize,
    edges: Vec<(u32, u32)>,
    feature_dim: usize,
    features: Vec<f32>,
    labels: Vec<u16>,
    num_classes: usize,
    splits: Splits,
}

/// Sorts, orients (`i < j`) and dedups an edge list, dropping self-loops.
pub fn canonicalize_edges(mut edges: Vec<(u32, u32)>) -> Vec<(u32, u32)> {
    edges.retain(|&(a, b)| a != b);
    for e in edges.iter_mut() {
        if e.0 > e.1 {
            *e = (e.1, e.0);
        }
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

impl GraphDataset {
    /// Builds a dataset, canonicalizing the edge list and checking every
    /// invariant.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        num_nodes: usize,
        edges: Vec<(u32, u32)>,
        feature_dim: usize,
        features: Vec<f32>,
        labels: Vec<u16>,
        num_classes: usize,
        splits: Splits,
    ) -> Result<Self> {
        let ds = Self {
            name: name.into(),
            num_nodes,
            edges: canonicalize_edges(edges),
            feature_dim,
            features,
            labels,
            num_classes,
            splits,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_nodes;
        if n == 0 {
            return Err(Error::Validation("dataset has no nodes".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::Validation(format!("{n} nodes exceed 32-bit indexing")));
        }
        for w in self.edges.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Validation(format!("edge list not sorted/unique at {:?}", w[1])));
            }
        }
        if let Some(&(i, j)) = self.edges.iter().find(|&&(i, j)| i >= j || j as usize >= n) {
            return Err(Error::Validation(format!("edge ({i}, {j}) out of range for {n} nodes")));
        }
        if self.features.len() != n * self.feature_dim {
            return Err(Error::Validation(format!(
                "feature buffer has {} values, expected {n}x{}",
                self.features.len(),
                self.feature_dim
            )));
        }
        if self.labels.len() != n {
            return Err(Error::Validation(format!("{} labels for {n} nodes", self.labels.len())));
        }
        if self.num_classes == 0 {
            return Err(Error::Validation("zero classes".into()));
        }
        if let Some((node, &y)) = self.labels.iter().enumerate().find(|(_, &y)| y as usize >= self.num_classes) {
            return Err(Error::Validation(format!(
                "label {y} of node {node} is not below class count {}",
                self.num_classes
            )));
        }
        let s = &self.splits;
        if s.train.len() != n || s.val.len() != n || s.test.len() != n {
            return Err(Error::Validation("split masks must have one entry per node".into()));
        }
        if let Some(node) = (0..n).find(|&v| (s.train[v] as u8 + s.val[v] as u8 + s.test[v] as u8) > 1) {
            return Err(Error::Validation(format!("node {node} belongs to more than one split")));
        }
        if Splits::count(&s.train) == 0 {
            return Err(Error::Validation("train split is empty".into()));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Number of undirected edges `M`.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn features(&self) -> &[f32] {
        &self.features
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn splits(&self) -> &Splits {
        &self.splits
    }

    pub fn train_mask(&self) -> &[bool] {
        &self.splits.train
    }

    pub fn val_mask(&self) -> &[bool] {
        &self.splits.val
    }

    pub fn test_mask(&self) -> &[bool] {
        &self.splits.test
    }

    /// Sparse `f64` feature matrix, optionally row-normalized to unit L1
    /// norm (the usual preprocessing for bag-of-words citation features).
    pub fn feature_matrix(&self, row_normalize: bool) -> CsrMatrix {
        let dense: Vec<f64> = self.features.iter().map(|&v| v as f64).collect();
        let x = CsrMatrix::from_dense(self.num_nodes, self.feature_dim, &dense);
        if row_normalize {
            x.row_normalized()
        } else {
            x
        }
    }
}
