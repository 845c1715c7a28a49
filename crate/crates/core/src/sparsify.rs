//! Trainable edge values, the graph-sparsification loss and its gradient,
//! magnitude masks and pruning of edges and weights.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use crate::adjacency::{normalize_adjacency, NormalizedAdjacency, SELF_LOOP};
use crate::csr::CsrMatrix;
use crate::error::{ensure_finite, numeric, Error, Result};
use crate::gcn::{backprop, gcn_forward_eval, masked_cross_entropy, Adam, ForwardCache, GcnParams};
use crate::graph::GraphDataset;
use crate::matrix::dot;

/// Binary keep-mask over edges or flattened weights; `true` means kept.
#[derive(Debug, Clone, PartialEq)]
pub struct PruneMask {
    bits: Vec<bool>,
    ratio: f64,
}

impl PruneMask {
    /// Wraps existing bits. `ratio` is the pruning ratio the bits were drawn at.
    pub fn from_bits(bits: Vec<bool>, ratio: f64) -> Self {
        Self { bits, ratio }
    }

    pub fn all_kept(len: usize) -> Self {
        Self { bits: vec![true; len], ratio: 0.0 }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Entries kept at pruning ratio `p`: `round((1 − p) · len)`.
pub fn kept_count(len: usize, p: f64) -> usize {
    let k = libm::round((1.0 - p) * len as f64) as usize;
    k.min(len)
}

fn check_ratio(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Argument(format!("pruning ratio {p} outside [0, 1]")))
    }
}

/// Keeps the `round((1 − p) · len)` largest magnitudes. Equal magnitudes at the
/// cut are resolved in favour of the lower index, so masks for increasing `p`
/// are nested.
pub fn derive_mask(magnitudes: &[f64], p: f64) -> Result<PruneMask> {
    if magnitudes.is_empty() {
        return Err(Error::Argument("cannot derive a mask from an empty vector".into()));
    }
    check_ratio(p)?;
    if magnitudes.iter().any(|m| !m.is_finite()) {
        return Err(numeric("mask magnitudes"));
    }
    let len = magnitudes.len();
    let k = kept_count(len, p);
    let mut bits = vec![false; len];
    if k == len {
        bits.iter_mut().for_each(|b| *b = true);
    } else if k > 0 {
        let mut order: Vec<u32> = (0..len as u32).collect();
        order.select_nth_unstable_by(k - 1, |&a, &b| {
            let (ma, mb) = (magnitudes[a as usize].abs(), magnitudes[b as usize].abs());
            mb.total_cmp(&ma).then(a.cmp(&b))
        });
        for &i in &order[..k] {
            bits[i as usize] = true;
        }
    }
    Ok(PruneMask { bits, ratio: p })
}

/// Network mask over `W0` then `W1`. Global ranking by default; with
/// `per_layer` each matrix is pruned to the ratio on its own.
pub fn derive_weight_mask(params: &GcnParams, p: f64, per_layer: bool) -> Result<PruneMask> {
    if per_layer {
        let m0 = derive_mask(params.w0.as_slice(), p)?;
        let m1 = derive_mask(params.w1.as_slice(), p)?;
        let mut bits = m0.bits;
        bits.extend_from_slice(&m1.bits);
        Ok(PruneMask { bits, ratio: p })
    } else {
        derive_mask(&params.flat(), p)
    }
}

/// Uniformly random mask with exactly `round((1 − p) · len)` kept bits.
pub fn random_mask<R: RngCore + ?Sized>(len: usize, p: f64, rng: &mut R) -> Result<PruneMask> {
    check_ratio(p)?;
    let k = kept_count(len, p);
    let mut bits = vec![false; len];
    for i in rand::seq::index::sample(rng, len, k).iter() {
        bits[i] = true;
    }
    Ok(PruneMask { bits, ratio: p })
}

/// One trainable value per undirected edge, starting at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeParams {
    values: Vec<f64>,
    opt: Adam,
}

impl EdgeParams {
    pub fn new(num_edges: usize) -> Self {
        Self { values: vec![1.0; num_edges], opt: Adam::new(num_edges) }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&mut self, grads: &[f64], lr: f64) -> Result<()> {
        self.opt.step(&mut self.values, grads, lr, None)
    }
}

/// Whether edge gradients follow the values into the degree normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegreeGrad {
    #[default]
    Include,
    /// Treat degrees as constants (ablation).
    Freeze,
}

/// Cross-entropy on the graph built from `values` plus `λ · Σ|v|`.
pub fn graph_loss(
    adj: &NormalizedAdjacency,
    x: &CsrMatrix,
    params: &GcnParams,
    labels: &[u16],
    mask: &[bool],
    values: &[f64],
    lambda: f64,
) -> Result<f64> {
    if values.len() != adj.num_edges() {
        return Err(Error::Contract(format!("{} values for {} edges", values.len(), adj.num_edges())));
    }
    let cache = gcn_forward_eval(adj, x, params)?;
    let data = masked_cross_entropy(&cache.z, labels, mask)?;
    Ok(data + lambda * values.iter().map(|v| v.abs()).sum::<f64>())
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Gradient of [`graph_loss`] with respect to every edge value.
///
/// Entry `(i, j)` of `Â` is `v / sqrt(d_i d_j)` with `d_i = 1 + Σ|v|`, so a
/// value reaches the loss through its two stored entries and through the
/// degrees of both endpoints, which scale every entry in their rows and
/// columns. Writing `B = ∂L/∂Â` and `s_i = Σ_j (B_ij + B_ji) Â_ij`, the degree
/// path contributes `−s_i / (2 d_i)` per endpoint, times `sign(v)`.
#[allow(clippy::too_many_arguments)]
pub fn grad_edge_values(
    cache: &ForwardCache,
    adj: &NormalizedAdjacency,
    params: &GcnParams,
    labels: &[u16],
    mask: &[bool],
    values: &[f64],
    lambda: f64,
    degree: DegreeGrad,
) -> Result<Vec<f64>> {
    let m = adj.num_edges();
    if values.len() != m {
        return Err(Error::Contract(format!("{} values for {m} edges", values.len())));
    }
    let bp = backprop(cache, adj, params, labels, mask)?;
    let a = adj.matrix();
    let deg = adj.degrees();
    let n = adj.num_nodes();

    let mut grad = vec![0.0; m];
    let mut ends: Vec<Option<(usize, usize)>> = vec![None; m];
    let mut s = vec![0.0; n];
    for i in 0..n {
        for k in a.row_range(i) {
            let j = a.col_idx()[k] as usize;
            let b = dot(bp.g.row(i), cache.q.row(j)) + dot(bp.ds1.row(i), cache.p.row(j));
            let weighted = b * a.values()[k];
            s[i] += weighted;
            s[j] += weighted;
            let e = adj.entry_edge()[k];
            if e != SELF_LOOP {
                let e = e as usize;
                grad[e] += b / libm::sqrt(deg[i] * deg[j]);
                if i < j {
                    ends[e] = Some((i, j));
                }
            }
        }
    }
    for e in 0..m {
        if let (DegreeGrad::Include, Some((i, j))) = (degree, ends[e]) {
            grad[e] -= sign(values[e]) * (s[i] / (2.0 * deg[i]) + s[j] / (2.0 * deg[j]));
        }
        grad[e] += lambda * sign(values[e]);
    }
    ensure_finite(&grad, "edge gradient")?;
    Ok(grad)
}

/// Edge values after pruning: pruned entries are zeroed and dropped from the
/// structure via `keep`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrunedGraph {
    pub values: Vec<f64>,
    pub keep: PruneMask,
}

impl PrunedGraph {
    pub fn kept_edges(&self) -> usize {
        self.keep.popcount()
    }

    pub fn adjacency(&self, ds: &GraphDataset) -> Result<NormalizedAdjacency> {
        normalize_adjacency(ds, &self.values, Some(&self.keep))
    }
}

/// `m ⊙ A`: surviving edges keep their trained values.
pub fn apply_graph_prune(edge_values: &[f64], mask: &PruneMask) -> Result<PrunedGraph> {
    if mask.len() != edge_values.len() {
        return Err(Error::Contract(format!("mask of {} bits for {} edges", mask.len(), edge_values.len())));
    }
    let values = edge_values.iter().zip(mask.bits()).map(|(&v, &k)| if k { v } else { 0.0 }).collect();
    Ok(PrunedGraph { values, keep: mask.clone() })
}

/// `n ⊙ W`: zeroes pruned weights and freezes them for later Adam steps.
pub fn apply_weight_prune(params: &mut GcnParams, mask: &PruneMask) -> Result<()> {
    if mask.len() != params.num_weights() {
        return Err(Error::Contract(format!("mask of {} bits for {} weights", mask.len(), params.num_weights())));
    }
    let keep = match params.frozen() {
        Some(prev) => prev.iter().zip(mask.bits()).map(|(&a, &b)| a && b).collect(),
        None => mask.bits().to_vec(),
    };
    params.freeze(keep);
    Ok(())
}
