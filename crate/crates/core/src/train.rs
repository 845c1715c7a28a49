//! Single-epoch training steps and best-validation model selection.

use rand::RngCore;

use crate::adjacency::NormalizedAdjacency;
use crate::csr::CsrMatrix;
use crate::error::Result;
use crate::gcn::{
    accuracy, adam_step, gcn_backward_weights, gcn_forward, gcn_forward_eval, weight_objective, GcnParams, Mode,
    TrainConfig,
};
use crate::graph::GraphDataset;
use crate::sparsify::{grad_edge_values, DegreeGrad, EdgeParams};

/// Features, labels and split masks of one dataset.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub x: &'a CsrMatrix,
    pub labels: &'a [u16],
    pub train: &'a [bool],
    pub val: &'a [bool],
    pub test: &'a [bool],
}

impl<'a> Problem<'a> {
    pub fn new(ds: &'a GraphDataset, x: &'a CsrMatrix) -> Self {
        Self { x, labels: ds.labels(), train: ds.train_mask(), val: ds.val_mask(), test: ds.test_mask() }
    }
}

/// One weight update with dropout. Returns the objective before the update.
pub fn weight_epoch<R: RngCore + ?Sized>(
    adj: &NormalizedAdjacency,
    prob: &Problem<'_>,
    params: &mut GcnParams,
    cfg: &TrainConfig,
    rng: &mut R,
) -> Result<f64> {
    let cache = gcn_forward(adj, prob.x, params, Mode::Train { dropout: cfg.dropout }, rng)?;
    let loss = weight_objective(&cache.z, prob.labels, prob.train, params, cfg.weight_decay)?;
    let grads = gcn_backward_weights(&cache, adj, prob.x, params, prob.labels, prob.train, cfg.weight_decay)?;
    adam_step(params, &grads, cfg.lr_weights)?;
    Ok(loss)
}

/// One edge-value update with the weights held fixed and dropout off.
/// Returns the graph loss before the update; the caller rebuilds `Â`.
pub fn edge_epoch(
    adj: &NormalizedAdjacency,
    prob: &Problem<'_>,
    params: &GcnParams,
    edges: &mut EdgeParams,
    cfg: &TrainConfig,
    degree: DegreeGrad,
) -> Result<f64> {
    let cache = gcn_forward_eval(adj, prob.x, params)?;
    let data = crate::gcn::masked_cross_entropy(&cache.z, prob.labels, prob.train)?;
    let reg: f64 = edges.values().iter().map(|v| v.abs()).sum();
    let grads = grad_edge_values(&cache, adj, params, prob.labels, prob.train, edges.values(), cfg.lambda_reg, degree)?;
    edges.step(&grads, cfg.lr_graph)?;
    Ok(data + cfg.lambda_reg * reg)
}

/// Validation and test accuracy from one eval-mode forward pass.
pub fn evaluate(adj: &NormalizedAdjacency, prob: &Problem<'_>, params: &GcnParams) -> Result<(f64, f64)> {
    let cache = gcn_forward_eval(adj, prob.x, params)?;
    let val = if prob.val.iter().any(|&b| b) { accuracy(&cache.z, prob.labels, prob.val)? } else { 0.0 };
    let test = if prob.test.iter().any(|&b| b) { accuracy(&cache.z, prob.labels, prob.test)? } else { 0.0 };
    Ok((val, test))
}

/// Tracks the epoch with the highest validation accuracy; ties keep the
/// earliest.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BestVal {
    pub epoch: Option<usize>,
    pub val: f64,
    pub test: f64,
}

impl BestVal {
    pub fn update(&mut self, epoch: usize, val: f64, test: f64) {
        if self.epoch.is_none() || val > self.val {
            *self = Self { epoch: Some(epoch), val, test };
        }
    }
}
