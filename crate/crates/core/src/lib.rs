//! Graph convolutional network training with graph and weight
//! co-sparsification and early-bird ticket detection.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation: dataset IO, configuration files, pipelines and the command
//! line live in the `gebt` companion crate.
//!
//! Module map:
//!
//! - [`graph`], [`adjacency`], [`synth`]: the dataset model, the symmetric
//!   normalized adjacency and the stochastic-block-model fixture.
//! - [`gcn`]: two-layer GCN forward pass, masked cross-entropy, analytic
//!   weight gradients, Adam.
//! - [`sparsify`]: trainable edge values, edge gradients through the degree
//!   normalization, magnitude masks and pruning.
//! - [`detector`]: mask distances and the FIFO early-bird detector.
//! - [`flops`]: inference/training FLOPs and memory accounting.
//! - [`train`]: epoch-level training steps shared by the pipelines.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod adjacency;
pub mod csr;
pub mod detector;
pub mod error;
pub mod flops;
pub mod gcn;
pub mod graph;
pub mod matrix;
pub mod rng;
pub mod sparsify;
pub mod synth;
pub mod train;

pub use adjacency::{normalize_adjacency, NormalizedAdjacency};
pub use csr::CsrMatrix;
pub use detector::{mask_distance, pairwise_distance_matrix, Criterion, DetectorConfig, EbDetector};
pub use error::{Error, Result};
pub use flops::{inference_flops, memory_estimate, training_flops, FlopsReport};
pub use gcn::{
    adam_step, evaluate_accuracy, gcn_backward_weights, gcn_forward, init_params, masked_cross_entropy, ForwardCache,
    GcnParams, Mode, TrainConfig, WeightGrads,
};
pub use graph::{GraphDataset, Splits};
pub use matrix::Matrix;
pub use sparsify::{
    apply_graph_prune, apply_weight_prune, derive_mask, grad_edge_values, graph_loss, DegreeGrad, EdgeParams,
    PruneMask, PrunedGraph,
};
pub use synth::gen_synthetic;
