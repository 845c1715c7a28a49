//! FLOPs and memory accounting for two-matrix-product GCN layers.
//!
//! A layer costs an aggregation `Â · H` (sparse, proportional to the stored
//! entries of `Â`) and a combination `H · W` (dense, scaled by the surviving
//! weight fraction). Everything is integer arithmetic so that breakdowns sum
//! to totals exactly.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Printed at the top of every FLOPs report.
pub const CONVENTION: &str = "FLOPs convention: multiply-add = 2 FLOPs; per layer aggregation = \
2*nnz(A_hat)*F_out with nnz counting both directions of each kept edge plus self-loops; combination = \
round(2*(1-p_w)*N*F_in*F_out); softmax, ReLU and normalization excluded; training = epochs*forward*(1+backward_factor)";

/// Stored directed entries of `Â` for `kept_edges` undirected edges.
pub fn stored_entries(num_nodes: usize, kept_edges: usize) -> u64 {
    2 * kept_edges as u64 + num_nodes as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerFlops {
    pub aggregation: u64,
    pub combination: u64,
}

impl LayerFlops {
    pub fn total(&self) -> u64 {
        self.aggregation + self.combination
    }
}

/// Per-layer forward cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InferenceFlops {
    pub layers: Vec<LayerFlops>,
}

impl InferenceFlops {
    pub fn aggregation(&self) -> u64 {
        self.layers.iter().map(|l| l.aggregation).sum()
    }

    pub fn combination(&self) -> u64 {
        self.layers.iter().map(|l| l.combination).sum()
    }

    pub fn total(&self) -> u64 {
        self.aggregation() + self.combination()
    }
}

fn check_density(p_w: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p_w) {
        Ok(1.0 - p_w)
    } else {
        Err(Error::Argument(format!("weight pruning ratio {p_w} outside [0, 1]")))
    }
}

fn check_dims(layer_dims: &[usize]) -> Result<()> {
    if layer_dims.len() < 2 || layer_dims.contains(&0) {
        return Err(Error::Argument(format!("layer dims {layer_dims:?} need at least two positive entries")));
    }
    Ok(())
}

/// Forward FLOPs for layers `dims[0] → dims[1] → …` on `n` nodes with
/// `m_kept` stored entries in `Â`.
pub fn inference_flops(n: usize, m_kept: u64, layer_dims: &[usize], p_w: f64) -> Result<InferenceFlops> {
    check_dims(layer_dims)?;
    if n == 0 {
        return Err(Error::Argument("no nodes".into()));
    }
    let density = check_density(p_w)?;
    let layers = layer_dims
        .windows(2)
        .map(|w| {
            let (f_in, f_out) = (w[0] as u64, w[1] as u64);
            let dense = 2 * n as u64 * f_in * f_out;
            LayerFlops { aggregation: 2 * m_kept * f_out, combination: libm::round(density * dense as f64) as u64 }
        })
        .collect();
    Ok(InferenceFlops { layers })
}

/// `epochs · forward · (1 + backward_factor)`.
pub fn training_flops(per_epoch_inference: u64, epochs: u64, backward_factor: f64) -> u64 {
    let base = per_epoch_inference * epochs;
    let factor = 1.0 + backward_factor;
    if libm::trunc(factor) == factor && factor >= 0.0 {
        base * factor as u64
    } else {
        libm::round(base as f64 * factor) as u64
    }
}

/// Activations plus surviving weights, in bytes.
pub fn memory_estimate(n: usize, layer_dims: &[usize], p_w: f64, bytes_per_value: u64) -> Result<u64> {
    check_dims(layer_dims)?;
    let density = check_density(p_w)?;
    let values: u64 = layer_dims
        .windows(2)
        .map(|w| {
            let (f_in, f_out) = (w[0] as u64, w[1] as u64);
            n as u64 * f_out + libm::round(density * (f_in * f_out) as f64) as u64
        })
        .sum();
    Ok(values * bytes_per_value)
}

/// Training cost of one pipeline phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseFlops {
    pub name: String,
    pub epochs: u64,
    pub aggregation: u64,
    pub combination: u64,
}

impl PhaseFlops {
    pub fn total(&self) -> u64 {
        self.aggregation + self.combination
    }
}

/// Training, inference and memory totals of a run with their breakdowns.
#[derive(Debug, Clone, PartialEq)]
pub struct FlopsReport {
    pub phases: Vec<PhaseFlops>,
    /// Forward cost of the final (pruned) model.
    pub inference: InferenceFlops,
    pub memory_bytes: u64,
    /// Surviving edge fraction `1 − p_g`.
    pub graph_density: f64,
    /// Surviving weight fraction `1 − p_w`.
    pub weight_density: f64,
    pub backward_factor: f64,
}

impl FlopsReport {
    pub fn new(inference: InferenceFlops, memory_bytes: u64, p_g: f64, p_w: f64, backward_factor: f64) -> Self {
        Self {
            phases: Vec::new(),
            inference,
            memory_bytes,
            graph_density: 1.0 - p_g,
            weight_density: 1.0 - p_w,
            backward_factor,
        }
    }

    /// Adds `epochs` training epochs whose forward pass costs `per_epoch`.
    pub fn add_phase(&mut self, name: &str, per_epoch: &InferenceFlops, epochs: u64) {
        self.phases.push(PhaseFlops {
            name: name.into(),
            epochs,
            aggregation: training_flops(per_epoch.aggregation(), epochs, self.backward_factor),
            combination: training_flops(per_epoch.combination(), epochs, self.backward_factor),
        });
    }

    pub fn phase(&self, name: &str) -> Option<&PhaseFlops> {
        self.phases.iter().find(|p| p.name == name)
    }

    pub fn training_flops(&self) -> u64 {
        self.phases.iter().map(PhaseFlops::total).sum()
    }

    pub fn inference_flops(&self) -> u64 {
        self.inference.total()
    }
}
