//! Stochastic-block-model fixture graphs.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{GraphDataset, Splits};
use crate::rng::{stream, Stream};

/// Amplitude of the uniform noise added to every feature.
pub const FEATURE_NOISE: f32 = 1.0;

/// Generates a block-model graph.
///
/// Nodes `b·k .. (b+1)·k` form block `b` and carry label `b`. Each pair is
/// linked with probability `p_in` inside a block and `p_out` across blocks.
/// Features are a one-hot block indicator (column `b mod feat_dim`) plus
/// uniform noise in `[-FEATURE_NOISE, FEATURE_NOISE]`. Every block is split
/// 10% train (at least one node), 10% validation, 80% test.
pub fn gen_synthetic(
    seed: u64,
    blocks: usize,
    nodes_per_block: usize,
    p_in: f64,
    p_out: f64,
    feat_dim: usize,
) -> Result<GraphDataset> {
    if blocks == 0 || nodes_per_block == 0 || feat_dim == 0 {
        return Err(Error::Argument("block count, block size and feature dim must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) {
        return Err(Error::Argument(format!("probabilities ({p_in}, {p_out}) outside [0, 1]")));
    }
    if p_in <= p_out {
        return Err(Error::Argument(format!("p_in {p_in} must exceed p_out {p_out}")));
    }
    if blocks > u16::MAX as usize {
        return Err(Error::Argument(format!("{blocks} blocks exceed the label range")));
    }
    let n = blocks * nodes_per_block;
    let mut rng = stream(seed, Stream::Synthetic);
    let block_of = |v: usize| v / nodes_per_block;

    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if block_of(i) == block_of(j) { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                edges.push((i as u32, j as u32));
            }
        }
    }

    let mut features = vec![0.0f32; n * feat_dim];
    for v in 0..n {
        let row = &mut features[v * feat_dim..(v + 1) * feat_dim];
        for x in row.iter_mut() {
            *x = rng.gen_range(-FEATURE_NOISE..=FEATURE_NOISE);
        }
        row[block_of(v) % feat_dim] += 1.0;
    }
    let labels: Vec<u16> = (0..n).map(|v| block_of(v) as u16).collect();

    let mut splits = Splits { train: vec![false; n], val: vec![false; n], test: vec![false; n] };
    let n_train = (libm::round(0.1 * nodes_per_block as f64) as usize).max(1);
    let n_val = (libm::round(0.1 * nodes_per_block as f64) as usize).min(nodes_per_block - n_train);
    for b in 0..blocks {
        let mut members: Vec<usize> = (b * nodes_per_block..(b + 1) * nodes_per_block).collect();
        members.shuffle(&mut rng);
        for (rank, &v) in members.iter().enumerate() {
            if rank < n_train {
                splits.train[v] = true;
            } else if rank < n_train + n_val {
                splits.val[v] = true;
            } else {
                splits.test[v] = true;
            }
        }
    }
    GraphDataset::new("sbm", n, edges, feat_dim, features, labels, blocks, splits)
}
