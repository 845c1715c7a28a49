//! Mask distances and the FIFO early-bird detector.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::sparsify::PruneMask;

/// Normalized Hamming distance: fraction of positions where the masks differ.
pub fn mask_distance(a: &PruneMask, b: &PruneMask) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Contract(format!("mask lengths differ: {} vs {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let differing = a.bits().iter().zip(b.bits()).filter(|(x, y)| x != y).count();
    Ok(differing as f64 / a.len() as f64)
}

/// `T×T` matrix of distances between every pair of masks in a history.
pub fn pairwise_distance_matrix(history: &[PruneMask]) -> Result<Matrix> {
    let t = history.len();
    if t == 0 {
        return Err(Error::Argument("empty mask history".into()));
    }
    let len = history[0].len();
    if let Some(bad) = history.iter().position(|m| m.len() != len) {
        return Err(Error::Contract(format!("mask {bad} has length {} instead of {len}", history[bad].len())));
    }
    let mut out = Matrix::zeros(t, t);
    for i in 0..t {
        for j in i + 1..t {
            let d = mask_distance(&history[i], &history[j])?;
            out.set(i, j, d);
            out.set(j, i, d);
        }
    }
    Ok(out)
}

/// Which distance the joint detector queues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Criterion {
    GraphOnly,
    NetworkOnly,
    #[default]
    Sum,
}

impl Criterion {
    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::GraphOnly => "graph",
            Criterion::NetworkOnly => "network",
            Criterion::Sum => "sum",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "graph" => Some(Criterion::GraphOnly),
            "network" => Some(Criterion::NetworkOnly),
            "sum" => Some(Criterion::Sum),
            _ => None,
        }
    }

    fn select(self, d_g: f64, d_w: f64) -> f64 {
        match self {
            Criterion::GraphOnly => d_g,
            Criterion::NetworkOnly => d_w,
            Criterion::Sum => d_g + d_w,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// FIFO capacity `l`.
    pub queue_len: usize,
    /// Threshold `η`; firing needs every queued distance strictly below it.
    pub eta: f64,
    pub criterion: Criterion,
    /// Epochs `t ≤ warmup_skip` only refresh the stored masks.
    pub warmup_skip: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self { queue_len: 3, eta: 0.1, criterion: Criterion::Sum, warmup_skip: 0 }
    }
}

/// Distances computed by one detector step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepDistances {
    pub d_g: Option<f64>,
    pub d_w: Option<f64>,
    /// The value pushed to the queue, if any.
    pub queued: Option<f64>,
}

/// One-shot early-bird detector over consecutive-epoch mask distances.
#[derive(Debug, Clone, PartialEq)]
pub struct EbDetector {
    config: DetectorConfig,
    queue: VecDeque<f64>,
    last_graph: Option<PruneMask>,
    last_network: Option<PruneMask>,
    fired_at: Option<usize>,
    last: StepDistances,
}

impl EbDetector {
    pub fn new(config: DetectorConfig) -> Result<Self> {
        if config.queue_len == 0 {
            return Err(Error::Argument("queue length must be at least 1".into()));
        }
        if !config.eta.is_finite() {
            return Err(Error::Argument("threshold must be finite".into()));
        }
        Ok(Self {
            config,
            queue: VecDeque::with_capacity(config.queue_len + 1),
            last_graph: None,
            last_network: None,
            fired_at: None,
            last: StepDistances::default(),
        })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    pub fn queue(&self) -> Vec<f64> {
        self.queue.iter().copied().collect()
    }

    pub fn fired_at(&self) -> Option<usize> {
        self.fired_at
    }

    /// Distances from the most recent step.
    pub fn last_distances(&self) -> StepDistances {
        self.last
    }

    fn ensure_live(&self) -> Result<()> {
        match self.fired_at {
            Some(t) => Err(Error::Contract(format!("detector already fired at epoch {t}"))),
            None => Ok(()),
        }
    }

    fn push(&mut self, value: f64, t: usize) -> bool {
        self.queue.push_back(value);
        while self.queue.len() > self.config.queue_len {
            self.queue.pop_front();
        }
        let full = self.queue.len() == self.config.queue_len;
        let max = self.queue.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if full && max < self.config.eta {
            self.fired_at = Some(t);
            true
        } else {
            false
        }
    }

    /// Graph-only step. The first call only stores `m_t`.
    pub fn geb_step(&mut self, m_t: &PruneMask, t: usize) -> Result<bool> {
        self.ensure_live()?;
        let d_g = match &self.last_graph {
            Some(prev) => Some(mask_distance(m_t, prev)?),
            None => None,
        };
        self.last_graph = Some(m_t.clone());
        self.last = StepDistances { d_g, d_w: None, queued: None };
        match d_g {
            Some(d) if t > self.config.warmup_skip => {
                self.last.queued = Some(d);
                Ok(self.push(d, t))
            }
            _ => Ok(false),
        }
    }

    /// Joint step over graph mask `m_t` and network mask `n_t`; the queued
    /// value is chosen by the configured [`Criterion`].
    pub fn joint_eb_step(&mut self, m_t: &PruneMask, n_t: &PruneMask, t: usize) -> Result<bool> {
        self.ensure_live()?;
        let d_g = match &self.last_graph {
            Some(prev) => Some(mask_distance(m_t, prev)?),
            None => None,
        };
        let d_w = match &self.last_network {
            Some(prev) => Some(mask_distance(n_t, prev)?),
            None => None,
        };
        self.last_graph = Some(m_t.clone());
        self.last_network = Some(n_t.clone());
        self.last = StepDistances { d_g, d_w, queued: None };
        match (d_g, d_w) {
            (Some(g), Some(w)) if t > self.config.warmup_skip => {
                let v = self.config.criterion.select(g, w);
                self.last.queued = Some(v);
                Ok(self.push(v, t))
            }
            _ => Ok(false),
        }
    }

    /// Feeds a precomputed distance straight into the queue.
    pub fn push_distance(&mut self, d: f64, t: usize) -> Result<bool> {
        self.ensure_live()?;
        Ok(self.push(d, t))
    }
}
