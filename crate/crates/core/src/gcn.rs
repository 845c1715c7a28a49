//! Two-layer GCN: `Z = softmax(Â · ReLU(Â · X · W0) · W1)`, its masked
//! cross-entropy, hand-derived weight gradients and Adam.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};

use crate::adjacency::NormalizedAdjacency;
use crate::csr::CsrMatrix;
use crate::error::{ensure_finite, Error, Result};
use crate::matrix::Matrix;

/// Probabilities are clamped to this floor before taking the log.
pub const PROB_FLOOR: f64 = 1e-12;

/// Hyperparameters shared by every training phase.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Hidden units `H`.
    pub hidden: usize,
    /// Epochs per phase, `t_max`.
    pub epochs: usize,
    pub lr_weights: f64,
    pub lr_graph: f64,
    /// L2 coefficient on `W0` only.
    pub weight_decay: f64,
    /// Drop probability for `X` and the hidden activations in train mode.
    pub dropout: f64,
    pub seed: u64,
    /// L1 coefficient on the edge values.
    pub lambda_reg: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden: 16,
            epochs: 100,
            lr_weights: 0.01,
            lr_graph: 0.001,
            weight_decay: 5e-4,
            dropout: 0.5,
            seed: 0,
            lambda_reg: 0.01,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.epochs == 0 {
            return Err(Error::Argument("hidden and epochs must be at least 1".into()));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !positive(self.lr_weights) || !positive(self.lr_graph) {
            return Err(Error::Argument("learning rates must be positive".into()));
        }
        if !nonneg(self.weight_decay) || !nonneg(self.lambda_reg) {
            return Err(Error::Argument("weight_decay and lambda_reg must be non-negative".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Argument(format!("dropout {} outside [0, 1)", self.dropout)));
        }
        Ok(())
    }
}

/// Adam with bias correction and the usual defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub const BETA1: f64 = 0.9;
    pub const BETA2: f64 = 0.999;
    pub const EPS: f64 = 1e-8;

    pub fn new(len: usize) -> Self {
        Self { m: vec![0.0; len], v: vec![0.0; len], t: 0 }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn moments(&self) -> (&[f64], &[f64]) {
        (&self.m, &self.v)
    }

    /// One update. Positions whose `keep` bit is false get zero gradient, zero
    /// moments and are pinned to zero.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64, keep: Option<&[bool]>) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != params.len() {
            return Err(Error::Contract(format!(
                "adam state {} / params {} / grads {}",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        ensure_finite(grads, "gradient")?;
        self.t += 1;
        let bc1 = 1.0 - libm::pow(Self::BETA1, self.t as f64);
        let bc2 = 1.0 - libm::pow(Self::BETA2, self.t as f64);
        for k in 0..params.len() {
            if keep.is_some_and(|kp| !kp[k]) {
                self.m[k] = 0.0;
                self.v[k] = 0.0;
                params[k] = 0.0;
                continue;
            }
            let g = grads[k];
            self.m[k] = Self::BETA1 * self.m[k] + (1.0 - Self::BETA1) * g;
            self.v[k] = Self::BETA2 * self.v[k] + (1.0 - Self::BETA2) * g * g;
            let m_hat = self.m[k] / bc1;
            let v_hat = self.v[k] / bc2;
            params[k] -= lr * m_hat / (libm::sqrt(v_hat) + Self::EPS);
        }
        ensure_finite(params, "adam update")
    }

    pub(crate) fn zero_positions(&mut self, keep: &[bool]) {
        for (k, &kp) in keep.iter().enumerate() {
            if !kp {
                self.m[k] = 0.0;
                self.v[k] = 0.0;
            }
        }
    }
}

/// Weights `W0` (C×H) and `W1` (H×F) with their optimizer state.
#[derive(Debug, Clone, PartialEq)]
pub struct GcnParams {
    pub w0: Matrix,
    pub w1: Matrix,
    opt0: Adam,
    opt1: Adam,
    /// Flattened keep-bits (W0 then W1, row-major) once weights are pruned.
    frozen: Option<Vec<bool>>,
}

impl GcnParams {
    pub fn new(w0: Matrix, w1: Matrix) -> Result<Self> {
        if w0.cols() != w1.rows() || w0.rows() == 0 || w0.cols() == 0 || w1.cols() == 0 {
            return Err(Error::Argument(format!("incompatible weight shapes {:?} and {:?}", w0.shape(), w1.shape())));
        }
        ensure_finite(w0.as_slice(), "W0")?;
        ensure_finite(w1.as_slice(), "W1")?;
        let (n0, n1) = (w0.as_slice().len(), w1.as_slice().len());
        Ok(Self { w0, w1, opt0: Adam::new(n0), opt1: Adam::new(n1), frozen: None })
    }

    pub fn input_dim(&self) -> usize {
        self.w0.rows()
    }

    pub fn hidden(&self) -> usize {
        self.w0.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.w1.cols()
    }

    /// `C·H + H·F`.
    pub fn num_weights(&self) -> usize {
        self.w0.as_slice().len() + self.w1.as_slice().len()
    }

    /// Optimizer step counter.
    pub fn steps(&self) -> u64 {
        self.opt0.steps()
    }

    pub fn optimizer(&self) -> (&Adam, &Adam) {
        (&self.opt0, &self.opt1)
    }

    /// All weights flattened W0 then W1.
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_weights());
        out.extend_from_slice(self.w0.as_slice());
        out.extend_from_slice(self.w1.as_slice());
        out
    }

    pub fn frozen(&self) -> Option<&[bool]> {
        self.frozen.as_deref()
    }

    pub fn nonzero_count(&self) -> usize {
        self.w0.as_slice().iter().chain(self.w1.as_slice()).filter(|&&v| v != 0.0).count()
    }

    /// Fresh moments and step counter, keeping weights and any freeze mask.
    pub fn reset_optimizer(&mut self) {
        self.opt0 = Adam::new(self.w0.as_slice().len());
        self.opt1 = Adam::new(self.w1.as_slice().len());
    }

    pub(crate) fn freeze(&mut self, keep: Vec<bool>) {
        let n0 = self.w0.as_slice().len();
        for (w, &k) in self.w0.as_mut_slice().iter_mut().chain(self.w1.as_mut_slice()).zip(&keep) {
            if !k {
                *w = 0.0;
            }
        }
        self.opt0.zero_positions(&keep[..n0]);
        self.opt1.zero_positions(&keep[n0..]);
        self.frozen = Some(keep);
    }
}

/// Glorot-uniform initialization from a seed.
pub fn init_params(c: usize, h: usize, f: usize, seed: u64) -> Result<GcnParams> {
    init_params_with(c, h, f, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed))
}

/// Glorot-uniform initialization, bound `sqrt(6 / (fan_in + fan_out))`.
pub fn init_params_with<R: RngCore + ?Sized>(c: usize, h: usize, f: usize, rng: &mut R) -> Result<GcnParams> {
    if c == 0 || h == 0 || f == 0 {
        return Err(Error::Argument(format!("zero dimension in ({c}, {h}, {f})")));
    }
    let mut glorot = |rows: usize, cols: usize| {
        let bound = libm::sqrt(6.0 / (rows + cols) as f64);
        let data = (0..rows * cols).map(|_| rng.gen_range(-bound..=bound)).collect();
        Matrix::from_vec(rows, cols, data)
    };
    let w0 = glorot(c, h);
    let w1 = glorot(h, f);
    GcnParams::new(w0, w1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Inverted dropout with the given drop probability.
    Train {
        dropout: f64,
    },
    Eval,
}

/// Intermediates of one forward pass, kept for the backward passes.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCache {
    /// Dropped-out feature values aligned with the feature CSR storage;
    /// `None` when no input dropout was applied.
    pub x_values: Option<Vec<f64>>,
    /// `X · W0` (N×H).
    pub p: Matrix,
    /// `Â · X · W0`.
    pub h1_pre: Matrix,
    /// `ReLU(h1_pre)`.
    pub h1: Matrix,
    /// Per-entry dropout scale on `h1` (0 or 1/keep); `None` without dropout.
    pub h1_scale: Option<Vec<f64>>,
    /// `h1` after dropout.
    pub h1_dropped: Matrix,
    /// `h1_dropped · W1` (N×F).
    pub q: Matrix,
    pub logits: Matrix,
    /// Row-wise softmax of `logits`.
    pub z: Matrix,
}

/// Forward pass. In [`Mode::Eval`] the generator is not touched.
pub fn gcn_forward<R: RngCore + ?Sized>(
    adj: &NormalizedAdjacency,
    x: &CsrMatrix,
    params: &GcnParams,
    mode: Mode,
    rng: &mut R,
) -> Result<ForwardCache> {
    match mode {
        Mode::Train { dropout } if dropout > 0.0 => forward_impl(adj, x, params, Some((dropout, rng))),
        _ => forward_impl::<R>(adj, x, params, None),
    }
}

/// Eval-mode forward pass without a generator.
pub fn gcn_forward_eval(adj: &NormalizedAdjacency, x: &CsrMatrix, params: &GcnParams) -> Result<ForwardCache> {
    forward_impl::<rand_chacha::ChaCha8Rng>(adj, x, params, None)
}

fn forward_impl<R: RngCore + ?Sized>(
    adj: &NormalizedAdjacency,
    x: &CsrMatrix,
    params: &GcnParams,
    dropout: Option<(f64, &mut R)>,
) -> Result<ForwardCache> {
    let n = adj.num_nodes();
    if x.rows() != n || x.cols() != params.input_dim() {
        return Err(Error::Contract(format!(
            "features {}x{} vs {n} nodes and W0 {:?}",
            x.rows(),
            x.cols(),
            params.w0.shape()
        )));
    }
    let a = adj.matrix();
    let (x_values, h1_keep_prob, mut rng) = match dropout {
        Some((p, rng)) => {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::Argument(format!("dropout {p} outside [0, 1)")));
            }
            let keep = 1.0 - p;
            let vals: Vec<f64> =
                x.values().iter().map(|&v| if rng.gen::<f64>() < keep { v / keep } else { 0.0 }).collect();
            (Some(vals), Some(keep), Some(rng))
        }
        None => (None, None, None),
    };
    let p = x.mul_dense_with(x_values.as_deref().unwrap_or(x.values()), &params.w0);
    ensure_finite(p.as_slice(), "layer-1 combination")?;
    let h1_pre = a.mul_dense(&p);
    ensure_finite(h1_pre.as_slice(), "layer-1 aggregation")?;
    let mut h1 = h1_pre.clone();
    h1.as_mut_slice().iter_mut().for_each(|v| *v = v.max(0.0));

    let (h1_scale, h1_dropped) = match (h1_keep_prob, rng.as_mut()) {
        (Some(keep), Some(rng)) => {
            let scale: Vec<f64> =
                (0..h1.as_slice().len()).map(|_| if rng.gen::<f64>() < keep { 1.0 / keep } else { 0.0 }).collect();
            let mut dropped = h1.clone();
            dropped.as_mut_slice().iter_mut().zip(&scale).for_each(|(v, s)| *v *= s);
            (Some(scale), dropped)
        }
        _ => (None, h1.clone()),
    };
    let q = h1_dropped.matmul(&params.w1);
    ensure_finite(q.as_slice(), "layer-2 combination")?;
    let logits = a.mul_dense(&q);
    ensure_finite(logits.as_slice(), "layer-2 aggregation")?;
    let z = softmax_rows(&logits);
    ensure_finite(z.as_slice(), "softmax")?;
    Ok(ForwardCache { x_values, p, h1_pre, h1, h1_scale, h1_dropped, q, logits, z })
}

/// Row-wise softmax with max subtraction.
pub fn softmax_rows(logits: &Matrix) -> Matrix {
    let mut z = logits.clone();
    for r in 0..z.rows() {
        let row = z.row_mut(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = libm::exp(*v - max);
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    z
}

fn check_mask(z: &Matrix, labels: &[u16], mask: &[bool]) -> Result<usize> {
    if labels.len() != z.rows() || mask.len() != z.rows() {
        return Err(Error::Contract(format!(
            "{} rows vs {} labels and mask of {}",
            z.rows(),
            labels.len(),
            mask.len()
        )));
    }
    let count = mask.iter().filter(|&&m| m).count();
    if count == 0 {
        return Err(Error::Argument("mask selects no nodes".into()));
    }
    if let Some(n) = (0..z.rows()).find(|&n| mask[n] && labels[n] as usize >= z.cols()) {
        return Err(Error::Contract(format!("label {} of node {n} has no output column", labels[n])));
    }
    Ok(count)
}

/// `−Σ_{n ∈ mask} ln Z[n, y_n]`, summed rather than averaged.
pub fn masked_cross_entropy(z: &Matrix, labels: &[u16], mask: &[bool]) -> Result<f64> {
    check_mask(z, labels, mask)?;
    let mut loss = 0.0;
    for n in (0..z.rows()).filter(|&n| mask[n]) {
        let mut prob = z.get(n, labels[n] as usize);
        if prob < PROB_FLOOR {
            log::warn!("probability {prob:e} for node {n} clamped to {PROB_FLOOR:e}");
            prob = PROB_FLOOR;
        }
        loss -= libm::log(prob);
    }
    Ok(loss)
}

/// Loss the weight phase minimizes: cross-entropy plus `wd/2 · ‖W0‖²`, the
/// term whose gradient is the `wd · W0` added by [`gcn_backward_weights`].
pub fn weight_objective(
    z: &Matrix,
    labels: &[u16],
    mask: &[bool],
    params: &GcnParams,
    weight_decay: f64,
) -> Result<f64> {
    let ce = masked_cross_entropy(z, labels, mask)?;
    let sq: f64 = params.w0.as_slice().iter().map(|w| w * w).sum();
    Ok(ce + 0.5 * weight_decay * sq)
}

/// `∂L/∂logits`: `Z − onehot(Y)` on masked rows, zero elsewhere.
pub fn logit_grad(z: &Matrix, labels: &[u16], mask: &[bool]) -> Result<Matrix> {
    check_mask(z, labels, mask)?;
    let mut g = Matrix::zeros(z.rows(), z.cols());
    for n in (0..z.rows()).filter(|&n| mask[n]) {
        g.row_mut(n).copy_from_slice(z.row(n));
        let y = labels[n] as usize;
        g.set(n, y, g.get(n, y) - 1.0);
    }
    Ok(g)
}

/// Upstream gradients shared by the weight and edge backward passes.
#[derive(Debug, Clone)]
pub(crate) struct Backprop {
    /// `∂L/∂logits`.
    pub g: Matrix,
    /// `Â · g`, the gradient reaching `q`.
    pub ag: Matrix,
    /// `∂L/∂h1_pre`.
    pub ds1: Matrix,
}

pub(crate) fn backprop(
    cache: &ForwardCache,
    adj: &NormalizedAdjacency,
    params: &GcnParams,
    labels: &[u16],
    mask: &[bool],
) -> Result<Backprop> {
    let (n, h, f) = (adj.num_nodes(), params.hidden(), params.output_dim());
    if cache.z.shape() != (n, f) || cache.h1_pre.shape() != (n, h) || cache.p.shape() != (n, h) {
        return Err(Error::Contract(format!(
            "forward cache Z {:?} / H1 {:?} does not match N={n}, H={h}, F={f}",
            cache.z.shape(),
            cache.h1_pre.shape()
        )));
    }
    let g = logit_grad(&cache.z, labels, mask)?;
    let a = adj.matrix();
    let ag = a.mul_dense(&g);
    let mut ds1 = ag.matmul_t(&params.w1);
    if let Some(scale) = &cache.h1_scale {
        ds1.as_mut_slice().iter_mut().zip(scale).for_each(|(d, s)| *d *= s);
    }
    // ReLU'(0) = 0
    ds1.as_mut_slice().iter_mut().zip(cache.h1_pre.as_slice()).for_each(|(d, &pre)| {
        if pre <= 0.0 {
            *d = 0.0;
        }
    });
    Ok(Backprop { g, ag, ds1 })
}

/// Gradients of the weight objective with respect to `W0` and `W1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightGrads {
    pub w0: Matrix,
    pub w1: Matrix,
}

/// Analytic gradients of [`weight_objective`] through the cached forward pass.
pub fn gcn_backward_weights(
    cache: &ForwardCache,
    adj: &NormalizedAdjacency,
    x: &CsrMatrix,
    params: &GcnParams,
    labels: &[u16],
    mask: &[bool],
    weight_decay: f64,
) -> Result<WeightGrads> {
    let x_values = cache.x_values.as_deref().unwrap_or(x.values());
    if x_values.len() != x.nnz() || x.cols() != params.input_dim() {
        return Err(Error::Contract("forward cache was built from different features".into()));
    }
    let bp = backprop(cache, adj, params, labels, mask)?;
    let w1 = cache.h1_dropped.t_matmul(&bp.ag);
    let dp = adj.matrix().mul_dense(&bp.ds1);
    let mut w0 = x.t_mul_dense_with(x_values, &dp);
    if weight_decay != 0.0 {
        w0.as_mut_slice().iter_mut().zip(params.w0.as_slice()).for_each(|(g, &w)| *g += weight_decay * w);
    }
    ensure_finite(w0.as_slice(), "W0 gradient")?;
    ensure_finite(w1.as_slice(), "W1 gradient")?;
    Ok(WeightGrads { w0, w1 })
}

/// One Adam update of both weight matrices. Pruned positions stay at zero.
pub fn adam_step(params: &mut GcnParams, grads: &WeightGrads, lr: f64) -> Result<()> {
    if grads.w0.shape() != params.w0.shape() || grads.w1.shape() != params.w1.shape() {
        return Err(Error::Contract("gradient shapes differ from parameters".into()));
    }
    ensure_finite(grads.w0.as_slice(), "W0 gradient")?;
    ensure_finite(grads.w1.as_slice(), "W1 gradient")?;
    let n0 = params.w0.as_slice().len();
    let (keep0, keep1) = match &params.frozen {
        Some(k) => (Some(&k[..n0]), Some(&k[n0..])),
        None => (None, None),
    };
    params.opt0.step(params.w0.as_mut_slice(), grads.w0.as_slice(), lr, keep0)?;
    params.opt1.step(params.w1.as_mut_slice(), grads.w1.as_slice(), lr, keep1)
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = k;
        }
    }
    best
}

/// Fraction of masked nodes whose argmax class equals the label.
pub fn accuracy(z: &Matrix, labels: &[u16], mask: &[bool]) -> Result<f64> {
    let count = check_mask(z, labels, mask)?;
    let correct = (0..z.rows()).filter(|&n| mask[n] && argmax(z.row(n)) == labels[n] as usize).count();
    Ok(correct as f64 / count as f64)
}

/// Eval-mode accuracy on the masked nodes.
pub fn evaluate_accuracy(
    adj: &NormalizedAdjacency,
    x: &CsrMatrix,
    params: &GcnParams,
    labels: &[u16],
    mask: &[bool],
) -> Result<f64> {
    if !mask.iter().any(|&m| m) {
        return Err(Error::Argument("empty evaluation mask".into()));
    }
    let cache = gcn_forward_eval(adj, x, params)?;
    accuracy(&cache.z, labels, mask)
}
