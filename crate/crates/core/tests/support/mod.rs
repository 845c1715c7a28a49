//! Dense reference implementations used as independent oracles.
//!
//! Apart from `gradcheck`, nothing here calls into the crate's numeric code:
//! adjacency, forward pass and losses are recomputed with nested `Vec`s so
//! that the sparse, cached implementation can be checked against them.
// Index loops mirror the textbook formulas on purpose.
#![allow(dead_code, clippy::needless_range_loop)]

pub mod gradcheck;

use rand::Rng;

pub type Dense = Vec<Vec<f64>>;

/// A small random GCN problem.
#[derive(Debug, Clone)]
pub struct Instance {
    pub n: usize,
    pub edges: Vec<(u32, u32)>,
    pub values: Vec<f64>,
    pub keep: Vec<bool>,
    pub c: usize,
    pub h: usize,
    pub f: usize,
    pub x: Dense,
    pub w0: Dense,
    pub w1: Dense,
    pub labels: Vec<u16>,
    pub mask: Vec<bool>,
}

pub fn random_instance<R: Rng>(rng: &mut R, max_n: usize, max_dim: usize) -> Instance {
    let n = rng.gen_range(2..=max_n);
    let c = rng.gen_range(1..=max_dim);
    let h = rng.gen_range(1..=max_dim);
    let f = rng.gen_range(2..=max_dim.max(2));
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                edges.push((i as u32, j as u32));
            }
        }
    }
    let values = edges.iter().map(|_| rng.gen_range(0.3..1.5)).collect();
    let keep = edges.iter().map(|_| rng.gen_bool(0.8)).collect();
    let mat = |rng: &mut R, r: usize, k: usize, s: f64| -> Dense {
        (0..r).map(|_| (0..k).map(|_| rng.gen_range(-s..s)).collect()).collect()
    };
    let x = mat(rng, n, c, 1.0);
    let w0 = mat(rng, c, h, 1.0);
    let w1 = mat(rng, h, f, 1.0);
    let labels = (0..n).map(|_| rng.gen_range(0..f) as u16).collect();
    let mut mask: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    mask[0] = true;
    Instance { n, edges, values, keep, c, h, f, x, w0, w1, labels, mask }
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let k = b.len();
    let m = b.first().map_or(0, |r| r.len());
    a.iter().map(|row| (0..m).map(|j| (0..k).map(|t| row[t] * b[t][j]).sum()).collect()).collect()
}

/// `D^{-1/2}(A + I)D^{-1/2}` built densely, degrees from absolute values.
pub fn dense_norm_adj(n: usize, edges: &[(u32, u32)], values: &[f64], keep: Option<&[bool]>) -> Dense {
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = 1.0;
    }
    for (e, &(i, j)) in edges.iter().enumerate() {
        if keep.is_none_or(|k| k[e]) {
            a[i as usize][j as usize] = values[e];
            a[j as usize][i as usize] = values[e];
        }
    }
    let d: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j].abs()).sum()).collect();
    (0..n).map(|i| (0..n).map(|j| a[i][j] / (d[i].sqrt() * d[j].sqrt())).collect()).collect()
}

pub struct DenseForward {
    pub h1_pre: Dense,
    pub logits: Dense,
    pub z: Dense,
}

pub fn dense_forward(adj: &Dense, x: &Dense, w0: &Dense, w1: &Dense) -> DenseForward {
    let h1_pre = matmul(&matmul(adj, x), w0);
    let h1: Dense = h1_pre.iter().map(|r| r.iter().map(|v| v.max(0.0)).collect()).collect();
    let logits = matmul(&matmul(adj, &h1), w1);
    let z = logits
        .iter()
        .map(|r| {
            let s: f64 = r.iter().map(|v| v.exp()).sum();
            r.iter().map(|v| v.exp() / s).collect()
        })
        .collect();
    DenseForward { h1_pre, logits, z }
}

pub fn dense_cross_entropy(z: &Dense, labels: &[u16], mask: &[bool]) -> f64 {
    let mut loss = 0.0;
    for n in 0..z.len() {
        if mask[n] {
            loss -= z[n][labels[n] as usize].ln();
        }
    }
    loss
}

impl Instance {
    pub fn adj_dense(&self, values: &[f64]) -> Dense {
        dense_norm_adj(self.n, &self.edges, values, Some(&self.keep))
    }

    /// Cross-entropy + `wd/2‖W0‖²` + `λ Σ|v|`.
    pub fn loss(&self, values: &[f64], w0: &Dense, w1: &Dense, wd: f64, lambda: f64) -> f64 {
        let fwd = dense_forward(&self.adj_dense(values), &self.x, w0, w1);
        let sq: f64 = w0.iter().flatten().map(|v| v * v).sum();
        let l1: f64 = values.iter().map(|v| v.abs()).sum();
        dense_cross_entropy(&fwd.z, &self.labels, &self.mask) + 0.5 * wd * sq + lambda * l1
    }

    /// Smallest |pre-activation|; instances near a ReLU kink are skipped by
    /// finite-difference checks.
    pub fn min_abs_preactivation(&self) -> f64 {
        let fwd = dense_forward(&self.adj_dense(&self.values), &self.x, &self.w0, &self.w1);
        fwd.h1_pre.iter().flatten().map(|v| v.abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn x_flat(&self) -> Vec<f64> {
        self.x.iter().flatten().copied().collect()
    }
}

/// Central difference of `f` at `x` along coordinate `k`.
pub fn central_diff(x: &[f64], k: usize, step: f64, f: impl Fn(&[f64]) -> f64) -> f64 {
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    plus[k] += step;
    minus[k] -= step;
    (f(&plus) - f(&minus)) / (2.0 * step)
}

pub fn unflatten(flat: &[f64], rows: usize, cols: usize) -> Dense {
    (0..rows).map(|r| flat[r * cols..(r + 1) * cols].to_vec()).collect()
}

/// `|a − b| / max(|a|, |b|, floor)`.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// Absolute floor for the relative-error denominator: below this, gradient
/// entries are compared absolutely (finite-difference roundoff is ~1e-10).
pub const REL_FLOOR: f64 = 1e-4;
