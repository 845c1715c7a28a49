//! Analytic-vs-finite-difference gradient checks on random instances.
#![allow(dead_code)]

use gebt_core::adjacency::normalize_edges;
use gebt_core::gcn::{gcn_backward_weights, gcn_forward_eval};
use gebt_core::sparsify::{grad_edge_values, DegreeGrad};
use gebt_core::{CsrMatrix, GcnParams, Matrix};

use super::{central_diff, rel_err, unflatten, Instance, REL_FLOOR};

pub const FD_STEP: f64 = 1e-5;

fn params_of(inst: &Instance) -> GcnParams {
    let flat = |d: &Vec<Vec<f64>>| d.iter().flatten().copied().collect::<Vec<_>>();
    GcnParams::new(Matrix::from_vec(inst.c, inst.h, flat(&inst.w0)), Matrix::from_vec(inst.h, inst.f, flat(&inst.w1)))
        .unwrap()
}

/// Max relative error over every entry of `W0` and `W1`.
pub fn weight_gradient_error(inst: &Instance, wd: f64) -> f64 {
    let adj = normalize_edges(inst.n, &inst.edges, &inst.values, Some(&inst.keep)).unwrap();
    let x = CsrMatrix::from_dense(inst.n, inst.c, &inst.x_flat());
    let params = params_of(inst);
    let cache = gcn_forward_eval(&adj, &x, &params).unwrap();
    let g = gcn_backward_weights(&cache, &adj, &x, &params, &inst.labels, &inst.mask, wd).unwrap();

    let w0_flat: Vec<f64> = inst.w0.iter().flatten().copied().collect();
    let w1_flat: Vec<f64> = inst.w1.iter().flatten().copied().collect();
    let mut worst: f64 = 0.0;
    for k in 0..w0_flat.len() {
        let fd = central_diff(&w0_flat, k, FD_STEP, |w| {
            inst.loss(&inst.values, &unflatten(w, inst.c, inst.h), &inst.w1, wd, 0.0)
        });
        worst = worst.max(rel_err(g.w0.as_slice()[k], fd, REL_FLOOR));
    }
    for k in 0..w1_flat.len() {
        let fd = central_diff(&w1_flat, k, FD_STEP, |w| {
            inst.loss(&inst.values, &inst.w0, &unflatten(w, inst.h, inst.f), wd, 0.0)
        });
        worst = worst.max(rel_err(g.w1.as_slice()[k], fd, REL_FLOOR));
    }
    worst
}

/// Max relative error over every edge value, degree chain included.
pub fn edge_gradient_error(inst: &Instance, lambda: f64) -> f64 {
    let adj = normalize_edges(inst.n, &inst.edges, &inst.values, Some(&inst.keep)).unwrap();
    let x = CsrMatrix::from_dense(inst.n, inst.c, &inst.x_flat());
    let params = params_of(inst);
    let cache = gcn_forward_eval(&adj, &x, &params).unwrap();
    let g =
        grad_edge_values(&cache, &adj, &params, &inst.labels, &inst.mask, &inst.values, lambda, DegreeGrad::Include)
            .unwrap();
    let mut worst: f64 = 0.0;
    for e in 0..inst.values.len() {
        let fd = central_diff(&inst.values, e, FD_STEP, |v| inst.loss(v, &inst.w0, &inst.w1, 0.0, lambda));
        worst = worst.max(rel_err(g[e], fd, REL_FLOOR));
    }
    worst
}
