//! End-to-end pipelines: baseline, GEB, joint-EB and random pruning, plus
//! the parallel sweep that runs them over a grid.

use std::time::Instant;

use gebt_core::flops::{stored_entries, InferenceFlops, PhaseFlops, CONVENTION};
use gebt_core::gcn::init_params_with;
use gebt_core::rng::{stream, Stream};
use gebt_core::sparsify::{derive_weight_mask, random_mask, DegreeGrad};
use gebt_core::train::{edge_epoch, evaluate, weight_epoch, BestVal, Problem};
use gebt_core::{
    apply_graph_prune, apply_weight_prune, derive_mask, inference_flops, mask_distance, memory_estimate,
    normalize_adjacency, CsrMatrix, EbDetector, EdgeParams, FlopsReport, GcnParams, GraphDataset, NormalizedAdjacency,
    PruneMask, PrunedGraph, TrainConfig,
};
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{in_phase, GebtError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Baseline,
    Geb,
    JointEb,
    RandomPrune,
}

impl Pipeline {
    pub const ALL: [Pipeline; 4] = [Pipeline::Baseline, Pipeline::Geb, Pipeline::JointEb, Pipeline::RandomPrune];

    pub fn as_str(self) -> &'static str {
        match self {
            Pipeline::Baseline => "baseline",
            Pipeline::Geb => "geb",
            Pipeline::JointEb => "joint_eb",
            Pipeline::RandomPrune => "random_prune",
        }
    }

    /// Accepts the snake-case names plus `joint-eb` / `random-prune`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        Self::ALL.into_iter().find(|p| p.as_str() == s)
    }

    /// Whether the pipeline prunes weights as well as edges.
    pub fn prunes_weights(self) -> bool {
        self == Pipeline::JointEb
    }
}

/// One epoch of one phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub phase: String,
    pub epoch: usize,
    /// Weight objective for weight phases, graph loss for the graph phase.
    pub loss: f64,
    pub graph_loss: Option<f64>,
    pub val_acc: Option<f64>,
    pub d_g: Option<f64>,
    pub d_w: Option<f64>,
    /// Value pushed to the detector queue.
    pub combined: Option<f64>,
    pub fired: bool,
}

impl TraceEntry {
    fn weights(phase: &'static str, epoch: usize, loss: f64, val: f64) -> Self {
        Self {
            phase: phase.into(),
            epoch,
            loss,
            graph_loss: None,
            val_acc: Some(val),
            d_g: None,
            d_w: None,
            combined: None,
            fired: false,
        }
    }

    /// Whether the entry belongs to a ticket-search phase.
    pub fn is_search(&self) -> bool {
        self.phase == PHASE_GRAPH || self.phase == PHASE_JOINT
    }
}

pub const PHASE_PRETRAIN: &str = "pretrain";
pub const PHASE_GRAPH: &str = "graph";
pub const PHASE_JOINT: &str = "joint";
pub const PHASE_RETRAIN: &str = "retrain";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCost {
    pub name: String,
    pub epochs: u64,
    pub aggregation: u64,
    pub combination: u64,
    pub total: u64,
}

impl From<&PhaseFlops> for PhaseCost {
    fn from(p: &PhaseFlops) -> Self {
        Self {
            name: p.name.clone(),
            epochs: p.epochs,
            aggregation: p.aggregation,
            combination: p.combination,
            total: p.total(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlopsBreakdown {
    pub convention: String,
    pub backward_factor: f64,
    pub graph_density: f64,
    pub weight_density: f64,
    pub phases: Vec<PhaseCost>,
    pub inference_aggregation: u64,
    pub inference_combination: u64,
}

impl From<&FlopsReport> for FlopsBreakdown {
    fn from(r: &FlopsReport) -> Self {
        Self {
            convention: CONVENTION.into(),
            backward_factor: r.backward_factor,
            graph_density: r.graph_density,
            weight_density: r.weight_density,
            phases: r.phases.iter().map(PhaseCost::from).collect(),
            inference_aggregation: r.inference.aggregation(),
            inference_combination: r.inference.combination(),
        }
    }
}

/// Everything one run reports. Field order is the JSON key order, and
/// `wall_time_s` is last so records can be compared with it stripped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub pipeline: Pipeline,
    pub dataset: String,
    pub seed: u64,
    pub p_g: f64,
    pub p_w: f64,
    pub config: RunConfig,
    pub t_max: usize,
    /// Epoch at which the detector fired.
    pub t_eb: Option<usize>,
    /// Epoch whose masks were used for pruning.
    pub draw_epoch: Option<usize>,
    pub early_ticket: bool,
    pub kept_edges: usize,
    pub nonzero_weights: usize,
    pub best_epoch: Option<usize>,
    pub best_val_acc: f64,
    pub final_test_acc: f64,
    pub train_flops: u64,
    pub infer_flops: u64,
    pub memory_bytes: u64,
    pub flops: Option<FlopsBreakdown>,
    pub trace: Vec<TraceEntry>,
    pub error: Option<String>,
    pub wall_time_s: f64,
}

impl RunRecord {
    fn empty(pipeline: Pipeline, ds: &GraphDataset, cfg: &RunConfig) -> Self {
        let p_w = if pipeline.prunes_weights() { cfg.p_w } else { 0.0 };
        Self {
            pipeline,
            dataset: ds.name().to_string(),
            seed: cfg.seed,
            p_g: cfg.p_g,
            p_w,
            config: cfg.clone(),
            t_max: cfg.epochs,
            t_eb: None,
            draw_epoch: None,
            early_ticket: false,
            kept_edges: 0,
            nonzero_weights: 0,
            best_epoch: None,
            best_val_acc: 0.0,
            final_test_acc: 0.0,
            train_flops: 0,
            infer_flops: 0,
            memory_bytes: 0,
            flops: None,
            trace: Vec::new(),
            error: None,
            wall_time_s: 0.0,
        }
    }

    /// Record for a run that failed; numeric fields stay zero.
    pub fn failed(pipeline: Pipeline, ds: &GraphDataset, cfg: &RunConfig, err: &GebtError) -> Self {
        Self { error: Some(err.to_string()), ..Self::empty(pipeline, ds, cfg) }
    }

    fn set_flops(&mut self, report: &FlopsReport) {
        self.train_flops = report.training_flops();
        self.infer_flops = report.inference_flops();
        self.memory_bytes = report.memory_bytes;
        self.flops = Some(FlopsBreakdown::from(report));
    }

    fn set_best(&mut self, best: BestVal) {
        self.best_epoch = best.epoch;
        self.best_val_acc = best.val;
        self.final_test_acc = best.test;
    }

    /// Rows of the trace that belong to the ticket search.
    pub fn search_trace(&self) -> impl Iterator<Item = &TraceEntry> {
        self.trace.iter().filter(|e| e.is_search())
    }

    pub fn phase_flops(&self, name: &str) -> Option<&PhaseCost> {
        self.flops.as_ref()?.phases.iter().find(|p| p.name == name)
    }

    /// The JSON line for this record with `wall_time_s` zeroed.
    pub fn canonical_json(&self) -> Result<String> {
        let mut r = self.clone();
        r.wall_time_s = 0.0;
        Ok(serde_json::to_string(&r)?)
    }
}

/// Shared per-dataset state for a run.
struct Context<'a> {
    ds: &'a GraphDataset,
    x: CsrMatrix,
    cfg: &'a RunConfig,
    train: TrainConfig,
    dims: [usize; 3],
}

impl<'a> Context<'a> {
    fn new(ds: &'a GraphDataset, cfg: &'a RunConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            ds,
            x: ds.feature_matrix(cfg.normalize_features),
            cfg,
            train: cfg.train(),
            dims: [ds.feature_dim(), cfg.hidden, ds.num_classes()],
        })
    }

    fn problem(&self) -> Problem<'_> {
        Problem::new(self.ds, &self.x)
    }

    fn degree(&self) -> DegreeGrad {
        if self.cfg.freeze_degrees {
            DegreeGrad::Freeze
        } else {
            DegreeGrad::Include
        }
    }

    fn require_edges(&self, phase: &'static str) -> Result<()> {
        if self.ds.num_edges() == 0 {
            return Err(in_phase(phase, None)(gebt_core::Error::Argument("graph has no edges to sparsify".into())));
        }
        Ok(())
    }

    fn init(&self, which: Stream) -> Result<GcnParams> {
        let [c, h, f] = self.dims;
        init_params_with(c, h, f, &mut stream(self.cfg.seed, which)).map_err(in_phase(PHASE_PRETRAIN, None))
    }

    fn full_adjacency(&self) -> Result<NormalizedAdjacency> {
        normalize_adjacency(self.ds, &vec![1.0; self.ds.num_edges()], None).map_err(in_phase(PHASE_PRETRAIN, None))
    }

    fn forward_cost(&self, kept_edges: usize, p_w: f64) -> Result<InferenceFlops> {
        let n = self.ds.num_nodes();
        Ok(inference_flops(n, stored_entries(n, kept_edges), &self.dims, p_w)?)
    }

    fn report(&self, kept_edges: usize, p_g: f64, p_w: f64) -> Result<FlopsReport> {
        let inference = self.forward_cost(kept_edges, p_w)?;
        let memory = memory_estimate(self.ds.num_nodes(), &self.dims, p_w, self.cfg.bytes_per_value)?;
        Ok(FlopsReport::new(inference, memory, p_g, p_w, self.cfg.backward_factor))
    }

    /// `epochs` weight updates with best-validation tracking.
    fn train_weights<R: RngCore>(
        &self,
        phase: &'static str,
        adj: &NormalizedAdjacency,
        params: &mut GcnParams,
        rng: &mut R,
        trace: &mut Vec<TraceEntry>,
    ) -> Result<BestVal> {
        let prob = self.problem();
        let mut best = BestVal::default();
        for epoch in 1..=self.train.epochs {
            let loss = weight_epoch(adj, &prob, params, &self.train, rng).map_err(in_phase(phase, Some(epoch)))?;
            let (val, test) = evaluate(adj, &prob, params).map_err(in_phase(phase, Some(epoch)))?;
            best.update(epoch, val, test);
            trace.push(TraceEntry::weights(phase, epoch, loss, val));
        }
        Ok(best)
    }

    fn pretrain(&self, trace: &mut Vec<TraceEntry>) -> Result<(GcnParams, BestVal)> {
        let adj = self.full_adjacency()?;
        let mut params = self.init(Stream::Init)?;
        let best =
            self.train_weights(PHASE_PRETRAIN, &adj, &mut params, &mut stream(self.cfg.seed, Stream::Dropout), trace)?;
        Ok((params, best))
    }

    /// Fresh weights on the pruned graph.
    fn retrain_from_scratch(&self, pruned: &PrunedGraph, trace: &mut Vec<TraceEntry>) -> Result<(GcnParams, BestVal)> {
        let adj = pruned.adjacency(self.ds).map_err(in_phase(PHASE_RETRAIN, None))?;
        let mut params = self.init(Stream::RetrainInit)?;
        let mut rng = stream(self.cfg.seed, Stream::RetrainDropout);
        let best = self.train_weights(PHASE_RETRAIN, &adj, &mut params, &mut rng, trace)?;
        Ok((params, best))
    }
}

/// When the graph phase stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stop {
    Detector,
    AtEpoch(usize),
}

struct GraphPhase {
    values: Vec<f64>,
    mask: PruneMask,
    epochs_run: usize,
    t_eb: Option<usize>,
    history: Vec<PruneMask>,
}

/// Trains edge values with the weights frozen and dropout off.
fn graph_phase(ctx: &Context<'_>, params: &GcnParams, stop: Stop, trace: &mut Vec<TraceEntry>) -> Result<GraphPhase> {
    ctx.require_edges(PHASE_GRAPH)?;
    let t_max = ctx.train.epochs;
    if let Stop::AtEpoch(e) = stop {
        if e == 0 || e > t_max {
            return Err(GebtError::Config(format!("draw epoch {e} outside 1..={t_max}")));
        }
    }
    let prob = ctx.problem();
    let mut edges = EdgeParams::new(ctx.ds.num_edges());
    let mut det = EbDetector::new(ctx.cfg.detector()).map_err(in_phase(PHASE_GRAPH, None))?;
    let mut history: Vec<PruneMask> = Vec::new();
    let mut t_eb = None;
    for t in 1..=t_max {
        let at = in_phase(PHASE_GRAPH, Some(t));
        let adj = normalize_adjacency(ctx.ds, edges.values(), None).map_err(at)?;
        let loss = edge_epoch(&adj, &prob, params, &mut edges, &ctx.train, ctx.degree())
            .map_err(in_phase(PHASE_GRAPH, Some(t)))?;
        let m_t = derive_mask(edges.values(), ctx.cfg.p_g).map_err(in_phase(PHASE_GRAPH, Some(t)))?;
        let (d_g, combined, fired) = match stop {
            Stop::Detector => {
                let fired = det.geb_step(&m_t, t).map_err(in_phase(PHASE_GRAPH, Some(t)))?;
                let d = det.last_distances();
                (d.d_g, d.queued, fired)
            }
            Stop::AtEpoch(_) => {
                let d = match history.last() {
                    Some(prev) => Some(mask_distance(&m_t, prev)?),
                    None => None,
                };
                (d, d, false)
            }
        };
        trace.push(TraceEntry {
            phase: PHASE_GRAPH.into(),
            epoch: t,
            loss,
            graph_loss: Some(loss),
            val_acc: None,
            d_g,
            d_w: None,
            combined,
            fired,
        });
        history.push(m_t);
        let done = match stop {
            Stop::Detector => fired,
            Stop::AtEpoch(e) => t == e,
        };
        if fired {
            t_eb = Some(t);
        }
        if done {
            break;
        }
    }
    if stop == Stop::Detector && t_eb.is_none() {
        log::warn!("graph detector did not fire within {t_max} epochs; using the epoch-{t_max} mask");
    }
    let mask = history.last().cloned().expect("at least one epoch runs");
    Ok(GraphPhase { values: edges.values().to_vec(), mask, epochs_run: history.len(), t_eb, history })
}

/// A GEB-style run together with the drawn mask and the per-epoch mask
/// history of the graph phase.
#[derive(Debug, Clone)]
pub struct GraphTicket {
    pub record: RunRecord,
    pub mask: PruneMask,
    pub history: Vec<PruneMask>,
}

fn graph_pipeline(pipeline: Pipeline, ds: &GraphDataset, cfg: &RunConfig, stop: Stop) -> Result<GraphTicket> {
    let start = Instant::now();
    let ctx = Context::new(ds, cfg)?;
    let mut rec = RunRecord::empty(pipeline, ds, cfg);
    let (params, _) = ctx.pretrain(&mut rec.trace)?;
    let phase = graph_phase(&ctx, &params, stop, &mut rec.trace)?;
    let pruned = apply_graph_prune(&phase.values, &phase.mask).map_err(in_phase(PHASE_GRAPH, None))?;
    let (params, best) = ctx.retrain_from_scratch(&pruned, &mut rec.trace)?;

    let mut report = ctx.report(pruned.kept_edges(), cfg.p_g, 0.0)?;
    let full = ctx.forward_cost(ds.num_edges(), 0.0)?;
    let t_max = cfg.epochs as u64;
    report.add_phase(PHASE_PRETRAIN, &full, t_max);
    report.add_phase(PHASE_GRAPH, &full, phase.epochs_run as u64);
    report.add_phase(PHASE_RETRAIN, &report.inference.clone(), t_max);

    rec.t_eb = phase.t_eb;
    rec.draw_epoch = Some(phase.epochs_run);
    rec.early_ticket = phase.t_eb.is_some();
    rec.kept_edges = pruned.kept_edges();
    rec.nonzero_weights = params.nonzero_count();
    rec.set_best(best);
    rec.set_flops(&report);
    rec.wall_time_s = start.elapsed().as_secs_f64();
    Ok(GraphTicket { record: rec, mask: phase.mask, history: phase.history })
}

/// Pretrain, train the graph for the full `epochs`, prune at `p_g`, retrain
/// from a fresh initialization.
pub fn run_baseline(ds: &GraphDataset, cfg: &RunConfig) -> Result<RunRecord> {
    Ok(graph_pipeline(Pipeline::Baseline, ds, cfg, Stop::AtEpoch(cfg.epochs))?.record)
}

/// As [`run_baseline`], but the graph phase stops when the detector fires.
pub fn run_geb(ds: &GraphDataset, cfg: &RunConfig) -> Result<RunRecord> {
    Ok(run_geb_detailed(ds, cfg)?.record)
}

pub fn run_geb_detailed(ds: &GraphDataset, cfg: &RunConfig) -> Result<GraphTicket> {
    graph_pipeline(Pipeline::Geb, ds, cfg, Stop::Detector)
}

/// GEB pipeline with the ticket drawn at a fixed graph-training epoch.
pub fn run_geb_drawn_at(ds: &GraphDataset, cfg: &RunConfig, epoch: usize) -> Result<RunRecord> {
    Ok(run_geb_drawn_at_detailed(ds, cfg, epoch)?.record)
}

pub fn run_geb_drawn_at_detailed(ds: &GraphDataset, cfg: &RunConfig, epoch: usize) -> Result<GraphTicket> {
    graph_pipeline(Pipeline::Geb, ds, cfg, Stop::AtEpoch(epoch))
}

/// Alternating weight and edge updates until the joint detector fires, then
/// both prunes and a retrain of the ticket.
pub fn run_joint_eb(ds: &GraphDataset, cfg: &RunConfig) -> Result<RunRecord> {
    let start = Instant::now();
    let ctx = Context::new(ds, cfg)?;
    ctx.require_edges(PHASE_JOINT)?;
    let mut rec = RunRecord::empty(Pipeline::JointEb, ds, cfg);
    let prob = ctx.problem();
    let t_max = cfg.epochs;

    let mut params = ctx.init(Stream::Init)?;
    let mut rng = stream(cfg.seed, Stream::Dropout);
    let mut edges = EdgeParams::new(ds.num_edges());
    let mut det = EbDetector::new(cfg.detector()).map_err(in_phase(PHASE_JOINT, None))?;
    let mut drawn: Option<(PruneMask, PruneMask)> = None;
    let mut epochs_run = 0;
    for t in 1..=t_max {
        let at = |e| in_phase(PHASE_JOINT, Some(t))(e);
        let adj = normalize_adjacency(ds, edges.values(), None).map_err(at)?;
        let loss = weight_epoch(&adj, &prob, &mut params, &ctx.train, &mut rng).map_err(at)?;
        let (val, _) = evaluate(&adj, &prob, &params).map_err(at)?;
        let graph_loss = edge_epoch(&adj, &prob, &params, &mut edges, &ctx.train, ctx.degree()).map_err(at)?;
        let m_t = derive_mask(edges.values(), cfg.p_g).map_err(at)?;
        let n_t = derive_weight_mask(&params, cfg.p_w, cfg.per_layer_weight_mask).map_err(at)?;
        let fired = det.joint_eb_step(&m_t, &n_t, t).map_err(at)?;
        let d = det.last_distances();
        rec.trace.push(TraceEntry {
            phase: PHASE_JOINT.into(),
            epoch: t,
            loss,
            graph_loss: Some(graph_loss),
            val_acc: Some(val),
            d_g: d.d_g,
            d_w: d.d_w,
            combined: d.queued,
            fired,
        });
        epochs_run = t;
        drawn = Some((m_t, n_t));
        if fired {
            rec.t_eb = Some(t);
            break;
        }
    }
    if rec.t_eb.is_none() {
        log::warn!("joint detector did not fire within {t_max} epochs; using the epoch-{t_max} masks");
    }
    let (m, n) = drawn.expect("at least one epoch runs");
    let pruned = apply_graph_prune(edges.values(), &m).map_err(in_phase(PHASE_JOINT, None))?;
    if cfg.reinit_joint_weights {
        params = ctx.init(Stream::RetrainInit)?;
    } else {
        params.reset_optimizer();
    }
    apply_weight_prune(&mut params, &n).map_err(in_phase(PHASE_JOINT, None))?;
    let adj = pruned.adjacency(ds).map_err(in_phase(PHASE_RETRAIN, None))?;
    let mut rng = stream(cfg.seed, Stream::RetrainDropout);
    let best = ctx.train_weights(PHASE_RETRAIN, &adj, &mut params, &mut rng, &mut rec.trace)?;

    let mut report = ctx.report(pruned.kept_edges(), cfg.p_g, cfg.p_w)?;
    let full = ctx.forward_cost(ds.num_edges(), 0.0)?;
    report.add_phase("joint_weights", &full, epochs_run as u64);
    report.add_phase("joint_graph", &full, epochs_run as u64);
    report.add_phase(PHASE_RETRAIN, &report.inference.clone(), t_max as u64);

    rec.draw_epoch = Some(epochs_run);
    rec.early_ticket = rec.t_eb.is_some();
    rec.kept_edges = pruned.kept_edges();
    rec.nonzero_weights = params.nonzero_count();
    rec.set_best(best);
    rec.set_flops(&report);
    rec.wall_time_s = start.elapsed().as_secs_f64();
    Ok(rec)
}

/// Uniformly random graph mask with exact popcount, unit edge values, and a
/// retrain; there is no pretraining or graph phase.
pub fn run_random_prune(ds: &GraphDataset, cfg: &RunConfig) -> Result<RunRecord> {
    let start = Instant::now();
    let ctx = Context::new(ds, cfg)?;
    let mut rec = RunRecord::empty(Pipeline::RandomPrune, ds, cfg);
    let mask = random_mask(ds.num_edges(), cfg.p_g, &mut stream(cfg.seed, Stream::RandomMask))
        .map_err(in_phase(PHASE_RETRAIN, None))?;
    let pruned = apply_graph_prune(&vec![1.0; ds.num_edges()], &mask).map_err(in_phase(PHASE_RETRAIN, None))?;
    let (params, best) = ctx.retrain_from_scratch(&pruned, &mut rec.trace)?;

    let mut report = ctx.report(pruned.kept_edges(), cfg.p_g, 0.0)?;
    report.add_phase(PHASE_RETRAIN, &report.inference.clone(), cfg.epochs as u64);

    rec.kept_edges = pruned.kept_edges();
    rec.nonzero_weights = params.nonzero_count();
    rec.set_best(best);
    rec.set_flops(&report);
    rec.wall_time_s = start.elapsed().as_secs_f64();
    Ok(rec)
}

/// Plain GCN training on the full graph: the pretraining phase on its own.
pub fn train_gcn(ds: &GraphDataset, cfg: &RunConfig) -> Result<(GcnParams, BestVal, Vec<TraceEntry>)> {
    let ctx = Context::new(ds, cfg)?;
    let mut trace = Vec::new();
    let (params, best) = ctx.pretrain(&mut trace)?;
    Ok((params, best, trace))
}

pub fn run(pipeline: Pipeline, ds: &GraphDataset, cfg: &RunConfig) -> Result<RunRecord> {
    match pipeline {
        Pipeline::Baseline => run_baseline(ds, cfg),
        Pipeline::Geb => run_geb(ds, cfg),
        Pipeline::JointEb => run_joint_eb(ds, cfg),
        Pipeline::RandomPrune => run_random_prune(ds, cfg),
    }
}

/// Runs every (pipeline, (p_g, p_w), seed) cell in parallel. Records come
/// back in that nesting order; failed cells carry their error.
pub fn sweep(
    ds: &GraphDataset,
    cfg: &RunConfig,
    pipelines: &[Pipeline],
    grid: &[(f64, f64)],
    seeds: &[u64],
) -> Result<Vec<RunRecord>> {
    if pipelines.is_empty() || grid.is_empty() || seeds.is_empty() {
        return Err(GebtError::Config("sweep needs at least one pipeline, ratio pair and seed".into()));
    }
    let cells: Vec<(Pipeline, RunConfig)> = pipelines
        .iter()
        .flat_map(|&p| {
            grid.iter().flat_map(move |&(p_g, p_w)| {
                seeds.iter().map(move |&seed| (p, RunConfig { p_g, p_w, seed, ..cfg.clone() }))
            })
        })
        .collect();
    Ok(cells
        .par_iter()
        .map(|(p, c)| {
            run(*p, ds, c).unwrap_or_else(|e| {
                log::error!("{} p_g={} p_w={} seed={}: {e}", p.as_str(), c.p_g, c.p_w, c.seed);
                RunRecord::failed(*p, ds, c, &e)
            })
        })
        .collect())
}
