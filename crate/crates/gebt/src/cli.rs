//! Command-line interface. Exit codes: 0 success, 1 usage or configuration
//! error, 2 runtime failure.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gebt_core::{gen_synthetic, pairwise_distance_matrix, Criterion};

use crate::bundle::{load_bundle, save_bundle};
use crate::config::RunConfig;
use crate::error::GebtError;
use crate::maskio::write_mask;
use crate::output::{append_records, read_run_dir, run_stem, write_matrix_csv, write_report, write_run};
use crate::pipeline::{self, Pipeline};

#[derive(Debug, Parser)]
#[command(name = "gebt", version, about = "Early-bird ticket search for graph convolutional networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a stochastic-block-model dataset bundle.
    GenSynth(GenSynthArgs),
    /// Pretrain, train the graph for all epochs, prune, retrain.
    TrainBaseline(RunArgs),
    /// Graph early-bird ticket: stop graph training when the detector fires.
    FindGeb(FindGebArgs),
    /// Joint graph and weight early-bird ticket.
    FindJointEb(RunArgs),
    /// Random graph pruning followed by retraining.
    RandomPrune(RunArgs),
    /// Run pipelines over a grid of pruning ratios and seeds.
    Sweep(SweepArgs),
    /// Aggregate JSONL records into summary and figure tables.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct GenSynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub blocks: usize,
    #[arg(long, default_value_t = 50)]
    pub nodes_per_block: usize,
    #[arg(long, default_value_t = 0.2)]
    pub p_in: f64,
    #[arg(long, default_value_t = 0.01)]
    pub p_out: f64,
    #[arg(long, default_value_t = 16)]
    pub feat_dim: usize,
}

/// Flags shared by every training subcommand; they override the config file.
#[derive(Debug, Args)]
pub struct Overrides {
    /// Flat key=value config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub criterion: Option<String>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub queue_len: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Any config key, as KEY=VALUE; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Dataset bundle directory.
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub pg: Option<f64>,
    #[arg(long)]
    pub pw: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "runs")]
    pub out: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct FindGebArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Draw the ticket at this graph-training epoch instead of using the
    /// detector.
    #[arg(long)]
    pub draw_epoch: Option<usize>,
    /// Also write the drawn graph mask as a mask blob.
    #[arg(long)]
    pub save_mask: Option<PathBuf>,
    /// Also write the pairwise distance matrix of the graph-phase masks.
    #[arg(long)]
    pub pairwise: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Comma-separated pipelines: baseline, geb, joint_eb, random_prune.
    #[arg(long, value_delimiter = ',', default_value = "geb,random_prune")]
    pub pipelines: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "0.3")]
    pub pg: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub pw: Vec<f64>,
    #[arg(long = "seed", alias = "seeds", value_delimiter = ',', default_value = "0,1,2,3,4")]
    pub seeds: Vec<u64>,
    #[arg(long, default_value = "runs")]
    pub out: PathBuf,
    /// Also append every record to this JSONL file.
    #[arg(long)]
    pub combined: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory of `*.jsonl` records.
    #[arg(long, default_value = "runs")]
    pub runs: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

enum Failure {
    Usage(String),
    Runtime(GebtError),
}

impl From<GebtError> for Failure {
    fn from(e: GebtError) -> Self {
        match e {
            GebtError::Config(_) => Failure::Usage(e.to_string()),
            e => Failure::Runtime(e),
        }
    }
}

fn build_config(o: &Overrides, pg: Option<f64>, pw: Option<f64>, seed: Option<u64>) -> Result<RunConfig, Failure> {
    let mut cfg = match &o.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    for kv in &o.set {
        let (k, v) =
            kv.split_once('=').ok_or_else(|| Failure::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.set(k.trim(), v)?;
    }
    if let Some(c) = &o.criterion {
        cfg.criterion = Criterion::parse(c)
            .ok_or_else(|| Failure::Usage(format!("--criterion expects graph|network|sum, got {c:?}")))?;
    }
    if let Some(v) = o.eta {
        cfg.eta = v;
    }
    if let Some(v) = o.queue_len {
        cfg.queue_len = v;
    }
    if let Some(v) = o.epochs {
        cfg.epochs = v;
    }
    if let Some(v) = pg {
        cfg.p_g = v;
    }
    if let Some(v) = pw {
        cfg.p_w = v;
    }
    if let Some(v) = seed {
        cfg.seed = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn single(pipeline: Pipeline, args: &RunArgs) -> Result<pipeline::RunRecord, Failure> {
    let cfg = build_config(&args.overrides, args.pg, args.pw, args.seed)?;
    let ds = load_bundle(&args.dataset)?;
    Ok(pipeline::run(pipeline, &ds, &cfg)?)
}

fn emit(out: &std::path::Path, rec: &pipeline::RunRecord) -> Result<(), Failure> {
    let (jsonl, trace) = write_run(out, rec)?;
    println!("{}", jsonl.display());
    println!("{}", trace.display());
    println!(
        "{}: test acc {:.4} (best val epoch {}), t_EB {}, train FLOPs {}, inference FLOPs {}",
        run_stem(rec),
        rec.final_test_acc,
        rec.best_epoch.map_or("-".into(), |e| e.to_string()),
        rec.t_eb.map_or("-".into(), |e| e.to_string()),
        rec.train_flops,
        rec.infer_flops
    );
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::GenSynth(a) => {
            let ds = gen_synthetic(a.seed, a.blocks, a.nodes_per_block, a.p_in, a.p_out, a.feat_dim)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            save_bundle(&ds, &a.out)?;
            println!(
                "{}: N={} M={} C={} F={}",
                a.out.display(),
                ds.num_nodes(),
                ds.num_edges(),
                ds.feature_dim(),
                ds.num_classes()
            );
        }
        Command::TrainBaseline(a) => emit(&a.out, &single(Pipeline::Baseline, &a)?)?,
        Command::FindJointEb(a) => emit(&a.out, &single(Pipeline::JointEb, &a)?)?,
        Command::RandomPrune(a) => emit(&a.out, &single(Pipeline::RandomPrune, &a)?)?,
        Command::FindGeb(a) => {
            let cfg = build_config(&a.run.overrides, a.run.pg, a.run.pw, a.run.seed)?;
            let ds = load_bundle(&a.run.dataset)?;
            let ticket = match a.draw_epoch {
                Some(e) => pipeline::run_geb_drawn_at_detailed(&ds, &cfg, e)?,
                None => pipeline::run_geb_detailed(&ds, &cfg)?,
            };
            emit(&a.run.out, &ticket.record)?;
            if let Some(path) = &a.save_mask {
                write_mask(&ticket.mask, path)?;
            }
            if let Some(path) = &a.pairwise {
                let m = pairwise_distance_matrix(&ticket.history).map_err(GebtError::from)?;
                write_matrix_csv(path, &m)?;
            }
        }
        Command::Sweep(a) => {
            let cfg = build_config(&a.overrides, None, None, None)?;
            let pipelines = a
                .pipelines
                .iter()
                .map(|p| Pipeline::parse(p).ok_or_else(|| Failure::Usage(format!("unknown pipeline {p:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let grid: Vec<(f64, f64)> = a.pg.iter().flat_map(|&g| a.pw.iter().map(move |&w| (g, w))).collect();
            let ds = load_bundle(&a.dataset)?;
            let records = pipeline::sweep(&ds, &cfg, &pipelines, &grid, &a.seeds)?;
            let failed = records.iter().filter(|r| r.error.is_some()).count();
            for rec in &records {
                write_run(&a.out, rec)?;
            }
            if let Some(path) = &a.combined {
                append_records(path, &records)?;
            }
            println!("{} records written to {} ({failed} failed)", records.len(), a.out.display());
        }
        Command::Report(a) => {
            let records = read_run_dir(&a.runs)?;
            println!("# {}", gebt_core::flops::CONVENTION);
            for path in write_report(&records, &a.out)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run with --help for usage");
            1
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}
