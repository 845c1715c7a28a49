//! Run artifacts: JSONL records, per-run trace CSVs, and the aggregated
//! report tables.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use gebt_core::flops::CONVENTION;
use gebt_core::Matrix;

use crate::error::{format_err, io_at, Result};
use crate::pipeline::RunRecord;

pub const SUMMARY: &str = "summary.csv";
pub const FIG_ACCURACY_VS_FLOPS: &str = "fig_accuracy_vs_flops.csv";
pub const FIG_DISTANCE_TRACE: &str = "fig_distance_trace.csv";
pub const FIG_ACCURACY_VS_EPOCH_DRAWN: &str = "fig_accuracy_vs_epoch_drawn.csv";

/// File stem shared by a run's record and trace, e.g.
/// `geb_cora_pg0.3_pw0_s0`.
pub fn run_stem(rec: &RunRecord) -> String {
    let name: String =
        rec.dataset.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
    let mut stem = format!("{}_{}_pg{}_pw{}_s{}", rec.pipeline.as_str(), name, rec.p_g, rec.p_w, rec.seed);
    if rec.pipeline == crate::pipeline::Pipeline::Geb && rec.t_eb.is_none() {
        if let Some(e) = rec.draw_epoch {
            stem.push_str(&format!("_e{e}"));
        }
    }
    stem
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(io_at(path))
}

/// Writes `<stem>.jsonl` and `<stem>.trace.csv` under `dir`.
pub fn write_run(dir: impl AsRef<Path>, rec: &RunRecord) -> Result<(PathBuf, PathBuf)> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_at(dir))?;
    let stem = run_stem(rec);
    let jsonl = dir.join(format!("{stem}.jsonl"));
    let mut f = create(&jsonl)?;
    writeln!(f, "{}", serde_json::to_string(rec)?).map_err(io_at(&jsonl))?;

    let trace = dir.join(format!("{stem}.trace.csv"));
    write_trace(&trace, rec)?;
    Ok((jsonl, trace))
}

/// Distance trace of the ticket search: `epoch,d_g,d_w,combined,fired`.
pub fn write_trace(path: &Path, rec: &RunRecord) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["epoch", "d_g", "d_w", "combined", "fired"])?;
    for e in rec.search_trace() {
        w.write_record([e.epoch.to_string(), opt(e.d_g), opt(e.d_w), opt(e.combined), u8::from(e.fired).to_string()])?;
    }
    w.flush().map_err(io_at(path))?;
    Ok(())
}

/// Appends records to a JSONL file, one per line.
pub fn append_records(path: impl AsRef<Path>, recs: &[RunRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path).map_err(io_at(path))?;
    for r in recs {
        writeln!(f, "{}", serde_json::to_string(r)?).map_err(io_at(path))?;
    }
    Ok(())
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let path = path.as_ref();
    let f = fs::File::open(path).map_err(io_at(path))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(io_at(path))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| format_err(path, format!("line {}: {e}", n + 1)))?);
    }
    Ok(out)
}

/// All records from `*.jsonl` files in `dir`, in file-name order.
pub fn read_run_dir(dir: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let dir = dir.as_ref();
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_at(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    let mut out = Vec::new();
    for f in files {
        out.extend(read_records(&f)?);
    }
    Ok(out)
}

fn csv_with_header(path: &Path) -> Result<csv::Writer<fs::File>> {
    let mut f = create(path)?;
    writeln!(f, "# {CONVENTION}").map_err(io_at(path))?;
    Ok(csv::Writer::from_writer(f))
}

fn key(rec: &RunRecord) -> [String; 5] {
    [rec.pipeline.as_str().into(), rec.dataset.clone(), rec.p_g.to_string(), rec.p_w.to_string(), rec.seed.to_string()]
}

/// Writes the summary and figure tables into `out`. Failed runs are skipped
/// with a warning.
pub fn write_report(records: &[RunRecord], out: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out = out.as_ref();
    fs::create_dir_all(out).map_err(io_at(out))?;
    let ok: Vec<&RunRecord> = records
        .iter()
        .filter(|r| {
            if let Some(e) = &r.error {
                log::warn!("skipping failed run {}: {e}", run_stem(r));
            }
            r.error.is_none()
        })
        .collect();

    let summary = out.join(SUMMARY);
    let mut w = csv_with_header(&summary)?;
    w.write_record([
        "pipeline",
        "dataset",
        "p_g",
        "p_w",
        "seed",
        "t_EB",
        "acc",
        "train_flops",
        "infer_flops",
        "memory_bytes",
    ])?;
    for r in &ok {
        let mut row = key(r).to_vec();
        row.extend([
            r.t_eb.map(|t| t.to_string()).unwrap_or_default(),
            r.final_test_acc.to_string(),
            r.train_flops.to_string(),
            r.infer_flops.to_string(),
            r.memory_bytes.to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush().map_err(io_at(&summary))?;

    let flops = out.join(FIG_ACCURACY_VS_FLOPS);
    let mut w = csv_with_header(&flops)?;
    w.write_record(["pipeline", "dataset", "p_g", "p_w", "seed", "acc", "train_flops", "infer_flops"])?;
    for r in &ok {
        let mut row = key(r).to_vec();
        row.extend([r.final_test_acc.to_string(), r.train_flops.to_string(), r.infer_flops.to_string()]);
        w.write_record(&row)?;
    }
    w.flush().map_err(io_at(&flops))?;

    let trace = out.join(FIG_DISTANCE_TRACE);
    let mut w = csv::Writer::from_writer(create(&trace)?);
    w.write_record(["pipeline", "dataset", "p_g", "p_w", "seed", "epoch", "d_g", "d_w", "combined", "fired"])?;
    for r in &ok {
        for e in r.search_trace() {
            let mut row = key(r).to_vec();
            row.extend([e.epoch.to_string(), opt(e.d_g), opt(e.d_w), opt(e.combined), u8::from(e.fired).to_string()]);
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(io_at(&trace))?;

    let drawn = out.join(FIG_ACCURACY_VS_EPOCH_DRAWN);
    let mut w = csv::Writer::from_writer(create(&drawn)?);
    w.write_record(["pipeline", "dataset", "p_g", "p_w", "seed", "draw_epoch", "early_ticket", "acc"])?;
    for r in ok.iter().filter(|r| r.draw_epoch.is_some()) {
        let mut row = key(r).to_vec();
        row.extend([
            r.draw_epoch.map(|e| e.to_string()).unwrap_or_default(),
            u8::from(r.early_ticket).to_string(),
            r.final_test_acc.to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush().map_err(io_at(&drawn))?;
    Ok(vec![summary, flops, trace, drawn])
}

/// Square distance matrix as CSV, one row per epoch.
pub fn write_matrix_csv(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in 0..m.rows() {
        w.write_record(m.row(r).iter().map(|v| v.to_string()))?;
    }
    w.flush().map_err(io_at(path))?;
    Ok(())
}
