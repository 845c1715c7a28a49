//! On-disk dataset bundles.
//!
//! A bundle is a directory with five files:
//!
//! | file           | content                                                   |
//! |----------------|-----------------------------------------------------------|
//! | `meta.txt`     | `key=value` lines: `name`, `N`, `M`, `C`, `F`             |
//! | `edges.bin`    | `M` pairs of `u32` node indices                           |
//! | `features.bin` | `N × C` `f32` values, row-major                           |
//! | `labels.bin`   | `N` `u16` class indices                                   |
//! | `splits.bin`   | train, val, test bitmaps, `ceil(N / 8)` bytes each        |
//!
//! All integers and floats are little-endian; bitmaps are LSB-first.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use gebt_core::{GraphDataset, Splits};

use crate::error::{format_err, io_at, Result};

pub const META: &str = "meta.txt";
pub const EDGES: &str = "edges.bin";
pub const FEATURES: &str = "features.bin";
pub const LABELS: &str = "labels.bin";
pub const SPLITS: &str = "splits.bin";

/// Every file a bundle directory holds.
pub const FILES: [&str; 5] = [META, EDGES, FEATURES, LABELS, SPLITS];

pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
        out[i / 8] |= 1 << (i % 8);
    }
    out
}

pub fn unpack_bits(bytes: &[u8], len: usize) -> Vec<bool> {
    (0..len).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1).collect()
}

fn read_sized(dir: &Path, file: &str, expected: usize) -> Result<Vec<u8>> {
    let path = dir.join(file);
    let bytes = fs::read(&path).map_err(io_at(&path))?;
    if bytes.len() != expected {
        return Err(format_err(path, format!("expected {expected} bytes, found {}", bytes.len())));
    }
    Ok(bytes)
}

struct Meta {
    name: String,
    n: usize,
    m: usize,
    c: usize,
    f: usize,
}

fn parse_meta(dir: &Path) -> Result<Meta> {
    let path = dir.join(META);
    let text = fs::read_to_string(&path).map_err(io_at(&path))?;
    let mut kv = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format_err(&path, format!("line {}: expected key=value", lineno + 1)))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let count = |key: &str| -> Result<usize> {
        let raw = kv.get(key).ok_or_else(|| format_err(&path, format!("missing key {key}")))?;
        raw.parse().map_err(|_| format_err(&path, format!("{key}: not a count: {raw:?}")))
    };
    Ok(Meta {
        name: kv.get("name").cloned().unwrap_or_default(),
        n: count("N")?,
        m: count("M")?,
        c: count("C")?,
        f: count("F")?,
    })
}

pub fn load_bundle(dir: impl AsRef<Path>) -> Result<GraphDataset> {
    let dir = dir.as_ref();
    let meta = parse_meta(dir)?;
    let (n, m, c) = (meta.n, meta.m, meta.c);

    let edges = read_sized(dir, EDGES, m * 8)?
        .chunks_exact(8)
        .map(|r| (u32::from_le_bytes(r[0..4].try_into().unwrap()), u32::from_le_bytes(r[4..8].try_into().unwrap())))
        .collect();
    let features = read_sized(dir, FEATURES, n * c * 4)?
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    let labels =
        read_sized(dir, LABELS, n * 2)?.chunks_exact(2).map(|b| u16::from_le_bytes(b.try_into().unwrap())).collect();
    let stride = n.div_ceil(8);
    let raw = read_sized(dir, SPLITS, 3 * stride)?;
    let splits = Splits {
        train: unpack_bits(&raw[..stride], n),
        val: unpack_bits(&raw[stride..2 * stride], n),
        test: unpack_bits(&raw[2 * stride..], n),
    };
    Ok(GraphDataset::new(meta.name, n, edges, c, features, labels, meta.f, splits)?)
}

pub fn save_bundle(ds: &GraphDataset, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_at(dir))?;
    let write = |file: &str, bytes: &[u8]| {
        let path = dir.join(file);
        fs::write(&path, bytes).map_err(io_at(path))
    };
    let meta = format!(
        "name={}\nN={}\nM={}\nC={}\nF={}\n",
        ds.name(),
        ds.num_nodes(),
        ds.num_edges(),
        ds.feature_dim(),
        ds.num_classes()
    );
    write(META, meta.as_bytes())?;
    write(
        EDGES,
        &ds.edges().iter().flat_map(|&(i, j)| [i.to_le_bytes(), j.to_le_bytes()]).flatten().collect::<Vec<_>>(),
    )?;
    write(FEATURES, &ds.features().iter().flat_map(|v| v.to_le_bytes()).collect::<Vec<_>>())?;
    write(LABELS, &ds.labels().iter().flat_map(|v| v.to_le_bytes()).collect::<Vec<_>>())?;
    let mut splits = pack_bits(ds.train_mask());
    splits.extend(pack_bits(ds.val_mask()));
    splits.extend(pack_bits(ds.test_mask()));
    write(SPLITS, &splits)
}
