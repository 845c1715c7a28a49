//! Shared pieces of the acceptance target: dataset lookup, the synthetic
//! fixture and verdict lines.
//!
//! Kept in its own package so that `cargo test --workspace` runs the
//! acceptance target after every other test binary.

use std::fmt;
use std::path::{Path, PathBuf};

use gebt::RunConfig;
use gebt_core::{gen_synthetic, GraphDataset};

/// Overrides the directory holding `cora/`, `citeseer/` and `pubmed/`.
pub const DATA_DIR_VAR: &str = "GEBT_DATA_DIR";

pub fn data_dir() -> PathBuf {
    match std::env::var_os(DATA_DIR_VAR) {
        Some(d) => PathBuf::from(d),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).ancestors().nth(2).expect("crate sits in crates/").join("data"),
    }
}

/// Bundle directory for `name` if it looks complete.
pub fn find_bundle(root: &Path, name: &str) -> Option<PathBuf> {
    let dir = root.join(name);
    gebt::bundle::FILES.iter().all(|f| dir.join(f).is_file()).then_some(dir)
}

/// Four-block SBM with dense noisy features, used where a real dataset is
/// unavailable.
pub fn sbm_fixture() -> GraphDataset {
    gen_synthetic(7, 4, 250, 0.05, 0.01, 256).expect("fixed fixture parameters are valid")
}

/// Default run configuration for [`sbm_fixture`]. Row normalization would
/// shrink the uniform-noise features so far that 100 epochs do not converge.
pub fn sbm_config() -> RunConfig {
    RunConfig { normalize_features: false, ..RunConfig::default() }
}

pub fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (s, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub id: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(id: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { id: id.into(), pass, detail: detail.into() }
    }

    pub fn blocked(id: impl Into<String>, missing: &[&str], root: &Path) -> Self {
        let detail = format!("BLOCKED: bundle missing ({}) under {}", missing.join(", "), root.display());
        Self::new(id, false, detail)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {}", self.id, self.detail)
    }
}
